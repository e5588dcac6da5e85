#pragma once

#include <vector>

#include "gibbs/symbolic.hpp"

namespace gibbs {

inline constexpr double kNormTol = 1e-10;
inline constexpr double kKernelTol = 1e-10;

enum class PotentialRole { raw, normalized };

class Potential {
 public:
  Potential() = default;

  static Potential raw(CylinderFunction b);
  // Throws std::invalid_argument unless sup|L_A 1 - 1| <= tol.
  static Potential normalized(CylinderFunction a, double tol = kNormTol);

  const CylinderFunction& function() const { return f_; }
  int depth() const { return f_.depth(); }
  int alphabet() const { return f_.alphabet(); }
  PotentialRole role() const { return role_; }
  bool is_normalized() const { return role_ == PotentialRole::normalized; }

 private:
  Potential(CylinderFunction f, PotentialRole role) : f_(std::move(f)), role_(role) {}

  CylinderFunction f_;
  PotentialRole role_ = PotentialRole::raw;
};

// (L_B f)(x) = sum_a e^{B(a x)} f(a x), stored at depth max(depth B, depth f) - 1 (>= 0).
CylinderFunction apply_ruelle(const CylinderFunction& b, const CylinderFunction& f);
CylinderFunction apply_ruelle(const Potential& b, const CylinderFunction& f);
CylinderFunction apply_ruelle_power(const Potential& b, const CylinderFunction& f, int n);

double normalization_residual(const CylinderFunction& b);

struct EigenOptions {
  double tol = 1e-13;
  int max_iter = 100000;
};

struct GibbsData {
  Potential potential;
  Potential normalized;
  int depth = 0;
  double eigenvalue = 1.0;
  double pressure = 0.0;
  CylinderFunction eigenfunction;
  CylinderMeasure eigenmeasure;
  CylinderMeasure measure;
  int iterations = 0;
  double residual = 0.0;
};

// Power iteration at state depth max(depth B - 1, 0); measures are extended exactly to `depth`.
GibbsData leading_eigendata(const Potential& b, int depth, const EigenOptions& opts = {});
Potential normalize(const Potential& b, const EigenOptions& opts = {});
double pressure(const Potential& b, const EigenOptions& opts = {});
CylinderMeasure gibbs_measure(const Potential& b, int depth, const EigenOptions& opts = {});
double entropy(const Potential& a);

class TangentVector {
 public:
  TangentVector() = default;
  // Throws std::invalid_argument unless A is normalized and sup|L_A x| <= tol.
  TangentVector(Potential base, CylinderFunction x, double tol = kKernelTol);

  const Potential& base() const { return base_; }
  const CylinderFunction& value() const { return x_; }

 private:
  Potential base_;
  CylinderFunction x_;
};

enum class KernelRule {
  // f - int f + u - u o sigma with (I - L_A) u = L_A f - int f; keeps the cohomology class.
  cohomological,
  // f - (L_A f) o sigma
  shift,
};

TangentVector kernel_project(const Potential& a, const CylinderFunction& f,
                             KernelRule rule = KernelRule::cohomological);

// d = 2: phi 1_[0] - (J(S) phi(S) / J) 1_[1], S(1, x) = (0, x).
TangentVector kernel_project_binary(const Potential& a, const CylinderFunction& phi);

double metric_inner(const Potential& a, const TangentVector& x, const TangentVector& y);
double fisher_information(const Potential& a, const TangentVector& xi);

struct VarianceResult {
  double value = 0.0;
  double tail_estimate = 0.0;
  std::vector<double> correlations;
};

// int f^2 + 2 sum_{n=1}^{n_terms} int f (f o sigma^n) dmu_A; correlations[0] = int f^2.
VarianceResult asymptotic_variance(const Potential& a, const CylinderFunction& f, int n_terms,
                                   double mean_tol = 1e-10);

struct CheckPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

// d/dt P(log J0 + t xi) at 0 by central difference vs int xi dmu_0.
CheckPair pressure_derivative_check(const Potential& j0, const CylinderFunction& xi, double h_step = 1e-4);

// int (L_A f) g dmu_A vs int f (g o sigma) dmu_A
CheckPair duality_check(const Potential& a, const CylinderFunction& f, const CylinderFunction& g);

}  // namespace gibbs
