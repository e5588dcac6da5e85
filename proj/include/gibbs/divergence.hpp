#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "gibbs/transfer.hpp"

namespace gibbs {

inline constexpr int kDefaultWorkingDepth = 8;

class UnsupportedDerivative : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// lambda -> log(lambda J2 + (1 - lambda) J0), a Jacobian for every lambda in [0,1].
class JFamily {
 public:
  JFamily(Potential j0, Potential j2);
  Potential at(double lambda) const;
  const Potential& j0() const { return j0_; }
  const Potential& j2() const { return j2_; }

 private:
  Potential j0_, j2_;
};

// lambda -> normalize(lambda log J2 + (1 - lambda) log J0)
class LogJFamily {
 public:
  LogJFamily(Potential j0, Potential j2);
  Potential at(double lambda) const;
  const Potential& j0() const { return j0_; }
  const Potential& j2() const { return j2_; }

 private:
  Potential j0_, j2_;
};

// first: lambda -> D(mu_1 | mu_lambda); second: lambda -> D(mu_lambda | mu_1)
enum class Problem { first, second };

double kl(const GibbsData& from, const GibbsData& to);
double kl(const Potential& from, const Potential& to, int depth = kDefaultWorkingDepth);

double derivative_at(const JFamily& family, Problem problem, int endpoint, const Potential& target,
                     int depth = kDefaultWorkingDepth);
// Throws UnsupportedDerivative for endpoint 1.
double derivative_at(const LogJFamily& family, Problem problem, int endpoint, const Potential& target,
                     int depth = kDefaultWorkingDepth);

struct OracleOptions {
  double h1 = 1e-3;
  double h2 = 1e-4;
  int depth = kDefaultWorkingDepth;
};

// Central differences at h1 and h2 combined by Richardson extrapolation.
double derivative_oracle(const JFamily& family, Problem problem, int endpoint, const Potential& target,
                         const OracleOptions& opts = {});
double derivative_oracle(const LogJFamily& family, Problem problem, int endpoint, const Potential& target,
                         const OracleOptions& opts = {});

double richardson_central(const std::function<double(double)>& f, double x, double h1, double h2);

struct FormulaValue {
  std::string name;
  double closed_form = 0.0;
  double oracle = 0.0;
  double relative_error = 0.0;
};

enum class Regime { second_law, fluctuation, neutral };
std::string to_string(Regime r);

struct DivergenceReport {
  // kl[i][j] = D(mu_i | mu_j)
  std::array<std::array<double, 3>, 3> kl{};
  double pythagorean_type1 = 0.0;
  double pythagorean_type1_from_kl = 0.0;
  double pythagorean_type2 = 0.0;
  double pythagorean_type2_from_kl = 0.0;
  double triangle_type1 = 0.0;
  double triangle_type2 = 0.0;
  std::vector<FormulaValue> derivatives;
  Regime regime = Regime::neutral;
  Regime oracle_regime = Regime::neutral;
  int depth = kDefaultWorkingDepth;
};

double relative_error(double value, double reference);

DivergenceReport defects(const Potential& j0, const Potential& j1, const Potential& j2,
                         int depth = kDefaultWorkingDepth, const OracleOptions& oracle = {});

// (p0 - p2)(log(1 - p0) - log p0 - log(1 - p1) + log p1) for Bernoulli triples, p_i = P_00.
double bernoulli_three_way(double p0, double p1, double p2);

struct Bregman {
  std::function<double(double)> pressure;
  double slope_at_zero = 0.0;
  double slope_at_zero_fd = 0.0;
  double slope_at_one = 0.0;
  double divergence = 0.0;
  std::function<double(double)> legendre;
};

Bregman bregman(const Potential& j0, const Potential& j2, int depth = kDefaultWorkingDepth);

// Maximizer of a concave function on [a, b]; endpoints included in the comparison.
double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol,
                          double* argmax = nullptr);

enum class Mode { min, max };
enum class FamilyKind { j, log_j };
enum class DerivativeSource { closed_form, finite_difference };

struct SimplexProblem {
  std::vector<Potential> vertices;
  Potential target;
  Mode mode = Mode::min;
  Problem slot = Problem::first;
  FamilyKind family = FamilyKind::j;
  int depth = kDefaultWorkingDepth;
};

struct SimplexOptions {
  DerivativeSource source = DerivativeSource::closed_form;
  double certificate_tol = 1e-8;
  double line_tol = 1e-10;
  int max_iter = 200;
};

struct SimplexResult {
  std::vector<double> weights;
  Potential optimum;
  double value = 0.0;
  std::vector<double> directional;
  std::vector<double> directional_fd;
  bool certificate = false;
  bool certificate_fd = false;
  bool on_boundary = false;
  int start = 0;
  int iterations = 0;
};

Potential simplex_point(const SimplexProblem& prob, const std::vector<double>& weights);
double simplex_objective(const SimplexProblem& prob, const Potential& point);
SimplexResult project_simplex(const SimplexProblem& prob, const SimplexOptions& opts = {});

}  // namespace gibbs
