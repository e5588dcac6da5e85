#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gibbs/markov.hpp"
#include "gibbs/symbolic.hpp"
#include "gibbs/transfer.hpp"

namespace gibbs {

enum class BasisKind {
  markov_e,
  markov_a,
  markov_b,
  markov_gamma,
  gibbs_e,
  gibbs_rho,
  kernel_frak_a,
  kernel_rho_hat,
  maxent_alpha,
  maxent_beta,
};

std::string to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);
bool is_kernel_kind(BasisKind k);

// Binary Markov constructions; all require d = 2.
CylinderFunction markov_haar_e(const StochasticMatrix& p, const Word& x);
CylinderFunction markov_kernel_a(const StochasticMatrix& p, const Word& x);
CylinderFunction markov_kernel_b(const StochasticMatrix& p, const Word& x);
// Sum of b_x over |x| = n, L2-normalized.
CylinderFunction markov_gamma(const StochasticMatrix& p, int n);

// General binary Gibbs measure given at depth >= |x| + 1.
CylinderFunction gibbs_haar_e(const CylinderMeasure& mu, const Word& x);
CylinderFunction gibbs_c(const CylinderMeasure& mu, const Word& x);
CylinderFunction gibbs_rho(const CylinderMeasure& mu, int n);

// Kernel elements for a normalized binary potential log J.
CylinderFunction kernel_frak_a(const Potential& log_j, const Word& x);
CylinderFunction kernel_rho_hat(const Potential& log_j, int n);

// Maximal-entropy families, values +-1.
CylinderFunction maxent_alpha(int n);
CylinderFunction maxent_beta(int n);

struct BasisElement {
  std::string label;
  CylinderFunction f;
};

struct BasisFamily {
  BasisKind kind = BasisKind::maxent_beta;
  Potential log_j;
  CylinderMeasure measure;
  std::vector<BasisElement> elements;
};

struct FamilySource {
  std::optional<StochasticMatrix> matrix;
  std::optional<Potential> log_j;
};

// Elements up to n_max: word families use all words of length 1..n_max.
BasisFamily build_family(BasisKind kind, const FamilySource& src, int n_max);

struct BoundsReport {
  std::vector<double> sup_norms;
  std::vector<double> l2_norms;
  std::vector<double> min_abs;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
};

struct FamilyVerification {
  double gram_deviation = 0.0;
  double orthogonality_deviation = 0.0;
  double kernel_residual = 0.0;
  std::vector<double> kernel_residuals;
  BoundsReport bounds;
};

std::vector<std::vector<double>> gram_matrix(const std::vector<CylinderFunction>& fs, const CylinderMeasure& mu);
BoundsReport bounds_report(const std::vector<CylinderFunction>& fs, const CylinderMeasure& mu);
FamilyVerification verify_family(const BasisFamily& fam);

struct BowenRow {
  int depth = 0;
  double k1 = 0.0;
  double k2 = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

std::vector<BowenRow> bowen_ratio_check(const Potential& log_j, const std::vector<int>& depths);

struct NamedCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Inverse-branch and mirror change of variables for a binary Gibbs measure.
std::vector<NamedCheck> change_of_variables_check(const Potential& log_j, const CylinderFunction& f);

// Largest sup-norm least-squares residual of a depth-`target_depth` cylinder indicator against the
// algebra generated by the family inside the depth-`space_depth` function space.
double sigma_algebra_probe(const std::vector<CylinderFunction>& family, int target_depth, int space_depth);

}  // namespace gibbs
