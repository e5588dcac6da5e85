#include "gibbs/haar.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gibbs {

namespace {

void require_binary(int d) {
  if (d != 2) throw std::invalid_argument("Haar constructions require d = 2");
}

double markov_mass(const StochasticMatrix& p, const std::vector<double>& pi, const Word& x) {
  double m = pi[static_cast<std::size_t>(x[0])];
  for (int i = 1; i < x.length(); ++i) m *= p(x[i - 1], x[i]);
  return m;
}

// f normalized in L2(mu), mu at depth >= depth(f).
CylinderFunction l2_normalized(const CylinderFunction& f, const CylinderMeasure& mu) {
  double n2 = integrate(f * f, mu);
  if (!(n2 > 0.0)) throw NumericalError("basis element has zero L2 norm");
  return f * (1.0 / std::sqrt(n2));
}

const std::map<std::string, BasisKind>& kind_names() {
  static const std::map<std::string, BasisKind> names = {
      {"markov-e", BasisKind::markov_e},         {"markov-a", BasisKind::markov_a},
      {"markov-b", BasisKind::markov_b},         {"markov-gamma", BasisKind::markov_gamma},
      {"gibbs-e", BasisKind::gibbs_e},           {"gibbs-rho", BasisKind::gibbs_rho},
      {"kernel-frak-a", BasisKind::kernel_frak_a}, {"kernel-rho-hat", BasisKind::kernel_rho_hat},
      {"maxent-alpha", BasisKind::maxent_alpha}, {"maxent-beta", BasisKind::maxent_beta},
  };
  return names;
}

}  // namespace

std::string to_string(BasisKind k) {
  for (const auto& [name, kind] : kind_names())
    if (kind == k) return name;
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& s) {
  auto it = kind_names().find(s);
  if (it == kind_names().end()) throw std::invalid_argument("unknown basis kind: " + s);
  return it->second;
}

bool is_kernel_kind(BasisKind k) {
  switch (k) {
    case BasisKind::markov_a:
    case BasisKind::markov_b:
    case BasisKind::markov_gamma:
    case BasisKind::kernel_frak_a:
    case BasisKind::kernel_rho_hat:
    case BasisKind::maxent_beta:
      return true;
    default:
      return false;
  }
}

CylinderFunction markov_haar_e(const StochasticMatrix& p, const Word& x) {
  require_binary(p.size());
  if (x.length() < 1) throw std::invalid_argument("markov_haar_e needs |x| >= 1");
  auto pi = stationary_vector(p);
  int n = x.length();
  int last = x[n - 1];
  double m = markov_mass(p, pi, x);
  std::vector<double> v(cylinder_count(2, n + 1), 0.0);
  std::size_t i = index(x);
  v[2 * i] = std::sqrt(p(last, 1) / p(last, 0)) / std::sqrt(m);
  v[2 * i + 1] = -std::sqrt(p(last, 0) / p(last, 1)) / std::sqrt(m);
  return CylinderFunction(2, n + 1, std::move(v));
}

CylinderFunction markov_kernel_a(const StochasticMatrix& p, const Word& x) {
  require_binary(p.size());
  if (x.length() < 1) throw std::invalid_argument("markov_kernel_a needs |x| >= 1");
  auto pi = stationary_vector(p);
  int x1 = x[0];
  double c0 = std::sqrt(pi[static_cast<std::size_t>(x1)]) / (std::sqrt(pi[0]) * std::sqrt(p(0, x1)));
  double c1 = std::sqrt(pi[static_cast<std::size_t>(x1)]) / (std::sqrt(pi[1]) * std::sqrt(p(1, x1)));
  return c0 * markov_haar_e(p, x.prepend(0)) - c1 * markov_haar_e(p, x.prepend(1));
}

CylinderFunction markov_kernel_b(const StochasticMatrix& p, const Word& x) {
  auto pi = stationary_vector(p);
  double m = markov_mass(p, pi, x.append(0));
  return std::sqrt(m) * markov_kernel_a(p, x);
}

CylinderFunction markov_gamma(const StochasticMatrix& p, int n) {
  require_binary(p.size());
  if (n < 1) throw std::invalid_argument("markov_gamma needs n >= 1");
  CylinderFunction g = CylinderFunction::constant(2, 0.0, n + 2);
  for (const Word& x : all_words(2, n)) g += markov_kernel_b(p, x);
  return l2_normalized(g, cylinder_measure(p, n + 2));
}

CylinderFunction gibbs_haar_e(const CylinderMeasure& mu, const Word& x) {
  require_binary(mu.alphabet());
  int n = x.length();
  if (mu.depth() < n + 1) throw std::invalid_argument("measure too shallow for gibbs_haar_e");
  CylinderMeasure m = mu.marginal(n + 1);
  std::size_t i = index(x);
  double m0 = m[2 * i], m1 = m[2 * i + 1];
  double mx = m0 + m1;
  std::vector<double> v(m.weights().size(), 0.0);
  v[2 * i] = std::sqrt(m1 / (m0 * mx));
  v[2 * i + 1] = -std::sqrt(m0 / (m1 * mx));
  return CylinderFunction(2, n + 1, std::move(v));
}

CylinderFunction gibbs_c(const CylinderMeasure& mu, const Word& x) {
  require_binary(mu.alphabet());
  int n = x.length();
  if (mu.depth() < n + 1) throw std::invalid_argument("measure too shallow for gibbs_c");
  CylinderMeasure m = mu.marginal(n + 1);
  std::size_t i = index(x);
  double m0 = m[2 * i], m1 = m[2 * i + 1];
  std::vector<double> v(m.weights().size(), 0.0);
  v[2 * i] = std::sqrt(m1 / m0);
  v[2 * i + 1] = -std::sqrt(m0 / m1);
  return CylinderFunction(2, n + 1, std::move(v));
}

CylinderFunction gibbs_rho(const CylinderMeasure& mu, int n) {
  require_binary(mu.alphabet());
  if (n < 0) throw std::invalid_argument("gibbs_rho needs n >= 0");
  CylinderMeasure m = mu.marginal(n + 1);
  std::vector<double> v(m.weights().size());
  for (std::size_t i = 0; i < v.size() / 2; ++i) {
    double m0 = m[2 * i], m1 = m[2 * i + 1];
    v[2 * i] = std::sqrt(m1 / m0);
    v[2 * i + 1] = -std::sqrt(m0 / m1);
  }
  return l2_normalized(CylinderFunction(2, n + 1, std::move(v)), m);
}

CylinderFunction kernel_frak_a(const Potential& log_j, const Word& x) {
  require_binary(log_j.alphabet());
  int k = std::max(x.length() + 2, log_j.depth());
  CylinderMeasure mu = gibbs_measure(log_j, k);
  return kernel_project_binary(log_j, gibbs_c(mu, x.prepend(0))).value();
}

CylinderFunction kernel_rho_hat(const Potential& log_j, int n) {
  require_binary(log_j.alphabet());
  if (n < 0) throw std::invalid_argument("kernel_rho_hat needs n >= 0");
  int k = std::max(n + 2, log_j.depth());
  CylinderMeasure mu = gibbs_measure(log_j, k);
  CylinderMeasure m = mu.marginal(n + 2);
  // sum over |x| = n of c_[0x] on [0]
  std::vector<double> v(m.weights().size(), 0.0);
  std::size_t half = v.size() / 2;
  for (std::size_t i = 0; i < half / 2; ++i) {
    double m0 = m[2 * i], m1 = m[2 * i + 1];
    v[2 * i] = std::sqrt(m1 / m0);
    v[2 * i + 1] = -std::sqrt(m0 / m1);
  }
  CylinderFunction hat(2, n + 2, std::move(v));
  return l2_normalized(kernel_project_binary(log_j, hat).value(), mu);
}

CylinderFunction maxent_alpha(int n) {
  if (n < 2) throw std::invalid_argument("maxent_alpha needs n >= 2");
  std::size_t count = cylinder_count(2, n);
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return CylinderFunction(2, n, std::move(v));
}

CylinderFunction maxent_beta(int n) {
  if (n < 1) throw std::invalid_argument("maxent_beta needs n >= 1");
  if (n == 1) return CylinderFunction(2, 1, {1.0, -1.0});
  std::size_t count = cylinder_count(2, n);
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    double a = (i % 2 == 0) ? 1.0 : -1.0;
    v[i] = i < count / 2 ? a : -a;
  }
  return CylinderFunction(2, n, std::move(v));
}

BasisFamily build_family(BasisKind kind, const FamilySource& src, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  BasisFamily fam;
  fam.kind = kind;
  bool markov = kind == BasisKind::markov_e || kind == BasisKind::markov_a || kind == BasisKind::markov_b ||
                kind == BasisKind::markov_gamma;
  bool maxent = kind == BasisKind::maxent_alpha || kind == BasisKind::maxent_beta;
  std::optional<StochasticMatrix> p = src.matrix;
  if (maxent) {
    fam.log_j = Potential::normalized(CylinderFunction::constant(2, -std::log(2.0)));
  } else if (src.log_j) {
    fam.log_j = *src.log_j;
    if (markov && !p) p = matrix_from_jacobian(*src.log_j);
  } else if (p) {
    fam.log_j = jacobian_potential(*p);
  } else {
    throw std::invalid_argument("basis family needs a matrix or a Jacobian");
  }
  require_binary(fam.log_j.alphabet());

  auto words = [&](int lo) {
    std::vector<Word> out;
    for (int n = lo; n <= n_max; ++n)
      for (const Word& w : all_words(2, n)) out.push_back(w);
    return out;
  };
  auto label = [](const Word& w) { return w.length() == 0 ? std::string("()") : w.str(); };

  int depth = 0;
  switch (kind) {
    case BasisKind::markov_e:
      for (const Word& w : words(1)) fam.elements.push_back({label(w), markov_haar_e(*p, w)});
      break;
    case BasisKind::markov_a:
      for (const Word& w : words(1)) fam.elements.push_back({label(w), markov_kernel_a(*p, w)});
      break;
    case BasisKind::markov_b:
      for (const Word& w : words(1)) fam.elements.push_back({label(w), markov_kernel_b(*p, w)});
      break;
    case BasisKind::markov_gamma:
      for (int n = 1; n <= n_max; ++n) fam.elements.push_back({std::to_string(n), markov_gamma(*p, n)});
      break;
    case BasisKind::gibbs_e: {
      CylinderMeasure mu = gibbs_measure(fam.log_j, n_max + 1);
      for (const Word& w : words(1)) fam.elements.push_back({label(w), gibbs_haar_e(mu, w)});
      break;
    }
    case BasisKind::gibbs_rho: {
      CylinderMeasure mu = gibbs_measure(fam.log_j, n_max + 1);
      for (int n = 1; n <= n_max; ++n) fam.elements.push_back({std::to_string(n), gibbs_rho(mu, n)});
      break;
    }
    case BasisKind::kernel_frak_a:
      for (const Word& w : words(1)) fam.elements.push_back({label(w), kernel_frak_a(fam.log_j, w)});
      break;
    case BasisKind::kernel_rho_hat:
      for (int n = 1; n <= n_max; ++n)
        fam.elements.push_back({std::to_string(n), kernel_rho_hat(fam.log_j, n)});
      break;
    case BasisKind::maxent_alpha:
      for (int n = 2; n <= std::max(2, n_max); ++n) fam.elements.push_back({std::to_string(n), maxent_alpha(n)});
      break;
    case BasisKind::maxent_beta:
      for (int n = 1; n <= n_max; ++n) fam.elements.push_back({std::to_string(n), maxent_beta(n)});
      break;
  }
  for (const auto& e : fam.elements) depth = std::max(depth, e.f.depth());
  depth = std::max(depth, fam.log_j.depth());
  fam.measure = markov && p ? cylinder_measure(*p, std::max(depth, 1)) : gibbs_measure(fam.log_j, depth);
  return fam;
}

std::vector<std::vector<double>> gram_matrix(const std::vector<CylinderFunction>& fs, const CylinderMeasure& mu) {
  std::vector<std::vector<double>> g(fs.size(), std::vector<double>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i; j < fs.size(); ++j) g[i][j] = g[j][i] = integrate(fs[i] * fs[j], mu);
  return g;
}

BoundsReport bounds_report(const std::vector<CylinderFunction>& fs, const CylinderMeasure& mu) {
  BoundsReport b;
  b.alpha_hat = std::numeric_limits<double>::infinity();
  b.beta_hat = 0.0;
  for (const auto& f : fs) {
    double sup = f.sup_norm();
    double l2 = std::sqrt(integrate(f * f, mu));
    double mn = std::numeric_limits<double>::infinity();
    for (double x : f.values()) mn = std::min(mn, std::abs(x));
    b.sup_norms.push_back(sup);
    b.l2_norms.push_back(l2);
    b.min_abs.push_back(mn);
    b.alpha_hat = std::min({b.alpha_hat, sup, l2});
    b.beta_hat = std::max({b.beta_hat, sup, l2});
  }
  if (fs.empty()) b.alpha_hat = 0.0;
  return b;
}

FamilyVerification verify_family(const BasisFamily& fam) {
  std::vector<CylinderFunction> fs;
  for (const auto& e : fam.elements) fs.push_back(e.f);
  FamilyVerification v;
  auto g = gram_matrix(fs, fam.measure);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      v.gram_deviation = std::max(v.gram_deviation, std::abs(g[i][j] - (i == j ? 1.0 : 0.0)));
      if (i != j)
        v.orthogonality_deviation =
            std::max(v.orthogonality_deviation, std::abs(g[i][j]) / std::sqrt(g[i][i] * g[j][j]));
    }
  if (is_kernel_kind(fam.kind)) {
    for (const auto& f : fs) {
      double r = apply_ruelle(fam.log_j, f).sup_norm();
      v.kernel_residuals.push_back(r);
      v.kernel_residual = std::max(v.kernel_residual, r);
    }
  }
  v.bounds = bounds_report(fs, fam.measure);
  return v;
}

std::vector<BowenRow> bowen_ratio_check(const Potential& log_j, const std::vector<int>& depths) {
  require_binary(log_j.alphabet());
  if (!log_j.is_normalized()) throw std::invalid_argument("Bowen ratios need a normalized potential");
  int p = log_j.depth();
  CylinderFunction j = exp(log_j.function());
  std::vector<BowenRow> rows;
  for (int n : depths) {
    if (n < 1) throw std::invalid_argument("Bowen depth must be >= 1");
    CylinderMeasure mu1 = gibbs_measure(log_j, n + 1);
    CylinderMeasure mu = mu1.marginal(n);
    BowenRow row;
    row.depth = n;
    row.k1 = row.ratio_min = std::numeric_limits<double>::infinity();
    row.k2 = row.ratio_max = 0.0;
    for (std::size_t i = 0; i < mu.weights().size(); ++i) {
      Word x = decode(i, 2, n);
      std::vector<int> y = x.symbols();
      y.resize(static_cast<std::size_t>(n + p), 0);
      double prod = 1.0;
      for (int s = 0; s < n; ++s)
        prod *= j.evaluate(Word(2, std::vector<int>(y.begin() + s, y.begin() + s + p)));
      double ratio = mu[i] / prod;
      row.k1 = std::min(row.k1, ratio);
      row.k2 = std::max(row.k2, ratio);
      double q = mu1[2 * i] / mu1[2 * i + 1];
      row.ratio_min = std::min(row.ratio_min, q);
      row.ratio_max = std::max(row.ratio_max, q);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<NamedCheck> change_of_variables_check(const Potential& log_j, const CylinderFunction& f) {
  require_binary(log_j.alphabet());
  if (!log_j.is_normalized()) throw std::invalid_argument("change of variables needs a normalized potential");
  int k = std::max({f.depth(), log_j.depth(), 1});
  CylinderMeasure mu = gibbs_measure(log_j, k);
  CylinderFunction j = exp(log_j.function()).refine(k);
  CylinderFunction g = f.refine(k);
  CylinderFunction on0 = g * CylinderFunction::indicator(Word(2, {0}));
  CylinderFunction on1 = g * CylinderFunction::indicator(Word(2, {1}));
  std::vector<NamedCheck> out;
  for (int a = 0; a < 2; ++a) {
    double lhs = integrate(a == 0 ? on0 : on1, mu);
    double rhs = integrate(prepend_pullback(g, a) * prepend_pullback(j, a), mu);
    out.push_back({"inverse_branch_" + std::to_string(a), lhs, rhs});
  }
  CylinderFunction moved = mirror_apply(j * on0);
  CylinderFunction inv_j = j.map([](double x) { return 1.0 / x; });
  out.push_back({"mirror", integrate(on0, mu), integrate(moved * inv_j, mu)});
  return out;
}

double sigma_algebra_probe(const std::vector<CylinderFunction>& family, int target_depth, int space_depth) {
  std::size_t n = cylinder_count(2, space_depth);
  std::vector<Eigen::VectorXd> basis;
  auto try_add = [&](Eigen::VectorXd v) {
    double norm0 = v.norm();
    if (norm0 == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    double nv = v.norm();
    if (nv <= 1e-9 * norm0) return false;
    basis.push_back(v / nv);
    return true;
  };
  auto to_vec = [&](const CylinderFunction& f) {
    if (f.depth() > space_depth) throw std::invalid_argument("family element deeper than the probe space");
    CylinderFunction g = f.refine(space_depth);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.values().data(), static_cast<Eigen::Index>(n)));
  };
  try_add(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
  for (const auto& f : family) try_add(to_vec(f));
  bool grew = true;
  while (grew && basis.size() < n) {
    grew = false;
    std::size_t m = basis.size();
    for (std::size_t i = 0; i < m && basis.size() < n; ++i)
      for (std::size_t j = i; j < m && basis.size() < n; ++j)
        if (try_add(basis[i].cwiseProduct(basis[j]))) grew = true;
  }
  double worst = 0.0;
  for (const Word& w : all_words(2, target_depth)) {
    Eigen::VectorXd v = to_vec(CylinderFunction::indicator(w));
    Eigen::VectorXd r = v;
    for (const auto& q : basis) r -= q.dot(v) * q;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace gibbs
