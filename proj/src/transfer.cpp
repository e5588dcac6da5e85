#include "gibbs/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gibbs {

namespace {

std::size_t pow_d(int d, int k) { return cylinder_count(d, k); }

// out[x] = sum_a e[a x] f[prefix_q(a x)], x of depth q, e of depth q + 1.
std::vector<double> forward_step(const std::vector<double>& e, const std::vector<double>& f, int d,
                                 std::size_t nq) {
  std::vector<double> out(nq, 0.0);
  for (int a = 0; a < d; ++a) {
    std::size_t base = static_cast<std::size_t>(a) * nq;
    for (std::size_t x = 0; x < nq; ++x) {
      std::size_t ax = base + x;
      out[x] += e[ax] * f[ax / static_cast<std::size_t>(d)];
    }
  }
  return out;
}

// nu'[prefix_q(a x)] += e[a x] nu[x]
std::vector<double> adjoint_step(const std::vector<double>& e, const std::vector<double>& nu, int d,
                                 std::size_t nq) {
  std::vector<double> out(nq, 0.0);
  for (int a = 0; a < d; ++a) {
    std::size_t base = static_cast<std::size_t>(a) * nq;
    for (std::size_t x = 0; x < nq; ++x) {
      std::size_t ax = base + x;
      out[ax / static_cast<std::size_t>(d)] += e[ax] * nu[x];
    }
  }
  return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Power iteration to tol, then continued while the update still shrinks so that the
// fixed point is resolved to rounding level.
template <class Step, class Normalize>
std::vector<double> power_iterate(std::vector<double> v, Step step, Normalize normalize,
                                  const EigenOptions& opts, int& iterations, const char* what) {
  double prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  int tail = 0;
  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<double> w = step(v);
    normalize(w);
    for (double x : w)
      if (!(x > 0.0)) throw NumericalError(std::string("non-positive iterate in ") + what);
    double diff = sup_diff(w, v);
    v = std::move(w);
    ++iterations;
    if (diff <= opts.tol) converged = true;
    if (converged) {
      if (diff == 0.0) break;
      if (diff >= prev && ++stall >= 3) break;
      if (++tail >= 64) break;
    }
    prev = diff;
  }
  if (!converged) throw NumericalError(std::string("power iteration did not converge for ") + what);
  return v;
}

}  // namespace

Potential Potential::raw(CylinderFunction b) { return Potential(std::move(b), PotentialRole::raw); }

Potential Potential::normalized(CylinderFunction a, double tol) {
  double r = normalization_residual(a);
  if (!(r <= tol))
    throw std::invalid_argument("potential is not normalized (residual " + std::to_string(r) + ")");
  return Potential(std::move(a), PotentialRole::normalized);
}

CylinderFunction apply_ruelle(const CylinderFunction& b, const CylinderFunction& f) {
  if (b.alphabet() != f.alphabet()) throw std::invalid_argument("alphabet mismatch");
  int d = b.alphabet();
  int s = std::max({b.depth() - 1, f.depth() - 1, 0});
  CylinderFunction e = exp(b.refine(s + 1));
  CylinderFunction g = f.refine(s + 1);
  std::size_t ns = pow_d(d, s);
  std::vector<double> out(ns, 0.0);
  for (int a = 0; a < d; ++a) {
    std::size_t base = static_cast<std::size_t>(a) * ns;
    for (std::size_t x = 0; x < ns; ++x) out[x] += e[base + x] * g[base + x];
  }
  return CylinderFunction(d, s, std::move(out));
}

CylinderFunction apply_ruelle(const Potential& b, const CylinderFunction& f) {
  return apply_ruelle(b.function(), f);
}

CylinderFunction apply_ruelle_power(const Potential& b, const CylinderFunction& f, int n) {
  CylinderFunction g = f;
  for (int i = 0; i < n; ++i) g = apply_ruelle(b, g);
  return g;
}

double normalization_residual(const CylinderFunction& b) {
  CylinderFunction one = CylinderFunction::constant(b.alphabet(), 1.0);
  return (apply_ruelle(b, one) - 1.0).sup_norm();
}

GibbsData leading_eigendata(const Potential& b, int depth, const EigenOptions& opts) {
  const CylinderFunction& bf = b.function();
  int d = bf.alphabet();
  int p = bf.depth();
  int q = std::max(p - 1, 0);
  if (depth < 0) throw std::invalid_argument("negative working depth");
  int k = std::max(depth, q);
  cylinder_count(d, k);
  std::size_t nq = pow_d(d, q);
  std::vector<double> e = exp(bf.refine(q + 1)).values();

  GibbsData out;
  out.potential = b;
  out.depth = depth;

  int it_h = 0, it_nu = 0;
  auto sup_normalize = [](std::vector<double>& w) {
    double m = *std::max_element(w.begin(), w.end());
    for (auto& x : w) x /= m;
  };
  auto sum_normalize = [](std::vector<double>& w) {
    double s = 0.0;
    for (double x : w) s += x;
    for (auto& x : w) x /= s;
  };
  std::vector<double> h = power_iterate(
      std::vector<double>(nq, 1.0), [&](const std::vector<double>& v) { return forward_step(e, v, d, nq); },
      sup_normalize, opts, it_h, "eigenfunction");
  std::vector<double> nu = power_iterate(
      std::vector<double>(nq, 1.0 / static_cast<double>(nq)),
      [&](const std::vector<double>& v) { return adjoint_step(e, v, d, nq); }, sum_normalize, opts, it_nu,
      "eigenmeasure");

  std::vector<double> lh = forward_step(e, h, d, nq);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    num += nu[i] * lh[i];
    den += nu[i] * h[i];
  }
  double lambda = num / den;
  double res = 0.0;
  for (std::size_t i = 0; i < nq; ++i) res = std::max(res, std::abs(lh[i] - lambda * h[i]));

  // h normalized so that int h dnu = 1
  for (auto& x : h) x /= den;

  // Exact extension nu[a x] = e^{B(a x)} nu[x] / lambda for |x| >= p - 1.
  std::vector<double> nuk = nu;
  for (int j = q; j < k; ++j) {
    std::size_t nj = pow_d(d, j);
    std::size_t shift = pow_d(d, j + 1 - std::max(p, 0));
    std::vector<double> next(nj * static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      std::size_t base = static_cast<std::size_t>(a) * nj;
      for (std::size_t x = 0; x < nj; ++x) {
        std::size_t ax = base + x;
        next[ax] = std::exp(bf[ax / shift]) * nuk[x] / lambda;
      }
    }
    nuk = std::move(next);
  }
  CylinderFunction hf(d, q, h);
  CylinderFunction hk = hf.refine(k);
  std::vector<double> mu(nuk.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = hk[i] * nuk[i];

  CylinderMeasure nu_m = CylinderMeasure::normalized(d, k, nuk);
  CylinderMeasure mu_m = CylinderMeasure::normalized(d, k, mu);

  out.eigenvalue = lambda;
  out.pressure = std::log(lambda);
  out.eigenfunction = hf;
  out.eigenmeasure = nu_m.marginal(depth);
  out.measure = mu_m.marginal(depth);
  out.iterations = it_h + it_nu;
  out.residual = res;

  CylinderFunction logh = log(hf);
  CylinderFunction a = bf + logh - logh.compose_shift() - out.pressure;
  out.normalized = Potential::normalized(std::move(a));
  return out;
}

Potential normalize(const Potential& b, const EigenOptions& opts) {
  if (b.is_normalized()) return b;
  return leading_eigendata(b, 0, opts).normalized;
}

double pressure(const Potential& b, const EigenOptions& opts) { return leading_eigendata(b, 0, opts).pressure; }

CylinderMeasure gibbs_measure(const Potential& b, int depth, const EigenOptions& opts) {
  return leading_eigendata(b, depth, opts).measure;
}

double entropy(const Potential& a) {
  if (!a.is_normalized()) throw std::invalid_argument("entropy requires a normalized potential");
  CylinderMeasure mu = gibbs_measure(a, a.depth());
  return -integrate(a.function(), mu);
}

TangentVector::TangentVector(Potential base, CylinderFunction x, double tol)
    : base_(std::move(base)), x_(std::move(x)) {
  if (!base_.is_normalized()) throw std::invalid_argument("tangent vectors need a normalized base");
  double r = apply_ruelle(base_, x_).sup_norm();
  if (!(r <= tol)) throw std::invalid_argument("function is not in the kernel (residual " + std::to_string(r) + ")");
}

TangentVector kernel_project(const Potential& a, const CylinderFunction& f, KernelRule rule) {
  if (!a.is_normalized()) throw std::invalid_argument("kernel_project requires a normalized potential");
  CylinderFunction lf = apply_ruelle(a, f);
  if (rule == KernelRule::shift) return TangentVector(a, f - lf.compose_shift());

  int kd = std::max(f.depth(), a.depth());
  double c = integrate(f, gibbs_measure(a, kd));
  CylinderFunction w = lf - c;
  int s = w.depth();
  CylinderFunction u = w;
  const int max_iter = 100000;
  int it = 0;
  for (; it < max_iter; ++it) {
    w = apply_ruelle(a, w).refine(s);
    u += w;
    double osc = w.max_value() - w.min_value();
    if (osc <= 1e-17 * std::max(1.0, u.sup_norm())) break;
  }
  if (it == max_iter) throw NumericalError("kernel projection series did not converge");
  CylinderFunction x = f - c + u - u.compose_shift();
  return TangentVector(a, std::move(x));
}

TangentVector kernel_project_binary(const Potential& a, const CylinderFunction& phi) {
  if (a.alphabet() != 2 || phi.alphabet() != 2) throw std::invalid_argument("binary kernel projection requires d = 2");
  if (!a.is_normalized()) throw std::invalid_argument("kernel projection requires a normalized potential");
  int k = std::max({a.depth(), phi.depth(), 1});
  CylinderFunction j = exp(a.function().refine(k));
  CylinderFunction p = phi.refine(k);
  std::size_t half = p.size() / 2;
  std::vector<double> jp(p.size(), 0.0);
  for (std::size_t i = 0; i < half; ++i) jp[i] = j[i] * p[i];
  CylinderFunction moved = mirror_apply(CylinderFunction(2, k, std::move(jp)));
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < half; ++i) {
    v[i] = p[i];
    v[i + half] = -moved[i + half] / j[i + half];
  }
  return TangentVector(a, CylinderFunction(2, k, std::move(v)));
}

namespace {

void require_base(const Potential& a, const TangentVector& x) {
  if (sup_distance(a.function(), x.base().function()) > 1e-12)
    throw std::invalid_argument("tangent vector base mismatch");
}

}  // namespace

double metric_inner(const Potential& a, const TangentVector& x, const TangentVector& y) {
  require_base(a, x);
  require_base(a, y);
  int k = std::max({x.value().depth(), y.value().depth(), a.depth()});
  return integrate(x.value() * y.value(), gibbs_measure(a, k));
}

double fisher_information(const Potential& a, const TangentVector& xi) { return metric_inner(a, xi, xi); }

VarianceResult asymptotic_variance(const Potential& a, const CylinderFunction& f, int n_terms, double mean_tol) {
  if (!a.is_normalized()) throw std::invalid_argument("asymptotic_variance requires a normalized potential");
  if (n_terms < 0) throw std::invalid_argument("negative number of terms");
  int k = std::max(f.depth(), a.depth());
  CylinderMeasure mu = gibbs_measure(a, k);
  double mean = integrate(f, mu);
  if (std::abs(mean) > mean_tol) throw std::invalid_argument("asymptotic_variance requires a zero-mean function");
  VarianceResult out;
  CylinderFunction g = f;
  out.correlations.push_back(integrate(f * f, mu));
  out.value = out.correlations[0];
  for (int n = 1; n <= n_terms; ++n) {
    g = apply_ruelle(a, g);
    double c = integrate(g * f, mu);
    out.correlations.push_back(c);
    out.value += 2.0 * c;
  }
  if (n_terms >= 2) {
    double cn = std::abs(out.correlations.back());
    double cp = std::abs(out.correlations[out.correlations.size() - 2]);
    double ratio = cp > 0.0 ? cn / cp : 0.0;
    out.tail_estimate = ratio < 1.0 ? 2.0 * cn * ratio / (1.0 - ratio) : 2.0 * cn;
  } else if (n_terms == 1) {
    out.tail_estimate = 2.0 * std::abs(out.correlations.back());
  }
  return out;
}

CheckPair pressure_derivative_check(const Potential& j0, const CylinderFunction& xi, double h_step) {
  double pp = pressure(Potential::raw(j0.function() + h_step * xi));
  double pm = pressure(Potential::raw(j0.function() - h_step * xi));
  CheckPair out;
  out.lhs = (pp - pm) / (2.0 * h_step);
  int k = std::max(xi.depth(), j0.depth());
  out.rhs = integrate(xi, gibbs_measure(j0, k));
  return out;
}

CheckPair duality_check(const Potential& a, const CylinderFunction& f, const CylinderFunction& g) {
  if (!a.is_normalized()) throw std::invalid_argument("duality holds for normalized potentials");
  CylinderFunction lf = apply_ruelle(a, f);
  CylinderFunction gs = g.compose_shift();
  int k = std::max({lf.depth(), g.depth(), f.depth(), gs.depth(), a.depth()});
  CylinderMeasure mu = gibbs_measure(a, k);
  return {integrate(lf * g, mu), integrate(f * gs, mu)};
}

}  // namespace gibbs
