#include "gibbs/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs {

namespace {

void require_pair(const Potential& a, const Potential& b) {
  if (!a.is_normalized() || !b.is_normalized()) throw std::invalid_argument("family endpoints must be normalized");
  if (a.alphabet() != b.alphabet()) throw std::invalid_argument("alphabet mismatch");
}

int working_depth(int depth, std::initializer_list<const Potential*> ps) {
  int k = depth;
  for (const Potential* p : ps) k = std::max(k, p->depth());
  return k;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

Regime regime_of(double derivative) {
  double s = sign_of(derivative);
  if (s > 0) return Regime::second_law;
  if (s < 0) return Regime::fluctuation;
  return Regime::neutral;
}

}  // namespace

JFamily::JFamily(Potential j0, Potential j2) : j0_(std::move(j0)), j2_(std::move(j2)) { require_pair(j0_, j2_); }

Potential JFamily::at(double lambda) const {
  CylinderFunction mix = lambda * exp(j2_.function()) + (1.0 - lambda) * exp(j0_.function());
  if (!(mix.min_value() > 0.0)) throw std::domain_error("Jacobian mixture is not positive");
  return Potential::normalized(log(mix));
}

LogJFamily::LogJFamily(Potential j0, Potential j2) : j0_(std::move(j0)), j2_(std::move(j2)) {
  require_pair(j0_, j2_);
}

Potential LogJFamily::at(double lambda) const {
  return normalize(Potential::raw(lambda * j2_.function() + (1.0 - lambda) * j0_.function()));
}

double kl(const GibbsData& from, const GibbsData& to) {
  const CylinderFunction& a = from.normalized.function();
  const CylinderFunction& b = to.normalized.function();
  if (std::max(a.depth(), b.depth()) > from.measure.depth())
    throw std::invalid_argument("working depth below potential depth");
  return integrate(a - b, from.measure);
}

double kl(const Potential& from, const Potential& to, int depth) {
  require_pair(from, to);
  int k = working_depth(depth, {&from, &to});
  return integrate(from.function() - to.function(), gibbs_measure(from, k));
}

double derivative_at(const JFamily& family, Problem problem, int endpoint, const Potential& target, int depth) {
  if (endpoint != 0 && endpoint != 1) throw std::invalid_argument("endpoint must be 0 or 1");
  const Potential& p0 = family.j0();
  const Potential& p2 = family.j2();
  int k = working_depth(depth, {&p0, &p2, &target});
  CylinderFunction j0 = exp(p0.function());
  CylinderFunction j2 = exp(p2.function());
  if (problem == Problem::first) {
    CylinderMeasure mu1 = gibbs_measure(target, k);
    if (endpoint == 0) return integrate(1.0 - j2 * j0.map([](double x) { return 1.0 / x; }), mu1);
    return integrate(j0 * j2.map([](double x) { return 1.0 / x; }) - 1.0, mu1);
  }
  CylinderFunction dj = j2 - j0;
  if (endpoint == 0) {
    CylinderMeasure mu0 = gibbs_measure(p0, k);
    return integrate((p0.function() - target.function()) * dj * j0.map([](double x) { return 1.0 / x; }), mu0);
  }
  CylinderMeasure mu2 = gibbs_measure(p2, k);
  return integrate((p2.function() - target.function()) * dj * j2.map([](double x) { return 1.0 / x; }), mu2);
}

double derivative_at(const LogJFamily& family, Problem problem, int endpoint, const Potential& target, int depth) {
  if (endpoint == 1) throw UnsupportedDerivative("no closed form for the log-Jacobian family at lambda = 1");
  if (endpoint != 0) throw std::invalid_argument("endpoint must be 0 or 1");
  const Potential& p0 = family.j0();
  const Potential& p2 = family.j2();
  int k = working_depth(depth, {&p0, &p2, &target});
  CylinderFunction xi = p2.function() - p0.function();
  CylinderMeasure mu0 = gibbs_measure(p0, k);
  if (problem == Problem::first) {
    CylinderMeasure mu1 = gibbs_measure(target, k);
    return -integrate(xi, mu1) + integrate(xi, mu0);
  }
  return integrate((p0.function() - target.function()) * xi, mu0);
}

double richardson_central(const std::function<double(double)>& f, double x, double h1, double h2) {
  double d1 = (f(x + h1) - f(x - h1)) / (2.0 * h1);
  double d2 = (f(x + h2) - f(x - h2)) / (2.0 * h2);
  return (h1 * h1 * d2 - h2 * h2 * d1) / (h1 * h1 - h2 * h2);
}

namespace {

template <class Family>
double oracle_impl(const Family& family, Problem problem, int endpoint, const Potential& target,
                   const OracleOptions& opts) {
  if (endpoint != 0 && endpoint != 1) throw std::invalid_argument("endpoint must be 0 or 1");
  int k = working_depth(opts.depth, {&family.j0(), &family.j2(), &target});
  auto f = [&](double lambda) {
    Potential p = family.at(lambda);
    return problem == Problem::first ? kl(target, p, k) : kl(p, target, k);
  };
  return richardson_central(f, static_cast<double>(endpoint), opts.h1, opts.h2);
}

}  // namespace

double derivative_oracle(const JFamily& family, Problem problem, int endpoint, const Potential& target,
                         const OracleOptions& opts) {
  return oracle_impl(family, problem, endpoint, target, opts);
}

double derivative_oracle(const LogJFamily& family, Problem problem, int endpoint, const Potential& target,
                         const OracleOptions& opts) {
  return oracle_impl(family, problem, endpoint, target, opts);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::second_law: return "second-law";
    case Regime::fluctuation: return "fluctuation";
    default: return "neutral";
  }
}

double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-3);
}

DivergenceReport defects(const Potential& j0, const Potential& j1, const Potential& j2, int depth,
                         const OracleOptions& oracle) {
  require_pair(j0, j1);
  require_pair(j0, j2);
  int k = working_depth(depth, {&j0, &j1, &j2});
  const Potential* ps[3] = {&j0, &j1, &j2};
  CylinderMeasure mu[3];
  for (int i = 0; i < 3; ++i) mu[i] = gibbs_measure(*ps[i], k);

  DivergenceReport rep;
  rep.depth = k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rep.kl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          i == j ? 0.0 : integrate(ps[i]->function() - ps[j]->function(), mu[i]);
  const auto& d = rep.kl;

  CylinderFunction l01 = j0.function() - j1.function();
  CylinderFunction l02 = j0.function() - j2.function();
  rep.pythagorean_type1 = integrate(l01, mu[2]) - integrate(l01, mu[0]);
  rep.pythagorean_type1_from_kl = d[2][1] - d[2][0] - d[0][1];
  rep.pythagorean_type2 = integrate(l02, mu[1]) - integrate(l02, mu[0]);
  rep.pythagorean_type2_from_kl = d[1][2] - d[1][0] - d[0][2];
  rep.triangle_type1 = d[2][0] + d[0][1] - d[2][1];
  rep.triangle_type2 = d[1][0] + d[0][2] - d[1][2];

  OracleOptions o = oracle;
  o.depth = k;
  JFamily jf(j0, j2);
  LogJFamily lf(j0, j2);
  auto add = [&](const std::string& name, double cf, double orc) {
    rep.derivatives.push_back({name, cf, orc, relative_error(cf, orc)});
  };
  add("first_j_at_0", derivative_at(jf, Problem::first, 0, j1, k), derivative_oracle(jf, Problem::first, 0, j1, o));
  add("first_j_at_1", derivative_at(jf, Problem::first, 1, j1, k), derivative_oracle(jf, Problem::first, 1, j1, o));
  add("second_j_at_0", derivative_at(jf, Problem::second, 0, j1, k),
      derivative_oracle(jf, Problem::second, 0, j1, o));
  add("second_j_at_1", derivative_at(jf, Problem::second, 1, j1, k),
      derivative_oracle(jf, Problem::second, 1, j1, o));
  add("first_logj_at_0", derivative_at(lf, Problem::first, 0, j1, k),
      derivative_oracle(lf, Problem::first, 0, j1, o));
  add("second_logj_at_0", derivative_at(lf, Problem::second, 0, j1, k),
      derivative_oracle(lf, Problem::second, 0, j1, o));

  rep.regime = regime_of(rep.derivatives[2].closed_form);
  rep.oracle_regime = regime_of(rep.derivatives[2].oracle);
  return rep;
}

double bernoulli_three_way(double p0, double p1, double p2) {
  return (p0 - p2) * (std::log(1.0 - p0) - std::log(p0) - std::log(1.0 - p1) + std::log(p1));
}

double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol, double* argmax) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a, hi = b;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  double xm = 0.5 * (lo + hi);
  double best_x = xm, best = f(xm);
  double fa = f(a), fb = f(b);
  if (fa >= best) {
    best = fa;
    best_x = a;
  }
  if (fb > best) {
    best = fb;
    best_x = b;
  }
  if (argmax) *argmax = best_x;
  return best;
}

Bregman bregman(const Potential& j0, const Potential& j2, int depth) {
  require_pair(j0, j2);
  int k = working_depth(depth, {&j0, &j2});
  CylinderFunction xi = j2.function() - j0.function();
  CylinderFunction l0 = j0.function();
  Bregman out;
  out.pressure = [xi, l0](double lambda) { return gibbs::pressure(Potential::raw(lambda * xi + l0)); };
  out.slope_at_zero = integrate(xi, gibbs_measure(j0, k));
  out.slope_at_one = integrate(xi, gibbs_measure(j2, k));
  out.slope_at_zero_fd = richardson_central(out.pressure, 0.0, 1e-3, 1e-4);
  out.divergence = -out.slope_at_zero;
  auto p1 = out.pressure;
  out.legendre = [p1](double eta) {
    return golden_section_max([&](double lambda) { return lambda * eta - p1(lambda); }, 0.0, 1.0, 1e-10);
  };
  return out;
}

}  // namespace gibbs
