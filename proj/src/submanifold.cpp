#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gibbs/geodesics.hpp"

namespace gibbs {

namespace {

int measure_depth(int base, const CylinderFunction& f) { return std::max(base, f.depth()); }

double integrate_at(const Potential& a, const CylinderFunction& f, int depth) {
  return integrate(f, gibbs_measure(a, measure_depth(depth, f)));
}

}  // namespace

SubmanifoldChart::SubmanifoldChart(Potential base, std::vector<CylinderFunction> basis, double bound, int depth)
    : base_(std::move(base)), basis_(std::move(basis)), bound_(bound), depth_(depth) {
  if (!base_.is_normalized()) throw ChartError("chart base must be normalized");
  if (basis_.empty()) throw ChartError("chart basis is empty");
  if (!(bound_ > 0.0)) throw ChartError("chart bound must be positive");
  int k = depth_;
  for (const auto& e : basis_) {
    if (e.alphabet() != base_.alphabet()) throw ChartError("basis alphabet mismatch");
    if (apply_ruelle(base_, e).sup_norm() > 1e-8) throw ChartError("basis element is not in the kernel");
    k = std::max(k, e.depth());
  }
  depth_ = k;
  CylinderMeasure mu = gibbs_measure(base_, depth_);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      double g = integrate(basis_[i] * basis_[j], mu);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-8) throw ChartError("chart basis is not orthonormal");
    }
}

bool SubmanifoldChart::inside(const Eigen::VectorXd& t) const {
  if (t.size() != dimension()) throw std::invalid_argument("chart coordinate dimension mismatch");
  return t.cwiseAbs().maxCoeff() < bound_;
}

CylinderFunction SubmanifoldChart::raw_point(const Eigen::VectorXd& t) const {
  if (t.size() != dimension()) throw std::invalid_argument("chart coordinate dimension mismatch");
  CylinderFunction b = base_.function();
  for (int i = 0; i < dimension(); ++i) b += basis_[static_cast<std::size_t>(i)] * t[i];
  return b;
}

Potential SubmanifoldChart::point(const Eigen::VectorXd& t) const { return normalize(Potential::raw(raw_point(t))); }

std::vector<CylinderFunction> SubmanifoldChart::tangent_fields(const Eigen::VectorXd& t, double step) const {
  std::vector<CylinderFunction> out;
  for (int i = 0; i < dimension(); ++i) {
    Eigen::VectorXd tp = t, tm = t;
    tp[i] += step;
    tm[i] -= step;
    out.push_back((point(tp).function() - point(tm).function()) * (0.5 / step));
  }
  return out;
}

Eigen::MatrixXd SubmanifoldChart::metric(const Eigen::VectorXd& t) const {
  std::vector<CylinderFunction> x = tangent_fields(t);
  int k = depth_;
  for (const auto& f : x) k = std::max(k, f.depth());
  CylinderMeasure mu = gibbs_measure(point(t), k);
  int n = dimension();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m(i, j) = integrate(x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)], mu);
      m(j, i) = m(i, j);
    }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw ChartError("chart metric is not positive definite");
  return m;
}

std::vector<Eigen::MatrixXd> SubmanifoldChart::christoffel(const Eigen::VectorXd& t, double step) const {
  int n = dimension();
  Eigen::MatrixXd g = metric(t);
  std::vector<Eigen::MatrixXd> dg;
  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd tp = t, tm = t;
    tp[l] += step;
    tm[l] -= step;
    dg.push_back((metric(tp) - metric(tm)) / (2.0 * step));
  }
  Eigen::MatrixXd ginv = g.llt().solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                               dg[static_cast<std::size_t>(l)](i, j));
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * acc;
      }
  return gamma;
}

SubmanifoldChart markov_chart(double r, double s, double bound) {
  Potential a = jacobian_potential(StochasticMatrix::from_rs(r, s));
  CylinderMeasure mu = gibbs_measure(a, 2);
  std::vector<CylinderFunction> raw = {
      kernel_project_binary(a, CylinderFunction::indicator(Word(2, {0, 0}))).value().refine(2),
      kernel_project_binary(a, CylinderFunction::indicator(Word(2, {0, 1}))).value().refine(2)};
  std::vector<CylinderFunction> basis;
  for (auto f : raw) {
    for (const auto& e : basis) f -= e * integrate(f * e, mu);
    double n = std::sqrt(integrate(f * f, mu));
    if (!(n > 1e-12)) throw ChartError("degenerate markov chart basis");
    basis.push_back(f * (1.0 / n));
  }
  return SubmanifoldChart(a, std::move(basis), bound, 2);
}

std::array<double, 2> markov_coordinates(const Potential& a) {
  if (a.alphabet() != 2 || a.depth() > 2) throw std::invalid_argument("markov coordinates need a binary depth <= 2 potential");
  CylinderFunction f = a.function().refine(2);
  return {std::exp(f[0]), std::exp(f[3])};
}

namespace {

using Vec = Eigen::VectorXd;

struct Rates {
  Vec dt, dv;
};

Rates geodesic_rhs(const SubmanifoldChart& chart, const Vec& t, const Vec& v) {
  std::vector<Eigen::MatrixXd> gamma = chart.christoffel(t);
  Vec a(v.size());
  for (int k = 0; k < v.size(); ++k) a[k] = -v.dot(gamma[static_cast<std::size_t>(k)] * v);
  return {v, a};
}

// Returns false when a stage leaves the chart.
bool rk4(const SubmanifoldChart& chart, Vec& t, Vec& v, double h) {
  Rates k1 = geodesic_rhs(chart, t, v);
  Vec t2 = t + h / 2 * k1.dt, v2 = v + h / 2 * k1.dv;
  if (!chart.inside(t2)) return false;
  Rates k2 = geodesic_rhs(chart, t2, v2);
  Vec t3 = t + h / 2 * k2.dt, v3 = v + h / 2 * k2.dv;
  if (!chart.inside(t3)) return false;
  Rates k3 = geodesic_rhs(chart, t3, v3);
  Vec t4 = t + h * k3.dt, v4 = v + h * k3.dv;
  if (!chart.inside(t4)) return false;
  Rates k4 = geodesic_rhs(chart, t4, v4);
  t = t + h / 6 * (k1.dt + 2 * k2.dt + 2 * k3.dt + k4.dt);
  v = v + h / 6 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
  return true;
}

double quadratic(const Eigen::MatrixXd& m, const Vec& v) { return v.dot(m * v); }

SubmanifoldPath run_submanifold(const SubmanifoldChart& chart, const Vec& t0, const Vec& v0, double t_max, double h,
                                const SubmanifoldOptions& opts, bool& drifted) {
  SubmanifoldPath path;
  path.step = h;
  double e0 = quadratic(chart.metric(t0), v0);
  double scale = e0 > 0.0 ? e0 : 1.0;
  path.times.push_back(0.0);
  path.coords.push_back(t0);
  path.velocities.push_back(v0);
  path.energy.push_back(e0);
  Vec t = t0, v = v0;
  double time = 0.0;
  long steps = 0;
  drifted = false;
  while (time < t_max) {
    double hh = std::min(h, t_max - time);
    if (t_max - time - hh < 1e-14 * std::max(1.0, t_max)) hh = t_max - time;
    Vec tn = t, vn = v;
    if (!rk4(chart, tn, vn, hh) || !chart.inside(tn)) {
      path.reason = StopReason::chart_exit;
      break;
    }
    t = tn;
    v = vn;
    time = (hh >= t_max - time) ? t_max : time + hh;
    ++steps;
    double e = quadratic(chart.metric(t), v);
    path.energy_drift = std::max(path.energy_drift, std::abs(e - e0) / scale);
    if (path.energy_drift > opts.drift_limit) {
      drifted = true;
      return path;
    }
    if (steps % opts.sample_every == 0 || time >= t_max) {
      path.times.push_back(time);
      path.coords.push_back(t);
      path.velocities.push_back(v);
      path.energy.push_back(e);
    }
  }
  if (path.times.back() != time) {
    path.times.push_back(time);
    path.coords.push_back(t);
    path.velocities.push_back(v);
    path.energy.push_back(quadratic(chart.metric(t), v));
  }
  return path;
}

}  // namespace

SubmanifoldPath integrate_submanifold_geodesic(const SubmanifoldChart& chart, const Eigen::VectorXd& t0,
                                               const Eigen::VectorXd& v0, double t_max, double h,
                                               const SubmanifoldOptions& opts) {
  if (!(h > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("step and t_max must be positive");
  if (opts.sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  if (v0.size() != chart.dimension()) throw std::invalid_argument("velocity dimension mismatch");
  if (!chart.inside(t0)) throw ChartError("initial point outside the chart");
  Vec v = v0;
  if (opts.unit_speed) {
    double e = quadratic(chart.metric(t0), v);
    if (e > 0.0) v /= std::sqrt(e);
  }
  for (int refinement = 0;; ++refinement) {
    bool drifted = false;
    SubmanifoldPath path = run_submanifold(chart, t0, v, t_max, h, opts, drifted);
    path.refinements = refinement;
    if (!drifted) return path;
    if (refinement >= opts.max_refinements) throw NumericalError("energy drift exceeded the limit");
    h /= 2;
  }
}

ShootResult shoot(const SubmanifoldChart& chart, const Eigen::VectorXd& ta, const Eigen::VectorXd& tb, double t_final,
                  const ShootOptions& opts) {
  if (ta.size() != chart.dimension() || tb.size() != chart.dimension())
    throw std::invalid_argument("shooting endpoint dimension mismatch");
  if (!(t_final > 0.0) || opts.steps < 1) throw std::invalid_argument("shooting needs a positive time and steps");
  SubmanifoldOptions so;
  so.unit_speed = false;
  so.drift_limit = std::numeric_limits<double>::infinity();
  double h = t_final / opts.steps;
  int n = chart.dimension();
  auto residual = [&](const Vec& v, bool& ok) -> Vec {
    SubmanifoldPath p = integrate_submanifold_geodesic(chart, ta, v, t_final, h, so);
    ok = p.reason == StopReason::completed;
    return p.coords.back() - tb;
  };
  ShootResult res;
  res.velocity = (tb - ta) / t_final;
  bool ok = false;
  Vec f = residual(res.velocity, ok);
  if (!ok) throw NumericalError("initial shooting guess leaves the chart");
  res.residual = f.cwiseAbs().maxCoeff();
  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    if (res.residual <= opts.tol) {
      res.converged = true;
      return res;
    }
    Eigen::MatrixXd jac(n, n);
    for (int i = 0; i < n; ++i) {
      Vec vp = res.velocity, vm = res.velocity;
      vp[i] += opts.fd_step;
      vm[i] -= opts.fd_step;
      bool okp = false, okm = false;
      Vec fp = residual(vp, okp), fm = residual(vm, okm);
      if (!okp || !okm) throw NumericalError("shooting jacobian stencil leaves the chart");
      jac.col(i) = (fp - fm) / (2 * opts.fd_step);
    }
    Vec delta = jac.fullPivLu().solve(-f);
    double damping = 1.0;
    bool improved = false;
    for (int k = 0; k < 20; ++k, damping /= 2) {
      Vec trial = res.velocity + damping * delta;
      bool okt = false;
      Vec ft = residual(trial, okt);
      double rt = ft.cwiseAbs().maxCoeff();
      if (okt && rt < res.residual) {
        res.velocity = trial;
        f = ft;
        res.residual = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  res.converged = res.residual <= opts.tol;
  return res;
}

namespace {

Potential curve_point(const SubmanifoldChart& chart, const CylinderFunction& xi, double t) {
  return normalize(Potential::raw(chart.base().function() + xi * t));
}

CylinderFunction curve_velocity(const SubmanifoldChart& chart, const CylinderFunction& xi, double t) {
  const double d = 1e-5;
  return (curve_point(chart, xi, t + d).function() - curve_point(chart, xi, t - d).function()) * (0.5 / d);
}

template <class YFn>
CheckPair leibniz(const SubmanifoldChart& chart, const CylinderFunction& xi, double t, double step, YFn y_at) {
  int k = chart.depth();
  auto mean = [&](double u) {
    Potential a = curve_point(chart, xi, u);
    return integrate_at(a, y_at(u), k);
  };
  double lhs = (mean(t + step) - mean(t - step)) / (2 * step);
  Potential a = curve_point(chart, xi, t);
  CylinderFunction y = y_at(t);
  CylinderFunction dy = (y_at(t + step) - y_at(t - step)) * (0.5 / step);
  CylinderFunction x = curve_velocity(chart, xi, t);
  double rhs = integrate_at(a, dy, k) + integrate_at(a, y * x, k);
  return {lhs, rhs};
}

}  // namespace

CheckPair leibniz_check(const SubmanifoldChart& chart, const CylinderFunction& xi, const CylinderFunction& g,
                        double t, double step) {
  return leibniz(chart, xi, t, step,
                 [&](double u) { return kernel_project(curve_point(chart, xi, u), g).value(); });
}

CheckPair leibniz_check_velocity(const SubmanifoldChart& chart, const CylinderFunction& xi, double t,
                                 double step) {
  return leibniz(chart, xi, t, step, [&](double u) { return curve_velocity(chart, xi, u); });
}

double dpi_probe(const SubmanifoldChart& chart, const Eigen::VectorXd& t) {
  std::vector<CylinderFunction> x = chart.tangent_fields(t);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, sup_distance(x[i], chart.basis()[i]));
  return worst;
}

}  // namespace gibbs
