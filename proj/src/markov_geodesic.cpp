#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gibbs/geodesics.hpp"

namespace gibbs {

namespace {

void require_interior(double r, double s) {
  if (!(r > 0.0 && r < 1.0 && s > 0.0 && s < 1.0)) throw std::domain_error("(r, s) must lie in (0, 1)^2");
}

double closed_form_g111(double r, double s) {
  double radicand = -(r - 1.0) * r * std::pow(s - 1.0, 3) / std::pow(r + s - 2.0, 3);
  if (!(radicand > 0.0)) throw NumericalError("christoffel radicand is not positive");
  return -((2.0 * r - 1.0) * (s - 1.0) / (2.0 * (-2.0 + r + s))) / std::sqrt(radicand);
}

struct Deriv {
  double dr, ds, ddr, dds;
};

Deriv rhs(const GeodesicState& y, MarkovModel model) {
  if (model == MarkovModel::closed_form) {
    ChristoffelPair c = christoffel(y.r, y.s);
    return {y.dr, y.ds, c.g111 * y.dr * y.dr, c.g222 * y.ds * y.ds};
  }
  Christoffel2 g = markov_levi_civita(y.r, y.s);
  double v[2] = {y.dr, y.ds};
  double acc[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc[k] -= g[k][i][j] * v[i] * v[j];
  return {y.dr, y.ds, acc[0], acc[1]};
}

GeodesicState axpy(const GeodesicState& y, const Deriv& k, double h) {
  return {y.r + h * k.dr, y.s + h * k.ds, y.dr + h * k.ddr, y.ds + h * k.dds};
}

bool in_domain(const GeodesicState& y) {
  return y.r >= kDomainMargin && y.r <= 1.0 - kDomainMargin && y.s >= kDomainMargin &&
         y.s <= 1.0 - kDomainMargin;
}

GeodesicState rk4_step(const GeodesicState& y, double h, MarkovModel model) {
  Deriv k1 = rhs(y, model);
  GeodesicState y2 = axpy(y, k1, h / 2);
  if (!in_domain(y2)) throw std::out_of_range("stage left domain");
  Deriv k2 = rhs(y2, model);
  GeodesicState y3 = axpy(y, k2, h / 2);
  if (!in_domain(y3)) throw std::out_of_range("stage left domain");
  Deriv k3 = rhs(y3, model);
  GeodesicState y4 = axpy(y, k3, h);
  if (!in_domain(y4)) throw std::out_of_range("stage left domain");
  Deriv k4 = rhs(y4, model);
  return {y.r + h / 6 * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr),
          y.s + h / 6 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds),
          y.dr + h / 6 * (k1.ddr + 2 * k2.ddr + 2 * k3.ddr + k4.ddr),
          y.ds + h / 6 * (k1.dds + 2 * k2.dds + 2 * k3.dds + k4.dds)};
}

double state_distance(const GeodesicState& a, const GeodesicState& b) {
  return std::max({std::abs(a.r - b.r), std::abs(a.s - b.s), std::abs(a.dr - b.dr), std::abs(a.ds - b.ds)});
}

double energy(const GeodesicState& y) {
  MarkovMetric g = markov_metric(y.r, y.s);
  return g.grr * y.dr * y.dr + 2.0 * g.grs * y.dr * y.ds + g.gss * y.ds * y.ds;
}

}  // namespace

ChristoffelPair christoffel(double r, double s) {
  require_interior(r, s);
  return {closed_form_g111(r, s), closed_form_g111(s, r)};
}

MarkovMetric markov_metric(double r, double s) {
  require_interior(r, s);
  double z = 2.0 - r - s;
  double pi0 = (1.0 - s) / z;
  double pi1 = (1.0 - r) / z;
  return {pi0 / (r * (1.0 - r)), 0.0, pi1 / (s * (1.0 - s))};
}

Christoffel2 markov_levi_civita(double r, double s) {
  MarkovMetric g = markov_metric(r, s);
  double z = 2.0 - r - s;
  double e_r = g.grr * (1.0 / z - 1.0 / r + 1.0 / (1.0 - r));
  double e_s = g.grr * (1.0 / z - 1.0 / (1.0 - s));
  double g_s = g.gss * (1.0 / z - 1.0 / s + 1.0 / (1.0 - s));
  double g_r = g.gss * (1.0 / z - 1.0 / (1.0 - r));
  Christoffel2 c{};
  c[0][0][0] = e_r / (2.0 * g.grr);
  c[0][0][1] = c[0][1][0] = e_s / (2.0 * g.grr);
  c[0][1][1] = -g_r / (2.0 * g.grr);
  c[1][1][1] = g_s / (2.0 * g.gss);
  c[1][0][1] = c[1][1][0] = g_r / (2.0 * g.gss);
  c[1][0][0] = -e_s / (2.0 * g.gss);
  return c;
}

MarkovMetric numerical_markov_metric(double r, double s, double step) {
  require_interior(r, s);
  if (r - step <= 0.0 || r + step >= 1.0 || s - step <= 0.0 || s + step >= 1.0)
    throw std::domain_error("finite-difference stencil leaves (0, 1)^2");
  auto lj = [](double a, double b) { return jacobian_potential(StochasticMatrix::from_rs(a, b)).function(); };
  CylinderFunction xr = (lj(r + step, s) - lj(r - step, s)) * (0.5 / step);
  CylinderFunction xs = (lj(r, s + step) - lj(r, s - step)) * (0.5 / step);
  CylinderMeasure mu = cylinder_measure(StochasticMatrix::from_rs(r, s), 2);
  return {integrate(xr * xr, mu), integrate(xr * xs, mu), integrate(xs * xs, mu)};
}

Christoffel2 numerical_markov_christoffel(double r, double s, double step) {
  auto mat = [](const MarkovMetric& m) {
    Eigen::Matrix2d g;
    g << m.grr, m.grs, m.grs, m.gss;
    return g;
  };
  double inner = std::min(1e-5, step / 10);
  Eigen::Matrix2d g = mat(numerical_markov_metric(r, s, inner));
  Eigen::Matrix2d dg[2] = {
      (mat(numerical_markov_metric(r + step, s, inner)) - mat(numerical_markov_metric(r - step, s, inner))) /
          (2 * step),
      (mat(numerical_markov_metric(r, s + step, inner)) - mat(numerical_markov_metric(r, s - step, inner))) /
          (2 * step)};
  Eigen::Matrix2d ginv = g.inverse();
  Christoffel2 c{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 2; ++l) acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        c[k][i][j] = 0.5 * acc;
      }
  return c;
}

GeodesicState markov_initial_state(double r, double s, double theta, bool unit) {
  GeodesicState y{r, s, std::cos(theta), std::sin(theta)};
  if (unit) {
    double n = std::sqrt(energy(y));
    y.dr /= n;
    y.ds /= n;
  }
  return y;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::domain_exit: return "domain_exit";
    case StopReason::chart_exit: return "chart_exit";
  }
  return "unknown";
}

GeodesicPath integrate_markov_geodesic(const GeodesicState& s0, double t_max, double h,
                                       const MarkovIntegrationOptions& opts) {
  if (!(h > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("step and t_max must be positive");
  if (opts.sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
  if (!in_domain(s0)) throw std::domain_error("initial point outside the domain margin");
  GeodesicPath path;
  path.times.push_back(0.0);
  path.states.push_back(s0);
  path.energy.push_back(energy(s0));
  GeodesicState y = s0;
  double t = 0.0;
  long steps = 0;
  while (t < t_max) {
    double hh = std::min(h, t_max - t);
    if (t_max - t - hh < 1e-14 * std::max(1.0, t_max)) hh = t_max - t;
    GeodesicState next;
    try {
      while (true) {
        GeodesicState full = rk4_step(y, hh, opts.model);
        GeodesicState half = rk4_step(rk4_step(y, hh / 2, opts.model), hh / 2, opts.model);
        double est = state_distance(full, half);
        if (est <= opts.tol) {
          path.max_error_estimate = std::max(path.max_error_estimate, est);
          next = full;
          break;
        }
        h = hh / 2;
        hh = h;
        ++path.halvings;
        if (h < opts.h_min) throw NumericalError("geodesic step fell below the minimum step");
      }
    } catch (const std::out_of_range&) {
      path.reason = StopReason::domain_exit;
      break;
    }
    if (!in_domain(next)) {
      path.reason = StopReason::domain_exit;
      break;
    }
    y = next;
    t = (hh >= t_max - t) ? t_max : t + hh;
    ++steps;
    if (steps % opts.sample_every == 0 || t >= t_max) {
      path.times.push_back(t);
      path.states.push_back(y);
      path.energy.push_back(energy(y));
    }
  }
  if (path.times.back() != t) {
    path.times.push_back(t);
    path.states.push_back(y);
    path.energy.push_back(energy(y));
  }
  path.final_step = h;
  return path;
}

}  // namespace gibbs
