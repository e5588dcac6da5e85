#include <algorithm>
#include <cmath>

#include "gibbs/divergence.hpp"

namespace gibbs {

namespace {

void validate(const SimplexProblem& prob) {
  if (prob.vertices.size() < 2) throw std::invalid_argument("simplex needs at least two vertices");
  for (const auto& v : prob.vertices)
    if (!v.is_normalized()) throw std::invalid_argument("simplex vertices must be normalized");
  if (!prob.target.is_normalized()) throw std::invalid_argument("simplex target must be normalized");
  for (std::size_t i = 0; i < prob.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < prob.vertices.size(); ++j)
      if (sup_distance(prob.vertices[i].function(), prob.vertices[j].function()) <= 1e-12)
        throw std::invalid_argument("simplex vertices must be distinct");
}

double directional(const SimplexProblem& prob, const Potential& point, const Potential& vertex,
                   DerivativeSource source) {
  OracleOptions o;
  o.depth = prob.depth;
  if (prob.family == FamilyKind::j) {
    JFamily f(point, vertex);
    return source == DerivativeSource::closed_form ? derivative_at(f, prob.slot, 0, prob.target, prob.depth)
                                                   : derivative_oracle(f, prob.slot, 0, prob.target, o);
  }
  LogJFamily f(point, vertex);
  return source == DerivativeSource::closed_form ? derivative_at(f, prob.slot, 0, prob.target, prob.depth)
                                                 : derivative_oracle(f, prob.slot, 0, prob.target, o);
}

std::vector<double> all_directional(const SimplexProblem& prob, const Potential& point, DerivativeSource source) {
  std::vector<double> g;
  for (const auto& v : prob.vertices) g.push_back(directional(prob, point, v, source));
  return g;
}

bool certified(const std::vector<double>& g, Mode mode, double tol) {
  for (double x : g) {
    if (mode == Mode::min && x < -tol) return false;
    if (mode == Mode::max && x > tol) return false;
  }
  return true;
}

struct Run {
  std::vector<double> w;
  double value;
  int iterations;
};

Run run_from(const SimplexProblem& prob, std::vector<double> w, const SimplexOptions& opts) {
  const std::size_t n = w.size();
  double sign = prob.mode == Mode::min ? 1.0 : -1.0;
  Potential point = simplex_point(prob, w);
  double value = simplex_objective(prob, point);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    std::vector<double> g = all_directional(prob, point, opts.source);
    if (certified(g, prob.mode, opts.certificate_tol)) break;
    // pairwise step: mass moves from the worst supported vertex to the best vertex
    std::size_t r = 0, s = n;
    for (std::size_t i = 1; i < n; ++i)
      if (sign * g[i] < sign * g[r]) r = i;
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] > 0.0 && i != r && (s == n || sign * g[i] > sign * g[s])) s = i;
    if (s == n) break;
    double cap = w[s];
    auto moved = [&](double t) {
      std::vector<double> x = w;
      x[r] += t;
      x[s] -= t;
      if (x[s] < 0.0) x[s] = 0.0;
      return x;
    };
    double t_best = 0.0;
    double best = golden_section_max(
        [&](double t) { return -sign * simplex_objective(prob, simplex_point(prob, moved(t))); }, 0.0, cap,
        opts.line_tol * std::max(1.0, cap), &t_best);
    if (t_best == cap) {
      std::vector<double> x = w;
      x[r] += x[s];
      x[s] = 0.0;
      w = x;
    } else {
      w = moved(t_best);
    }
    double next = -sign * best;
    if (!(sign * (value - next) > 1e-15 * (1.0 + std::abs(value)))) {
      point = simplex_point(prob, w);
      value = simplex_objective(prob, point);
      break;
    }
    point = simplex_point(prob, w);
    value = simplex_objective(prob, point);
  }
  return {w, value, it};
}

}  // namespace

Potential simplex_point(const SimplexProblem& prob, const std::vector<double>& weights) {
  if (weights.size() != prob.vertices.size()) throw std::invalid_argument("weight count mismatch");
  if (prob.family == FamilyKind::j) {
    CylinderFunction mix = CylinderFunction::constant(prob.vertices[0].alphabet(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] != 0.0) mix += weights[i] * exp(prob.vertices[i].function());
    return Potential::normalized(log(mix));
  }
  CylinderFunction sum = CylinderFunction::constant(prob.vertices[0].alphabet(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) sum += weights[i] * prob.vertices[i].function();
  return normalize(Potential::raw(sum));
}

double simplex_objective(const SimplexProblem& prob, const Potential& point) {
  return prob.slot == Problem::first ? kl(prob.target, point, prob.depth) : kl(point, prob.target, prob.depth);
}

SimplexResult project_simplex(const SimplexProblem& prob, const SimplexOptions& opts) {
  validate(prob);
  const std::size_t n = prob.vertices.size();
  std::vector<std::vector<double>> starts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(n, 0.0);
    w[i] = 1.0;
    starts.push_back(w);
  }
  starts.emplace_back(n, 1.0 / static_cast<double>(n));

  double sign = prob.mode == Mode::min ? 1.0 : -1.0;
  int best_start = -1;
  Run best{};
  int total = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Run r = run_from(prob, starts[i], opts);
    total += r.iterations;
    if (best_start < 0 || sign * r.value < sign * best.value - 1e-12) {
      best = r;
      best_start = static_cast<int>(i);
    }
  }

  SimplexResult out;
  out.weights = best.w;
  out.optimum = simplex_point(prob, best.w);
  out.value = best.value;
  out.start = best_start;
  out.iterations = total;
  out.directional = all_directional(prob, out.optimum, DerivativeSource::closed_form);
  out.directional_fd = all_directional(prob, out.optimum, DerivativeSource::finite_difference);
  out.certificate = certified(out.directional, prob.mode, opts.certificate_tol);
  out.certificate_fd = certified(out.directional_fd, prob.mode, opts.certificate_tol);
  out.on_boundary = std::any_of(best.w.begin(), best.w.end(), [](double x) { return x <= 1e-12; });
  if (prob.mode == Mode::max && !out.on_boundary) {
    out.certificate = false;
    out.certificate_fd = false;
  }
  return out;
}

}  // namespace gibbs
