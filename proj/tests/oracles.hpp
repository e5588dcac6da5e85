#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "gibbs/markov.hpp"
#include "gibbs/symbolic.hpp"
#include "gibbs/transfer.hpp"

namespace oracle {

using gibbs::CylinderFunction;
using gibbs::Word;

inline Word pad(const Word& w, int len) {
  std::vector<int> s = w.symbols();
  s.resize(static_cast<std::size_t>(std::max(len, w.length())), 0);
  return Word(w.alphabet(), s);
}

// (L_B f)(x) by summing over preimages, x of length k.
inline std::vector<double> ruelle(const CylinderFunction& b, const CylinderFunction& f, int k) {
  int d = b.alphabet();
  int need = std::max(b.depth(), f.depth());
  std::vector<double> out;
  for (const Word& x : gibbs::all_words(d, k)) {
    double acc = 0.0;
    for (int a = 0; a < d; ++a) {
      Word y = pad(x.prepend(a), need);
      acc += std::exp(b.evaluate(y)) * f.evaluate(y);
    }
    out.push_back(acc);
  }
  return out;
}

// Transfer matrix on words of length q >= 1: M(x, y) = e^{B(y)} when sigma y = x.
struct Dense {
  int q;
  Eigen::MatrixXd m;
};

inline Dense transfer_matrix(const CylinderFunction& b) {
  int d = b.alphabet();
  int q = std::max(b.depth() - 1, 1);
  auto words = gibbs::all_words(d, q);
  std::size_t n = words.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t xi = 0; xi < n; ++xi)
    for (int a = 0; a < d; ++a) {
      Word ax = words[xi].prepend(a);
      Word y = ax.prefix(q);
      m(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(gibbs::index(y))) +=
          std::exp(b.evaluate(pad(ax, b.depth())));
    }
  return {q, m};
}

inline double leading_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  double best = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

inline double pressure(const CylinderFunction& b) { return std::log(leading_eigenvalue(transfer_matrix(b).m)); }

// Two-state chain: pi = ((1 - s), (1 - r)) / (2 - r - s).
inline std::array<double, 2> stationary(double r, double s) {
  double z = 2.0 - r - s;
  return {(1.0 - s) / z, (1.0 - r) / z};
}

inline double cylinder_mass(const gibbs::StochasticMatrix& p, const std::vector<double>& pi, const Word& w) {
  double m = pi[static_cast<std::size_t>(w[0])];
  for (int i = 1; i < w.length(); ++i) m *= p(w[i - 1], w[i]);
  return m;
}

inline Eigen::Matrix2d mat2(const gibbs::StochasticMatrix& p) {
  Eigen::Matrix2d m;
  m << p(0, 0), p(0, 1), p(1, 0), p(1, 1);
  return m;
}

inline Eigen::Vector2d stationary(const Eigen::Matrix2d& p) {
  double z = 2.0 - p(0, 0) - p(1, 1);
  return {(1.0 - p(1, 1)) / z, (1.0 - p(0, 0)) / z};
}

// Entropy-rate KL of stationary Markov chains: sum pi_i P_ij log(P_ij / Q_ij).
inline double markov_kl(const Eigen::Matrix2d& p, const Eigen::Matrix2d& q) {
  Eigen::Vector2d pi = stationary(p);
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += pi[i] * p(i, j) * std::log(p(i, j) / q(i, j));
  return s;
}

// Binary depth-2 Jacobian values J(i j) (index 2 i + j) to the chain with P_ji = J(i j).
inline Eigen::Matrix2d matrix_of_jacobian(const std::array<double, 4>& j) {
  Eigen::Matrix2d p;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) p(k, i) = j[static_cast<std::size_t>(2 * i + k)];
  return p;
}

inline std::array<double, 4> jacobian_of_matrix(const Eigen::Matrix2d& p) {
  std::array<double, 4> j{};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) j[static_cast<std::size_t>(2 * i + k)] = p(k, i);
  return j;
}

// Normalization of a depth-2 binary potential B(x1 x2) through the 2x2 eigenproblem.
inline Eigen::Matrix2d normalized_chain(const std::array<double, 4>& b) {
  Eigen::Matrix2d q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) q(j, i) = std::exp(b[static_cast<std::size_t>(2 * i + j)]);
  Eigen::EigenSolver<Eigen::Matrix2d> es(q);
  Eigen::Index k = es.eigenvalues()[0].real() > es.eigenvalues()[1].real() ? 0 : 1;
  double lambda = es.eigenvalues()[k].real();
  Eigen::Vector2d h = es.eigenvectors().col(k).real();
  if (h[0] < 0) h = -h;
  std::array<double, 4> jac{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      jac[static_cast<std::size_t>(2 * i + j)] =
          std::exp(b[static_cast<std::size_t>(2 * i + j)]) * h[i] / (h[j] * lambda);
  return matrix_of_jacobian(jac);
}

// D(mu_lambda | mu_1) or D(mu_1 | mu_lambda) along either family, all through 2x2 chains.
enum class Family { j, log_j };

inline Eigen::Matrix2d family_point(Family fam, const Eigen::Matrix2d& p0, const Eigen::Matrix2d& p2, double l) {
  auto j0 = jacobian_of_matrix(p0), j2 = jacobian_of_matrix(p2);
  std::array<double, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (fam == Family::j) v[i] = l * j2[i] + (1.0 - l) * j0[i];
    else v[i] = l * std::log(j2[i]) + (1.0 - l) * std::log(j0[i]);
  }
  return fam == Family::j ? matrix_of_jacobian(v) : normalized_chain(v);
}

inline double fd_kl_derivative(Family fam, bool second_slot, const Eigen::Matrix2d& p0, const Eigen::Matrix2d& p1,
                               const Eigen::Matrix2d& p2, double at, double h1 = 1e-3, double h2 = 1e-4) {
  auto f = [&](double l) {
    Eigen::Matrix2d pl = family_point(fam, p0, p2, l);
    return second_slot ? markov_kl(pl, p1) : markov_kl(p1, pl);
  };
  auto central = [&](double h) { return (f(at + h) - f(at - h)) / (2 * h); };
  double d1 = central(h1), d2 = central(h2);
  return (h1 * h1 * d2 - h2 * h2 * d1) / (h1 * h1 - h2 * h2);
}

inline gibbs::StochasticMatrix random_chain(std::mt19937_64& rng, double lo = 0.1, double hi = 0.9) {
  std::uniform_real_distribution<double> u(lo, hi);
  return gibbs::StochasticMatrix::from_rs(u(rng), u(rng));
}

inline CylinderFunction random_function(std::mt19937_64& rng, int depth, double scale = 1.0, int d = 2) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(gibbs::cylinder_count(d, depth));
  for (auto& x : v) x = u(rng);
  return CylinderFunction(d, depth, v);
}

}  // namespace oracle
