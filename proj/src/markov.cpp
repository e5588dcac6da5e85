#include "gibbs/markov.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace gibbs {

StochasticMatrix::StochasticMatrix(std::vector<std::vector<double>> rows) {
  d_ = static_cast<int>(rows.size());
  if (d_ < 2) throw std::invalid_argument("stochastic matrix needs at least 2 states");
  p_.reserve(static_cast<std::size_t>(d_ * d_));
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != d_) throw std::invalid_argument("stochastic matrix must be square");
    double sum = 0.0;
    for (double x : row) {
      if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("stochastic matrix entries must lie in (0,1)");
      sum += x;
      p_.push_back(x);
    }
    if (std::abs(sum - 1.0) > 1e-14) throw std::invalid_argument("stochastic matrix rows must sum to 1");
  }
}

StochasticMatrix StochasticMatrix::from_rs(double r, double s) {
  return StochasticMatrix({{r, 1.0 - r}, {1.0 - s, s}});
}

StochasticMatrix StochasticMatrix::bernoulli(const std::vector<double>& p) {
  return StochasticMatrix(std::vector<std::vector<double>>(p.size(), p));
}

std::vector<std::vector<double>> StochasticMatrix::rows() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) out[static_cast<std::size_t>(i)].push_back((*this)(i, j));
  return out;
}

double StochasticMatrix::r() const {
  if (d_ != 2) throw std::invalid_argument("(r,s) coordinates need d = 2");
  return (*this)(0, 0);
}

double StochasticMatrix::s() const {
  if (d_ != 2) throw std::invalid_argument("(r,s) coordinates need d = 2");
  return (*this)(1, 1);
}

std::vector<double> stationary_vector(const StochasticMatrix& p) {
  int d = p.size();
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  a.row(d - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  b(d - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericalError("singular stationary system");
  Eigen::VectorXd pi = lu.solve(b);
  std::vector<double> out(pi.data(), pi.data() + d);
  for (double x : out)
    if (!(x > 0.0)) throw NumericalError("non-positive stationary vector");
  return out;
}

Potential jacobian_potential(const StochasticMatrix& p) {
  int d = p.size();
  auto pi = stationary_vector(p);
  std::vector<double> v(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double jac = pi[static_cast<std::size_t>(i)] * p(i, j) / pi[static_cast<std::size_t>(j)];
      if (d == 2 && std::abs(jac - p(j, i)) > 1e-13)
        throw NumericalError("binary Jacobian differs from the transposed matrix entry");
      v[static_cast<std::size_t>(i * d + j)] = std::log(jac);
    }
  return Potential::normalized(CylinderFunction(d, 2, std::move(v)), 1e-13);
}

CylinderMeasure cylinder_measure(const StochasticMatrix& p, int n) {
  if (n < 1) throw std::invalid_argument("cylinder_measure needs depth >= 1");
  int d = p.size();
  cylinder_count(d, n);
  auto pi = stationary_vector(p);
  std::vector<double> w(pi);
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(w.size() * static_cast<std::size_t>(d));
    for (std::size_t x = 0; x < w.size(); ++x) {
      int last = static_cast<int>(x % static_cast<std::size_t>(d));
      for (int a = 0; a < d; ++a) next[x * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] = w[x] * p(last, a);
    }
    w = std::move(next);
  }
  return CylinderMeasure::normalized(d, n, std::move(w));
}

double markov_entropy(const StochasticMatrix& p) {
  auto pi = stationary_vector(p);
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j) h -= pi[static_cast<std::size_t>(i)] * p(i, j) * std::log(p(i, j));
  return h;
}

double markov_kl(const StochasticMatrix& p0, const StochasticMatrix& p1) {
  if (p0.size() != p1.size()) throw std::invalid_argument("matrices of different size");
  CylinderFunction diff = jacobian_potential(p0).function() - jacobian_potential(p1).function();
  return integrate(diff, cylinder_measure(p0, 2));
}

MarkovGibbs markov_gibbs(const StochasticMatrix& p) {
  return MarkovGibbs{p, stationary_vector(p), jacobian_potential(p)};
}

StochasticMatrix matrix_from_jacobian(const Potential& log_j) {
  if (!log_j.is_normalized()) throw std::invalid_argument("matrix_from_jacobian needs a normalized potential");
  if (log_j.depth() > 2) throw std::invalid_argument("potential deeper than 2 is not Markov");
  int d = log_j.alphabet();
  CylinderFunction j = exp(log_j.function().refine(2));
  std::vector<double> pi = gibbs_measure(log_j, 1).weights();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i) {
    double sum = 0.0;
    for (int k = 0; k < d; ++k) {
      double v = j[static_cast<std::size_t>(i * d + k)] * pi[static_cast<std::size_t>(k)] / pi[static_cast<std::size_t>(i)];
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v;
      sum += v;
    }
    for (auto& v : rows[static_cast<std::size_t>(i)]) v /= sum;
  }
  return StochasticMatrix(std::move(rows));
}

}  // namespace gibbs
