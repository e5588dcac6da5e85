#pragma once

#include <vector>

#include "gibbs/symbolic.hpp"
#include "gibbs/transfer.hpp"

namespace gibbs {

class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(std::vector<std::vector<double>> rows);

  // [[r, 1 - r], [1 - s, s]]
  static StochasticMatrix from_rs(double r, double s);
  // Every row equal to p.
  static StochasticMatrix bernoulli(const std::vector<double>& p);

  int size() const { return d_; }
  double operator()(int i, int j) const { return p_[static_cast<std::size_t>(i * d_ + j)]; }
  std::vector<std::vector<double>> rows() const;

  // d = 2 coordinates
  double r() const;
  double s() const;

 private:
  int d_ = 2;
  std::vector<double> p_;
};

std::vector<double> stationary_vector(const StochasticMatrix& p);

// log(pi_{x1} P_{x1 x2} / pi_{x2}) at depth 2.
Potential jacobian_potential(const StochasticMatrix& p);

CylinderMeasure cylinder_measure(const StochasticMatrix& p, int n);

double markov_entropy(const StochasticMatrix& p);
double markov_kl(const StochasticMatrix& p0, const StochasticMatrix& p1);

struct MarkovGibbs {
  StochasticMatrix matrix;
  std::vector<double> stationary;
  Potential log_jacobian;
};

MarkovGibbs markov_gibbs(const StochasticMatrix& p);

// Inverse of jacobian_potential for depth <= 2 potentials: P_{ij} = pi_i^{-1} J(i j) pi_j.
StochasticMatrix matrix_from_jacobian(const Potential& log_j);

}  // namespace gibbs
