#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "gibbs/markov.hpp"
#include "gibbs/transfer.hpp"

namespace gibbs {

inline constexpr double kDomainMargin = 1e-6;

class ChartError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct ChristoffelPair {
  double g111 = 0.0;
  double g222 = 0.0;
};

// Closed-form coefficients of the (r, s) geodesic system.
ChristoffelPair christoffel(double r, double s);

// Asymptotic-variance metric of the binary Markov surface in (r, s).
struct MarkovMetric {
  double grr = 0.0;
  double grs = 0.0;
  double gss = 0.0;
};
MarkovMetric markov_metric(double r, double s);

// gamma[k][i][j] of the Levi-Civita connection of markov_metric; index 0 = r, 1 = s.
using Christoffel2 = std::array<std::array<std::array<double, 2>, 2>, 2>;
Christoffel2 markov_levi_civita(double r, double s);

// Metric and connection from finite differences of the normalized potentials log J(r, s).
MarkovMetric numerical_markov_metric(double r, double s, double step = 1e-5);
Christoffel2 numerical_markov_christoffel(double r, double s, double step = 1e-4);

struct GeodesicState {
  double r = 0.5;
  double s = 0.5;
  double dr = 0.0;
  double ds = 0.0;
};

// (dr, ds) along angle theta, scaled to unit length in markov_metric when unit is set.
GeodesicState markov_initial_state(double r, double s, double theta, bool unit = true);

enum class StopReason { completed, domain_exit, chart_exit };
std::string to_string(StopReason r);

struct GeodesicPath {
  std::vector<double> times;
  std::vector<GeodesicState> states;
  std::vector<double> energy;
  StopReason reason = StopReason::completed;
  double max_error_estimate = 0.0;
  double final_step = 0.0;
  int halvings = 0;
};

enum class MarkovModel { closed_form, levi_civita };

struct MarkovIntegrationOptions {
  double tol = 1e-8;
  double h_min = 1e-7;
  int sample_every = 1;
  MarkovModel model = MarkovModel::closed_form;
};

// Classical RK4 on (r, s, dr, ds) with a step-doubling error estimate.
GeodesicPath integrate_markov_geodesic(const GeodesicState& s0, double t_max, double h,
                                       const MarkovIntegrationOptions& opts = {});

class SubmanifoldChart {
 public:
  // Throws ChartError unless the basis is an orthonormal kernel family at the base.
  SubmanifoldChart(Potential base, std::vector<CylinderFunction> basis, double bound, int depth);

  int dimension() const { return static_cast<int>(basis_.size()); }
  double bound() const { return bound_; }
  int depth() const { return depth_; }
  const Potential& base() const { return base_; }
  const std::vector<CylinderFunction>& basis() const { return basis_; }

  bool inside(const Eigen::VectorXd& t) const;
  CylinderFunction raw_point(const Eigen::VectorXd& t) const;
  Potential point(const Eigen::VectorXd& t) const;
  // X_i = D Pi (e_i) by central differences.
  std::vector<CylinderFunction> tangent_fields(const Eigen::VectorXd& t, double step = 1e-5) const;
  Eigen::MatrixXd metric(const Eigen::VectorXd& t) const;
  // gamma[k](i, j)
  std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& t, double step = 1e-4) const;

 private:
  Potential base_;
  std::vector<CylinderFunction> basis_;
  double bound_;
  int depth_;
};

// Chart over the binary Markov surface at (r, s): orthonormalized kernel images of 1_[00] and 1_[01].
SubmanifoldChart markov_chart(double r, double s, double bound = 0.5);
// (r, s) = (J(0,0), J(1,1)) of a depth <= 2 normalized binary potential.
std::array<double, 2> markov_coordinates(const Potential& a);

struct SubmanifoldPath {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> coords;
  std::vector<Eigen::VectorXd> velocities;
  std::vector<double> energy;
  StopReason reason = StopReason::completed;
  double step = 0.0;
  int refinements = 0;
  double energy_drift = 0.0;
};

struct SubmanifoldOptions {
  bool unit_speed = true;
  int sample_every = 1;
  double drift_limit = 1e-4;
  int max_refinements = 3;
};

SubmanifoldPath integrate_submanifold_geodesic(const SubmanifoldChart& chart, const Eigen::VectorXd& t0,
                                               const Eigen::VectorXd& v0, double t_max, double h,
                                               const SubmanifoldOptions& opts = {});

struct ShootOptions {
  int max_iter = 50;
  double tol = 1e-6;
  double fd_step = 1e-6;
  int steps = 50;
};

struct ShootResult {
  Eigen::VectorXd velocity;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

ShootResult shoot(const SubmanifoldChart& chart, const Eigen::VectorXd& ta, const Eigen::VectorXd& tb, double t_final,
                  const ShootOptions& opts = {});

// Curve Pi(A0 + t xi) and tangent field Y(t) = D Pi at gamma(t) applied to g.
// lhs: d/dt int Y dmu; rhs: int Y' dmu + int Y X dmu.
CheckPair leibniz_check(const SubmanifoldChart& chart, const CylinderFunction& xi, const CylinderFunction& g,
                        double t, double step = 1e-4);
// Same with Y(t) = X(t) = gamma'(t).
CheckPair leibniz_check_velocity(const SubmanifoldChart& chart, const CylinderFunction& xi, double t,
                                 double step = 1e-4);

// max_i sup |D Pi (e_i) - e_i| at the chart point t.
double dpi_probe(const SubmanifoldChart& chart, const Eigen::VectorXd& t);

}  // namespace gibbs
