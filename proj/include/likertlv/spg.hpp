#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace likertlv {

/// Objective for spg_minimize: returns f(x) and writes the gradient, or
/// std::nullopt when x is outside the domain (e.g. a singular covariance).
using SpgObjective = std::function<std::optional<double>(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
using SpgProjection = std::function<void(Eigen::VectorXd& x)>;

struct SpgOptions {
  int max_iterations = 10000;
  /// Stop when the projected gradient step ||P(x - g) - x||_inf falls below this.
  double tolerance = 1e-10;
  double min_step = 1e-10;
  double max_step = 1e10;
  double armijo = 1e-4;
  /// Called with every accepted iterate and its objective value, starting with x0.
  std::function<void(const Eigen::VectorXd&, double)> on_iterate;
};

struct SpgResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double projected_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Monotone spectral projected gradient: Barzilai-Borwein trial steps along the
/// projected direction, backtracked until the Armijo condition holds, so the
/// objective never increases between accepted iterates.
SpgResult spg_minimize(const SpgObjective& objective, const SpgProjection& project,
                       Eigen::VectorXd x0, const SpgOptions& options = {});

/// Projection of a stacked (sigma, tau) vector onto the product of unit disks.
void project_loadings(Eigen::VectorXd& stacked);

}  // namespace likertlv
