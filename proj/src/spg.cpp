#include "likertlv/spg.hpp"

#include <algorithm>
#include <cmath>

namespace likertlv {

SpgResult spg_minimize(const SpgObjective& objective, const SpgProjection& project,
                       Eigen::VectorXd x0, const SpgOptions& options) {
  SpgResult result;
  project(x0);
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(x.size());
  const std::optional<double> f0 = objective(x, g);
  result.x = x;
  if (!f0) return result;
  double f = *f0;
  if (options.on_iterate) options.on_iterate(x, f);

  auto projected_step = [&](const Eigen::VectorXd& point, const Eigen::VectorXd& grad, double step) {
    Eigen::VectorXd trial = point - step * grad;
    project(trial);
    return Eigen::VectorXd(trial - point);
  };

  double pg = projected_step(x, g, 1.0).lpNorm<Eigen::Infinity>();
  double step = std::clamp(pg > 0.0 ? 1.0 / pg : options.max_step, options.min_step, options.max_step);
  Eigen::VectorXd g_new(x.size());

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (pg <= options.tolerance) {
      result.converged = true;
      break;
    }
    const Eigen::VectorXd d = projected_step(x, g, step);
    const double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // No descent along the BB direction; fall back to a unit-scaled step.
      step = 1.0;
      continue;
    }

    double lambda = 1.0;
    Eigen::VectorXd x_new;
    std::optional<double> f_new;
    for (;;) {
      x_new = x + lambda * d;
      f_new = objective(x_new, g_new);
      if (f_new && std::isfinite(*f_new) && *f_new <= f + options.armijo * lambda * slope) break;
      if (f_new && std::isfinite(*f_new)) {
        // Safeguarded quadratic interpolation of the backtrack.
        const double denom = 2.0 * (*f_new - f - lambda * slope);
        const double trial = denom > 0.0 ? -slope * lambda * lambda / denom : 0.5 * lambda;
        lambda = std::clamp(trial, 0.1 * lambda, 0.5 * lambda);
      } else {
        lambda *= 0.25;
      }
      if (lambda < 1e-16) break;
    }
    if (lambda < 1e-16) {
      // Line search exhausted: at numerical resolution of a stationary point.
      result.converged = pg <= 1e3 * options.tolerance;
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, options.min_step, options.max_step)
                    : options.max_step;
    x = x_new;
    f = *f_new;
    g = g_new;
    if (options.on_iterate) options.on_iterate(x, f);
    pg = projected_step(x, g, 1.0).lpNorm<Eigen::Infinity>();
  }
  if (iter >= options.max_iterations) result.converged = pg <= options.tolerance;

  result.x = x;
  result.value = f;
  result.projected_gradient = pg;
  result.iterations = iter;
  return result;
}

void project_loadings(Eigen::VectorXd& stacked) {
  const Eigen::Index items = stacked.size() / 2;
  for (Eigen::Index j = 0; j < items; ++j) {
    const double r = std::hypot(stacked[j], stacked[items + j]);
    if (r > 1.0) {
      stacked[j] /= r;
      stacked[items + j] /= r;
    }
  }
}

}  // namespace likertlv
