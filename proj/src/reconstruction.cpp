#include "likertlv/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "likertlv/errors.hpp"
#include "likertlv/polychoric.hpp"
#include "likertlv/spg.hpp"

namespace likertlv {

namespace {

std::string coordinate_name(int column, int items) {
  return "(item " + std::to_string(column % items + 1) + ", time " + std::to_string(column / items + 1) + ")";
}

Eigen::VectorXd stack(const ModelParams& p) {
  Eigen::VectorXd x(2 * p.items());
  x << p.sigma, p.tau;
  return x;
}

ModelParams unstack(const Eigen::VectorXd& x) {
  const Eigen::Index items = x.size() / 2;
  return ModelParams{x.head(items), x.tail(items)};
}

}  // namespace

void ReconstructedCorrelation::validate() const {
  const Eigen::Index dim = static_cast<Eigen::Index>(items) * times;
  if (items < 2 || times < 1 || matrix.rows() != dim || matrix.cols() != dim)
    throw InputError("reconstructed correlation: size does not match items x times");
  if (!matrix.allFinite()) throw InputError("reconstructed correlation: non-finite entries");
  if (!matrix.isApprox(matrix.transpose(), 1e-12))
    throw InputError("reconstructed correlation: matrix is not symmetric");
}

ReconstructedCorrelation reconstruct(const LikertDataset& data, const CutPointSet& pooled_cuts) {
  data.validate();
  pooled_cuts.validate();
  if (pooled_cuts.items() != data.items || pooled_cuts.num_categories != data.num_categories)
    throw InputError("reconstruct: cut points do not match the dataset");

  const int items = data.items;
  const int dim = items * data.times;
  ReconstructedCorrelation recon{Eigen::MatrixXd::Identity(dim, dim), items, data.times};
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      const PairTable table = PairTable::from_columns(data, a, b);
      try {
        const PolychoricFit fit = fit_pair(table, pooled_cuts.row(a % items), pooled_cuts.row(b % items));
        recon.matrix(a, b) = recon.matrix(b, a) = fit.rho;
      } catch (const EstimationError& e) {
        throw EstimationError(std::string(e.what()) + " for pair " + coordinate_name(a, items) + " and " +
                              coordinate_name(b, items));
      }
    }
  }
  return recon;
}

ReconstructedCorrelation reconstruct(const LikertDataset& data, const CutPointEstimate& cuts) {
  return reconstruct(data, cuts.pooled);
}

double frobenius_objective(const Eigen::MatrixXd& target, const ModelParams& params, int times) {
  return (target - build_covariance(params, times)).squaredNorm();
}

LoadingGradient frobenius_gradient(const Eigen::MatrixXd& target, const ModelParams& params, int times) {
  // d/dtheta ||T - S||^2 = sum_ab -2 (T - S)_ab dS_ab/dtheta
  const Eigen::MatrixXd weights = 2.0 * (build_covariance(params, times) - target);
  return covariance_gradient(weights, params, times);
}

std::vector<ModelParams> frobenius_starts(const ReconstructedCorrelation& recon) {
  const int items = recon.items;
  const auto constant = [items](double v) { return Eigen::VectorXd::Constant(items, v); };

  // sigma_j^2 is the diagonal of every cross-time block.
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(items);
  if (recon.times >= 2) {
    int blocks = 0;
    for (int s = 0; s < recon.times; ++s) {
      for (int t = s + 1; t < recon.times; ++t) {
        sigma += recon.between(s, t).diagonal();
        ++blocks;
      }
    }
    sigma = (sigma / blocks).cwiseMax(0.0).cwiseMin(1.0).cwiseSqrt();
  }
  Eigen::VectorXd alternating(items);
  for (int j = 0; j < items; ++j) alternating[j] = (j % 2 == 0) ? 0.3 : -0.3;

  std::vector<ModelParams> starts = {
      {constant(0.5), constant(0.5)},
      {sigma, constant(0.0)},
      {sigma, constant(0.3)},
      {sigma, alternating},
      {constant(0.0), constant(0.0)},
  };
  for (ModelParams& p : starts) project_to_disk(p);
  return starts;
}

FitResult fit_frobenius(const ReconstructedCorrelation& recon, const FrobeniusOptions& options) {
  recon.validate();
  const int times = recon.times;
  const Eigen::MatrixXd& target = recon.matrix;

  const SpgObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> std::optional<double> {
    const ModelParams p = unstack(x);
    const Eigen::MatrixXd residual = build_covariance(p, times) - target;
    const LoadingGradient g = covariance_gradient(2.0 * residual, p, times);
    grad << g.sigma, g.tau;
    return residual.squaredNorm();
  };
  SpgOptions spg;
  spg.max_iterations = options.max_iterations;
  spg.tolerance = options.tolerance;
  spg.on_iterate = options.on_iterate;

  FitResult best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const ModelParams& start : frobenius_starts(recon)) {
    const SpgResult r = spg_minimize(objective, project_loadings, stack(start), spg);
    if (r.value < best_value) {
      best_value = r.value;
      best.params = unstack(r.x);
      best.iterations = r.iterations;
      best.converged = r.converged;
    }
  }
  project_to_disk(best.params);
  best.params = canonicalize(best.params);
  best.objective = std::sqrt(std::max(best_value, 0.0));
  best.gamma_sq = best.params.gamma_sq();
  return best;
}

}  // namespace likertlv
