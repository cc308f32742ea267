#pragma once

#include <functional>
#include <vector>

#include "likertlv/cutpoints.hpp"
#include "likertlv/model.hpp"

namespace likertlv {

/// JT x JT matrix of pairwise polychoric correlations, latent_index layout.
struct ReconstructedCorrelation {
  Eigen::MatrixXd matrix;
  int items = 0;
  int times = 0;

  /// Same-time block for time t (0-based), unit diagonal.
  Eigen::MatrixXd within(int t) const { return matrix.block(t * items, t * items, items, items); }
  /// Cross-time block between times s != t (0-based).
  Eigen::MatrixXd between(int s, int t) const { return matrix.block(s * items, t * items, items, items); }
  void validate() const;
};

/// Fits every pair of (item, time) coordinates with fit_pair using the pooled
/// cuts as plug-in thresholds. A failing pair is reported as
/// EstimationError naming both coordinates.
ReconstructedCorrelation reconstruct(const LikertDataset& data, const CutPointSet& pooled_cuts);
ReconstructedCorrelation reconstruct(const LikertDataset& data, const CutPointEstimate& cuts);

struct FitResult {
  ModelParams params;  // canonicalized
  double objective = 0.0;  // H = ||target - Sigma(params)||_F
  Eigen::VectorXd gamma_sq;
  bool converged = false;
  int iterations = 0;
};

/// Squared Frobenius distance ||target - Sigma(params)||_F^2.
double frobenius_objective(const Eigen::MatrixXd& target, const ModelParams& params, int times);

/// Gradient of frobenius_objective with respect to (sigma, tau).
LoadingGradient frobenius_gradient(const Eigen::MatrixXd& target, const ModelParams& params, int times);

/// Deterministic starting points for the minimum-distance fit.
std::vector<ModelParams> frobenius_starts(const ReconstructedCorrelation& recon);

struct FrobeniusOptions {
  int max_iterations = 10000;
  double tolerance = 1e-11;
  /// Observer for every accepted iterate of every start: stacked (sigma, tau) and H^2.
  std::function<void(const Eigen::VectorXd&, double)> on_iterate;
};

/// Minimum-distance estimate of (sigma, tau): minimizes H^2 over the product
/// of unit disks by monotone spectral projected gradient from every start in
/// frobenius_starts, keeping the best local optimum.
FitResult fit_frobenius(const ReconstructedCorrelation& recon, const FrobeniusOptions& options = {});

}  // namespace likertlv
