#pragma once

#include <cstdint>
#include <optional>

#include "likertlv/errors.hpp"
#include "likertlv/model.hpp"
#include "likertlv/stats.hpp"

namespace likertlv {

struct StemConfig {
  int iterations = 1000;
  /// Leading iterations excluded from the averages; negative selects R / 10.
  int burn_in = -1;
  int gibbs_sweeps = 10;
  std::uint64_t seed = 0;
  /// Starting values; default to the correlation-reconstruction fit and the
  /// method-of-moments cuts.
  std::optional<ModelParams> init_params;
  std::optional<CutPointSet> init_cuts;
  int inner_max_iterations = 500;
  double inner_tolerance = 1e-6;
  int threads = 1;

  int effective_burn_in() const { return burn_in < 0 ? iterations / 10 : burn_in; }
  void validate() const;
};

struct StemChain {
  RowMatrixXd sigma_trace;  // R x J
  RowMatrixXd tau_trace;    // R x J
  RowMatrixXd cut_trace;    // R x (J * C), item-major
  int burn_in = 0;
  ModelParams final_params;
  CutPointSet final_cuts;
  Warnings diagnostics;
};

/// Box of latent values consistent with one subject's responses under `cuts`.
TruncationBox response_box(const LikertDataset& data, const CutPointSet& cuts, int subject);

/// A latent dataset strictly inside every subject's box, used to start the chain.
LatentDataset interior_latent(const LikertDataset& data, const CutPointSet& cuts);

/// Moves a value into (lo, hi), keeping a margin of 1e-6 from finite bounds
/// (less for narrower intervals). Values already inside are left unchanged.
double clamp_into(double x, double lo, double hi);

/// One stochastic E-step: for every subject, `sweeps` Gibbs scans of the
/// truncated normal X | Y with covariance build_covariance(params, T), warm
/// started at `previous`. Subject i draws from the stream
/// (seed, Stream::impute, {iteration, i}), so results do not depend on threads.
LatentDataset impute_latent(const LikertDataset& data, const ModelParams& params, const CutPointSet& cuts,
                            const LatentDataset& previous, int sweeps, std::uint64_t seed,
                            std::uint64_t iteration, int threads = 1, Warnings* warnings = nullptr);

/// Completed-data objective -(n/2) log|Sigma| - 1/2 sum_i x_i' Sigma^{-1} x_i;
/// -inf when Sigma is singular.
double q1_objective(const LatentDataset& latent, const ModelParams& params);

struct Q1Options {
  int max_iterations = 500;
  double tolerance = 1e-6;
};

/// Maximizes q1_objective over the product of unit disks by spectral projected
/// gradient ascent from `warm`. Returns canonicalized params.
ModelParams maximize_q1(const LatentDataset& latent, const ModelParams& warm, const Q1Options& options = {},
                        Warnings* warnings = nullptr);

/// Midpoint cut update: z_jk = (max X over Y_j = k + min X over Y_j = k + 1) / 2,
/// pooled over subjects and times. A cut whose neighbouring category is empty
/// keeps its value from `previous`.
CutPointSet update_cuts(const LatentDataset& latent, const LikertDataset& data, const CutPointSet& previous);

/// Number of latent values lying outside the interval implied by their response.
/// The stochastic cut objective is 0 when this is 0 and -inf otherwise.
long box_violations(const LatentDataset& latent, const LikertDataset& data, const CutPointSet& cuts);

/// Stochastic EM: impute -> maximize Q1 -> update cuts, R times; final
/// estimates are averages of the post-burn-in iterates.
StemChain run_stem(const LikertDataset& data, const StemConfig& config);

}  // namespace likertlv
