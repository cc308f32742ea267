#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "likertlv/model.hpp"

namespace likertlv {

struct StudyConfig {
  ModelParams truth;
  CutPointSet truth_cuts;
  int subjects = 250;
  int times = 2;
  int replicates = 1;
  bool run_cr = true;
  bool run_stem = false;
  int stem_iterations = 1000;
  int stem_burn_in = -1;
  int gibbs_sweeps = 10;
  std::uint64_t seed = 1;
  /// Worker threads for replicates; 0 uses every core.
  int threads = 0;

  void validate() const;
};

/// J = 5, T = 2 design with signal shares 0.8..0.4, signed transient shares
/// 0.1..0.3 and five-category cuts (-1.2, -0.5, 0.4, 0.8) for items 1 and 5,
/// (-0.85, -0.25, 0.25, 0.85) for items 2-4.
StudyConfig five_item_design(int subjects, int replicates);

/// Reads a study / simulation config. Required: sigma, tau, cuts. Optional:
/// num_categories, subjects, times, replicates, methods (["cr", "stem"]),
/// stem {iterations, burn_in, gibbs_sweeps}, seed, threads.
StudyConfig study_config_from_json(const nlohmann::json& doc);

/// Seed of replicate `index`: derive_seed(master, Stream::replicate, {index}).
std::uint64_t replicate_seed(std::uint64_t master, int index);

struct ReplicateResult {
  int index = 0;
  bool ok = false;
  std::string error;
  ModelParams cr;
  CutPointSet mm_cuts;
  ModelParams stem;
  CutPointSet stem_cuts;
  std::size_t warnings = 0;
};

/// Simulates replicate `index` and estimates it with the configured methods.
/// Failures are captured in the result rather than thrown.
ReplicateResult run_replicate(const StudyConfig& config, int index);

struct RmseReport {
  int replicates = 0;
  int failures = 0;
  std::size_t warnings = 0;
  double wall_seconds = 0.0;
  bool has_cr = false;
  bool has_stem = false;
  // Loadings are compared after canonicalizing truth and estimate.
  Eigen::VectorXd cr_sigma, cr_tau, stem_sigma, stem_tau;  // length J
  RowMatrixXd mm_cuts, stem_cuts;                          // J x C
  std::vector<std::string> failure_messages;
};

/// Root mean squared error of each estimator over successful replicates,
/// reduced in replicate order so the thread count never changes the result.
RmseReport summarize(const StudyConfig& config, std::span<const ReplicateResult> results);
RmseReport run_study(const StudyConfig& config, std::vector<ReplicateResult>* details = nullptr);

/// `estimator,method,rmse` rows, e.g. `sigma_1,cr,0.0151`.
void write_report_csv(std::ostream& out, const RmseReport& report);
/// Human-readable loading and cut-point tables.
std::string format_report(const RmseReport& report);

/// Sample autocorrelation r_k = sum (x_t - m)(x_{t+k} - m) / sum (x_t - m)^2 for
/// k = 0..max_lag; NaN where undefined (constant series or k >= length).
std::vector<double> autocorrelation(std::span<const double> series, int max_lag);

}  // namespace likertlv
