#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "likertlv/errors.hpp"

namespace likertlv {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Tolerance on sigma_j^2 + tau_j^2 <= 1.
inline constexpr double kDiskTolerance = 1e-12;

/// Position of (item, time) in a latent vector: all items at the first time,
/// then all items at the second time, and so on. Zero-based.
constexpr int latent_index(int item, int time, int items) { return time * items + item; }

/// Loadings of X_jt = sigma_j Z + tau_j e_t + gamma_j eps_jt, with
/// gamma_j^2 = 1 - sigma_j^2 - tau_j^2 so each latent response has unit variance.
struct ModelParams {
  Eigen::VectorXd sigma;
  Eigen::VectorXd tau;

  int items() const { return static_cast<int>(sigma.size()); }
  Eigen::VectorXd gamma_sq() const;
  /// Throws InputError on mismatched sizes, fewer than two items, non-finite
  /// values or sigma_j^2 + tau_j^2 > 1 + kDiskTolerance.
  void validate() const;
};

/// Per-item thresholds; row j holds z_j1 < ... < z_jC with C = num_categories - 1.
struct CutPointSet {
  RowMatrixXd cuts;
  int num_categories = 0;

  int items() const { return static_cast<int>(cuts.rows()); }
  int num_cuts() const { return num_categories - 1; }
  std::span<const double> row(int item) const {
    return {cuts.data() + static_cast<std::ptrdiff_t>(item) * cuts.cols(),
            static_cast<std::size_t>(cuts.cols())};
  }
  /// Bounds of the latent interval for a 1-based category; -inf / +inf at the ends.
  double lower(int item, int category) const;
  double upper(int item, int category) const;
  void validate() const;
};

/// Observed responses, one row per subject, column latent_index(j, t, J).
/// Values are 1-based categories.
struct LikertDataset {
  RowMatrixXi responses;
  int items = 0;
  int times = 0;
  int num_categories = 0;

  int subjects() const { return static_cast<int>(responses.rows()); }
  int at(int subject, int item, int time) const {
    return responses(subject, latent_index(item, time, items));
  }
  void validate() const;
};

/// Latent responses, same layout as LikertDataset.
struct LatentDataset {
  RowMatrixXd latent;
  int items = 0;
  int times = 0;

  int subjects() const { return static_cast<int>(latent.rows()); }
  double at(int subject, int item, int time) const {
    return latent(subject, latent_index(item, time, items));
  }
  void validate() const;
};

/// Block-patterned covariance of the JT latent responses: A blocks on the
/// diagonal (unit diagonal, sigma_j sigma_k + tau_j tau_k off it) and B blocks
/// (sigma_j sigma_k, including sigma_j^2) between distinct times.
Eigen::MatrixXd build_covariance(const ModelParams& params, int times);

/// Gradient with respect to (sigma, tau) of sum_ab W_ab Sigma_ab(params), for a
/// symmetric weight matrix W. Diagonal entries of Sigma are constant and do not
/// contribute.
struct LoadingGradient {
  Eigen::VectorXd sigma;
  Eigen::VectorXd tau;
};
LoadingGradient covariance_gradient(const Eigen::MatrixXd& weights, const ModelParams& params,
                                    int times);

/// Category of a latent value: 1 if x < z_1, k + 1 if z_k <= x < z_{k+1}.
int coarsen(double x, std::span<const double> cuts);

struct SimulatedData {
  LatentDataset latent;
  LikertDataset observed;
};

/// Draws Z_i, e_it, eps_ijt independently from N(0, 1) and coarsens the
/// resulting latent responses. Deterministic for a given seed.
SimulatedData simulate(const ModelParams& params, const CutPointSet& cuts, int subjects, int times,
                       std::uint64_t seed);

/// Fixes the two unidentified global signs: sum(sigma) >= 0 and sum(tau) >= 0,
/// with a zero sum resolved by making the first nonzero entry nonnegative.
ModelParams canonicalize(const ModelParams& params);

/// Euclidean projection of each (sigma_j, tau_j) onto the closed unit disk.
void project_to_disk(ModelParams& params);

}  // namespace likertlv
