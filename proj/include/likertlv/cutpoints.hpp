#pragma once

#include <vector>

#include "likertlv/errors.hpp"
#include "likertlv/model.hpp"

namespace likertlv {

/// Smallest gap enforced between adjacent pooled cuts when a category is empty.
inline constexpr double kCutTieGap = 1e-6;

struct CutPointEstimate {
  /// One J x C matrix per time point.
  std::vector<RowMatrixXd> per_time;
  /// Mean over time points, ties separated by kCutTieGap.
  CutPointSet pooled;
  Warnings warnings;
};

/// Inverse-normal method of moments:
///   z_jkt = Phi^{-1}((#{i : Y_ijt <= k} + 1) / (n + 2)),  z_jk = mean_t z_jkt.
CutPointEstimate estimate_cuts(const LikertDataset& data);

}  // namespace likertlv
