#include "likertlv/cutpoints.hpp"

#include <string>

#include "likertlv/stats.hpp"

namespace likertlv {

CutPointEstimate estimate_cuts(const LikertDataset& data) {
  data.validate();
  const int n = data.subjects();
  const int items = data.items;
  const int times = data.times;
  const int num_cuts = data.num_categories - 1;

  CutPointEstimate est;
  est.pooled.num_categories = data.num_categories;
  est.pooled.cuts = RowMatrixXd::Zero(items, num_cuts);

  std::vector<int> counts(static_cast<std::size_t>(data.num_categories) + 1);
  for (int t = 0; t < times; ++t) {
    RowMatrixXd cuts(items, num_cuts);
    for (int j = 0; j < items; ++j) {
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(data.at(i, j, t))];
      int cumulative = 0;
      for (int k = 1; k <= num_cuts; ++k) {
        cumulative += counts[static_cast<std::size_t>(k)];
        cuts(j, k - 1) = norm_quantile((cumulative + 1.0) / (n + 2.0));
      }
    }
    est.pooled.cuts += cuts;
    est.per_time.push_back(std::move(cuts));
  }
  est.pooled.cuts /= static_cast<double>(times);

  for (int j = 0; j < items; ++j) {
    for (int k = 1; k < num_cuts; ++k) {
      double& cut = est.pooled.cuts(j, k);
      const double below = est.pooled.cuts(j, k - 1);
      if (!(cut > below)) {
        cut = below + kCutTieGap;
        est.warnings.push_back("item " + std::to_string(j + 1) + ": category " + std::to_string(k + 1) +
                               " is empty at every time point; cut " + std::to_string(k + 1) +
                               " moved up by 1e-6");
      }
    }
  }
  return est;
}

}  // namespace likertlv
