#pragma once

#include <cmath>
#include <random>

#include "likertlv/model.hpp"

namespace fixture {

// The five-item, two-occasion design used throughout the simulation study.
inline likertlv::ModelParams five_item_truth() {
  likertlv::ModelParams p;
  p.sigma = Eigen::VectorXd(5);
  p.tau = Eigen::VectorXd(5);
  p.sigma << std::sqrt(0.8), std::sqrt(0.7), std::sqrt(0.6), std::sqrt(0.5), std::sqrt(0.4);
  p.tau << std::sqrt(0.1), -std::sqrt(0.15), -std::sqrt(0.2), std::sqrt(0.25), std::sqrt(0.3);
  return p;
}

inline likertlv::CutPointSet five_item_cuts() {
  likertlv::CutPointSet c;
  c.num_categories = 5;
  c.cuts = likertlv::RowMatrixXd(5, 4);
  c.cuts << -1.2, -0.5, 0.4, 0.8,
            -0.85, -0.25, 0.25, 0.85,
            -0.85, -0.25, 0.25, 0.85,
            -0.85, -0.25, 0.25, 0.85,
            -1.2, -0.5, 0.4, 0.8;
  return c;
}

/// Loadings drawn uniformly from the disk of radius sqrt(max_norm_sq) per item.
inline likertlv::ModelParams random_params(int items, double max_norm_sq, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  likertlv::ModelParams p{Eigen::VectorXd(items), Eigen::VectorXd(items)};
  for (int j = 0; j < items; ++j) {
    const double r = std::sqrt(max_norm_sq * unit(rng));
    const double angle = 2.0 * 3.141592653589793 * unit(rng);
    p.sigma[j] = r * std::cos(angle);
    p.tau[j] = r * std::sin(angle);
  }
  return p;
}

inline likertlv::CutPointSet uniform_cuts(int items, std::initializer_list<double> row) {
  likertlv::CutPointSet c;
  c.num_categories = static_cast<int>(row.size()) + 1;
  c.cuts = likertlv::RowMatrixXd(items, static_cast<Eigen::Index>(row.size()));
  for (int j = 0; j < items; ++j) {
    int k = 0;
    for (double v : row) c.cuts(j, k++) = v;
  }
  return c;
}

}  // namespace fixture
