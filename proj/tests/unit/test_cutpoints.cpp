#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "likertlv/cutpoints.hpp"
#include "likertlv/stats.hpp"
#include "oracles.hpp"

using namespace likertlv;

namespace {

LikertDataset from_rows(std::initializer_list<std::initializer_list<int>> rows, int items, int times, int k) {
  LikertDataset d{RowMatrixXi(static_cast<Eigen::Index>(rows.size()), items * times), items, times, k};
  int i = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (int v : row) d.responses(i, c++) = v;
    ++i;
  }
  return d;
}

}  // namespace

TEST_CASE("median count gives a zero cut") {
  // Two subjects, two items, two times, three categories.
  const LikertDataset d = from_rows({{1, 2, 1, 3}, {3, 3, 2, 1}}, 2, 2, 3);
  const CutPointEstimate est = estimate_cuts(d);
  REQUIRE(est.per_time.size() == 2);
  CHECK(est.per_time[0](0, 0) == 0.0);  // one of two at or below 1
  CHECK(est.per_time[0](0, 1) == 0.0);
}

TEST_CASE("no subject at or below k uses the small-sample adjustment") {
  LikertDataset d{RowMatrixXi::Constant(98, 4, 3), 2, 2, 3};
  const CutPointEstimate est = estimate_cuts(d);
  const double expected = oracle::bisect_quantile(norm_cdf, 0.01);
  CHECK(std::abs(expected - -2.32635) < 1e-5);
  for (int t = 0; t < 2; ++t) CHECK(std::abs(est.per_time[t](0, 0) - expected) < 1e-10);
  // Every response in the top category: the second cut ties the first and is repaired.
  CHECK(est.pooled.cuts(0, 1) == doctest::Approx(est.pooled.cuts(0, 0) + kCutTieGap).epsilon(1e-12));
  CHECK(est.warnings.size() == 2);
  CHECK_NOTHROW(est.pooled.validate());
}

TEST_CASE("pooled cuts are the mean over time") {
  const SimulatedData s = simulate(fixture::five_item_truth(), fixture::five_item_cuts(), 300, 3, 9);
  const CutPointEstimate est = estimate_cuts(s.observed);
  REQUIRE(est.warnings.empty());
  const RowMatrixXd mean = (est.per_time[0] + est.per_time[1] + est.per_time[2]) / 3.0;
  CHECK((est.pooled.cuts - mean).cwiseAbs().maxCoeff() < 1e-15);
  for (int j = 0; j < 5; ++j)
    for (int k = 1; k < 4; ++k) CHECK(est.pooled.cuts(j, k) > est.pooled.cuts(j, k - 1));
}

TEST_CASE("pooled rows stay increasing for sparse data") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> category(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    LikertDataset d{RowMatrixXi(3, 6), 3, 2, 6};
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 6; ++c) d.responses(i, c) = category(rng);
    const CutPointEstimate est = estimate_cuts(d);
    CHECK_NOTHROW(est.pooled.validate());
  }
}

TEST_CASE("large-sample consistency") {
  const auto cuts = fixture::five_item_cuts();
  const SimulatedData s = simulate(fixture::five_item_truth(), cuts, 100000, 2, 21);
  const CutPointEstimate est = estimate_cuts(s.observed);
  CHECK((est.pooled.cuts.row(0) - cuts.cuts.row(0)).cwiseAbs().maxCoeff() < 0.02);
  CHECK((est.pooled.cuts - cuts.cuts).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("mean over replicates is close to truth") {
  const auto cuts = fixture::five_item_cuts();
  const auto truth = fixture::five_item_truth();
  RowMatrixXd sum = RowMatrixXd::Zero(5, 4);
  const int reps = 500;
  for (int r = 0; r < reps; ++r) sum += estimate_cuts(simulate(truth, cuts, 5000, 2, 1000 + r).observed).pooled.cuts;
  CHECK((sum / reps - cuts.cuts).cwiseAbs().maxCoeff() < 0.01);
}
