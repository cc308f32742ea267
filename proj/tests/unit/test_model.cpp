#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "likertlv/errors.hpp"
#include "likertlv/model.hpp"
#include "likertlv/stats.hpp"

using namespace likertlv;

TEST_CASE("zero loadings give the identity") {
  ModelParams p{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
  for (int t : {1, 2, 4}) CHECK(build_covariance(p, t).isIdentity(0.0));
}

TEST_CASE("block entries for the five-item design") {
  const Eigen::MatrixXd s = build_covariance(fixture::five_item_truth(), 2);
  REQUIRE(s.rows() == 10);
  // sqrt(0.8 * 0.7) - sqrt(0.1 * 0.15)
  CHECK(std::abs(s(0, 1) - 0.6258569903) < 1e-9);
  CHECK(std::abs(s(0, 6) - 0.7483314774) < 1e-9);
  CHECK(std::abs(s(0, 5) - 0.8) < 1e-15);
  CHECK(s(5, 6) == s(0, 1));
  CHECK(s(1, 5) == s(0, 6));
}

TEST_CASE("covariance structure invariants") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int items = 2 + trial % 5;
    const int times = 1 + trial % 3;
    ModelParams p = fixture::random_params(items, 1.0, rng);
    const Eigen::MatrixXd s = build_covariance(p, times);
    CHECK(s == s.transpose());
    CHECK(s.diagonal().isOnes(0.0));
    CHECK(min_eigenvalue(s) >= -1e-10);

    ModelParams neg_sigma{-p.sigma, p.tau}, neg_tau{p.sigma, -p.tau};
    CHECK(build_covariance(neg_sigma, times) == s);
    CHECK(build_covariance(neg_tau, times) == s);
    CHECK(build_covariance(canonicalize(p), times) == s);
  }
}

TEST_CASE("zero transient loadings make B equal to the off-diagonal of A") {
  ModelParams p{Eigen::Vector3d(0.9, 0.4, -0.3), Eigen::Vector3d::Zero()};
  const Eigen::MatrixXd s = build_covariance(p, 2);
  Eigen::MatrixXd a = s.block(0, 0, 3, 3), b = s.block(0, 3, 3, 3);
  a.diagonal().setZero();
  b.diagonal().setZero();
  CHECK(a == b);
}

TEST_CASE("invalid parameters are rejected") {
  ModelParams outside{Eigen::Vector2d(0.8, 0.1), Eigen::Vector2d(0.7, 0.1)};
  CHECK_THROWS_AS(build_covariance(outside, 2), InputError);
  ModelParams edge{Eigen::Vector2d(0.6, 0.0), Eigen::Vector2d(0.8, 1.0)};
  CHECK_NOTHROW(build_covariance(edge, 2));
  ModelParams one_item{Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.5)};
  CHECK_THROWS_AS(one_item.validate(), InputError);
  ModelParams ragged{Eigen::Vector2d(0.5, 0.5), Eigen::Vector3d(0.1, 0.1, 0.1)};
  CHECK_THROWS_AS(ragged.validate(), InputError);
  ModelParams nan{Eigen::Vector2d(std::nan(""), 0.5), Eigen::Vector2d(0.1, 0.1)};
  CHECK_THROWS_AS(nan.validate(), InputError);
}

TEST_CASE("covariance_gradient matches finite differences") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int items = 3, times = 3, dim = items * times;
    ModelParams p = fixture::random_params(items, 0.9, rng);
    Eigen::MatrixXd w(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b <= a; ++b) w(a, b) = w(b, a) = normal(rng);
    auto f = [&](const ModelParams& q) { return (w.array() * build_covariance(q, times).array()).sum(); };
    const LoadingGradient g = covariance_gradient(w, p, times);
    const double h = 1e-6;
    for (int j = 0; j < items; ++j) {
      ModelParams up = p, down = p;
      up.sigma[j] += h;
      down.sigma[j] -= h;
      CHECK(std::abs((f(up) - f(down)) / (2 * h) - g.sigma[j]) < 1e-6 * std::max(1.0, std::abs(g.sigma[j])));
      up = p;
      down = p;
      up.tau[j] += h;
      down.tau[j] -= h;
      CHECK(std::abs((f(up) - f(down)) / (2 * h) - g.tau[j]) < 1e-6 * std::max(1.0, std::abs(g.tau[j])));
    }
  }
}

TEST_CASE("canonicalize examples") {
  ModelParams a{Eigen::Vector2d(-0.5, -0.5), Eigen::Vector2d(0.3, 0.3)};
  ModelParams ca = canonicalize(a);
  CHECK(ca.sigma == Eigen::Vector2d(0.5, 0.5));
  CHECK(ca.tau == Eigen::Vector2d(0.3, 0.3));

  ModelParams b{Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.3, -0.4)};
  ModelParams cb = canonicalize(b);
  CHECK(cb.sigma == Eigen::Vector2d(0.5, 0.5));
  CHECK(cb.tau == Eigen::Vector2d(-0.3, 0.4));

  ModelParams tie{Eigen::Vector3d(0.0, -0.2, 0.2), Eigen::Vector3d::Zero()};
  ModelParams ct = canonicalize(tie);
  CHECK(ct.sigma == Eigen::Vector3d(0.0, 0.2, -0.2));
  CHECK(ct.tau == Eigen::Vector3d::Zero());

  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    ModelParams c = canonicalize(fixture::random_params(4, 1.0, rng));
    CHECK(c.sigma.sum() >= 0.0);
    CHECK(c.tau.sum() >= 0.0);
    CHECK(canonicalize(c).sigma == c.sigma);
    CHECK(canonicalize(c).tau == c.tau);
  }
}

TEST_CASE("coarsen is monotone and places boundaries in the upper category") {
  const std::vector<double> cuts{-1.0, 0.0, 2.0};
  CHECK(coarsen(-5.0, cuts) == 1);
  CHECK(coarsen(-1.0, cuts) == 2);
  CHECK(coarsen(-0.5, cuts) == 2);
  CHECK(coarsen(0.0, cuts) == 3);
  CHECK(coarsen(2.0, cuts) == 4);
  CHECK(coarsen(1e300, cuts) == 4);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int i = 0; i < 10000; ++i) {
    double x = normal(rng), y = normal(rng);
    if (x > y) std::swap(x, y);
    CHECK(coarsen(x, cuts) <= coarsen(y, cuts));
  }
}

TEST_CASE("cut point bounds and validation") {
  CutPointSet c = fixture::five_item_cuts();
  CHECK_NOTHROW(c.validate());
  CHECK(std::isinf(c.lower(0, 1)));
  CHECK(c.lower(0, 1) < 0);
  CHECK(c.upper(0, 1) == -1.2);
  CHECK(c.lower(0, 5) == 0.8);
  CHECK(std::isinf(c.upper(0, 5)));
  c.cuts(2, 1) = c.cuts(2, 0);
  CHECK_THROWS_AS(c.validate(), InputError);
  CutPointSet wrong = fixture::five_item_cuts();
  wrong.num_categories = 4;
  CHECK_THROWS_AS(wrong.validate(), InputError);
}

TEST_CASE("simulate is deterministic and coarsens its latent draws") {
  const auto truth = fixture::five_item_truth();
  const auto cuts = fixture::five_item_cuts();
  const SimulatedData a = simulate(truth, cuts, 50, 2, 77);
  const SimulatedData b = simulate(truth, cuts, 50, 2, 77);
  const SimulatedData c = simulate(truth, cuts, 50, 2, 78);
  CHECK(a.latent.latent == b.latent.latent);
  CHECK(a.observed.responses == b.observed.responses);
  CHECK(a.latent.latent != c.latent.latent);
  for (int i = 0; i < 50; ++i)
    for (int t = 0; t < 2; ++t)
      for (int j = 0; j < 5; ++j) CHECK(a.observed.at(i, j, t) == coarsen(a.latent.at(i, j, t), cuts.row(j)));
  CHECK_NOTHROW(a.observed.validate());
}

TEST_CASE("simulate edge cases") {
  const auto cuts_low = fixture::uniform_cuts(3, {-10.0, -10.0 + 1e-9, -10.0 + 2e-9});
  ModelParams p{Eigen::Vector3d(0.5, 0.5, 0.5), Eigen::Vector3d(0.2, 0.2, 0.2)};
  const SimulatedData low = simulate(p, cuts_low, 200, 2, 1);
  CHECK((low.observed.responses.array() == 4).all());

  ModelParams pure{Eigen::Vector3d(1.0, 0.5, 0.2), Eigen::Vector3d(0.0, 0.3, 0.3)};
  const SimulatedData d = simulate(pure, cuts_low, 100, 2, 2);
  for (int i = 0; i < 100; ++i) CHECK(d.latent.at(i, 0, 0) == d.latent.at(i, 0, 1));
}

TEST_CASE("first-category frequency matches the normal CDF") {
  const int n = 100000;
  const SimulatedData d = simulate(fixture::five_item_truth(), fixture::five_item_cuts(), n, 2, 31);
  const double p = 0.11506967022170822;
  const double se = std::sqrt(p * (1 - p) / n);
  for (int t = 0; t < 2; ++t) {
    const double freq = (d.observed.responses.col(latent_index(0, t, 5)).array() == 1).cast<double>().mean();
    CHECK(std::abs(freq - p) < 3 * se);
  }
}

TEST_CASE("sample covariance converges to the model covariance") {
  const auto truth = fixture::five_item_truth();
  const Eigen::MatrixXd model = build_covariance(truth, 2);
  const int n = 100000;
  const SimulatedData d = simulate(truth, fixture::five_item_cuts(), n, 2, 5);
  const Eigen::MatrixXd x = d.latent.latent;
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd sample = centered.transpose() * centered / (n - 1);
  CHECK((sample - model).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("independent Monte Carlo oracle reproduces the block entries") {
  // Draws built with std::normal_distribution, not the library simulator.
  const auto truth = fixture::five_item_truth();
  const Eigen::VectorXd gamma = truth.gamma_sq().cwiseSqrt();
  std::mt19937_64 rng(123456);
  std::normal_distribution<double> normal;
  const int n = 1000000;
  double s01 = 0, s06 = 0, m0 = 0, m1 = 0, m6 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = normal(rng), e1 = normal(rng), e2 = normal(rng);
    const double x0 = truth.sigma[0] * z + truth.tau[0] * e1 + gamma[0] * normal(rng);
    const double x1 = truth.sigma[1] * z + truth.tau[1] * e1 + gamma[1] * normal(rng);
    const double x6 = truth.sigma[1] * z + truth.tau[1] * e2 + gamma[1] * normal(rng);
    s01 += x0 * x1;
    s06 += x0 * x6;
    m0 += x0; m1 += x1; m6 += x6;
  }
  const double a12 = s01 / n - (m0 / n) * (m1 / n);
  const double b12 = s06 / n - (m0 / n) * (m6 / n);
  const Eigen::MatrixXd model = build_covariance(truth, 2);
  // Standard error of a covariance estimate with unit variances is below 1.5 / sqrt(n).
  CHECK(std::abs(a12 - model(0, 1)) < 4.5 / std::sqrt(n));
  CHECK(std::abs(b12 - model(0, 6)) < 4.5 / std::sqrt(n));
}

TEST_CASE("project_to_disk") {
  ModelParams p{Eigen::Vector2d(3.0, 0.3), Eigen::Vector2d(4.0, 0.4)};
  project_to_disk(p);
  CHECK(std::abs(p.sigma[0] - 0.6) < 1e-15);
  CHECK(std::abs(p.tau[0] - 0.8) < 1e-15);
  CHECK(p.sigma[1] == 0.3);
  CHECK(p.tau[1] == 0.4);
}
