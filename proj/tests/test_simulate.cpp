#include <cmath>

#include "bjme/simulate.hpp"
#include "doctest.h"

using namespace bjme;

namespace {

ModelState flat_state(Index n, const Vector& d) {
  ModelState s;
  s.theta = RowMatrix::Zero(n, 1);
  s.loadings = RowMatrix::Zero(1, 1);
  s.intercepts = {d};
  return s;
}

}  // namespace

TEST_CASE("exchangeable covariance") {
  CHECK(gen_sigma(3, 0.0) == Matrix::Identity(3, 3));
  const Matrix s = gen_sigma(2, 0.4);
  CHECK(s(0, 1) == doctest::Approx(0.4));
  CHECK(s(1, 1) == 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gen_sigma(4, 0.3));
  CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(0.7));
  CHECK_THROWS(gen_sigma(3, -0.6));
  CHECK_THROWS(gen_sigma(3, 1.0));
}

TEST_CASE("structure matrix proportions and coverage") {
  SimDesign d;
  d.seed = 3;
  const auto q = gen_q(d);
  int counts[4] = {0, 0, 0, 0};
  for (Index j = 0; j < 30; ++j) ++counts[q.entries.row(j).sum()];
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 18);
  CHECK(counts[2] == 6);
  CHECK(counts[3] == 6);
  for (Index k = 0; k < 3; ++k) CHECK(q.entries.col(k).sum() > 0);
  CHECK(gen_q(d).entries == q.entries);

  SimDesign d5 = d, d10 = d;
  d5.k = 5;
  d10.k = 10;
  const double ones5 = gen_q(d5).count_ones(), ones10 = gen_q(d10).count_ones();
  CHECK(1.0 - ones10 / (30.0 * 10) > 1.0 - ones5 / (30.0 * 5));

  SimDesign bad = d;
  bad.k = 2;
  CHECK_THROWS(gen_q(bad));
}

TEST_CASE("true parameters follow the design") {
  SimDesign d;
  d.seed = 8;
  const auto t = gen_true_params(d);
  for (Index j = 0; j < 30; ++j) {
    for (Index k = 0; k < 3; ++k) {
      const double a = t.state.loadings(j, k);
      if (t.q.entries(j, k)) {
        CHECK(a >= 0.5);
        CHECK(a <= 2.0);
      } else {
        CHECK(a == 0.0);
      }
    }
    const Vector& dj = t.state.intercepts[j];
    REQUIRE(dj.size() == 3);
    CHECK(dj(0) >= 0.75);
    CHECK(dj(0) <= 1.5);
    CHECK(std::abs(dj(1)) <= 0.375);
    CHECK(dj(2) >= -1.5);
    CHECK(dj(2) <= -0.75);
  }
  SimDesign b = d;
  b.categories = 2;
  b.q_proportions = {1.0, 0.0, 0.0};
  const auto tb = gen_true_params(b);
  for (const auto& dj : tb.state.intercepts) {
    REQUIRE(dj.size() == 1);
    CHECK(std::abs(dj(0)) <= 1.5);
  }
}

TEST_CASE("sampled factor scores match the covariance") {
  SimDesign d;
  d.n = 100000;
  d.j = 5;
  d.k = 3;
  d.rho = 0.4;
  d.q_proportions = {0.6, 0.2, 0.2};
  d.seed = 1;
  const auto t = gen_true_params(d);
  const RowMatrix& th = t.state.theta;
  const Eigen::RowVectorXd mean = th.colwise().mean();
  const Matrix centered = th.rowwise() - mean;
  const Matrix cov = centered.transpose() * centered / static_cast<double>(d.n - 1);
  CHECK((cov - t.sigma).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("binary responses at a zero predictor are fair coins") {
  Vector d(1);
  d << 0.0;
  const auto data = sample_responses(flat_state(10000, d), {2}, 4);
  const double p = data.responses.cast<double>().mean();
  CHECK(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / 10000));
  CHECK(data.mask.cast<int>().sum() == 10000);
}

TEST_CASE("category frequencies match the model probabilities") {
  Vector d(3);
  d << 1.0, 0.1, -0.8;
  const Index n = 20000;
  const auto data = sample_responses(flat_state(n, d), {4}, 9);
  Vector zero = Vector::Zero(1);
  for (int c = 0; c < 4; ++c) {
    const double p = category_prob(zero, zero, d, c);
    const double freq = (data.responses.array() == c).cast<double>().sum() / n;
    CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }
  CHECK(data.responses.minCoeff() >= 0);
  CHECK(data.responses.maxCoeff() <= 3);
  CHECK(sample_responses(flat_state(n, d), {4}, 9).responses == data.responses);
}

TEST_CASE("intercept ranges for other category counts are ordered") {
  for (int c : {2, 3, 5, 6, 7}) {
    const auto ranges = default_intercept_ranges(c);
    CHECK(ranges.size() == static_cast<std::size_t>(c - 1));
    for (std::size_t r = 1; r < ranges.size(); ++r) CHECK(ranges[r].hi <= ranges[r - 1].lo);
  }
}

TEST_CASE("replication with a fixed penalty is reproducible") {
  SimDesign d;
  d.n = 120;
  d.j = 10;
  d.seed = 2;
  ReplicationOptions opts;
  opts.fixed_lambda = 5.0;
  const auto a = run_replication(d, opts);
  const auto b = run_replication(d, opts);
  CHECK(a.lambda == 5.0);
  CHECK(a.selection.msr == b.selection.msr);
  CHECK(a.recovery.error_a == b.recovery.error_a);
  CHECK(a.fit.state.theta.rows() == 120);
}
