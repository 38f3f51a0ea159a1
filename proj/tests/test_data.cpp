#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "bjme/data.hpp"
#include "doctest.h"

using namespace bjme;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bjme_test_" + name)).string();
}

}  // namespace

TEST_CASE("parse_responses marks missing cells and infers categories") {
  const auto d = parse_responses("1,0\nNA,2\n");
  CHECK(d.n_respondents() == 2);
  CHECK(d.n_items() == 2);
  CHECK(d.mask(0, 0) == 1);
  CHECK(d.mask(0, 1) == 1);
  CHECK(d.mask(1, 0) == 0);
  CHECK(d.mask(1, 1) == 1);
  CHECK(d.categories == std::vector<int>{2, 3});
  CHECK(d.responses(1, 1) == 2);
}

TEST_CASE("parse_responses handles headers, empty fields and overrides") {
  const auto d = parse_responses("q1,q2,q3\n0,1,\n1,,0\n");
  CHECK(d.n_respondents() == 2);
  CHECK(d.mask(0, 2) == 0);
  CHECK(d.mask(1, 1) == 0);
  CHECK(d.n_observed() == 4);

  LoadOptions opts;
  opts.missing_token = ".";
  opts.categories = std::vector<int>{5, 4};
  const auto e = parse_responses("0,1\n.,3\n", opts);
  CHECK(e.categories == std::vector<int>{5, 4});
  CHECK(e.mask(1, 0) == 0);
}

TEST_CASE("all-observed table has a full mask") {
  const auto d = parse_responses("0,1,2\n2,1,0\n1,1,1\n");
  CHECK(d.mask.cast<int>().sum() == 9);
}

TEST_CASE("parse_responses rejects malformed input") {
  CHECK_THROWS_AS(parse_responses("1,-1\n0,1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_responses("1,0\n0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_responses("1,NA\n0,NA\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_responses("1,0.5\n0,1\n"), std::invalid_argument);
  LoadOptions opts;
  opts.categories = std::vector<int>{2, 2};
  CHECK_THROWS_AS(parse_responses("1,3\n0,1\n", opts), std::invalid_argument);
}

TEST_CASE("load, write, load is idempotent on responses and mask") {
  const auto d = parse_responses("1,NA,3\n0,2,NA\n2,2,1\n");
  const auto path = temp_path("responses.csv");
  write_responses(path, d, {"comment line"});
  const auto e = load_responses(path);
  CHECK(e.responses == d.responses);
  CHECK(e.mask == d.mask);
  CHECK(e.categories == d.categories);
  std::filesystem::remove(path);
}

TEST_CASE("split_rows partitions rows deterministically") {
  ResponseData d;
  d.responses = IntMatrix::Zero(10, 2);
  d.mask = MaskMatrix::Ones(10, 2);
  d.categories = {2, 2};
  for (Index i = 0; i < 10; ++i) d.responses(i, 0) = static_cast<int>(i % 2);

  const auto s = split_rows(d, 0.5, 7);
  CHECK(s.first_rows.size() == 5);
  CHECK(s.second_rows.size() == 5);
  const auto t = split_rows(d, 0.5, 7);
  CHECK(s.first_rows == t.first_rows);
  for (std::size_t r = 0; r < s.first_rows.size(); ++r)
    CHECK(s.first.responses.row(static_cast<Index>(r)) == d.responses.row(s.first_rows[r]));

  CHECK_THROWS_AS(split_rows(d.select_rows({0}), 0.5, 1), std::invalid_argument);
}

TEST_CASE("split_rows at N=1000 gives a disjoint 500/500 cover") {
  ResponseData d;
  d.responses = IntMatrix::Zero(1000, 1);
  d.mask = MaskMatrix::Ones(1000, 1);
  d.categories = {2};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = split_rows(d, 0.5, seed);
    CHECK(s.first_rows.size() == 500);
    CHECK(s.second_rows.size() == 500);
    std::set<Index> all(s.first_rows.begin(), s.first_rows.end());
    all.insert(s.second_rows.begin(), s.second_rows.end());
    CHECK(all.size() == 1000);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 999);
  }
}

TEST_CASE("matrix round trip") {
  const auto path = temp_path("matrix.csv");
  write_matrix(path, Matrix::Identity(3, 3));
  CHECK(read_matrix(path) == Matrix::Identity(3, 3));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 100.0);
  Matrix m(3, 2);
  for (Index r = 0; r < 3; ++r)
    for (Index c = 0; c < 2; ++c) m(r, c) = normal(rng) * 1e-3 + normal(rng);
  write_matrix(path, m, {"seed = 3"});
  CHECK((read_matrix(path) - m).cwiseAbs().maxCoeff() <= 1e-12);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_matrix("1,2\n3,x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix("1,2\n3\n"), std::invalid_argument);
  CHECK_THROWS(read_matrix(temp_path("does_not_exist.csv")));
}

TEST_CASE("ragged intercepts round trip with NA padding") {
  const auto path = temp_path("intercepts.csv");
  std::vector<Vector> d{Vector::LinSpaced(3, 1.0, -1.0), Vector::Constant(1, 0.25)};
  write_intercepts(path, d);
  const auto e = read_intercepts(path);
  REQUIRE(e.size() == 2);
  CHECK(e[0] == d[0]);
  CHECK(e[1] == d[1]);
  std::filesystem::remove(path);
}
