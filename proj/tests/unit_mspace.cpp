#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "roughbv/io.hpp"
#include "roughbv/mspace.hpp"
#include "test_support.hpp"

using namespace roughbv;

TEST_CASE("circle space: uniform construction") {
  SpaceParams prm;
  prm.size = 8;
  prm.circumference = 1.0;
  auto X = build_space("circle", prm);
  CHECK(X.n() == 8);
  CHECK(X.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(X.min_positive_distance() == doctest::Approx(0.125).epsilon(1e-14));
  X.validate();
}

TEST_CASE("segment space: two points") {
  SpaceParams prm;
  prm.size = 2;
  prm.length = 1.0;
  auto X = build_space("segment", prm);
  CHECK(X.dist(0, 1) == doctest::Approx(1.0));
  CHECK(X.weight[0] == doctest::Approx(0.5));
  CHECK(X.weight[1] == doctest::Approx(0.5));
}

TEST_CASE("cantor4 depth 4: 256 points, min gap 3*4^-4 by brute force") {
  SpaceParams prm;
  prm.depth = 4;
  auto X = build_space("cantor4", prm);
  REQUIRE(X.n() == 256);
  // oracle: exhaustive minimum over the explicit construction
  double dmin = X.min_positive_distance();
  CHECK(dmin == doctest::Approx(3.0 / 256.0).epsilon(1e-12));
  CHECK(X.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("space file round trip and rejection of non-metric input") {
  SpaceParams prm;
  prm.size = 16;
  prm.circumference = 1.0;
  auto X = build_space("circle", prm);
  write_space_file("tmp_space.txt", X);
  auto Y = read_space_file("tmp_space.txt");
  REQUIRE(Y.n() == X.n());
  for (int i = 0; i < X.n(); ++i)
    for (int j = 0; j < X.n(); ++j) CHECK(Y.dist(i, j) == doctest::Approx(X.dist(i, j)).epsilon(1e-9));

  write_text_file("tmp_bad.txt",
                  "d 1 lambda 8\npoint 0 1\npoint 1 1\npoint 2 1\n"
                  "dist 0 1 1\ndist 1 2 1\ndist 0 2 5\n");
  CHECK_THROWS_WITH_AS(read_space_file("tmp_bad.txt"),
                       doctest::Contains("triangle inequality fails at triple"),
                       std::invalid_argument);
}

TEST_CASE("regularity sweep: circle-512") {
  SpaceParams prm;
  prm.size = 512;
  prm.circumference = 1.0;
  auto X = build_space("circle", prm);
  auto rep = check_regularity(X, 1.0);
  CHECK(rep.c0 <= 2.1);
  CHECK(rep.uniformly_perfect);
  CHECK(rep.doubling <= 4.0);
  // wrong dimension: the ratio drifts across scales by a large factor
  auto rep2 = check_regularity(X, 2.0);
  CHECK(rep2.ratio_drift > 50.0);
}

TEST_CASE("regularity sweep: cantor4 depth 5") {
  SpaceParams prm;
  prm.depth = 5;
  auto X = build_space("cantor4", prm);
  REQUIRE(X.n() == 1024);
  auto rep = check_regularity(X, 1.0);
  CHECK(std::isfinite(rep.c0));
  CHECK(std::isfinite(rep.doubling));
  CHECK(rep.uniformly_perfect);
}

TEST_CASE("whitney: arc of a circle, exhaustive post-check") {
  SpaceParams prm;
  prm.size = 512;
  prm.circumference = 1.0;
  auto X = build_space("circle", prm);
  std::vector<int> U;
  for (int i = 100; i < 356; ++i) U.push_back(i);  // arc of length 0.5
  auto cov = whitney_decompose(X, U);
  auto chk = testsup::verify_cover(X, U, cov);
  CHECK(chk.union_equals_u);
  CHECK(chk.lambda_ball_reaches_complement);
  CHECK(chk.overlap <= 32);
  CHECK(chk.neighbor_ratio <= 3.0 + 1e-9);
  CHECK(chk.pou_partition);
  CHECK(chk.pou_off_u_zero);
  MESSAGE("pou lip factor: ", chk.pou_lip_factor, " overlap: ", chk.overlap);
}

TEST_CASE("whitney: single point") {
  SpaceParams prm;
  prm.size = 64;
  prm.circumference = 1.0;
  auto X = build_space("circle", prm);
  auto cov = whitney_decompose(X, {7});
  REQUIRE(cov.balls.size() == 1);
  const double rho = 1.0 / 64.0;  // distance to the complement
  CHECK(cov.balls[0].radius == doctest::Approx(rho / 2.0));                 // main ball
  CHECK(cov.balls[0].radius / cov.lambda == doctest::Approx(rho / (2 * X.lambda)));  // underline
  CHECK(cov.balls[0].center == 7);
}

TEST_CASE("whitney: degenerate inputs") {
  SpaceParams prm;
  prm.size = 16;
  prm.circumference = 1.0;
  auto X = build_space("circle", prm);
  std::vector<int> all(16);
  for (int i = 0; i < 16; ++i) all[i] = i;
  CHECK_THROWS_WITH_AS(whitney_decompose(X, all),
                       doctest::Contains("nonempty complement"), std::invalid_argument);
  auto cov = whitney_decompose(X, {});
  CHECK(cov.balls.empty());
}

TEST_CASE("whitney: invariants across 20 random open sets on three spaces") {
  SpaceParams c128;
  c128.size = 128;
  c128.circumference = 1.0;
  SpaceParams s128;
  s128.size = 128;
  s128.length = 1.0;
  SpaceParams cant;
  cant.depth = 3;
  std::vector<MetricMeasureSpace> spaces = {
      build_space("circle", c128), build_space("segment", s128), build_space("cantor4", cant)};
  Rng rng(2024);
  double max_lip_factor = 0.0;
  for (const auto& X : spaces) {
    int max_overlap = 0;
    for (int trial = 0; trial < 20; ++trial) {
      // random union of balls, clipped to a proper subset
      std::set<int> u;
      int nballs = 1 + static_cast<int>(rng.index(3));
      for (int b = 0; b < nballs; ++b) {
        int c = static_cast<int>(rng.index(X.n()));
        double r = rng.uniform(0.02, 0.3) * X.diameter();
        for (int y = 0; y < X.n(); ++y)
          if (X.dist(c, y) <= r) u.insert(y);
      }
      if (static_cast<int>(u.size()) == X.n()) u.erase(std::prev(u.end()));
      if (u.empty()) continue;
      std::vector<int> U(u.begin(), u.end());
      auto cov = whitney_decompose(X, U);
      auto chk = testsup::verify_cover(X, U, cov);
      CHECK(chk.union_equals_u);
      CHECK(chk.lambda_ball_reaches_complement);
      CHECK(chk.neighbor_ratio <= 3.0 + 1e-9);
      CHECK(chk.pou_partition);
      CHECK(chk.pou_off_u_zero);
      max_overlap = std::max(max_overlap, chk.overlap);
      max_lip_factor = std::max(max_lip_factor, chk.pou_lip_factor);
    }
    CHECK(max_overlap <= 32);
  }
  MESSAGE("max pou lip factor across random suite: ", max_lip_factor);
}
