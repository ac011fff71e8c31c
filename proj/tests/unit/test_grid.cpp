#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "lensless/grid.hpp"
#include "oracles.hpp"

using namespace lensless;

TEST_CASE("make_partition with P = 1 is the full index set") {
  const auto part = make_partition(16, 1, RandomStream(99));
  const auto s = part.subset(0);
  std::vector<std::size_t> all(16);
  std::iota(all.begin(), all.end(), 0);
  CHECK(s == all);
}

TEST_CASE("make_partition subsets are disjoint and cover every index") {
  const auto part = make_partition(16, 4, RandomStream(7));
  const auto subsets = part.subsets();
  REQUIRE(subsets.size() == 4);
  std::multiset<std::size_t> seen;
  for (const auto& s : subsets) seen.insert(s.begin(), s.end());
  CHECK(seen.size() == 16);
  for (std::size_t j = 0; j < 16; ++j) CHECK(seen.count(j) == 1);
}

TEST_CASE("make_partition is deterministic in the seed") {
  const auto a = make_partition(100, 2, RandomStream(3));
  const auto b = make_partition(100, 2, RandomStream(3));
  CHECK(std::equal(a.labels().begin(), a.labels().end(), b.labels().begin(), b.labels().end()));
  const auto c = make_partition(100, 2, RandomStream(4));
  CHECK_FALSE(std::equal(a.labels().begin(), a.labels().end(), c.labels().begin(), c.labels().end()));
}

TEST_CASE("make_partition rejects invalid pattern counts") {
  CHECK_THROWS_AS(make_partition(4, 5, RandomStream(1)), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(4, 0, RandomStream(1)), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(0, 1, RandomStream(1)), std::invalid_argument);
}

TEST_CASE("masks of any partition sum back to the image") {
  RandomStream rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const ImageGrid grid(3 + rng.uniform_index(12), 3 + rng.uniform_index(12));
    const auto p = 1 + rng.uniform_index(6);
    const auto part = make_partition(grid.size(), p, rng.derive(trial));
    const auto u = oracle::random_image(grid, rng);
    RasterImage sum(grid);
    for (const auto& s : part.subsets()) {
      const auto masked = apply_mask(u, s);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += masked[i];
    }
    CHECK(sum.data() == u.data());
  }
}

TEST_CASE("centered_window sizes") {
  const ImageGrid grid(128, 128);
  auto w = centered_window(grid, 1.0);
  CHECK(w.side() == 128);
  CHECK(w.observed_count() == 16384);
  CHECK(w.achieved_ratio() == 1.0);

  w = centered_window(grid, 0.25);
  CHECK(w.side() == 64);
  CHECK(w.observed_count() == 4096);
  CHECK(w.top_left() == PixelCoord{32, 32});

  w = centered_window(grid, 0.1);
  CHECK(w.side() == 40);
  CHECK(w.observed_count() == 1600);
  CHECK(w.requested_ratio() == 0.1);
  CHECK(w.achieved_ratio() == doctest::Approx(1600.0 / 16384.0));
  CHECK(w.top_left() == PixelCoord{44, 44});

  CHECK(centered_window(grid, 1e-9).side() == 1);
}

TEST_CASE("centered_window rejects ratios outside (0, 1]") {
  const ImageGrid grid(8, 8);
  CHECK_THROWS_AS(centered_window(grid, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(centered_window(grid, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(centered_window(grid, 1.01), std::invalid_argument);
}

TEST_CASE("apply_mask") {
  const ImageGrid grid(2, 2);
  const RasterImage u(grid, {1, 2, 3, 4});
  const std::vector<std::size_t> all{0, 1, 2, 3};
  CHECK(apply_mask(u, all).data() == u.data());
  CHECK(apply_mask(u, {}).data() == std::vector<double>(4, 0.0));
  const std::vector<std::size_t> even{0, 2};
  CHECK(apply_mask(u, even).data() == std::vector<double>{1, 0, 3, 0});
  const std::vector<std::size_t> bad{4};
  CHECK_THROWS_AS(apply_mask(u, bad), std::invalid_argument);
}

TEST_CASE("restrict picks the centered window row-major") {
  const ImageGrid grid(4, 4);
  RasterImage u(grid);
  std::iota(u.values().begin(), u.values().end(), 0.0);
  const auto w = centered_window(grid, 0.25);
  REQUIRE(w.side() == 2);
  CHECK(restrict_to_window(u, w) == std::vector<double>{5, 6, 9, 10});
  CHECK(restrict_to_window(u, centered_window(grid, 1.0)) == u.data());
  CHECK_THROWS_AS(restrict_to_window(RasterImage(ImageGrid(5, 5)), w), std::invalid_argument);
}

TEST_CASE("embed is a right inverse and the adjoint of restrict") {
  RandomStream rng(5);
  const ImageGrid grid(8, 8);
  for (double ratio : {0.1, 0.3, 0.5, 1.0}) {
    const auto w = centered_window(grid, ratio);
    std::vector<double> v(w.observed_count());
    for (auto& x : v) x = rng.normal();
    CHECK(restrict_to_window(embed(v, w), w) == v);

    const auto u = oracle::random_image(grid, rng);
    const double lhs = dot(restrict_to_window(u, w), v);
    const double rhs = dot(u.values(), embed(v, w).values());
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
  const auto full = centered_window(grid, 1.0);
  std::vector<double> zeros(full.observed_count(), 0.0);
  CHECK(embed(zeros, full).data() == zeros);
  std::vector<double> ramp(64);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  CHECK(embed(ramp, full).data() == ramp);
  CHECK_THROWS_AS(embed(std::vector<double>(3), full), std::invalid_argument);
}

TEST_CASE("RandomStream is reproducible and child streams differ") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream base(42);
  auto c1 = base.derive(1), c2 = base.derive(2), c1b = base.derive(1);
  const auto x1 = c1.next_u64();
  CHECK(x1 == c1b.next_u64());
  CHECK(x1 != c2.next_u64());
}

TEST_CASE("RandomStream draws have the documented ranges and moments") {
  RandomStream rng(1234);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    CHECK(rng.uniform_index(7) < 7);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01).scale(1.0));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("ImageGrid and RasterImage validate their shape") {
  CHECK_THROWS_AS(ImageGrid(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(RasterImage(ImageGrid(2, 2), std::vector<double>(3)), std::invalid_argument);
  const ImageGrid g(3, 2);
  CHECK(g.size() == 6);
  CHECK(g.index(1, 2) == 5);
}
