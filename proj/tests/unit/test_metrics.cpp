#include <doctest.h>

#include <cmath>

#include "lensless/metrics.hpp"
#include "oracles.hpp"

using namespace lensless;

TEST_CASE("snr of an exact estimate is the infinite marker") {
  RandomStream rng(1);
  const auto u = oracle::random_image(ImageGrid(8, 8), rng);
  CHECK(snr(u, u) == kInfiniteSnr);
}

TEST_CASE("snr with round numbers") {
  const ImageGrid g(2, 1);
  // ||estimate|| = 10, ||truth - estimate|| = 1
  const RasterImage est(g, {6, 8});
  const RasterImage truth(g, {6, 9});
  CHECK(snr(est, truth) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("snr of 0.9 times the truth") {
  RandomStream rng(2);
  const auto truth = oracle::random_image(ImageGrid(16, 16), rng);
  RasterImage est(truth.grid());
  for (std::size_t i = 0; i < est.size(); ++i) est[i] = 0.9 * truth[i];
  CHECK(snr(est, truth) == doctest::Approx(20.0 * std::log10(9.0)).epsilon(1e-12));
  CHECK(snr(est, truth) == doctest::Approx(19.085).epsilon(1e-4));
}

TEST_CASE("scaling the error by 10 costs exactly 20 dB") {
  RandomStream rng(3);
  const ImageGrid g(10, 10);
  const auto est = oracle::random_image(g, rng);
  const auto err = oracle::random_image(g, rng);
  RasterImage t1(g), t2(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    t1[i] = est[i] + 0.01 * err[i];
    t2[i] = est[i] + 0.1 * err[i];
  }
  CHECK(snr(est, t1) - snr(est, t2) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("snr rejects a grid mismatch") {
  CHECK_THROWS_AS(snr(RasterImage(ImageGrid(2, 2)), RasterImage(ImageGrid(4, 1))), std::invalid_argument);
}

TEST_CASE("window_snr only looks inside the window") {
  const ImageGrid g(4, 4);
  RasterImage truth(g, 1.0), est(g, 1.0);
  est[0] = 5.0;  // outside the 2x2 center
  const auto w = centered_window(g, 0.25);
  CHECK(window_snr(est, truth, w) == kInfiniteSnr);
  CHECK(snr(est, truth) < kInfiniteSnr);
}

TEST_CASE("realized_bsnr") {
  AcquisitionRecord r;
  r.y_clean = std::vector<double>(100, 10.0);  // norm 100
  r.y = r.y_clean;
  CHECK(realized_bsnr(r) == kInfiniteSnr);
  r.y[0] += 1.0;  // noise norm 1
  CHECK(realized_bsnr(r) == doctest::Approx(40.0).epsilon(1e-12));
  r.y_clean.clear();
  CHECK_THROWS_AS(realized_bsnr(r), std::invalid_argument);
}

TEST_CASE("realized BSNR of calibrated noise with M = 16384") {
  RandomStream rng(4);
  AcquisitionRecord r;
  r.y_clean.resize(16384);
  for (auto& v : r.y_clean) v = rng.uniform();
  const auto n = calibrate_noise(r.y_clean, 40.0);
  r.y = r.y_clean;
  for (auto& v : r.y) v += n.sigma * rng.normal();
  const double b = realized_bsnr(r);
  CHECK(b >= 39.5);
  CHECK(b <= 40.5);
}
