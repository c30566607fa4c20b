#include <doctest.h>

#include "boa/metrics.hpp"
#include "support.hpp"

using namespace boa;

namespace {

// Window-by-window SSIM with the 2-D Gaussian built explicitly.
double naive_ssim(const SpatialTensor& x, const SpatialTensor& y) {
  double w[11][11];
  double total = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      w[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
      total += w[i][j];
    }
  const double c1 = 0.0001, c2 = 0.0009;
  const Shape& s = x.shape();
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t m = 0; m + 11 <= s.rows; ++m)
        for (std::size_t n = 0; n + 11 <= s.cols; ++n) {
          double mx = 0, my = 0;
          for (int i = 0; i < 11; ++i)
            for (int j = 0; j < 11; ++j) {
              mx += w[i][j] / total * x(b, c, m + i, n + j);
              my += w[i][j] / total * y(b, c, m + i, n + j);
            }
          double vx = 0, vy = 0, cxy = 0;
          for (int i = 0; i < 11; ++i)
            for (int j = 0; j < 11; ++j) {
              const double dx = x(b, c, m + i, n + j) - mx;
              const double dy = y(b, c, m + i, n + j) - my;
              vx += w[i][j] / total * dx * dx;
              vy += w[i][j] / total * dy * dy;
              cxy += w[i][j] / total * dx * dy;
            }
          acc += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
          ++count;
        }
  return acc / count;
}

}  // namespace

TEST_CASE("psnr closed form and cap") {
  SpatialTensor a({1, 1, 2, 2}, 0.5);
  SpatialTensor b = a;
  CHECK(psnr(a, b) == kPsnrCap);
  b(0, 0, 0, 0) = 0.6;  // mse = 0.01 / 4
  CHECK(psnr(a, b) == doctest::Approx(10 * std::log10(400.0)).epsilon(1e-12));
  CHECK(psnr(a, b, 255.0) == doctest::Approx(10 * std::log10(255.0 * 255.0 * 400.0)).epsilon(1e-12));
  b(0, 0, 0, 0) = 0.5 + 1e-9;
  CHECK(psnr(a, b) == kPsnrCap);
  CHECK_THROWS_AS(psnr(a, SpatialTensor({1, 1, 2, 3})), ShapeError);
}

TEST_CASE("ssim agrees with the per-window oracle") {
  const auto x = test::random_tensor({2, 2, 16, 19}, 1);
  auto y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = 0.7 * y.data()[i] + 0.1 * std::sin(double(i));
  CHECK(ssim(x, y) == doctest::Approx(naive_ssim(x, y)).epsilon(1e-10));
  CHECK(ssim(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  const auto z = test::random_tensor({2, 2, 16, 19}, 2);
  CHECK(ssim(x, z) < 0.2);
  CHECK_THROWS_AS(ssim(SpatialTensor({1, 1, 10, 20}), SpatialTensor({1, 1, 10, 20})), ShapeError);
  const auto q = quality(x, y);
  CHECK(q.psnr == psnr(x, y));
  CHECK(q.ssim == ssim(x, y));
}

TEST_CASE("retained band membership on a 16 grid") {
  CHECK(probe_in_retained_band({3, 3}));
  CHECK(probe_in_retained_band({-3, 2}));
  CHECK(probe_in_retained_band({13, 0}));  // 13 == -3
  CHECK_FALSE(probe_in_retained_band({4, 0}));
  CHECK_FALSE(probe_in_retained_band({0, 8}));
  CHECK_THROWS_AS(aliasing_energy_ratio(AliasOperator::flc_pool, {2, 1}), FrequencyRangeError);
}

TEST_CASE("low paths block every probe above the band; unshuffle keeps it all") {
  for (long ky = -7; ky <= 8; ++ky)
    for (long kx = -7; kx <= 8; ++kx) {
      const AliasProbe probe{ky, kx};
      if (probe_in_retained_band(probe)) continue;
      CAPTURE(ky);
      CAPTURE(kx);
      REQUIRE(aliasing_energy_ratio(AliasOperator::flc_pool, probe).ratio < 1e-10);
      REQUIRE(aliasing_energy_ratio(AliasOperator::fp_low_path, probe).ratio < 1e-10);
      REQUIRE(aliasing_energy_ratio(AliasOperator::pixel_unshuffle, probe).ratio > 0.99);
    }
}

TEST_CASE("fp_down leaks exactly its high-path share") {
  // The low path is silent above the band, so the output is alpha times the
  // unshuffled input, energy ratio alpha^2.
  const auto r = aliasing_energy_ratio(AliasOperator::fp_down, {6, 6}, 0.4);
  CHECK(r.ratio == doctest::Approx(0.16).epsilon(1e-10));
  CHECK(r.energy_in == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.fy == 0.375);
}

TEST_CASE("spectrum image of a single cosine") {
  SpatialTensor x({1, 2, 8, 8});
  for (std::size_t m = 0; m < 8; ++m)
    for (std::size_t n = 0; n < 8; ++n) x(0, 1, m, n) = std::cos(2 * std::numbers::pi * 2 * n / 8.0);
  const auto img = spectrum_image(x, 1);
  CHECK(img.rows == 8);
  CHECK(img.pixels[4 * 8 + 6] == doctest::Approx(1.0));
  CHECK(img.pixels[4 * 8 + 2] == doctest::Approx(1.0));
  CHECK(img.pixels[0] == doctest::Approx(0.0).epsilon(1e-12));
  const auto bytes = img.to_bytes();
  CHECK(bytes[4 * 8 + 6] == 255);
  CHECK(bytes[0] == 0);
  CHECK(spectrum_image(x, 0).pixels == std::vector<double>(64, 0.0));
  CHECK_THROWS_AS(spectrum_image(x, 2), IndexError);
}

TEST_CASE("alias operator names") {
  CHECK(std::string(to_string(AliasOperator::fp_low_path)) == "fp_low_path");
  CHECK(std::string(to_string(AliasOperator::pixel_unshuffle)) == "pixel_unshuffle");
}
