#include <doctest.h>

#include "boa/spectral.hpp"
#include "support.hpp"

using namespace boa;

TEST_CASE("dft2 agrees with the direct double sum") {
  for (const Shape& s : {Shape{1, 1, 4, 4}, Shape{2, 3, 5, 7}, Shape{1, 2, 8, 6}, Shape{1, 1, 21, 21},
                         Shape{1, 1, 1, 9}}) {
    const auto x = test::random_tensor(s, s.rows * 31 + s.cols, -1.0, 1.0);
    CHECK(max_abs_diff(dft2(x), test::naive_dft2(x)) < 1e-12);
  }
}

TEST_CASE("dft2 of a constant is a DC spike carrying the mean") {
  SpatialTensor x({1, 1, 6, 4}, 2.5);
  const auto X = dft2(x);
  CHECK(std::abs(X(0, 0, 0, 0) - Complex(2.5, 0.0)) < 1e-15);
  double rest = 0.0;
  for (std::size_t i = 1; i < X.size(); ++i) rest = std::max(rest, std::abs(X.data()[i]));
  CHECK(rest < 1e-15);
}

TEST_CASE("idft2 inverts dft2") {
  for (const Shape& s : {Shape{4, 4, 32, 32}, Shape{1, 2, 9, 6}, Shape{2, 1, 21, 21}}) {
    const auto x = test::random_tensor(s, s.size());
    const auto inv = idft2_with_residual(dft2(x));
    CHECK(max_abs_diff(inv.real, x) < 1e-12);
    CHECK(inv.imag_residual < 1e-12);
    CHECK(max_abs_diff(idft2(dft2(x), SymmetryCheck::require), x) < 1e-12);
  }
}

TEST_CASE("idft2 rejects asymmetric spectra when symmetry is required") {
  SpectralTensor X({1, 1, 4, 4});
  X(0, 0, 0, 1) = Complex(1.0, 0.0);
  CHECK(idft2_with_residual(X).imag_residual > 0.5);
  CHECK_THROWS_AS(idft2(X, SymmetryCheck::require), AsymmetryError);
  CHECK_NOTHROW(idft2(X));
  CHECK_THROWS_AS(idft2(center(X)), ShapeError);
}

TEST_CASE("center moves DC to floor(K/2) and uncenter undoes it") {
  for (const auto& [k, l] : {std::pair{4, 6}, std::pair{5, 7}, std::pair{1, 2}}) {
    SpectralTensor X(Shape{1, 1, static_cast<std::size_t>(k), static_cast<std::size_t>(l)});
    X(0, 0, 0, 0) = 1.0;
    const auto C = center(X);
    CHECK(C.centered());
    CHECK(C(0, 0, k / 2, l / 2) == Complex(1.0, 0.0));
    const auto R = test::random_spectrum(X.shape(), 11);
    CHECK(uncenter(center(R)) == R);
    CHECK_THROWS_AS(center(C), ShapeError);
    CHECK_THROWS_AS(uncenter(R), ShapeError);
  }
}

TEST_CASE("centered frequency of bin (i, j) is i - floor(K/2)") {
  const std::size_t K = 7, L = 6;
  SpatialTensor x({1, 1, K, L});
  const int ky = 2, kx = -1;
  for (std::size_t m = 0; m < K; ++m)
    for (std::size_t n = 0; n < L; ++n)
      x(0, 0, m, n) = std::cos(2 * std::numbers::pi * (ky * double(m) / K + kx * double(n) / L));
  const auto C = center(dft2(x));
  CHECK(std::abs(C(0, 0, K / 2 + ky, L / 2 + kx) - Complex(0.5, 0)) < 1e-12);
  CHECK(std::abs(C(0, 0, K / 2 - ky, L / 2 - kx) - Complex(0.5, 0)) < 1e-12);
}

TEST_CASE("crop_low keeps the central block") {
  const auto X = center(test::random_spectrum({1, 2, 9, 8}, 12));
  const auto c = crop_low(X, 5, 3);
  CHECK(c.shape() == Shape{1, 2, 5, 3});
  CHECK(c.centered());
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(c(0, 1, i, j) == X(0, 1, 4 - 2 + i, 4 - 1 + j));
  CHECK_THROWS_AS(crop_low(X, 4, 3), ShapeError);
  CHECK_THROWS_AS(crop_low(X, 11, 3), ShapeError);
  CHECK_THROWS_AS(crop_low(uncenter(X), 5, 3), ShapeError);
}

TEST_CASE("embed then crop back is the identity for odd sizes") {
  const auto X = center(test::random_spectrum({2, 1, 5, 7}, 13));
  for (const auto& [r, c] : {std::pair{9, 11}, std::pair{6, 8}, std::pair{5, 7}}) {
    const auto E = embed_zero(X, r, c);
    CHECK(E.shape() == Shape{2, 1, std::size_t(r), std::size_t(c)});
    CHECK(max_abs_diff(crop_low(E, 5, 7), X) < 1e-15);
  }
}

TEST_CASE("embedding an even spectrum splits the Nyquist bin and keeps real signals real") {
  const auto x = test::random_tensor({1, 1, 6, 4}, 14);
  const auto X = center(dft2(x));
  const auto E = embed_zero(X, 11, 9);
  const auto inv = idft2_with_residual(uncenter(E));
  CHECK(inv.imag_residual < 1e-12);
  // Row -3 of the 6-row spectrum lands half at -3 and half at +3.
  CHECK(std::abs(E(0, 0, 5 - 3, 4) - 0.5 * X(0, 0, 0, 2)) < 1e-15);
  CHECK(std::abs(E(0, 0, 5 + 3, 4) - 0.5 * X(0, 0, 0, 2)) < 1e-15);
  // Sinc interpolation: the even samples reproduce the original.
  SpatialTensor up = idft2(uncenter(embed_zero(X, 12, 8)));
  for (std::size_t m = 0; m < 6; ++m)
    for (std::size_t n = 0; n < 4; ++n) CHECK(up(0, 0, 2 * m, 2 * n) == doctest::Approx(x(0, 0, m, n)).epsilon(1e-12));
}

TEST_CASE("padded extents stay odd") {
  CHECK(padded_extent(8) == 21);
  CHECK(padded_extent(16) == 41);
  CHECK(padded_extent(4) == 11);
  CHECK(padded_extent(6) == 17);   // floor(15) + 1 = 16, grown to 17
  CHECK(padded_extent(10) == 27);  // 26 -> 27
  CHECK(padded_extent(2) == 7);    // 6 -> 7
  for (std::size_t n = 1; n < 200; ++n) {
    REQUIRE(padded_extent(n) % 2 == 1);
    REQUIRE(padded_extent(n) >= (5 * n) / 2 + 1);
  }
  const auto spec = PadSpec::for_input(8, 6, PadMode::reflect);
  CHECK(spec.top == 6);
  CHECK(spec.bottom == 7);
  CHECK(spec.left == 5);
  CHECK(spec.right == 6);
  CHECK(spec.padded_rows() == 21);
  CHECK(spec.padded_cols() == 17);
  const auto h = spec.halved(11, 9);
  CHECK(h.rows == 4);
  CHECK(h.top == 3);
  CHECK(h.bottom == 4);
  CHECK(h.left == 2);
  CHECK(h.right == 4);
}

namespace {

// Mirror index without edge repetition, period 2(n - 1).
long reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  long r = ((i % period) + period) % period;
  return r < n ? r : period - r;
}

}  // namespace

TEST_CASE("pad_spatial matches the index-rule oracle") {
  const auto x = test::random_tensor({1, 2, 4, 3}, 15);
  for (PadMode mode : {PadMode::reflect, PadMode::zero, PadMode::replicate}) {
    const auto spec = PadSpec::for_input(4, 3, mode);
    const auto p = pad_spatial(x, spec);
    CHECK(p.shape() == Shape{1, 2, spec.padded_rows(), spec.padded_cols()});
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t o = 0; o < spec.padded_rows(); ++o)
        for (std::size_t q = 0; q < spec.padded_cols(); ++q) {
          const long i = long(o) - long(spec.top);
          const long j = long(q) - long(spec.left);
          double expect = 0.0;
          if (mode == PadMode::reflect) {
            expect = x(0, c, reflect_index(i, 4), reflect_index(j, 3));
          } else if (mode == PadMode::replicate) {
            expect = x(0, c, std::clamp(i, 0L, 3L), std::clamp(j, 0L, 2L));
          } else if (i >= 0 && i < 4 && j >= 0 && j < 3) {
            expect = x(0, c, i, j);
          }
          REQUIRE(p(0, c, o, q) == expect);
        }
    CHECK(unpad_spatial(p, spec) == x);
  }
  CHECK_THROWS_AS(unpad_spatial(x, PadSpec::for_input(4, 3, PadMode::zero)), ShapeError);
}

TEST_CASE("pad mode names round-trip") {
  for (PadMode m : {PadMode::reflect, PadMode::zero, PadMode::replicate}) {
    CHECK(pad_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(pad_mode_from_string("wrap"), ConfigError);
}

TEST_CASE("axis-map adjoint satisfies the dot-product identity") {
  const AxisMap rows = pad_axis(5, 7, 6, PadMode::reflect);
  const AxisMap cols = embed_axis(4, 9);
  const auto x = test::random_tensor({1, 1, 5, 4}, 16);
  const auto y = test::random_tensor({1, 1, rows.out_size, cols.out_size}, 17);
  CHECK(inner(apply_axis_maps(x, rows, cols), y) ==
        doctest::Approx(inner(x, apply_axis_maps_adjoint(y, rows, cols))).epsilon(1e-13));
}

TEST_CASE("circshift rolls cyclically") {
  const auto x = test::random_tensor({1, 1, 3, 4}, 18);
  const auto y = circshift(x, 1, -1);
  CHECK(y(0, 0, 1, 3) == x(0, 0, 0, 0));
  CHECK(y(0, 0, 0, 0) == x(0, 0, 2, 1));
  CHECK(circshift(y, -1, 1) == x);
}

TEST_CASE("a cyclic shift multiplies the spectrum by a phase ramp") {
  const auto x = test::random_tensor({1, 1, 6, 5}, 19);
  const auto X = dft2(x);
  const auto Y = dft2(circshift(x, 2, 1));
  for (std::size_t k = 0; k < 6; ++k)
    for (std::size_t l = 0; l < 5; ++l) {
      const double ang = -2 * std::numbers::pi * (2.0 * k / 6 + 1.0 * l / 5);
      CHECK(std::abs(Y(0, 0, k, l) - X(0, 0, k, l) * Complex(std::cos(ang), std::sin(ang))) < 1e-13);
    }
}
