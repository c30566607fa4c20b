#pragma once

// Shared oracles and generators for the test binaries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "boa/sampling.hpp"
#include "boa/tensor.hpp"

namespace boa::test {

inline SpatialTensor random_tensor(const Shape& s, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  SpatialTensor t(s);
  for (double& v : t.data()) v = u(engine);
  return t;
}

inline SpectralTensor random_spectrum(const Shape& s, std::uint64_t seed, bool centered = false) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralTensor t(s, centered);
  for (auto& v : t.data()) v = Complex(g(engine), g(engine));
  return t;
}

// Direct double sum with the forward 1/(MN) scale.
inline SpectralTensor naive_dft2(const SpatialTensor& x) {
  const Shape& s = x.shape();
  SpectralTensor out(s, false);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t k = 0; k < s.rows; ++k)
        for (std::size_t l = 0; l < s.cols; ++l) {
          Complex acc = 0.0;
          for (std::size_t m = 0; m < s.rows; ++m)
            for (std::size_t n = 0; n < s.cols; ++n) {
              const double ang = -two_pi * (static_cast<double>(k * m) / static_cast<double>(s.rows) +
                                            static_cast<double>(l * n) / static_cast<double>(s.cols));
              acc += x(b, c, m, n) * Complex(std::cos(ang), std::sin(ang));
            }
          out(b, c, k, l) = acc / static_cast<double>(s.plane());
        }
  return out;
}

// Real signal whose spectrum is confined to |ky| <= hy, |kx| <= hx.
inline SpatialTensor bandlimited(const Shape& s, std::size_t hy, std::size_t hx, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpatialTensor x(s);
  const double two_pi = 2.0 * std::numbers::pi;
  const long ly = static_cast<long>(hy);
  const long lx = static_cast<long>(hx);
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (long ky = -ly; ky <= ly; ++ky)
        for (long kx = -lx; kx <= lx; ++kx) {
          const double a = g(engine) * 0.1;
          const double p = g(engine) * 0.1;
          for (std::size_t m = 0; m < s.rows; ++m)
            for (std::size_t n = 0; n < s.cols; ++n) {
              const double ang = two_pi * (static_cast<double>(ky) * static_cast<double>(m) / static_cast<double>(s.rows) +
                                           static_cast<double>(kx) * static_cast<double>(n) / static_cast<double>(s.cols));
              x(b, c, m, n) += a * std::cos(ang) + p * std::sin(ang);
            }
        }
  return x;
}

inline SamplerConfig periodic_config(double alpha = 0.3, double beta = 0.3) {
  SamplerConfig cfg;
  cfg.periodic = true;
  cfg.coefficients.alpha = {alpha, alpha, alpha};
  cfg.coefficients.beta = {beta, beta, beta};
  return cfg;
}

inline SamplerConfig padded_config(double alpha = 0.3, double beta = 0.3) {
  SamplerConfig cfg = periodic_config(alpha, beta);
  cfg.periodic = false;
  return cfg;
}

inline SamplerConfig identity_config() {
  SamplerConfig cfg;
  cfg.down = {DownKind::pixel_unshuffle};
  cfg.up = {UpKind::pixel_shuffle};
  return cfg;
}

}  // namespace boa::test
