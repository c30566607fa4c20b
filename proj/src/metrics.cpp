#include "boa/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "boa/spectral.hpp"

namespace boa {

double psnr(const SpatialTensor& x, const SpatialTensor& y, double peak) {
  if (!(x.shape() == y.shape())) {
    throw ShapeError("psnr: shape mismatch " + to_string(x.shape()) + " vs " + to_string(y.shape()));
  }
  if (x.size() == 0) throw ShapeError("psnr: empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.data()[i] - y.data()[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(x.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> w{};
  double total = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(kWindow / 2);
    w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable 'valid' filtering of one plane.
std::vector<double> filter_valid(std::span<const double> plane, std::size_t rows, std::size_t cols,
                                 const std::array<double, kWindow>& w) {
  const std::size_t orows = rows - kWindow + 1;
  const std::size_t ocols = cols - kWindow + 1;
  std::vector<double> tmp(rows * ocols, 0.0);
  for (std::size_t m = 0; m < rows; ++m)
    for (std::size_t n = 0; n < ocols; ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += w[k] * plane[m * cols + n + k];
      tmp[m * ocols + n] = acc;
    }
  std::vector<double> out(orows * ocols, 0.0);
  for (std::size_t m = 0; m < orows; ++m)
    for (std::size_t n = 0; n < ocols; ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) acc += w[k] * tmp[(m + k) * ocols + n];
      out[m * ocols + n] = acc;
    }
  return out;
}

}  // namespace

double ssim(const SpatialTensor& x, const SpatialTensor& y) {
  const Shape& s = x.shape();
  if (!(s == y.shape())) {
    throw ShapeError("ssim: shape mismatch " + to_string(s) + " vs " + to_string(y.shape()));
  }
  if (s.rows < kWindow || s.cols < kWindow) {
    throw ShapeError("ssim: spatial dims must be at least 11x11, got " + to_string(s));
  }
  if (s.batch == 0 || s.channels == 0) throw ShapeError("ssim: empty tensors");
  const auto w = gaussian_taps();
  const std::size_t n = s.plane();
  std::vector<double> xx(n), yy(n), xy(n);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c) {
      auto px = x.plane(b, c);
      auto py = y.plane(b, c);
      for (std::size_t i = 0; i < n; ++i) {
        xx[i] = px[i] * px[i];
        yy[i] = py[i] * py[i];
        xy[i] = px[i] * py[i];
      }
      const auto mx = filter_valid(px, s.rows, s.cols, w);
      const auto my = filter_valid(py, s.rows, s.cols, w);
      const auto exx = filter_valid(xx, s.rows, s.cols, w);
      const auto eyy = filter_valid(yy, s.rows, s.cols, w);
      const auto exy = filter_valid(xy, s.rows, s.cols, w);
      for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = exx[i] - mx[i] * mx[i];
        const double vy = eyy[i] - my[i] * my[i];
        const double cxy = exy[i] - mx[i] * my[i];
        const double num = (2.0 * mx[i] * my[i] + kC1) * (2.0 * cxy + kC2);
        const double den = (mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2);
        total += num / den;
      }
      count += mx.size();
    }
  return total / static_cast<double>(count);
}

QualityScores quality(const SpatialTensor& x, const SpatialTensor& y) {
  return {psnr(x, y), ssim(x, y)};
}

const char* to_string(AliasOperator op) {
  switch (op) {
    case AliasOperator::pixel_unshuffle: return "pixel_unshuffle";
    case AliasOperator::flc_pool: return "flc_pool";
    case AliasOperator::fp_low_path: return "fp_low_path";
    case AliasOperator::fp_down: return "fp_down";
  }
  return "?";
}

namespace {

long signed_bin(long k, std::size_t n) {
  const long m = static_cast<long>(n);
  long s = ((k % m) + m) % m;
  if (s >= (m + 1) / 2) s -= m;
  return s;
}

}  // namespace

bool probe_in_retained_band(const AliasProbe& probe) {
  const auto hr = static_cast<long>(LowBand::for_extent(probe.rows).half_width());
  const auto hc = static_cast<long>(LowBand::for_extent(probe.cols).half_width());
  return std::abs(signed_bin(probe.ky, probe.rows)) <= hr &&
         std::abs(signed_bin(probe.kx, probe.cols)) <= hc;
}

AliasReport aliasing_energy_ratio(AliasOperator op, const AliasProbe& probe, double alpha) {
  if (probe.rows == 0 || probe.cols == 0 || probe.rows % 2 != 0 || probe.cols % 2 != 0) {
    throw ShapeError("aliasing probe grid must have even nonzero dims");
  }
  if (probe_in_retained_band(probe)) {
    throw FrequencyRangeError("probe (" + std::to_string(probe.fy()) + ", " +
                              std::to_string(probe.fx()) +
                              ") cycles/sample lies inside the retained low band");
  }
  SpatialTensor x({1, 1, probe.rows, probe.cols});
  for (std::size_t m = 0; m < probe.rows; ++m)
    for (std::size_t n = 0; n < probe.cols; ++n) {
      x(0, 0, m, n) = std::cos(2.0 * std::numbers::pi *
                               (probe.fy() * static_cast<double>(m) + probe.fx() * static_cast<double>(n)));
    }
  x = (1.0 / std::sqrt(energy(x))) * x;

  SamplerConfig cfg;
  cfg.periodic = true;
  cfg.coefficients.alpha = {alpha};
  SpatialTensor y;
  switch (op) {
    case AliasOperator::pixel_unshuffle: y = pixel_unshuffle(x, 2); break;
    case AliasOperator::flc_pool: y = flc_pool(x, cfg); break;
    case AliasOperator::fp_low_path: y = fp_down_branches(x, cfg).low; break;
    case AliasOperator::fp_down: y = fp_down(x, 0, cfg); break;
  }
  AliasReport r;
  r.fy = probe.fy();
  r.fx = probe.fx();
  r.energy_in = energy(x);
  r.energy_out = energy(y);
  r.ratio = r.energy_in > 0.0 ? r.energy_out / r.energy_in : 0.0;
  return r;
}

std::vector<std::uint8_t> GrayImage::to_bytes() const {
  std::vector<std::uint8_t> out(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(pixels[i], 0.0, 1.0) * 255.0));
  }
  return out;
}

GrayImage spectrum_image(const SpatialTensor& x, std::size_t channel) {
  const Shape& s = x.shape();
  if (s.batch == 0 || channel >= s.channels) {
    throw IndexError("spectrum_image: channel " + std::to_string(channel) + " out of range for " +
                     to_string(s));
  }
  SpatialTensor one({1, 1, s.rows, s.cols});
  auto src = x.plane(0, channel);
  std::copy(src.begin(), src.end(), one.data().begin());
  const SpectralTensor spectrum = center(dft2(one));
  GrayImage img{s.rows, s.cols, std::vector<double>(s.plane())};
  double peak = 0.0;
  for (std::size_t i = 0; i < s.plane(); ++i) {
    img.pixels[i] = std::log1p(std::abs(spectrum.data()[i]));
    peak = std::max(peak, img.pixels[i]);
  }
  if (peak > 0.0) {
    for (double& v : img.pixels) v /= peak;
  }
  return img;
}

}  // namespace boa
