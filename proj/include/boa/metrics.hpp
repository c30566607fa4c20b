#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "boa/sampling.hpp"
#include "boa/tensor.hpp"

namespace boa {

inline constexpr double kPsnrCap = 100.0;

// 10 log10(peak^2 / mse) over all entries jointly; identical inputs give kPsnrCap.
double psnr(const SpatialTensor& x, const SpatialTensor& y, double peak = 1.0);

// Mean SSIM over every valid 11x11 Gaussian window (sigma 1.5, K1 = 0.01,
// K2 = 0.03, dynamic range 1), averaged over batch and channels.
double ssim(const SpatialTensor& x, const SpatialTensor& y);

struct QualityScores {
  double psnr = 0.0;
  double ssim = 0.0;
};

QualityScores quality(const SpatialTensor& x, const SpatialTensor& y);

// Operators whose downsampling path can be probed for aliasing.
enum class AliasOperator { pixel_unshuffle, flc_pool, fp_low_path, fp_down };

const char* to_string(AliasOperator op);

// Probe frequency given as integer bins on a rows x cols periodic grid;
// fy = ky / rows cycles per sample.
struct AliasProbe {
  long ky = 0;
  long kx = 0;
  std::size_t rows = 16;
  std::size_t cols = 16;

  double fy() const { return static_cast<double>(ky) / static_cast<double>(rows); }
  double fx() const { return static_cast<double>(kx) / static_cast<double>(cols); }
};

struct AliasReport {
  double fy = 0.0;
  double fx = 0.0;
  double energy_in = 0.0;
  double energy_out = 0.0;
  double ratio = 0.0;
};

// True when both signed frequencies of the probe lie in the band a halving
// low pass keeps on this grid.
bool probe_in_retained_band(const AliasProbe& probe);

// Pushes a unit-energy cosine cos(2 pi (fy m + fx n)) through the operator
// (periodic, no padding) and reports output/input energy. Throws
// FrequencyRangeError when the probe is inside the retained band.
AliasReport aliasing_energy_ratio(AliasOperator op, const AliasProbe& probe, double alpha = 0.3);

// Row-major grayscale raster in [0, 1].
struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;

  std::vector<std::uint8_t> to_bytes() const;
};

// log(1 + |centered dft2|) of one channel of batch 0, scaled to [0, 1].
GrayImage spectrum_image(const SpatialTensor& x, std::size_t channel);

}  // namespace boa
