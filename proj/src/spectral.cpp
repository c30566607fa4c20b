#include "boa/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace boa {

namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform_planes(std::vector<Complex>& buffer, const Shape& s, int sign) {
  if (buffer.empty()) return;
  const int dims[2] = {static_cast<int>(s.rows), static_cast<int>(s.cols)};
  const int howmany = static_cast<int>(s.batch * s.channels);
  const int dist = static_cast<int>(s.plane());
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_many_dft(2, dims, howmany, data, nullptr, 1, dist, data, nullptr, 1, dist,
                              sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

SpectralTensor roll(const SpectralTensor& x, bool to_center) {
  const Shape& s = x.shape();
  SpectralTensor out(s, to_center);
  const std::size_t sr = s.rows / 2;
  const std::size_t sc = s.cols / 2;
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c) {
      auto src = x.plane(b, c);
      auto dst = out.plane(b, c);
      for (std::size_t k = 0; k < s.rows; ++k) {
        const std::size_t kk = (k + sr) % s.rows;
        for (std::size_t l = 0; l < s.cols; ++l) {
          const std::size_t ll = (l + sc) % s.cols;
          if (to_center) {
            dst[kk * s.cols + ll] = src[k * s.cols + l];
          } else {
            dst[k * s.cols + l] = src[kk * s.cols + ll];
          }
        }
      }
    }
  return out;
}

// Maps a reflected index back into [0, n) with period 2(n - 1).
std::size_t reflect_index(long i, std::size_t n) {
  if (n == 1) return 0;
  const long period = 2 * (static_cast<long>(n) - 1);
  long j = ((i % period) + period) % period;
  if (j >= static_cast<long>(n)) j = period - j;
  return static_cast<std::size_t>(j);
}

}  // namespace

SpectralTensor dft2(const SpatialTensor& x) {
  const Shape& s = x.shape();
  std::vector<Complex> buffer(x.data().begin(), x.data().end());
  transform_planes(buffer, s, FFTW_FORWARD);
  const double scale = s.plane() ? 1.0 / static_cast<double>(s.plane()) : 1.0;
  for (auto& v : buffer) v *= scale;
  return {Tensor<Complex>(s, std::move(buffer)), false};
}

InverseTransform idft2_with_residual(const SpectralTensor& spectrum) {
  if (spectrum.centered()) throw ShapeError("idft2: spectrum must be uncentered");
  const Shape& s = spectrum.shape();
  std::vector<Complex> buffer(spectrum.data().begin(), spectrum.data().end());
  transform_planes(buffer, s, FFTW_BACKWARD);
  InverseTransform result{SpatialTensor(s)};
  auto out = result.real.data();
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    out[i] = buffer[i].real();
    result.imag_residual = std::max(result.imag_residual, std::abs(buffer[i].imag()));
    result.max_magnitude = std::max(result.max_magnitude, std::abs(buffer[i]));
  }
  return result;
}

SpatialTensor idft2(const SpectralTensor& spectrum, SymmetryCheck check) {
  InverseTransform r = idft2_with_residual(spectrum);
  if (check == SymmetryCheck::require && r.imag_residual > 1e-6 * r.max_magnitude) {
    throw AsymmetryError("idft2: imaginary residual " + std::to_string(r.imag_residual) +
                         " exceeds tolerance for magnitude " + std::to_string(r.max_magnitude));
  }
  return std::move(r.real);
}

SpectralTensor center(const SpectralTensor& spectrum) {
  if (spectrum.centered()) throw ShapeError("center: spectrum already centered");
  return roll(spectrum, true);
}

SpectralTensor uncenter(const SpectralTensor& spectrum) {
  if (!spectrum.centered()) throw ShapeError("uncenter: spectrum is not centered");
  return roll(spectrum, false);
}

template <typename T>
Tensor<T> apply_axis_maps(const Tensor<T>& x, const AxisMap& rows, const AxisMap& cols) {
  const Shape& s = x.shape();
  if (s.rows != rows.in_size || s.cols != cols.in_size) {
    throw ShapeError("axis map expects " + std::to_string(rows.in_size) + "x" +
                     std::to_string(cols.in_size) + " planes, got " + to_string(s));
  }
  const Shape os{s.batch, s.channels, rows.out_size, cols.out_size};
  Tensor<T> out(os);
  std::vector<T> tmp(s.rows * cols.out_size);
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c) {
      auto src = x.plane(b, c);
      auto dst = out.plane(b, c);
      std::fill(tmp.begin(), tmp.end(), T{});
      for (std::size_t m = 0; m < s.rows; ++m)
        for (const auto& t : cols.taps) tmp[m * os.cols + t.dst] += t.weight * src[m * s.cols + t.src];
      for (const auto& t : rows.taps)
        for (std::size_t n = 0; n < os.cols; ++n)
          dst[t.dst * os.cols + n] += t.weight * tmp[t.src * os.cols + n];
    }
  return out;
}

template <typename T>
Tensor<T> apply_axis_maps_adjoint(const Tensor<T>& x, const AxisMap& rows, const AxisMap& cols) {
  auto flip = [](const AxisMap& a) {
    AxisMap t{a.out_size, a.in_size, {}};
    t.taps.reserve(a.taps.size());
    for (const auto& tap : a.taps) t.taps.push_back({tap.dst, tap.src, tap.weight});
    return t;
  };
  return apply_axis_maps(x, flip(rows), flip(cols));
}

template Tensor<double> apply_axis_maps(const Tensor<double>&, const AxisMap&, const AxisMap&);
template Tensor<Complex> apply_axis_maps(const Tensor<Complex>&, const AxisMap&, const AxisMap&);
template Tensor<double> apply_axis_maps_adjoint(const Tensor<double>&, const AxisMap&,
                                                const AxisMap&);
template Tensor<Complex> apply_axis_maps_adjoint(const Tensor<Complex>&, const AxisMap&,
                                                 const AxisMap&);

AxisMap crop_axis(std::size_t in_size, std::size_t out_size) {
  if (out_size % 2 == 0 || out_size > in_size) {
    throw ShapeError("crop_low: crop size " + std::to_string(out_size) +
                     " must be odd and at most " + std::to_string(in_size));
  }
  AxisMap map{in_size, out_size, {}};
  const std::size_t first = in_size / 2 - out_size / 2;
  for (std::size_t i = 0; i < out_size; ++i) map.taps.push_back({first + i, i, 1.0});
  return map;
}

AxisMap embed_axis(std::size_t in_size, std::size_t out_size) {
  if (out_size < in_size) {
    throw ShapeError("embed_zero: target size " + std::to_string(out_size) +
                     " is smaller than " + std::to_string(in_size));
  }
  AxisMap map{in_size, out_size, {}};
  const long in_dc = static_cast<long>(in_size / 2);
  const long out_dc = static_cast<long>(out_size / 2);
  const bool split_nyquist = in_size % 2 == 0 && out_size > in_size;
  for (std::size_t i = 0; i < in_size; ++i) {
    const long freq = static_cast<long>(i) - in_dc;
    const auto dst = static_cast<std::size_t>(freq + out_dc);
    if (split_nyquist && i == 0) {
      map.taps.push_back({i, dst, 0.5});
      map.taps.push_back({i, static_cast<std::size_t>(-freq + out_dc), 0.5});
    } else {
      map.taps.push_back({i, dst, 1.0});
    }
  }
  return map;
}

SpectralTensor crop_low(const SpectralTensor& spectrum, std::size_t out_rows, std::size_t out_cols) {
  if (!spectrum.centered()) throw ShapeError("crop_low: spectrum must be centered");
  const Shape& s = spectrum.shape();
  return {apply_axis_maps<Complex>(spectrum, crop_axis(s.rows, out_rows), crop_axis(s.cols, out_cols)),
          true};
}

SpectralTensor embed_zero(const SpectralTensor& spectrum, std::size_t out_rows,
                          std::size_t out_cols) {
  if (!spectrum.centered()) throw ShapeError("embed_zero: spectrum must be centered");
  const Shape& s = spectrum.shape();
  return {apply_axis_maps<Complex>(spectrum, embed_axis(s.rows, out_rows),
                                   embed_axis(s.cols, out_cols)),
          true};
}

const char* to_string(PadMode mode) {
  switch (mode) {
    case PadMode::reflect: return "reflect";
    case PadMode::zero: return "zero";
    case PadMode::replicate: return "replicate";
  }
  return "?";
}

PadMode pad_mode_from_string(const std::string& name) {
  if (name == "reflect") return PadMode::reflect;
  if (name == "zero") return PadMode::zero;
  if (name == "replicate") return PadMode::replicate;
  throw ConfigError("unknown padding mode '" + name + "'");
}

std::size_t padded_extent(std::size_t n) {
  std::size_t t = (5 * n) / 2 + 1;
  if (t % 2 == 0) ++t;
  return t;
}

PadSpec PadSpec::for_input(std::size_t rows, std::size_t cols, PadMode mode) {
  PadSpec spec;
  spec.mode = mode;
  spec.rows = rows;
  spec.cols = cols;
  const std::size_t pr = padded_extent(rows) - rows;
  const std::size_t pc = padded_extent(cols) - cols;
  spec.top = pr / 2;
  spec.bottom = pr - spec.top;
  spec.left = pc / 2;
  spec.right = pc - spec.left;
  return spec;
}

PadSpec PadSpec::halved(std::size_t halved_rows, std::size_t halved_cols) const {
  if (rows % 2 != 0 || cols % 2 != 0) {
    throw ShapeError("PadSpec::halved: unpadded dims must be even");
  }
  PadSpec h;
  h.mode = mode;
  h.rows = rows / 2;
  h.cols = cols / 2;
  h.top = top / 2;
  h.left = left / 2;
  if (halved_rows < h.rows + h.top || halved_cols < h.cols + h.left) {
    throw ShapeError("PadSpec::halved: halved map is too small to unpad");
  }
  h.bottom = halved_rows - h.rows - h.top;
  h.right = halved_cols - h.cols - h.left;
  return h;
}

AxisMap pad_axis(std::size_t size, std::size_t before, std::size_t after, PadMode mode) {
  if (size == 0) throw ShapeError("pad_spatial: empty axis");
  AxisMap map{size, size + before + after, {}};
  for (std::size_t o = 0; o < map.out_size; ++o) {
    const long i = static_cast<long>(o) - static_cast<long>(before);
    const bool inside = i >= 0 && i < static_cast<long>(size);
    switch (mode) {
      case PadMode::zero:
        if (inside) map.taps.push_back({static_cast<std::size_t>(i), o, 1.0});
        break;
      case PadMode::replicate: {
        const long j = std::clamp(i, 0L, static_cast<long>(size) - 1);
        map.taps.push_back({static_cast<std::size_t>(j), o, 1.0});
        break;
      }
      case PadMode::reflect:
        map.taps.push_back({reflect_index(i, size), o, 1.0});
        break;
    }
  }
  return map;
}

AxisMap unpad_axis(std::size_t padded, std::size_t before, std::size_t after) {
  if (before + after > padded) throw ShapeError("unpad_spatial: padding exceeds extent");
  AxisMap map{padded, padded - before - after, {}};
  for (std::size_t o = 0; o < map.out_size; ++o) map.taps.push_back({o + before, o, 1.0});
  return map;
}

SpatialTensor pad_spatial(const SpatialTensor& x, const PadSpec& spec) {
  const Shape& s = x.shape();
  if (s.rows != spec.rows || s.cols != spec.cols) {
    throw ShapeError("pad_spatial: spec for " + std::to_string(spec.rows) + "x" +
                     std::to_string(spec.cols) + " applied to " + to_string(s));
  }
  return apply_axis_maps(x, pad_axis(s.rows, spec.top, spec.bottom, spec.mode),
                         pad_axis(s.cols, spec.left, spec.right, spec.mode));
}

SpatialTensor unpad_spatial(const SpatialTensor& x, const PadSpec& spec) {
  const Shape& s = x.shape();
  if (s.rows != spec.padded_rows() || s.cols != spec.padded_cols()) {
    throw ShapeError("unpad_spatial: spec expects " + std::to_string(spec.padded_rows()) + "x" +
                     std::to_string(spec.padded_cols()) + ", got " + to_string(s));
  }
  return apply_axis_maps(x, unpad_axis(s.rows, spec.top, spec.bottom),
                         unpad_axis(s.cols, spec.left, spec.right));
}

SpatialTensor circshift(const SpatialTensor& x, long dr, long dc) {
  const Shape& s = x.shape();
  SpatialTensor out(s);
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t m = 0; m < s.rows; ++m)
        for (std::size_t n = 0; n < s.cols; ++n)
          out(b, c, wrap(static_cast<long>(m) + dr, s.rows), wrap(static_cast<long>(n) + dc, s.cols)) =
              x(b, c, m, n);
  return out;
}

}  // namespace boa
