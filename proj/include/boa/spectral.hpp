#pragma once

#include <cstddef>
#include <vector>

#include "boa/tensor.hpp"

namespace boa {

// Forward transforms carry the 1/(M*N) factor, inverse transforms none:
//   X[k,l] = 1/(MN) sum x[m,n] exp(-2*pi*j*(km/M + ln/N))
//   x[m,n] =        sum X[k,l] exp(+2*pi*j*(km/M + ln/N))
SpectralTensor dft2(const SpatialTensor& x);

enum class SymmetryCheck { none, require };

struct InverseTransform {
  SpatialTensor real;
  double imag_residual = 0.0;  // max |imag| over all outputs
  double max_magnitude = 0.0;  // max |value| over all outputs
};

InverseTransform idft2_with_residual(const SpectralTensor& spectrum);

// Real part of the inverse transform. With SymmetryCheck::require an
// AsymmetryError is raised when the imaginary residual exceeds
// 1e-6 * max magnitude.
SpatialTensor idft2(const SpectralTensor& spectrum, SymmetryCheck check = SymmetryCheck::none);

// Cyclic shift moving zero frequency to (floor(K/2), floor(L/2)) and back.
SpectralTensor center(const SpectralTensor& spectrum);
SpectralTensor uncenter(const SpectralTensor& spectrum);

// Sparse separable index map along one axis: out[dst] += weight * in[src].
struct AxisMap {
  struct Tap {
    std::size_t src;
    std::size_t dst;
    double weight;
  };
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  std::vector<Tap> taps;
};

// Applies `rows` along M and `cols` along N of every plane.
template <typename T>
Tensor<T> apply_axis_maps(const Tensor<T>& x, const AxisMap& rows, const AxisMap& cols);
// Transposed application (out[src] += weight * in[dst]).
template <typename T>
Tensor<T> apply_axis_maps_adjoint(const Tensor<T>& x, const AxisMap& rows, const AxisMap& cols);

// Centered index maps used by crop_low and embed_zero. Embedding an even
// size into a larger one splits the Nyquist bin evenly between +/- K/2 so a
// real-origin spectrum stays conjugate symmetric.
AxisMap crop_axis(std::size_t in_size, std::size_t out_size);
AxisMap embed_axis(std::size_t in_size, std::size_t out_size);

// Central (odd) out_rows x out_cols block of a centered spectrum.
SpectralTensor crop_low(const SpectralTensor& spectrum, std::size_t out_rows, std::size_t out_cols);

// Places a centered spectrum in the middle of a zero spectrum.
SpectralTensor embed_zero(const SpectralTensor& spectrum, std::size_t out_rows,
                          std::size_t out_cols);

enum class PadMode { reflect, zero, replicate };

const char* to_string(PadMode mode);
PadMode pad_mode_from_string(const std::string& name);

// Border amounts for padding an M x N map to (floor(5M/2) + 1) x (floor(5N/2) + 1).
// A target that comes out even is grown by one so the padded size stays odd.
struct PadSpec {
  PadMode mode = PadMode::reflect;
  std::size_t rows = 0;  // unpadded size
  std::size_t cols = 0;
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;

  static PadSpec for_input(std::size_t rows, std::size_t cols, PadMode mode);

  std::size_t padded_rows() const { return rows + top + bottom; }
  std::size_t padded_cols() const { return cols + left + right; }

  // Spec for unpadding a spatially halved version of the padded map, sized
  // halved_rows x halved_cols, back to (rows / 2) x (cols / 2). Removes
  // floor(top / 2) leading rows and the rest from the trailing side.
  PadSpec halved(std::size_t halved_rows, std::size_t halved_cols) const;

  bool operator==(const PadSpec&) const = default;
};

std::size_t padded_extent(std::size_t n);

AxisMap pad_axis(std::size_t size, std::size_t before, std::size_t after, PadMode mode);
AxisMap unpad_axis(std::size_t padded, std::size_t before, std::size_t after);

SpatialTensor pad_spatial(const SpatialTensor& x, const PadSpec& spec);
SpatialTensor unpad_spatial(const SpatialTensor& x, const PadSpec& spec);

// Cyclic roll by (dr, dc): out[(m + dr) mod M, (n + dc) mod N] = x[m, n].
SpatialTensor circshift(const SpatialTensor& x, long dr, long dc);

}  // namespace boa
