#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boa/errors.hpp"

namespace boa {

using Complex = std::complex<double>;

// Dimensions of a dense [B, C, M, N] feature map.
struct Shape {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return batch * channels * rows * cols; }
  std::size_t plane() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

// Dense row-major 4-D tensor with value semantics. Element (b, c, m, n) lives
// at ((b * C + c) * M + m) * N + n.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{})
      : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator()(std::size_t b, std::size_t c, std::size_t m, std::size_t n) {
    return data_[index(b, c, m, n)];
  }
  const T& operator()(std::size_t b, std::size_t c, std::size_t m, std::size_t n) const {
    return data_[index(b, c, m, n)];
  }

  // One M x N slice.
  std::span<T> plane(std::size_t b, std::size_t c) {
    return std::span<T>(data_).subspan((b * shape_.channels + c) * shape_.plane(), shape_.plane());
  }
  std::span<const T> plane(std::size_t b, std::size_t c) const {
    return std::span<const T>(data_).subspan((b * shape_.channels + c) * shape_.plane(),
                                             shape_.plane());
  }

  std::size_t index(std::size_t b, std::size_t c, std::size_t m, std::size_t n) const {
    return ((b * shape_.channels + c) * shape_.rows + m) * shape_.cols + n;
  }

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_{};
  std::vector<T> data_;
};

using SpatialTensor = Tensor<double>;

// Complex spectrum. `centered` records whether zero frequency sits at
// (floor(K/2), floor(L/2)) or at (0, 0).
class SpectralTensor : public Tensor<Complex> {
 public:
  SpectralTensor() = default;
  explicit SpectralTensor(Shape shape, bool centered = false)
      : Tensor<Complex>(shape), centered_(centered) {}
  SpectralTensor(Tensor<Complex> values, bool centered)
      : Tensor<Complex>(std::move(values)), centered_(centered) {}

  bool centered() const { return centered_; }

  bool operator==(const SpectralTensor&) const = default;

 private:
  bool centered_ = false;
};

// Elementwise arithmetic. Shapes must match exactly.
SpatialTensor operator+(const SpatialTensor& a, const SpatialTensor& b);
SpatialTensor operator-(const SpatialTensor& a, const SpatialTensor& b);
SpatialTensor operator*(double s, const SpatialTensor& a);
SpectralTensor operator+(const SpectralTensor& a, const SpectralTensor& b);
SpectralTensor operator-(const SpectralTensor& a, const SpectralTensor& b);
SpectralTensor operator*(double s, const SpectralTensor& a);

// (1 - w) * a + w * b
SpatialTensor mix(const SpatialTensor& a, const SpatialTensor& b, double w);

// Real inner products; complex tensors count as pairs of real tensors.
double inner(const SpatialTensor& a, const SpatialTensor& b);
double inner(const Tensor<Complex>& a, const Tensor<Complex>& b);

double sum(const SpatialTensor& x);
double mean(const SpatialTensor& x);
double energy(const SpatialTensor& x);
double max_abs_diff(const SpatialTensor& a, const SpatialTensor& b);
double max_abs_diff(const Tensor<Complex>& a, const Tensor<Complex>& b);
bool all_finite(const SpatialTensor& x);
void require_finite(const SpatialTensor& x, const char* where);

// Channel <-> space rearrangements. Output channel c * r^2 + i * r + j of
// pixel_unshuffle holds input pixel (m * r + i, n * r + j) of channel c.
SpatialTensor pixel_unshuffle(const SpatialTensor& x, std::size_t r);
SpatialTensor pixel_shuffle(const SpatialTensor& x, std::size_t r);

// Stacks `times` copies of x along the channel axis.
SpatialTensor concat_channels(const SpatialTensor& x, std::size_t times);
SpectralTensor concat_channels(const SpectralTensor& x, std::size_t times);

// Sum of the `times` consecutive channel blocks; adjoint of concat_channels.
SpatialTensor sum_channel_blocks(const SpatialTensor& x, std::size_t times);

// Interleaved copies: output channel c * times + k is input channel c, so each
// consecutive group of `times` channels holds one input channel.
SpatialTensor repeat_channels(const SpatialTensor& x, std::size_t times);

// Sum over each consecutive channel group; adjoint of repeat_channels.
SpatialTensor sum_channel_groups(const SpatialTensor& x, std::size_t group);

// Replaces every channel of each consecutive group by the group mean.
SpatialTensor group_average(const SpatialTensor& x, std::size_t group);
SpectralTensor group_average(const SpectralTensor& x, std::size_t group);

// Keeps channel g * group for every group g.
SpectralTensor first_of_each_group(const SpectralTensor& x, std::size_t group);
// Adjoint of first_of_each_group: places channel g at g * group, zeros elsewhere.
SpectralTensor scatter_to_group_heads(const SpectralTensor& x, std::size_t group);

// (B, C, M, N) -> (B, C, N, M)
SpatialTensor transpose_spatial(const SpatialTensor& x);

}  // namespace boa
