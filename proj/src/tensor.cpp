#include "boa/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace boa {

std::string to_string(const Shape& s) {
  return "[" + std::to_string(s.batch) + ", " + std::to_string(s.channels) + ", " +
         std::to_string(s.rows) + ", " + std::to_string(s.cols) + "]";
}

namespace {

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (!(a == b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
  }
}

template <typename T, typename F>
Tensor<T> zip(const Tensor<T>& a, const Tensor<T>& b, const char* op, F f) {
  require_same_shape(a.shape(), b.shape(), op);
  Tensor<T> out(a.shape());
  auto o = out.data();
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = f(x[i], y[i]);
  return out;
}

template <typename T>
Tensor<T> scale(double s, const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  auto o = out.data();
  auto x = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = s * x[i];
  return out;
}

template <typename T>
Tensor<T> concat_impl(const Tensor<T>& x, std::size_t times) {
  if (times == 0) throw ShapeError("concat_channels: times must be >= 1");
  const Shape& s = x.shape();
  Tensor<T> out({s.batch, s.channels * times, s.rows, s.cols});
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t t = 0; t < times; ++t) {
      for (std::size_t c = 0; c < s.channels; ++c) {
        auto src = x.plane(b, c);
        std::copy(src.begin(), src.end(), out.plane(b, t * s.channels + c).begin());
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> group_average_impl(const Tensor<T>& x, std::size_t group) {
  const Shape& s = x.shape();
  if (group == 0 || s.channels % group != 0) {
    throw ShapeError("group_average: channel count " + std::to_string(s.channels) +
                     " is not divisible by group " + std::to_string(group));
  }
  Tensor<T> out(s);
  const double inv = 1.0 / static_cast<double>(group);
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t g = 0; g < s.channels / group; ++g) {
      for (std::size_t p = 0; p < s.plane(); ++p) {
        T acc{};
        for (std::size_t k = 0; k < group; ++k) acc += x.plane(b, g * group + k)[p];
        acc *= inv;
        for (std::size_t k = 0; k < group; ++k) out.plane(b, g * group + k)[p] = acc;
      }
    }
  }
  return out;
}

}  // namespace

SpatialTensor operator+(const SpatialTensor& a, const SpatialTensor& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}
SpatialTensor operator-(const SpatialTensor& a, const SpatialTensor& b) {
  return zip(a, b, "subtract", [](double x, double y) { return x - y; });
}
SpatialTensor operator*(double s, const SpatialTensor& a) { return scale(s, a); }

SpectralTensor operator+(const SpectralTensor& a, const SpectralTensor& b) {
  if (a.centered() != b.centered()) throw ShapeError("add: centering mismatch");
  return {zip<Complex>(a, b, "add", [](Complex x, Complex y) { return x + y; }), a.centered()};
}
SpectralTensor operator-(const SpectralTensor& a, const SpectralTensor& b) {
  if (a.centered() != b.centered()) throw ShapeError("subtract: centering mismatch");
  return {zip<Complex>(a, b, "subtract", [](Complex x, Complex y) { return x - y; }),
          a.centered()};
}
SpectralTensor operator*(double s, const SpectralTensor& a) {
  return {scale<Complex>(s, a), a.centered()};
}

SpatialTensor mix(const SpatialTensor& a, const SpatialTensor& b, double w) {
  return zip(a, b, "mix", [w](double x, double y) { return (1.0 - w) * x + w * y; });
}

double inner(const SpatialTensor& a, const SpatialTensor& b) {
  require_same_shape(a.shape(), b.shape(), "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  return acc;
}

double inner(const Tensor<Complex>& a, const Tensor<Complex>& b) {
  require_same_shape(a.shape(), b.shape(), "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a.data()[i].real() * b.data()[i].real() + a.data()[i].imag() * b.data()[i].imag();
  }
  return acc;
}

double sum(const SpatialTensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  return acc;
}

double mean(const SpatialTensor& x) {
  if (x.size() == 0) return 0.0;
  return sum(x) / static_cast<double>(x.size());
}

double energy(const SpatialTensor& x) { return inner(x, x); }

double max_abs_diff(const SpatialTensor& a, const SpatialTensor& b) {
  require_same_shape(a.shape(), b.shape(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double max_abs_diff(const Tensor<Complex>& a, const Tensor<Complex>& b) {
  require_same_shape(a.shape(), b.shape(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

bool all_finite(const SpatialTensor& x) {
  return std::all_of(x.data().begin(), x.data().end(), [](double v) { return std::isfinite(v); });
}

void require_finite(const SpatialTensor& x, const char* where) {
  if (!all_finite(x)) throw NonFiniteError(std::string(where) + ": non-finite values");
}

SpatialTensor pixel_unshuffle(const SpatialTensor& x, std::size_t r) {
  const Shape& s = x.shape();
  if (r == 0 || s.rows % r != 0 || s.cols % r != 0) {
    throw ShapeError("pixel_unshuffle: spatial dims " + std::to_string(s.rows) + "x" +
                     std::to_string(s.cols) + " are not divisible by " + std::to_string(r));
  }
  const std::size_t mo = s.rows / r;
  const std::size_t no = s.cols / r;
  SpatialTensor out({s.batch, s.channels * r * r, mo, no});
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
          for (std::size_t m = 0; m < mo; ++m)
            for (std::size_t n = 0; n < no; ++n)
              out(b, c * r * r + i * r + j, m, n) = x(b, c, m * r + i, n * r + j);
  return out;
}

SpatialTensor pixel_shuffle(const SpatialTensor& x, std::size_t r) {
  const Shape& s = x.shape();
  if (r == 0 || s.channels % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: channel count " + std::to_string(s.channels) +
                     " is not divisible by " + std::to_string(r * r));
  }
  const std::size_t co = s.channels / (r * r);
  SpatialTensor out({s.batch, co, s.rows * r, s.cols * r});
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < co; ++c)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
          for (std::size_t m = 0; m < s.rows; ++m)
            for (std::size_t n = 0; n < s.cols; ++n)
              out(b, c, m * r + i, n * r + j) = x(b, c * r * r + i * r + j, m, n);
  return out;
}

SpatialTensor concat_channels(const SpatialTensor& x, std::size_t times) {
  return concat_impl(x, times);
}

SpectralTensor concat_channels(const SpectralTensor& x, std::size_t times) {
  return {concat_impl<Complex>(x, times), x.centered()};
}

SpatialTensor sum_channel_blocks(const SpatialTensor& x, std::size_t times) {
  const Shape& s = x.shape();
  if (times == 0 || s.channels % times != 0) {
    throw ShapeError("sum_channel_blocks: channel count not divisible by block count");
  }
  const std::size_t co = s.channels / times;
  SpatialTensor out({s.batch, co, s.rows, s.cols});
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t t = 0; t < times; ++t)
      for (std::size_t c = 0; c < co; ++c) {
        auto src = x.plane(b, t * co + c);
        auto dst = out.plane(b, c);
        for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += src[p];
      }
  return out;
}

SpatialTensor repeat_channels(const SpatialTensor& x, std::size_t times) {
  if (times == 0) throw ShapeError("repeat_channels: times must be >= 1");
  const Shape& s = x.shape();
  SpatialTensor out({s.batch, s.channels * times, s.rows, s.cols});
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c) {
      auto src = x.plane(b, c);
      for (std::size_t k = 0; k < times; ++k) {
        auto dst = out.plane(b, c * times + k);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    }
  return out;
}

SpatialTensor sum_channel_groups(const SpatialTensor& x, std::size_t group) {
  const Shape& s = x.shape();
  if (group == 0 || s.channels % group != 0) {
    throw ShapeError("sum_channel_groups: channel count not divisible by group");
  }
  SpatialTensor out({s.batch, s.channels / group, s.rows, s.cols});
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c) {
      auto src = x.plane(b, c);
      auto dst = out.plane(b, c / group);
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += src[p];
    }
  return out;
}

SpatialTensor group_average(const SpatialTensor& x, std::size_t group) {
  return group_average_impl(x, group);
}

SpectralTensor group_average(const SpectralTensor& x, std::size_t group) {
  return {group_average_impl<Complex>(x, group), x.centered()};
}

SpectralTensor first_of_each_group(const SpectralTensor& x, std::size_t group) {
  const Shape& s = x.shape();
  if (group == 0 || s.channels % group != 0) {
    throw ShapeError("first_of_each_group: channel count " + std::to_string(s.channels) +
                     " is not divisible by group " + std::to_string(group));
  }
  SpectralTensor out({s.batch, s.channels / group, s.rows, s.cols}, x.centered());
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t g = 0; g < s.channels / group; ++g) {
      auto src = x.plane(b, g * group);
      std::copy(src.begin(), src.end(), out.plane(b, g).begin());
    }
  return out;
}

SpectralTensor scatter_to_group_heads(const SpectralTensor& x, std::size_t group) {
  const Shape& s = x.shape();
  if (group == 0) throw ShapeError("scatter_to_group_heads: group must be >= 1");
  SpectralTensor out({s.batch, s.channels * group, s.rows, s.cols}, x.centered());
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t g = 0; g < s.channels; ++g) {
      auto src = x.plane(b, g);
      std::copy(src.begin(), src.end(), out.plane(b, g * group).begin());
    }
  return out;
}

SpatialTensor transpose_spatial(const SpatialTensor& x) {
  const Shape& s = x.shape();
  SpatialTensor out({s.batch, s.channels, s.cols, s.rows});
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t m = 0; m < s.rows; ++m)
        for (std::size_t n = 0; n < s.cols; ++n) out(b, c, n, m) = x(b, c, m, n);
  return out;
}

}  // namespace boa
