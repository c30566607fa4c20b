#include "boa/cli/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include <png.h>

#include "boa/errors.hpp"

namespace boa::cli {

Image read_png(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open image: " + path.string());
  probe.close();

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw DecodeError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                       : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw DecodeError("cannot decode PNG " + path.string() + ": " + msg);
  }
  Image out;
  out.rows = image.height;
  out.cols = image.width;
  out.channels = color ? 3 : 1;
  const std::size_t stride = out.channels + (alpha ? 1 : 0);
  out.pixels.resize(out.rows * out.cols * out.channels);
  for (std::size_t p = 0; p < out.rows * out.cols; ++p) {
    for (std::size_t c = 0; c < out.channels; ++c) out.pixels[p * out.channels + c] = raw[p * stride + c];
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw ShapeError("write_png: expected 1 or 3 channels, got " + std::to_string(img.channels));
  }
  if (img.pixels.size() != img.rows * img.cols * img.channels) {
    throw ShapeError("write_png: pixel buffer does not match dims");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.cols);
  image.height = static_cast<png_uint_32>(img.rows);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

SpatialTensor image_to_tensor(const Image& img) {
  if (img.channels == 0) throw ShapeError("image has no channels");
  const std::size_t lifted = (img.channels + 3) / 4 * 4;
  SpatialTensor t({1, lifted, img.rows, img.cols});
  for (std::size_t c = 0; c < lifted; ++c) {
    const std::size_t src = std::min(c, img.channels - 1);
    for (std::size_t m = 0; m < img.rows; ++m)
      for (std::size_t n = 0; n < img.cols; ++n) {
        t(0, c, m, n) = img.pixels[(m * img.cols + n) * img.channels + src] / 255.0;
      }
  }
  return t;
}

namespace {

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Image tensor_to_image(const SpatialTensor& t, std::size_t channels) {
  const Shape& s = t.shape();
  if (s.batch == 0 || channels == 0 || channels > s.channels) {
    throw ShapeError("tensor_to_image: cannot take " + std::to_string(channels) + " channels from " +
                     to_string(s));
  }
  Image img{s.rows, s.cols, channels, std::vector<std::uint8_t>(s.rows * s.cols * channels)};
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t m = 0; m < s.rows; ++m)
      for (std::size_t n = 0; n < s.cols; ++n) {
        img.pixels[(m * s.cols + n) * channels + c] = quantize(t(0, c, m, n));
      }
  return img;
}

Image gray_to_image(const GrayImage& g) {
  return {g.rows, g.cols, 1, g.to_bytes()};
}

Image synthetic_image(std::size_t rows, std::size_t cols, std::size_t channels, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image img{rows, cols, channels, std::vector<std::uint8_t>(rows * cols * channels)};
  for (std::size_t c = 0; c < channels; ++c) {
    std::vector<double> plane(rows * cols, 0.5);
    for (int k = 0; k < 4; ++k) {
      const double fy = std::floor(unit(engine) * 5.0) / static_cast<double>(rows);
      const double fx = std::floor(unit(engine) * 5.0) / static_cast<double>(cols);
      const double phase = 2.0 * std::numbers::pi * unit(engine);
      const double amp = 0.08 * unit(engine);
      for (std::size_t m = 0; m < rows; ++m)
        for (std::size_t n = 0; n < cols; ++n) {
          plane[m * cols + n] +=
              amp * std::cos(2.0 * std::numbers::pi * (fy * static_cast<double>(m) + fx * static_cast<double>(n)) +
                             phase);
        }
    }
    // One rectangle gives the texture edges.
    const auto r0 = static_cast<std::size_t>(unit(engine) * static_cast<double>(rows / 2));
    const auto c0 = static_cast<std::size_t>(unit(engine) * static_cast<double>(cols / 2));
    const double step = 0.3 * (unit(engine) - 0.5);
    for (std::size_t m = r0; m < std::min(rows, r0 + rows / 2); ++m)
      for (std::size_t n = c0; n < std::min(cols, c0 + cols / 2); ++n) plane[m * cols + n] += step;
    for (std::size_t p = 0; p < rows * cols; ++p) img.pixels[p * channels + c] = quantize(plane[p]);
  }
  return img;
}

}  // namespace boa::cli
