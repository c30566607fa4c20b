#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "boa/metrics.hpp"
#include "boa/tensor.hpp"

namespace boa::cli {

// 8-bit raster, row-major, channels interleaved (1 = gray, 3 = RGB).
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;

  bool operator==(const Image&) const = default;
};

// Gray and RGB PNGs of any bit depth; an alpha channel is discarded.
// IoError when the file cannot be opened, DecodeError for bad data.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

// (1, C', H, W) with values v / 255, C' the channel count rounded up to a
// multiple of 4 by repeating the last channel.
SpatialTensor image_to_tensor(const Image& img);

// First `channels` channels of batch 0, clamped to [0, 1] and rounded half
// away from zero.
Image tensor_to_image(const SpatialTensor& t, std::size_t channels);

Image gray_to_image(const GrayImage& g);

// Smooth random texture with a few hard edges, quantized to 8 bits.
Image synthetic_image(std::size_t rows, std::size_t cols, std::size_t channels, std::uint64_t seed);

}  // namespace boa::cli
