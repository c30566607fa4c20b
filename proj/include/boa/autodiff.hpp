#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "boa/pipeline.hpp"
#include "boa/sampling.hpp"
#include "boa/spectral.hpp"
#include "boa/tensor.hpp"

namespace boa {

// Vector-Jacobian products. Complex tensors use the real inner product
// <a, b> = sum(Re a * Re b + Im a * Im b), so every cotangent below is the
// transpose of the forward map under that pairing.

SpatialTensor pixel_shuffle_vjp(const SpatialTensor& cotangent, std::size_t r);
SpatialTensor pixel_unshuffle_vjp(const SpatialTensor& cotangent, std::size_t r);
SpatialTensor concat_channels_vjp(const SpatialTensor& cotangent, std::size_t times);
SpatialTensor repeat_channels_vjp(const SpatialTensor& cotangent, std::size_t times);
SpatialTensor group_average_vjp(const SpatialTensor& cotangent, std::size_t group);
SpectralTensor group_average_vjp(const SpectralTensor& cotangent, std::size_t group);
SpectralTensor first_of_each_group_vjp(const SpectralTensor& cotangent, std::size_t group);
SpatialTensor transpose_spatial_vjp(const SpatialTensor& cotangent);

// Adjoint of dft2 is Re(unnormalized inverse) / (M N). `imag_residual`
// receives the largest imaginary part discarded by the projection.
SpatialTensor dft2_vjp(const SpectralTensor& cotangent, double* imag_residual = nullptr);
// Adjoint of Re(idft2) is M N * dft2.
SpectralTensor idft2_vjp(const SpatialTensor& cotangent);
SpectralTensor center_vjp(const SpectralTensor& cotangent);
SpectralTensor uncenter_vjp(const SpectralTensor& cotangent);
SpectralTensor crop_low_vjp(const SpectralTensor& cotangent, std::size_t in_rows,
                            std::size_t in_cols);
SpectralTensor embed_zero_vjp(const SpectralTensor& cotangent, std::size_t in_rows,
                              std::size_t in_cols);
// Reflect and replicate padding fold border cotangents back onto their source pixels.
SpatialTensor pad_spatial_vjp(const SpatialTensor& cotangent, const PadSpec& spec);
SpatialTensor unpad_spatial_vjp(const SpatialTensor& cotangent, const PadSpec& spec);

// The sampling operators are linear in x for fixed coefficients, so their
// cotangents do not depend on the primal x beyond its shape; the mixing
// coefficient gradient is <high - low, cotangent>.
struct MixedVjp {
  SpatialTensor input;
  double coefficient = 0.0;
};

SpatialTensor lowpass_full_vjp(const Shape& input, const SamplerConfig& cfg,
                               const SpatialTensor& cotangent);
SpatialTensor flc_pool_vjp(const Shape& input, const SamplerConfig& cfg,
                           const SpatialTensor& cotangent);
MixedVjp fp_down_vjp(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                     const SpatialTensor& cotangent, bool dropped = false);
MixedVjp freq_avg_up_vjp(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                         const SpatialTensor& cotangent);
MixedVjp split_up_vjp(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                      const SpatialTensor& cotangent);

// Type-erased operator over flat real vectors, used by the gradient checker
// and the CLI. Complex tensors flatten as interleaved (re, im) pairs; mixing
// coefficients, when present, are appended after the tensor entries.
struct DifferentiableOp {
  std::string name;
  bool linear = false;
  std::size_t input_size = 0;
  std::function<std::vector<double>(std::span<const double>)> forward;
  std::function<std::vector<double>(std::span<const double>, std::span<const double>)> vjp;
  // Suggested primal point (entries in [0, 1], coefficients at test values).
  std::function<std::vector<double>(std::uint64_t seed)> sample_input;
};

std::vector<std::string> registered_ops();
// Throws UnknownOpError for names not in registered_ops().
DifferentiableOp make_op(const std::string& name);

// Cotangent with respect to every input of `op` (including coefficients).
std::vector<double> vjp(const DifferentiableOp& op, std::span<const double> primal,
                        std::span<const double> cotangent);
std::vector<double> vjp(const std::string& op, std::span<const double> primal,
                        std::span<const double> cotangent);

struct GradCheckReport {
  std::string op;
  double max_relative_error = 0.0;
  std::size_t probes = 0;
  double step = 0.0;
};

// Central differences along random directions e, paired with random
// cotangents v: compares <(f(x + h e) - f(x - h e)) / 2h, v> to <e, J^T v>.
// Relative error uses max(|analytic|, |numeric|, 1e-8) as denominator.
GradCheckReport finite_difference_check(const DifferentiableOp& op, std::span<const double> input,
                                        double h = 1e-5, std::size_t probes = 20,
                                        std::uint64_t seed = 0);

}  // namespace boa
