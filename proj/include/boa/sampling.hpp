#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "boa/spectral.hpp"
#include "boa/tensor.hpp"

namespace boa {

// Per-stage mixing weights: alpha for downsampling, beta for upsampling.
struct MixCoefficients {
  static constexpr double kInitialValue = 0.3;

  std::vector<double> alpha;
  std::vector<double> beta;

  static MixCoefficients initial(std::size_t depth);

  // Resized to `depth` stages; missing stages take the initial value.
  MixCoefficients for_depth(std::size_t depth) const;

  double alpha_at(std::size_t stage) const;
  double beta_at(std::size_t stage) const;

  // Human-readable notes for coefficients outside [0, 1]. Such values are
  // legal, only unusual.
  std::vector<std::string> warnings() const;

  bool operator==(const MixCoefficients&) const = default;
};

enum class DropMode { never, all_stages, first_stage_only };

const char* to_string(DropMode mode);
DropMode drop_mode_from_string(const std::string& name);

// Stochastic removal of the high-frequency path, decided once per call
// (i.e. per batch). Only fires in training mode.
struct DropPolicy {
  DropMode mode = DropMode::never;
  double probability = 0.3;
  std::uint64_t seed = 0;
  bool training = false;

  void validate() const;
  bool applies_to(std::size_t stage) const;

  bool operator==(const DropPolicy&) const = default;
};

enum class DownKind { pixel_unshuffle, flc, frequency_preserved };
enum class UpKind { pixel_shuffle, freq_avg_up, split_up };

const char* to_string(DownKind kind);
const char* to_string(UpKind kind);
DownKind down_kind_from_string(const std::string& name);
UpKind up_kind_from_string(const std::string& name);

struct SamplerConfig {
  // One entry per stage, or a single entry applied to every stage.
  std::vector<DownKind> down{DownKind::frequency_preserved};
  std::vector<UpKind> up{UpKind::freq_avg_up};
  PadMode padding = PadMode::reflect;
  // Skip the spatial padding so the cyclic Fourier identities hold exactly.
  bool periodic = false;
  bool transpose_alternation = false;
  MixCoefficients coefficients = MixCoefficients::initial(3);
  DropPolicy drop;

  DownKind down_at(std::size_t stage) const;
  UpKind up_at(std::size_t stage) const;

  bool operator==(const SamplerConfig&) const = default;
};

// Sizes for the median-threshold low pass along one axis of a spectrum of
// length `full`: the low band is the largest odd crop that fits the halved
// grid of ceil(full / 2) samples.
struct LowBand {
  std::size_t full = 0;
  std::size_t halved = 0;
  std::size_t band = 0;

  static LowBand for_extent(std::size_t full);
  // Largest |frequency| kept by the band.
  std::size_t half_width() const { return band / 2; }
};

// Branches of one FrequencyPreservedPooling evaluation.
struct DownBranches {
  SpatialTensor low;   // (B, 4C, M/2, N/2): four copies of the halved low pass
  SpatialTensor high;  // (B, 4C, M/2, N/2): pixel-unshuffled high residual
};

// Low-pass image at full resolution (the spectral crop re-embedded at the
// transform size, unpadded back to M x N).
SpatialTensor lowpass_full(const SpatialTensor& x, const SamplerConfig& cfg);

// Alias-free halved low pass, (B, C, M/2, N/2).
SpatialTensor flc_pool(const SpatialTensor& x, const SamplerConfig& cfg);

DownBranches fp_down_branches(const SpatialTensor& x, const SamplerConfig& cfg);

// (1 - alpha) * low + alpha * high for the stage's alpha.
SpatialTensor fp_down(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg);

// Per-pipeline random source for Drop-High. One draw per call covers the
// whole batch; nothing is drawn when the policy cannot fire.
class DropGate {
 public:
  explicit DropGate(DropPolicy policy);

  bool draw(std::size_t stage);

  const DropPolicy& policy() const { return policy_; }
  std::uint64_t draws() const { return draws_; }
  std::uint64_t fired() const { return fired_; }

 private:
  DropPolicy policy_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  std::uint64_t fired_ = 0;
};

// fp_down behind the Drop-High gate: when the gate fires (or force_drop is
// set) the output is the pure low path.
SpatialTensor fp_down_drop(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                           DropGate& gate, bool force_drop = false);

struct UpBranches {
  SpatialTensor low;   // zero-inserted spectral upsampling of the group means
  SpatialTensor high;  // pixel-shuffled residual around the group means
};

UpBranches freq_avg_up_branches(const SpatialTensor& x);
SpatialTensor freq_avg_up(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg);

UpBranches split_up_branches(const SpatialTensor& x);
SpatialTensor split_up(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg);

// Coefficient range guard shared by the mixing operators.
void check_mix_coefficient(double value, const char* name);

}  // namespace boa
