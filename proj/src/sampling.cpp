#include "boa/sampling.hpp"

#include <cmath>
#include <optional>

namespace boa {

MixCoefficients MixCoefficients::initial(std::size_t depth) {
  return {std::vector<double>(depth, kInitialValue), std::vector<double>(depth, kInitialValue)};
}

MixCoefficients MixCoefficients::for_depth(std::size_t depth) const {
  MixCoefficients out = *this;
  out.alpha.resize(depth, kInitialValue);
  out.beta.resize(depth, kInitialValue);
  return out;
}

double MixCoefficients::alpha_at(std::size_t stage) const {
  if (stage >= alpha.size()) {
    throw ShapeError("no alpha for downsampling stage " + std::to_string(stage));
  }
  return alpha[stage];
}

double MixCoefficients::beta_at(std::size_t stage) const {
  if (stage >= beta.size()) {
    throw ShapeError("no beta for upsampling stage " + std::to_string(stage));
  }
  return beta[stage];
}

std::vector<std::string> MixCoefficients::warnings() const {
  std::vector<std::string> notes;
  auto scan = [&](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 0.0 || v[i] > 1.0) {
        notes.push_back(std::string(name) + "[" + std::to_string(i) + "] = " +
                        std::to_string(v[i]) + " lies outside [0, 1]");
      }
    }
  };
  scan(alpha, "alpha");
  scan(beta, "beta");
  return notes;
}

const char* to_string(DropMode mode) {
  switch (mode) {
    case DropMode::never: return "never";
    case DropMode::all_stages: return "all_stages";
    case DropMode::first_stage_only: return "first_stage_only";
  }
  return "?";
}

DropMode drop_mode_from_string(const std::string& name) {
  if (name == "never") return DropMode::never;
  if (name == "all_stages") return DropMode::all_stages;
  if (name == "first_stage_only") return DropMode::first_stage_only;
  throw ConfigError("unknown drop mode '" + name + "'");
}

void DropPolicy::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw ConfigError("drop probability must lie in [0, 1], got " + std::to_string(probability));
  }
}

bool DropPolicy::applies_to(std::size_t stage) const {
  switch (mode) {
    case DropMode::never: return false;
    case DropMode::all_stages: return true;
    case DropMode::first_stage_only: return stage == 0;
  }
  return false;
}

const char* to_string(DownKind kind) {
  switch (kind) {
    case DownKind::pixel_unshuffle: return "pixel_unshuffle";
    case DownKind::flc: return "flc";
    case DownKind::frequency_preserved: return "fp";
  }
  return "?";
}

const char* to_string(UpKind kind) {
  switch (kind) {
    case UpKind::pixel_shuffle: return "pixel_shuffle";
    case UpKind::freq_avg_up: return "freq_avg_up";
    case UpKind::split_up: return "split_up";
  }
  return "?";
}

DownKind down_kind_from_string(const std::string& name) {
  if (name == "pixel_unshuffle") return DownKind::pixel_unshuffle;
  if (name == "flc") return DownKind::flc;
  if (name == "fp") return DownKind::frequency_preserved;
  throw ConfigError("unknown downsampling operator '" + name + "'");
}

UpKind up_kind_from_string(const std::string& name) {
  if (name == "pixel_shuffle") return UpKind::pixel_shuffle;
  if (name == "freq_avg_up") return UpKind::freq_avg_up;
  if (name == "split_up") return UpKind::split_up;
  throw ConfigError("unknown upsampling operator '" + name + "'");
}

DownKind SamplerConfig::down_at(std::size_t stage) const {
  if (down.empty()) throw ConfigError("sampler has no downsampling operator");
  if (down.size() == 1) return down.front();
  if (stage >= down.size()) throw ConfigError("no downsampling operator for stage " + std::to_string(stage));
  return down[stage];
}

UpKind SamplerConfig::up_at(std::size_t stage) const {
  if (up.empty()) throw ConfigError("sampler has no upsampling operator");
  if (up.size() == 1) return up.front();
  if (stage >= up.size()) throw ConfigError("no upsampling operator for stage " + std::to_string(stage));
  return up[stage];
}

LowBand LowBand::for_extent(std::size_t full) {
  LowBand b;
  b.full = full;
  b.halved = (full + 1) / 2;
  b.band = b.halved % 2 == 1 ? b.halved : b.halved - 1;
  return b;
}

void check_mix_coefficient(double value, const char* name) {
  if (!std::isfinite(value) || value < -10.0 || value > 10.0) {
    throw DegenerateError(std::string(name) + " = " + std::to_string(value) +
                          " is outside [-10, 10]");
  }
}

namespace {

void require_even_spatial(const Shape& s, const char* op) {
  if (s.rows % 2 != 0 || s.cols % 2 != 0 || s.rows == 0 || s.cols == 0) {
    throw ShapeError(std::string(op) + ": spatial dims must be even and nonzero, got " +
                     to_string(s));
  }
}

void require_groups_of_four(const Shape& s, const char* op) {
  if (s.channels == 0 || s.channels % 4 != 0) {
    throw ShapeError(std::string(op) + ": channel count " + std::to_string(s.channels) +
                     " is not a multiple of 4");
  }
}

// Shared front end of the downsampling low pass: optional padding, the
// centered spectrum and its odd central band.
struct LowPassFront {
  std::optional<PadSpec> pad;
  LowBand rows;
  LowBand cols;
  SpectralTensor band;
};

LowPassFront low_pass_front(const SpatialTensor& x, const SamplerConfig& cfg) {
  const Shape& s = x.shape();
  LowPassFront f;
  SpectralTensor spectrum;
  if (cfg.periodic) {
    spectrum = center(dft2(x));
  } else {
    f.pad = PadSpec::for_input(s.rows, s.cols, cfg.padding);
    spectrum = center(dft2(pad_spatial(x, *f.pad)));
  }
  f.rows = LowBand::for_extent(spectrum.shape().rows);
  f.cols = LowBand::for_extent(spectrum.shape().cols);
  f.band = crop_low(spectrum, f.rows.band, f.cols.band);
  return f;
}

SpatialTensor halved_from_front(const LowPassFront& f) {
  SpatialTensor h =
      idft2(uncenter(embed_zero(f.band, f.rows.halved, f.cols.halved)), SymmetryCheck::require);
  if (f.pad) return unpad_spatial(h, f.pad->halved(f.rows.halved, f.cols.halved));
  return h;
}

SpatialTensor full_from_front(const LowPassFront& f) {
  SpatialTensor l =
      idft2(uncenter(embed_zero(f.band, f.rows.full, f.cols.full)), SymmetryCheck::require);
  if (f.pad) return unpad_spatial(l, *f.pad);
  return l;
}

}  // namespace

SpatialTensor lowpass_full(const SpatialTensor& x, const SamplerConfig& cfg) {
  require_even_spatial(x.shape(), "lowpass_full");
  return full_from_front(low_pass_front(x, cfg));
}

SpatialTensor flc_pool(const SpatialTensor& x, const SamplerConfig& cfg) {
  require_even_spatial(x.shape(), "flc_pool");
  return halved_from_front(low_pass_front(x, cfg));
}

DownBranches fp_down_branches(const SpatialTensor& x, const SamplerConfig& cfg) {
  require_even_spatial(x.shape(), "fp_down");
  if (x.shape().channels == 0) throw ShapeError("fp_down: no channels");
  const LowPassFront f = low_pass_front(x, cfg);
  return {repeat_channels(halved_from_front(f), 4), pixel_unshuffle(x - full_from_front(f), 2)};
}

SpatialTensor fp_down(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg) {
  const double alpha = cfg.coefficients.alpha_at(stage);
  check_mix_coefficient(alpha, "alpha");
  DownBranches br = fp_down_branches(x, cfg);
  return mix(br.low, br.high, alpha);
}

DropGate::DropGate(DropPolicy policy) : policy_(policy), engine_(policy.seed) {
  policy_.validate();
}

bool DropGate::draw(std::size_t stage) {
  if (!policy_.training || !policy_.applies_to(stage)) return false;
  ++draws_;
  // 53 random mantissa bits; identical on every platform for a given seed.
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const bool fire = u < policy_.probability;
  if (fire) ++fired_;
  return fire;
}

SpatialTensor fp_down_drop(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                           DropGate& gate, bool force_drop) {
  const double alpha = cfg.coefficients.alpha_at(stage);
  check_mix_coefficient(alpha, "alpha");
  const bool fire = gate.draw(stage) || force_drop;
  DownBranches br = fp_down_branches(x, cfg);
  if (fire) return std::move(br.low);
  return mix(br.low, br.high, alpha);
}

UpBranches freq_avg_up_branches(const SpatialTensor& x) {
  const Shape& s = x.shape();
  require_groups_of_four(s, "freq_avg_up");
  const SpectralTensor spectrum = dft2(x);
  const SpectralTensor means = group_average(spectrum, 4);
  UpBranches br;
  br.high = pixel_shuffle(idft2(spectrum - means, SymmetryCheck::require), 2);
  br.low = idft2(uncenter(embed_zero(center(first_of_each_group(means, 4)), 2 * s.rows, 2 * s.cols)),
                 SymmetryCheck::require);
  return br;
}

SpatialTensor freq_avg_up(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg) {
  const double beta = cfg.coefficients.beta_at(stage);
  check_mix_coefficient(beta, "beta");
  UpBranches br = freq_avg_up_branches(x);
  return mix(br.low, br.high, beta);
}

UpBranches split_up_branches(const SpatialTensor& x) {
  require_groups_of_four(x.shape(), "split_up");
  SpatialTensor y = pixel_shuffle(x, 2);
  const Shape& s = y.shape();
  const LowBand rows = LowBand::for_extent(s.rows);
  const LowBand cols = LowBand::for_extent(s.cols);
  const SpectralTensor band = crop_low(center(dft2(y)), rows.band, cols.band);
  UpBranches br;
  br.low = idft2(uncenter(embed_zero(band, s.rows, s.cols)), SymmetryCheck::require);
  br.high = y - br.low;
  return br;
}

SpatialTensor split_up(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg) {
  const double beta = cfg.coefficients.beta_at(stage);
  check_mix_coefficient(beta, "beta");
  UpBranches br = split_up_branches(x);
  return mix(br.low, br.high, beta);
}

}  // namespace boa
