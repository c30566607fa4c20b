#include "boa/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace boa {

SpatialTensor pixel_shuffle_vjp(const SpatialTensor& cotangent, std::size_t r) {
  return pixel_unshuffle(cotangent, r);
}

SpatialTensor pixel_unshuffle_vjp(const SpatialTensor& cotangent, std::size_t r) {
  return pixel_shuffle(cotangent, r);
}

SpatialTensor concat_channels_vjp(const SpatialTensor& cotangent, std::size_t times) {
  return sum_channel_blocks(cotangent, times);
}

SpatialTensor repeat_channels_vjp(const SpatialTensor& cotangent, std::size_t times) {
  return sum_channel_groups(cotangent, times);
}

// Group averaging is an orthogonal projection, hence self-adjoint.
SpatialTensor group_average_vjp(const SpatialTensor& cotangent, std::size_t group) {
  return group_average(cotangent, group);
}

SpectralTensor group_average_vjp(const SpectralTensor& cotangent, std::size_t group) {
  return group_average(cotangent, group);
}

SpectralTensor first_of_each_group_vjp(const SpectralTensor& cotangent, std::size_t group) {
  return scatter_to_group_heads(cotangent, group);
}

SpatialTensor transpose_spatial_vjp(const SpatialTensor& cotangent) {
  return transpose_spatial(cotangent);
}

SpatialTensor dft2_vjp(const SpectralTensor& cotangent, double* imag_residual) {
  if (cotangent.centered()) throw ShapeError("dft2_vjp: cotangent must be uncentered");
  InverseTransform inv = idft2_with_residual(cotangent);
  const double scale = 1.0 / static_cast<double>(cotangent.shape().plane());
  if (imag_residual) *imag_residual = inv.imag_residual * scale;
  return scale * inv.real;
}

SpectralTensor idft2_vjp(const SpatialTensor& cotangent) {
  return static_cast<double>(cotangent.shape().plane()) * dft2(cotangent);
}

// A cyclic shift is a permutation; its adjoint is the inverse shift.
SpectralTensor center_vjp(const SpectralTensor& cotangent) { return uncenter(cotangent); }
SpectralTensor uncenter_vjp(const SpectralTensor& cotangent) { return center(cotangent); }

SpectralTensor crop_low_vjp(const SpectralTensor& cotangent, std::size_t in_rows,
                            std::size_t in_cols) {
  const Shape& s = cotangent.shape();
  return {apply_axis_maps_adjoint<Complex>(cotangent, crop_axis(in_rows, s.rows),
                                           crop_axis(in_cols, s.cols)),
          true};
}

SpectralTensor embed_zero_vjp(const SpectralTensor& cotangent, std::size_t in_rows,
                              std::size_t in_cols) {
  const Shape& s = cotangent.shape();
  return {apply_axis_maps_adjoint<Complex>(cotangent, embed_axis(in_rows, s.rows),
                                           embed_axis(in_cols, s.cols)),
          true};
}

SpatialTensor pad_spatial_vjp(const SpatialTensor& cotangent, const PadSpec& spec) {
  return apply_axis_maps_adjoint(cotangent, pad_axis(spec.rows, spec.top, spec.bottom, spec.mode),
                                 pad_axis(spec.cols, spec.left, spec.right, spec.mode));
}

SpatialTensor unpad_spatial_vjp(const SpatialTensor& cotangent, const PadSpec& spec) {
  return apply_axis_maps_adjoint(cotangent,
                                 unpad_axis(spec.padded_rows(), spec.top, spec.bottom),
                                 unpad_axis(spec.padded_cols(), spec.left, spec.right));
}

namespace {

struct LowPassGeometry {
  std::optional<PadSpec> pad;
  LowBand rows;
  LowBand cols;
};

LowPassGeometry low_pass_geometry(const Shape& input, const SamplerConfig& cfg) {
  LowPassGeometry g;
  std::size_t rows = input.rows;
  std::size_t cols = input.cols;
  if (!cfg.periodic) {
    g.pad = PadSpec::for_input(input.rows, input.cols, cfg.padding);
    rows = g.pad->padded_rows();
    cols = g.pad->padded_cols();
  }
  g.rows = LowBand::for_extent(rows);
  g.cols = LowBand::for_extent(cols);
  return g;
}

// Shared tail of the low-pass adjoints: from the cotangent of the band
// embedded at (out_rows, out_cols) back to the unpadded input.
SpatialTensor low_pass_back(const LowPassGeometry& g, const SpatialTensor& embedded_cotangent) {
  SpectralTensor s = uncenter_vjp(idft2_vjp(embedded_cotangent));
  s = embed_zero_vjp(s, g.rows.band, g.cols.band);
  s = center_vjp(crop_low_vjp(s, g.rows.full, g.cols.full));
  SpatialTensor x = dft2_vjp(s);
  if (g.pad) x = pad_spatial_vjp(x, *g.pad);
  return x;
}

SpatialTensor low_pass_adjoint(const LowPassGeometry& g, const SpatialTensor& cotangent) {
  SpatialTensor gs = cotangent;
  if (g.pad) gs = unpad_spatial_vjp(gs, *g.pad);
  return low_pass_back(g, gs);
}

}  // namespace

SpatialTensor lowpass_full_vjp(const Shape& input, const SamplerConfig& cfg,
                               const SpatialTensor& cotangent) {
  return low_pass_adjoint(low_pass_geometry(input, cfg), cotangent);
}

SpatialTensor flc_pool_vjp(const Shape& input, const SamplerConfig& cfg,
                           const SpatialTensor& cotangent) {
  const LowPassGeometry g = low_pass_geometry(input, cfg);
  SpatialTensor gs = cotangent;
  if (g.pad) gs = unpad_spatial_vjp(gs, g.pad->halved(g.rows.halved, g.cols.halved));
  return low_pass_back(g, gs);
}

MixedVjp fp_down_vjp(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                     const SpatialTensor& cotangent, bool dropped) {
  const double alpha = cfg.coefficients.alpha_at(stage);
  check_mix_coefficient(alpha, "alpha");
  const Shape& s = x.shape();
  const SpatialTensor low_cot = flc_pool_vjp(s, cfg, repeat_channels_vjp(cotangent, 4));
  if (dropped) return {low_cot, 0.0};
  const SpatialTensor hv = pixel_unshuffle_vjp(cotangent, 2);
  const SpatialTensor high_cot = hv - lowpass_full_vjp(s, cfg, hv);
  const DownBranches br = fp_down_branches(x, cfg);
  return {(1.0 - alpha) * low_cot + alpha * high_cot, inner(br.high - br.low, cotangent)};
}

MixedVjp freq_avg_up_vjp(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                         const SpatialTensor& cotangent) {
  const double beta = cfg.coefficients.beta_at(stage);
  check_mix_coefficient(beta, "beta");
  const Shape& s = x.shape();
  // Low branch: idft2 . uncenter . embed . center . first . group_average . dft2
  SpectralTensor low = uncenter_vjp(idft2_vjp((1.0 - beta) * cotangent));
  low = embed_zero_vjp(low, s.rows, s.cols);
  low = group_average_vjp(first_of_each_group_vjp(center_vjp(low), 4), 4);
  // High branch: pixel_shuffle . idft2 . (I - group_average) . dft2
  const SpectralTensor h = idft2_vjp(pixel_shuffle_vjp(beta * cotangent, 2));
  const SpectralTensor high = h - group_average_vjp(h, 4);
  const UpBranches br = freq_avg_up_branches(x);
  return {dft2_vjp(low + high), inner(br.high - br.low, cotangent)};
}

MixedVjp split_up_vjp(const SpatialTensor& x, std::size_t stage, const SamplerConfig& cfg,
                      const SpatialTensor& cotangent) {
  const double beta = cfg.coefficients.beta_at(stage);
  check_mix_coefficient(beta, "beta");
  const Shape& y = cotangent.shape();
  const LowBand rows = LowBand::for_extent(y.rows);
  const LowBand cols = LowBand::for_extent(y.cols);
  // output = beta * y + (1 - 2 beta) * lowpass(y)
  SpectralTensor s = uncenter_vjp(idft2_vjp(cotangent));
  s = embed_zero_vjp(s, rows.band, cols.band);
  s = center_vjp(crop_low_vjp(s, y.rows, y.cols));
  const SpatialTensor low_cot = dft2_vjp(s);
  const SpatialTensor dy = beta * cotangent + (1.0 - 2.0 * beta) * low_cot;
  const UpBranches br = split_up_branches(x);
  return {pixel_shuffle_vjp(dy, 2), inner(br.high - br.low, cotangent)};
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::vector<double> flatten(const SpatialTensor& x) { return x.values(); }

std::vector<double> flatten(const Tensor<Complex>& x) {
  std::vector<double> out;
  out.reserve(2 * x.size());
  for (const Complex& v : x.data()) {
    out.push_back(v.real());
    out.push_back(v.imag());
  }
  return out;
}

SpatialTensor spatial_from(std::span<const double> v, const Shape& s) {
  if (v.size() < s.size()) throw ShapeError("flat input too short for " + to_string(s));
  return SpatialTensor(s, std::vector<double>(v.begin(), v.begin() + static_cast<long>(s.size())));
}

SpectralTensor spectral_from(std::span<const double> v, const Shape& s, bool centered) {
  if (v.size() < 2 * s.size()) throw ShapeError("flat input too short for " + to_string(s));
  SpectralTensor out(s, centered);
  for (std::size_t i = 0; i < s.size(); ++i) out.data()[i] = {v[2 * i], v[2 * i + 1]};
  return out;
}

std::vector<double> uniform_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& e : v) e = u(rng);
  return v;
}

using Spatial1 = std::function<SpatialTensor(const SpatialTensor&)>;

DifferentiableOp spatial_linear(std::string name, Shape in, Spatial1 f, Spatial1 adj) {
  DifferentiableOp op;
  op.name = std::move(name);
  op.linear = true;
  op.input_size = in.size();
  op.forward = [in, f](std::span<const double> x) { return flatten(f(spatial_from(x, in))); };
  op.vjp = [in, f, adj](std::span<const double>, std::span<const double> v) {
    const Shape out = f(SpatialTensor(in)).shape();
    return flatten(adj(spatial_from(v, out)));
  };
  op.sample_input = [n = in.size()](std::uint64_t seed) { return uniform_values(n, seed); };
  return op;
}

using Spectral1 = std::function<SpectralTensor(const SpectralTensor&)>;

DifferentiableOp spectral_linear(std::string name, Shape in, bool in_centered, Spectral1 f,
                                 Spectral1 adj) {
  DifferentiableOp op;
  op.name = std::move(name);
  op.linear = true;
  op.input_size = 2 * in.size();
  op.forward = [in, in_centered, f](std::span<const double> x) {
    return flatten(f(spectral_from(x, in, in_centered)));
  };
  op.vjp = [in, in_centered, f, adj](std::span<const double>, std::span<const double> v) {
    const SpectralTensor probe = f(SpectralTensor(in, in_centered));
    return flatten(adj(spectral_from(v, probe.shape(), probe.centered())));
  };
  op.sample_input = [n = op.input_size](std::uint64_t seed) { return uniform_values(n, seed); };
  return op;
}

// Operators with one trailing mixing coefficient after the tensor entries.
using Mixed = std::function<SpatialTensor(const SpatialTensor&, double)>;
using MixedAdj = std::function<MixedVjp(const SpatialTensor&, double, const SpatialTensor&)>;

DifferentiableOp mixed_op(std::string name, Shape in, Mixed f, MixedAdj adj) {
  DifferentiableOp op;
  op.name = std::move(name);
  op.linear = false;
  op.input_size = in.size() + 1;
  op.forward = [in, f](std::span<const double> x) {
    return flatten(f(spatial_from(x, in), x[in.size()]));
  };
  op.vjp = [in, f, adj](std::span<const double> x, std::span<const double> v) {
    const SpatialTensor primal = spatial_from(x, in);
    const double coef = x[in.size()];
    const Shape out = f(primal, coef).shape();
    MixedVjp r = adj(primal, coef, spatial_from(v, out));
    std::vector<double> g = flatten(r.input);
    g.push_back(r.coefficient);
    return g;
  };
  op.sample_input = [n = in.size()](std::uint64_t seed) {
    std::vector<double> v = uniform_values(n + 1, seed);
    return v;
  };
  return op;
}

SamplerConfig with_alpha(SamplerConfig cfg, double alpha) {
  cfg.coefficients.alpha = {alpha};
  return cfg;
}

SamplerConfig with_beta(SamplerConfig cfg, double beta) {
  cfg.coefficients.beta = {beta};
  return cfg;
}

SamplerConfig padded_cfg() {
  SamplerConfig cfg;
  cfg.padding = PadMode::reflect;
  cfg.periodic = false;
  return cfg;
}

SamplerConfig periodic_cfg() {
  SamplerConfig cfg;
  cfg.periodic = true;
  return cfg;
}

// Whole pipeline as an operator of (x, alpha[depth], beta[depth]).
DifferentiableOp pipeline_op(std::string name, Shape in, SamplerConfig base, std::size_t depth) {
  DifferentiableOp op;
  op.name = std::move(name);
  op.linear = false;
  op.input_size = in.size() + 2 * depth;
  auto configured = [base, depth, in](std::span<const double> x) {
    SamplerConfig cfg = base;
    cfg.coefficients.alpha.assign(x.begin() + static_cast<long>(in.size()),
                                  x.begin() + static_cast<long>(in.size() + depth));
    cfg.coefficients.beta.assign(x.begin() + static_cast<long>(in.size() + depth),
                                 x.begin() + static_cast<long>(in.size() + 2 * depth));
    return Pipeline(cfg, depth);
  };
  op.forward = [in, configured](std::span<const double> x) {
    Pipeline p = configured(x);
    return flatten(p(spatial_from(x, in)));
  };
  op.vjp = [in, configured](std::span<const double> x, std::span<const double> v) {
    Pipeline p = configured(x);
    const PipelineTrace trace = p.forward(spatial_from(x, in));
    PipelineGradient g = p.backward(trace, spatial_from(v, trace.output.shape()));
    std::vector<double> out = flatten(g.input);
    out.insert(out.end(), g.alpha.begin(), g.alpha.end());
    out.insert(out.end(), g.beta.begin(), g.beta.end());
    return out;
  };
  op.sample_input = [n = op.input_size](std::uint64_t seed) { return uniform_values(n, seed); };
  return op;
}

using Factory = std::function<DifferentiableOp()>;

const std::vector<std::pair<std::string, Factory>>& registry() {
  static const std::vector<std::pair<std::string, Factory>> ops = [] {
    std::vector<std::pair<std::string, Factory>> r;
    auto add = [&r](std::string name, Factory f) { r.emplace_back(std::move(name), std::move(f)); };

    add("pixel_shuffle", [] {
      return spatial_linear("pixel_shuffle", {1, 8, 4, 4},
                            [](const SpatialTensor& x) { return pixel_shuffle(x, 2); },
                            [](const SpatialTensor& v) { return pixel_shuffle_vjp(v, 2); });
    });
    add("pixel_unshuffle", [] {
      return spatial_linear("pixel_unshuffle", {1, 2, 8, 8},
                            [](const SpatialTensor& x) { return pixel_unshuffle(x, 2); },
                            [](const SpatialTensor& v) { return pixel_unshuffle_vjp(v, 2); });
    });
    add("repeat_channels", [] {
      return spatial_linear("repeat_channels", {1, 2, 4, 4},
                            [](const SpatialTensor& x) { return repeat_channels(x, 4); },
                            [](const SpatialTensor& v) { return repeat_channels_vjp(v, 4); });
    });
    add("concat_channels", [] {
      return spatial_linear("concat_channels", {1, 2, 4, 4},
                            [](const SpatialTensor& x) { return concat_channels(x, 4); },
                            [](const SpatialTensor& v) { return concat_channels_vjp(v, 4); });
    });
    add("group_average", [] {
      return spatial_linear("group_average", {1, 8, 4, 4},
                            [](const SpatialTensor& x) { return group_average(x, 4); },
                            [](const SpatialTensor& v) { return group_average_vjp(v, 4); });
    });
    add("first_of_each_group", [] {
      return spectral_linear(
          "first_of_each_group", {1, 8, 4, 4}, false,
          [](const SpectralTensor& x) { return first_of_each_group(x, 4); },
          [](const SpectralTensor& v) { return first_of_each_group_vjp(v, 4); });
    });
    add("transpose_spatial", [] {
      return spatial_linear("transpose_spatial", {1, 2, 4, 6},
                            [](const SpatialTensor& x) { return transpose_spatial(x); },
                            [](const SpatialTensor& v) { return transpose_spatial_vjp(v); });
    });
    add("dft2", [] {
      const Shape in{1, 2, 6, 5};
      DifferentiableOp op;
      op.name = "dft2";
      op.linear = true;
      op.input_size = in.size();
      op.forward = [in](std::span<const double> x) { return flatten(dft2(spatial_from(x, in))); };
      op.vjp = [in](std::span<const double>, std::span<const double> v) {
        return flatten(dft2_vjp(spectral_from(v, in, false)));
      };
      op.sample_input = [n = in.size()](std::uint64_t seed) { return uniform_values(n, seed); };
      return op;
    });
    add("idft2", [] {
      const Shape in{1, 2, 6, 5};
      DifferentiableOp op;
      op.name = "idft2";
      op.linear = true;
      op.input_size = 2 * in.size();
      op.forward = [in](std::span<const double> x) {
        return flatten(idft2(spectral_from(x, in, false)));
      };
      op.vjp = [in](std::span<const double>, std::span<const double> v) {
        return flatten(idft2_vjp(spatial_from(v, in)));
      };
      op.sample_input = [n = op.input_size](std::uint64_t seed) { return uniform_values(n, seed); };
      return op;
    });
    add("center", [] {
      return spectral_linear("center", {1, 2, 6, 5}, false,
                             [](const SpectralTensor& x) { return center(x); },
                             [](const SpectralTensor& v) { return center_vjp(v); });
    });
    add("uncenter", [] {
      return spectral_linear("uncenter", {1, 2, 6, 5}, true,
                             [](const SpectralTensor& x) { return uncenter(x); },
                             [](const SpectralTensor& v) { return uncenter_vjp(v); });
    });
    add("crop_low", [] {
      return spectral_linear("crop_low", {1, 2, 9, 8}, true,
                             [](const SpectralTensor& x) { return crop_low(x, 5, 5); },
                             [](const SpectralTensor& v) { return crop_low_vjp(v, 9, 8); });
    });
    add("embed_zero", [] {
      return spectral_linear("embed_zero", {1, 2, 8, 5}, true,
                             [](const SpectralTensor& x) { return embed_zero(x, 12, 9); },
                             [](const SpectralTensor& v) { return embed_zero_vjp(v, 8, 5); });
    });
    for (PadMode mode : {PadMode::reflect, PadMode::zero, PadMode::replicate}) {
      const std::string name = std::string("pad_") + to_string(mode);
      add(name, [name, mode] {
        const PadSpec spec = PadSpec::for_input(4, 6, mode);
        return spatial_linear(
            name, {1, 2, 4, 6}, [spec](const SpatialTensor& x) { return pad_spatial(x, spec); },
            [spec](const SpatialTensor& v) { return pad_spatial_vjp(v, spec); });
      });
    }
    add("unpad", [] {
      const PadSpec spec = PadSpec::for_input(4, 6, PadMode::reflect);
      return spatial_linear(
          "unpad", {1, 2, spec.padded_rows(), spec.padded_cols()},
          [spec](const SpatialTensor& x) { return unpad_spatial(x, spec); },
          [spec](const SpatialTensor& v) { return unpad_spatial_vjp(v, spec); });
    });
    for (bool periodic : {false, true}) {
      const std::string suffix = periodic ? "_periodic" : "";
      const SamplerConfig base = periodic ? periodic_cfg() : padded_cfg();
      const Shape in{1, 2, 8, 8};
      add("flc_pool" + suffix, [suffix, base, in] {
        return spatial_linear(
            "flc_pool" + suffix, in, [base](const SpatialTensor& x) { return flc_pool(x, base); },
            [base, in](const SpatialTensor& v) { return flc_pool_vjp(in, base, v); });
      });
      add("fp_down" + suffix, [suffix, base, in] {
        return mixed_op(
            "fp_down" + suffix, in,
            [base](const SpatialTensor& x, double a) { return fp_down(x, 0, with_alpha(base, a)); },
            [base](const SpatialTensor& x, double a, const SpatialTensor& v) {
              return fp_down_vjp(x, 0, with_alpha(base, a), v);
            });
      });
    }
    add("fp_down_dropped", [] {
      const SamplerConfig base = padded_cfg();
      return mixed_op(
          "fp_down_dropped", {1, 2, 8, 8},
          [base](const SpatialTensor& x, double a) {
            DropGate gate(DropPolicy{});
            return fp_down_drop(x, 0, with_alpha(base, a), gate, true);
          },
          [base](const SpatialTensor& x, double a, const SpatialTensor& v) {
            return fp_down_vjp(x, 0, with_alpha(base, a), v, true);
          });
    });
    add("freq_avg_up", [] {
      const SamplerConfig base;
      return mixed_op(
          "freq_avg_up", {1, 8, 4, 4},
          [base](const SpatialTensor& x, double b) { return freq_avg_up(x, 0, with_beta(base, b)); },
          [base](const SpatialTensor& x, double b, const SpatialTensor& v) {
            return freq_avg_up_vjp(x, 0, with_beta(base, b), v);
          });
    });
    add("split_up", [] {
      const SamplerConfig base;
      return mixed_op(
          "split_up", {1, 8, 4, 4},
          [base](const SpatialTensor& x, double b) { return split_up(x, 0, with_beta(base, b)); },
          [base](const SpatialTensor& x, double b, const SpatialTensor& v) {
            return split_up_vjp(x, 0, with_beta(base, b), v);
          });
    });
    add("pipeline_boa_depth2", [] {
      SamplerConfig cfg = padded_cfg();
      cfg.down = {DownKind::frequency_preserved};
      cfg.up = {UpKind::freq_avg_up};
      cfg.transpose_alternation = true;
      return pipeline_op("pipeline_boa_depth2", {1, 4, 8, 8}, cfg, 2);
    });
    add("pipeline_split_up_depth2", [] {
      SamplerConfig cfg = padded_cfg();
      cfg.down = {DownKind::frequency_preserved};
      cfg.up = {UpKind::split_up};
      return pipeline_op("pipeline_split_up_depth2", {1, 4, 8, 8}, cfg, 2);
    });
    add("pipeline_flc_depth2", [] {
      SamplerConfig cfg = padded_cfg();
      cfg.down = {DownKind::flc};
      cfg.up = {UpKind::pixel_shuffle};
      return pipeline_op("pipeline_flc_depth2", {1, 4, 8, 8}, cfg, 2);
    });
    return r;
  }();
  return ops;
}

}  // namespace

std::vector<std::string> registered_ops() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

DifferentiableOp make_op(const std::string& name) {
  for (const auto& [n, factory] : registry()) {
    if (n == name) return factory();
  }
  throw UnknownOpError("no differentiable operator named '" + name + "'");
}

std::vector<double> vjp(const DifferentiableOp& op, std::span<const double> primal,
                        std::span<const double> cotangent) {
  if (primal.size() != op.input_size) {
    throw ShapeError(op.name + ": expected " + std::to_string(op.input_size) + " inputs, got " +
                     std::to_string(primal.size()));
  }
  return op.vjp(primal, cotangent);
}

std::vector<double> vjp(const std::string& op, std::span<const double> primal,
                        std::span<const double> cotangent) {
  return vjp(make_op(op), primal, cotangent);
}

GradCheckReport finite_difference_check(const DifferentiableOp& op, std::span<const double> input,
                                        double h, std::size_t probes, std::uint64_t seed) {
  GradCheckReport report{op.name, 0.0, probes, h};
  if (input.size() != op.input_size) {
    throw ShapeError(op.name + ": gradient check input has wrong size");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::vector<double> x(input.begin(), input.end());
  const std::size_t out_size = op.forward(x).size();
  std::vector<double> xp(x.size());
  std::vector<double> xm(x.size());
  for (std::size_t p = 0; p < probes; ++p) {
    std::vector<double> dir(x.size());
    for (double& d : dir) d = normal(rng);
    std::vector<double> cot(out_size);
    for (double& c : cot) c = normal(rng);
    for (std::size_t i = 0; i < x.size(); ++i) {
      xp[i] = x[i] + h * dir[i];
      xm[i] = x[i] - h * dir[i];
    }
    const std::vector<double> fp = op.forward(xp);
    const std::vector<double> fm = op.forward(xm);
    double numeric = 0.0;
    for (std::size_t i = 0; i < out_size; ++i) numeric += (fp[i] - fm[i]) / (2.0 * h) * cot[i];
    const std::vector<double> g = vjp(op, x, cot);
    double analytic = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) analytic += g[i] * dir[i];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic - numeric) / denom;
    if (!std::isfinite(rel)) {
      report.max_relative_error = std::numeric_limits<double>::infinity();
    } else {
      report.max_relative_error = std::max(report.max_relative_error, rel);
    }
  }
  return report;
}

}  // namespace boa
