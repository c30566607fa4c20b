#include "boa/pipeline.hpp"

#include "boa/autodiff.hpp"

namespace boa {

namespace {

SpatialTensor run_down(DownKind kind, const SpatialTensor& x, std::size_t stage,
                       const SamplerConfig& cfg, DropGate& gate, bool& dropped) {
  dropped = false;
  switch (kind) {
    case DownKind::pixel_unshuffle:
      return pixel_unshuffle(x, 2);
    case DownKind::flc:
      return repeat_channels(flc_pool(x, cfg), 4);
    case DownKind::frequency_preserved: {
      const double alpha = cfg.coefficients.alpha_at(stage);
      check_mix_coefficient(alpha, "alpha");
      dropped = gate.draw(stage);
      DownBranches br = fp_down_branches(x, cfg);
      return dropped ? std::move(br.low) : mix(br.low, br.high, alpha);
    }
  }
  throw ConfigError("unhandled downsampling operator");
}

SpatialTensor run_up(UpKind kind, const SpatialTensor& x, std::size_t stage,
                     const SamplerConfig& cfg) {
  switch (kind) {
    case UpKind::pixel_shuffle: return pixel_shuffle(x, 2);
    case UpKind::freq_avg_up: return freq_avg_up(x, stage, cfg);
    case UpKind::split_up: return split_up(x, stage, cfg);
  }
  throw ConfigError("unhandled upsampling operator");
}

}  // namespace

Pipeline::Pipeline(SamplerConfig cfg, std::size_t depth)
    : cfg_(std::move(cfg)), depth_(depth), gate_(cfg_.drop) {
  if (depth_ == 0) throw ConfigError("pipeline depth must be >= 1");
  if (cfg_.down.size() != 1 && cfg_.down.size() != depth_) {
    throw ConfigError("expected 1 or " + std::to_string(depth_) + " downsampling operators");
  }
  if (cfg_.up.size() != 1 && cfg_.up.size() != depth_) {
    throw ConfigError("expected 1 or " + std::to_string(depth_) + " upsampling operators");
  }
  cfg_.coefficients = cfg_.coefficients.for_depth(depth_);
  for (double a : cfg_.coefficients.alpha) check_mix_coefficient(a, "alpha");
  for (double b : cfg_.coefficients.beta) check_mix_coefficient(b, "beta");
}

bool Pipeline::transposed_at(std::size_t level) const {
  return cfg_.transpose_alternation && level % 2 == 0;
}

std::vector<Shape> Pipeline::stage_shapes(const Shape& input) const {
  std::vector<Shape> shapes;
  Shape s = input;
  for (std::size_t level = 0; level < depth_; ++level) {
    if (s.rows % 2 != 0 || s.cols % 2 != 0 || s.rows == 0 || s.cols == 0) {
      throw ShapeError("downsampling stage " + std::to_string(level) + " needs even spatial dims, got " +
                       to_string(s) + "; input dims must be divisible by 2^" + std::to_string(depth_));
    }
    s = {s.batch, s.channels * 4, s.rows / 2, s.cols / 2};
    shapes.push_back(s);
  }
  for (std::size_t j = 0; j < depth_; ++j) {
    if (s.channels % 4 != 0) {
      throw ShapeError("upsampling stage " + std::to_string(j) + " needs channels divisible by 4");
    }
    s = {s.batch, s.channels / 4, s.rows * 2, s.cols * 2};
    shapes.push_back(s);
  }
  return shapes;
}

SpatialTensor Pipeline::operator()(const SpatialTensor& x) { return forward(x).output; }

PipelineTrace Pipeline::forward(const SpatialTensor& x) {
  stage_shapes(x.shape());
  PipelineTrace trace;
  SpatialTensor cur = x;
  for (std::size_t level = 0; level < depth_; ++level) {
    StageRecord rec;
    rec.direction = StageDirection::down;
    rec.level = level;
    rec.coefficient = level;
    rec.transposed = transposed_at(level);
    rec.input = rec.transposed ? transpose_spatial(cur) : cur;
    SpatialTensor out = run_down(cfg_.down_at(level), rec.input, level, cfg_, gate_, rec.dropped);
    cur = rec.transposed ? transpose_spatial(out) : std::move(out);
    rec.output_shape = cur.shape();
    trace.stages.push_back(std::move(rec));
  }
  for (std::size_t j = 0; j < depth_; ++j) {
    StageRecord rec;
    rec.direction = StageDirection::up;
    rec.level = depth_ - 1 - j;
    rec.coefficient = j;
    rec.transposed = transposed_at(rec.level);
    rec.input = rec.transposed ? transpose_spatial(cur) : cur;
    SpatialTensor out = run_up(cfg_.up_at(j), rec.input, j, cfg_);
    cur = rec.transposed ? transpose_spatial(out) : std::move(out);
    rec.output_shape = cur.shape();
    trace.stages.push_back(std::move(rec));
  }
  require_finite(cur, "pipeline output");
  trace.output = std::move(cur);
  return trace;
}

PipelineGradient Pipeline::backward(const PipelineTrace& trace,
                                    const SpatialTensor& cotangent) const {
  PipelineGradient grad;
  grad.alpha.assign(depth_, 0.0);
  grad.beta.assign(depth_, 0.0);
  SpatialTensor g = cotangent;
  for (auto it = trace.stages.rbegin(); it != trace.stages.rend(); ++it) {
    const StageRecord& rec = *it;
    if (!(g.shape() == rec.output_shape)) {
      throw ShapeError("backward: cotangent " + to_string(g.shape()) + " does not match stage output " +
                       to_string(rec.output_shape));
    }
    if (rec.transposed) g = transpose_spatial_vjp(g);
    if (rec.direction == StageDirection::down) {
      switch (cfg_.down_at(rec.level)) {
        case DownKind::pixel_unshuffle:
          g = pixel_unshuffle_vjp(g, 2);
          break;
        case DownKind::flc:
          g = flc_pool_vjp(rec.input.shape(), cfg_, repeat_channels_vjp(g, 4));
          break;
        case DownKind::frequency_preserved: {
          MixedVjp r = fp_down_vjp(rec.input, rec.coefficient, cfg_, g, rec.dropped);
          grad.alpha[rec.coefficient] += r.coefficient;
          g = std::move(r.input);
          break;
        }
      }
    } else {
      switch (cfg_.up_at(rec.coefficient)) {
        case UpKind::pixel_shuffle:
          g = pixel_shuffle_vjp(g, 2);
          break;
        case UpKind::freq_avg_up: {
          MixedVjp r = freq_avg_up_vjp(rec.input, rec.coefficient, cfg_, g);
          grad.beta[rec.coefficient] += r.coefficient;
          g = std::move(r.input);
          break;
        }
        case UpKind::split_up: {
          MixedVjp r = split_up_vjp(rec.input, rec.coefficient, cfg_, g);
          grad.beta[rec.coefficient] += r.coefficient;
          g = std::move(r.input);
          break;
        }
      }
    }
    if (rec.transposed) g = transpose_spatial_vjp(g);
  }
  grad.input = std::move(g);
  return grad;
}

Pipeline compose_pipeline(const SamplerConfig& cfg, std::size_t depth) {
  return Pipeline(cfg, depth);
}

}  // namespace boa
