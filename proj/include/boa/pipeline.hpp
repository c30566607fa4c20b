#pragma once

#include <cstddef>
#include <vector>

#include "boa/sampling.hpp"

namespace boa {

enum class StageDirection { down, up };

// What one executed stage saw, kept for the backward pass.
struct StageRecord {
  StageDirection direction = StageDirection::down;
  std::size_t level = 0;        // resolution level, 0 = full resolution
  std::size_t coefficient = 0;  // index into alpha (down) or beta (up)
  bool transposed = false;
  bool dropped = false;         // Drop-High fired on this call
  SpatialTensor input;          // operator input, after any transpose
  Shape output_shape;           // stage output, after any transpose back
};

struct PipelineTrace {
  std::vector<StageRecord> stages;
  SpatialTensor output;
};

struct PipelineGradient {
  SpatialTensor input;
  std::vector<double> alpha;
  std::vector<double> beta;
};

// depth downsampling stages followed by depth mirrored upsampling stages,
// with no blocks in between. Down stage s runs at level s with alpha[s];
// up stage j runs at level depth - 1 - j with beta[j]. With transpose
// alternation every stage at an even level works on transposed maps.
class Pipeline {
 public:
  Pipeline(SamplerConfig cfg, std::size_t depth);

  const SamplerConfig& config() const { return cfg_; }
  std::size_t depth() const { return depth_; }
  const DropGate& gate() const { return gate_; }

  // Shapes after every stage; throws ShapeError when `input` cannot pass.
  std::vector<Shape> stage_shapes(const Shape& input) const;

  SpatialTensor operator()(const SpatialTensor& x);
  PipelineTrace forward(const SpatialTensor& x);

  // Reverse-mode pass through a recorded forward evaluation.
  PipelineGradient backward(const PipelineTrace& trace, const SpatialTensor& cotangent) const;

 private:
  bool transposed_at(std::size_t level) const;

  SamplerConfig cfg_;
  std::size_t depth_;
  DropGate gate_;
};

Pipeline compose_pipeline(const SamplerConfig& cfg, std::size_t depth);

}  // namespace boa
