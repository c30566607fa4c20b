#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "boa/pipeline.hpp"
#include "boa/tensor.hpp"

namespace boa {

// Exact rational, so the default L-infinity budget is 8/255 and not a
// rounded decimal.
struct Rational {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  std::string to_string() const;
  static Rational parse(const std::string& text);

  bool operator==(const Rational&) const = default;
};

enum class LossKind { mse, l1 };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct AttackConfig {
  Rational epsilon{8, 255};
  double step_size = 0.01;
  std::size_t iterations = 10;
  LossKind loss = LossKind::mse;
  std::uint64_t seed = 0;
  bool random_start = false;

  void validate() const;
  bool operator==(const AttackConfig&) const = default;
};

// Loss seam: value and gradient with respect to the pipeline output.
struct AttackLoss {
  std::function<double(const SpatialTensor& output, const SpatialTensor& target)> value;
  std::function<SpatialTensor(const SpatialTensor& output, const SpatialTensor& target)> gradient;
};

AttackLoss make_loss(LossKind kind);

struct AttackTrajectory {
  std::vector<double> losses;  // initial loss, then one per iteration
  SpatialTensor adversarial;
  double psnr = 0.0;           // final pipeline output vs. target
};

// Carries the iterations completed before the gradient went non-finite.
class NonFiniteGradientError : public Error {
 public:
  NonFiniteGradientError(const std::string& what, AttackTrajectory partial)
      : Error(what), partial_(std::move(partial)) {}
  const AttackTrajectory& partial() const { return partial_; }

 private:
  AttackTrajectory partial_;
};

// L-infinity PGD:
//   x_{t+1} = clip_[0,1]( proj_{|x - x0| <= eps}( x_t + step * sign(grad_x loss) ) )
// sign(0) = 0. Deterministic for a given cfg.seed.
AttackTrajectory pgd(Pipeline& pipeline, const SpatialTensor& x0, const SpatialTensor& target,
                     const AttackConfig& cfg);
AttackTrajectory pgd(Pipeline& pipeline, const SpatialTensor& x0, const SpatialTensor& target,
                     const AttackConfig& cfg, const AttackLoss& loss);

struct Sample {
  std::string id;
  SpatialTensor input;
  SpatialTensor target;
};

struct BudgetScores {
  std::size_t iterations = 0;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct PipelineReport {
  std::vector<Shape> stage_shapes;
  double clean_psnr = 0.0;
  double clean_ssim = 0.0;
  std::vector<BudgetScores> attacked;
  // Per sample, per budget (same order as `attacked`).
  std::vector<std::vector<AttackTrajectory>> trajectories;
};

// Mean clean and attacked PSNR/SSIM of pipeline(input) vs. target over the
// corpus, one attack per budget started from the clean input. Samples run
// in parallel (capped by BOA_THREADS); results do not depend on the thread count.
PipelineReport evaluate_under_attack(const Pipeline& pipeline, const std::vector<Sample>& corpus,
                                     const AttackConfig& cfg,
                                     const std::vector<std::size_t>& budgets = {5, 10, 20});

// Worker count from BOA_THREADS (>= 1), defaulting to the hardware concurrency.
std::size_t thread_budget();

}  // namespace boa
