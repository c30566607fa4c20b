#include "boa/attack.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include "boa/metrics.hpp"

namespace boa {

std::string Rational::to_string() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

namespace {

std::int64_t parse_int(std::string_view s, const std::string& whole) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("cannot parse rational '" + whole + "'");
  }
  return v;
}

Rational reduced(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ConfigError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

}  // namespace

Rational Rational::parse(const std::string& text) {
  const std::string_view s(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    return reduced(parse_int(s.substr(0, slash), text), parse_int(s.substr(slash + 1), text));
  }
  // Decimal literal, kept exact: "0.25" -> 1/4.
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return {parse_int(s, text), 1};
  const std::string_view frac = s.substr(dot + 1);
  if (frac.size() > 15) throw ConfigError("too many decimal places in '" + text + "'");
  std::string digits(s.substr(0, dot));
  const bool negative = !digits.empty() && digits[0] == '-';
  if (digits.empty() || digits == "-" || digits == "+") digits += "0";
  digits += frac;
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::int64_t num = parse_int(digits[0] == '+' ? std::string_view(digits).substr(1) : digits, text);
  if (negative && num > 0) num = -num;
  return reduced(num, den);
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::mse: return "mse";
    case LossKind::l1: return "l1";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "l1") return LossKind::l1;
  throw ConfigError("unknown loss '" + name + "' (expected mse or l1)");
}

void AttackConfig::validate() const {
  if (epsilon.denominator <= 0 || epsilon.numerator <= 0) {
    throw ConfigError("epsilon must be a positive rational, got " + epsilon.to_string());
  }
  if (!std::isfinite(step_size) || step_size < 0.0) {
    throw ConfigError("step_size must be finite and non-negative");
  }
  if (iterations == 0) throw ConfigError("iterations must be >= 1");
}

AttackLoss make_loss(LossKind kind) {
  auto check = [](const SpatialTensor& y, const SpatialTensor& t) {
    if (!(y.shape() == t.shape())) {
      throw ShapeError("loss: output " + to_string(y.shape()) + " vs target " + to_string(t.shape()));
    }
  };
  AttackLoss loss;
  if (kind == LossKind::mse) {
    loss.value = [check](const SpatialTensor& y, const SpatialTensor& t) {
      check(y, t);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y.data()[i] - t.data()[i];
        acc += d * d;
      }
      return acc / static_cast<double>(y.size());
    };
    loss.gradient = [check](const SpatialTensor& y, const SpatialTensor& t) {
      check(y, t);
      const double scale = 2.0 / static_cast<double>(y.size());
      return scale * (y - t);
    };
  } else {
    loss.value = [check](const SpatialTensor& y, const SpatialTensor& t) {
      check(y, t);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y.data()[i] - t.data()[i]);
      return acc / static_cast<double>(y.size());
    };
    loss.gradient = [check](const SpatialTensor& y, const SpatialTensor& t) {
      check(y, t);
      SpatialTensor g(y.shape());
      const double scale = 1.0 / static_cast<double>(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y.data()[i] - t.data()[i];
        g.data()[i] = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
      }
      return g;
    };
  }
  return loss;
}

AttackTrajectory pgd(Pipeline& pipeline, const SpatialTensor& x0, const SpatialTensor& target,
                     const AttackConfig& cfg) {
  return pgd(pipeline, x0, target, cfg, make_loss(cfg.loss));
}

AttackTrajectory pgd(Pipeline& pipeline, const SpatialTensor& x0, const SpatialTensor& target,
                     const AttackConfig& cfg, const AttackLoss& loss) {
  cfg.validate();
  const Shape out_shape = pipeline.stage_shapes(x0.shape()).back();
  if (!(out_shape == target.shape())) {
    throw ShapeError("pgd: pipeline output " + to_string(out_shape) + " does not match target " +
                     to_string(target.shape()));
  }
  require_finite(x0, "pgd start");
  const double eps = cfg.epsilon.value();
  const std::size_t n = x0.size();
  auto lower = [&](std::size_t i) { return std::max(0.0, x0.data()[i] - eps); };
  auto upper = [&](std::size_t i) { return std::min(1.0, x0.data()[i] + eps); };

  SpatialTensor x = x0;
  if (cfg.random_start) {
    std::mt19937_64 engine(cfg.seed);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      x.data()[i] = std::clamp(x0.data()[i] + eps * (2.0 * u - 1.0), lower(i), upper(i));
    }
  }

  AttackTrajectory traj;
  traj.losses.reserve(cfg.iterations + 1);
  PipelineTrace trace = pipeline.forward(x);
  traj.losses.push_back(loss.value(trace.output, target));
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    const SpatialTensor grad = pipeline.backward(trace, loss.gradient(trace.output, target)).input;
    if (!all_finite(grad)) {
      traj.adversarial = x;
      traj.psnr = psnr(trace.output, target);
      throw NonFiniteGradientError("pgd: non-finite input gradient at iteration " + std::to_string(t + 1),
                                   std::move(traj));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad.data()[i];
      const double s = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
      x.data()[i] = std::clamp(x.data()[i] + cfg.step_size * s, lower(i), upper(i));
    }
    trace = pipeline.forward(x);
    traj.losses.push_back(loss.value(trace.output, target));
  }
  traj.psnr = psnr(trace.output, target);
  traj.adversarial = std::move(x);
  return traj;
}

std::size_t thread_budget() {
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BOA_THREADS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v >= 1) return v;
  }
  return hw;
}

namespace {

struct SampleResult {
  QualityScores clean;
  std::vector<QualityScores> attacked;
  std::vector<AttackTrajectory> trajectories;
};

SampleResult evaluate_sample(const Pipeline& proto, const Sample& s, std::size_t index,
                             const AttackConfig& cfg, const std::vector<std::size_t>& budgets) {
  SampleResult r;
  Pipeline clean_pipe = proto;
  r.clean = quality(clean_pipe(s.input), s.target);
  for (std::size_t b : budgets) {
    AttackConfig c = cfg;
    c.iterations = b;
    c.seed = cfg.seed + index;
    Pipeline attack_pipe = proto;
    AttackTrajectory traj = pgd(attack_pipe, s.input, s.target, c);
    Pipeline eval_pipe = proto;
    r.attacked.push_back(quality(eval_pipe(traj.adversarial), s.target));
    r.trajectories.push_back(std::move(traj));
  }
  return r;
}

}  // namespace

PipelineReport evaluate_under_attack(const Pipeline& pipeline, const std::vector<Sample>& corpus,
                                     const AttackConfig& cfg, const std::vector<std::size_t>& budgets) {
  if (corpus.empty()) throw ConfigError("evaluate_under_attack: corpus is empty");
  for (std::size_t b : budgets) {
    AttackConfig c = cfg;
    c.iterations = b;
    c.validate();
  }
  PipelineReport report;
  report.stage_shapes = pipeline.stage_shapes(corpus.front().input.shape());

  std::vector<SampleResult> results(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        results[i] = evaluate_sample(pipeline, corpus[i], i, cfg, budgets);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(thread_budget(), corpus.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double count = static_cast<double>(corpus.size());
  report.attacked.resize(budgets.size());
  for (std::size_t k = 0; k < budgets.size(); ++k) report.attacked[k].iterations = budgets[k];
  for (auto& r : results) {
    report.clean_psnr += r.clean.psnr / count;
    report.clean_ssim += r.clean.ssim / count;
    for (std::size_t k = 0; k < budgets.size(); ++k) {
      report.attacked[k].psnr += r.attacked[k].psnr / count;
      report.attacked[k].ssim += r.attacked[k].ssim / count;
    }
    report.trajectories.push_back(std::move(r.trajectories));
  }
  return report;
}

}  // namespace boa
