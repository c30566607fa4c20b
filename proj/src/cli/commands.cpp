#include "boa/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "boa/attack.hpp"
#include "boa/autodiff.hpp"
#include "boa/cli/image_io.hpp"
#include "boa/errors.hpp"
#include "boa/metrics.hpp"
#include "boa/pipeline.hpp"

namespace boa::cli {

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_row(const CsvRow& r) {
  std::string s = r.experiment_id + "," + r.op + "," + std::to_string(r.iterations);
  for (double v : {r.clean_psnr, r.clean_ssim, r.attacked_psnr, r.attacked_ssim, r.alias_ratio}) {
    s += "," + format_float(v);
  }
  return s;
}

std::vector<CorpusItem> load_corpus(const ExperimentConfig& cfg) {
  std::vector<CorpusItem> items;
  for (const auto& path : cfg.input_paths()) {
    Image img = read_png(path);
    items.push_back({path.stem().string(), img.channels, image_to_tensor(img)});
  }
  for (std::size_t i = 0; i < cfg.synthetic.count; ++i) {
    Image img = synthetic_image(cfg.synthetic.rows, cfg.synthetic.cols, cfg.synthetic.channels, cfg.seed + i);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "synthetic_%03zu", i);
    items.push_back({stem, img.channels, image_to_tensor(img)});
  }
  return items;
}

double reference_alias_ratio(const ExperimentConfig& cfg, const std::string& op) {
  const OperatorPreset& preset = operator_preset(op);
  const SamplerConfig sampler = cfg.sampler_for(op);
  AliasProbe probe;
  probe.rows = probe.cols = cfg.alias_grid;
  probe.ky = probe.kx = static_cast<long>(3 * cfg.alias_grid / 8);
  switch (preset.down) {
    case DownKind::pixel_unshuffle:
      return aliasing_energy_ratio(AliasOperator::pixel_unshuffle, probe).ratio;
    case DownKind::flc:
      return aliasing_energy_ratio(AliasOperator::flc_pool, probe).ratio;
    case DownKind::frequency_preserved:
      return aliasing_energy_ratio(AliasOperator::fp_down, probe, sampler.coefficients.alpha_at(0)).ratio;
  }
  return 0.0;
}

namespace {

std::filesystem::path prepare_out(const ExperimentConfig& cfg) {
  const auto out = cfg.output_path();
  std::filesystem::create_directories(out);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text, CommandOutcome& outcome) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
  outcome.files.push_back(path);
}

void write_image(const std::filesystem::path& path, const Image& img, CommandOutcome& outcome) {
  write_png(path, img);
  outcome.files.push_back(path);
}

std::vector<CorpusItem> require_corpus(const ExperimentConfig& cfg) {
  auto corpus = load_corpus(cfg);
  if (corpus.empty()) throw ConfigError("empty corpus: give \"inputs\" or \"synthetic.count\"");
  return corpus;
}

}  // namespace

CommandOutcome cmd_roundtrip(const ExperimentConfig& cfg) {
  CommandOutcome outcome;
  const auto corpus = require_corpus(cfg);
  const auto out = prepare_out(cfg);
  std::string csv = std::string(kCsvHeader) + "\n";
  for (const auto& op : cfg.operators) {
    const Pipeline proto(cfg.sampler_for(op), cfg.depth);
    CsvRow row{cfg.id, op};
    for (const auto& item : corpus) {
      Pipeline pipe = proto;
      const SpatialTensor y = pipe(item.tensor);
      const QualityScores q = quality(y, item.tensor);
      row.clean_psnr += q.psnr / static_cast<double>(corpus.size());
      row.clean_ssim += q.ssim / static_cast<double>(corpus.size());
      write_image(out / (item.stem + "_" + op + ".png"), tensor_to_image(y, item.channels), outcome);
    }
    row.attacked_psnr = row.clean_psnr;
    row.attacked_ssim = row.clean_ssim;
    row.alias_ratio = reference_alias_ratio(cfg, op);
    csv += format_row(row) + "\n";
  }
  write_text(out / "roundtrip.csv", csv, outcome);
  outcome.report = csv;
  return outcome;
}

CommandOutcome cmd_attack(const ExperimentConfig& cfg) {
  CommandOutcome outcome;
  const auto corpus = require_corpus(cfg);
  const auto out = prepare_out(cfg);
  std::vector<Sample> samples;
  for (const auto& item : corpus) samples.push_back({item.stem, item.tensor, item.tensor});
  const AttackConfig attack = cfg.attack_config();
  const double eps = attack.epsilon.value();
  std::string csv = std::string(kCsvHeader) + "\n";
  for (const auto& op : cfg.operators) {
    const Pipeline pipe(cfg.sampler_for(op), cfg.depth);
    const PipelineReport report = evaluate_under_attack(pipe, samples, attack, cfg.budgets);
    const double alias = reference_alias_ratio(cfg, op);
    for (const auto& b : report.attacked) {
      CsvRow row{cfg.id, op, b.iterations, report.clean_psnr, report.clean_ssim, b.psnr, b.ssim, alias};
      csv += format_row(row) + "\n";
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      for (std::size_t k = 0; k < cfg.budgets.size(); ++k) {
        const SpatialTensor& adv = report.trajectories[i][k].adversarial;
        SpatialTensor diff = adv - corpus[i].tensor;
        for (double& v : diff.data()) v = 0.5 + v / (2.0 * eps);
        write_image(out / (corpus[i].stem + "_" + op + "_it" + std::to_string(cfg.budgets[k]) + "_diff.png"),
                    tensor_to_image(diff, corpus[i].channels), outcome);
      }
    }
  }
  write_text(out / "attack.csv", csv, outcome);
  outcome.report = csv;
  return outcome;
}

CommandOutcome cmd_spectrum(const ExperimentConfig& cfg) {
  CommandOutcome outcome;
  const auto corpus = require_corpus(cfg);
  const auto out = prepare_out(cfg);
  for (const auto& item : corpus) {
    write_image(out / (item.stem + "_spectrum_input.png"), gray_to_image(spectrum_image(item.tensor, 0)),
                outcome);
    for (const auto& op : cfg.operators) {
      Pipeline pipe(cfg.sampler_for(op), cfg.depth);
      const PipelineTrace trace = pipe.forward(item.tensor);
      for (std::size_t k = 0; k < trace.stages.size(); ++k) {
        SpatialTensor stage_out;
        if (k + 1 < trace.stages.size()) {
          const StageRecord& next = trace.stages[k + 1];
          stage_out = next.transposed ? transpose_spatial(next.input) : next.input;
        } else {
          stage_out = trace.output;
        }
        const StageRecord& rec = trace.stages[k];
        const std::string name = item.stem + "_" + op + "_s" + std::to_string(k) +
                                 (rec.direction == StageDirection::down ? "_down" : "_up") + ".png";
        write_image(out / name, gray_to_image(spectrum_image(stage_out, 0)), outcome);
      }
      write_image(out / (item.stem + "_" + op + "_spectrum_output.png"),
                  gray_to_image(spectrum_image(trace.output, 0)), outcome);
    }
  }
  outcome.report = std::to_string(outcome.files.size()) + " spectrum images written\n";
  return outcome;
}

CommandOutcome cmd_alias_audit(const ExperimentConfig& cfg) {
  CommandOutcome outcome;
  const auto out = prepare_out(cfg);
  const double alpha = cfg.coefficients ? cfg.coefficients->alpha_at(0) : MixCoefficients::kInitialValue;
  std::string csv = "experiment_id,operator,ky,kx,fy,fx,energy_in,energy_out,ratio\n";
  const long n = static_cast<long>(cfg.alias_grid);
  for (AliasOperator op : {AliasOperator::pixel_unshuffle, AliasOperator::flc_pool,
                           AliasOperator::fp_low_path, AliasOperator::fp_down}) {
    for (long ky = -n / 2 + 1; ky <= n / 2; ++ky)
      for (long kx = -n / 2 + 1; kx <= n / 2; ++kx) {
        AliasProbe probe{ky, kx, cfg.alias_grid, cfg.alias_grid};
        if (probe_in_retained_band(probe)) continue;
        const AliasReport r = aliasing_energy_ratio(op, probe, alpha);
        csv += cfg.id + "," + to_string(op) + "," + std::to_string(ky) + "," + std::to_string(kx);
        for (double v : {r.fy, r.fx, r.energy_in, r.energy_out, r.ratio}) csv += "," + format_float(v);
        csv += "\n";
      }
  }
  write_text(out / "alias_audit.csv", csv, outcome);
  outcome.report = csv;
  return outcome;
}

CommandOutcome cmd_gradcheck(const ExperimentConfig& cfg) {
  CommandOutcome outcome;
  const auto out = prepare_out(cfg);
  std::ostringstream report;
  bool ok = true;
  for (const auto& name : registered_ops()) {
    const DifferentiableOp op = make_op(name);
    const auto input = op.sample_input(cfg.seed);
    const GradCheckReport r = finite_difference_check(op, input, 1e-5, 20, cfg.seed);
    const double threshold = name.rfind("pipeline_", 0) == 0 ? 1e-4 : 1e-5;
    const bool pass = r.max_relative_error < threshold;
    ok = ok && pass;
    char line[160];
    std::snprintf(line, sizeof(line), "%-28s max_rel_err=%.3e threshold=%.0e %s\n", name.c_str(),
                  r.max_relative_error, threshold, pass ? "PASS" : "FAIL");
    report << line;
  }
  write_text(out / "gradcheck.txt", report.str(), outcome);
  outcome.report = report.str();
  outcome.exit_code = ok ? 0 : 1;
  return outcome;
}

CommandOutcome run_command(const ExperimentConfig& cfg) {
  switch (cfg.command) {
    case Command::roundtrip: return cmd_roundtrip(cfg);
    case Command::attack: return cmd_attack(cfg);
    case Command::spectrum: return cmd_spectrum(cfg);
    case Command::alias_audit: return cmd_alias_audit(cfg);
    case Command::gradcheck: return cmd_gradcheck(cfg);
  }
  throw ConfigError("unhandled command");
}

}  // namespace boa::cli
