#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "boa/cli/config.hpp"
#include "boa/tensor.hpp"

namespace boa::cli {

// Fixed CSV layout shared by roundtrip and attack.
inline constexpr const char* kCsvHeader =
    "experiment_id,operator,iterations,clean_psnr,clean_ssim,attacked_psnr,attacked_ssim,alias_ratio";

struct CsvRow {
  std::string experiment_id;
  std::string op;
  std::size_t iterations = 0;
  double clean_psnr = 0.0;
  double clean_ssim = 0.0;
  double attacked_psnr = 0.0;
  double attacked_ssim = 0.0;
  double alias_ratio = 0.0;
};

// %.6g formatting.
std::string format_float(double v);
std::string format_row(const CsvRow& row);

struct CorpusItem {
  std::string stem;
  std::size_t channels = 0;  // channels before lifting to a multiple of 4
  SpatialTensor tensor;
};

// PNG inputs in order, then the synthetic images.
std::vector<CorpusItem> load_corpus(const ExperimentConfig& cfg);

// Aliasing energy ratio of an operator preset's downsampler at 3/8 cycles
// per sample on both axes.
double reference_alias_ratio(const ExperimentConfig& cfg, const std::string& op);

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::string report;
};

CommandOutcome cmd_roundtrip(const ExperimentConfig& cfg);
CommandOutcome cmd_attack(const ExperimentConfig& cfg);
CommandOutcome cmd_spectrum(const ExperimentConfig& cfg);
CommandOutcome cmd_alias_audit(const ExperimentConfig& cfg);
CommandOutcome cmd_gradcheck(const ExperimentConfig& cfg);

CommandOutcome run_command(const ExperimentConfig& cfg);

}  // namespace boa::cli
