#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boa/attack.hpp"
#include "boa/sampling.hpp"

namespace boa::cli {

enum class Command { roundtrip, attack, spectrum, alias_audit, gradcheck };

const char* to_string(Command c);
Command command_from_string(const std::string& name);

// Named down/up pairing plus the coefficient set it ships with.
struct OperatorPreset {
  std::string name;
  DownKind down;
  UpKind up;
  std::string coefficient_set;  // empty: operator has no learned weights
  DropMode drop = DropMode::never;
};

const std::vector<OperatorPreset>& operator_presets();
const OperatorPreset& operator_preset(std::string_view name);

// Deterministic generated corpus used when no PNGs are given.
struct SyntheticCorpus {
  std::size_t count = 0;
  std::size_t rows = 32;
  std::size_t cols = 32;
  std::size_t channels = 3;

  bool operator==(const SyntheticCorpus&) const = default;
};

struct ExperimentConfig {
  std::string id = "experiment";
  Command command = Command::roundtrip;
  // Paths exactly as written; relative ones resolve against base_dir.
  std::vector<std::string> inputs;
  SyntheticCorpus synthetic;
  std::string output_dir = "out";
  std::vector<std::string> operators{"boa"};
  std::size_t depth = 3;
  std::uint64_t seed = 0;

  // Padding, periodic mode, transposition and Drop-High settings shared by
  // every operator. down/up/coefficients are replaced per preset.
  SamplerConfig sampler;
  // When set, used instead of each preset's shipped coefficients.
  std::optional<MixCoefficients> coefficients;

  AttackConfig attack;
  std::vector<std::size_t> budgets{5, 10, 20};

  std::size_t alias_grid = 16;

  std::filesystem::path base_dir;  // not serialized

  std::filesystem::path resolve(const std::string& p) const;
  std::vector<std::filesystem::path> input_paths() const;
  std::filesystem::path output_path() const { return resolve(output_dir); }

  // Sampler for one named operator: preset kinds and coefficients merged
  // with the shared settings, seeded from `seed`.
  SamplerConfig sampler_for(const std::string& op) const;
  AttackConfig attack_config() const;

  // Structural checks plus existence of every referenced input.
  void validate() const;

  bool operator==(const ExperimentConfig& o) const;
};

std::string to_json(const ExperimentConfig& cfg);
ExperimentConfig from_json(std::string_view text, const std::filesystem::path& base_dir = {});

// Reads and parses; base_dir is the file's directory. No validation.
ExperimentConfig read_config(const std::filesystem::path& path);
// read_config followed by validate().
ExperimentConfig load_config(const std::filesystem::path& path);

// Command-line overrides; each set field replaces the JSON value.
struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> depth;
  std::optional<std::string> op;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

}  // namespace boa::cli
