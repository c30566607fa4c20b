#include "boa/cli/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "boa/coefficients.hpp"
#include "boa/errors.hpp"

namespace boa::cli {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::roundtrip: return "roundtrip";
    case Command::attack: return "attack";
    case Command::spectrum: return "spectrum";
    case Command::alias_audit: return "alias-audit";
    case Command::gradcheck: return "gradcheck";
  }
  return "?";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::roundtrip, Command::attack, Command::spectrum, Command::alias_audit,
                    Command::gradcheck}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown command '" + name +
                    "' (expected roundtrip, attack, spectrum, alias-audit or gradcheck)");
}

const std::vector<OperatorPreset>& operator_presets() {
  static const std::vector<OperatorPreset> presets = {
      {"pixel_shuffle", DownKind::pixel_unshuffle, UpKind::pixel_shuffle, "", DropMode::never},
      {"flc", DownKind::flc, UpKind::pixel_shuffle, "", DropMode::never},
      {"fp", DownKind::frequency_preserved, UpKind::pixel_shuffle, "fp_pixel_shuffle", DropMode::never},
      {"fp_drop_high", DownKind::frequency_preserved, UpKind::pixel_shuffle, "fp_drop_high",
       DropMode::all_stages},
      {"fp_drop_high_first_step", DownKind::frequency_preserved, UpKind::pixel_shuffle,
       "fp_drop_high_first_step", DropMode::first_stage_only},
      {"boa", DownKind::frequency_preserved, UpKind::freq_avg_up, "boa_freq_avg_up", DropMode::never},
      {"split_up", DownKind::frequency_preserved, UpKind::split_up, "boa_split_up", DropMode::never},
  };
  return presets;
}

const OperatorPreset& operator_preset(std::string_view name) {
  for (const auto& p : operator_presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : operator_presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown operator '" + std::string(name) + "' (known: " + known + ")");
}

std::filesystem::path ExperimentConfig::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) return base_dir / path;
  return path;
}

std::vector<std::filesystem::path> ExperimentConfig::input_paths() const {
  std::vector<std::filesystem::path> out;
  for (const auto& p : inputs) out.push_back(resolve(p));
  return out;
}

SamplerConfig ExperimentConfig::sampler_for(const std::string& op) const {
  const OperatorPreset& preset = operator_preset(op);
  SamplerConfig s = sampler;
  s.down = {preset.down};
  s.up = {preset.up};
  if (coefficients) {
    s.coefficients = *coefficients;
  } else if (!preset.coefficient_set.empty()) {
    s.coefficients = shipped_coefficient_set(preset.coefficient_set).coefficients;
  } else {
    s.coefficients = MixCoefficients::initial(depth);
  }
  if (sampler.drop.mode == DropMode::never) s.drop.mode = preset.drop;
  s.drop.seed = seed;
  return s;
}

AttackConfig ExperimentConfig::attack_config() const {
  AttackConfig a = attack;
  a.seed = seed;
  return a;
}

void ExperimentConfig::validate() const {
  if (id.empty()) throw ConfigError("config: \"id\" must not be empty");
  if (id.find_first_of(",\"\n") != std::string::npos) {
    throw ConfigError("config: \"id\" must not contain commas, quotes or newlines");
  }
  if (depth == 0) throw ConfigError("config: \"depth\" must be >= 1");
  if (operators.empty()) throw ConfigError("config: \"operators\" must list at least one operator");
  for (const auto& op : operators) operator_preset(op);
  sampler.drop.validate();
  attack.validate();
  for (std::size_t b : budgets) {
    if (b == 0) throw ConfigError("config: attack budgets must be >= 1");
  }
  if (coefficients) {
    for (double a : coefficients->alpha) check_mix_coefficient(a, "alpha");
    for (double b : coefficients->beta) check_mix_coefficient(b, "beta");
  }
  if (alias_grid < 4 || alias_grid % 2 != 0) {
    throw ConfigError("config: \"alias_grid\" must be even and >= 4");
  }
  if (synthetic.count > 0 && (synthetic.rows == 0 || synthetic.cols == 0 || synthetic.channels == 0)) {
    throw ConfigError("config: synthetic corpus dims must be nonzero");
  }
  const bool needs_images = command == Command::roundtrip || command == Command::attack ||
                            command == Command::spectrum;
  if (needs_images && inputs.empty() && synthetic.count == 0) {
    throw ConfigError(std::string("config: command '") + to_string(command) +
                      "' needs \"inputs\" or a nonzero \"synthetic.count\" (empty corpus)");
  }
  for (const auto& p : input_paths()) {
    if (!std::filesystem::is_regular_file(p)) {
      throw IoError("input file not found: " + p.string());
    }
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return id == o.id && command == o.command && inputs == o.inputs && synthetic == o.synthetic &&
         output_dir == o.output_dir && operators == o.operators && depth == o.depth &&
         seed == o.seed && sampler == o.sampler && coefficients == o.coefficients &&
         attack == o.attack && budgets == o.budgets && alias_grid == o.alias_grid;
}

std::string to_json(const ExperimentConfig& cfg) {
  json j;
  j["id"] = cfg.id;
  j["command"] = to_string(cfg.command);
  j["inputs"] = cfg.inputs;
  j["synthetic"] = {{"count", cfg.synthetic.count},
                    {"rows", cfg.synthetic.rows},
                    {"cols", cfg.synthetic.cols},
                    {"channels", cfg.synthetic.channels}};
  j["output_dir"] = cfg.output_dir;
  j["operators"] = cfg.operators;
  j["depth"] = cfg.depth;
  j["seed"] = cfg.seed;
  j["sampler"] = {{"padding", to_string(cfg.sampler.padding)},
                  {"periodic", cfg.sampler.periodic},
                  {"transpose_alternation", cfg.sampler.transpose_alternation},
                  {"drop",
                   {{"mode", to_string(cfg.sampler.drop.mode)},
                    {"probability", cfg.sampler.drop.probability},
                    {"training", cfg.sampler.drop.training}}}};
  if (cfg.coefficients) {
    j["coefficients"] = {{"alpha", cfg.coefficients->alpha}, {"beta", cfg.coefficients->beta}};
  }
  j["attack"] = {{"epsilon", cfg.attack.epsilon.to_string()},
                 {"step_size", cfg.attack.step_size},
                 {"loss", to_string(cfg.attack.loss)},
                 {"random_start", cfg.attack.random_start},
                 {"budgets", cfg.budgets}};
  j["alias_grid"] = cfg.alias_grid;
  return j.dump(2) + "\n";
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    bool ok = false;
    for (const char* known : keys) ok = ok || k == known;
    if (!ok) throw ConfigError("config: unknown key \"" + k + "\" in " + where);
  }
}

}  // namespace

ExperimentConfig from_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  try {
    reject_unknown(j,
                   {"id", "command", "inputs", "synthetic", "output_dir", "operators", "depth", "seed",
                    "sampler", "coefficients", "attack", "alias_grid"},
                   "top level");
    read_opt(j, "id", cfg.id);
    if (j.contains("command")) cfg.command = command_from_string(j["command"].get<std::string>());
    read_opt(j, "inputs", cfg.inputs);
    if (j.contains("synthetic")) {
      const json& s = j["synthetic"];
      reject_unknown(s, {"count", "rows", "cols", "channels"}, "synthetic");
      read_opt(s, "count", cfg.synthetic.count);
      read_opt(s, "rows", cfg.synthetic.rows);
      read_opt(s, "cols", cfg.synthetic.cols);
      read_opt(s, "channels", cfg.synthetic.channels);
    }
    read_opt(j, "output_dir", cfg.output_dir);
    if (j.contains("operators")) {
      if (j["operators"].is_string()) {
        cfg.operators = {j["operators"].get<std::string>()};
      } else {
        cfg.operators = j["operators"].get<std::vector<std::string>>();
      }
    }
    read_opt(j, "depth", cfg.depth);
    read_opt(j, "seed", cfg.seed);
    if (j.contains("sampler")) {
      const json& s = j["sampler"];
      reject_unknown(s, {"padding", "periodic", "transpose_alternation", "drop"},
                     "sampler");
      if (s.contains("padding")) cfg.sampler.padding = pad_mode_from_string(s["padding"].get<std::string>());
      read_opt(s, "periodic", cfg.sampler.periodic);
      read_opt(s, "transpose_alternation", cfg.sampler.transpose_alternation);
      if (s.contains("drop")) {
        const json& d = s["drop"];
        reject_unknown(d, {"mode", "probability", "training"}, "sampler.drop");
        if (d.contains("mode")) cfg.sampler.drop.mode = drop_mode_from_string(d["mode"].get<std::string>());
        read_opt(d, "probability", cfg.sampler.drop.probability);
        read_opt(d, "training", cfg.sampler.drop.training);
      }
    }
    if (j.contains("coefficients")) {
      const json& c = j["coefficients"];
      reject_unknown(c, {"alpha", "beta"}, "coefficients");
      MixCoefficients m;
      m.alpha = c.at("alpha").get<std::vector<double>>();
      if (c.contains("beta")) {
        m.beta = c["beta"].get<std::vector<double>>();
      } else {
        m.beta.assign(m.alpha.size(), MixCoefficients::kInitialValue);
      }
      cfg.coefficients = m;
    }
    if (j.contains("attack")) {
      const json& a = j["attack"];
      reject_unknown(a, {"epsilon", "step_size", "loss", "random_start", "budgets"}, "attack");
      if (a.contains("epsilon")) {
        const json& e = a["epsilon"];
        cfg.attack.epsilon = Rational::parse(e.is_string() ? e.get<std::string>() : e.dump());
      }
      read_opt(a, "step_size", cfg.attack.step_size);
      if (a.contains("loss")) cfg.attack.loss = loss_kind_from_string(a["loss"].get<std::string>());
      read_opt(a, "random_start", cfg.attack.random_start);
      read_opt(a, "budgets", cfg.budgets);
    }
    read_opt(j, "alias_grid", cfg.alias_grid);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), path.parent_path());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig cfg = read_config(path);
  cfg.validate();
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.output_dir) cfg.output_dir = std::filesystem::absolute(*o.output_dir).string();
  if (o.seed) cfg.seed = *o.seed;
  if (o.depth) cfg.depth = *o.depth;
  if (o.op) cfg.operators = {*o.op};
}

}  // namespace boa::cli
