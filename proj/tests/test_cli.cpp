#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "boa/cli/commands.hpp"
#include "boa/cli/image_io.hpp"
#include "boa/coefficients.hpp"
#include "boa/metrics.hpp"
#include "boa/pipeline.hpp"
#include "support.hpp"

using namespace boa;
using namespace boa::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("boa_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

Image bandlimited_png(std::size_t rows, std::size_t cols) {
  Image img{rows, cols, 1, std::vector<std::uint8_t>(rows * cols)};
  const auto x = test::bandlimited({1, 1, rows, cols}, 2, 2, 9);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(0.5 + 0.3 * x.data()[i], 0.0, 1.0) * 255));
  }
  return img;
}

int run_boa(const std::string& args) {
  const std::string cmd = std::string(BOA_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config JSON round-trips losslessly") {
  ExperimentConfig cfg;
  cfg.id = "exp1";
  cfg.command = Command::attack;
  cfg.inputs = {"a.png", "/abs/b.png"};
  cfg.synthetic = {4, 16, 24, 1};
  cfg.operators = {"boa", "fp", "pixel_shuffle"};
  cfg.depth = 2;
  cfg.seed = 123456789012345ULL;
  cfg.sampler.padding = PadMode::replicate;
  cfg.sampler.periodic = true;
  cfg.sampler.transpose_alternation = true;
  cfg.sampler.drop = {DropMode::first_stage_only, 0.25, 0, true};
  cfg.coefficients = MixCoefficients{{0.1, 0.2}, {0.3, 0.4}};
  cfg.attack.epsilon = {4, 255};
  cfg.attack.step_size = 0.0123456789;
  cfg.attack.loss = LossKind::l1;
  cfg.attack.random_start = true;
  cfg.budgets = {1, 2};
  cfg.alias_grid = 32;
  const std::string text = to_json(cfg);
  const ExperimentConfig back = from_json(text);
  CHECK(back == cfg);
  CHECK(to_json(back) == text);
  CHECK(from_json(to_json(ExperimentConfig{})) == ExperimentConfig{});
}

TEST_CASE("config parsing errors") {
  CHECK_THROWS_AS(from_json("{"), ConfigError);
  CHECK_THROWS_AS(from_json("[]"), ConfigError);
  CHECK_THROWS_AS(from_json(R"({"colour": 1})"), ConfigError);
  CHECK_THROWS_AS(from_json(R"({"command": "train"})"), ConfigError);
  CHECK_THROWS_AS(from_json(R"({"depth": "three"})"), ConfigError);
  CHECK_THROWS_AS(from_json(R"({"attack": {"epsilon": "x/y"}})"), ConfigError);
  CHECK(from_json(R"({"attack": {"epsilon": 0.5}})").attack.epsilon == Rational{1, 2});
  CHECK(from_json(R"({"operators": "fp"})").operators == std::vector<std::string>{"fp"});
  auto cfg = from_json(R"({"operators": ["bilinear"], "synthetic": {"count": 1}})");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = from_json(R"({"command": "attack"})");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);  // empty corpus
  cfg = from_json(R"({"command": "gradcheck"})");
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("paths resolve against the config directory and must exist") {
  TempDir dir("paths");
  write_png(dir.path / "img.png", bandlimited_png(8, 8));
  write_file(dir.path / "ok.json", R"({"inputs": ["img.png"], "output_dir": "results"})");
  const auto cfg = load_config(dir.path / "ok.json");
  CHECK(cfg.input_paths().front() == dir.path / "img.png");
  CHECK(cfg.output_path() == dir.path / "results");
  write_file(dir.path / "bad.json", R"({"inputs": ["missing.png"]})");
  CHECK_THROWS_AS(load_config(dir.path / "bad.json"), IoError);
  CHECK_THROWS_AS(load_config(dir.path / "nope.json"), IoError);
}

TEST_CASE("command-line overrides take precedence") {
  auto cfg = from_json(R"({"seed": 1, "depth": 3, "operators": ["boa", "fp"], "output_dir": "x"})", "/base");
  Overrides o;
  o.seed = 9;
  o.depth = 2;
  o.op = "flc";
  o.output_dir = "/tmp/override";
  apply_overrides(cfg, o);
  CHECK(cfg.seed == 9);
  CHECK(cfg.depth == 2);
  CHECK(cfg.operators == std::vector<std::string>{"flc"});
  CHECK(cfg.output_path() == fs::path("/tmp/override"));
}

TEST_CASE("operator presets carry the shipped coefficients") {
  ExperimentConfig cfg;
  const auto boa = cfg.sampler_for("boa");
  CHECK(boa.down == std::vector<DownKind>{DownKind::frequency_preserved});
  CHECK(boa.up == std::vector<UpKind>{UpKind::freq_avg_up});
  CHECK(boa.coefficients == shipped_coefficient_set("boa_freq_avg_up").coefficients);
  CHECK(cfg.sampler_for("fp_drop_high").drop.mode == DropMode::all_stages);
  CHECK(cfg.sampler_for("fp_drop_high_first_step").drop.mode == DropMode::first_stage_only);
  CHECK(cfg.sampler_for("pixel_shuffle").down == std::vector<DownKind>{DownKind::pixel_unshuffle});
  cfg.coefficients = MixCoefficients{{0.0}, {0.0}};
  CHECK(cfg.sampler_for("split_up").coefficients.alpha == std::vector<double>{0.0});
  CHECK_THROWS_AS(operator_preset("maxpool"), ConfigError);
  CHECK(operator_presets().size() == 7);
}

TEST_CASE("PNG encode and decode") {
  TempDir dir("png");
  const Image rgb = synthetic_image(12, 10, 3, 4);
  write_png(dir.path / "rgb.png", rgb);
  CHECK(read_png(dir.path / "rgb.png") == rgb);
  const std::string bytes = slurp(dir.path / "rgb.png");
  write_png(dir.path / "again.png", read_png(dir.path / "rgb.png"));
  CHECK(slurp(dir.path / "again.png") == bytes);
  const Image gray = synthetic_image(7, 9, 1, 5);
  write_png(dir.path / "gray.png", gray);
  CHECK(read_png(dir.path / "gray.png") == gray);
  write_file(dir.path / "junk.png", "not a png");
  CHECK_THROWS_AS(read_png(dir.path / "junk.png"), DecodeError);
  CHECK_THROWS_AS(read_png(dir.path / "absent.png"), IoError);
}

TEST_CASE("image to tensor conventions") {
  Image img{1, 2, 3, {0, 128, 255, 10, 20, 30}};
  const auto t = image_to_tensor(img);
  CHECK(t.shape() == Shape{1, 4, 1, 2});
  CHECK(t(0, 1, 0, 0) == 128 / 255.0);
  CHECK(t(0, 3, 0, 1) == 30 / 255.0);  // replicated last channel
  CHECK(tensor_to_image(t, 3) == img);
  SpatialTensor half({1, 1, 1, 2}, std::vector<double>{0.501 / 255.0, 1.499 / 255.0});
  CHECK(tensor_to_image(half, 1).pixels == std::vector<std::uint8_t>{1, 1});
  SpatialTensor out_of_range({1, 1, 1, 2}, std::vector<double>{-0.2, 1.3});
  CHECK(tensor_to_image(out_of_range, 1).pixels == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("csv formatting") {
  CsvRow row{"e", "boa", 10, 100.0, 1.0, 31.234567, 0.98765432, 1.5e-12};
  CHECK(format_row(row) == "e,boa,10,100,1,31.2346,0.987654,1.5e-12");
  CHECK(std::string(kCsvHeader) ==
        "experiment_id,operator,iterations,clean_psnr,clean_ssim,attacked_psnr,attacked_ssim,alias_ratio");
}

TEST_CASE("identity roundtrip reproduces the PNG bit for bit") {
  TempDir dir("identity");
  write_png(dir.path / "pic.png", synthetic_image(16, 16, 3, 6));
  write_file(dir.path / "cfg.json", R"({"id": "rt", "inputs": ["pic.png"], "operators": ["pixel_shuffle"],
                                        "depth": 2, "output_dir": "out"})");
  auto cfg = load_config(dir.path / "cfg.json");
  const auto outcome = cmd_roundtrip(cfg);
  CHECK(outcome.exit_code == 0);
  CHECK(slurp(dir.path / "out" / "pic_pixel_shuffle.png") == slurp(dir.path / "pic.png"));
  const std::string csv = slurp(dir.path / "out" / "roundtrip.csv");
  CHECK(csv.find("rt,pixel_shuffle,0,100,1,100,1,1\n") != std::string::npos);
}

TEST_CASE("alias-free periodic roundtrip of a bandlimited image") {
  // In floating point the reconstruction is exact.
  const auto x = test::bandlimited({1, 4, 64, 64}, 2, 2, 10);
  auto sc = test::periodic_config(0.0, 0.0);
  Pipeline p(sc, 3);
  CHECK(psnr(p(x), x) > 80.0);

  // Through 8-bit PNG the broadband rounding noise is filtered out as well,
  // so the score is bounded by the quantization step.
  TempDir dir("bandlimited");
  write_png(dir.path / "bl.png", bandlimited_png(64, 64));
  write_file(dir.path / "cfg.json", R"({"inputs": ["bl.png"], "operators": ["boa"], "depth": 3,
      "sampler": {"periodic": true}, "coefficients": {"alpha": [0, 0, 0], "beta": [0, 0, 0]}})");
  auto cfg = load_config(dir.path / "cfg.json");
  const auto corpus = load_corpus(cfg);
  Pipeline q(cfg.sampler_for("boa"), 3);
  CHECK(psnr(q(corpus[0].tensor), corpus[0].tensor) > 50.0);
}

TEST_CASE("odd image dimensions are rejected with the required divisor") {
  TempDir dir("odd");
  write_png(dir.path / "odd.png", synthetic_image(15, 16, 1, 7));
  write_file(dir.path / "cfg.json", R"({"inputs": ["odd.png"], "depth": 2})");
  try {
    cmd_roundtrip(load_config(dir.path / "cfg.json"));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("2^2") != std::string::npos);
  }
}

TEST_CASE("boa executable exit codes and outputs") {
  TempDir dir("exe");
  write_file(dir.path / "empty.json", R"({})");
  CHECK(run_boa("attack --config " + (dir.path / "empty.json").string()) == 2);
  CHECK(run_boa("frobnicate --config x") == 2);
  CHECK(run_boa("roundtrip") == 2);
  write_file(dir.path / "syn.json", R"({"synthetic": {"count": 2, "rows": 16, "cols": 16, "channels": 1},
      "operators": ["boa", "flc"], "depth": 2, "attack": {"budgets": [1, 2]}})");
  const std::string base = "--config " + (dir.path / "syn.json").string() + " --out " + (dir.path / "o").string();
  CHECK(run_boa("roundtrip " + base) == 0);
  CHECK(fs::exists(dir.path / "o" / "synthetic_001_flc.png"));
  CHECK(run_boa("attack " + base) == 0);
  const std::string csv = slurp(dir.path / "o" / "attack.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(fs::exists(dir.path / "o" / "synthetic_000_boa_it2_diff.png"));
  CHECK(run_boa("spectrum " + base) == 0);
  CHECK(fs::exists(dir.path / "o" / "synthetic_000_boa_s3_up.png"));
  CHECK(run_boa("alias-audit " + base) == 0);
  const std::string audit = slurp(dir.path / "o" / "alias_audit.csv");
  CHECK(audit.rfind("experiment_id,operator,ky,kx,fy,fx,energy_in,energy_out,ratio\n", 0) == 0);
  CHECK(run_boa("roundtrip " + base + " --operator nonesuch") == 2);
  CHECK(run_boa("roundtrip " + base + " --depth 5") == 1);  // 16 is not divisible by 2^5
}

TEST_CASE("gradcheck command passes and writes a report") {
  TempDir dir("grad");
  ExperimentConfig cfg;
  cfg.command = Command::gradcheck;
  cfg.output_dir = dir.path.string();
  const auto outcome = run_command(cfg);
  CHECK(outcome.exit_code == 0);
  const std::string report = slurp(dir.path / "gradcheck.txt");
  CHECK(report.find("FAIL") == std::string::npos);
  CHECK(report.find("pipeline_boa_depth2") != std::string::npos);
}
