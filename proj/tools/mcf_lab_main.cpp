#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mcf/classify.hpp"
#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"
#include "mcf/report.hpp"
#include "mcf/runner.hpp"
#include "mcf/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(const mcf::Error& e) {
  switch (e.code()) {
    case mcf::ErrorCode::Io:
    case mcf::ErrorCode::Parse:
    case mcf::ErrorCode::Validation:
    case mcf::ErrorCode::InvalidArgument:
      return 2;
    default:
      return 1;
  }
}

void apply_overrides(mcf::ScenarioConfig& config, long seed, long record_every, long max_steps) {
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (record_every > 0) config.record_every = static_cast<int>(record_every);
  if (max_steps > 0) config.max_steps = max_steps;
}

int run_one(const std::string& path, const std::string& out, long seed, long record_every,
            long max_steps) {
  mcf::ScenarioConfig config = mcf::parse_scenario(path);
  apply_overrides(config, seed, record_every, max_steps);
  const mcf::RunResult result = mcf::run_scenario(config, out);
  std::cout << config.name << ": " << result.status << " (" << result.directory << ")\n";
  return result.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcf-lab: a numerical laboratory for mean curvature flow"};
  app.require_subcommand(1);

  std::string scenario_path, suite_dir, mesh_path, out_dir;
  std::vector<std::string> run_dirs;
  long seed = -1, record_every = 0, max_steps = 0;

  auto* cmd_run = app.add_subcommand("run", "run one scenario file");
  cmd_run->add_option("scenario", scenario_path, "scenario TOML file")->required();
  cmd_run->add_option("--out", out_dir, "output directory override");
  cmd_run->add_option("--seed", seed, "perturbation seed override");
  cmd_run->add_option("--record-every", record_every, "record interval override");
  cmd_run->add_option("--max-steps", max_steps, "step budget override");

  auto* cmd_suite = app.add_subcommand("suite", "run every scenario in a directory");
  cmd_suite->add_option("dir", suite_dir, "directory of scenario TOML files")->required();
  cmd_suite->add_option("--out", out_dir, "base output directory");
  cmd_suite->add_option("--seed", seed, "perturbation seed override");
  cmd_suite->add_option("--record-every", record_every, "record interval override");
  cmd_suite->add_option("--max-steps", max_steps, "step budget override");

  auto* cmd_report = app.add_subcommand("report", "summarize completed runs");
  cmd_report->add_option("runs", run_dirs, "run directories")->required();
  cmd_report->add_option("--out", out_dir, "write summary.md/summary.json here");

  auto* cmd_classify = app.add_subcommand("classify", "classify a rescaled OBJ snapshot");
  cmd_classify->add_option("mesh", mesh_path, "OBJ mesh in rescaled coordinates")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      return run_one(scenario_path, out_dir, seed, record_every, max_steps);
    }
    if (cmd_suite->parsed()) {
      std::vector<std::string> files;
      if (!fs::is_directory(suite_dir)) {
        mcf::fail(mcf::ErrorCode::Io, suite_dir + " is not a directory");
      }
      for (const auto& entry : fs::directory_iterator(suite_dir)) {
        if (entry.path().extension() == ".toml") files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        mcf::fail(mcf::ErrorCode::Io, "no scenario files in " + suite_dir);
      }
      int failures = 0;
      for (const auto& file : files) {
        mcf::ScenarioConfig config = mcf::parse_scenario(file);
        apply_overrides(config, seed, record_every, max_steps);
        std::string out = config.output_directory;
        if (!out_dir.empty()) out = (fs::path(out_dir) / config.name).string();
        const mcf::RunResult result = mcf::run_scenario(config, out);
        std::cout << config.name << ": " << result.status << " (" << result.directory << ")\n";
        failures += !result.ok();
      }
      return failures == 0 ? 0 : 1;
    }
    if (cmd_report->parsed()) {
      const mcf::SuiteReport report = mcf::generate_report(run_dirs);
      std::cout << report.to_markdown();
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream md(fs::path(out_dir) / "summary.md");
        md << report.to_markdown();
        std::ofstream js(fs::path(out_dir) / "summary.json");
        js << report.to_json() << '\n';
      }
      return report.all_pass() ? 0 : 1;
    }
    if (cmd_classify->parsed()) {
      mcf::Mesh mesh = mcf::read_obj(mesh_path);
      mcf::compute_geometry(mesh);
      mesh.gauge = mcf::Gauge::Rescaled;
      const mcf::ClassificationResult result = mcf::classify_shrinker(mesh);
      std::cout << result.to_json() << '\n';
      return 0;
    }
  } catch (const mcf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
