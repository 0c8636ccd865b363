// rvmb: benchmark runner and report CLI.
//
//   rvmb run <config.json> [--jobs N] [--output-dir DIR]
//   rvmb bench <name|path> --model atomic|minor|o3 [--seed S] [--limit N] [--format F]
//   rvmb diff <name|path> --models a,b[,c] [--seed S] [--limit N]
//   rvmb report <dir> --format csv|json|markdown
//   rvmb list
//
// Exit codes: 0 success, 1 a cell (or the differential) failed, 2 invalid
// configuration or arguments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rvmb/harness/config.hpp"
#include "rvmb/harness/differential.hpp"
#include "rvmb/harness/report.hpp"
#include "rvmb/harness/runner.hpp"
#include "rvmb/tensorc/suite.hpp"

namespace {

using namespace rvmb;

constexpr int kOk = 0;
constexpr int kCellFailed = 1;
constexpr int kInvalid = 2;

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + p.string() + "'");
  out << text;
}

harness::RunConfig single_config(const std::string& benchmark, std::vector<std::string> models, uint64_t seed,
                                 uint64_t limit) {
  harness::RunConfig c;
  c.benchmarks = {benchmark};
  c.models = std::move(models);
  c.seed = seed;
  if (limit > 0) c.limit = limit;
  harness::apply_environment(c);
  c.validate();
  return c;
}

int cmd_run(const std::string& path, unsigned jobs, const std::string& output_dir) {
  harness::RunConfig cfg = harness::load_config(path);
  if (jobs > 0) cfg.jobs = jobs;
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  const auto reports = harness::run_matrix(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  write_file(dir / "results.json", harness::to_json(reports));
  write_file(dir / "results.csv", harness::to_csv(reports));
  const std::string md = harness::to_markdown(reports);
  write_file(dir / "results.md", md);
  std::cout << md;
  for (const auto& r : reports) {
    if (!r.ok) std::cerr << r.benchmark << "/" << r.model << ": " << r.error_message << "\n";
  }
  return harness::all_ok(reports) ? kOk : kCellFailed;
}

int cmd_bench(const std::string& bench, const std::string& model, uint64_t seed, uint64_t limit,
              const std::string& format) {
  const harness::RunConfig cfg = single_config(bench, {model}, seed, limit);
  const harness::Format f = harness::parse_format(format);
  const auto reports = harness::run_matrix(cfg);
  std::cout << harness::render(reports, f);
  if (!reports[0].ok) std::cerr << reports[0].error_message << "\n";
  return reports[0].ok ? kOk : kCellFailed;
}

int cmd_diff(const std::string& bench, const std::string& models_csv, uint64_t seed, uint64_t limit) {
  std::vector<std::string> models;
  std::stringstream ss(models_csv);
  for (std::string m; std::getline(ss, m, ',');) {
    if (!m.empty()) models.push_back(m);
  }
  if (models.size() < 2) throw Error(ErrorCode::InvalidConfig, "diff needs at least two models");
  const harness::RunConfig cfg = single_config(bench, models, seed, limit);
  const harness::DiffVerdict v = harness::differential(bench, models, cfg);
  std::cout << (v.pass ? "PASS" : "FAIL") << " " << bench << "\n";
  for (std::size_t i = 0; i < v.models.size(); ++i) {
    std::cout << "  " << v.models[i] << " digest " << harness::fmt_digest(v.digests[i]);
    if (v.first_divergent_offset) std::cout << " byte " << v.values_at_offset[i];
    std::cout << "\n";
  }
  if (v.first_divergent_offset) {
    std::cout << "  first divergent offset " << *v.first_divergent_offset << " (" << v.location << ")\n";
  }
  return v.pass ? kOk : kCellFailed;
}

int cmd_report(const std::string& dir, const std::string& format) {
  const harness::Format f = harness::parse_format(format);
  std::ifstream in(std::filesystem::path(dir) / "results.json");
  if (!in) throw Error(ErrorCode::InvalidConfig, "no results.json in '" + dir + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::cout << harness::render(harness::from_json(ss.str()), f);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RV64 ML benchmark evaluator"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  unsigned jobs = 0;
  auto* run = app.add_subcommand("run", "run the benchmark x model matrix from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--jobs", jobs, "worker threads (0 = config value)");
  run->add_option("--output-dir", output_dir, "overrides output_dir from the config");

  std::string bench, model = "minor", models = "atomic,minor,o3", format = "markdown";
  uint64_t seed = 1, limit = 0;
  auto* bench_cmd = app.add_subcommand("bench", "run one benchmark on one model");
  bench_cmd->add_option("benchmark", bench, "suite name or program path")->required();
  bench_cmd->add_option("--model", model, "atomic, minor or o3");
  bench_cmd->add_option("--seed", seed, "input seed");
  bench_cmd->add_option("--limit", limit, "instruction limit (0 = program bound)");
  bench_cmd->add_option("--format", format, "csv, json or markdown");

  auto* diff = app.add_subcommand("diff", "functional differential across models");
  diff->add_option("benchmark", bench, "suite name or program path")->required();
  diff->add_option("--models", models, "comma-separated models");
  diff->add_option("--seed", seed, "input seed");
  diff->add_option("--limit", limit, "instruction limit (0 = program bound)");

  std::string dir;
  auto* report = app.add_subcommand("report", "render a results directory");
  report->add_option("dir", dir, "directory holding results.json")->required();
  report->add_option("--format", format, "csv, json or markdown");

  auto* list = app.add_subcommand("list", "list built-in benchmarks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config_path, jobs, output_dir);
    if (*bench_cmd) return cmd_bench(bench, model, seed, limit, format);
    if (*diff) return cmd_diff(bench, models, seed, limit);
    if (*report) return cmd_report(dir, format);
    if (*list) {
      for (const auto& n : tensorc::builtin_names()) std::cout << n << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "rvmb: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::ParseError ? kInvalid : kCellFailed;
  } catch (const std::exception& e) {
    std::cerr << "rvmb: " << e.what() << "\n";
    return kCellFailed;
  }
  return kInvalid;
}
