#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/harness/config.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/loader/assembler.hpp"
#include "rvmb/loader/elf.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/tensorc/lower.hpp"
#include "rvmb/tensorc/suite.hpp"
#include "rvmb/tensorc/text.hpp"
#include "rvmb/uarch/atomic.hpp"
#include "rvmb/uarch/minor.hpp"
#include "rvmb/uarch/o3.hpp"

namespace rvmb::harness {

/// A program ready to simulate.
struct Workload {
  std::string name;
  loader::MemoryImage image;
  uint64_t limit = 0;
};

inline constexpr uint64_t kDefaultLimit = 2'000'000'000;

namespace runner_detail {

inline bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CompileFailure, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Workload from_program(const std::string& name, const tensorc::TensorProgram& p,
                             const std::vector<tensorc::Tensor>& inputs, std::optional<uint64_t> limit) {
  tensorc::LoweredProgram lp = tensorc::lower(p);
  return {name, tensorc::bind_inputs(lp, inputs), limit.value_or(lp.instruction_bound())};
}

}  // namespace runner_detail

/// Resolves a benchmark: a suite name, a text graph (.graph/.txt), an
/// assembly file (.s/.S/.asm) or an ELF executable. Any failure to build
/// the image is reported as CompileFailure.
inline Workload prepare(const std::string& benchmark, uint64_t seed, std::optional<uint64_t> limit = std::nullopt) {
  using namespace runner_detail;
  try {
    if (auto bm = tensorc::find_benchmark(benchmark)) {
      return from_program(benchmark, bm->program, bm->inputs(seed), limit);
    }
    if (ends_with(benchmark, ".graph") || ends_with(benchmark, ".txt")) {
      const std::vector<uint8_t> bytes = read_file(benchmark);
      const tensorc::TensorProgram p = tensorc::parse_program(std::string(bytes.begin(), bytes.end()));
      return from_program(benchmark, p, tensorc::random_inputs(p, seed), limit);
    }
    if (ends_with(benchmark, ".s") || ends_with(benchmark, ".S") || ends_with(benchmark, ".asm")) {
      const std::vector<uint8_t> bytes = read_file(benchmark);
      return {benchmark, loader::image_from_assembly(std::string(bytes.begin(), bytes.end()), 0x10000, 4096),
              limit.value_or(kDefaultLimit)};
    }
    const std::vector<uint8_t> bytes = read_file(benchmark);
    return {benchmark, loader::load_elf(bytes), limit.value_or(kDefaultLimit)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CompileFailure) throw;
    throw Error(ErrorCode::CompileFailure, benchmark + ": " + std::string(e.what()));
  }
}

/// Runs one model over a workload with a fresh memory hierarchy.
inline uarch::Simulation simulate(const std::string& model, const Workload& w, const RunConfig& cfg,
                                  const isa::RunOptions& opts = {}) {
  memhier::MemoryHierarchy mem(cfg.cache);
  if (model == "atomic") {
    return uarch::simulate_atomic(w.image, w.image.entry, {cfg.minor.predictor, cfg.minor.perfect_icache}, mem,
                                  w.limit, opts);
  }
  if (model == "minor") return uarch::simulate_minor(w.image, w.image.entry, cfg.minor, mem, w.limit, opts);
  if (model == "o3") return uarch::simulate_o3(w.image, w.image.entry, cfg.o3, mem, w.limit, opts);
  throw Error(ErrorCode::InvalidConfig, "unknown model '" + model + "'");
}

/// One (benchmark, model) cell.
struct MetricsReport {
  std::string benchmark;
  std::string model;
  bool ok = true;
  std::string error_kind;  // CompileFailure, SimError or LimitExceeded
  std::string error_message;
  std::optional<uint64_t> error_pc;

  uint64_t cycles = 0;
  uint64_t instructions = 0;
  double cpi = 0;
  std::array<double, isa::kClassCount> mix{};
  double l1d_mpki = 0;
  double l2_mpki = 0;
  double branch_acc = 0;
  double wall_s = 0;
  double kips = 0;
  uint64_t digest = 0;
  std::array<uint64_t, uarch::kStallCount> stalls{};

  double mix_of(isa::InstrClass c) const { return mix[static_cast<std::size_t>(c)]; }
};

inline MetricsReport make_report(const std::string& benchmark, const std::string& model, const uarch::Simulation& sim,
                                 double wall_s) {
  MetricsReport r;
  r.benchmark = benchmark;
  r.model = model;
  r.cycles = sim.timing.cycles;
  r.instructions = sim.functional.total_instrs;
  r.cpi = sim.timing.cpi();
  for (std::size_t i = 0; i < isa::kClassCount; ++i) {
    r.mix[i] = static_cast<double>(sim.functional.instr_counts[i]) / static_cast<double>(r.instructions);
  }
  r.l1d_mpki = memhier::mpki(sim.timing.caches, memhier::Level::L1D, r.instructions);
  r.l2_mpki = memhier::mpki(sim.timing.caches, memhier::Level::L2, r.instructions);
  r.branch_acc = sim.timing.branch_accuracy();
  r.wall_s = wall_s;
  r.kips = static_cast<double>(r.instructions) / (std::max(wall_s, 1e-9) * 1000.0);
  r.digest = sim.functional.digest;
  r.stalls = sim.timing.stall_cycles;
  return r;
}

inline MetricsReport failed_report(const std::string& benchmark, const std::string& model, const Error& e) {
  MetricsReport r;
  r.benchmark = benchmark;
  r.model = model;
  r.ok = false;
  switch (e.code()) {
    case ErrorCode::CompileFailure: r.error_kind = "CompileFailure"; break;
    case ErrorCode::LimitExceeded: r.error_kind = "LimitExceeded"; break;
    default: r.error_kind = "SimError"; break;
  }
  r.error_message = e.what();
  r.error_pc = e.pc();
  return r;
}

inline MetricsReport run_cell(const std::string& model, const Workload& w, const RunConfig& cfg) {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const uarch::Simulation sim = simulate(model, w, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return make_report(w.name, model, sim, wall);
  } catch (const Error& e) {
    return failed_report(w.name, model, e);
  }
}

/// Runs every (benchmark, model) pair. Cells run on `cfg.jobs` threads;
/// the result order is always benchmark-major, model-minor as configured.
inline std::vector<MetricsReport> run_matrix(const RunConfig& cfg) {
  cfg.validate();
  const std::size_t nb = cfg.benchmarks.size();
  const std::size_t nm = cfg.models.size();

  std::vector<std::shared_ptr<const Workload>> workloads(nb);
  std::vector<std::optional<Error>> compile_errors(nb);
  std::vector<MetricsReport> out(nb * nm);

  auto parallel = [&](std::size_t n, auto&& fn) {
    unsigned jobs = cfg.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  };

  parallel(nb, [&](std::size_t b) {
    try {
      workloads[b] = std::make_shared<const Workload>(prepare(cfg.benchmarks[b], cfg.seed, cfg.limit));
    } catch (const Error& e) {
      compile_errors[b] = e;
    }
  });
  parallel(nb * nm, [&](std::size_t cell) {
    const std::size_t b = cell / nm;
    const std::string& model = cfg.models[cell % nm];
    out[cell] = compile_errors[b] ? failed_report(cfg.benchmarks[b], model, *compile_errors[b])
                                  : run_cell(model, *workloads[b], cfg);
  });
  return out;
}

inline bool all_ok(const std::vector<MetricsReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const MetricsReport& r) { return r.ok; });
}

}  // namespace rvmb::harness
