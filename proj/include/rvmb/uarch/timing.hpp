#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "rvmb/error.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/uarch/predictor.hpp"

namespace rvmb::uarch {

enum class Stall : uint8_t { RawHazard, Structural, ICache, DCache, Branch };
inline constexpr std::size_t kStallCount = 5;
inline constexpr std::array<Stall, kStallCount> kAllStalls = {Stall::RawHazard, Stall::Structural, Stall::ICache,
                                                              Stall::DCache, Stall::Branch};

inline std::string_view stall_name(Stall s) {
  switch (s) {
    case Stall::RawHazard: return "raw_hazard";
    case Stall::Structural: return "structural";
    case Stall::ICache: return "icache";
    case Stall::DCache: return "dcache";
    case Stall::Branch: return "branch";
  }
  return "?";
}

struct TimingResult {
  uint64_t cycles = 0;
  uint64_t committed = 0;
  std::array<uint64_t, kStallCount> stall_cycles{};
  PredictorStats predictor;
  memhier::CacheStats caches;

  double cpi() const { return committed == 0 ? 0.0 : static_cast<double>(cycles) / static_cast<double>(committed); }
  double branch_accuracy() const { return predictor.accuracy(); }
  uint64_t stall(Stall s) const { return stall_cycles[static_cast<std::size_t>(s)]; }
  uint64_t total_stalls() const {
    uint64_t t = 0;
    for (uint64_t v : stall_cycles) t += v;
    return t;
  }
};

/// A timed run: the timing outcome plus the architectural result of the
/// same execution.
struct Simulation {
  TimingResult timing;
  isa::FunctionalResult functional;
};

inline double speedup(const TimingResult& minor, const TimingResult& o3) {
  if (minor.committed != o3.committed) {
    throw Error(ErrorCode::MismatchedRuns, "committed counts differ: " + std::to_string(minor.committed) + " vs " +
                                               std::to_string(o3.committed));
  }
  if (o3.cycles == 0) throw Error(ErrorCode::MismatchedRuns, "zero-cycle run");
  return static_cast<double>(minor.cycles) / static_cast<double>(o3.cycles);
}

/// Instruction-side plumbing shared by the timing models: I-cache accesses
/// on line transitions and branch prediction.
class FrontEnd {
 public:
  FrontEnd(memhier::MemoryHierarchy& mem, const PredictorConfig& pcfg, bool perfect_icache)
      : mem_(mem), predictor_(pcfg), perfect_icache_(perfect_icache) {}

  /// Extra cycles beyond an L1I hit to fetch the line holding `pc`; zero
  /// while execution stays within the current line.
  uint64_t ifetch_penalty(uint64_t pc) {
    if (perfect_icache_) return 0;
    const uint64_t line = pc / mem_.config().l1i.line;
    if (has_line_ && line == line_) return 0;
    has_line_ = true;
    line_ = line;
    return mem_.access(pc, memhier::AccessKind::IFetch) - mem_.config().l1i.hit_latency;
  }

  /// Data access latency from the hierarchy.
  uint64_t data_latency(const isa::MemAccess& m) {
    return mem_.access(m.addr, m.is_write ? memhier::AccessKind::Write : memhier::AccessKind::Read);
  }

  /// Predicts and trains on a control instruction; true if mispredicted.
  bool mispredicted(const isa::Commit& c) {
    if (!isa::is_control(c.event.cls)) return false;
    return predictor_.resolve(c.event.pc, c.instr, c.next_pc);
  }

  const GsharePredictor& predictor() const { return predictor_; }
  memhier::MemoryHierarchy& memory() { return mem_; }

 private:
  memhier::MemoryHierarchy& mem_;
  GsharePredictor predictor_;
  bool perfect_icache_;
  bool has_line_ = false;
  uint64_t line_ = 0;
};

}  // namespace rvmb::uarch
