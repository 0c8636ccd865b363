#pragma once

#include <algorithm>
#include <array>
#include <cstdint>

#include "rvmb/error.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/uarch/latency.hpp"
#include "rvmb/uarch/predictor.hpp"
#include "rvmb/uarch/timing.hpp"

namespace rvmb::uarch {

struct MinorConfig {
  uint32_t pipeline_depth = 5;
  uint32_t issue_width = 1;
  uint32_t mispredict_penalty = 3;
  LatencyTable latencies;
  PredictorConfig predictor;
  bool perfect_icache = false;

  void validate() const {
    if (issue_width != 1) throw Error(ErrorCode::InvalidConfig, "minor issue_width must be 1");
    if (pipeline_depth < 3) throw Error(ErrorCode::InvalidConfig, "minor pipeline_depth must be >= 3");
    if (mispredict_penalty != pipeline_depth - 2) {
      throw Error(ErrorCode::InvalidConfig, "minor mispredict_penalty must equal pipeline_depth - 2");
    }
    latencies.validate();
    predictor.validate();
  }
};

/// In-order scalar timing over the commit stream:
///
///   issue[i] = max(issue[i-1] + 1, ready[srcs], fu_free[fu], fetch_ready[i])
///   done[i]  = issue[i] + latency(i)
///   cycles   = done[N-1] + depth - 1
///
/// fetch_ready[i] is max(issue[i-1] + 1, redirect) plus the I-cache cost of
/// entering a new line; a mispredict sets redirect = done + penalty.
/// The gap issue[i] - (issue[i-1] + 1) is charged to the binding term, so
/// cycles == committed + stalls + depth - 1 holds exactly (the last
/// instruction's latency beyond one cycle is charged as a drain stall).
class MinorModel {
 public:
  MinorModel(const MinorConfig& cfg, memhier::MemoryHierarchy& mem)
      : cfg_((cfg.validate(), cfg)), fe_(mem, cfg.predictor, cfg.perfect_icache) {}

  void operator()(const isa::Commit& c) { commit(c); }

  void commit(const isa::Commit& c) {
    const isa::TraceEvent& ev = c.event;
    const isa::Operands ops = isa::operands(c.instr);
    const LatencyEntry& entry = cfg_.latencies[ev.cls];

    const int64_t penalty = static_cast<int64_t>(fe_.ifetch_penalty(ev.pc));
    int64_t latency = entry.latency;
    if (ev.mem) latency += static_cast<int64_t>(fe_.data_latency(*ev.mem));

    const int64_t base = prev_issue_ + 1;
    const int64_t front = std::max(base, redirect_);
    const int64_t fetch_ready = front + penalty;

    int64_t src_ready = 0;
    bool src_from_load = false;
    for (uint8_t r : ops.sources) {
      if (r == isa::kNoReg) continue;
      if (ready_[r] > src_ready || (ready_[r] == src_ready && from_load_[r])) {
        src_ready = ready_[r];
        src_from_load = from_load_[r];
      }
    }
    const auto fu = static_cast<std::size_t>(fu_of(ev.cls));
    const int64_t fu_ready = fu_free_[fu];

    const int64_t issue = std::max({base, fetch_ready, src_ready, fu_ready});
    if (issue > base) {
      if (fetch_ready == issue) {
        add(Stall::Branch, front - base);
        add(Stall::ICache, penalty);
      } else if (src_ready == issue) {
        add(src_from_load ? Stall::DCache : Stall::RawHazard, issue - base);
      } else {
        add(Stall::Structural, issue - base);
      }
    }

    const int64_t done = issue + latency;
    if (ops.dest != isa::kNoReg) {
      ready_[ops.dest] = done;
      from_load_[ops.dest] = ev.cls == isa::InstrClass::MemRead;
    }
    fu_free_[fu] = entry.pipelined ? issue + 1 : done;
    if (fe_.mispredicted(c)) redirect_ = done + cfg_.mispredict_penalty;

    prev_issue_ = issue;
    last_done_ = done;
    last_latency_ = latency;
    last_was_memory_ = ev.mem.has_value();
    ++committed_;
  }

  TimingResult result() const {
    TimingResult r;
    r.committed = committed_;
    r.stall_cycles = stalls_;
    if (committed_ > 0) {
      r.cycles = static_cast<uint64_t>(last_done_) + cfg_.pipeline_depth - 1;
      r.stall_cycles[static_cast<std::size_t>(last_was_memory_ ? Stall::DCache : Stall::RawHazard)] +=
          static_cast<uint64_t>(last_latency_ - 1);
    }
    r.predictor = fe_.predictor().stats();
    r.caches = fe_.memory().snapshot();
    return r;
  }

  int64_t last_issue() const { return prev_issue_; }
  int64_t last_done() const { return last_done_; }

 private:
  void add(Stall s, int64_t n) { stalls_[static_cast<std::size_t>(s)] += static_cast<uint64_t>(n); }

  MinorConfig cfg_;
  mutable FrontEnd fe_;
  std::array<int64_t, 64> ready_{};
  std::array<bool, 64> from_load_{};
  std::array<int64_t, kFuCount> fu_free_{};
  std::array<uint64_t, kStallCount> stalls_{};
  int64_t prev_issue_ = -1;
  int64_t redirect_ = 0;
  int64_t last_done_ = 0;
  int64_t last_latency_ = 1;
  bool last_was_memory_ = false;
  uint64_t committed_ = 0;
};

inline Simulation simulate_minor(const loader::MemoryImage& image, uint64_t entry, const MinorConfig& cfg,
                                 memhier::MemoryHierarchy& mem, uint64_t limit, const isa::RunOptions& opts = {}) {
  MinorModel model(cfg, mem);
  Simulation sim;
  sim.functional = isa::execute(image, entry, limit, opts, model);
  sim.timing = model.result();
  return sim;
}

}  // namespace rvmb::uarch
