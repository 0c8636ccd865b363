#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/uarch/latency.hpp"
#include "rvmb/uarch/predictor.hpp"
#include "rvmb/uarch/timing.hpp"

namespace rvmb::uarch {

struct O3Config {
  uint32_t rob_size = 128;
  uint32_t fetch_width = 4;  // fetch and dispatch
  uint32_t issue_width = 4;
  uint32_t commit_width = 4;
  uint32_t int_alu = 2;
  uint32_t int_muldiv = 1;
  uint32_t fp_fma = 2;
  uint32_t mem_ports = 2;
  uint32_t load_queue = 32;
  uint32_t store_queue = 32;
  uint32_t mispredict_penalty = 8;
  LatencyTable latencies;
  PredictorConfig predictor;
  bool perfect_icache = false;

  void validate() const {
    for (uint32_t v : {rob_size, fetch_width, issue_width, commit_width, int_alu, int_muldiv, fp_fma, mem_ports,
                       load_queue, store_queue}) {
      if (v < 1) throw Error(ErrorCode::InvalidConfig, "o3 widths, unit counts and queue sizes must be >= 1");
    }
    latencies.validate();
    predictor.validate();
  }

  /// FDiv runs on the FMA pool; IntMult and IntDiv share the MulDiv pool.
  uint32_t units(FuKind k) const {
    switch (k) {
      case FuKind::IntAlu: return int_alu;
      case FuKind::MulDiv: return int_muldiv;
      case FuKind::FpFma:
      case FuKind::FpDiv: return fp_fma;
      case FuKind::Mem: return mem_ports;
    }
    return 1;
  }
};

namespace o3_detail {

/// Ring of the most recent N values, for "the instruction N back" lookups.
class History {
 public:
  explicit History(std::size_t n) : v_(n, -1) {}
  /// Value recorded n entries before the next push (n in 1..size), or -1.
  int64_t back(std::size_t n) const {
    if (n > count_ || n > v_.size()) return -1;
    return v_[(head_ + v_.size() - n) % v_.size()];
  }
  void push(int64_t x) {
    v_[head_] = x;
    head_ = (head_ + 1) % v_.size();
    ++count_;
  }

 private:
  std::vector<int64_t> v_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

}  // namespace o3_detail

/// Out-of-order timing as list scheduling over the commit stream. Each
/// instruction, in program order, takes the earliest cycle that respects:
///   - dispatch: in order, <= fetch_width per cycle, ROB / LQ / SQ space
///     (an entry frees the cycle after its owner commits), the fetch clock
///     and any redirect (mispredicted branch done + penalty);
///   - issue: operands ready, <= issue_width starts per cycle and a free
///     unit of its pool (unpipelined units stay busy for the full latency);
///   - loads: every older store to an overlapping byte has completed.
/// Commit is in order, <= commit_width per cycle, at or after completion.
class O3Model {
 public:
  O3Model(const O3Config& cfg, memhier::MemoryHierarchy& mem)
      : cfg_((cfg.validate(), cfg)),
        fe_(mem, cfg.predictor, cfg.perfect_icache),
        dispatch_hist_(cfg.fetch_width),
        commit_hist_(std::max(cfg.rob_size, cfg.commit_width)),
        lq_(cfg.load_queue),
        sq_(cfg.store_queue) {}

  void operator()(const isa::Commit& c) { commit(c); }

  void commit(const isa::Commit& c) {
    const isa::TraceEvent& ev = c.event;
    const isa::Operands ops = isa::operands(c.instr);
    const LatencyEntry& entry = cfg_.latencies[ev.cls];
    const bool is_load = ev.cls == isa::InstrClass::MemRead;
    const bool is_store = ev.cls == isa::InstrClass::MemWrite;

    // Front end.
    const int64_t penalty = static_cast<int64_t>(fe_.ifetch_penalty(ev.pc));
    int64_t fetch = std::max(fetch_clock_, redirect_);
    const bool redirected = redirect_ > fetch_clock_;
    fetch += penalty;
    if (int64_t w = dispatch_hist_.back(cfg_.fetch_width); w >= 0) fetch = std::max(fetch, w + 1);
    fetch_clock_ = fetch;

    // Dispatch.
    int64_t dispatch = std::max(fetch, last_dispatch_);
    Stall dispatch_reason = redirected ? Stall::Branch : (penalty > 0 ? Stall::ICache : Stall::Structural);
    auto bound = [&](int64_t t) {
      if (t > dispatch) {
        dispatch = t;
        dispatch_reason = Stall::Structural;
      }
    };
    if (int64_t t = commit_hist_.back(cfg_.rob_size); t >= 0) bound(t + 1);
    if (is_load) {
      if (int64_t t = lq_.back(cfg_.load_queue); t >= 0) bound(t + 1);
    }
    if (is_store) {
      if (int64_t t = sq_.back(cfg_.store_queue); t >= 0) bound(t + 1);
    }
    advance_base(dispatch);

    // Operands.
    int64_t ready = dispatch;
    Stall reason = dispatch > fetch ? dispatch_reason : (redirected ? Stall::Branch : Stall::ICache);
    for (uint8_t r : ops.sources) {
      if (r == isa::kNoReg || ready_[r] <= ready) continue;
      ready = ready_[r];
      reason = from_load_[r] ? Stall::DCache : Stall::RawHazard;
    }
    int64_t latency = entry.latency;
    if (ev.mem) {
      latency += static_cast<int64_t>(fe_.data_latency(*ev.mem));
      if (is_load) {
        if (int64_t t = store_ready(*ev.mem); t > ready) {
          ready = t;
          reason = Stall::DCache;
        }
      }
    }

    // Issue slot and unit.
    const FuKind fu = fu_of(ev.cls);
    const auto pool = static_cast<std::size_t>(fu == FuKind::FpDiv ? FuKind::FpFma : fu);
    const uint32_t units = cfg_.units(fu);
    const int64_t busy = entry.pipelined ? 1 : latency;
    int64_t start = ready;
    while (!fits(start, pool, units, busy)) ++start;
    if (start > ready) reason = Stall::Structural;
    reserve(start, pool, busy);

    const int64_t done = start + latency;
    if (ops.dest != isa::kNoReg) {
      ready_[ops.dest] = done;
      from_load_[ops.dest] = is_load;
    }
    if (is_store) record_store(*ev.mem, done);
    if (fe_.mispredicted(c)) redirect_ = std::max(redirect_, done + cfg_.mispredict_penalty);

    // Commit.
    int64_t commit = std::max(done, last_commit_);
    if (int64_t t = commit_hist_.back(cfg_.commit_width); t >= 0) commit = std::max(commit, t + 1);
    const int64_t gap = commit - last_commit_ - 1;
    if (committed_ > 0 && gap > 0) stalls_[static_cast<std::size_t>(reason)] += static_cast<uint64_t>(gap);

    dispatch_hist_.push(dispatch);
    commit_hist_.push(commit);
    if (is_load) lq_.push(commit);
    if (is_store) sq_.push(commit);
    last_dispatch_ = dispatch;
    last_commit_ = commit;
    ++committed_;
  }

  TimingResult result() const {
    TimingResult r;
    r.committed = committed_;
    r.cycles = committed_ == 0 ? 0 : static_cast<uint64_t>(last_commit_);
    r.stall_cycles = stalls_;
    r.predictor = fe_.predictor().stats();
    r.caches = fe_.memory().snapshot();
    return r;
  }

 private:
  struct Slot {
    uint32_t starts = 0;
    std::array<uint32_t, kFuCount> used{};
  };

  Slot& slot(int64_t t) {
    const auto idx = static_cast<std::size_t>(t - base_);
    if (idx >= calendar_.size()) calendar_.resize(idx + 1);
    return calendar_[idx];
  }

  bool fits(int64_t t, std::size_t pool, uint32_t units, int64_t busy) {
    if (slot(t).starts >= cfg_.issue_width) return false;
    for (int64_t k = 0; k < busy; ++k) {
      if (slot(t + k).used[pool] >= units) return false;
    }
    return true;
  }

  void reserve(int64_t t, std::size_t pool, int64_t busy) {
    ++slot(t).starts;
    for (int64_t k = 0; k < busy; ++k) ++slot(t + k).used[pool];
  }

  /// No instruction starts before the current dispatch cycle, so earlier
  /// calendar slots can be dropped.
  void advance_base(int64_t dispatch) {
    while (base_ < dispatch && !calendar_.empty()) {
      calendar_.pop_front();
      ++base_;
    }
    if (calendar_.empty()) base_ = std::max(base_, dispatch);
  }

  int64_t store_ready(const isa::MemAccess& m) const {
    auto it = stores_.find(m.addr >> 3);
    if (it == stores_.end()) return 0;
    int64_t t = 0;
    for (uint64_t b = m.addr; b < m.addr + m.size; ++b) t = std::max(t, it->second[b & 7]);
    return t;
  }

  void record_store(const isa::MemAccess& m, int64_t done) {
    auto& word = stores_[m.addr >> 3];
    for (uint64_t b = m.addr; b < m.addr + m.size; ++b) word[b & 7] = done;
    if (stores_.size() > kStorePruneAt) {
      // Completions at or before the dispatch cycle can no longer delay a load.
      for (auto it = stores_.begin(); it != stores_.end();) {
        const auto& w = it->second;
        if (*std::max_element(w.begin(), w.end()) <= last_dispatch_) it = stores_.erase(it);
        else ++it;
      }
    }
  }

  static constexpr std::size_t kStorePruneAt = 1 << 16;

  O3Config cfg_;
  mutable FrontEnd fe_;
  o3_detail::History dispatch_hist_;
  o3_detail::History commit_hist_;
  o3_detail::History lq_;
  o3_detail::History sq_;
  std::deque<Slot> calendar_;
  int64_t base_ = 0;
  std::unordered_map<uint64_t, std::array<int64_t, 8>> stores_;
  std::array<int64_t, 64> ready_{};
  std::array<bool, 64> from_load_{};
  std::array<uint64_t, kStallCount> stalls_{};
  int64_t fetch_clock_ = 0;
  int64_t redirect_ = 0;
  int64_t last_dispatch_ = 0;
  int64_t last_commit_ = 0;
  uint64_t committed_ = 0;
};

inline Simulation simulate_o3(const loader::MemoryImage& image, uint64_t entry, const O3Config& cfg,
                              memhier::MemoryHierarchy& mem, uint64_t limit, const isa::RunOptions& opts = {}) {
  O3Model model(cfg, mem);
  Simulation sim;
  sim.functional = isa::execute(image, entry, limit, opts, model);
  sim.timing = model.result();
  return sim;
}

}  // namespace rvmb::uarch
