#pragma once

#include <cstdint>

#include "rvmb/isa/functional.hpp"
#include "rvmb/memhier/hierarchy.hpp"
#include "rvmb/uarch/predictor.hpp"
#include "rvmb/uarch/timing.hpp"

namespace rvmb::uarch {

struct AtomicConfig {
  PredictorConfig predictor;
  bool perfect_icache = false;
};

/// One instruction per cycle. Caches and the predictor still see the full
/// stream so MPKI and branch accuracy are reported for the reference model.
class AtomicModel {
 public:
  AtomicModel(const AtomicConfig& cfg, memhier::MemoryHierarchy& mem)
      : fe_(mem, (cfg.predictor.validate(), cfg.predictor), cfg.perfect_icache) {}

  void operator()(const isa::Commit& c) {
    fe_.ifetch_penalty(c.event.pc);
    if (c.event.mem) fe_.data_latency(*c.event.mem);
    fe_.mispredicted(c);
    ++committed_;
  }

  TimingResult result() const {
    TimingResult r;
    r.committed = committed_;
    r.cycles = committed_;
    r.predictor = fe_.predictor().stats();
    r.caches = fe_.memory().snapshot();
    return r;
  }

 private:
  mutable FrontEnd fe_;
  uint64_t committed_ = 0;
};

inline Simulation simulate_atomic(const loader::MemoryImage& image, uint64_t entry, const AtomicConfig& cfg,
                                  memhier::MemoryHierarchy& mem, uint64_t limit, const isa::RunOptions& opts = {}) {
  AtomicModel model(cfg, mem);
  Simulation sim;
  sim.functional = isa::execute(image, entry, limit, opts, model);
  sim.timing = model.result();
  return sim;
}

}  // namespace rvmb::uarch
