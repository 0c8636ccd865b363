#pragma once

#include <cstdint>
#include <string_view>

#include "rvmb/error.hpp"
#include "rvmb/memhier/cache.hpp"

namespace rvmb::memhier {

enum class AccessKind { IFetch, Read, Write };
enum class Level { L1I, L1D, L2 };

inline std::string_view level_name(Level l) {
  switch (l) {
    case Level::L1I: return "l1i";
    case Level::L1D: return "l1d";
    case Level::L2: return "l2";
  }
  return "?";
}

struct HierarchyConfig {
  CacheConfig l1i{64 * 1024, 4, 64, 2};
  CacheConfig l1d{64 * 1024, 4, 64, 2};
  CacheConfig l2{8 * 1024 * 1024, 4, 64, 12};
  uint64_t dram_latency = 100;

  void validate() const {
    l1i.validate("l1i");
    l1d.validate("l1d");
    l2.validate("l2");
    if (l1i.line != l2.line || l1d.line != l2.line) {
      throw Error(ErrorCode::InvalidConfig, "line size must be uniform across levels");
    }
    if (dram_latency == 0) throw Error(ErrorCode::InvalidConfig, "dram_latency must be positive");
  }
};

struct CacheStats {
  LevelStats l1i;
  LevelStats l1d;
  LevelStats l2;

  const LevelStats& level(Level l) const {
    switch (l) {
      case Level::L1I: return l1i;
      case Level::L1D: return l1d;
      case Level::L2: break;
    }
    return l2;
  }

  bool operator==(const CacheStats&) const = default;
};

/// Split L1 over a shared L2 and fixed-latency DRAM.
///
/// A dirty L1 victim is absorbed by L2 if the line is resident there (it is
/// marked dirty, counters and LRU untouched) and otherwise goes straight to
/// DRAM. Either way it counts as an L1 writeback and adds no latency.
class MemoryHierarchy {
 public:
  explicit MemoryHierarchy(const HierarchyConfig& cfg = {}) : cfg_((cfg.validate(), cfg)), l1i_(cfg.l1i), l1d_(cfg.l1d), l2_(cfg.l2) {}

  const HierarchyConfig& config() const { return cfg_; }

  uint64_t access(uint64_t addr, AccessKind kind) {
    Cache& l1 = kind == AccessKind::IFetch ? l1i_ : l1d_;
    const Cache::Outcome o1 = l1.access(addr, kind == AccessKind::Write);
    if (o1.evicted_dirty) l2_.absorb_writeback(o1.evicted_line);
    uint64_t latency = l1.config().hit_latency;
    if (o1.hit) return latency;
    latency += l2_.config().hit_latency;
    if (l2_.access(addr, false).hit) return latency;
    return latency + cfg_.dram_latency;
  }

  CacheStats snapshot() const { return {l1i_.stats(), l1d_.stats(), l2_.stats()}; }

 private:
  HierarchyConfig cfg_;
  Cache l1i_;
  Cache l1d_;
  Cache l2_;
};

inline CacheStats snapshot(const MemoryHierarchy& h) { return h.snapshot(); }

/// Misses per thousand committed instructions at `level`.
inline double mpki(const CacheStats& stats, Level level, uint64_t committed) {
  if (committed == 0) throw Error(ErrorCode::ZeroInstructions, "mpki over zero committed instructions");
  return static_cast<double>(stats.level(level).misses) * 1000.0 / static_cast<double>(committed);
}

}  // namespace rvmb::memhier
