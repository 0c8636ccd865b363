#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "rvmb/error.hpp"

namespace rvmb::memhier {

struct CacheConfig {
  uint64_t size = 64 * 1024;
  uint64_t ways = 4;
  uint64_t line = 64;
  uint64_t hit_latency = 2;

  uint64_t sets() const { return size / (ways * line); }

  void validate(const std::string& what) const {
    if (ways == 0 || line == 0 || hit_latency == 0 || size == 0) {
      throw Error(ErrorCode::InvalidConfig, what + ": size, ways, line and hit_latency must be positive");
    }
    if (size % (ways * line) != 0) throw Error(ErrorCode::InvalidConfig, what + ": size not divisible by ways*line");
    if (!std::has_single_bit(sets())) throw Error(ErrorCode::InvalidConfig, what + ": set count is not a power of two");
    if (!std::has_single_bit(line)) throw Error(ErrorCode::InvalidConfig, what + ": line size is not a power of two");
  }
};

struct LevelStats {
  uint64_t accesses = 0;
  uint64_t misses = 0;
  uint64_t evictions = 0;
  uint64_t writebacks = 0;

  bool operator==(const LevelStats&) const = default;
};

/// One set-associative, write-back, write-allocate cache with strict LRU.
class Cache {
 public:
  struct Outcome {
    bool hit = false;
    bool evicted_dirty = false;
    uint64_t evicted_line = 0;  // line address of a dirty victim
  };

  explicit Cache(const CacheConfig& cfg)
      : cfg_(cfg),
        set_mask_(cfg.sets() - 1),
        line_shift_(static_cast<unsigned>(std::countr_zero(cfg.line))),
        ways_(cfg.sets() * cfg.ways) {}

  const CacheConfig& config() const { return cfg_; }
  const LevelStats& stats() const { return stats_; }

  /// Looks up the line holding `addr`, filling it on a miss.
  Outcome access(uint64_t addr, bool write) {
    ++stats_.accesses;
    const uint64_t line = addr >> line_shift_;
    Way* set = &ways_[(line & set_mask_) * cfg_.ways];
    ++clock_;
    Way* victim = set;
    for (uint64_t w = 0; w < cfg_.ways; ++w) {
      Way& way = set[w];
      if (way.valid && way.line == line) {
        way.stamp = clock_;
        way.dirty |= write;
        return {true, false, 0};
      }
      if (!way.valid) {
        if (victim->valid) victim = &way;
      } else if (victim->valid && way.stamp < victim->stamp) {
        victim = &way;
      }
    }
    ++stats_.misses;
    Outcome out;
    if (victim->valid) {
      ++stats_.evictions;
      if (victim->dirty) {
        ++stats_.writebacks;
        out.evicted_dirty = true;
        out.evicted_line = victim->line << line_shift_;
      }
    }
    *victim = Way{line, clock_, true, write};
    return out;
  }

  /// Marks a resident line dirty without touching LRU order or counters.
  /// Returns false if the line is not resident.
  bool absorb_writeback(uint64_t addr) {
    const uint64_t line = addr >> line_shift_;
    Way* set = &ways_[(line & set_mask_) * cfg_.ways];
    for (uint64_t w = 0; w < cfg_.ways; ++w) {
      if (set[w].valid && set[w].line == line) {
        set[w].dirty = true;
        return true;
      }
    }
    return false;
  }

 private:
  struct Way {
    uint64_t line = 0;
    uint64_t stamp = 0;
    bool valid = false;
    bool dirty = false;
  };

  CacheConfig cfg_;
  uint64_t set_mask_;
  unsigned line_shift_;
  std::vector<Way> ways_;
  uint64_t clock_ = 0;
  LevelStats stats_;
};

}  // namespace rvmb::memhier
