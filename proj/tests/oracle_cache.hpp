#pragma once

// Brute-force reference for the cache hierarchy: per-set std::list in
// recency order, no stamps, no shared code with memhier. Used to replay
// recorded traces and compare miss counts.

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <vector>

#include "rvmb/isa/execute.hpp"

namespace oracle {

struct Geometry {
  uint64_t size, ways, line;
};

struct Counts {
  uint64_t accesses = 0, misses = 0, writebacks = 0;
};

class LruCache {
 public:
  explicit LruCache(Geometry g) : g_(g), sets_(g.size / (g.ways * g.line)) {}

  // Returns {hit, dirty victim line address if any}.
  std::pair<bool, std::optional<uint64_t>> access(uint64_t addr, bool write) {
    ++counts.accesses;
    const uint64_t line = addr / g_.line;
    auto& set = sets_by_index_[line % sets_];
    for (auto it = set.begin(); it != set.end(); ++it) {
      if (it->line == line) {
        Entry e = *it;
        e.dirty = e.dirty || write;
        set.erase(it);
        set.push_front(e);  // most recent at front
        return {true, std::nullopt};
      }
    }
    ++counts.misses;
    std::optional<uint64_t> victim;
    if (set.size() == g_.ways) {
      if (set.back().dirty) {
        ++counts.writebacks;
        victim = set.back().line * g_.line;
      }
      set.pop_back();
    }
    set.push_front({line, write});
    return {false, victim};
  }

  // Marks a resident line dirty without touching recency.
  void absorb(uint64_t addr) {
    const uint64_t line = addr / g_.line;
    for (Entry& e : sets_by_index_[line % sets_]) {
      if (e.line == line) e.dirty = true;
    }
  }

  Counts counts;

 private:
  struct Entry {
    uint64_t line;
    bool dirty;
  };
  Geometry g_;
  uint64_t sets_;
  std::map<uint64_t, std::list<Entry>> sets_by_index_;
};

class Hierarchy {
 public:
  Hierarchy(Geometry l1i, Geometry l1d, Geometry l2) : l1i(l1i), l1d(l1d), l2(l2) {}

  void access(uint64_t addr, bool ifetch, bool write) {
    LruCache& l1 = ifetch ? l1i : l1d;
    auto [hit, victim] = l1.access(addr, write);
    if (victim) l2.absorb(*victim);
    if (!hit) l2.access(addr, false);
  }

  // Feeds one committed instruction the way the timing models drive the
  // hierarchy: an ifetch when the instruction line changes, then the data
  // access of the instruction.
  void observe(const rvmb::isa::TraceEvent& ev, uint64_t line_bytes) {
    if (!line_ || *line_ != ev.pc / line_bytes) {
      line_ = ev.pc / line_bytes;
      access(ev.pc, true, false);
    }
    if (ev.mem) access(ev.mem->addr, false, ev.mem->is_write);
  }

  void replay(const std::vector<rvmb::isa::TraceEvent>& trace, uint64_t line_bytes) {
    for (const auto& ev : trace) observe(ev, line_bytes);
  }

  LruCache l1i, l1d, l2;

 private:
  std::optional<uint64_t> line_;
};

}  // namespace oracle
