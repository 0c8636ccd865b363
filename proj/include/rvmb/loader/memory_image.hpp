#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/arch_state.hpp"

namespace rvmb::loader {

struct Segment {
  uint64_t base = 0;
  std::vector<uint8_t> bytes;  // initialized contents
  uint64_t size = 0;           // mapped size; bytes past `bytes.size()` read as zero
  bool writable = false;
  bool executable = false;

  uint64_t end() const { return base + size; }
  bool contains(uint64_t addr) const { return addr >= base && addr < end(); }
};

struct Symbol {
  uint64_t addr = 0;
  uint64_t size = 0;
};

/// A loadable program: segments, an entry point and named addresses. The
/// `tohost` symbol enables the HTIF exit convention; `output` (with a size)
/// names the region hashed into functional digests.
struct MemoryImage {
  std::vector<Segment> segments;
  uint64_t entry = 0;
  std::map<std::string, Symbol> symbols;

  std::optional<uint64_t> tohost() const {
    auto it = symbols.find("tohost");
    if (it == symbols.end()) return std::nullopt;
    return it->second.addr;
  }

  std::optional<Symbol> output() const {
    auto it = symbols.find("output");
    if (it == symbols.end()) return std::nullopt;
    return it->second;
  }

  const Segment* segment_at(uint64_t addr) const {
    for (const Segment& s : segments) {
      if (s.contains(addr)) return &s;
    }
    return nullptr;
  }

  /// Checks the image invariants: non-overlapping segments and an entry
  /// point inside an executable segment.
  void validate() const {
    std::vector<const Segment*> sorted;
    for (const Segment& s : segments) {
      if (s.bytes.size() > s.size) {
        throw Error(ErrorCode::OverlappingSegments, "segment initializer larger than its mapped size");
      }
      sorted.push_back(&s);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->base < b->base; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i]->base < sorted[i - 1]->end()) {
        throw Error(ErrorCode::OverlappingSegments, "segments overlap at " + std::to_string(sorted[i]->base));
      }
    }
    const Segment* seg = segment_at(entry);
    if (seg == nullptr || !seg->executable) {
      throw Error(ErrorCode::OutOfBoundsAccess, "entry point is not inside an executable segment");
    }
  }

  /// Fresh architectural state with every segment mapped and initialized
  /// and the pc at the entry point.
  isa::ArchState materialize() const {
    validate();
    isa::ArchState s;
    for (const Segment& seg : segments) {
      s.mem.map(seg.base, seg.size, seg.writable);
      s.mem.load_bytes(seg.base, seg.bytes);
    }
    s.pc = entry;
    return s;
  }
};

}  // namespace rvmb::loader
