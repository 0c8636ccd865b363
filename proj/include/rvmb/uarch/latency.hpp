#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rvmb/error.hpp"
#include "rvmb/isa/instruction.hpp"

namespace rvmb::uarch {

using isa::InstrClass;

struct LatencyEntry {
  uint32_t latency = 1;
  bool pipelined = true;
};

/// Execute latency per instruction class. Memory classes hold the base
/// cost; the hierarchy latency of the access is added on top.
struct LatencyTable {
  std::array<LatencyEntry, isa::kClassCount> entries{};

  LatencyTable() {
    set(InstrClass::IntAlu, {1, true});
    set(InstrClass::IntMult, {10, false});
    set(InstrClass::IntDiv, {20, false});
    set(InstrClass::FloatAdd, {4, true});
    set(InstrClass::FloatMult, {4, true});
    set(InstrClass::FloatMultAcc, {5, true});
    set(InstrClass::FloatDiv, {12, false});
    set(InstrClass::FloatMisc, {2, true});
    set(InstrClass::Branch, {1, true});
    set(InstrClass::Jump, {1, true});
    set(InstrClass::MemRead, {1, true});
    set(InstrClass::MemWrite, {1, true});
    set(InstrClass::Other, {1, true});
  }

  const LatencyEntry& operator[](InstrClass c) const { return entries[static_cast<std::size_t>(c)]; }
  LatencyEntry& operator[](InstrClass c) { return entries[static_cast<std::size_t>(c)]; }
  void set(InstrClass c, LatencyEntry e) { (*this)[c] = e; }

  void validate() const {
    for (InstrClass c : isa::kAllClasses) {
      if ((*this)[c].latency < 1) {
        throw Error(ErrorCode::InvalidConfig, "latency of " + std::string(isa::class_name(c)) + " must be >= 1");
      }
    }
  }
};

/// Functional-unit pools. IntMult and IntDiv share one iterative unit.
enum class FuKind : uint8_t { IntAlu, MulDiv, FpFma, FpDiv, Mem };
inline constexpr std::size_t kFuCount = 5;

inline constexpr FuKind fu_of(InstrClass c) {
  switch (c) {
    case InstrClass::IntMult:
    case InstrClass::IntDiv: return FuKind::MulDiv;
    case InstrClass::FloatAdd:
    case InstrClass::FloatMult:
    case InstrClass::FloatMultAcc:
    case InstrClass::FloatMisc: return FuKind::FpFma;
    case InstrClass::FloatDiv: return FuKind::FpDiv;
    case InstrClass::MemRead:
    case InstrClass::MemWrite: return FuKind::Mem;
    default: return FuKind::IntAlu;
  }
}

}  // namespace rvmb::uarch
