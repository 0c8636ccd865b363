#pragma once

#include <cstdint>
#include <optional>

#include "rvmb/isa/arch_state.hpp"
#include "rvmb/isa/instruction.hpp"
#include "rvmb/loader/memory_image.hpp"

namespace rvmb::loader {

inline constexpr uint64_t kExitSyscall = 93;

/// Exit conventions, evaluated on the state right after `instr` committed:
///  - HTIF: a store of v with v & 1 to the `tohost` address exits with v >> 1.
///  - ECALL with a7 (x17) == 93 exits with the low 32 bits of a0 (x10).
inline std::optional<int64_t> exit_check(const isa::ArchState& state, const isa::Instruction& instr,
                                         std::optional<uint64_t> tohost) {
  using M = isa::Mnemonic;
  if (instr.mnemonic == M::ECALL) {
    if (state.reg(17) == kExitSyscall) return static_cast<int32_t>(static_cast<uint32_t>(state.reg(10)));
    return std::nullopt;
  }
  if (!tohost || isa::classify(instr) != isa::InstrClass::MemWrite) return std::nullopt;
  const uint64_t addr = state.reg(instr.rs1) + static_cast<uint64_t>(instr.imm);
  if (addr != *tohost) return std::nullopt;
  uint64_t value = 0;
  switch (instr.mnemonic) {
    case M::SB: value = state.reg(instr.rs2) & 0xff; break;
    case M::SH: value = state.reg(instr.rs2) & 0xffff; break;
    case M::SW: value = state.reg(instr.rs2) & 0xffffffffu; break;
    case M::SD: value = state.reg(instr.rs2); break;
    case M::FSW: value = state.f[instr.rs2] & 0xffffffffu; break;
    case M::FSD: value = state.f[instr.rs2]; break;
    default: return std::nullopt;
  }
  if ((value & 1) == 0) return std::nullopt;
  return static_cast<int64_t>(value >> 1);
}

inline std::optional<int64_t> exit_check(const isa::ArchState& state, const isa::Instruction& instr,
                                         const MemoryImage& image) {
  return exit_check(state, instr, image.tohost());
}

}  // namespace rvmb::loader
