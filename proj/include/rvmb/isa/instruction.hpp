#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "rvmb/isa/opcode_table.hpp"

namespace rvmb::isa {

enum class Mnemonic : uint16_t {
#define RVMB_X(id, name, match, mask, imm, rd, rs1, rs2, rs3, rm, cls) id,
  RVMB_OPCODES(RVMB_X)
#undef RVMB_X
};

inline constexpr std::size_t kMnemonicCount = 0
#define RVMB_X(id, name, match, mask, imm, rd, rs1, rs2, rs3, rm, cls) +1
    RVMB_OPCODES(RVMB_X)
#undef RVMB_X
    ;

/// Functional-unit class of an instruction, the unit of instruction-mix
/// statistics.
enum class InstrClass : uint8_t {
  IntAlu,
  IntMult,
  IntDiv,
  MemRead,
  MemWrite,
  FloatAdd,
  FloatMult,
  FloatMultAcc,
  FloatDiv,
  FloatMisc,
  Branch,
  Jump,
  Other,
};

inline constexpr std::size_t kClassCount = 13;

inline constexpr std::array<InstrClass, kClassCount> kAllClasses = {
    InstrClass::IntAlu,    InstrClass::IntMult,      InstrClass::IntDiv,   InstrClass::MemRead,
    InstrClass::MemWrite,  InstrClass::FloatAdd,     InstrClass::FloatMult, InstrClass::FloatMultAcc,
    InstrClass::FloatDiv,  InstrClass::FloatMisc,    InstrClass::Branch,   InstrClass::Jump,
    InstrClass::Other};

inline constexpr std::string_view class_name(InstrClass c) {
  constexpr std::array<std::string_view, kClassCount> names = {
      "IntAlu",   "IntMult",  "IntDiv",    "MemRead", "MemWrite", "FloatAdd", "FloatMult",
      "FloatMultAcc", "FloatDiv", "FloatMisc", "Branch",  "Jump",     "Other"};
  return names[static_cast<std::size_t>(c)];
}

enum class ImmFormat : uint8_t { None, I, S, B, U, J, Sh6, Sh5, Fence };
enum class RegKind : uint8_t { N, X, F };

/// Operand width tag: integer ops are W (32-bit) or D (64-bit); float ops
/// are S or D.
enum class Width : uint8_t { None, W, D, S, FD };

struct OpcodeInfo {
  Mnemonic mnemonic;
  std::string_view name;
  uint32_t match;
  uint32_t mask;
  ImmFormat imm;
  RegKind rd, rs1, rs2, rs3;
  bool has_rm;
  InstrClass cls;
};

inline constexpr std::array<OpcodeInfo, kMnemonicCount> kOpcodes = {{
#define RVMB_X(id, nm, mt, mk, im, d, s1, s2, s3, r, c)                                      \
  OpcodeInfo{Mnemonic::id,  nm,         mt,         mk,         ImmFormat::im, RegKind::d,  \
             RegKind::s1,   RegKind::s2, RegKind::s3, r != 0,    InstrClass::c},
    RVMB_OPCODES(RVMB_X)
#undef RVMB_X
}};

inline constexpr const OpcodeInfo& info(Mnemonic m) { return kOpcodes[static_cast<std::size_t>(m)]; }
inline constexpr std::string_view name(Mnemonic m) { return info(m).name; }

/// Rounding-mode field values.
enum RoundingMode : uint8_t { RNE = 0, RTZ = 1, RDN = 2, RUP = 3, RMM = 4, DYN = 7 };

/// A decoded RV64IMFD instruction. Register fields not used by the format
/// are zero; `imm` holds the sign-extended immediate of the encoding format
/// (U-type immediates keep their low 12 zero bits).
struct Instruction {
  Mnemonic mnemonic = Mnemonic::ADDI;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  uint8_t rs3 = 0;
  uint8_t rm = 0;
  Width width = Width::None;
  int64_t imm = 0;
  uint32_t raw = 0;

  /// Field equality, ignoring `raw`.
  bool same_fields(const Instruction& o) const {
    return mnemonic == o.mnemonic && rd == o.rd && rs1 == o.rs1 && rs2 == o.rs2 && rs3 == o.rs3 &&
           rm == o.rm && width == o.width && imm == o.imm;
  }
  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.same_fields(b) && a.raw == b.raw;
  }
};

inline constexpr InstrClass classify(const Instruction& instr) { return info(instr.mnemonic).cls; }

inline constexpr bool is_memory(InstrClass c) { return c == InstrClass::MemRead || c == InstrClass::MemWrite; }
inline constexpr bool is_control(InstrClass c) { return c == InstrClass::Branch || c == InstrClass::Jump; }

constexpr Width width_of(Mnemonic m) {
  const std::string_view n = name(m);
  if (m == Mnemonic::FENCE) return Width::None;
  if (n.front() == 'f') {
    if (n == "fld" || n == "fsd" || n.find(".d") != std::string_view::npos) return Width::FD;
    return Width::S;
  }
  if (n.back() == 'w' && n != "lw" && n != "sw") return Width::W;
  return Width::D;
}

/// Bytes moved by a load or store; 0 for everything else.
constexpr unsigned access_size(Mnemonic m) {
  switch (m) {
    case Mnemonic::LB: case Mnemonic::LBU: case Mnemonic::SB: return 1;
    case Mnemonic::LH: case Mnemonic::LHU: case Mnemonic::SH: return 2;
    case Mnemonic::LW: case Mnemonic::LWU: case Mnemonic::SW:
    case Mnemonic::FLW: case Mnemonic::FSW: return 4;
    case Mnemonic::LD: case Mnemonic::SD: case Mnemonic::FLD: case Mnemonic::FSD: return 8;
    default: return 0;
  }
}

/// Architectural register numbering shared by the timing models: integer
/// registers are 0..31, float registers 32..63.
inline constexpr unsigned kNoReg = 0xff;

struct Operands {
  std::array<uint8_t, 3> sources{kNoReg, kNoReg, kNoReg};
  uint8_t dest = kNoReg;
};

constexpr uint8_t unified(RegKind kind, uint8_t index) {
  if (kind == RegKind::X) return index == 0 ? kNoReg : index;  // x0 carries no dependency
  if (kind == RegKind::F) return static_cast<uint8_t>(32 + index);
  return kNoReg;
}

constexpr Operands operands(const Instruction& instr) {
  const OpcodeInfo& op = info(instr.mnemonic);
  Operands out;
  out.sources = {unified(op.rs1, instr.rs1), unified(op.rs2, instr.rs2), unified(op.rs3, instr.rs3)};
  out.dest = unified(op.rd, instr.rd);
  return out;
}

}  // namespace rvmb::isa
