#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>

#include "rvmb/error.hpp"
#include "rvmb/isa/instruction.hpp"

namespace rvmb::isa {

namespace detail {

constexpr int64_t sext(uint64_t value, unsigned bits) {
  const uint64_t m = uint64_t{1} << (bits - 1);
  value &= (bits == 64) ? ~uint64_t{0} : ((uint64_t{1} << bits) - 1);
  return static_cast<int64_t>((value ^ m) - m);
}

constexpr uint32_t bits(uint32_t w, unsigned hi, unsigned lo) { return (w >> lo) & ((1u << (hi - lo + 1)) - 1); }

constexpr int64_t decode_imm(ImmFormat f, uint32_t w) {
  switch (f) {
    case ImmFormat::None: return 0;
    case ImmFormat::I: return sext(w >> 20, 12);
    case ImmFormat::S: return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12);
    case ImmFormat::B:
      return sext((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1),
                  13);
    case ImmFormat::U: return sext(w & 0xfffff000u, 32);
    case ImmFormat::J:
      return sext((bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) |
                      (bits(w, 30, 21) << 1),
                  21);
    case ImmFormat::Sh6: return bits(w, 25, 20);
    case ImmFormat::Sh5: return bits(w, 24, 20);
    case ImmFormat::Fence: return bits(w, 27, 20);
  }
  return 0;
}

inline bool fits_signed(int64_t v, unsigned bits) {
  const int64_t lo = -(int64_t{1} << (bits - 1));
  const int64_t hi = (int64_t{1} << (bits - 1)) - 1;
  return v >= lo && v <= hi;
}

inline uint32_t encode_imm(ImmFormat f, int64_t imm, std::string_view mnem) {
  auto out_of_range = [&](const char* what) {
    return Error(ErrorCode::ImmediateOutOfRange,
                 std::string(mnem) + ": immediate " + std::to_string(imm) + " " + what);
  };
  const auto u = static_cast<uint64_t>(imm);
  switch (f) {
    case ImmFormat::None: return 0;
    case ImmFormat::I:
      if (!fits_signed(imm, 12)) throw out_of_range("does not fit a signed 12-bit field");
      return static_cast<uint32_t>(u & 0xfff) << 20;
    case ImmFormat::S:
      if (!fits_signed(imm, 12)) throw out_of_range("does not fit a signed 12-bit field");
      return (static_cast<uint32_t>((u >> 5) & 0x7f) << 25) | (static_cast<uint32_t>(u & 0x1f) << 7);
    case ImmFormat::B:
      if (!fits_signed(imm, 13)) throw out_of_range("is outside the +-4 KiB branch range");
      if (imm & 1) throw out_of_range("is not 2-byte aligned");
      return (static_cast<uint32_t>((u >> 12) & 1) << 31) | (static_cast<uint32_t>((u >> 5) & 0x3f) << 25) |
             (static_cast<uint32_t>((u >> 1) & 0xf) << 8) | (static_cast<uint32_t>((u >> 11) & 1) << 7);
    case ImmFormat::U:
      if (!fits_signed(imm, 32) || (imm & 0xfff) != 0)
        throw out_of_range("is not a sign-extended 20-bit upper immediate");
      return static_cast<uint32_t>(u & 0xfffff000u);
    case ImmFormat::J:
      if (!fits_signed(imm, 21)) throw out_of_range("is outside the +-1 MiB jump range");
      if (imm & 1) throw out_of_range("is not 2-byte aligned");
      return (static_cast<uint32_t>((u >> 20) & 1) << 31) | (static_cast<uint32_t>((u >> 1) & 0x3ff) << 21) |
             (static_cast<uint32_t>((u >> 11) & 1) << 20) | (static_cast<uint32_t>((u >> 12) & 0xff) << 12);
    case ImmFormat::Sh6:
      if (imm < 0 || imm > 63) throw out_of_range("is not a 6-bit shift amount");
      return static_cast<uint32_t>(imm) << 20;
    case ImmFormat::Sh5:
      if (imm < 0 || imm > 31) throw out_of_range("is not a 5-bit shift amount");
      return static_cast<uint32_t>(imm) << 20;
    case ImmFormat::Fence:
      if (imm < 0 || imm > 0xff) throw out_of_range("is not a pred/succ pair");
      return static_cast<uint32_t>(imm) << 20;
  }
  return 0;
}

/// Opcode lookup buckets keyed by the 7-bit major opcode.
struct DecodeIndex {
  std::array<std::array<uint8_t, 64>, 128> entries{};
  std::array<uint8_t, 128> count{};

  constexpr DecodeIndex() {
    for (std::size_t i = 0; i < kOpcodes.size(); ++i) {
      const uint32_t major = kOpcodes[i].match & 0x7f;
      entries[major][count[major]++] = static_cast<uint8_t>(i);
    }
  }
};

inline constexpr DecodeIndex kDecodeIndex{};

}  // namespace detail

/// Decodes one 32-bit RV64IMFD instruction word. Compressed, atomic and
/// vector encodings are rejected along with everything else outside the
/// table.
inline Instruction decode(uint32_t word) {
  if ((word & 0x3) != 0x3) {
    throw Error(ErrorCode::IllegalInstruction, "word is not a 32-bit encoding: " + std::to_string(word));
  }
  const uint32_t major = word & 0x7f;
  const auto& bucket = detail::kDecodeIndex.entries[major];
  for (uint8_t k = 0; k < detail::kDecodeIndex.count[major]; ++k) {
    const OpcodeInfo& op = kOpcodes[bucket[k]];
    if ((word & op.mask) != op.match) continue;
    Instruction instr;
    instr.mnemonic = op.mnemonic;
    instr.raw = word;
    instr.width = width_of(op.mnemonic);
    if (op.rd != RegKind::N) instr.rd = static_cast<uint8_t>(detail::bits(word, 11, 7));
    if (op.rs1 != RegKind::N) instr.rs1 = static_cast<uint8_t>(detail::bits(word, 19, 15));
    if (op.rs2 != RegKind::N) instr.rs2 = static_cast<uint8_t>(detail::bits(word, 24, 20));
    if (op.rs3 != RegKind::N) instr.rs3 = static_cast<uint8_t>(detail::bits(word, 31, 27));
    if (op.has_rm) {
      instr.rm = static_cast<uint8_t>(detail::bits(word, 14, 12));
      if (instr.rm == 5 || instr.rm == 6) {
        throw Error(ErrorCode::IllegalInstruction, "reserved rounding mode in " + std::string(op.name));
      }
    }
    instr.imm = detail::decode_imm(op.imm, word);
    return instr;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", word);
  throw Error(ErrorCode::IllegalInstruction, std::string("undecodable word ") + buf);
}

/// Encodes an instruction from its fields (`raw` is ignored).
inline uint32_t encode(const Instruction& instr) {
  const OpcodeInfo& op = info(instr.mnemonic);
  auto reg = [&](uint8_t r) {
    if (r > 31) throw Error(ErrorCode::SyntaxError, std::string(op.name) + ": register index out of range");
    return static_cast<uint32_t>(r);
  };
  uint32_t w = op.match;
  if (op.rd != RegKind::N) w |= reg(instr.rd) << 7;
  if (op.rs1 != RegKind::N) w |= reg(instr.rs1) << 15;
  if (op.rs2 != RegKind::N) w |= reg(instr.rs2) << 20;
  if (op.rs3 != RegKind::N) w |= reg(instr.rs3) << 27;
  if (op.has_rm) {
    if (instr.rm > 7 || instr.rm == 5 || instr.rm == 6) {
      throw Error(ErrorCode::SyntaxError, std::string(op.name) + ": invalid rounding mode");
    }
    w |= static_cast<uint32_t>(instr.rm) << 12;
  }
  w |= detail::encode_imm(op.imm, instr.imm, op.name);
  return w;
}

/// Builds a fully populated Instruction (including `raw`) from fields.
inline Instruction make(Mnemonic m, uint8_t rd = 0, uint8_t rs1 = 0, uint8_t rs2 = 0, int64_t imm = 0,
                        uint8_t rs3 = 0, uint8_t rm = DYN) {
  const OpcodeInfo& op = info(m);
  Instruction instr;
  instr.mnemonic = m;
  instr.rd = op.rd != RegKind::N ? rd : 0;
  instr.rs1 = op.rs1 != RegKind::N ? rs1 : 0;
  instr.rs2 = op.rs2 != RegKind::N ? rs2 : 0;
  instr.rs3 = op.rs3 != RegKind::N ? rs3 : 0;
  instr.rm = op.has_rm ? rm : 0;
  instr.imm = op.imm != ImmFormat::None ? imm : 0;
  instr.width = width_of(m);
  instr.raw = encode(instr);
  return instr;
}

inline std::string_view rounding_mode_name(uint8_t rm) {
  switch (rm) {
    case RNE: return "rne";
    case RTZ: return "rtz";
    case RDN: return "rdn";
    case RUP: return "rup";
    case RMM: return "rmm";
    default: return "dyn";
  }
}

inline std::string fence_set_name(unsigned bits4) {
  std::string s;
  if (bits4 & 8) s += 'i';
  if (bits4 & 4) s += 'o';
  if (bits4 & 2) s += 'r';
  if (bits4 & 1) s += 'w';
  return s.empty() ? "0" : s;
}

/// Renders an instruction in the assembler's input syntax, using xN/fN
/// register names and numeric branch offsets.
inline std::string disassemble(const Instruction& instr) {
  const OpcodeInfo& op = info(instr.mnemonic);
  auto r = [](RegKind k, uint8_t i) { return std::string(k == RegKind::F ? "f" : "x") + std::to_string(i); };
  std::string s(op.name);
  const bool load = op.cls == InstrClass::MemRead;
  const bool store = op.cls == InstrClass::MemWrite;
  if (load) {
    s += " " + r(op.rd, instr.rd) + ", " + std::to_string(instr.imm) + "(" + r(op.rs1, instr.rs1) + ")";
  } else if (store) {
    s += " " + r(op.rs2, instr.rs2) + ", " + std::to_string(instr.imm) + "(" + r(op.rs1, instr.rs1) + ")";
  } else if (op.imm == ImmFormat::Fence) {
    s += " " + fence_set_name((instr.imm >> 4) & 0xf) + ", " + fence_set_name(instr.imm & 0xf);
  } else {
    std::string sep = " ";
    auto add = [&](const std::string& part) {
      s += sep + part;
      sep = ", ";
    };
    if (op.rd != RegKind::N) add(r(op.rd, instr.rd));
    if (op.rs1 != RegKind::N) add(r(op.rs1, instr.rs1));
    if (op.rs2 != RegKind::N) add(r(op.rs2, instr.rs2));
    if (op.rs3 != RegKind::N) add(r(op.rs3, instr.rs3));
    if (op.imm == ImmFormat::U) {
      add(std::to_string(static_cast<uint64_t>(instr.imm) >> 12 & 0xfffff));
    } else if (op.imm != ImmFormat::None) {
      add(std::to_string(instr.imm));
    }
    if (op.has_rm && instr.rm != DYN) add(std::string(rounding_mode_name(instr.rm)));
  }
  return s;
}

}  // namespace rvmb::isa
