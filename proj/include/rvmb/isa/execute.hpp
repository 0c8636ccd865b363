#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>

#include "rvmb/error.hpp"
#include "rvmb/isa/arch_state.hpp"
#include "rvmb/isa/fp.hpp"
#include "rvmb/isa/instruction.hpp"

namespace rvmb::isa {

struct MemAccess {
  uint64_t addr = 0;
  uint8_t size = 0;
  bool is_write = false;

  friend bool operator==(const MemAccess&, const MemAccess&) = default;
};

/// One committed instruction. `mem` is present exactly for MemRead and
/// MemWrite instructions.
struct TraceEvent {
  uint64_t seq = 0;
  uint64_t pc = 0;
  InstrClass cls = InstrClass::Other;
  std::optional<MemAccess> mem;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

namespace detail {

inline int64_t sx32(uint64_t v) { return static_cast<int32_t>(static_cast<uint32_t>(v)); }

inline void require_rm(const Instruction& in) {
  if (in.rm != RNE && in.rm != DYN) {
    throw Error(ErrorCode::IllegalInstruction,
                std::string(name(in.mnemonic)) + ": only round-to-nearest-even is supported");
  }
}

inline uint64_t div_s(int64_t a, int64_t b) {
  if (b == 0) return ~uint64_t{0};
  if (a == INT64_MIN && b == -1) return static_cast<uint64_t>(a);
  return static_cast<uint64_t>(a / b);
}
inline uint64_t rem_s(int64_t a, int64_t b) {
  if (b == 0) return static_cast<uint64_t>(a);
  if (a == INT64_MIN && b == -1) return 0;
  return static_cast<uint64_t>(a % b);
}
inline uint64_t div_u(uint64_t a, uint64_t b) { return b == 0 ? ~uint64_t{0} : a / b; }
inline uint64_t rem_u(uint64_t a, uint64_t b) { return b == 0 ? a : a % b; }

}  // namespace detail

/// Applies one instruction to `s`. The caller supplies the committed-instruction
/// ordinal used for the returned event.
inline TraceEvent step(ArchState& s, const Instruction& in, uint64_t seq = 0) {
  using M = Mnemonic;
  using detail::sx32;
  const InstrClass cls = classify(in);
  TraceEvent ev{seq, s.pc, cls, std::nullopt};

  const uint64_t a = s.reg(in.rs1);
  const uint64_t b = s.reg(in.rs2);
  const auto sa = static_cast<int64_t>(a);
  const auto sb = static_cast<int64_t>(b);
  const auto imm = static_cast<uint64_t>(in.imm);
  uint64_t next = s.pc + 4;
  const unsigned cvt_rm = in.rm == DYN ? unsigned{RNE} : unsigned{in.rm};

  auto wr = [&](uint64_t v) { s.set_reg(in.rd, v); };
  auto fs = [&](unsigned r) { return fp::unbox(s.f[r]); };
  auto fd = [&](unsigned r) { return std::bit_cast<double>(s.f[r]); };
  auto wfs = [&](float v) { s.f[in.rd] = fp::box(v); };
  auto wfd = [&](double v) { s.f[in.rd] = std::bit_cast<uint64_t>(v); };

  auto effective = [&](unsigned size, bool is_write) {
    const uint64_t addr = a + imm;
    if (addr % size != 0) {
      throw Error(ErrorCode::UnalignedAccess, std::string(name(in.mnemonic)) + " at unaligned address", s.pc);
    }
    ev.mem = MemAccess{addr, static_cast<uint8_t>(size), is_write};
    return addr;
  };
  auto load = [&]<typename T>(T) -> T { return s.mem.read<T>(effective(sizeof(T), false)); };
  auto store = [&]<typename T>(T v) { s.mem.write<T>(effective(sizeof(T), true), v); };
  auto misaligned = [&](uint64_t target) {
    if (target % 4 != 0) {
      throw Error(ErrorCode::UnalignedAccess, "control transfer to a misaligned target", s.pc);
    }
  };
  auto branch = [&](bool taken) {
    if (taken) {
      next = s.pc + imm;
      misaligned(next);
    }
  };
  auto jump = [&](uint64_t target) {
    misaligned(target);
    next = target;
    wr(s.pc + 4);
  };

  try {
    switch (in.mnemonic) {
      case M::LUI: wr(imm); break;
      case M::AUIPC: wr(s.pc + imm); break;
      case M::JAL:
        jump(s.pc + imm);
        break;
      case M::JALR:
        jump((a + imm) & ~uint64_t{1});
        break;
      case M::BEQ: branch(a == b); break;
      case M::BNE: branch(a != b); break;
      case M::BLT: branch(sa < sb); break;
      case M::BGE: branch(sa >= sb); break;
      case M::BLTU: branch(a < b); break;
      case M::BGEU: branch(a >= b); break;
      case M::LB: wr(static_cast<uint64_t>(static_cast<int64_t>(load(int8_t{})))); break;
      case M::LH: wr(static_cast<uint64_t>(static_cast<int64_t>(load(int16_t{})))); break;
      case M::LW: wr(static_cast<uint64_t>(static_cast<int64_t>(load(int32_t{})))); break;
      case M::LD: wr(load(uint64_t{})); break;
      case M::LBU: wr(load(uint8_t{})); break;
      case M::LHU: wr(load(uint16_t{})); break;
      case M::LWU: wr(load(uint32_t{})); break;
      case M::SB: store(static_cast<uint8_t>(b)); break;
      case M::SH: store(static_cast<uint16_t>(b)); break;
      case M::SW: store(static_cast<uint32_t>(b)); break;
      case M::SD: store(b); break;
      case M::ADDI: wr(a + imm); break;
      case M::SLTI: wr(sa < in.imm ? 1 : 0); break;
      case M::SLTIU: wr(a < imm ? 1 : 0); break;
      case M::XORI: wr(a ^ imm); break;
      case M::ORI: wr(a | imm); break;
      case M::ANDI: wr(a & imm); break;
      case M::SLLI: wr(a << in.imm); break;
      case M::SRLI: wr(a >> in.imm); break;
      case M::SRAI: wr(static_cast<uint64_t>(sa >> in.imm)); break;
      case M::ADD: wr(a + b); break;
      case M::SUB: wr(a - b); break;
      case M::SLL: wr(a << (b & 63)); break;
      case M::SLT: wr(sa < sb ? 1 : 0); break;
      case M::SLTU: wr(a < b ? 1 : 0); break;
      case M::XOR: wr(a ^ b); break;
      case M::SRL: wr(a >> (b & 63)); break;
      case M::SRA: wr(static_cast<uint64_t>(sa >> (b & 63))); break;
      case M::OR: wr(a | b); break;
      case M::AND: wr(a & b); break;
      case M::FENCE: break;
      case M::ECALL: break;  // the runner applies the exit convention
      case M::EBREAK: throw Error(ErrorCode::Breakpoint, "ebreak", s.pc);
      case M::ADDIW: wr(static_cast<uint64_t>(sx32(a + imm))); break;
      case M::SLLIW: wr(static_cast<uint64_t>(sx32(a << in.imm))); break;
      case M::SRLIW: wr(static_cast<uint64_t>(sx32(static_cast<uint32_t>(a) >> in.imm))); break;
      case M::SRAIW: wr(static_cast<uint64_t>(static_cast<int64_t>(static_cast<int32_t>(a) >> in.imm))); break;
      case M::ADDW: wr(static_cast<uint64_t>(sx32(a + b))); break;
      case M::SUBW: wr(static_cast<uint64_t>(sx32(a - b))); break;
      case M::SLLW: wr(static_cast<uint64_t>(sx32(a << (b & 31)))); break;
      case M::SRLW: wr(static_cast<uint64_t>(sx32(static_cast<uint32_t>(a) >> (b & 31)))); break;
      case M::SRAW: wr(static_cast<uint64_t>(static_cast<int64_t>(static_cast<int32_t>(a) >> (b & 31)))); break;
      case M::MUL: wr(a * b); break;
      case M::MULH:
        wr(static_cast<uint64_t>((static_cast<__int128>(sa) * static_cast<__int128>(sb)) >> 64));
        break;
      case M::MULHSU:
        wr(static_cast<uint64_t>((static_cast<__int128>(sa) * static_cast<__int128>(static_cast<unsigned __int128>(b))) >> 64));
        break;
      case M::MULHU:
        wr(static_cast<uint64_t>((static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b)) >> 64));
        break;
      case M::DIV: wr(detail::div_s(sa, sb)); break;
      case M::DIVU: wr(detail::div_u(a, b)); break;
      case M::REM: wr(detail::rem_s(sa, sb)); break;
      case M::REMU: wr(detail::rem_u(a, b)); break;
      case M::MULW: wr(static_cast<uint64_t>(sx32(a * b))); break;
      case M::DIVW: wr(static_cast<uint64_t>(sx32(detail::div_s(sx32(a), sx32(b))))); break;
      case M::DIVUW:
        wr(static_cast<uint64_t>(sx32(detail::div_u(static_cast<uint32_t>(a), static_cast<uint32_t>(b)))));
        break;
      case M::REMW: wr(static_cast<uint64_t>(sx32(detail::rem_s(sx32(a), sx32(b))))); break;
      case M::REMUW:
        wr(static_cast<uint64_t>(sx32(detail::rem_u(static_cast<uint32_t>(a), static_cast<uint32_t>(b)))));
        break;

      // single precision
      case M::FLW: s.f[in.rd] = fp::box_bits(load(uint32_t{})); break;
      case M::FSW: store(static_cast<uint32_t>(s.f[in.rs2])); break;
      case M::FMADD_S: detail::require_rm(in); wfs(fp::fused(fs(in.rs1), fs(in.rs2), fs(in.rs3))); break;
      case M::FMSUB_S: detail::require_rm(in); wfs(fp::fused(fs(in.rs1), fs(in.rs2), -fs(in.rs3))); break;
      case M::FNMSUB_S: detail::require_rm(in); wfs(fp::fused(-fs(in.rs1), fs(in.rs2), fs(in.rs3))); break;
      case M::FNMADD_S: detail::require_rm(in); wfs(fp::fused(-fs(in.rs1), fs(in.rs2), -fs(in.rs3))); break;
      case M::FADD_S: detail::require_rm(in); wfs(fp::canon(fs(in.rs1) + fs(in.rs2))); break;
      case M::FSUB_S: detail::require_rm(in); wfs(fp::canon(fs(in.rs1) - fs(in.rs2))); break;
      case M::FMUL_S: detail::require_rm(in); wfs(fp::canon(fs(in.rs1) * fs(in.rs2))); break;
      case M::FDIV_S: detail::require_rm(in); wfs(fp::canon(fs(in.rs1) / fs(in.rs2))); break;
      case M::FSQRT_S: detail::require_rm(in); wfs(fp::canon(std::sqrt(fs(in.rs1)))); break;
      case M::FSGNJ_S:
      case M::FSGNJN_S:
      case M::FSGNJX_S: {
        const uint32_t x = fp::unbox_bits(s.f[in.rs1]);
        const uint32_t y = fp::unbox_bits(s.f[in.rs2]);
        uint32_t sign = y & 0x80000000u;
        if (in.mnemonic == M::FSGNJN_S) sign ^= 0x80000000u;
        if (in.mnemonic == M::FSGNJX_S) sign = (x ^ y) & 0x80000000u;
        s.f[in.rd] = fp::box_bits((x & 0x7fffffffu) | sign);
        break;
      }
      case M::FMIN_S: wfs(fp::min(fs(in.rs1), fs(in.rs2))); break;
      case M::FMAX_S: wfs(fp::max(fs(in.rs1), fs(in.rs2))); break;
      case M::FCVT_W_S: wr(static_cast<uint64_t>(static_cast<int64_t>(fp::to_int<int32_t>(fs(in.rs1), cvt_rm)))); break;
      case M::FCVT_WU_S: wr(static_cast<uint64_t>(sx32(fp::to_int<uint32_t>(fs(in.rs1), cvt_rm)))); break;
      case M::FCVT_L_S: wr(static_cast<uint64_t>(fp::to_int<int64_t>(fs(in.rs1), cvt_rm))); break;
      case M::FCVT_LU_S: wr(fp::to_int<uint64_t>(fs(in.rs1), cvt_rm)); break;
      case M::FMV_X_W: wr(static_cast<uint64_t>(sx32(s.f[in.rs1]))); break;
      case M::FCLASS_S: wr(fp::classify(fs(in.rs1))); break;
      case M::FEQ_S: wr(fs(in.rs1) == fs(in.rs2) ? 1 : 0); break;
      case M::FLT_S: wr(fs(in.rs1) < fs(in.rs2) ? 1 : 0); break;
      case M::FLE_S: wr(fs(in.rs1) <= fs(in.rs2) ? 1 : 0); break;
      case M::FCVT_S_W: detail::require_rm(in); wfs(static_cast<float>(static_cast<int32_t>(a))); break;
      case M::FCVT_S_WU: detail::require_rm(in); wfs(static_cast<float>(static_cast<uint32_t>(a))); break;
      case M::FCVT_S_L: detail::require_rm(in); wfs(static_cast<float>(sa)); break;
      case M::FCVT_S_LU: detail::require_rm(in); wfs(static_cast<float>(a)); break;
      case M::FMV_W_X: s.f[in.rd] = fp::box_bits(static_cast<uint32_t>(a)); break;

      // double precision
      case M::FLD: s.f[in.rd] = load(uint64_t{}); break;
      case M::FSD: store(s.f[in.rs2]); break;
      case M::FMADD_D: detail::require_rm(in); wfd(fp::fused(fd(in.rs1), fd(in.rs2), fd(in.rs3))); break;
      case M::FMSUB_D: detail::require_rm(in); wfd(fp::fused(fd(in.rs1), fd(in.rs2), -fd(in.rs3))); break;
      case M::FNMSUB_D: detail::require_rm(in); wfd(fp::fused(-fd(in.rs1), fd(in.rs2), fd(in.rs3))); break;
      case M::FNMADD_D: detail::require_rm(in); wfd(fp::fused(-fd(in.rs1), fd(in.rs2), -fd(in.rs3))); break;
      case M::FADD_D: detail::require_rm(in); wfd(fp::canon(fd(in.rs1) + fd(in.rs2))); break;
      case M::FSUB_D: detail::require_rm(in); wfd(fp::canon(fd(in.rs1) - fd(in.rs2))); break;
      case M::FMUL_D: detail::require_rm(in); wfd(fp::canon(fd(in.rs1) * fd(in.rs2))); break;
      case M::FDIV_D: detail::require_rm(in); wfd(fp::canon(fd(in.rs1) / fd(in.rs2))); break;
      case M::FSQRT_D: detail::require_rm(in); wfd(fp::canon(std::sqrt(fd(in.rs1)))); break;
      case M::FSGNJ_D:
      case M::FSGNJN_D:
      case M::FSGNJX_D: {
        constexpr uint64_t kSign = 0x8000000000000000ull;
        const uint64_t x = s.f[in.rs1];
        const uint64_t y = s.f[in.rs2];
        uint64_t sign = y & kSign;
        if (in.mnemonic == M::FSGNJN_D) sign ^= kSign;
        if (in.mnemonic == M::FSGNJX_D) sign = (x ^ y) & kSign;
        s.f[in.rd] = (x & ~kSign) | sign;
        break;
      }
      case M::FMIN_D: wfd(fp::min(fd(in.rs1), fd(in.rs2))); break;
      case M::FMAX_D: wfd(fp::max(fd(in.rs1), fd(in.rs2))); break;
      case M::FCVT_S_D: detail::require_rm(in); wfs(fp::canon(static_cast<float>(fd(in.rs1)))); break;
      case M::FCVT_D_S: detail::require_rm(in); wfd(fp::canon(static_cast<double>(fs(in.rs1)))); break;
      case M::FEQ_D: wr(fd(in.rs1) == fd(in.rs2) ? 1 : 0); break;
      case M::FLT_D: wr(fd(in.rs1) < fd(in.rs2) ? 1 : 0); break;
      case M::FLE_D: wr(fd(in.rs1) <= fd(in.rs2) ? 1 : 0); break;
      case M::FCLASS_D: wr(fp::classify(fd(in.rs1))); break;
      case M::FCVT_W_D: wr(static_cast<uint64_t>(static_cast<int64_t>(fp::to_int<int32_t>(fd(in.rs1), cvt_rm)))); break;
      case M::FCVT_WU_D: wr(static_cast<uint64_t>(sx32(fp::to_int<uint32_t>(fd(in.rs1), cvt_rm)))); break;
      case M::FCVT_L_D: wr(static_cast<uint64_t>(fp::to_int<int64_t>(fd(in.rs1), cvt_rm))); break;
      case M::FCVT_LU_D: wr(fp::to_int<uint64_t>(fd(in.rs1), cvt_rm)); break;
      case M::FCVT_D_W: detail::require_rm(in); wfd(static_cast<double>(static_cast<int32_t>(a))); break;
      case M::FCVT_D_WU: detail::require_rm(in); wfd(static_cast<double>(static_cast<uint32_t>(a))); break;
      case M::FCVT_D_L: detail::require_rm(in); wfd(static_cast<double>(sa)); break;
      case M::FCVT_D_LU: detail::require_rm(in); wfd(static_cast<double>(a)); break;
      case M::FMV_X_D: wr(s.f[in.rs1]); break;
      case M::FMV_D_X: s.f[in.rd] = a; break;
    }
  } catch (const Error& e) {
    if (e.pc()) throw;
    throw Error(e.code(), e.message(), s.pc);
  }

  s.pc = next;
  return ev;
}

}  // namespace rvmb::isa
