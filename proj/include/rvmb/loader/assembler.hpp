#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/codec.hpp"
#include "rvmb/isa/instruction.hpp"
#include "rvmb/loader/memory_image.hpp"

namespace rvmb::loader {

// Assembler for the RV64IMFD subset.
//
// Syntax, one statement per line:
//   label:                      labels may share a line with a statement
//   addi x5, x0, 42             x0-x31, f0-f31 or ABI names (a0, t1, fs2, ...)
//   lw a0, -8(sp)               memory operands as imm(reg)
//   beq a0, a1, loop            branch/jump targets are labels, "." or byte offsets
//   fmadd.s fa0, fa1, fa2, fa3, rne   optional trailing rounding mode
//   .word 1, 2  .dword 3, label  .zero 16  .align 3  .size sym, 64
//   # ; and // start comments
// Pseudo-instructions: nop, li, la, mv, not, neg, j, jr, ret, call, beqz,
// bnez, fmv.s, fmv.d, fneg.s, fneg.d.

struct AssembledProgram {
  uint64_t base = 0;
  std::vector<uint8_t> bytes;
  std::map<std::string, uint64_t> labels;
  std::map<std::string, uint64_t> sizes;
};

namespace asm_detail {

using isa::Mnemonic;

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_operands(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::optional<int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  bool neg = false;
  if (s.front() == '-' || s.front() == '+') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    s.remove_prefix(2);
  }
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return neg ? static_cast<int64_t>(-v) : static_cast<int64_t>(v);
}

inline std::optional<uint8_t> parse_xreg(std::string_view s) {
  static const std::unordered_map<std::string_view, uint8_t> abi = {
      {"zero", 0}, {"ra", 1},  {"sp", 2},  {"gp", 3},   {"tp", 4},   {"t0", 5},  {"t1", 6},  {"t2", 7},
      {"s0", 8},   {"fp", 8},  {"s1", 9},  {"a0", 10},  {"a1", 11},  {"a2", 12}, {"a3", 13}, {"a4", 14},
      {"a5", 15},  {"a6", 16}, {"a7", 17}, {"s2", 18},  {"s3", 19},  {"s4", 20}, {"s5", 21}, {"s6", 22},
      {"s7", 23},  {"s8", 24}, {"s9", 25}, {"s10", 26}, {"s11", 27}, {"t3", 28}, {"t4", 29}, {"t5", 30},
      {"t6", 31}};
  s = trim(s);
  if (auto it = abi.find(s); it != abi.end()) return it->second;
  if (s.size() >= 2 && s[0] == 'x') {
    if (auto n = parse_int(s.substr(1)); n && *n >= 0 && *n < 32 && std::isdigit(static_cast<unsigned char>(s[1])))
      return static_cast<uint8_t>(*n);
  }
  return std::nullopt;
}

inline std::optional<uint8_t> parse_freg(std::string_view s) {
  s = trim(s);
  static const std::unordered_map<std::string_view, uint8_t> abi = [] {
    std::unordered_map<std::string_view, uint8_t> m;
    static const char* names[32] = {"ft0", "ft1", "ft2",  "ft3",  "ft4", "ft5", "ft6",  "ft7",
                                     "fs0", "fs1", "fa0",  "fa1",  "fa2", "fa3", "fa4",  "fa5",
                                     "fa6", "fa7", "fs2",  "fs3",  "fs4", "fs5", "fs6",  "fs7",
                                     "fs8", "fs9", "fs10", "fs11", "ft8", "ft9", "ft10", "ft11"};
    for (uint8_t i = 0; i < 32; ++i) m.emplace(names[i], i);
    return m;
  }();
  if (auto it = abi.find(s); it != abi.end()) return it->second;
  if (s.size() >= 2 && s[0] == 'f' && std::isdigit(static_cast<unsigned char>(s[1]))) {
    if (auto n = parse_int(s.substr(1)); n && *n >= 0 && *n < 32) return static_cast<uint8_t>(*n);
  }
  return std::nullopt;
}

inline std::optional<uint8_t> parse_rm(std::string_view s) {
  s = trim(s);
  if (s == "rne") return isa::RNE;
  if (s == "rtz") return isa::RTZ;
  if (s == "rdn") return isa::RDN;
  if (s == "rup") return isa::RUP;
  if (s == "rmm") return isa::RMM;
  if (s == "dyn") return isa::DYN;
  return std::nullopt;
}

/// li materialization: lui/addiw for 32-bit values, otherwise recursive
/// shift-and-add.
inline void li_sequence(int64_t v, std::vector<std::pair<Mnemonic, int64_t>>& seq) {
  if (v >= INT32_MIN && v <= INT32_MAX) {
    const int64_t lo12 = isa::detail::sext(static_cast<uint64_t>(v), 12);
    const int64_t hi20 = ((v - lo12) >> 12) & 0xfffff;
    if (hi20 != 0) seq.emplace_back(Mnemonic::LUI, isa::detail::sext(static_cast<uint64_t>(hi20) << 12, 32));
    if (lo12 != 0 || hi20 == 0) seq.emplace_back(hi20 != 0 ? Mnemonic::ADDIW : Mnemonic::ADDI, lo12);
    return;
  }
  const int64_t lo12 = isa::detail::sext(static_cast<uint64_t>(v), 12);
  int64_t hi = static_cast<int64_t>(static_cast<uint64_t>(v) - static_cast<uint64_t>(lo12)) >> 12;
  int shift = 12 + std::countr_zero(static_cast<uint64_t>(hi));
  hi >>= (shift - 12);
  li_sequence(hi, seq);
  seq.emplace_back(Mnemonic::SLLI, shift);
  if (lo12 != 0) seq.emplace_back(Mnemonic::ADDI, lo12);
}

struct Statement {
  int line = 0;
  std::string op;
  std::vector<std::string> args;
  uint64_t addr = 0;
  uint64_t size = 0;
};

class Assembler {
 public:
  Assembler(std::string_view source, uint64_t base) : base_(base) { parse(source); }

  AssembledProgram run() {
    layout();
    AssembledProgram out;
    out.base = base_;
    out.labels = labels_;
    out.sizes = sizes_;
    for (const Statement& st : statements_) emit(st, out.bytes);
    return out;
  }

 private:
  [[noreturn]] void fail(ErrorCode code, int line, const std::string& msg) const {
    throw Error(code, "line " + std::to_string(line) + ": " + msg);
  }

  void parse(std::string_view source) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
      std::size_t nl = source.find('\n', pos);
      if (nl == std::string_view::npos) nl = source.size();
      std::string_view line = source.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      for (std::string_view marker : {"#", "//", ";"}) {
        if (auto c = line.find(marker); c != std::string_view::npos) line = line.substr(0, c);
      }
      line = trim(line);
      while (true) {
        auto colon = line.find(':');
        if (colon == std::string_view::npos) break;
        std::string_view label = trim(line.substr(0, colon));
        if (label.empty() || label.find_first_of(" \t,(") != std::string_view::npos) break;
        statements_.push_back({line_no, ":" + std::string(label), {}, 0, 0});
        line = trim(line.substr(colon + 1));
      }
      if (line.empty()) continue;
      std::size_t sp = line.find_first_of(" \t");
      Statement st;
      st.line = line_no;
      st.op = std::string(line.substr(0, sp));
      for (char& c : st.op) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (sp != std::string_view::npos) {
        for (std::string_view a : split_operands(line.substr(sp))) st.args.emplace_back(a);
      }
      statements_.push_back(std::move(st));
      if (pos > source.size()) break;
    }
  }

  uint64_t statement_size(const Statement& st, uint64_t addr) {
    if (st.op.front() == ':') return 0;
    if (st.op == ".word") return 4 * st.args.size();
    if (st.op == ".dword") return 8 * st.args.size();
    if (st.op == ".size") return 0;
    if (st.op == ".zero") {
      auto n = st.args.size() == 1 ? parse_int(st.args[0]) : std::nullopt;
      if (!n || *n < 0) fail(ErrorCode::SyntaxError, st.line, ".zero expects a byte count");
      return static_cast<uint64_t>(*n);
    }
    if (st.op == ".align") {
      auto n = st.args.size() == 1 ? parse_int(st.args[0]) : std::nullopt;
      if (!n || *n < 0 || *n > 12) fail(ErrorCode::SyntaxError, st.line, ".align expects an exponent 0..12");
      const uint64_t a = uint64_t{1} << *n;
      return (a - addr % a) % a;
    }
    if (st.op == "li") {
      if (st.args.size() != 2) fail(ErrorCode::SyntaxError, st.line, "li expects rd, imm");
      auto v = parse_int(st.args[1]);
      if (!v) fail(ErrorCode::SyntaxError, st.line, "li expects a numeric immediate");
      std::vector<std::pair<Mnemonic, int64_t>> seq;
      li_sequence(*v, seq);
      return 4 * seq.size();
    }
    if (st.op == "la") return 8;
    if (st.op.front() == '.') fail(ErrorCode::SyntaxError, st.line, "unknown directive " + st.op);
    return 4;
  }

  void layout() {
    uint64_t addr = base_;
    for (Statement& st : statements_) {
      st.addr = addr;
      st.size = statement_size(st, addr);
      if (st.op.front() == ':') {
        const std::string name = st.op.substr(1);
        if (!labels_.emplace(name, addr).second) fail(ErrorCode::SyntaxError, st.line, "duplicate label " + name);
      }
      addr += st.size;
    }
    for (const Statement& st : statements_) {
      if (st.op != ".size") continue;
      if (st.args.size() != 2) fail(ErrorCode::SyntaxError, st.line, ".size expects name, bytes");
      auto n = parse_int(st.args[1]);
      if (!n || *n < 0) fail(ErrorCode::SyntaxError, st.line, ".size expects a byte count");
      sizes_[st.args[0]] = static_cast<uint64_t>(*n);
    }
  }

  int64_t value(const Statement& st, std::string_view text) const {
    if (auto v = parse_int(text)) return *v;
    if (trim(text) == ".") return static_cast<int64_t>(st.addr);
    if (auto it = labels_.find(std::string(trim(text))); it != labels_.end()) return static_cast<int64_t>(it->second);
    if (!text.empty() && (std::isalpha(static_cast<unsigned char>(text[0])) || text[0] == '_' || text[0] == '.'))
      fail(ErrorCode::UndefinedLabel, st.line, "undefined label '" + std::string(text) + "'");
    fail(ErrorCode::SyntaxError, st.line, "bad value '" + std::string(text) + "'");
  }

  /// Branch/jump operand: a label (pc-relative) or a literal byte offset.
  int64_t target(const Statement& st, std::string_view text) const {
    if (auto v = parse_int(text)) return *v;
    return value(st, text) - static_cast<int64_t>(st.addr);
  }

  uint8_t xreg(const Statement& st, std::string_view s) const {
    if (auto r = parse_xreg(s)) return *r;
    fail(ErrorCode::SyntaxError, st.line, "expected integer register, got '" + std::string(s) + "'");
  }
  uint8_t freg(const Statement& st, std::string_view s) const {
    if (auto r = parse_freg(s)) return *r;
    fail(ErrorCode::SyntaxError, st.line, "expected float register, got '" + std::string(s) + "'");
  }
  uint8_t reg(const Statement& st, isa::RegKind k, std::string_view s) const {
    return k == isa::RegKind::F ? freg(st, s) : xreg(st, s);
  }

  std::pair<int64_t, uint8_t> mem_operand(const Statement& st, std::string_view s) const {
    auto open = s.find('(');
    auto close = s.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      fail(ErrorCode::SyntaxError, st.line, "expected imm(reg), got '" + std::string(s) + "'");
    std::string_view off = trim(s.substr(0, open));
    const int64_t imm = off.empty() ? 0 : value(st, off);
    return {imm, xreg(st, s.substr(open + 1, close - open - 1))};
  }

  static uint8_t fence_bits(std::string_view s) {
    uint8_t b = 0;
    for (char c : trim(s)) {
      if (c == 'i') b |= 8;
      if (c == 'o') b |= 4;
      if (c == 'r') b |= 2;
      if (c == 'w') b |= 1;
    }
    return b;
  }

  void put32(std::vector<uint8_t>& out, uint32_t w) const {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(w >> (8 * i)));
  }

  void put(const Statement& st, std::vector<uint8_t>& out, Mnemonic m, uint8_t rd, uint8_t rs1, uint8_t rs2,
           int64_t imm, uint8_t rs3 = 0, uint8_t rm = isa::DYN) const {
    try {
      put32(out, isa::make(m, rd, rs1, rs2, imm, rs3, rm).raw);
    } catch (const Error& e) {
      fail(e.code(), st.line, e.message());
    }
  }

  void expect_args(const Statement& st, std::size_t lo, std::size_t hi) const {
    if (st.args.size() < lo || st.args.size() > hi)
      fail(ErrorCode::SyntaxError, st.line, st.op + ": wrong number of operands");
  }

  bool emit_pseudo(const Statement& st, std::vector<uint8_t>& out) const {
    const auto& a = st.args;
    const std::string& op = st.op;
    if (op == "nop") {
      expect_args(st, 0, 0);
      put(st, out, Mnemonic::ADDI, 0, 0, 0, 0);
    } else if (op == "li") {
      const uint8_t rd = xreg(st, a[0]);
      std::vector<std::pair<Mnemonic, int64_t>> seq;
      li_sequence(*parse_int(a[1]), seq);
      bool first = true;
      for (auto [m, imm] : seq) {
        put(st, out, m, rd, (m == Mnemonic::LUI || first) ? 0 : rd, 0, imm);
        first = false;
      }
    } else if (op == "la") {
      expect_args(st, 2, 2);
      const uint8_t rd = xreg(st, a[0]);
      const int64_t off = value(st, a[1]) - static_cast<int64_t>(st.addr);
      const int64_t lo = isa::detail::sext(static_cast<uint64_t>(off), 12);
      const int64_t hi = off - lo;
      if (!isa::detail::fits_signed(hi, 32)) fail(ErrorCode::ImmediateOutOfRange, st.line, "la target too far");
      put(st, out, Mnemonic::AUIPC, rd, 0, 0, hi);
      put(st, out, Mnemonic::ADDI, rd, rd, 0, lo);
    } else if (op == "mv") {
      expect_args(st, 2, 2);
      put(st, out, Mnemonic::ADDI, xreg(st, a[0]), xreg(st, a[1]), 0, 0);
    } else if (op == "not") {
      expect_args(st, 2, 2);
      put(st, out, Mnemonic::XORI, xreg(st, a[0]), xreg(st, a[1]), 0, -1);
    } else if (op == "neg") {
      expect_args(st, 2, 2);
      put(st, out, Mnemonic::SUB, xreg(st, a[0]), 0, xreg(st, a[1]), 0);
    } else if (op == "j") {
      expect_args(st, 1, 1);
      put(st, out, Mnemonic::JAL, 0, 0, 0, target(st, a[0]));
    } else if (op == "call") {
      expect_args(st, 1, 1);
      put(st, out, Mnemonic::JAL, 1, 0, 0, target(st, a[0]));
    } else if (op == "jr") {
      expect_args(st, 1, 1);
      put(st, out, Mnemonic::JALR, 0, xreg(st, a[0]), 0, 0);
    } else if (op == "ret") {
      expect_args(st, 0, 0);
      put(st, out, Mnemonic::JALR, 0, 1, 0, 0);
    } else if (op == "beqz" || op == "bnez") {
      expect_args(st, 2, 2);
      put(st, out, op == "beqz" ? Mnemonic::BEQ : Mnemonic::BNE, 0, xreg(st, a[0]), 0, target(st, a[1]));
    } else if (op == "fmv.s" || op == "fmv.d" || op == "fneg.s" || op == "fneg.d") {
      expect_args(st, 2, 2);
      const bool single = op.back() == 's';
      const bool neg = op[1] == 'n';
      const Mnemonic m = single ? (neg ? Mnemonic::FSGNJN_S : Mnemonic::FSGNJ_S)
                                : (neg ? Mnemonic::FSGNJN_D : Mnemonic::FSGNJ_D);
      const uint8_t src = freg(st, a[1]);
      put(st, out, m, freg(st, a[0]), src, src, 0);
    } else {
      return false;
    }
    return true;
  }

  void emit(const Statement& st, std::vector<uint8_t>& out) const {
    const std::size_t start = out.size();
    const auto& a = st.args;
    if (st.op.front() == ':' || st.op == ".size") return;
    if (st.op == ".word" || st.op == ".dword") {
      const int n = st.op == ".word" ? 4 : 8;
      for (const std::string& arg : a) {
        const auto v = static_cast<uint64_t>(value(st, arg));
        for (int i = 0; i < n; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
      }
    } else if (st.op == ".zero" || st.op == ".align") {
      out.insert(out.end(), st.size, 0);
    } else if (!emit_pseudo(st, out)) {
      emit_instruction(st, out);
    }
    if (out.size() - start != st.size) fail(ErrorCode::SyntaxError, st.line, "internal size mismatch");
  }

  void emit_instruction(const Statement& st, std::vector<uint8_t>& out) const {
    static const std::unordered_map<std::string_view, Mnemonic> table = [] {
      std::unordered_map<std::string_view, Mnemonic> m;
      for (const auto& op : isa::kOpcodes) m.emplace(op.name, op.mnemonic);
      return m;
    }();
    auto it = table.find(st.op);
    if (it == table.end()) fail(ErrorCode::UnknownMnemonic, st.line, "unknown mnemonic '" + st.op + "'");
    const isa::OpcodeInfo& op = isa::info(it->second);
    const auto& a = st.args;
    const Mnemonic m = op.mnemonic;

    if (op.cls == isa::InstrClass::MemRead) {
      expect_args(st, 2, 2);
      auto [imm, base] = mem_operand(st, a[1]);
      put(st, out, m, reg(st, op.rd, a[0]), base, 0, imm);
      return;
    }
    if (op.cls == isa::InstrClass::MemWrite) {
      expect_args(st, 2, 2);
      auto [imm, base] = mem_operand(st, a[1]);
      put(st, out, m, 0, base, reg(st, op.rs2, a[0]), imm);
      return;
    }
    switch (op.imm) {
      case isa::ImmFormat::Fence:
        expect_args(st, 0, 2);
        put(st, out, m, 0, 0, 0, a.size() == 2 ? (fence_bits(a[0]) << 4) | fence_bits(a[1]) : 0xff);
        return;
      case isa::ImmFormat::U: {
        expect_args(st, 2, 2);
        const int64_t v = value(st, a[1]);
        if (v < -(1 << 19) || v > 0xfffff) fail(ErrorCode::ImmediateOutOfRange, st.line, "upper immediate out of range");
        put(st, out, m, xreg(st, a[0]), 0, 0, isa::detail::sext(static_cast<uint64_t>(v & 0xfffff) << 12, 32));
        return;
      }
      case isa::ImmFormat::J:
        expect_args(st, 1, 2);
        if (a.size() == 1) put(st, out, m, 1, 0, 0, target(st, a[0]));
        else put(st, out, m, xreg(st, a[0]), 0, 0, target(st, a[1]));
        return;
      case isa::ImmFormat::B:
        expect_args(st, 3, 3);
        put(st, out, m, 0, xreg(st, a[0]), xreg(st, a[1]), target(st, a[2]));
        return;
      default: break;
    }
    if (m == Mnemonic::JALR) {
      expect_args(st, 1, 3);
      if (a.size() == 1) {
        put(st, out, m, 1, xreg(st, a[0]), 0, 0);
      } else if (a.size() == 2 && a[1].find('(') != std::string::npos) {
        auto [imm, base] = mem_operand(st, a[1]);
        put(st, out, m, xreg(st, a[0]), base, 0, imm);
      } else {
        put(st, out, m, xreg(st, a[0]), xreg(st, a[1]), 0, a.size() == 3 ? value(st, a[2]) : 0);
      }
      return;
    }

    // Register-form operands in rd, rs1, rs2, rs3 order, then imm, then rm.
    std::size_t i = 0;
    uint8_t regs[4] = {0, 0, 0, 0};
    const isa::RegKind kinds[4] = {op.rd, op.rs1, op.rs2, op.rs3};
    std::size_t needed = 0;
    for (auto k : kinds) needed += k != isa::RegKind::N;
    const std::size_t with_imm = needed + (op.imm != isa::ImmFormat::None ? 1 : 0);
    expect_args(st, with_imm, with_imm + (op.has_rm ? 1 : 0));
    for (int k = 0; k < 4; ++k) {
      if (kinds[k] != isa::RegKind::N) regs[k] = reg(st, kinds[k], a[i++]);
    }
    int64_t imm = 0;
    if (op.imm != isa::ImmFormat::None) imm = value(st, a[i++]);
    // Exact conversions default to rne, everything else to dyn.
    uint8_t rm = m == Mnemonic::FCVT_D_W || m == Mnemonic::FCVT_D_WU || m == Mnemonic::FCVT_D_S ? isa::RNE : isa::DYN;
    if (op.has_rm && i < a.size()) {
      auto r = parse_rm(a[i]);
      if (!r) fail(ErrorCode::SyntaxError, st.line, "bad rounding mode '" + a[i] + "'");
      rm = *r;
    }
    put(st, out, m, regs[0], regs[1], regs[2], imm, regs[3], rm);
  }

  uint64_t base_;
  std::vector<Statement> statements_;
  std::map<std::string, uint64_t> labels_;
  std::map<std::string, uint64_t> sizes_;
};

}  // namespace asm_detail

inline AssembledProgram assemble_program(std::string_view source, uint64_t base = 0) {
  return asm_detail::Assembler(source, base).run();
}

/// Assembles `source` into little-endian code bytes.
inline std::vector<uint8_t> assemble(std::string_view source, uint64_t base = 0) {
  return assemble_program(source, base).bytes;
}

/// Wraps assembled code in a one-segment image (readable, writable,
/// executable) with labels exported as symbols. Extra zeroed space can be
/// appended for data.
inline MemoryImage image_from_assembly(std::string_view source, uint64_t base = 0x10000,
                                       uint64_t extra_bytes = 0) {
  AssembledProgram prog = assemble_program(source, base);
  MemoryImage image;
  Segment seg;
  seg.base = base;
  seg.size = std::max<uint64_t>(prog.bytes.size() + extra_bytes, 4);
  seg.bytes = std::move(prog.bytes);
  seg.writable = true;
  seg.executable = true;
  image.segments.push_back(std::move(seg));
  image.entry = base;
  for (const auto& [name, addr] : prog.labels) {
    auto sz = prog.sizes.find(name);
    image.symbols[name] = Symbol{addr, sz == prog.sizes.end() ? 0 : sz->second};
  }
  return image;
}

}  // namespace rvmb::loader
