#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/codec.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/isa/instruction.hpp"
#include "rvmb/loader/assembler.hpp"
#include "rvmb/loader/memory_image.hpp"
#include "rvmb/tensorc/interpret.hpp"
#include "rvmb/tensorc/ir.hpp"
#include "rvmb/tensorc/shapes.hpp"

namespace rvmb::tensorc {

struct LowerOptions {
  uint64_t code_base = 0x0001'0000;
  uint64_t data_base = 0x0100'0000;
  uint64_t capacity = 256ull << 20;  // data bytes
};

struct LoweredProgram {
  std::vector<isa::Instruction> code;
  loader::MemoryImage image;  // inputs zero-filled; see bind_inputs
  std::vector<std::pair<std::string, loader::Symbol>> inputs;
  loader::Symbol output;
  TensorType output_type;
  uint64_t entry = 0;
  /// Exact dynamic instruction count (loop trip counts x body lengths).
  uint64_t expected_instructions = 0;

  /// Termination bound used for instruction limits.
  uint64_t instruction_bound() const { return 2 * expected_instructions; }
};

/// Code emitter with forward labels and a running dynamic-count estimate:
/// each instruction adds the product of the trip counts of its enclosing
/// loops.
class Emitter {
 public:
  using M = isa::Mnemonic;
  using Label = std::size_t;

  explicit Emitter(uint64_t base) : base_(base) {}

  Label label() {
    labels_.push_back(-1);
    return labels_.size() - 1;
  }
  void bind(Label l) { labels_[l] = static_cast<int64_t>(code_.size()); }

  void op(M m, uint8_t rd, uint8_t rs1, uint8_t rs2, int64_t imm = 0, uint8_t rs3 = 0, uint8_t rm = isa::DYN) {
    code_.push_back(isa::make(m, rd, rs1, rs2, imm, rs3, rm));
    dynamic_ += mult_;
  }

  void branch(M m, uint8_t rs1, uint8_t rs2, Label target) {
    fixups_.push_back({code_.size(), target});
    op(m, 0, rs1, rs2, 0);
  }

  void li(uint8_t rd, int64_t value) {
    std::vector<std::pair<M, int64_t>> seq;
    loader::asm_detail::li_sequence(value, seq);
    bool first = true;
    for (auto [m, imm] : seq) {
      op(m, rd, (m == M::LUI || first) ? 0 : rd, 0, imm);
      first = false;
    }
  }

  /// rd = rs + value, through `tmp` when the value does not fit 12 bits.
  void add_imm(uint8_t rd, uint8_t rs, int64_t value, uint8_t tmp) {
    if (isa::detail::fits_signed(value, 12)) {
      op(M::ADDI, rd, rs, 0, value);
    } else {
      li(tmp, value);
      op(M::ADD, rd, rs, tmp);
    }
  }

  void mv(uint8_t rd, uint8_t rs) { op(M::ADDI, rd, rs, 0, 0); }

  /// do { body } while (--counter); runs `trips` >= 1 times.
  template <typename Body>
  void counted_loop(uint8_t counter, int64_t trips, Body&& body) {
    li(counter, trips);
    const Label top = label();
    bind(top);
    enter(trips);
    body();
    op(M::ADDI, counter, counter, 0, -1);
    branch(M::BNE, counter, 0, top);
    leave(trips);
  }

  /// do { body; ptr += step } while (ptr != end); runs `trips` >= 1 times.
  template <typename Body>
  void pointer_loop(uint8_t ptr, uint8_t end, int64_t step, int64_t trips, Body&& body) {
    const Label top = label();
    bind(top);
    enter(trips);
    body();
    op(M::ADDI, ptr, ptr, 0, step);
    branch(M::BNE, ptr, end, top);
    leave(trips);
  }

  /// Emits without counting (code that is never reached).
  void unreached(M m, uint8_t rd, uint8_t rs1, uint8_t rs2, int64_t imm) {
    code_.push_back(isa::make(m, rd, rs1, rs2, imm));
  }

  std::vector<isa::Instruction> finish() {
    for (const Fixup& f : fixups_) {
      if (labels_[f.label] < 0) throw Error(ErrorCode::UndefinedLabel, "unbound emitter label");
      const int64_t offset = (labels_[f.label] - static_cast<int64_t>(f.index)) * 4;
      isa::Instruction& in = code_[f.index];
      in = isa::make(in.mnemonic, in.rd, in.rs1, in.rs2, offset);
    }
    return code_;
  }

  uint64_t dynamic_count() const { return dynamic_; }
  uint64_t base() const { return base_; }

 private:
  struct Fixup {
    std::size_t index;
    Label label;
  };

  void enter(int64_t trips) {
    stack_.push_back(mult_);
    mult_ *= static_cast<uint64_t>(trips);
  }
  void leave(int64_t) {
    mult_ = stack_.back();
    stack_.pop_back();
  }

  uint64_t base_;
  std::vector<isa::Instruction> code_;
  std::vector<int64_t> labels_;
  std::vector<Fixup> fixups_;
  std::vector<uint64_t> stack_;
  uint64_t mult_ = 1;
  uint64_t dynamic_ = 0;
};

namespace lower_detail {

namespace reg {
inline constexpr uint8_t zero = 0, t0 = 5, t1 = 6, t2 = 7, s0 = 8, s1 = 9, a0 = 10, a1 = 11, a2 = 12, a3 = 13,
                         a4 = 14, s2 = 18, s3 = 19, s4 = 20, s5 = 21, s6 = 22, s7 = 23, s8 = 24, t3 = 28,
                         t5 = 30, t6 = 31;
// float registers
inline constexpr uint8_t f0 = 0, f1 = 1, f2 = 2, f3 = 3, f4 = 4;
}  // namespace reg

using M = isa::Mnemonic;

inline constexpr uint64_t kAlign = 64;
inline uint64_t align_up(uint64_t v, uint64_t a) { return (v + a - 1) / a * a; }

class Lowering {
 public:
  Lowering(const TensorProgram& p, const LowerOptions& opts) : p_(p), opts_(opts), e_(opts.code_base) {}

  LoweredProgram run() {
    allocate();
    for (std::size_t i = 0; i < p_.ops.size(); ++i) emit_op(i);
    emit_exit();

    LoweredProgram out;
    out.code = e_.finish();
    out.expected_instructions = e_.dynamic_count();
    out.entry = opts_.code_base;

    loader::Segment code;
    code.base = opts_.code_base;
    for (const isa::Instruction& in : out.code) {
      for (int k = 0; k < 4; ++k) code.bytes.push_back(static_cast<uint8_t>(in.raw >> (8 * k)));
    }
    code.size = code.bytes.size();
    code.executable = true;
    if (code.base + code.size > opts_.data_base) throw Error(ErrorCode::CapacityExceeded, "code overlaps data region");

    loader::Segment data;
    data.base = opts_.data_base;
    data.size = data_end_ - opts_.data_base;
    data.writable = true;
    data.bytes.assign(data.size, 0);
    for (std::size_t i = 0; i < p_.ops.size(); ++i) {
      const TensorOp& op = p_.ops[i];
      if (op.kind != OpKind::Const) continue;
      std::memcpy(data.bytes.data() + (addr_[i] - opts_.data_base), op.values.data(), op.values.size() * 4);
    }

    out.image.segments = {std::move(code), std::move(data)};
    out.image.entry = out.entry;
    out.image.symbols["tohost"] = {opts_.data_base, 8};
    const auto oi = static_cast<std::size_t>(p_.output);
    out.output = {addr_[oi], p_.ops[oi].type->bytes()};
    out.output_type = *p_.ops[oi].type;
    out.image.symbols["output"] = out.output;
    for (int i : p_.inputs()) {
      const auto ui = static_cast<std::size_t>(i);
      loader::Symbol s{addr_[ui], p_.ops[ui].type->bytes()};
      out.inputs.emplace_back(p_.ops[ui].name, s);
      out.image.symbols["input." + p_.ops[ui].name] = s;
    }
    return out;
  }

 private:
  uint64_t take(uint64_t bytes) {
    const uint64_t a = data_end_;
    data_end_ = align_up(data_end_ + bytes, kAlign);
    if (data_end_ - opts_.data_base > opts_.capacity) {
      throw Error(ErrorCode::CapacityExceeded, "data needs more than " + std::to_string(opts_.capacity) + " bytes");
    }
    return a;
  }

  void allocate() {
    data_end_ = opts_.data_base + kAlign;  // tohost lives in the first line
    addr_.assign(p_.ops.size(), 0);
    pad_.assign(p_.ops.size(), 0);
    for (std::size_t i = 0; i < p_.ops.size(); ++i) {
      const TensorOp& op = p_.ops[i];
      if (op.kind == OpKind::Flatten) {
        addr_[i] = addr_[static_cast<std::size_t>(op.operands[0])];
        continue;
      }
      if (op.kind == OpKind::Conv2D) {
        const Window2D g = window_of(op);
        if (g.padded()) pad_[i] = take(static_cast<uint64_t>(g.hp * g.wp * g.c) * 4);
      }
      addr_[i] = take(op.type->bytes());
    }
  }

  const TensorType& type_of(int operand) const { return *p_.ops[static_cast<std::size_t>(operand)].type; }
  int64_t addr_of(int operand) const { return static_cast<int64_t>(addr_[static_cast<std::size_t>(operand)]); }

  Window2D window_of(const TensorOp& op) const {
    if (op.kind == OpKind::Conv2D) return conv_window(op, type_of(op.operands[0]), type_of(op.operands[1]));
    return pool_window(op, type_of(op.operands[0]));
  }

  void emit_op(std::size_t i) {
    const TensorOp& op = p_.ops[i];
    switch (op.kind) {
      case OpKind::Input:
      case OpKind::Const:
      case OpKind::Flatten: return;
      case OpKind::MatMul: return matmul(op, static_cast<int64_t>(addr_[i]));
      case OpKind::FullyConnected: return fully_connected(op, static_cast<int64_t>(addr_[i]));
      case OpKind::Conv2D: return conv2d(op, static_cast<int64_t>(addr_[i]), static_cast<int64_t>(pad_[i]));
      case OpKind::MaxPool2D:
      case OpKind::AvgPool2D: return pool(op, static_cast<int64_t>(addr_[i]));
      case OpKind::Add: return add(op, static_cast<int64_t>(addr_[i]));
      case OpKind::Relu: return relu(op, static_cast<int64_t>(addr_[i]));
    }
    throw Error(ErrorCode::UnsupportedOp, "cannot lower op '" + op.name + "'");
  }

  // C[M,N] = A[M,K] x B[K,N]
  void matmul(const TensorOp& op, int64_t out) {
    using namespace reg;
    const TensorType& at = type_of(op.operands[0]);
    const TensorType& bt = type_of(op.operands[1]);
    const int64_t M_ = at[0], K = at[1], N = bt[1];
    e_.li(a1, N * 4);
    e_.li(s0, addr_of(op.operands[0]));
    e_.li(s1, out);
    e_.counted_loop(s5, M_, [&] {
      e_.li(s3, addr_of(op.operands[1]));
      e_.counted_loop(s6, N, [&] {
        e_.op(M::FMV_W_X, f0, zero, 0);
        e_.mv(t0, s0);
        e_.mv(t1, s3);
        e_.add_imm(t2, s0, K * 4, t6);
        e_.pointer_loop(t0, t2, 4, K, [&] {
          e_.op(M::FLW, f1, t0, 0, 0);
          e_.op(M::FLW, f2, t1, 0, 0);
          e_.op(M::FMADD_S, f0, f1, f2, 0, f0);
          e_.op(M::ADD, t1, t1, a1);
        });
        e_.op(M::FSW, 0, s1, f0, 0);
        e_.op(M::ADDI, s1, s1, 0, 4);
        e_.op(M::ADDI, s3, s3, 0, 4);
      });
      e_.add_imm(s0, s0, K * 4, t6);
    });
  }

  // Y[M,N] = X[M,K] x W[N,K]^T + b[N]
  void fully_connected(const TensorOp& op, int64_t out) {
    using namespace reg;
    const TensorType& xt = type_of(op.operands[0]);
    const TensorType& wt = type_of(op.operands[1]);
    const int64_t M_ = xt[0], K = xt[1], N = wt[0];
    e_.li(s0, out);
    e_.li(s1, addr_of(op.operands[0]));
    e_.counted_loop(s5, M_, [&] {
      e_.li(s3, addr_of(op.operands[1]));
      e_.li(s4, addr_of(op.operands[2]));
      e_.counted_loop(s6, N, [&] {
        e_.op(M::FLW, f0, s4, 0, 0);
        e_.mv(t0, s1);
        e_.add_imm(t2, s1, K * 4, t6);
        e_.pointer_loop(t0, t2, 4, K, [&] {
          e_.op(M::FLW, f1, t0, 0, 0);
          e_.op(M::FLW, f2, s3, 0, 0);
          e_.op(M::FMADD_S, f0, f1, f2, 0, f0);
          e_.op(M::ADDI, s3, s3, 0, 4);
        });
        e_.op(M::FSW, 0, s0, f0, 0);
        e_.op(M::ADDI, s0, s0, 0, 4);
        e_.op(M::ADDI, s4, s4, 0, 4);
      });
      e_.add_imm(s1, s1, K * 4, t6);
    });
  }

  // Rows of the input copied into the interior of a zeroed padded buffer.
  void pad_copy(const Window2D& g, int64_t src, int64_t dst) {
    using namespace reg;
    const int64_t row = g.w * g.c * 4;
    e_.li(s0, src);
    e_.li(s1, dst + (g.pad_top * g.wp + g.pad_left) * g.c * 4);
    e_.counted_loop(s5, g.h, [&] {
      e_.mv(t0, s0);
      e_.mv(t1, s1);
      e_.add_imm(t2, s0, row, t6);
      e_.pointer_loop(t0, t2, 4, g.w * g.c, [&] {
        e_.op(M::LW, t3, t0, 0, 0);
        e_.op(M::SW, 0, t1, t3, 0);
        e_.op(M::ADDI, t1, t1, 0, 4);
      });
      e_.add_imm(s0, s0, row, t6);
      e_.add_imm(s1, s1, g.wp * g.c * 4, t6);
    });
  }

  void conv2d(const TensorOp& op, int64_t out, int64_t padded) {
    using namespace reg;
    const Window2D g = window_of(op);
    const int64_t F = type_of(op.operands[1])[0];
    int64_t src = addr_of(op.operands[0]);
    if (g.padded()) {
      pad_copy(g, src, padded);
      src = padded;
    }
    const int64_t tap_row = g.kw * g.c * 4;
    e_.li(a1, tap_row);
    e_.li(a2, g.wp * g.c * 4);
    e_.li(a3, g.sw * g.c * 4);
    e_.li(a4, g.sh * g.wp * g.c * 4);
    e_.li(s0, out);
    e_.li(s1, src);
    e_.counted_loop(s5, g.oh, [&] {
      e_.mv(s2, s1);
      e_.counted_loop(s6, g.ow, [&] {
        e_.li(s3, addr_of(op.operands[1]));
        e_.li(s4, addr_of(op.operands[2]));
        e_.counted_loop(s7, F, [&] {
          e_.op(M::FLW, f0, s4, 0, 0);
          e_.mv(a0, s2);
          e_.counted_loop(s8, g.kh, [&] {
            e_.mv(t0, a0);
            e_.op(M::ADD, t2, a0, a1);
            e_.pointer_loop(t0, t2, 4, g.kw * g.c, [&] {
              e_.op(M::FLW, f1, t0, 0, 0);
              e_.op(M::FLW, f2, s3, 0, 0);
              e_.op(M::FMADD_S, f0, f1, f2, 0, f0);
              e_.op(M::ADDI, s3, s3, 0, 4);
            });
            e_.op(M::ADD, a0, a0, a2);
          });
          e_.op(M::FSW, 0, s0, f0, 0);
          e_.op(M::ADDI, s0, s0, 0, 4);
          e_.op(M::ADDI, s4, s4, 0, 4);
        });
        e_.op(M::ADD, s2, s2, a3);
      });
      e_.op(M::ADD, s1, s1, a4);
    });
  }

  void pool(const TensorOp& op, int64_t out) {
    using namespace reg;
    const Window2D g = window_of(op);
    const bool is_max = op.kind == OpKind::MaxPool2D;
    if (!is_max) {
      e_.li(t5, g.kh * g.kw);
      e_.op(M::FCVT_S_W, f4, t5, 0);
    }
    e_.li(s0, out);
    e_.li(s1, addr_of(op.operands[0]));
    e_.counted_loop(s5, g.oh, [&] {
      e_.mv(s2, s1);
      e_.counted_loop(s6, g.ow, [&] {
        e_.mv(t0, s2);
        e_.add_imm(t2, s2, g.c * 4, t6);
        e_.pointer_loop(t0, t2, 4, g.c, [&] {
          e_.op(M::FLW, f0, t0, 0, 0);
          for (int64_t i = 0; i < g.kh; ++i) {
            for (int64_t j = 0; j < g.kw; ++j) {
              if (i == 0 && j == 0) continue;
              const int64_t off = (i * g.w + j) * g.c * 4;
              if (isa::detail::fits_signed(off, 12)) {
                e_.op(M::FLW, f1, t0, 0, off);
              } else {
                e_.li(t5, off);
                e_.op(M::ADD, t5, t0, t5);
                e_.op(M::FLW, f1, t5, 0, 0);
              }
              e_.op(is_max ? M::FMAX_S : M::FADD_S, f0, f0, f1);
            }
          }
          if (!is_max) e_.op(M::FDIV_S, f0, f0, f4);
          e_.op(M::FSW, 0, s0, f0, 0);
          e_.op(M::ADDI, s0, s0, 0, 4);
        });
        e_.add_imm(s2, s2, g.sw * g.c * 4, t6);
      });
      e_.add_imm(s1, s1, g.sh * g.w * g.c * 4, t6);
    });
  }

  void add(const TensorOp& op, int64_t out) {
    using namespace reg;
    const int64_t n = op.type->elements();
    e_.li(t0, addr_of(op.operands[0]));
    e_.li(t1, addr_of(op.operands[1]));
    e_.li(t3, out);
    e_.li(t2, addr_of(op.operands[0]) + n * 4);
    e_.pointer_loop(t0, t2, 4, n, [&] {
      e_.op(M::FLW, f1, t0, 0, 0);
      e_.op(M::FLW, f2, t1, 0, 0);
      e_.op(M::FADD_S, f0, f1, f2);
      e_.op(M::FSW, 0, t3, f0, 0);
      e_.op(M::ADDI, t1, t1, 0, 4);
      e_.op(M::ADDI, t3, t3, 0, 4);
    });
  }

  void relu(const TensorOp& op, int64_t out) {
    using namespace reg;
    const int64_t n = op.type->elements();
    e_.op(M::FMV_W_X, f3, zero, 0);
    e_.li(t0, addr_of(op.operands[0]));
    e_.li(t3, out);
    e_.li(t2, addr_of(op.operands[0]) + n * 4);
    e_.pointer_loop(t0, t2, 4, n, [&] {
      e_.op(M::FLW, f1, t0, 0, 0);
      e_.op(M::FMAX_S, f0, f1, f3);
      e_.op(M::FSW, 0, t3, f0, 0);
      e_.op(M::ADDI, t3, t3, 0, 4);
    });
  }

  void emit_exit() {
    using namespace reg;
    e_.li(t0, 1);
    e_.li(t1, static_cast<int64_t>(opts_.data_base));
    e_.op(M::SD, 0, t1, t0, 0);
    e_.unreached(M::JAL, 0, 0, 0, 0);
  }

  const TensorProgram& p_;
  LowerOptions opts_;
  Emitter e_;
  std::vector<uint64_t> addr_;
  std::vector<uint64_t> pad_;
  uint64_t data_end_ = 0;
};

}  // namespace lower_detail

/// Lowers a program to naive RV64 loop nests over a flat data segment.
/// Every reduction is one fmadd.s per term in ascending index order, which
/// matches interpret() bit for bit.
inline LoweredProgram lower(const TensorProgram& program, const LowerOptions& opts = {}) {
  const TensorProgram p = shapes_inferred(program) ? program : infer_shapes(program);
  return lower_detail::Lowering(p, opts).run();
}

/// Copy of the lowered image with input tensors written into their buffers.
inline loader::MemoryImage bind_inputs(const LoweredProgram& lp, const std::vector<Tensor>& inputs) {
  if (inputs.size() != lp.inputs.size()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(lp.inputs.size()) + " inputs, got " +
                                              std::to_string(inputs.size()));
  }
  loader::MemoryImage image = lp.image;
  loader::Segment& data = image.segments.at(1);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const loader::Symbol& s = lp.inputs[i].second;
    if (inputs[i].data.size() * 4 != s.size) {
      throw Error(ErrorCode::ShapeMismatch, "input '" + lp.inputs[i].first + "' has the wrong element count");
    }
    std::memcpy(data.bytes.data() + (s.addr - data.base), inputs[i].data.data(), s.size);
  }
  return image;
}

/// Decodes an output region (little-endian f32) into a tensor.
inline Tensor output_tensor(const LoweredProgram& lp, const std::vector<uint8_t>& bytes) {
  Tensor t;
  t.type = lp.output_type;
  t.data.resize(bytes.size() / 4);
  std::memcpy(t.data.data(), bytes.data(), t.data.size() * 4);
  return t;
}

}  // namespace rvmb::tensorc
