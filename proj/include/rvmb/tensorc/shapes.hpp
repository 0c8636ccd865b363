#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "rvmb/error.hpp"
#include "rvmb/tensorc/ir.hpp"

namespace rvmb::tensorc {

/// Spatial geometry of a Conv2D or pool. For "same" padding the input is
/// treated as a zero-padded [hp, wp] image (extra row/column at the end
/// when the total padding is odd).
struct Window2D {
  int64_t h = 0, w = 0, c = 0;    // input
  int64_t kh = 0, kw = 0;         // window
  int64_t sh = 1, sw = 1;         // stride
  int64_t pad_top = 0, pad_left = 0;
  int64_t hp = 0, wp = 0;         // padded input extent
  int64_t oh = 0, ow = 0;         // output

  bool padded() const { return hp != h || wp != w; }
};

namespace shape_detail {

[[noreturn]] inline void mismatch(const TensorOp& op, const std::string& msg) {
  throw Error(ErrorCode::ShapeMismatch, "op '" + op.name + "' (" + std::string(kind_name(op.kind)) + "): " + msg);
}

inline Window2D window(const TensorOp& op, const TensorType& in, int64_t kh, int64_t kw) {
  if (in.rank() != 4) mismatch(op, "expects a rank-4 NHWC input, got " + in.str());
  if (in[0] != 1) mismatch(op, "batch must be 1, got " + in.str());
  if (op.stride_h < 1 || op.stride_w < 1) mismatch(op, "stride must be >= 1");
  Window2D g;
  g.h = in[1];
  g.w = in[2];
  g.c = in[3];
  g.kh = kh;
  g.kw = kw;
  g.sh = op.stride_h;
  g.sw = op.stride_w;
  if (op.padding == Padding::Same) {
    g.oh = (g.h + g.sh - 1) / g.sh;
    g.ow = (g.w + g.sw - 1) / g.sw;
    const int64_t ph = std::max<int64_t>((g.oh - 1) * g.sh + kh - g.h, 0);
    const int64_t pw = std::max<int64_t>((g.ow - 1) * g.sw + kw - g.w, 0);
    g.pad_top = ph / 2;
    g.pad_left = pw / 2;
    g.hp = g.h + ph;
    g.wp = g.w + pw;
  } else {
    if (kh > g.h || kw > g.w) mismatch(op, "window larger than input " + in.str());
    g.hp = g.h;
    g.wp = g.w;
    g.oh = (g.h - kh) / g.sh + 1;
    g.ow = (g.w - kw) / g.sw + 1;
  }
  return g;
}

}  // namespace shape_detail

inline Window2D conv_window(const TensorOp& op, const TensorType& in, const TensorType& filter) {
  return shape_detail::window(op, in, filter[1], filter[2]);
}

inline Window2D pool_window(const TensorOp& op, const TensorType& in) {
  return shape_detail::window(op, in, op.window_h, op.window_w);
}

/// Annotates every op with its result type. Operand references must point
/// to earlier ops; Input and Const carry their own types.
inline TensorProgram infer_shapes(TensorProgram p) {
  using shape_detail::mismatch;
  if (p.ops.empty()) throw Error(ErrorCode::ShapeMismatch, "empty program");
  if (p.output < 0 || p.output >= static_cast<int>(p.ops.size())) {
    throw Error(ErrorCode::ShapeMismatch, "program output is not set");
  }
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    TensorOp& op = p.ops[i];
    if (op.operands.size() != arity(op.kind)) {
      mismatch(op, "expects " + std::to_string(arity(op.kind)) + " operands, got " + std::to_string(op.operands.size()));
    }
    for (int o : op.operands) {
      if (o < 0 || o >= static_cast<int>(i)) mismatch(op, "operand does not refer to an earlier op");
    }
    auto in = [&](std::size_t k) -> const TensorType& { return *p.ops[static_cast<std::size_t>(op.operands[k])].type; };

    switch (op.kind) {
      case OpKind::Input:
      case OpKind::Const:
        if (!op.type || !op.type->valid()) mismatch(op, "needs a valid explicit type (rank 1..4, extents >= 1)");
        if (op.kind == OpKind::Const && static_cast<int64_t>(op.values.size()) != op.type->elements()) {
          mismatch(op, "value count does not match type " + op.type->str());
        }
        continue;
      case OpKind::MatMul: {
        const TensorType& a = in(0);
        const TensorType& b = in(1);
        if (a.rank() != 2 || b.rank() != 2) mismatch(op, "expects rank-2 operands, got " + a.str() + " and " + b.str());
        if (a[1] != b[0]) mismatch(op, "inner dimensions differ: " + a.str() + " x " + b.str());
        op.type = TensorType{{a[0], b[1]}};
        break;
      }
      case OpKind::FullyConnected: {
        const TensorType& x = in(0);
        const TensorType& w = in(1);
        const TensorType& b = in(2);
        if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1) mismatch(op, "expects [M,K], [N,K], [N]");
        if (x[1] != w[1]) mismatch(op, "input width " + x.str() + " does not match weights " + w.str());
        if (b[0] != w[0]) mismatch(op, "bias " + b.str() + " does not match weights " + w.str());
        op.type = TensorType{{x[0], w[0]}};
        break;
      }
      case OpKind::Conv2D: {
        const TensorType& f = in(1);
        const TensorType& b = in(2);
        if (f.rank() != 4) mismatch(op, "filter must be [F,KH,KW,C], got " + f.str());
        if (b.rank() != 1 || b[0] != f[0]) mismatch(op, "bias " + b.str() + " does not match filter " + f.str());
        if (in(0).rank() == 4 && f[3] != in(0)[3]) mismatch(op, "filter channels differ from input " + in(0).str());
        const Window2D g = conv_window(op, in(0), f);
        op.type = TensorType{{1, g.oh, g.ow, f[0]}};
        break;
      }
      case OpKind::MaxPool2D:
      case OpKind::AvgPool2D: {
        if (op.window_h < 1 || op.window_w < 1) mismatch(op, "window must be >= 1");
        if (op.padding != Padding::Valid) mismatch(op, "pools support valid padding only");
        const Window2D g = pool_window(op, in(0));
        op.type = TensorType{{1, g.oh, g.ow, g.c}};
        break;
      }
      case OpKind::Add:
        if (in(0) != in(1)) mismatch(op, "operand shapes differ: " + in(0).str() + " vs " + in(1).str());
        op.type = in(0);
        break;
      case OpKind::Relu: op.type = in(0); break;
      case OpKind::Flatten: op.type = TensorType{{1, in(0).elements()}}; break;
    }
    if (!op.type->valid()) mismatch(op, "result type " + op.type->str() + " is out of range");
  }
  return p;
}

inline bool shapes_inferred(const TensorProgram& p) {
  return std::all_of(p.ops.begin(), p.ops.end(), [](const TensorOp& op) { return op.type.has_value(); });
}

}  // namespace rvmb::tensorc
