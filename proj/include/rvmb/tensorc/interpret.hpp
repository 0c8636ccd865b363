#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/fp.hpp"
#include "rvmb/tensorc/ir.hpp"
#include "rvmb/tensorc/shapes.hpp"

namespace rvmb::tensorc {

namespace interp_detail {

namespace fp = isa::fp;

inline std::vector<float> conv2d(const TensorOp& op, const Tensor& x, const Tensor& f, const Tensor& b) {
  const Window2D g = conv_window(op, x.type, f.type);
  const int64_t F = f.type[0];
  // Zero-padded copy; padded taps still go through the fma, as the
  // lowered code does.
  std::vector<float> p(static_cast<std::size_t>(g.hp * g.wp * g.c), 0.0f);
  for (int64_t h = 0; h < g.h; ++h) {
    for (int64_t w = 0; w < g.w; ++w) {
      for (int64_t c = 0; c < g.c; ++c) {
        p[static_cast<std::size_t>(((h + g.pad_top) * g.wp + w + g.pad_left) * g.c + c)] =
            x.data[static_cast<std::size_t>((h * g.w + w) * g.c + c)];
      }
    }
  }
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(g.oh * g.ow * F));
  for (int64_t oh = 0; oh < g.oh; ++oh) {
    for (int64_t ow = 0; ow < g.ow; ++ow) {
      for (int64_t k = 0; k < F; ++k) {
        float acc = b.data[static_cast<std::size_t>(k)];
        for (int64_t i = 0; i < g.kh; ++i) {
          for (int64_t j = 0; j < g.kw; ++j) {
            for (int64_t c = 0; c < g.c; ++c) {
              const float v = p[static_cast<std::size_t>(((oh * g.sh + i) * g.wp + ow * g.sw + j) * g.c + c)];
              const float w = f.data[static_cast<std::size_t>(((k * g.kh + i) * g.kw + j) * g.c + c)];
              acc = fp::fused(v, w, acc);
            }
          }
        }
        out.push_back(acc);
      }
    }
  }
  return out;
}

inline std::vector<float> pool(const TensorOp& op, const Tensor& x) {
  const Window2D g = pool_window(op, x.type);
  const bool is_max = op.kind == OpKind::MaxPool2D;
  const auto count = static_cast<float>(g.kh * g.kw);
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(g.oh * g.ow * g.c));
  for (int64_t oh = 0; oh < g.oh; ++oh) {
    for (int64_t ow = 0; ow < g.ow; ++ow) {
      for (int64_t c = 0; c < g.c; ++c) {
        float acc = 0.0f;
        for (int64_t i = 0; i < g.kh; ++i) {
          for (int64_t j = 0; j < g.kw; ++j) {
            const float v = x.data[static_cast<std::size_t>(((oh * g.sh + i) * g.w + ow * g.sw + j) * g.c + c)];
            if (i == 0 && j == 0) acc = v;
            else acc = is_max ? fp::max(acc, v) : fp::canon(acc + v);
          }
        }
        out.push_back(is_max ? acc : fp::canon(acc / count));
      }
    }
  }
  return out;
}

}  // namespace interp_detail

/// Reference evaluation in f32. Reductions run in ascending index order
/// with a fused multiply-add per step; max/min and NaN results follow the
/// RISC-V F rules so the lowered code can match bit for bit.
inline Tensor interpret(const TensorProgram& program, const std::vector<Tensor>& inputs) {
  namespace fp = isa::fp;
  const TensorProgram p = shapes_inferred(program) ? program : infer_shapes(program);
  const std::vector<int> input_ops = p.inputs();
  if (inputs.size() != input_ops.size()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(input_ops.size()) + " inputs, got " +
                                              std::to_string(inputs.size()));
  }
  std::vector<Tensor> vals(p.ops.size());
  std::size_t next_input = 0;
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    const TensorOp& op = p.ops[i];
    auto in = [&](std::size_t k) -> const Tensor& { return vals[static_cast<std::size_t>(op.operands[k])]; };
    Tensor& out = vals[i];
    out.type = *op.type;
    switch (op.kind) {
      case OpKind::Input: {
        const Tensor& t = inputs[next_input++];
        if (t.type != out.type || static_cast<int64_t>(t.data.size()) != out.type.elements()) {
          throw Error(ErrorCode::ShapeMismatch, "input '" + op.name + "' expects " + out.type.str());
        }
        out.data = t.data;
        break;
      }
      case OpKind::Const: out.data = op.values; break;
      case OpKind::MatMul: {
        const Tensor& a = in(0);
        const Tensor& b = in(1);
        const int64_t M = a.type[0], K = a.type[1], N = b.type[1];
        out.data.resize(static_cast<std::size_t>(M * N));
        for (int64_t m = 0; m < M; ++m) {
          for (int64_t n = 0; n < N; ++n) {
            float acc = 0.0f;
            for (int64_t k = 0; k < K; ++k) {
              acc = fp::fused(a.data[static_cast<std::size_t>(m * K + k)], b.data[static_cast<std::size_t>(k * N + n)], acc);
            }
            out.data[static_cast<std::size_t>(m * N + n)] = acc;
          }
        }
        break;
      }
      case OpKind::FullyConnected: {
        const Tensor& x = in(0);
        const Tensor& w = in(1);
        const Tensor& b = in(2);
        const int64_t M = x.type[0], K = x.type[1], N = w.type[0];
        out.data.resize(static_cast<std::size_t>(M * N));
        for (int64_t m = 0; m < M; ++m) {
          for (int64_t n = 0; n < N; ++n) {
            float acc = b.data[static_cast<std::size_t>(n)];
            for (int64_t k = 0; k < K; ++k) {
              acc = fp::fused(x.data[static_cast<std::size_t>(m * K + k)], w.data[static_cast<std::size_t>(n * K + k)], acc);
            }
            out.data[static_cast<std::size_t>(m * N + n)] = acc;
          }
        }
        break;
      }
      case OpKind::Conv2D: out.data = interp_detail::conv2d(op, in(0), in(1), in(2)); break;
      case OpKind::MaxPool2D:
      case OpKind::AvgPool2D: out.data = interp_detail::pool(op, in(0)); break;
      case OpKind::Add: {
        const Tensor& a = in(0);
        const Tensor& b = in(1);
        out.data.resize(a.data.size());
        for (std::size_t k = 0; k < a.data.size(); ++k) out.data[k] = fp::canon(a.data[k] + b.data[k]);
        break;
      }
      case OpKind::Relu: {
        const Tensor& a = in(0);
        out.data.resize(a.data.size());
        for (std::size_t k = 0; k < a.data.size(); ++k) out.data[k] = fp::max(a.data[k], 0.0f);
        break;
      }
      case OpKind::Flatten: out.data = in(0).data; break;
    }
  }
  return vals[static_cast<std::size_t>(p.output)];
}

}  // namespace rvmb::tensorc
