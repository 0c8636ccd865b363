#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rvmb/error.hpp"

namespace rvmb::tensorc {

/// f32 tensor type; 4-D tensors are NHWC.
struct TensorType {
  std::vector<int64_t> dims;

  std::size_t rank() const { return dims.size(); }
  int64_t elements() const {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    return n;
  }
  uint64_t bytes() const { return static_cast<uint64_t>(elements()) * 4; }
  int64_t operator[](std::size_t i) const { return dims[i]; }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "x" : "") + std::to_string(dims[i]);
    return s;
  }

  bool valid() const {
    if (dims.empty() || dims.size() > 4) return false;
    int64_t n = 1;
    for (int64_t d : dims) {
      if (d < 1) return false;
      n *= d;
      if (n >= (int64_t{1} << 31)) return false;
    }
    return true;
  }

  bool operator==(const TensorType&) const = default;
};

struct Tensor {
  TensorType type;
  std::vector<float> data;
};

enum class OpKind { Input, Const, MatMul, Conv2D, FullyConnected, Add, Relu, MaxPool2D, AvgPool2D, Flatten };
enum class Padding { Valid, Same };

inline std::string_view kind_name(OpKind k) {
  switch (k) {
    case OpKind::Input: return "input";
    case OpKind::Const: return "const";
    case OpKind::MatMul: return "matmul";
    case OpKind::Conv2D: return "conv2d";
    case OpKind::FullyConnected: return "fc";
    case OpKind::Add: return "add";
    case OpKind::Relu: return "relu";
    case OpKind::MaxPool2D: return "maxpool2d";
    case OpKind::AvgPool2D: return "avgpool2d";
    case OpKind::Flatten: return "flatten";
  }
  return "?";
}

inline std::size_t arity(OpKind k) {
  switch (k) {
    case OpKind::Input:
    case OpKind::Const: return 0;
    case OpKind::Relu:
    case OpKind::MaxPool2D:
    case OpKind::AvgPool2D:
    case OpKind::Flatten: return 1;
    case OpKind::MatMul:
    case OpKind::Add: return 2;
    case OpKind::Conv2D:
    case OpKind::FullyConnected: return 3;
  }
  return 0;
}

/// One node. Operands refer to earlier ops by index.
///   Conv2D: input [1,H,W,C], filter [F,KH,KW,C], bias [F]
///   FullyConnected: input [M,K], weights [N,K], bias [N] -> [M,N]
///   Pools: input [1,H,W,C], window and stride over H and W, valid only
struct TensorOp {
  std::string name;
  OpKind kind = OpKind::Input;
  std::vector<int> operands;
  int64_t stride_h = 1;
  int64_t stride_w = 1;
  Padding padding = Padding::Valid;
  int64_t window_h = 0;
  int64_t window_w = 0;
  std::optional<TensorType> type;  // given for Input/Const, filled in by infer_shapes
  std::vector<float> values;       // Const contents
};

struct TensorProgram {
  std::vector<TensorOp> ops;
  int output = -1;

  int find(std::string_view name) const {
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  std::vector<int> inputs() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].kind == OpKind::Input) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  const TensorType& output_type() const { return *ops.at(static_cast<std::size_t>(output)).type; }
};

/// Uniform floats in [-1, 1) with 24-bit resolution, so every value is
/// exact in f32 and identical across hosts.
inline std::vector<float> uniform_values(uint64_t seed, int64_t count, float scale = 1.0f) {
  std::mt19937_64 rng(seed);
  std::vector<float> v(static_cast<std::size_t>(count));
  for (float& x : v) {
    const auto bits = static_cast<int64_t>(rng() >> 40);  // 24 bits
    x = static_cast<float>(bits - (int64_t{1} << 23)) * (1.0f / 8388608.0f) * scale;
  }
  return v;
}

class ProgramBuilder {
 public:
  int input(const std::string& name, TensorType type) {
    TensorOp op = make(name, OpKind::Input, {});
    op.type = std::move(type);
    return push(std::move(op));
  }

  int constant(const std::string& name, TensorType type, std::vector<float> values) {
    if (static_cast<int64_t>(values.size()) != type.elements()) {
      throw Error(ErrorCode::ShapeMismatch, "const '" + name + "' has " + std::to_string(values.size()) +
                                                " values for type " + type.str());
    }
    TensorOp op = make(name, OpKind::Const, {});
    op.type = std::move(type);
    op.values = std::move(values);
    return push(std::move(op));
  }

  int constant_seeded(const std::string& name, TensorType type, uint64_t seed, float scale = 1.0f) {
    auto values = uniform_values(seed, type.elements(), scale);
    return constant(name, std::move(type), std::move(values));
  }

  int matmul(int a, int b, const std::string& name = {}) { return push(make(name, OpKind::MatMul, {a, b})); }
  int add(int a, int b, const std::string& name = {}) { return push(make(name, OpKind::Add, {a, b})); }
  int relu(int x, const std::string& name = {}) { return push(make(name, OpKind::Relu, {x})); }
  int flatten(int x, const std::string& name = {}) { return push(make(name, OpKind::Flatten, {x})); }

  int fully_connected(int x, int w, int b, const std::string& name = {}) {
    return push(make(name, OpKind::FullyConnected, {x, w, b}));
  }

  int conv2d(int x, int filter, int bias, int64_t stride = 1, Padding padding = Padding::Valid,
             const std::string& name = {}) {
    TensorOp op = make(name, OpKind::Conv2D, {x, filter, bias});
    op.stride_h = op.stride_w = stride;
    op.padding = padding;
    return push(std::move(op));
  }

  int max_pool(int x, int64_t window, int64_t stride, const std::string& name = {}) {
    return pool(OpKind::MaxPool2D, x, window, stride, name);
  }
  int avg_pool(int x, int64_t window, int64_t stride, const std::string& name = {}) {
    return pool(OpKind::AvgPool2D, x, window, stride, name);
  }

  TensorProgram build(int output) {
    program_.output = output;
    return program_;
  }

  int size() const { return static_cast<int>(program_.ops.size()); }

 private:
  int pool(OpKind k, int x, int64_t window, int64_t stride, const std::string& name) {
    TensorOp op = make(name, k, {x});
    op.window_h = op.window_w = window;
    op.stride_h = op.stride_w = stride;
    return push(std::move(op));
  }

  TensorOp make(const std::string& name, OpKind kind, std::vector<int> operands) {
    TensorOp op;
    op.name = name.empty() ? std::string(kind_name(kind)) + std::to_string(program_.ops.size()) : name;
    op.kind = kind;
    op.operands = std::move(operands);
    return op;
  }

  int push(TensorOp op) {
    program_.ops.push_back(std::move(op));
    return static_cast<int>(program_.ops.size()) - 1;
  }

  TensorProgram program_;
};

}  // namespace rvmb::tensorc
