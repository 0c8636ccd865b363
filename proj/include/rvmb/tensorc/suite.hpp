#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvmb/tensorc/ir.hpp"
#include "rvmb/tensorc/shapes.hpp"

namespace rvmb::tensorc {

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t name_seed(std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : name) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Seeded values for every Input op of `p`, in program order.
inline std::vector<Tensor> random_inputs(const TensorProgram& p, uint64_t seed) {
  std::vector<Tensor> out;
  for (int i : p.inputs()) {
    const TensorOp& op = p.ops[static_cast<std::size_t>(i)];
    Tensor t;
    t.type = *op.type;
    t.data = uniform_values(mix_seed(seed, name_seed(op.name)), t.type.elements());
    out.push_back(std::move(t));
  }
  return out;
}

struct Benchmark {
  std::string name;
  TensorProgram program;
  std::function<std::vector<Tensor>(uint64_t seed)> inputs;
};

namespace suite_detail {

/// Builder whose constants draw from a per-benchmark seed stream, scaled
/// by 1/sqrt(fan_in).
struct SeededBuilder {
  ProgramBuilder b;
  uint64_t seed;
  uint64_t next = 0;

  int weights(const std::string& name, TensorType t, int64_t fan_in) {
    const float scale = 1.0f / std::sqrt(static_cast<float>(fan_in));
    return b.constant_seeded(name, std::move(t), mix_seed(seed, next++), scale);
  }
};

inline Benchmark finish(std::string name, ProgramBuilder& b, int output) {
  Benchmark bm;
  bm.name = std::move(name);
  bm.program = infer_shapes(b.build(output));
  const TensorProgram program = bm.program;
  bm.inputs = [program](uint64_t seed) { return random_inputs(program, seed); };
  return bm;
}

inline Benchmark matmul(int64_t n) {
  const std::string name = "matmul" + std::to_string(n);
  SeededBuilder s{{}, name_seed(name)};
  const int a = s.b.input("a", {{n, n}});
  const int w = s.weights("b", {{n, n}}, n);
  return finish(name, s.b, s.b.matmul(a, w, "c"));
}

inline Benchmark conv_small() {
  SeededBuilder s{{}, name_seed("conv_small")};
  const int x = s.b.input("x", {{1, 32, 32, 3}});
  const int f = s.weights("filter", {{8, 3, 3, 3}}, 27);
  const int bias = s.weights("bias", {{8}}, 27);
  const int c = s.b.conv2d(x, f, bias, 1, Padding::Same, "conv");
  return finish("conv_small", s.b, s.b.relu(c, "relu"));
}

inline Benchmark lenet5() {
  SeededBuilder s{{}, name_seed("lenet5")};
  auto& b = s.b;
  const int x = b.input("image", {{1, 28, 28, 1}});
  const int c1 = b.conv2d(x, s.weights("c1.w", {{6, 5, 5, 1}}, 25), s.weights("c1.b", {{6}}, 25), 1, Padding::Valid, "conv1");
  const int p1 = b.max_pool(b.relu(c1, "relu1"), 2, 2, "pool1");
  const int c2 = b.conv2d(p1, s.weights("c2.w", {{16, 5, 5, 6}}, 150), s.weights("c2.b", {{16}}, 150), 1,
                          Padding::Valid, "conv2");
  const int p2 = b.max_pool(b.relu(c2, "relu2"), 2, 2, "pool2");
  const int flat = b.flatten(p2, "flatten");
  const int f1 = b.relu(b.fully_connected(flat, s.weights("fc1.w", {{120, 256}}, 256), s.weights("fc1.b", {{120}}, 256), "fc1"), "relu3");
  const int f2 = b.relu(b.fully_connected(f1, s.weights("fc2.w", {{84, 120}}, 120), s.weights("fc2.b", {{84}}, 120), "fc2"), "relu4");
  const int f3 = b.fully_connected(f2, s.weights("fc3.w", {{10, 84}}, 84), s.weights("fc3.b", {{10}}, 84), "fc3");
  return finish("lenet5", b, f3);
}

inline Benchmark mlp_3layer() {
  SeededBuilder s{{}, name_seed("mlp_3layer")};
  auto& b = s.b;
  const int x = b.input("x", {{1, 784}});
  const int h1 = b.relu(b.fully_connected(x, s.weights("w1", {{256, 784}}, 784), s.weights("b1", {{256}}, 784), "fc1"), "relu1");
  const int h2 = b.relu(b.fully_connected(h1, s.weights("w2", {{128, 256}}, 256), s.weights("b2", {{128}}, 256), "fc2"), "relu2");
  const int y = b.fully_connected(h2, s.weights("w3", {{10, 128}}, 128), s.weights("b3", {{10}}, 128), "fc3");
  return finish("mlp_3layer", b, y);
}

inline Benchmark stream_add() {
  ProgramBuilder b;
  const int x = b.input("x", {{1024, 1024}});
  const int y = b.input("y", {{1024, 1024}});
  return finish("stream_add", b, b.add(x, y, "sum"));
}

}  // namespace suite_detail

/// The built-in benchmark programs, in report order.
inline std::vector<Benchmark> builtin_suite() {
  using namespace suite_detail;
  return {matmul(16), matmul(64), matmul(128), conv_small(), lenet5(), mlp_3layer(), stream_add()};
}

inline std::vector<std::string> builtin_names() {
  return {"matmul16", "matmul64", "matmul128", "conv_small", "lenet5", "mlp_3layer", "stream_add"};
}

inline std::optional<Benchmark> find_benchmark(std::string_view name) {
  using namespace suite_detail;
  if (name == "matmul16") return matmul(16);
  if (name == "matmul64") return matmul(64);
  if (name == "matmul128") return matmul(128);
  if (name == "conv_small") return conv_small();
  if (name == "lenet5") return lenet5();
  if (name == "mlp_3layer") return mlp_3layer();
  if (name == "stream_add") return stream_add();
  return std::nullopt;
}

}  // namespace rvmb::tensorc
