#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "rvmb/isa/codec.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/tensorc/interpret.hpp"
#include "rvmb/tensorc/lower.hpp"
#include "rvmb/tensorc/suite.hpp"
#include "rvmb/tensorc/text.hpp"

using namespace rvmb;
using namespace rvmb::tensorc;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::EmptyInput;
}

std::vector<uint8_t> bytes_of(const std::vector<float>& v) {
  std::vector<uint8_t> out(v.size() * 4);
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

struct Executed {
  isa::FunctionalResult result;
  LoweredProgram lowered;
};

Executed run_lowered(const TensorProgram& p, const std::vector<Tensor>& inputs, bool trace = false) {
  LoweredProgram lp = lower(p);
  isa::RunOptions opts;
  opts.record_trace = trace;
  auto r = isa::run_functional(bind_inputs(lp, inputs), lp.instruction_bound(), opts);
  return {std::move(r), std::move(lp)};
}

// Conv2D straight from the definition: out-of-range taps read zero,
// padding split with the odd row/column at the end.
std::vector<float> naive_conv(const Tensor& x, const Tensor& f, const Tensor& b, int64_t s, bool same) {
  const int64_t H = x.type[1], W = x.type[2], C = x.type[3];
  const int64_t F = f.type[0], KH = f.type[1], KW = f.type[2];
  int64_t OH, OW, top = 0, left = 0;
  if (same) {
    OH = (H + s - 1) / s;
    OW = (W + s - 1) / s;
    top = std::max<int64_t>((OH - 1) * s + KH - H, 0) / 2;
    left = std::max<int64_t>((OW - 1) * s + KW - W, 0) / 2;
  } else {
    OH = (H - KH) / s + 1;
    OW = (W - KW) / s + 1;
  }
  std::vector<float> out;
  for (int64_t oy = 0; oy < OH; ++oy) {
    for (int64_t ox = 0; ox < OW; ++ox) {
      for (int64_t k = 0; k < F; ++k) {
        float acc = b.data[k];
        for (int64_t i = 0; i < KH; ++i) {
          for (int64_t j = 0; j < KW; ++j) {
            for (int64_t c = 0; c < C; ++c) {
              const int64_t y = oy * s + i - top, xx = ox * s + j - left;
              const float v = (y < 0 || y >= H || xx < 0 || xx >= W) ? 0.0f : x.data[(y * W + xx) * C + c];
              acc = std::fmaf(v, f.data[((k * KH + i) * KW + j) * C + c], acc);
            }
          }
        }
        out.push_back(acc);
      }
    }
  }
  return out;
}

Tensor random_tensor(TensorType t, uint64_t seed) {
  Tensor out{t, uniform_values(seed, t.elements())};
  return out;
}

// Small random graphs covering every op kind.
TensorProgram random_program(std::mt19937_64& rng) {
  ProgramBuilder b;
  auto pick = [&](int64_t lo, int64_t hi) { return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1)); };
  const int64_t h = pick(5, 9), w = pick(5, 9), c = pick(1, 3), f = pick(1, 4), k = pick(1, 3);
  const int x = b.input("x", {{1, h, w, c}});
  const int filt = b.constant_seeded("f", {{f, k, k, c}}, rng(), 0.5f);
  const int bias = b.constant_seeded("b", {{f}}, rng());
  int t = b.conv2d(x, filt, bias, pick(1, 2), rng() % 2 ? Padding::Same : Padding::Valid);
  if (rng() % 2) t = b.relu(t);
  const TensorType ct = *infer_shapes(b.build(t)).ops[static_cast<std::size_t>(t)].type;
  if (ct[1] >= 2 && ct[2] >= 2) t = rng() % 2 ? b.max_pool(t, 2, pick(1, 2)) : b.avg_pool(t, 2, pick(1, 2));
  const int flat = b.flatten(t);
  const int64_t n = infer_shapes(b.build(flat)).output_type()[1];
  const int64_t m = pick(2, 6);
  int y = b.fully_connected(flat, b.constant_seeded("w", {{m, n}}, rng(), 0.3f), b.constant_seeded("c", {{m}}, rng()));
  const int other = b.input("y", {{1, m}});
  y = b.add(y, other);
  const int rhs = b.constant_seeded("r", {{m, pick(1, 5)}}, rng());
  return infer_shapes(b.build(b.matmul(y, rhs)));
}

}  // namespace

TEST(Shapes, MatMul) {
  ProgramBuilder b;
  const int a = b.input("a", {{2, 3}});
  const int c = b.input("c", {{3, 4}});
  const TensorProgram p = infer_shapes(b.build(b.matmul(a, c)));
  EXPECT_EQ(p.output_type(), (TensorType{{2, 4}}));
}

TEST(Shapes, LenetFirstConv) {
  ProgramBuilder b;
  const int x = b.input("x", {{1, 28, 28, 1}});
  const int f = b.constant_seeded("f", {{6, 5, 5, 1}}, 1);
  const int bias = b.constant_seeded("b", {{6}}, 2);
  const TensorProgram p = infer_shapes(b.build(b.conv2d(x, f, bias)));
  EXPECT_EQ(p.output_type(), (TensorType{{1, 24, 24, 6}}));
}

TEST(Shapes, ValidAndSameArithmetic) {
  // (in - k) / s + 1 and ceil(in / s), checked over a grid
  for (int64_t in = 3; in <= 12; ++in) {
    for (int64_t k = 1; k <= 3; ++k) {
      for (int64_t s = 1; s <= 3; ++s) {
        for (bool same : {false, true}) {
          ProgramBuilder b;
          const int x = b.input("x", {{1, in, in + 1, 2}});
          const int f = b.constant_seeded("f", {{3, k, k, 2}}, 1);
          const int bias = b.constant_seeded("b", {{3}}, 2);
          const TensorType t =
              infer_shapes(b.build(b.conv2d(x, f, bias, s, same ? Padding::Same : Padding::Valid))).output_type();
          const int64_t oh = same ? (in + s - 1) / s : (in - k) / s + 1;
          const int64_t ow = same ? (in + s) / s : (in + 1 - k) / s + 1;
          EXPECT_EQ(t, (TensorType{{1, oh, ow, 3}})) << in << " " << k << " " << s << " " << same;
        }
      }
    }
  }
}

TEST(Shapes, PoolFlattenAndFc) {
  ProgramBuilder b;
  const int x = b.input("x", {{1, 9, 7, 3}});
  const int p = b.max_pool(x, 2, 2);
  const int fl = b.flatten(p);
  const int fc = b.fully_connected(fl, b.constant_seeded("w", {{5, 36}}, 1), b.constant_seeded("b", {{5}}, 2));
  const TensorProgram prog = infer_shapes(b.build(fc));
  EXPECT_EQ(*prog.ops[static_cast<std::size_t>(p)].type, (TensorType{{1, 4, 3, 3}}));
  EXPECT_EQ(*prog.ops[static_cast<std::size_t>(fl)].type, (TensorType{{1, 36}}));
  EXPECT_EQ(prog.output_type(), (TensorType{{1, 5}}));
}

TEST(Shapes, MismatchesNameTheOp) {
  {
    ProgramBuilder b;
    const int a = b.input("a", {{2, 3}});
    const int c = b.input("c", {{4, 5}});
    const TensorProgram p = b.build(b.matmul(a, c, "bad_mm"));
    try {
      infer_shapes(p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
      EXPECT_NE(std::string(e.what()).find("bad_mm"), std::string::npos);
    }
  }
  // window larger than input
  EXPECT_EQ(code_of([] {
              ProgramBuilder b;
              const int x = b.input("x", {{1, 3, 3, 1}});
              infer_shapes(b.build(b.max_pool(x, 4, 1)));
            }),
            ErrorCode::ShapeMismatch);
  // rank violation
  EXPECT_EQ(code_of([] {
              ProgramBuilder b;
              const int x = b.input("x", {{2, 3, 4}});
              infer_shapes(b.build(b.relu(b.matmul(x, x))));
            }),
            ErrorCode::ShapeMismatch);
  // add of different shapes, filter channel mismatch, bad input type
  EXPECT_EQ(code_of([] {
              ProgramBuilder b;
              infer_shapes(b.build(b.add(b.input("x", {{4}}), b.input("y", {{5}}))));
            }),
            ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([] {
              ProgramBuilder b;
              const int x = b.input("x", {{1, 8, 8, 2}});
              infer_shapes(b.build(b.conv2d(x, b.constant_seeded("f", {{1, 3, 3, 3}}, 1), b.constant_seeded("b", {{1}}, 1))));
            }),
            ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([] {
              ProgramBuilder b;
              infer_shapes(b.build(b.input("x", {{1, 0}})));
            }),
            ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([] {
              ProgramBuilder b;
              b.constant("k", {{3}}, {1.0f, 2.0f});
            }),
            ErrorCode::ShapeMismatch);
}

TEST(Shapes, TypeInvariants) {
  EXPECT_TRUE((TensorType{{1, 2, 3, 4}}).valid());
  EXPECT_FALSE((TensorType{{1, 2, 3, 4, 5}}).valid());
  EXPECT_FALSE(TensorType{}.valid());
  EXPECT_FALSE((TensorType{{65536, 32768}}).valid());  // 2^31 elements
  EXPECT_TRUE((TensorType{{65536, 32767}}).valid());
}

TEST(Interpret, ReluExample) {
  ProgramBuilder b;
  const int x = b.input("x", {{3}});
  const Tensor out = interpret(b.build(b.relu(x)), {{{{3}}, {-1.0f, 0.0f, 2.5f}}});
  EXPECT_EQ(bytes_of(out.data), bytes_of({0.0f, 0.0f, 2.5f}));
}

TEST(Interpret, IdentityMatMulIsExact) {
  std::vector<float> eye(16, 0.0f);
  for (int i = 0; i < 4; ++i) eye[static_cast<std::size_t>(i * 5)] = 1.0f;
  ProgramBuilder b;
  const int i4 = b.constant("eye", {{4, 4}}, eye);
  const int x = b.input("x", {{4, 7}});
  const TensorProgram p = b.build(b.matmul(i4, x));
  const Tensor in = random_tensor({{4, 7}}, 5);
  EXPECT_EQ(bytes_of(interpret(p, {in}).data), bytes_of(in.data));
}

TEST(Interpret, MaxPoolRamp) {
  ProgramBuilder b;
  const int x = b.input("x", {{1, 4, 4, 1}});
  std::vector<float> ramp(16);
  for (int i = 0; i < 16; ++i) ramp[static_cast<std::size_t>(i)] = static_cast<float>(i);
  const Tensor out = interpret(b.build(b.max_pool(x, 2, 2)), {{{{1, 4, 4, 1}}, ramp}});
  EXPECT_EQ(out.data, (std::vector<float>{5, 7, 13, 15}));
  EXPECT_EQ(out.type, (TensorType{{1, 2, 2, 1}}));
}

TEST(Interpret, AvgPoolMatchesBruteForce) {
  ProgramBuilder b;
  const int x = b.input("x", {{1, 6, 5, 2}});
  const Tensor in = random_tensor({{1, 6, 5, 2}}, 3);
  const Tensor out = interpret(b.build(b.avg_pool(x, 3, 2)), {in});
  ASSERT_EQ(out.type, (TensorType{{1, 2, 2, 2}}));
  std::size_t n = 0;
  for (int oy = 0; oy < 2; ++oy) {
    for (int ox = 0; ox < 2; ++ox) {
      for (int c = 0; c < 2; ++c) {
        float s = 0;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const float v = in.data[static_cast<std::size_t>(((oy * 2 + i) * 5 + ox * 2 + j) * 2 + c)];
            s = (i == 0 && j == 0) ? v : s + v;
          }
        }
        EXPECT_EQ(out.data[n++], s / 9.0f);
      }
    }
  }
}

TEST(Interpret, ConvMatchesNaiveDefinition) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int64_t h = 3 + static_cast<int64_t>(rng() % 8), w = 3 + static_cast<int64_t>(rng() % 8);
    const int64_t c = 1 + static_cast<int64_t>(rng() % 3), f = 1 + static_cast<int64_t>(rng() % 4);
    const int64_t k = 1 + static_cast<int64_t>(rng() % 3), s = 1 + static_cast<int64_t>(rng() % 2);
    const bool same = rng() % 2;
    ProgramBuilder b;
    const int x = b.input("x", {{1, h, w, c}});
    const Tensor fw = random_tensor({{f, k, k, c}}, rng());
    const Tensor bias = random_tensor({{f}}, rng());
    const int fi = b.constant("f", fw.type, fw.data);
    const int bi = b.constant("b", bias.type, bias.data);
    const TensorProgram p = b.build(b.conv2d(x, fi, bi, s, same ? Padding::Same : Padding::Valid));
    const Tensor in = random_tensor({{1, h, w, c}}, rng());
    ASSERT_EQ(bytes_of(interpret(p, {in}).data), bytes_of(naive_conv(in, fw, bias, s, same))) << trial;
  }
}

TEST(Interpret, RejectsWrongInputs) {
  ProgramBuilder b;
  const TensorProgram p = b.build(b.relu(b.input("x", {{3}})));
  EXPECT_EQ(code_of([&] { interpret(p, {}); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] { interpret(p, {{{{4}}, {1, 2, 3, 4}}}); }), ErrorCode::ShapeMismatch);
}

TEST(Lower, SuiteMatchesInterpreterBitwise) {
  for (const Benchmark& bm : builtin_suite()) {
    for (uint64_t seed : {1u, 2u}) {
      const std::vector<Tensor> in = bm.inputs(seed);
      const Executed ex = run_lowered(bm.program, in);
      SCOPED_TRACE(bm.name + " seed " + std::to_string(seed));
      EXPECT_EQ(ex.result.exit_code, 0);
      EXPECT_EQ(ex.result.output, bytes_of(interpret(bm.program, in).data));
      EXPECT_EQ(ex.result.total_instrs, ex.lowered.expected_instructions);
    }
  }
}

TEST(Lower, RandomProgramsMatchInterpreterBitwise) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 80; ++trial) {
    const TensorProgram p = random_program(rng);
    const std::vector<Tensor> in = random_inputs(p, rng());
    const Executed ex = run_lowered(p, in);
    ASSERT_EQ(ex.result.output, bytes_of(interpret(p, in).data)) << to_text(p);
    ASSERT_EQ(ex.result.total_instrs, ex.lowered.expected_instructions) << to_text(p);
  }
}

TEST(Lower, SpecialValuesMatchInterpreter) {
  // NaN, infinities, signed zeros and denormals through relu, pools and add
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const float inf = std::numeric_limits<float>::infinity();
  const std::vector<float> v = {nan, -0.0f, 0.0f, inf, -inf, 1e-40f, -1e-40f, 3.0f,
                                -nan, 2.0f, -0.0f, -1.0f, 1e38f, 1e38f, -5.0f, 0.5f};
  ProgramBuilder b;
  const int x = b.input("x", {{1, 4, 4, 1}});
  const int y = b.input("y", {{1, 4, 4, 1}});
  const int s = b.add(b.relu(x), y);
  const int mp = b.max_pool(s, 2, 1);
  const int ap = b.avg_pool(x, 2, 2);
  const int f = b.flatten(mp);
  const int w = b.constant("w", {{2, 9}}, std::vector<float>(18, 1.5f));
  const int fc = b.fully_connected(f, w, b.constant("c", {{2}}, {0.0f, -0.0f}));
  const int fa = b.flatten(ap);
  const int out = b.matmul(b.add(fc, b.constant("z", {{1, 2}}, {1.0f, 2.0f})),
                           b.constant("m", {{2, 4}}, {1, 0, 0, 1, 0, 1, 1, 0}));
  const int final = b.add(out, fa);
  const TensorProgram p = b.build(final);
  std::vector<float> r = v;
  std::reverse(r.begin(), r.end());
  const std::vector<Tensor> in = {{{{1, 4, 4, 1}}, v}, {{{1, 4, 4, 1}}, r}};
  EXPECT_EQ(run_lowered(p, in).result.output, bytes_of(interpret(p, in).data));
}

TEST(Lower, FloatMultAccCensus) {
  for (int64_t n : {4, 16, 64}) {
    ProgramBuilder b;
    const int a = b.input("a", {{n, n}});
    const TensorProgram q = infer_shapes(b.build(b.matmul(a, b.constant_seeded("w", {{n, n}}, 1))));
    const Executed ex = run_lowered(q, random_inputs(q, 1));
    EXPECT_EQ(ex.result.count(isa::InstrClass::FloatMultAcc), static_cast<uint64_t>(n * n * n)) << n;
  }
  const Executed suite = run_lowered(find_benchmark("matmul64")->program, find_benchmark("matmul64")->inputs(1));
  EXPECT_EQ(suite.result.count(isa::InstrClass::FloatMultAcc), 64u * 64 * 64);
  // rectangular M, K, N
  ProgramBuilder b;
  const int a = b.input("a", {{3, 5}});
  const TensorProgram p = infer_shapes(b.build(b.matmul(a, b.constant_seeded("w", {{5, 7}}, 1))));
  EXPECT_EQ(run_lowered(p, random_inputs(p, 1)).result.count(isa::InstrClass::FloatMultAcc), 3u * 5 * 7);

  // valid conv: outH * outW * outC * kH * kW * inC
  ProgramBuilder c;
  const int x = c.input("x", {{1, 28, 28, 1}});
  const TensorProgram conv = infer_shapes(
      c.build(c.conv2d(x, c.constant_seeded("f", {{6, 5, 5, 1}}, 1), c.constant_seeded("b", {{6}}, 2))));
  EXPECT_EQ(run_lowered(conv, random_inputs(conv, 1)).result.count(isa::InstrClass::FloatMultAcc),
            24u * 24 * 6 * 5 * 5 * 1);
}

TEST(Lower, MemoryInstructionsDominate) {
  for (const Benchmark& bm : builtin_suite()) {
    const Executed ex = run_lowered(bm.program, bm.inputs(1));
    const double mem = static_cast<double>(ex.result.count(isa::InstrClass::MemRead) +
                                           ex.result.count(isa::InstrClass::MemWrite)) /
                       static_cast<double>(ex.result.total_instrs);
    EXPECT_GT(mem, 0.25) << bm.name;
  }
}

TEST(Lower, CodeAndDataWellFormed) {
  for (const Benchmark& bm : builtin_suite()) {
    SCOPED_TRACE(bm.name);
    const LoweredProgram lp = lower(bm.program);
    for (const isa::Instruction& in : lp.code) {
      const uint32_t word = isa::encode(in);
      EXPECT_EQ(isa::decode(word).mnemonic, in.mnemonic);
    }
    for (const auto& [name, sym] : lp.inputs) EXPECT_EQ(sym.addr % 8, 0u) << name;
    EXPECT_EQ(lp.output.addr % 8, 0u);
    EXPECT_EQ(lp.output.size, lp.output_type.bytes());
    for (const auto& seg : lp.image.segments) EXPECT_EQ(seg.base % 8, 0u);
  }
  // every access in a trace is naturally aligned
  const auto bm = find_benchmark("lenet5");
  const Executed ex = run_lowered(bm->program, bm->inputs(1), true);
  for (const isa::TraceEvent& ev : *ex.result.trace) {
    if (ev.mem) {
      ASSERT_EQ(ev.mem->addr % ev.mem->size, 0u) << ev.pc;
    }
  }
}

TEST(Lower, CapacityExceeded) {
  LowerOptions opts;
  opts.capacity = 4096;
  EXPECT_EQ(code_of([&] { lower(find_benchmark("matmul64")->program, opts); }), ErrorCode::CapacityExceeded);
}

TEST(Lower, UnsupportedKind) {
  ProgramBuilder b;
  const int x = b.input("x", {{4}});
  TensorProgram p = infer_shapes(b.build(b.relu(x)));
  p.ops[1].kind = static_cast<OpKind>(99);
  EXPECT_EQ(code_of([&] { lower(p); }), ErrorCode::UnsupportedOp);
}

TEST(Lower, RejectsWrongInputCount) {
  const LoweredProgram lp = lower(find_benchmark("stream_add")->program);
  EXPECT_EQ(code_of([&] { bind_inputs(lp, {}); }), ErrorCode::ShapeMismatch);
}

TEST(Suite, ContentsAndWellFormedness) {
  const auto names = builtin_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "lenet5"), names.end());
  const auto suite = builtin_suite();
  ASSERT_EQ(suite.size(), names.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    EXPECT_EQ(suite[i].name, names[i]);
    EXPECT_NO_THROW(infer_shapes(suite[i].program));
    EXPECT_TRUE(find_benchmark(names[i]).has_value());
  }
  EXPECT_FALSE(find_benchmark("resnet50").has_value());

  EXPECT_EQ(find_benchmark("conv_small")->program.output_type(), (TensorType{{1, 32, 32, 8}}));
  EXPECT_EQ(find_benchmark("lenet5")->program.output_type(), (TensorType{{1, 10}}));
  EXPECT_EQ(find_benchmark("mlp_3layer")->program.output_type(), (TensorType{{1, 10}}));
  const auto sa = find_benchmark("stream_add");
  int64_t elems = 0;
  for (const Tensor& t : sa->inputs(1)) elems += t.type.elements();
  EXPECT_EQ(elems, 2 << 20);
}

TEST(Suite, SeededGenerationIsDeterministic) {
  for (const std::string& name : builtin_names()) {
    const Benchmark a = *find_benchmark(name);
    const Benchmark b = *find_benchmark(name);
    for (std::size_t i = 0; i < a.program.ops.size(); ++i) {
      EXPECT_EQ(bytes_of(a.program.ops[i].values), bytes_of(b.program.ops[i].values)) << name;
    }
    const auto x = a.inputs(4), y = b.inputs(4), z = a.inputs(5);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(bytes_of(x[i].data), bytes_of(y[i].data));
      EXPECT_NE(bytes_of(x[i].data), bytes_of(z[i].data));
    }
  }
}

TEST(Text, ExampleParses) {
  const TensorProgram p = parse_program(R"(
# lenet front end
x  = input 1x28x28x1
w  = const 6x5x5x1 seed=7 scale=0.2
b  = const 6 values=0,0,0,0,0,0
c  = conv2d x w b stride=1 padding=valid : 1x24x24x6
r  = relu c
p  = maxpool2d r window=2 stride=2 : 1x12x12x6
output r
)");
  EXPECT_EQ(p.ops.size(), 6u);
  EXPECT_EQ(p.ops[static_cast<std::size_t>(p.output)].name, "r");
  EXPECT_EQ(p.output_type(), (TensorType{{1, 24, 24, 6}}));
  EXPECT_EQ(p.ops[1].values, uniform_values(7, 150, 0.2f));
}

TEST(Text, RoundTripsSuitePrograms) {
  for (const Benchmark& bm : builtin_suite()) {
    if (bm.name == "matmul128") continue;  // large constant; covered by the others
    const std::string text = to_text(bm.program);
    const TensorProgram back = parse_program(text);
    EXPECT_EQ(to_text(back), text) << bm.name;
    ASSERT_EQ(back.ops.size(), bm.program.ops.size());
    for (std::size_t i = 0; i < back.ops.size(); ++i) {
      EXPECT_EQ(bytes_of(back.ops[i].values), bytes_of(bm.program.ops[i].values)) << bm.name;
      EXPECT_EQ(back.ops[i].type, bm.program.ops[i].type);
    }
  }
}

TEST(Text, RoundTripsRandomPrograms) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    const TensorProgram p = random_program(rng);
    const TensorProgram q = parse_program(to_text(p));
    const auto in = random_inputs(p, 9);
    EXPECT_EQ(bytes_of(interpret(q, in).data), bytes_of(interpret(p, in).data));
  }
}

TEST(Text, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& src) {
    try {
      parse_program(src);
    } catch (const Error& e) {
      return std::pair{e.code(), std::string(e.what())};
    }
    return std::pair{ErrorCode::EmptyInput, std::string()};
  };
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"x = input 4\ny = frob x\n", "line 2"},
      {"x = input 4\ny = relu z\n", "line 2"},
      {"x = input 4x\n", "line 1"},
      {"x = input 4\nx = relu x\n", "line 2"},
      {"x = input 4\n\ny = relu x extra=1\n", "line 3"},
      {"a = input 2x2\nb = const 2x2 values=1,2,3\n", "line 2"},
      {"a = input 1x4x4x1\nb = maxpool2d a stride=2\n", "line 2"},
      {"a = input 1x4x4x1\nb = maxpool2d a window=x\n", "line 2"},
      {"a = input 4\noutput q\n", "line 2"},
      {"a = input 4\nb = add a\n", "line 2"},
      {"# nothing\n", "no ops"},
  };
  for (const auto& [src, where] : cases) {
    const auto [code, msg] = message(src);
    EXPECT_EQ(code, ErrorCode::ParseError) << src;
    EXPECT_NE(msg.find(where), std::string::npos) << src << " -> " << msg;
  }
  const auto [code, msg] = message("a = input 2x3\nb = input 3x4\nc = matmul a b : 2x5\n");
  EXPECT_EQ(code, ErrorCode::ShapeMismatch);
  EXPECT_NE(msg.find("line 3"), std::string::npos);
}
