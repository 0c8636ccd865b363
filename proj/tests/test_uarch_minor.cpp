#include <gtest/gtest.h>

#include <random>

#include "rvmb/harness/runner.hpp"
#include "rvmb/isa/codec.hpp"
#include "rvmb/loader/assembler.hpp"
#include "rvmb/uarch/minor.hpp"

using namespace rvmb;
using namespace rvmb::uarch;
using isa::Mnemonic;

namespace {

MinorConfig perfect() {
  MinorConfig c;
  c.perfect_icache = true;
  return c;
}

// Feeds straight-line instructions to a model as if they had committed at
// consecutive pcs. Returns the issue cycle of each.
std::vector<int64_t> feed(MinorModel& m, const std::vector<isa::Instruction>& prog) {
  std::vector<int64_t> issues;
  uint64_t pc = 0x10000;
  for (std::size_t i = 0; i < prog.size(); ++i) {
    const isa::TraceEvent ev{i, pc, isa::classify(prog[i]), std::nullopt};
    m.commit(isa::Commit{prog[i], ev, pc + 4});
    issues.push_back(m.last_issue());
    pc += 4;
  }
  return issues;
}

uint64_t stall_sum(const TimingResult& t) { return t.total_stalls(); }

// The in-order recurrence evaluated from its definition, for register-only
// code with a perfect I-cache and no control flow.
struct RecurrenceOracle {
  LatencyTable lat;
  std::map<int, int64_t> ready;
  std::map<int, int64_t> unit_free;
  int64_t prev = -1, last_done = 0;

  static int unit(isa::InstrClass c) {
    using C = isa::InstrClass;
    if (c == C::IntMult || c == C::IntDiv) return 1;  // one iterative unit
    if (c == C::FloatAdd || c == C::FloatMult || c == C::FloatMultAcc) return 2;
    if (c == C::FloatDiv) return 3;
    return 0;
  }

  void add(const isa::Instruction& in) {
    const isa::OpcodeInfo& op = isa::info(in.mnemonic);
    auto reg = [](isa::RegKind k, int r) { return k == isa::RegKind::X ? (r == 0 ? -1 : r) : k == isa::RegKind::F ? 32 + r : -1; };
    int64_t t = prev + 1;
    for (int r : {reg(op.rs1, in.rs1), reg(op.rs2, in.rs2), reg(op.rs3, in.rs3)}) {
      if (r >= 0) t = std::max(t, ready[r]);
    }
    const int u = unit(op.cls);
    t = std::max(t, unit_free[u]);
    const LatencyEntry e = lat[op.cls];
    const int64_t done = t + e.latency;
    if (int d = reg(op.rd, in.rd); d >= 0) ready[d] = done;
    unit_free[u] = e.pipelined ? t + 1 : done;
    prev = t;
    last_done = done;
  }
};

isa::Instruction random_op(std::mt19937_64& rng) {
  static const Mnemonic ops[] = {Mnemonic::ADD,    Mnemonic::SUB,    Mnemonic::MUL,     Mnemonic::DIV,
                                 Mnemonic::ADDI,   Mnemonic::REMU,   Mnemonic::FADD_D,  Mnemonic::FMUL_S,
                                 Mnemonic::FMADD_D, Mnemonic::FDIV_S, Mnemonic::FSQRT_D, Mnemonic::FSGNJ_D,
                                 Mnemonic::FMV_X_D, Mnemonic::FCVT_D_L, Mnemonic::LUI};
  const Mnemonic m = ops[rng() % std::size(ops)];
  auto r = [&] { return static_cast<uint8_t>(rng() % 8); };  // few registers, many hazards
  const isa::ImmFormat f = isa::info(m).imm;
  const int64_t imm = f == isa::ImmFormat::U ? 4096 : f == isa::ImmFormat::I ? 3 : 0;
  return isa::make(m, r(), r(), r(), imm, r(), isa::RNE);
}

harness::RunConfig suite_config() {
  harness::RunConfig c;
  c.benchmarks = {"matmul16"};
  return c;
}

}  // namespace

TEST(Minor, DependentAddChainTakes104Cycles) {
  memhier::MemoryHierarchy mem;
  MinorModel m(perfect(), mem);
  std::vector<isa::Instruction> prog(100, isa::make(Mnemonic::ADD, 10, 10, 11));
  const auto issues = feed(m, prog);
  EXPECT_EQ(issues.back(), 99);
  EXPECT_EQ(m.last_done(), 100);
  EXPECT_EQ(m.result().cycles, 104u);
  EXPECT_EQ(m.result().committed, 100u);
}

TEST(Minor, MulToDependentAddGapIsTen) {
  memhier::MemoryHierarchy mem;
  MinorModel m(perfect(), mem);
  const auto issues = feed(m, {isa::make(Mnemonic::MUL, 5, 6, 7), isa::make(Mnemonic::ADD, 8, 5, 5)});
  EXPECT_EQ(issues[1] - issues[0], 10);
  EXPECT_EQ(m.result().stall(Stall::RawHazard), 9u);
}

TEST(Minor, BackToBackMulsShareTheIterativeUnit) {
  memhier::MemoryHierarchy mem;
  MinorModel m(perfect(), mem);
  const auto issues = feed(m, {isa::make(Mnemonic::MUL, 5, 6, 7), isa::make(Mnemonic::DIV, 8, 6, 7),
                               isa::make(Mnemonic::ADD, 9, 6, 7)});
  EXPECT_EQ(issues[1] - issues[0], 10);
  EXPECT_EQ(issues[2] - issues[1], 1);
  EXPECT_EQ(m.result().stall(Stall::Structural), 9u);
}

TEST(Minor, MatchesRecurrenceOracleOnRandomStreams) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    memhier::MemoryHierarchy mem;
    MinorModel m(perfect(), mem);
    RecurrenceOracle o;
    std::vector<isa::Instruction> prog;
    for (int i = 0; i < 300; ++i) prog.push_back(random_op(rng));
    const auto issues = feed(m, prog);
    for (const auto& in : prog) o.add(in);
    ASSERT_EQ(m.last_done(), o.last_done);
    ASSERT_EQ(issues.back(), o.prev);
    const TimingResult t = m.result();
    ASSERT_EQ(t.cycles, static_cast<uint64_t>(o.last_done) + 4);
    ASSERT_EQ(t.cycles, t.committed + stall_sum(t) + 4);
  }
}

TEST(Minor, MispredictAddsPenalty) {
  // first backward branch: predicted not-taken, actually taken
  const auto img = loader::image_from_assembly(R"(
    li t0, 2
loop:
    addi t0, t0, -1
    bnez t0, loop
    li a0, 0
    li a7, 93
    ecall
)");
  memhier::MemoryHierarchy mem;
  const Simulation s = simulate_minor(img, img.entry, perfect(), mem, 100);
  EXPECT_EQ(s.timing.stall(Stall::Branch), 3u);
  EXPECT_EQ(s.timing.predictor.mispredictions, 1u);
  EXPECT_EQ(s.timing.cycles, s.timing.committed + s.timing.total_stalls() + 4);
}

TEST(Minor, LoadUseChargesDataLatency) {
  const auto img = loader::image_from_assembly(R"(
    la t0, value
    ld t1, 0(t0)
    ld t2, 0(t0)
    add t3, t2, t2
    li a0, 0
    li a7, 93
    ecall
    .align 3
value: .dword 5
)");
  memhier::MemoryHierarchy mem;
  MinorModel model(perfect(), mem);
  std::vector<int64_t> issues;
  isa::execute(img, img.entry, 100, {}, [&](const isa::Commit& c) {
    model.commit(c);
    issues.push_back(model.last_issue());
  });
  // first ld misses to DRAM (1 + 114), second hits (1 + 2); add waits on it
  EXPECT_EQ(issues[4] - issues[3], 3);
  EXPECT_EQ(model.result().stall(Stall::DCache), 2u);
}

TEST(Minor, AluStreamCpiApproachesOne) {
  std::string body;
  for (int i = 0; i < 100; ++i) body += "  addi a" + std::to_string(i % 6) + ", zero, " + std::to_string(i) + "\n";
  const auto img = loader::image_from_assembly("  li t0, 1000\nloop:\n" + body +
                                               "  addi t0, t0, -1\n  bnez t0, loop\n  li a0, 0\n  li a7, 93\n  ecall\n");
  memhier::MemoryHierarchy mem;
  const Simulation s = simulate_minor(img, img.entry, MinorConfig{}, mem, 1'000'000);
  EXPECT_GE(s.timing.committed, 100000u);
  EXPECT_GE(s.timing.cpi(), 1.0);
  EXPECT_LT(s.timing.cpi(), 1.01);
}

TEST(Minor, SuiteProgramsKeepTheStallIdentityAndDigest) {
  const harness::RunConfig cfg = suite_config();
  for (const char* name : {"matmul16", "conv_small", "lenet5", "mlp_3layer"}) {
    const harness::Workload w = harness::prepare(name, 1);
    const Simulation s = harness::simulate("minor", w, cfg);
    SCOPED_TRACE(name);
    EXPECT_EQ(s.timing.cycles, s.timing.committed + s.timing.total_stalls() + 4);
    EXPECT_GE(s.timing.cpi(), 1.0);
    EXPECT_EQ(s.functional.digest, isa::run_functional(w.image, w.limit).digest);
  }
}

TEST(Minor, MonotoneInEveryLatency) {
  for (const char* name : {"matmul16", "conv_small"}) {
    const harness::Workload w = harness::prepare(name, 1);
    harness::RunConfig cfg = suite_config();
    const uint64_t base = harness::simulate("minor", w, cfg).timing.cycles;
    for (isa::InstrClass c : isa::kAllClasses) {
      harness::RunConfig slower = cfg;
      slower.minor.latencies[c].latency += 3;
      const uint64_t cycles = harness::simulate("minor", w, slower).timing.cycles;
      EXPECT_GE(cycles, base) << name << " " << isa::class_name(c);
    }
    harness::RunConfig slow_dram = cfg;
    slow_dram.cache.dram_latency = 200;
    EXPECT_GE(harness::simulate("minor", w, slow_dram).timing.cycles, base);
  }
}

TEST(Minor, Deterministic) {
  const harness::Workload w = harness::prepare("conv_small", 3);
  const harness::RunConfig cfg = suite_config();
  const Simulation a = harness::simulate("minor", w, cfg);
  const Simulation b = harness::simulate("minor", w, cfg);
  EXPECT_EQ(a.timing.cycles, b.timing.cycles);
  EXPECT_EQ(a.timing.stall_cycles, b.timing.stall_cycles);
  EXPECT_EQ(a.timing.caches, b.timing.caches);
  EXPECT_EQ(a.functional.digest, b.functional.digest);
}

TEST(Minor, ConfigValidation) {
  memhier::MemoryHierarchy mem;
  MinorConfig c;
  c.issue_width = 2;
  EXPECT_THROW(MinorModel(c, mem), Error);
  c = {};
  c.mispredict_penalty = 5;
  EXPECT_THROW(MinorModel(c, mem), Error);
  c = {};
  c.latencies[isa::InstrClass::IntAlu].latency = 0;
  EXPECT_THROW(MinorModel(c, mem), Error);
}

TEST(Speedup, RatioAndMismatch) {
  TimingResult a, b;
  a.committed = b.committed = 100;
  a.cycles = 10000;
  b.cycles = 2500;
  EXPECT_DOUBLE_EQ(speedup(a, b), 4.0);
  EXPECT_DOUBLE_EQ(speedup(a, a), 1.0);
  b.committed = 99;
  try {
    speedup(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedRuns);
  }
}
