#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "rvmb/isa/codec.hpp"
#include "rvmb/isa/functional.hpp"
#include "rvmb/loader/assembler.hpp"
#include "rvmb/uarch/predictor.hpp"

using namespace rvmb;
using namespace rvmb::uarch;
using isa::Mnemonic;

namespace {

// Reference gshare + RAS written from the definition: 2-bit counters
// indexed by ((pc >> 2) xor history) mod entries, history shifted in only
// for conditional branches, a bounded stack that drops its oldest entry.
struct Reference {
  std::vector<int> pht = std::vector<int>(4096, 1);
  uint32_t history = 0;
  std::deque<uint64_t> stack;
  uint64_t predictions = 0, wrong = 0, ras_hits = 0;

  bool branch(uint64_t pc, bool taken) {
    ++predictions;
    const std::size_t i = ((pc >> 2) ^ history) % 4096;
    const bool guess = pht[i] >= 2;
    pht[i] = taken ? std::min(pht[i] + 1, 3) : std::max(pht[i] - 1, 0);
    history = ((history << 1) | (taken ? 1 : 0)) & 0xfff;
    wrong += guess != taken;
    return guess != taken;
  }
  void call(uint64_t pc) {
    ++predictions;
    stack.push_back(pc + 4);
    if (stack.size() > 32) stack.pop_front();
  }
  bool ret(uint64_t target) {
    ++predictions;
    bool miss = true;
    if (!stack.empty()) {
      miss = stack.back() != target;
      stack.pop_back();
    }
    if (miss) ++wrong;
    else ++ras_hits;
    return miss;
  }
};

isa::Instruction branch_at(int64_t off) { return isa::make(Mnemonic::BNE, 0, 5, 6, off); }
const isa::Instruction kCall = isa::make(Mnemonic::JAL, 1, 0, 0, 0x400);
const isa::Instruction kRet = isa::make(Mnemonic::JALR, 0, 1, 0, 0);

struct Counting {
  GsharePredictor bp;
  uint64_t returns = 0;
  void operator()(const isa::Commit& c) {
    if (!isa::is_control(c.event.cls)) return;
    if (c.instr.mnemonic == Mnemonic::JALR && c.instr.rs1 == 1 && c.instr.rd == 0) ++returns;
    bp.resolve(c.event.pc, c.instr, c.next_pc);
  }
};

Counting run(const std::string& src) {
  Counting sink;
  isa::execute(loader::image_from_assembly(src, 0x10000, 8192), 0x10000, 10'000'000, {}, sink);
  return sink;
}

}  // namespace

TEST(Predictor, InitialStateAndIndex) {
  GsharePredictor bp;
  EXPECT_EQ(bp.ghr(), 0u);
  EXPECT_EQ(bp.counter(0x1000), 1);  // weakly not-taken
  EXPECT_EQ(bp.index(0x1000), (0x1000u >> 2) & 4095u);
  EXPECT_FALSE(bp.predict(0x1000, branch_at(16)).taken);
}

TEST(Predictor, CounterSaturatesAndHistoryShifts) {
  GsharePredictor bp;
  bp.resolve(0x1000, branch_at(16), 0x1010);
  EXPECT_EQ(bp.ghr(), 1u);
  EXPECT_EQ(bp.counter_at((0x1000 >> 2) & 4095), 2);
  bp.resolve(0x1000, branch_at(16), 0x1004);
  EXPECT_EQ(bp.ghr(), 2u);
  // jumps leave history alone
  bp.resolve(0x2000, kCall, 0x2400);
  EXPECT_EQ(bp.ghr(), 2u);
}

TEST(Predictor, MatchesReferenceOnRandomStreams) {
  std::mt19937_64 rng(17);
  GsharePredictor bp;
  Reference ref;
  std::vector<uint64_t> calls;
  for (int i = 0; i < 200000; ++i) {
    const int kind = static_cast<int>(rng() % 10);
    if (kind < 7) {
      const uint64_t pc = 0x10000 + 4 * (rng() % 64);
      // biased outcomes so the counters have something to learn
      const bool taken = (rng() % 100) < (pc % 3 == 0 ? 90u : 20u);
      const bool miss = bp.resolve(pc, branch_at(32), taken ? pc + 32 : pc + 4);
      ASSERT_EQ(miss, ref.branch(pc, taken)) << i;
    } else if (kind < 9 || calls.empty()) {
      const uint64_t pc = 0x20000 + 4 * (rng() % 512);
      bp.resolve(pc, kCall, pc + 0x400);
      ref.call(pc);
      calls.push_back(pc + 4);
    } else {
      // mostly proper returns, sometimes to an unexpected address
      uint64_t target = calls.back();
      calls.pop_back();
      if (rng() % 8 == 0) target += 8;
      const bool miss = bp.resolve(0x30000, kRet, target);
      ASSERT_EQ(miss, ref.ret(target)) << i;
    }
    ASSERT_EQ(bp.ghr(), ref.history);
  }
  EXPECT_EQ(bp.stats().predictions, ref.predictions);
  EXPECT_EQ(bp.stats().mispredictions, ref.wrong);
  EXPECT_EQ(bp.stats().ras_hits, ref.ras_hits);
}

TEST(Predictor, OtherJalrPredictsFallThrough) {
  GsharePredictor bp;
  const isa::Instruction jr = isa::make(Mnemonic::JALR, 0, 5, 0, 0);
  EXPECT_TRUE(bp.resolve(0x1000, jr, 0x5000));
  EXPECT_FALSE(bp.resolve(0x1000, jr, 0x1004));
  EXPECT_FALSE(bp.resolve(0x1000, kCall, 0x1400));  // direct jumps are always right
}

TEST(Predictor, ReturnUnderflowMispredicts) {
  GsharePredictor bp;
  EXPECT_TRUE(bp.resolve(0x1000, kRet, 0x2000));
  EXPECT_EQ(bp.stats().ras_hits, 0u);
}

TEST(Predictor, AlwaysTakenLoop) {
  const Counting c = run(R"(
    li t0, 10000
loop:
    addi t0, t0, -1
    bnez t0, loop
    li a0, 0
    li a7, 93
    ecall
)");
  EXPECT_EQ(c.bp.stats().predictions, 10000u);
  EXPECT_GE(c.bp.stats().accuracy(), 0.99);
}

namespace {

std::string recursion(int depth) {
  return "  li sp, 0x11f00\n  li a0, " + std::to_string(depth) + R"(
    call rec
    li a0, 0
    li a7, 93
    ecall
rec:
    addi sp, sp, -16
    sd ra, 0(sp)
    addi a0, a0, -1
    beqz a0, base
    call rec
base:
    ld ra, 0(sp)
    addi sp, sp, 16
    ret
)";
}

}  // namespace

TEST(Predictor, ThirtyTwoDeepCallsAllReturnCorrectly) {
  const Counting c = run(recursion(32));
  EXPECT_EQ(c.returns, 32u);
  EXPECT_EQ(c.bp.stats().ras_hits, 32u);
}

TEST(Predictor, DeeperRecursionOverflowsTheStack) {
  const Counting c = run(recursion(40));
  EXPECT_EQ(c.returns, 40u);
  EXPECT_EQ(c.bp.stats().ras_hits, 32u);
}

TEST(Predictor, ConfigValidation) {
  PredictorConfig c;
  c.pht_entries = 1000;
  EXPECT_THROW(GsharePredictor{c}, Error);
  c = {};
  c.ras_entries = 0;
  EXPECT_THROW(GsharePredictor{c}, Error);
}

TEST(Predictor, AlternatingBranchLearnsFromHistory) {
  GsharePredictor bp;
  Reference ref;
  uint64_t late_wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool taken = i % 2 == 0;
    const bool miss = bp.resolve(0x4000, branch_at(64), taken ? 0x4040 : 0x4004);
    ASSERT_EQ(miss, ref.branch(0x4000, taken));
    if (i >= 500) late_wrong += miss;
  }
  EXPECT_GE(bp.stats().accuracy(), 0.5);
  EXPECT_EQ(late_wrong, 0u);
}
