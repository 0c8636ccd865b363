#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracle_cache.hpp"
#include "rvmb/harness/runner.hpp"
#include "rvmb/memhier/hierarchy.hpp"

using namespace rvmb;
using namespace rvmb::memhier;

namespace {

oracle::Geometry geom(const CacheConfig& c) { return {c.size, c.ways, c.line}; }

oracle::Hierarchy oracle_for(const HierarchyConfig& c) { return {geom(c.l1i), geom(c.l1d), geom(c.l2)}; }

HierarchyConfig tiny() {
  HierarchyConfig c;
  c.l1i = {1024, 2, 64, 2};
  c.l1d = {2048, 4, 64, 2};
  c.l2 = {8192, 4, 64, 12};
  return c;
}

void expect_counts(const CacheStats& s, const oracle::Hierarchy& o) {
  EXPECT_EQ(s.l1i.accesses, o.l1i.counts.accesses);
  EXPECT_EQ(s.l1i.misses, o.l1i.counts.misses);
  EXPECT_EQ(s.l1d.accesses, o.l1d.counts.accesses);
  EXPECT_EQ(s.l1d.misses, o.l1d.counts.misses);
  EXPECT_EQ(s.l1d.writebacks, o.l1d.counts.writebacks);
  EXPECT_EQ(s.l2.accesses, o.l2.counts.accesses);
  EXPECT_EQ(s.l2.misses, o.l2.counts.misses);
}

}  // namespace

TEST(Cache, LruVictimSelection) {
  Cache c({4 * 64, 4, 64, 2});  // one set, four ways
  for (uint64_t a : {0, 64, 128, 192}) EXPECT_FALSE(c.access(a, false).hit);
  EXPECT_TRUE(c.access(0, false).hit);     // 0 becomes most recent
  EXPECT_FALSE(c.access(256, false).hit);  // evicts 64
  EXPECT_TRUE(c.access(0, false).hit);
  EXPECT_FALSE(c.access(64, false).hit);   // evicts 128
  EXPECT_TRUE(c.access(192, false).hit);
  EXPECT_FALSE(c.access(128, false).hit);
  EXPECT_EQ(c.stats().misses, 7u);
  EXPECT_EQ(c.stats().evictions, 3u);
}

TEST(Cache, WriteBackOnlyOnDirtyEviction) {
  Cache c({2 * 64, 2, 64, 2});
  c.access(0, true);
  c.access(64, false);
  auto o = c.access(128, false);  // evicts dirty 0
  EXPECT_TRUE(o.evicted_dirty);
  EXPECT_EQ(o.evicted_line, 0u);
  o = c.access(192, false);  // evicts clean 64
  EXPECT_FALSE(o.evicted_dirty);
  EXPECT_EQ(c.stats().writebacks, 1u);
}

TEST(Hierarchy, DefaultLatencies) {
  MemoryHierarchy h;
  EXPECT_EQ(h.access(0x1000, AccessKind::Read), 114u);
  EXPECT_EQ(h.access(0x1008, AccessKind::Read), 2u);
  EXPECT_EQ(h.access(0x1000, AccessKind::IFetch), 14u);  // L1I miss, L2 hit
  EXPECT_EQ(h.access(0x1000, AccessKind::IFetch), 2u);
}

TEST(Hierarchy, LatencyBoundsOnRandomStream) {
  MemoryHierarchy h;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200000; ++i) {
    const uint64_t addr = rng() % (32ull << 20);
    const auto kind = static_cast<AccessKind>(rng() % 3);
    const uint64_t lat = h.access(addr, kind);
    ASSERT_TRUE(lat == 2 || lat == 14 || lat == 114) << lat;
  }
}

TEST(Hierarchy, MatchesBruteForceOracleOnRandomStreams) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const HierarchyConfig cfg = seed % 2 ? tiny() : HierarchyConfig{};
    MemoryHierarchy h(cfg);
    oracle::Hierarchy o = oracle_for(cfg);
    std::mt19937_64 rng(seed);
    const uint64_t span = seed % 2 ? 32768 : (24ull << 20);
    for (int i = 0; i < 100000; ++i) {
      // mix of locality and random jumps
      const uint64_t addr = (i % 7 == 0 ? rng() % span : (static_cast<uint64_t>(i) * 8) % span) & ~uint64_t{7};
      const auto kind = static_cast<AccessKind>(rng() % 3);
      h.access(addr, kind);
      o.access(addr, kind == AccessKind::IFetch, kind == AccessKind::Write);
    }
    expect_counts(h.snapshot(), o);
  }
}

TEST(Hierarchy, ReplayedSuiteTracesMatchOracle) {
  for (const char* name : {"matmul16", "conv_small", "lenet5", "stream_add"}) {
    const harness::Workload w = harness::prepare(name, 1);
    for (const HierarchyConfig& cfg : {HierarchyConfig{}, tiny()}) {
      harness::RunConfig rc;
      rc.benchmarks = {name};
      rc.cache = cfg;
      isa::RunOptions opts;
      opts.record_trace = true;
      for (const char* model : {"atomic", "minor", "o3"}) {
        const uarch::Simulation sim = harness::simulate(model, w, rc, opts);
        oracle::Hierarchy o = oracle_for(cfg);
        o.replay(*sim.functional.trace, cfg.l1i.line);
        SCOPED_TRACE(std::string(name) + "/" + model);
        expect_counts(sim.timing.caches, o);
      }
    }
  }
}

TEST(Hierarchy, WorkingSetFitsInL1) {
  MemoryHierarchy h;
  const uint64_t bytes = 32 * 1024;
  for (uint64_t a = 0; a < bytes; a += 8) h.access(a, AccessKind::Read);
  const CacheStats warm = h.snapshot();
  for (int pass = 0; pass < 4; ++pass) {
    for (uint64_t a = 0; a < bytes; a += 8) h.access(a, AccessKind::Read);
  }
  const CacheStats s = h.snapshot();
  const double rate = static_cast<double>(s.l1d.misses - warm.l1d.misses) /
                      static_cast<double>(s.l1d.accesses - warm.l1d.accesses);
  EXPECT_LT(rate, 0.01);
}

TEST(Hierarchy, WorkingSetFitsInL2) {
  MemoryHierarchy h;
  const uint64_t bytes = 1 << 20;
  for (uint64_t a = 0; a < bytes; a += 64) h.access(a, AccessKind::Read);
  const CacheStats warm = h.snapshot();
  for (uint64_t a = 0; a < bytes; a += 64) EXPECT_EQ(h.access(a, AccessKind::Read), 14u);
  const CacheStats s = h.snapshot();
  EXPECT_GT(s.l1d.misses, warm.l1d.misses);
  EXPECT_EQ(s.l2.misses, warm.l2.misses);
}

TEST(Hierarchy, DirtyVictimDoesNotDisturbL2Stats) {
  HierarchyConfig cfg = tiny();
  MemoryHierarchy h(cfg);
  for (uint64_t a = 0; a < 4096; a += 64) h.access(a, AccessKind::Write);
  const CacheStats s = h.snapshot();
  EXPECT_GT(s.l1d.writebacks, 0u);
  EXPECT_EQ(s.l2.accesses, s.l1d.misses + s.l1i.misses);
}

TEST(Hierarchy, DeterministicStats) {
  auto run = [] {
    MemoryHierarchy h(tiny());
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50000; ++i) h.access(rng() % 65536, static_cast<AccessKind>(rng() % 3));
    return h.snapshot();
  };
  EXPECT_EQ(run(), run());
}

TEST(Hierarchy, ConfigValidation) {
  HierarchyConfig c;
  c.l1d.size = 3000;
  EXPECT_THROW(MemoryHierarchy{c}, Error);
  c = {};
  c.l1d.ways = 0;
  EXPECT_THROW(MemoryHierarchy{c}, Error);
  c = {};
  c.l2.line = 128;
  EXPECT_THROW(MemoryHierarchy{c}, Error);
  c = {};
  c.dram_latency = 0;
  EXPECT_THROW(MemoryHierarchy{c}, Error);
}

TEST(Mpki, Definition) {
  CacheStats s;
  s.l2.misses = 250;
  EXPECT_DOUBLE_EQ(mpki(s, Level::L2, 2000), 125.0);
  try {
    mpki(s, Level::L2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroInstructions);
  }
}
