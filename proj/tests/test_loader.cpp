#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rvmb/isa/functional.hpp"
#include "rvmb/loader/assembler.hpp"
#include "rvmb/loader/elf.hpp"

using namespace rvmb;
using namespace rvmb::loader;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

ErrorCode asm_error(const std::string& src) {
  try {
    assemble(src);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::EmptyInput;
}

isa::FunctionalResult run_asm(const std::string& src, uint64_t limit = 100000) {
  return isa::run_functional(image_from_assembly(src, 0x10000, 4096), limit);
}

constexpr const char* kExit = "  li a7, 93\n  ecall\n";

}  // namespace

TEST(Assembler, MatchesClangOnFixture) {
  const std::vector<uint8_t> ours = assemble(slurp(std::string(RVMB_FIXTURES) + "/encodings.s"));
  std::istringstream hex(slurp(std::string(RVMB_FIXTURES) + "/encodings.hex"));
  std::vector<uint8_t> clang;
  for (std::string w; std::getline(hex, w);) {
    const auto v = static_cast<uint32_t>(std::stoul(w, nullptr, 16));
    for (int i = 0; i < 4; ++i) clang.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  ASSERT_EQ(ours.size(), clang.size());
  for (std::size_t i = 0; i < ours.size(); i += 4) {
    ASSERT_EQ(0, std::memcmp(&ours[i], &clang[i], 4)) << "instruction " << i / 4;
  }
}

TEST(Assembler, LabelsResolveForwardAndBackward) {
  const AssembledProgram p = assemble_program("top: addi a0, a0, 1\n  beq a0, a1, done\n  j top\ndone: nop\n", 0x100);
  EXPECT_EQ(p.labels.at("top"), 0x100u);
  EXPECT_EQ(p.labels.at("done"), 0x10cu);
  EXPECT_EQ(isa::decode(p.bytes[4] | p.bytes[5] << 8 | p.bytes[6] << 16 | uint32_t(p.bytes[7]) << 24).imm, 8);
}

TEST(Assembler, LiLoadsAnySixtyFourBitValue) {
  std::mt19937_64 rng(5);
  std::vector<int64_t> values = {0, 1, -1, 2047, -2048, 2048, 0x7fffffff, -0x80000000ll, 0x80000000,
                                 0x123456789abcdef0, INT64_MIN, INT64_MAX, 0xfffff800, 0x7ffff800};
  for (int i = 0; i < 200; ++i) values.push_back(static_cast<int64_t>(rng() >> (rng() % 64)));
  for (int64_t v : values) {
    const auto r = run_asm("  li a0, " + std::to_string(v) + "\n  mv s1, a0\n  li a0, 0\n" + kExit);
    ASSERT_EQ(r.x[9], static_cast<uint64_t>(v)) << v;
  }
}

TEST(Assembler, PseudoInstructions) {
  const auto r = run_asm(R"(
    li t0, 5
    neg t1, t0
    not t2, t0
    mv s2, t0
    la s3, data
    ld s4, 0(s3)
    call fn
    beqz zero, over
    li s6, 99
over:
    bnez t0, tail
    li s6, 98
fn:
    li s5, 7
    ret
tail:
    li a0, 0
    li a7, 93
    ecall
    .align 3
data: .dword 0x1122334455667788
)");
  EXPECT_EQ(r.x[6], static_cast<uint64_t>(-5));
  EXPECT_EQ(r.x[7], ~uint64_t{5});
  EXPECT_EQ(r.x[18], 5u);
  EXPECT_EQ(r.x[20], 0x1122334455667788u);
  EXPECT_EQ(r.x[21], 7u);
  EXPECT_EQ(r.x[22], 0u);
}

TEST(Assembler, ErrorsCarryKindAndLine) {
  EXPECT_EQ(asm_error("nop\nfrobnicate a0, a1\n"), ErrorCode::UnknownMnemonic);
  EXPECT_EQ(asm_error("beq a0, a1, nowhere\n"), ErrorCode::UndefinedLabel);
  EXPECT_EQ(asm_error("addi a0, a0, 5000\n"), ErrorCode::ImmediateOutOfRange);
  EXPECT_EQ(asm_error("add a0, a1\n"), ErrorCode::SyntaxError);
  EXPECT_EQ(asm_error("add a0, a1, q7\n"), ErrorCode::SyntaxError);
  try {
    assemble("nop\n\n  lw a0, 4(zz)\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Exit, EcallAndTohost) {
  EXPECT_EQ(run_asm(std::string("  li a0, 17\n") + kExit).exit_code, 17);
  const auto r = run_asm(R"(
    la t0, tohost
    li t1, 85        # (42 << 1) | 1
    sd t1, 0(t0)
    j .
    .align 3
tohost: .dword 0
)");
  EXPECT_EQ(r.exit_code, 42);
  EXPECT_EQ(r.total_instrs, 4u);  // la expands to two
}

TEST(Exit, TohostStoreWithoutLowBitContinues) {
  const auto r = run_asm(R"(
    la t0, tohost
    li t1, 4
    sd t1, 0(t0)
    li t1, 3
    sd t1, 0(t0)
    j .
    .align 3
tohost: .dword 0
)");
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Exit, LimitAndSyscallErrors) {
  try {
    run_asm("loop: j loop\n", 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LimitExceeded);
  }
  try {
    run_asm("  li a7, 64\n  ecall\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedSyscall);
    ASSERT_TRUE(e.pc());
    EXPECT_EQ(*e.pc(), 0x10004u);
  }
  try {
    run_asm("  ebreak\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Breakpoint);
  }
}

TEST(Exit, ConsoleOutput) {
  const auto r = run_asm(std::string("  li t0, 0x10000000\n  li t1, 111\n  sb t1, 0(t0)\n  li t1, 107\n  sb t1, 0(t0)\n") +
                         "  li a0, 0\n" + kExit);
  EXPECT_EQ(r.console, "ok");
}

TEST(Elf, ClangLinkedFixtureRuns) {
  const std::vector<uint8_t> bytes = bytes_of(slurp(std::string(RVMB_FIXTURES) + "/minimal.elf"));
  const MemoryImage img = load_elf(bytes);
  EXPECT_EQ(img.entry, 0x10000u);
  ASSERT_TRUE(img.tohost());
  ASSERT_TRUE(img.symbols.count("result"));
  bool has_exec = false, has_data = false;
  for (const Segment& s : img.segments) {
    has_exec |= s.executable && !s.writable;
    has_data |= s.writable && !s.executable;
  }
  EXPECT_TRUE(has_exec);
  EXPECT_TRUE(has_data);

  isa::RunOptions opts;
  opts.keep_state = true;
  const auto r = isa::run_functional(img, 1000, opts);
  EXPECT_EQ(r.exit_code, 42);
  isa::ArchState s = *r.final_state;
  EXPECT_EQ(s.mem.read<uint64_t>(img.symbols.at("result").addr), 42u);
}

TEST(Elf, RejectsMalformedHeaders) {
  const std::vector<uint8_t> good = bytes_of(slurp(std::string(RVMB_FIXTURES) + "/minimal.elf"));
  auto code_of = [](std::vector<uint8_t> b) {
    try {
      load_elf(b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::EmptyInput;
  };
  auto patched = [&](std::size_t off, uint8_t v) {
    auto b = good;
    b[off] = v;
    return b;
  };
  EXPECT_EQ(code_of({}), ErrorCode::BadMagic);
  EXPECT_EQ(code_of(patched(1, 'X')), ErrorCode::BadMagic);
  EXPECT_EQ(code_of(patched(4, 1)), ErrorCode::WrongClass);   // ELFCLASS32
  EXPECT_EQ(code_of(patched(5, 2)), ErrorCode::WrongClass);   // big-endian
  EXPECT_EQ(code_of(patched(18, 62)), ErrorCode::WrongMachine);  // x86-64
  EXPECT_EQ(code_of(patched(16, 1)), ErrorCode::UnsupportedType);  // ET_REL
}

TEST(Elf, WriteLoadRoundTrip) {
  MemoryImage img = image_from_assembly(std::string("  li a0, 3\n") + kExit + "tohost: .dword 0\n", 0x20000, 128);
  img.symbols["output"] = Symbol{0x20040, 16};
  const MemoryImage back = load_elf(write_elf(img));
  EXPECT_EQ(back.entry, img.entry);
  ASSERT_EQ(back.segments.size(), 1u);
  EXPECT_EQ(back.segments[0].base, 0x20000u);
  EXPECT_EQ(back.segments[0].size, img.segments[0].size);
  EXPECT_EQ(back.segments[0].bytes, img.segments[0].bytes);
  EXPECT_EQ(back.symbols.at("output").size, 16u);
  EXPECT_EQ(back.tohost(), img.tohost());
  EXPECT_EQ(isa::run_functional(back, 100).digest, isa::run_functional(img, 100).digest);
}

TEST(MemoryImage, OverlapAndEntryChecks) {
  MemoryImage img;
  img.segments.push_back({0x1000, {}, 0x2000, false, true});
  img.segments.push_back({0x2000, {}, 0x1000, true, false});
  img.entry = 0x1000;
  try {
    img.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlappingSegments);
  }
  img.segments[1].base = 0x3000;
  EXPECT_NO_THROW(img.validate());
  img.entry = 0x3000;  // data segment
  EXPECT_THROW(img.validate(), Error);
}

TEST(MemoryImage, WritesToReadOnlySegmentFault) {
  MemoryImage img = image_from_assembly("  la t0, start\n  sw zero, 0(t0)\nstart: nop\n");
  img.segments[0].writable = false;
  try {
    isa::run_functional(img, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfBoundsAccess);
  }
}
