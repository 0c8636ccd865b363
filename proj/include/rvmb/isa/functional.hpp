#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/arch_state.hpp"
#include "rvmb/isa/codec.hpp"
#include "rvmb/isa/execute.hpp"
#include "rvmb/loader/exit.hpp"
#include "rvmb/loader/memory_image.hpp"

namespace rvmb::isa {

using ClassCounts = std::array<uint64_t, kClassCount>;

struct FunctionalResult {
  uint64_t digest = 0;  // integer + float register files and output region
  ClassCounts instr_counts{};
  uint64_t total_instrs = 0;
  int64_t exit_code = 0;
  std::optional<std::vector<TraceEvent>> trace;
  std::vector<uint8_t> output;
  std::array<uint64_t, 32> x{};
  std::array<uint64_t, 32> f{};
  std::string console;
  std::shared_ptr<const ArchState> final_state;  // only with RunOptions::keep_state

  uint64_t count(InstrClass c) const { return instr_counts[static_cast<std::size_t>(c)]; }
};

/// What a trace sink sees for each committed instruction.
struct Commit {
  const Instruction& instr;
  const TraceEvent& event;
  uint64_t next_pc;
};

struct RunOptions {
  bool record_trace = false;
  bool keep_state = false;
  /// Streaming observer for every committed event.
  std::function<void(const TraceEvent&)> on_event;
  /// Called after each instruction executes, before exit checks. Used to
  /// build fault-injected models in tests.
  std::function<void(ArchState&, const Instruction&, uint64_t seq)> after_step;
};

inline uint64_t state_digest(const ArchState& s, std::span<const uint8_t> output) {
  Fnv1a h;
  for (unsigned i = 1; i < 32; ++i) h.add_u64(s.x[i]);
  for (unsigned i = 0; i < 32; ++i) h.add_u64(s.f[i]);
  h.add_u64(output.size());
  h.add(output);
  return h.value();
}

namespace detail {

/// Decoded instructions for the executable segments, keyed by pc.
class DecodeCache {
 public:
  explicit DecodeCache(const loader::MemoryImage& image) {
    for (const loader::Segment& seg : image.segments) {
      if (seg.executable) ranges_.push_back({seg.base, seg.end(), std::vector<Slot>((seg.size + 3) / 4)});
    }
  }

  const Instruction& fetch(ArchState& s) {
    for (Range& r : ranges_) {
      if (s.pc >= r.begin && s.pc < r.end) {
        Slot& slot = r.slots[(s.pc - r.begin) >> 2];
        if (!slot.valid) {
          slot.instr = decode(s.mem.read<uint32_t>(s.pc));
          slot.valid = true;
        }
        return slot.instr;
      }
    }
    throw Error(ErrorCode::OutOfBoundsAccess, "instruction fetch outside executable segments", s.pc);
  }

  void invalidate(uint64_t addr, unsigned size) {
    for (Range& r : ranges_) {
      if (addr + size > r.begin && addr < r.end) {
        for (uint64_t a = addr & ~uint64_t{3}; a < addr + size; a += 4) {
          if (a >= r.begin && a < r.end) r.slots[(a - r.begin) >> 2].valid = false;
        }
      }
    }
  }

 private:
  struct Slot {
    Instruction instr;
    bool valid = false;
  };
  struct Range {
    uint64_t begin;
    uint64_t end;
    std::vector<Slot> slots;
  };
  std::vector<Range> ranges_;
};

}  // namespace detail

/// Runs `image` from `entry` on the functional model, handing every commit
/// to `sink` in program order. Timing models are sinks over this loop, so
/// every model shares one architectural ground truth.
template <typename Sink>
FunctionalResult execute(const loader::MemoryImage& image, uint64_t entry, uint64_t limit, const RunOptions& opts,
                         Sink&& sink) {
  ArchState s = image.materialize();
  s.pc = entry;
  detail::DecodeCache cache(image);
  const std::optional<uint64_t> tohost = image.tohost();

  FunctionalResult result;
  if (opts.record_trace) result.trace.emplace();

  std::optional<int64_t> exit_code;
  uint64_t seq = 0;
  while (!exit_code) {
    if (seq >= limit) {
      throw Error(ErrorCode::LimitExceeded, "no exit within " + std::to_string(limit) + " instructions", s.pc);
    }
    const Instruction& instr = cache.fetch(s);
    const TraceEvent ev = step(s, instr, seq);
    if (opts.after_step) opts.after_step(s, instr, seq);
    if (ev.mem && ev.mem->is_write) cache.invalidate(ev.mem->addr, ev.mem->size);
    ++result.instr_counts[static_cast<std::size_t>(ev.cls)];
    ++seq;

    if (instr.mnemonic == Mnemonic::ECALL || ev.mem) {
      exit_code = loader::exit_check(s, instr, tohost);
      if (!exit_code && instr.mnemonic == Mnemonic::ECALL) {
        throw Error(ErrorCode::UnsupportedSyscall, "ecall with a7=" + std::to_string(s.reg(17)), ev.pc);
      }
    }
    if (opts.on_event) opts.on_event(ev);
    if (result.trace) result.trace->push_back(ev);
    sink(Commit{instr, ev, s.pc});
  }

  result.total_instrs = seq;
  result.exit_code = *exit_code;
  if (auto out = image.output(); out && out->size > 0) result.output = s.mem.read_bytes(out->addr, out->size);
  result.x = s.x;
  result.x[0] = 0;
  result.f = s.f;
  result.console = s.mem.console();
  result.digest = state_digest(s, result.output);
  if (opts.keep_state) result.final_state = std::make_shared<const ArchState>(std::move(s));
  return result;
}

inline FunctionalResult run_functional(const loader::MemoryImage& image, uint64_t entry, uint64_t limit,
                                       const RunOptions& opts = {}) {
  return execute(image, entry, limit, opts, [](const Commit&) {});
}

inline FunctionalResult run_functional(const loader::MemoryImage& image, uint64_t limit,
                                       const RunOptions& opts = {}) {
  return run_functional(image, image.entry, limit, opts);
}

}  // namespace rvmb::isa
