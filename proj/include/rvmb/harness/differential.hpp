#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/harness/config.hpp"
#include "rvmb/harness/runner.hpp"
#include "rvmb/isa/functional.hpp"

namespace rvmb::harness {

/// Bytes covered by the functional digest: x1..x31 and f0..f31 as
/// little-endian 64-bit words, then the output region.
inline std::vector<uint8_t> digest_bytes(const isa::FunctionalResult& r) {
  std::vector<uint8_t> out;
  out.reserve(63 * 8 + r.output.size());
  auto put = [&out](uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
  };
  for (unsigned i = 1; i < 32; ++i) put(r.x[i]);
  for (unsigned i = 0; i < 32; ++i) put(r.f[i]);
  out.insert(out.end(), r.output.begin(), r.output.end());
  return out;
}

/// Human-readable location of a byte offset in digest_bytes().
inline std::string describe_offset(uint64_t offset) {
  if (offset < 31 * 8) return "x" + std::to_string(offset / 8 + 1) + " byte " + std::to_string(offset % 8);
  if (offset < 63 * 8) return "f" + std::to_string((offset - 31 * 8) / 8) + " byte " + std::to_string(offset % 8);
  return "output byte " + std::to_string(offset - 63 * 8);
}

struct DiffVerdict {
  bool pass = false;
  std::vector<std::string> models;
  std::vector<uint64_t> digests;
  /// First byte of digest_bytes() where some model disagrees with the first.
  std::optional<uint64_t> first_divergent_offset;
  std::string location;
  std::vector<int> values_at_offset;  // per model; -1 past the end
};

/// Per-model run options; the hook lets tests inject faults into one model.
using OptionsFor = std::function<isa::RunOptions(const std::string& model)>;

inline DiffVerdict differential(const Workload& w, const std::vector<std::string>& models, const RunConfig& cfg,
                                const OptionsFor& options = {}) {
  if (models.size() < 2) throw Error(ErrorCode::InvalidConfig, "differential needs at least two models");
  DiffVerdict v;
  v.models = models;
  std::vector<std::vector<uint8_t>> bytes;
  for (const std::string& m : models) {
    const uarch::Simulation sim = simulate(m, w, cfg, options ? options(m) : isa::RunOptions{});
    v.digests.push_back(sim.functional.digest);
    bytes.push_back(digest_bytes(sim.functional));
  }
  v.pass = true;
  for (std::size_t i = 1; i < bytes.size(); ++i) v.pass &= bytes[i] == bytes[0] && v.digests[i] == v.digests[0];
  if (v.pass) return v;

  std::size_t longest = 0;
  for (const auto& b : bytes) longest = std::max(longest, b.size());
  for (std::size_t off = 0; off < longest; ++off) {
    const int ref = off < bytes[0].size() ? bytes[0][off] : -1;
    bool differs = false;
    for (const auto& b : bytes) differs |= (off < b.size() ? b[off] : -1) != ref;
    if (differs) {
      v.first_divergent_offset = off;
      v.location = describe_offset(off);
      for (const auto& b : bytes) v.values_at_offset.push_back(off < b.size() ? b[off] : -1);
      break;
    }
  }
  return v;
}

inline DiffVerdict differential(const std::string& benchmark, const std::vector<std::string>& models,
                                const RunConfig& cfg, const OptionsFor& options = {}) {
  if (models.size() < 2) throw Error(ErrorCode::InvalidConfig, "differential needs at least two models");
  return differential(prepare(benchmark, cfg.seed, cfg.limit), models, cfg, options);
}

}  // namespace rvmb::harness
