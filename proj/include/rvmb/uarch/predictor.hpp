#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/isa/instruction.hpp"

namespace rvmb::uarch {

struct PredictorConfig {
  uint32_t pht_entries = 4096;
  uint32_t ghr_bits = 12;
  uint32_t ras_entries = 32;
  uint8_t counter_init = 1;  // weakly not-taken

  void validate() const {
    if (pht_entries == 0 || !std::has_single_bit(pht_entries)) {
      throw Error(ErrorCode::InvalidConfig, "pht_entries must be a power of two");
    }
    if (ghr_bits > 32) throw Error(ErrorCode::InvalidConfig, "ghr_bits must be <= 32");
    if (ras_entries == 0) throw Error(ErrorCode::InvalidConfig, "ras_entries must be >= 1");
    if (counter_init > 3) throw Error(ErrorCode::InvalidConfig, "counter_init must be in 0..3");
  }
};

struct PredictorStats {
  uint64_t predictions = 0;
  uint64_t mispredictions = 0;
  uint64_t ras_hits = 0;

  double accuracy() const {
    return predictions == 0 ? 1.0
                            : 1.0 - static_cast<double>(mispredictions) / static_cast<double>(predictions);
  }
  bool operator==(const PredictorStats&) const = default;
};

struct Prediction {
  bool taken = false;
  uint64_t target = 0;
};

/// Gshare direction predictor with a circular return address stack.
///
/// predict() must be followed by update() for the same instruction. JAL
/// is always predicted to its encoded target. A call (JAL/JALR with rd=x1)
/// pushes pc+4; a return (JALR rs1=x1, rd=x0) pops. Other JALRs predict
/// fall-through.
class GsharePredictor {
 public:
  explicit GsharePredictor(const PredictorConfig& cfg = {})
      : cfg_((cfg.validate(), cfg)), pht_(cfg.pht_entries, cfg.counter_init), ras_(cfg.ras_entries, 0) {}

  Prediction predict(uint64_t pc, const isa::Instruction& instr) {
    using M = isa::Mnemonic;
    ++stats_.predictions;
    pending_ = Pending{};
    pending_.valid = true;
    pending_.conditional = isa::classify(instr) == isa::InstrClass::Branch;
    Prediction p{false, pc + 4};
    if (pending_.conditional) {
      pending_.index = index(pc);
      p.taken = pht_[pending_.index] >= 2;
      if (p.taken) p.target = pc + static_cast<uint64_t>(instr.imm);
    } else if (instr.mnemonic == M::JAL) {
      p = {true, pc + static_cast<uint64_t>(instr.imm)};
    } else if (instr.mnemonic == M::JALR && instr.rs1 == 1 && instr.rd == 0) {
      pending_.is_return = true;
      if (ras_depth_ == 0) {
        pending_.underflow = true;
      } else {
        ras_top_ = (ras_top_ + cfg_.ras_entries - 1) % cfg_.ras_entries;
        --ras_depth_;
        p = {true, ras_[ras_top_]};
      }
    }
    if ((instr.mnemonic == M::JAL || instr.mnemonic == M::JALR) && instr.rd == 1) {
      ras_[ras_top_] = pc + 4;
      ras_top_ = (ras_top_ + 1) % cfg_.ras_entries;
      if (ras_depth_ < cfg_.ras_entries) ++ras_depth_;
    }
    pending_.prediction = p;
    return p;
  }

  /// Trains on the resolved outcome of the last predicted instruction.
  /// Returns true if it was mispredicted.
  bool update(uint64_t pc, bool taken, uint64_t target) {
    (void)pc;
    const Pending p = pending_;
    pending_.valid = false;
    if (!p.valid) return false;
    bool wrong = false;
    if (p.conditional) {
      wrong = p.prediction.taken != taken;
      uint8_t& c = pht_[p.index];
      if (taken && c < 3) ++c;
      if (!taken && c > 0) --c;
      ghr_ = ((ghr_ << 1) | (taken ? 1u : 0u)) & ghr_mask();
    } else {
      wrong = p.underflow || p.prediction.target != target;
      if (p.is_return && !wrong) ++stats_.ras_hits;
    }
    if (wrong) ++stats_.mispredictions;
    return wrong;
  }

  /// predict + update in one step; returns true on a misprediction.
  bool resolve(uint64_t pc, const isa::Instruction& instr, uint64_t next_pc) {
    predict(pc, instr);
    return update(pc, next_pc != pc + 4, next_pc);
  }

  uint32_t index(uint64_t pc) const {
    return static_cast<uint32_t>(((pc >> 2) ^ ghr_) & (cfg_.pht_entries - 1));
  }
  uint8_t counter(uint64_t pc) const { return pht_[index(pc)]; }
  uint8_t counter_at(uint32_t idx) const { return pht_[idx]; }
  uint32_t ghr() const { return ghr_; }
  uint32_t ras_depth() const { return ras_depth_; }
  const PredictorStats& stats() const { return stats_; }
  const PredictorConfig& config() const { return cfg_; }

 private:
  struct Pending {
    bool valid = false;
    bool conditional = false;
    bool is_return = false;
    bool underflow = false;
    uint32_t index = 0;
    Prediction prediction;
  };

  uint32_t ghr_mask() const { return cfg_.ghr_bits >= 32 ? ~0u : (1u << cfg_.ghr_bits) - 1; }

  PredictorConfig cfg_;
  std::vector<uint8_t> pht_;
  std::vector<uint64_t> ras_;
  uint32_t ras_top_ = 0;
  uint32_t ras_depth_ = 0;
  uint32_t ghr_ = 0;
  Pending pending_;
  PredictorStats stats_;
};

}  // namespace rvmb::uarch
