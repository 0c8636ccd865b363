#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rvmb/error.hpp"

namespace rvmb::isa {

/// Byte writes to this address are captured as console output.
inline constexpr uint64_t kConsoleAddr = 0x1000'0000;

/// Sparse little-endian guest memory. Only addresses inside a mapped region
/// are accessible; mapping is tracked at 4 KiB granularity and backing pages
/// are allocated on first touch.
class SparseMemory {
 public:
  static constexpr uint64_t kPageBits = 12;
  static constexpr uint64_t kPageSize = uint64_t{1} << kPageBits;

  SparseMemory() = default;
  SparseMemory(const SparseMemory& other) { *this = other; }
  SparseMemory& operator=(const SparseMemory& other) {
    if (this == &other) return *this;
    regions_ = other.regions_;
    console_ = other.console_;
    pages_.clear();
    for (const auto& [num, page] : other.pages_) pages_.emplace(num, std::make_unique<Page>(*page));
    invalidate_cache();
    return *this;
  }
  SparseMemory(SparseMemory&&) noexcept = default;
  SparseMemory& operator=(SparseMemory&&) noexcept = default;

  void map(uint64_t base, uint64_t size, bool writable) {
    if (size == 0) return;
    regions_.push_back({base, size, writable});
    invalidate_cache();
  }

  bool is_mapped(uint64_t addr) const { return find_region(addr >> kPageBits) != nullptr; }

  template <typename T>
  T read(uint64_t addr) {
    const uint8_t* p = page_for(addr, false) + (addr & (kPageSize - 1));
    T value;
    std::memcpy(&value, p, sizeof(T));
    return value;
  }

  template <typename T>
  void write(uint64_t addr, T value) {
    if (addr == kConsoleAddr) {
      console_.push_back(static_cast<char>(static_cast<uint64_t>(value) & 0xff));
      return;
    }
    uint8_t* p = page_for(addr, true) + (addr & (kPageSize - 1));
    std::memcpy(p, &value, sizeof(T));
  }

  /// Copies bytes in without permission checks (image loading).
  void load_bytes(uint64_t addr, std::span<const uint8_t> bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
      const uint64_t a = addr + done;
      const std::size_t off = a & (kPageSize - 1);
      const std::size_t n = std::min<std::size_t>(kPageSize - off, bytes.size() - done);
      std::memcpy(page_for(a, false) + off, bytes.data() + done, n);
      done += n;
    }
  }

  std::vector<uint8_t> read_bytes(uint64_t addr, std::size_t size) {
    std::vector<uint8_t> out(size);
    std::size_t done = 0;
    while (done < size) {
      const uint64_t a = addr + done;
      const std::size_t off = a & (kPageSize - 1);
      const std::size_t n = std::min<std::size_t>(kPageSize - off, size - done);
      std::memcpy(out.data() + done, page_for(a, false) + off, n);
      done += n;
    }
    return out;
  }

  const std::string& console() const { return console_; }

  /// Touched pages, ordered by address, for whole-memory comparisons.
  std::vector<std::pair<uint64_t, const uint8_t*>> touched_pages() const {
    std::vector<std::pair<uint64_t, const uint8_t*>> out;
    out.reserve(pages_.size());
    for (const auto& [num, page] : pages_) out.emplace_back(num << kPageBits, page->data());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

 private:
  using Page = std::array<uint8_t, kPageSize>;
  struct Region {
    uint64_t base;
    uint64_t size;
    bool writable;
  };

  const Region* find_region(uint64_t page_num) const {
    for (const Region& r : regions_) {
      const uint64_t first = r.base >> kPageBits;
      const uint64_t last = (r.base + r.size - 1) >> kPageBits;
      if (page_num >= first && page_num <= last) return &r;
    }
    return nullptr;
  }

  bool granule_writable(uint64_t page_num) const {
    for (const Region& r : regions_) {
      const uint64_t first = r.base >> kPageBits;
      const uint64_t last = (r.base + r.size - 1) >> kPageBits;
      if (page_num >= first && page_num <= last && r.writable) return true;
    }
    return false;
  }

  uint8_t* page_for(uint64_t addr, bool for_write) {
    const uint64_t num = addr >> kPageBits;
    if (for_write) {
      if (num == write_cache_num_) return write_cache_page_;
    } else if (num == read_cache_num_) {
      return read_cache_page_;
    }
    if (find_region(num) == nullptr) {
      throw Error(ErrorCode::OutOfBoundsAccess, "address " + hex(addr) + " is not mapped");
    }
    if (for_write && !granule_writable(num)) {
      throw Error(ErrorCode::OutOfBoundsAccess, "address " + hex(addr) + " is read-only");
    }
    auto& slot = pages_[num];
    if (!slot) slot = std::make_unique<Page>(Page{});
    uint8_t* page = slot->data();
    read_cache_num_ = num;
    read_cache_page_ = page;
    if (for_write) {
      write_cache_num_ = num;
      write_cache_page_ = page;
    }
    return page;
  }

  void invalidate_cache() {
    read_cache_num_ = write_cache_num_ = ~uint64_t{0};
    read_cache_page_ = write_cache_page_ = nullptr;
  }

  static std::string hex(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
  }

  std::vector<Region> regions_;
  std::unordered_map<uint64_t, std::unique_ptr<Page>> pages_;
  std::string console_;
  uint64_t read_cache_num_ = ~uint64_t{0};
  uint8_t* read_cache_page_ = nullptr;
  uint64_t write_cache_num_ = ~uint64_t{0};
  uint8_t* write_cache_page_ = nullptr;
};

/// Architectural state of one hart. Float registers hold raw 64-bit
/// patterns; single-precision values are NaN-boxed.
struct ArchState {
  uint64_t pc = 0;
  std::array<uint64_t, 32> x{};
  std::array<uint64_t, 32> f{};
  SparseMemory mem;

  uint64_t reg(unsigned i) const { return i == 0 ? 0 : x[i]; }
  void set_reg(unsigned i, uint64_t v) {
    if (i != 0) x[i] = v;
  }
};

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void add(std::span<const uint8_t> bytes) {
    for (uint8_t b : bytes) {
      h_ ^= b;
      h_ *= 0x100000001b3ull;
    }
  }
  void add_u64(uint64_t v) {
    uint8_t b[8];
    std::memcpy(b, &v, 8);
    add(b);
  }
  uint64_t value() const { return h_; }

 private:
  uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace rvmb::isa
