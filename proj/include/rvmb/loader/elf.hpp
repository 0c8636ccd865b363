#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "rvmb/error.hpp"
#include "rvmb/loader/memory_image.hpp"

namespace rvmb::loader {

namespace elf {

inline constexpr uint16_t kMachineRiscv = 243;
inline constexpr uint16_t kTypeExec = 2;
inline constexpr uint32_t kPtLoad = 1;
inline constexpr uint32_t kShtSymtab = 2;
inline constexpr uint32_t kPfX = 1;
inline constexpr uint32_t kPfW = 2;
inline constexpr uint32_t kPfR = 4;

struct Reader {
  std::span<const uint8_t> bytes;

  template <typename T>
  T get(uint64_t off) const {
    if (off > bytes.size() || sizeof(T) > bytes.size() - off) {
      throw Error(ErrorCode::OutOfBoundsAccess, "ELF read past end of file at offset " + std::to_string(off));
    }
    T v{};
    std::memcpy(&v, bytes.data() + off, sizeof(T));
    return v;
  }

  std::span<const uint8_t> range(uint64_t off, uint64_t len) const {
    if (off > bytes.size() || len > bytes.size() - off) {
      throw Error(ErrorCode::OutOfBoundsAccess, "ELF range past end of file");
    }
    return bytes.subspan(off, len);
  }

  std::string cstr(uint64_t off) const {
    std::string s;
    while (off < bytes.size() && bytes[off] != 0) s.push_back(static_cast<char>(bytes[off++]));
    return s;
  }
};

}  // namespace elf

/// Loads a little-endian ELF64 RISC-V executable. Every PT_LOAD segment is
/// mapped; symbols from .symtab (when present) become image symbols.
inline MemoryImage load_elf(std::span<const uint8_t> bytes) {
  elf::Reader r{bytes};
  if (bytes.size() < 16 || bytes[0] != 0x7f || bytes[1] != 'E' || bytes[2] != 'L' || bytes[3] != 'F') {
    throw Error(ErrorCode::BadMagic, "missing ELF magic");
  }
  if (bytes[4] != 2) throw Error(ErrorCode::WrongClass, "not a 64-bit ELF (class " + std::to_string(bytes[4]) + ")");
  if (bytes[5] != 1) throw Error(ErrorCode::WrongClass, "not a little-endian ELF");
  if (bytes.size() < 64) throw Error(ErrorCode::BadMagic, "truncated ELF header");
  const auto type = r.get<uint16_t>(16);
  const auto machine = r.get<uint16_t>(18);
  if (machine != elf::kMachineRiscv) throw Error(ErrorCode::WrongMachine, "machine " + std::to_string(machine));
  if (type != elf::kTypeExec) throw Error(ErrorCode::UnsupportedType, "ELF type " + std::to_string(type));

  MemoryImage image;
  image.entry = r.get<uint64_t>(24);
  const auto phoff = r.get<uint64_t>(32);
  const auto shoff = r.get<uint64_t>(40);
  const auto phentsize = r.get<uint16_t>(54);
  const auto phnum = r.get<uint16_t>(56);
  const auto shentsize = r.get<uint16_t>(58);
  const auto shnum = r.get<uint16_t>(60);

  for (uint16_t i = 0; i < phnum; ++i) {
    const uint64_t ph = phoff + uint64_t{i} * phentsize;
    if (r.get<uint32_t>(ph) != elf::kPtLoad) continue;
    const auto flags = r.get<uint32_t>(ph + 4);
    const auto offset = r.get<uint64_t>(ph + 8);
    const auto vaddr = r.get<uint64_t>(ph + 16);
    const auto filesz = r.get<uint64_t>(ph + 32);
    const auto memsz = r.get<uint64_t>(ph + 40);
    if (filesz > memsz) throw Error(ErrorCode::UnsupportedType, "PT_LOAD with filesz > memsz");
    if (memsz == 0) continue;
    Segment seg;
    seg.base = vaddr;
    auto content = r.range(offset, filesz);
    seg.bytes.assign(content.begin(), content.end());
    seg.size = memsz;
    seg.writable = (flags & elf::kPfW) != 0;
    seg.executable = (flags & elf::kPfX) != 0;
    image.segments.push_back(std::move(seg));
  }

  for (uint16_t i = 0; i < shnum && shoff != 0; ++i) {
    const uint64_t sh = shoff + uint64_t{i} * shentsize;
    if (r.get<uint32_t>(sh + 4) != elf::kShtSymtab) continue;
    const auto sym_off = r.get<uint64_t>(sh + 24);
    const auto sym_size = r.get<uint64_t>(sh + 32);
    const auto link = r.get<uint32_t>(sh + 40);
    const auto entsize = r.get<uint64_t>(sh + 56);
    if (link >= shnum || entsize < 24) continue;
    const auto str_off = r.get<uint64_t>(shoff + uint64_t{link} * shentsize + 24);
    for (uint64_t s = entsize; s + entsize <= sym_size; s += entsize) {
      const uint64_t e = sym_off + s;
      const auto name_idx = r.get<uint32_t>(e);
      const auto shndx = r.get<uint16_t>(e + 6);
      if (name_idx == 0 || shndx == 0) continue;
      std::string name = r.cstr(str_off + name_idx);
      if (name.empty()) continue;
      image.symbols.emplace(std::move(name), Symbol{r.get<uint64_t>(e + 8), r.get<uint64_t>(e + 16)});
    }
  }

  image.validate();
  return image;
}

/// Serializes an image as a minimal ELF64 executable: one PT_LOAD per
/// segment plus a .symtab/.strtab pair for the symbols.
inline std::vector<uint8_t> write_elf(const MemoryImage& image) {
  std::vector<uint8_t> out(64, 0);
  auto put = [&out](uint64_t off, auto v) {
    if (out.size() < off + sizeof(v)) out.resize(off + sizeof(v));
    std::memcpy(out.data() + off, &v, sizeof(v));
  };
  const uint8_t ident[16] = {0x7f, 'E', 'L', 'F', 2, 1, 1, 0};
  std::memcpy(out.data(), ident, 16);
  put(16, uint16_t{elf::kTypeExec});
  put(18, elf::kMachineRiscv);
  put(20, uint32_t{1});
  put(24, image.entry);
  put(32, uint64_t{64});
  put(52, uint16_t{64});
  put(54, uint16_t{56});
  put(56, static_cast<uint16_t>(image.segments.size()));

  const uint64_t ph_base = 64;
  uint64_t data = ph_base + 56 * image.segments.size();
  for (std::size_t i = 0; i < image.segments.size(); ++i) {
    const Segment& s = image.segments[i];
    data = (data + 7) & ~uint64_t{7};
    const uint64_t ph = ph_base + 56 * i;
    uint32_t flags = elf::kPfR | (s.writable ? elf::kPfW : 0) | (s.executable ? elf::kPfX : 0);
    put(ph, elf::kPtLoad);
    put(ph + 4, flags);
    put(ph + 8, data);
    put(ph + 16, s.base);
    put(ph + 24, s.base);
    put(ph + 32, static_cast<uint64_t>(s.bytes.size()));
    put(ph + 40, s.size);
    put(ph + 48, uint64_t{8});
    if (out.size() < data) out.resize(data);
    out.insert(out.end(), s.bytes.begin(), s.bytes.end());
    data = out.size();
  }

  // .strtab then .symtab then section headers: null, symtab, strtab.
  std::vector<uint8_t> strtab{0};
  std::vector<uint8_t> symtab(24, 0);
  for (const auto& [name, sym] : image.symbols) {
    const auto name_idx = static_cast<uint32_t>(strtab.size());
    strtab.insert(strtab.end(), name.begin(), name.end());
    strtab.push_back(0);
    uint8_t e[24] = {};
    std::memcpy(e, &name_idx, 4);
    e[4] = 0x10;  // STB_GLOBAL, STT_NOTYPE
    const uint16_t shndx = 0xfff1;  // SHN_ABS
    std::memcpy(e + 6, &shndx, 2);
    std::memcpy(e + 8, &sym.addr, 8);
    std::memcpy(e + 16, &sym.size, 8);
    symtab.insert(symtab.end(), e, e + 24);
  }
  const uint64_t str_off = out.size();
  out.insert(out.end(), strtab.begin(), strtab.end());
  while (out.size() % 8) out.push_back(0);
  const uint64_t sym_off = out.size();
  out.insert(out.end(), symtab.begin(), symtab.end());
  const uint64_t sh_off = out.size();
  out.resize(sh_off + 3 * 64, 0);
  const uint64_t sh1 = sh_off + 64;
  put(sh1 + 4, elf::kShtSymtab);
  put(sh1 + 24, sym_off);
  put(sh1 + 32, static_cast<uint64_t>(symtab.size()));
  put(sh1 + 40, uint32_t{2});
  put(sh1 + 44, uint32_t{1});
  put(sh1 + 56, uint64_t{24});
  const uint64_t sh2 = sh_off + 128;
  put(sh2 + 4, uint32_t{3});  // SHT_STRTAB
  put(sh2 + 24, str_off);
  put(sh2 + 32, static_cast<uint64_t>(strtab.size()));
  put(40, sh_off);
  put(58, uint16_t{64});
  put(60, uint16_t{3});
  return out;
}

}  // namespace rvmb::loader
