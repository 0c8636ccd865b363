#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>

namespace rvmb::isa::fp {

// RISC-V floating-point semantics on top of host IEEE arithmetic. The host
// rounding mode is left at round-to-nearest-even; results that are NaN are
// replaced by the RISC-V canonical NaN.

inline constexpr uint32_t kCanonicalNanS = 0x7fc00000u;
inline constexpr uint64_t kCanonicalNanD = 0x7ff8000000000000ull;
inline constexpr uint64_t kBoxMask = 0xffffffff00000000ull;

inline uint64_t box(float v) { return kBoxMask | std::bit_cast<uint32_t>(v); }
inline uint64_t box_bits(uint32_t bits) { return kBoxMask | bits; }

/// Reads a single from a float register; improperly boxed values read as
/// the canonical NaN.
inline float unbox(uint64_t reg) {
  if ((reg & kBoxMask) != kBoxMask) return std::bit_cast<float>(kCanonicalNanS);
  return std::bit_cast<float>(static_cast<uint32_t>(reg));
}
inline uint32_t unbox_bits(uint64_t reg) {
  return (reg & kBoxMask) == kBoxMask ? static_cast<uint32_t>(reg) : kCanonicalNanS;
}

inline float canon(float v) { return std::isnan(v) ? std::bit_cast<float>(kCanonicalNanS) : v; }
inline double canon(double v) { return std::isnan(v) ? std::bit_cast<double>(kCanonicalNanD) : v; }

template <typename T>
T fused(T a, T b, T c) {
  return canon(std::fma(a, b, c));
}

/// fmin/fmax: a single NaN operand yields the other operand, two NaNs yield
/// the canonical NaN, and -0 orders below +0.
template <typename T>
T min(T a, T b) {
  if (std::isnan(a) && std::isnan(b)) return canon(a);
  if (std::isnan(a)) return b;
  if (std::isnan(b)) return a;
  if (a == b) return std::signbit(a) ? a : b;
  return a < b ? a : b;
}

template <typename T>
T max(T a, T b) {
  if (std::isnan(a) && std::isnan(b)) return canon(a);
  if (std::isnan(a)) return b;
  if (std::isnan(b)) return a;
  if (a == b) return std::signbit(a) ? b : a;
  return a > b ? a : b;
}

template <typename T>
uint64_t classify(T v) {
  using Bits = std::conditional_t<std::is_same_v<T, float>, uint32_t, uint64_t>;
  const bool neg = std::signbit(v);
  switch (std::fpclassify(v)) {
    case FP_INFINITE: return neg ? 1u << 0 : 1u << 7;
    case FP_NORMAL: return neg ? 1u << 1 : 1u << 6;
    case FP_SUBNORMAL: return neg ? 1u << 2 : 1u << 5;
    case FP_ZERO: return neg ? 1u << 3 : 1u << 4;
    default: {
      constexpr Bits quiet = Bits{1} << (std::numeric_limits<T>::digits - 2);
      return (std::bit_cast<Bits>(v) & quiet) ? 1u << 9 : 1u << 8;
    }
  }
}

/// Rounds to an integral value according to a static rounding mode
/// (0 RNE, 1 RTZ, 2 RDN, 3 RUP, 4 RMM).
template <typename T>
T round_integral(T v, unsigned rm) {
  switch (rm) {
    case 1: return std::trunc(v);
    case 2: return std::floor(v);
    case 3: return std::ceil(v);
    case 4: return std::round(v);
    default: return std::nearbyint(v);
  }
}

/// Float to integer conversion with RISC-V saturation: NaN and +overflow
/// give the maximum, -overflow gives the minimum.
template <typename Int, typename T>
Int to_int(T v, unsigned rm) {
  if (std::isnan(v)) return std::numeric_limits<Int>::max();
  const T r = round_integral(v, rm);
  // 2^(digits) is exactly representable in both float and double.
  const T upper = std::ldexp(T{1}, std::numeric_limits<Int>::digits);
  if (r >= upper) return std::numeric_limits<Int>::max();
  if constexpr (std::is_signed_v<Int>) {
    if (r < -upper) return std::numeric_limits<Int>::min();
  } else {
    if (r < T{0}) return 0;
  }
  return static_cast<Int>(r);
}

}  // namespace rvmb::isa::fp
