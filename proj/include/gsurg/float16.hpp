//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <bit>
#include <cstdint>

namespace gsurg {

// IEEE 754 binary16 <-> binary32 conversion on raw bit patterns. Widening is
// exact for every half value; narrowing rounds to nearest-even.

inline float f16_to_f32(uint16_t h) {
  const uint32_t sign = (static_cast<uint32_t>(h) & 0x8000u) << 16;
  const uint32_t exp = (h >> 10) & 0x1fu;
  uint32_t man = h & 0x3ffu;
  uint32_t bits;
  if (exp == 0) {
    if (man == 0) {
      bits = sign;  // signed zero
    } else {
      // subnormal half: renormalize into the f32 exponent range
      int shift = 0;
      while (!(man & 0x400u)) {
        man <<= 1;
        ++shift;
      }
      bits = sign | (static_cast<uint32_t>(113 - shift) << 23) |
             ((man & 0x3ffu) << 13);
    }
  } else if (exp == 0x1fu) {
    bits = sign | 0x7f800000u | (man << 13);  // inf / nan
  } else {
    bits = sign | ((exp + 112u) << 23) | (man << 13);
  }
  return std::bit_cast<float>(bits);
}

inline uint16_t f32_to_f16(float value) {
  const uint32_t bits = std::bit_cast<uint32_t>(value);
  const uint16_t sign = static_cast<uint16_t>((bits >> 16) & 0x8000u);
  const int32_t exp = static_cast<int32_t>((bits >> 23) & 0xffu);
  uint32_t man = bits & 0x7fffffu;

  if (exp == 0xff) {
    // inf stays inf; any nan keeps at least one mantissa bit
    if (man == 0) return sign | 0x7c00u;
    return static_cast<uint16_t>(sign | 0x7e00u | (man >> 13));
  }

  const int32_t half_exp = exp - 127 + 15;
  if (half_exp >= 0x1f) return sign | 0x7c00u;  // overflow -> inf

  if (half_exp <= 0) {
    if (half_exp < -10) return sign;  // underflow -> signed zero
    man |= 0x800000u;
    const uint32_t shift = static_cast<uint32_t>(14 - half_exp);
    uint16_t half = static_cast<uint16_t>(man >> shift);
    const uint32_t rem = man & ((1u << shift) - 1u);
    const uint32_t halfway = 1u << (shift - 1u);
    if (rem > halfway || (rem == halfway && (half & 1u))) ++half;
    return sign | half;  // carry rolls into the smallest normal, as intended
  }

  uint16_t half =
      static_cast<uint16_t>(sign | (half_exp << 10) | (man >> 13));
  const uint32_t rem = man & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;
  return half;  // carry may round up to inf, which is correct nearest-even
}

}  // namespace gsurg
