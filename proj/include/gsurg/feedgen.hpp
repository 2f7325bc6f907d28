//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <vector>

#include "gsurg/float16.hpp"
#include "gsurg/graph.hpp"
#include "gsurg/interpreter.hpp"

namespace gsurg {

// splitmix64: tiny, seedable, identical output on every platform. The
// standard <random> distributions are implementation-defined, which would
// break byte-reproducible reports.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [-1, 1)
  float uniform_pm1() { return static_cast<float>(uniform() * 2.0 - 1.0); }

  // uniform in [lo, hi)
  double uniform_in(double lo, double hi) { return lo + uniform() * (hi - lo); }

  uint64_t below(uint64_t n) { return n ? next_u64() % n : 0; }

 private:
  uint64_t state_;
};

// Random tensor matching a ValueInfo, elements uniform in [-1, 1). Integral
// dtypes get the value rounded onto the int grid; F16 gets the nearest-even
// half of the drawn value.
inline Tensor random_tensor(const ValueInfo& vi, Rng& rng) {
  const int64_t n = shape_num_elements(vi.shape);
  switch (vi.dtype) {
    case DType::kF32: {
      std::vector<float> data(static_cast<size_t>(n));
      for (auto& v : data) v = rng.uniform_pm1();
      return Tensor::f32(vi.shape, std::move(data));
    }
    case DType::kF16: {
      std::vector<uint16_t> data(static_cast<size_t>(n));
      for (auto& v : data) v = f32_to_f16(rng.uniform_pm1());
      return Tensor::f16(vi.shape, std::move(data));
    }
    case DType::kI8: {
      std::vector<int8_t> data(static_cast<size_t>(n));
      for (auto& v : data)
        v = static_cast<int8_t>(static_cast<int>(rng.uniform_pm1() * 127.0f));
      return Tensor::i8(vi.shape, std::move(data));
    }
    case DType::kI32: {
      std::vector<int32_t> data(static_cast<size_t>(n));
      for (auto& v : data)
        v = static_cast<int32_t>(rng.uniform_pm1() * 127.0f);
      return Tensor::i32(vi.shape, std::move(data));
    }
  }
  throw DomainError("random_tensor: unknown dtype");
}

inline FeedMap random_feeds(const std::vector<ValueInfo>& inputs, Rng& rng) {
  FeedMap feeds;
  for (const ValueInfo& vi : inputs) feeds.emplace(vi.name, random_tensor(vi, rng));
  return feeds;
}

inline std::vector<FeedMap> random_feed_set(const std::vector<ValueInfo>& inputs,
                                            uint64_t seed, int n_samples) {
  Rng rng(seed);
  std::vector<FeedMap> set;
  set.reserve(static_cast<size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) set.push_back(random_feeds(inputs, rng));
  return set;
}

}  // namespace gsurg
