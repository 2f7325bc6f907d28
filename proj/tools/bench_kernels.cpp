//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Times the serial reference kernels against the OpenMP versions on
// conv/matmul/elementwise workloads and checks the outputs stay bit-equal.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gsurg/feedgen.hpp"
#include "gsurg/kernels.hpp"
#include "gsurg/surgery.hpp"
#include "gsurg/tensor.hpp"

using namespace gsurg;

namespace {

Tensor random_f32(std::vector<int64_t> shape, Rng& rng) {
  return random_tensor(ValueInfo{"t", DType::kF32, std::move(shape)}, rng);
}

double time_ms(const std::function<Tensor()>& fn, int reps, Tensor* result) {
  *result = fn();  // warmup, and the value used for the bit comparison
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    Tensor t = fn();
    // touch the buffer so the call cannot be optimized away
    if (t.byte_size() > 0 && t.raw()[0] == 0xfe) std::fputs("", stdout);
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void bench(const std::string& name, const std::function<Tensor()>& serial_fn,
           const std::function<Tensor()>& parallel_fn, int reps) {
  Tensor serial_out, parallel_out;
  const double serial_ms = time_ms(serial_fn, reps, &serial_out);
  const double parallel_ms = time_ms(parallel_fn, reps, &parallel_out);
  const bool equal = serial_out == parallel_out;
  std::printf("%-24s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n",
              name.c_str(), serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "bit-equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d, reps %d\n", omp_get_max_threads(),
              reps);
#else
  std::printf("built without OpenMP; both columns run serially (reps %d)\n",
              reps);
#endif

  Rng rng(7);
  const Tensor conv_data = random_f32({1, 64, 64, 32}, rng);
  const Tensor conv_filter = random_f32({3, 3, 32, 64}, rng);
  const Tensor pad_filter = build_identity_pad_filter(32, 0, 64);
  const Tensor a = random_f32({256, 256}, rng);
  const Tensor b = random_f32({256, 256}, rng);
  const Tensor big = random_f32({1 << 22}, rng);
  const Tensor big2 = random_f32({1 << 22}, rng);

  bench(
      "conv2d 3x3 64x64x32->64",
      [&] {
        return kernels::serial::conv2d(conv_data, conv_filter, nullptr, 1, 1,
                                       PaddingScheme::kSame);
      },
      [&] {
        return kernels::parallel::conv2d(conv_data, conv_filter, nullptr, 1, 1,
                                         PaddingScheme::kSame);
      },
      reps);
  bench(
      "conv2d 1x1 identity-pad",
      [&] {
        return kernels::serial::conv2d(conv_data, pad_filter, nullptr, 1, 1,
                                       PaddingScheme::kValid);
      },
      [&] {
        return kernels::parallel::conv2d(conv_data, pad_filter, nullptr, 1, 1,
                                         PaddingScheme::kValid);
      },
      reps);
  bench(
      "matmul 256x256x256", [&] { return kernels::serial::matmul(a, b); },
      [&] { return kernels::parallel::matmul(a, b); }, reps);
  bench(
      "sigmoid 4M", [&] { return kernels::serial::sigmoid(big); },
      [&] { return kernels::parallel::sigmoid(big); }, reps);
  bench(
      "add 4M", [&] { return kernels::serial::add(big, big2); },
      [&] { return kernels::parallel::add(big, big2); }, reps);
  return 0;
}
