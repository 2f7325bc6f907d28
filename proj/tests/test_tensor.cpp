//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsurg/feedgen.hpp"
#include "gsurg/float16.hpp"
#include "gsurg/tensor.hpp"

using namespace gsurg;

TEST_CASE("tensor construction checks shape against data length") {
  CHECK_NOTHROW(Tensor::f32({2, 3}, std::vector<float>(6, 0.0f)));
  CHECK_THROWS_AS(Tensor::f32({2, 3}, std::vector<float>(5, 0.0f)), DomainError);
  CHECK(Tensor::scalar_f32(2.5f).rank() == 0);
  CHECK(Tensor::scalar_f32(2.5f).num_elements() == 1);
  CHECK_THROWS_AS(Tensor::f32({-1}, {}), DomainError);
}

TEST_CASE("quantize_affine matches the affine formula") {
  const QuantParams qp{1.0 / 255.0, -128};
  const Tensor t = Tensor::f32({3}, {0.0f, 1.0f, 10.0f});
  const Tensor q = quantize_affine(t, qp);
  CHECK(q.i8_data()[0] == -128);  // zero maps to the zero point
  CHECK(q.i8_data()[1] == 127);   // round(255) - 128
  CHECK(q.i8_data()[2] == 127);   // clamp saturates

  CHECK_THROWS_AS(quantize_affine(Tensor::i8({1}, {0}), qp), DTypeError);
}

TEST_CASE("quantize rounds half away from zero") {
  const QuantParams qp{1.0, 0};
  const Tensor t = Tensor::f32({4}, {0.5f, -0.5f, 1.5f, -1.5f});
  const Tensor qt = quantize_affine(t, qp);
  const auto q = qt.i8_data();
  CHECK(q[0] == 1);
  CHECK(q[1] == -1);
  CHECK(q[2] == 2);
  CHECK(q[3] == -2);
}

TEST_CASE("dequantize_affine inverts the affine map") {
  const QuantParams qp{1.0 / 255.0, -128};
  const Tensor q = Tensor::i8({2}, {-128, 127});
  const Tensor x = dequantize_affine(q, qp);
  CHECK(x.f32_data()[0] == 0.0f);
  CHECK(x.f32_data()[1] == 1.0f);

  const Tensor q2 = Tensor::i8({1}, {0});
  CHECK(dequantize_affine(q2, QuantParams{2.0, 0}).f32_data()[0] == 0.0f);
  CHECK_THROWS_AS(dequantize_affine(Tensor::f32({1}, {0.f}), qp), DTypeError);
}

TEST_CASE("compute_qparams asymmetric and symmetric") {
  const QuantParams asym = compute_qparams(0.0, 1.0, QuantMode::kAsymmetric);
  CHECK(asym.scale == doctest::Approx(1.0 / 255.0).epsilon(1e-12));
  CHECK(asym.zero_point == -128);

  const QuantParams degenerate = compute_qparams(0.0, 0.0, QuantMode::kAsymmetric);
  CHECK(degenerate.scale == 1.0);
  CHECK(degenerate.zero_point == 0);

  const QuantParams sym = compute_qparams(-1.0, 1.0, QuantMode::kSymmetric);
  CHECK(sym.scale == doctest::Approx(1.0 / 127.0).epsilon(1e-12));
  CHECK(sym.zero_point == 0);

  // ranges that exclude zero get widened to include it
  const QuantParams widened = compute_qparams(0.5, 1.0, QuantMode::kAsymmetric);
  CHECK(widened.scale == doctest::Approx(1.0 / 255.0).epsilon(1e-12));

  CHECK_THROWS_AS(compute_qparams(1.0, 0.0, QuantMode::kAsymmetric), DomainError);
  CHECK_THROWS_AS(compute_qparams(std::nan(""), 1.0, QuantMode::kAsymmetric),
                  DomainError);
}

TEST_CASE("quant params validate") {
  CHECK_THROWS_AS(QuantParams(0.0, 0), DomainError);
  CHECK_THROWS_AS(QuantParams(-1.0, 0), DomainError);
  CHECK_THROWS_AS(QuantParams(1.0, 200), DomainError);
}

TEST_CASE("cast_f16_to_f32 on known values") {
  const Tensor t = Tensor::f16({3}, {f32_to_f16(1.0f), f32_to_f16(0.5f), 0x7e00});
  const Tensor f = cast_f16_to_f32(t);
  CHECK(f.f32_data()[0] == 1.0f);
  CHECK(f.f32_data()[1] == 0.5f);
  CHECK(std::isnan(f.f32_data()[2]));
  CHECK_THROWS_AS(cast_f16_to_f32(Tensor::f32({1}, {0.f})), DTypeError);
}

TEST_CASE("f16 widening is exact for every bit pattern") {
  // every finite half value must survive f16 -> f32 -> f16 unchanged
  for (uint32_t bits = 0; bits <= 0xffff; ++bits) {
    const uint16_t h = static_cast<uint16_t>(bits);
    const float f = f16_to_f32(h);
    const bool is_nan = ((h >> 10) & 0x1f) == 0x1f && (h & 0x3ff) != 0;
    if (is_nan) {
      CHECK(std::isnan(f));
      CHECK(std::isnan(f16_to_f32(f32_to_f16(f))));
    } else {
      CHECK(f32_to_f16(f) == h);
    }
  }
}

TEST_CASE("f32 to f16 rounds to nearest even") {
  CHECK(f32_to_f16(0.0f) == 0x0000);
  CHECK(f32_to_f16(-0.0f) == 0x8000);
  CHECK(f32_to_f16(1.0f) == 0x3c00);
  CHECK(f32_to_f16(65504.0f) == 0x7bff);   // max finite half
  CHECK(f32_to_f16(65520.0f) == 0x7c00);   // halfway, ties to even -> inf
  CHECK(f32_to_f16(100000.0f) == 0x7c00);  // overflow -> inf
  // 1 + 2^-11 is exactly halfway between 1.0 and the next half; even wins
  CHECK(f32_to_f16(1.00048828125f) == 0x3c00);
  // one ulp above the halfway point rounds up
  CHECK(f32_to_f16(std::nextafterf(1.00048828125f, 2.0f)) == 0x3c01);
}

TEST_CASE("fake-quant roundtrip error is bounded by half a quantum") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const double scale = rng.uniform_in(1e-4, 8.0);
    const int32_t zp = static_cast<int32_t>(rng.below(256)) - 128;
    const QuantParams qp{scale, zp};
    const double lo = (-128.0 - zp) * scale;
    const double hi = (127.0 - zp) * scale;

    std::vector<float> xs(64);
    for (auto& x : xs) {
      x = static_cast<float>(rng.uniform_in(-300.0 * scale, 300.0 * scale));
    }
    const Tensor t = Tensor::f32({64}, xs);
    const Tensor round = dequantize_affine(quantize_affine(t, qp), qp);
    for (size_t i = 0; i < xs.size(); ++i) {
      const double clamped = std::clamp(static_cast<double>(xs[i]), lo, hi);
      const double err = std::abs(round.f32_data()[i] - clamped);
      CHECK(err <= scale * 0.50002);  // half quantum plus float narrowing slack
    }
  }
}

TEST_CASE("quantize of dequantize is the identity on int8") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const double scale = rng.uniform_in(1e-4, 100.0);
    const int32_t zp = static_cast<int32_t>(rng.below(256)) - 128;
    const QuantParams qp{scale, zp};
    std::vector<int8_t> qs(64);
    for (auto& q : qs) {
      q = static_cast<int8_t>(static_cast<int>(rng.below(256)) - 128);
    }
    const Tensor q = Tensor::i8({64}, qs);
    const Tensor back = quantize_affine(dequantize_affine(q, qp), qp);
    CHECK(back == q);
  }
}
