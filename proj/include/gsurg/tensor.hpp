//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsurg/errors.hpp"

namespace gsurg {

// F16 is storage-only: values are held as raw bit patterns and must be cast
// to F32 before any arithmetic.
enum class DType { kF32, kF16, kI8, kI32 };

const char* dtype_name(DType dtype);
std::optional<DType> dtype_from_name(std::string_view name);
size_t dtype_size(DType dtype);

// Per-tensor affine quantization parameters: real = (q - zero_point) * scale.
struct QuantParams {
  double scale = 1.0;
  int32_t zero_point = 0;

  QuantParams() = default;
  QuantParams(double scale_in, int32_t zero_point_in);
};

enum class QuantMode { kAsymmetric, kSymmetric };

// Dense row-major tensor value. Immutable by convention once built: all
// operations return fresh tensors.
class Tensor {
 public:
  Tensor() = default;

  static Tensor f32(std::vector<int64_t> shape, std::vector<float> data);
  static Tensor f16(std::vector<int64_t> shape, std::vector<uint16_t> bits);
  static Tensor i8(std::vector<int64_t> shape, std::vector<int8_t> data);
  static Tensor i32(std::vector<int64_t> shape, std::vector<int32_t> data);
  static Tensor zeros(DType dtype, std::vector<int64_t> shape);
  static Tensor full_f32(std::vector<int64_t> shape, float value);
  static Tensor scalar_f32(float value);

  DType dtype() const { return dtype_; }
  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t num_elements() const;
  size_t byte_size() const { return data_.size(); }

  std::span<const float> f32_data() const;
  std::span<float> f32_data();
  std::span<const uint16_t> f16_data() const;
  std::span<uint16_t> f16_data();
  std::span<const int8_t> i8_data() const;
  std::span<int8_t> i8_data();
  std::span<const int32_t> i32_data() const;
  std::span<int32_t> i32_data();
  const uint8_t* raw() const { return data_.data(); }

  Tensor with_shape(std::vector<int64_t> new_shape) const;

  // Value equality is bitwise on the payload: two tensors are equal iff
  // dtype, shape and every element bit pattern match.
  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  Tensor(DType dtype, std::vector<int64_t> shape, std::vector<uint8_t> data);
  void check_dtype(DType expected) const;

  DType dtype_ = DType::kF32;
  std::vector<int64_t> shape_;
  std::vector<uint8_t> data_;
};

int64_t shape_num_elements(const std::vector<int64_t>& shape);
std::string shape_to_string(const std::vector<int64_t>& shape);

// q = clamp(round_half_away_from_zero(x / scale) + zero_point, -128, 127)
Tensor quantize_affine(const Tensor& t, const QuantParams& qp);

// x = (q - zero_point) * scale
Tensor dequantize_affine(const Tensor& q, const QuantParams& qp);

// Derives per-tensor parameters from observed bounds. The range is widened
// to include zero first, so an exact zero always survives quantization.
QuantParams compute_qparams(double min_v, double max_v, QuantMode mode);

Tensor cast_f16_to_f32(const Tensor& t);

}  // namespace gsurg
