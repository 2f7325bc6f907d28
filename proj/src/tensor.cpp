//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "gsurg/float16.hpp"

namespace gsurg {

const char* dtype_name(DType dtype) {
  switch (dtype) {
    case DType::kF32: return "F32";
    case DType::kF16: return "F16";
    case DType::kI8: return "I8";
    case DType::kI32: return "I32";
  }
  return "?";
}

std::optional<DType> dtype_from_name(std::string_view name) {
  if (name == "F32") return DType::kF32;
  if (name == "F16") return DType::kF16;
  if (name == "I8") return DType::kI8;
  if (name == "I32") return DType::kI32;
  return std::nullopt;
}

size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kF32: return 4;
    case DType::kF16: return 2;
    case DType::kI8: return 1;
    case DType::kI32: return 4;
  }
  return 0;
}

QuantParams::QuantParams(double scale_in, int32_t zero_point_in)
    : scale(scale_in), zero_point(zero_point_in) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("quant scale must be finite and > 0");
  }
  if (zero_point < -128 || zero_point > 127) {
    throw DomainError("quant zero_point must be in [-128, 127]");
  }
}

int64_t shape_num_elements(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw DomainError("tensor shape dims must be non-negative");
    n *= d;
  }
  return n;
}

std::string shape_to_string(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(DType dtype, std::vector<int64_t> shape,
               std::vector<uint8_t> data)
    : dtype_(dtype), shape_(std::move(shape)), data_(std::move(data)) {
  const int64_t n = shape_num_elements(shape_);
  if (data_.size() != static_cast<size_t>(n) * dtype_size(dtype_)) {
    throw DomainError("tensor data length does not match shape " +
                      shape_to_string(shape_));
  }
}

namespace {

template <typename T>
std::vector<uint8_t> to_bytes(const std::vector<T>& v) {
  std::vector<uint8_t> bytes(v.size() * sizeof(T));
  if (!v.empty()) std::memcpy(bytes.data(), v.data(), bytes.size());
  return bytes;
}

}  // namespace

Tensor Tensor::f32(std::vector<int64_t> shape, std::vector<float> data) {
  return Tensor(DType::kF32, std::move(shape), to_bytes(data));
}

Tensor Tensor::f16(std::vector<int64_t> shape, std::vector<uint16_t> bits) {
  return Tensor(DType::kF16, std::move(shape), to_bytes(bits));
}

Tensor Tensor::i8(std::vector<int64_t> shape, std::vector<int8_t> data) {
  return Tensor(DType::kI8, std::move(shape), to_bytes(data));
}

Tensor Tensor::i32(std::vector<int64_t> shape, std::vector<int32_t> data) {
  return Tensor(DType::kI32, std::move(shape), to_bytes(data));
}

Tensor Tensor::zeros(DType dtype, std::vector<int64_t> shape) {
  const int64_t n = shape_num_elements(shape);
  std::vector<uint8_t> bytes(static_cast<size_t>(n) * dtype_size(dtype), 0);
  return Tensor(dtype, std::move(shape), std::move(bytes));
}

Tensor Tensor::full_f32(std::vector<int64_t> shape, float value) {
  const int64_t n = shape_num_elements(shape);
  return f32(std::move(shape), std::vector<float>(static_cast<size_t>(n), value));
}

Tensor Tensor::scalar_f32(float value) { return f32({}, {value}); }

int64_t Tensor::num_elements() const { return shape_num_elements(shape_); }

void Tensor::check_dtype(DType expected) const {
  if (dtype_ != expected) {
    throw DTypeError(std::string("expected dtype ") + dtype_name(expected) +
                     ", got " + dtype_name(dtype_));
  }
}

std::span<const float> Tensor::f32_data() const {
  check_dtype(DType::kF32);
  return {reinterpret_cast<const float*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<float> Tensor::f32_data() {
  check_dtype(DType::kF32);
  return {reinterpret_cast<float*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<const uint16_t> Tensor::f16_data() const {
  check_dtype(DType::kF16);
  return {reinterpret_cast<const uint16_t*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<uint16_t> Tensor::f16_data() {
  check_dtype(DType::kF16);
  return {reinterpret_cast<uint16_t*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<const int8_t> Tensor::i8_data() const {
  check_dtype(DType::kI8);
  return {reinterpret_cast<const int8_t*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<int8_t> Tensor::i8_data() {
  check_dtype(DType::kI8);
  return {reinterpret_cast<int8_t*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<const int32_t> Tensor::i32_data() const {
  check_dtype(DType::kI32);
  return {reinterpret_cast<const int32_t*>(data_.data()),
          static_cast<size_t>(num_elements())};
}
std::span<int32_t> Tensor::i32_data() {
  check_dtype(DType::kI32);
  return {reinterpret_cast<int32_t*>(data_.data()),
          static_cast<size_t>(num_elements())};
}

Tensor Tensor::with_shape(std::vector<int64_t> new_shape) const {
  if (shape_num_elements(new_shape) != num_elements()) {
    throw DomainError("reshape element count mismatch: " +
                      shape_to_string(shape_) + " -> " +
                      shape_to_string(new_shape));
  }
  return Tensor(dtype_, std::move(new_shape), data_);
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.dtype_ == b.dtype_ && a.shape_ == b.shape_ && a.data_ == b.data_;
}

Tensor quantize_affine(const Tensor& t, const QuantParams& qp) {
  if (t.dtype() != DType::kF32) {
    throw DTypeError("quantize_affine expects an F32 tensor");
  }
  const auto src = t.f32_data();
  std::vector<int8_t> out(src.size());
  for (size_t i = 0; i < src.size(); ++i) {
    // llround rounds halfway cases away from zero, which is the documented
    // rounding rule for this toolkit.
    const long long q =
        std::llround(static_cast<double>(src[i]) / qp.scale) + qp.zero_point;
    out[i] = static_cast<int8_t>(std::clamp<long long>(q, -128, 127));
  }
  return Tensor::i8(t.shape(), std::move(out));
}

Tensor dequantize_affine(const Tensor& q, const QuantParams& qp) {
  if (q.dtype() != DType::kI8) {
    throw DTypeError("dequantize_affine expects an I8 tensor");
  }
  const auto src = q.i8_data();
  std::vector<float> out(src.size());
  for (size_t i = 0; i < src.size(); ++i) {
    out[i] = static_cast<float>(
        (static_cast<double>(src[i]) - qp.zero_point) * qp.scale);
  }
  return Tensor::f32(q.shape(), std::move(out));
}

QuantParams compute_qparams(double min_v, double max_v, QuantMode mode) {
  if (std::isnan(min_v) || std::isnan(max_v)) {
    throw DomainError("quant range bounds must not be NaN");
  }
  if (!std::isfinite(min_v) || !std::isfinite(max_v)) {
    throw DomainError("quant range bounds must be finite");
  }
  if (min_v > max_v) {
    throw DomainError("quant range requires min <= max");
  }
  const double lo = std::min(min_v, 0.0);
  const double hi = std::max(max_v, 0.0);
  if (mode == QuantMode::kSymmetric) {
    const double bound = std::max(std::abs(lo), std::abs(hi));
    if (bound == 0.0) return QuantParams(1.0, 0);
    return QuantParams(bound / 127.0, 0);
  }
  if (lo == 0.0 && hi == 0.0) return QuantParams(1.0, 0);
  const double scale = (hi - lo) / 255.0;
  const long long zp = std::llround(-128.0 - lo / scale);
  return QuantParams(scale,
                     static_cast<int32_t>(std::clamp<long long>(zp, -128, 127)));
}

Tensor cast_f16_to_f32(const Tensor& t) {
  if (t.dtype() != DType::kF16) {
    throw DTypeError("cast_f16_to_f32 expects an F16 tensor");
  }
  const auto src = t.f16_data();
  std::vector<float> out(src.size());
  for (size_t i = 0; i < src.size(); ++i) out[i] = f16_to_f32(src[i]);
  return Tensor::f32(t.shape(), std::move(out));
}

}  // namespace gsurg
