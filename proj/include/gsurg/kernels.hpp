//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <array>
#include <vector>

#include "gsurg/graph.hpp"
#include "gsurg/tensor.hpp"

namespace gsurg::kernels {

// Two implementations of every compute kernel: a plain serial reference and
// an OpenMP version parallelized over independent output elements. Both use
// the same fixed per-element accumulation order (kh, kw, then Cin for Conv2D;
// k ascending for MatMul), so their results are bit-identical and runs are
// deterministic either way.
enum class ExecMode { kSerial, kParallel };

void set_exec_mode(ExecMode mode);
ExecMode exec_mode();

namespace serial {
Tensor conv2d(const Tensor& data, const Tensor& filter, const Tensor* bias,
              int64_t stride_h, int64_t stride_w, PaddingScheme scheme);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor pad(const Tensor& t, const std::vector<std::array<int64_t, 2>>& paddings,
           float value);
Tensor concat(const std::vector<const Tensor*>& parts, int64_t axis);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& t);
Tensor sigmoid(const Tensor& t);
}  // namespace serial

namespace parallel {
Tensor conv2d(const Tensor& data, const Tensor& filter, const Tensor* bias,
              int64_t stride_h, int64_t stride_w, PaddingScheme scheme);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor pad(const Tensor& t, const std::vector<std::array<int64_t, 2>>& paddings,
           float value);
Tensor concat(const std::vector<const Tensor*>& parts, int64_t axis);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& t);
Tensor sigmoid(const Tensor& t);
}  // namespace parallel

// Mode-dispatching entry points used by the interpreter.
Tensor conv2d(const Tensor& data, const Tensor& filter, const Tensor* bias,
              int64_t stride_h, int64_t stride_w, PaddingScheme scheme);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor pad(const Tensor& t, const std::vector<std::array<int64_t, 2>>& paddings,
           float value);
Tensor concat(const std::vector<const Tensor*>& parts, int64_t axis);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& t);
Tensor sigmoid(const Tensor& t);

// Splits a tensor along `axis` into chunks of the given extents; inverse of
// concat at the same boundaries.
std::vector<Tensor> split(const Tensor& t, int64_t axis,
                          const std::vector<int64_t>& extents);

}  // namespace gsurg::kernels
