//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "gsurg/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>

namespace gsurg::kernels {

namespace {

std::atomic<ExecMode> g_exec_mode{ExecMode::kParallel};

struct Conv2DDims {
  int64_t n, h, w, cin;
  int64_t kh, kw, cout;
  int64_t oh, ow;
  int64_t pad_top = 0, pad_left = 0;
};

Conv2DDims conv2d_dims(const Tensor& data, const Tensor& filter,
                       int64_t stride_h, int64_t stride_w,
                       PaddingScheme scheme) {
  const auto& ds = data.shape();
  const auto& fs = filter.shape();
  if (ds.size() != 4 || fs.size() != 4 || ds[3] != fs[2]) {
    throw DomainError("conv2d: NHWC data and [kh,kw,Cin,Cout] filter required");
  }
  if (stride_h < 1 || stride_w < 1) throw DomainError("conv2d: bad strides");
  Conv2DDims d{ds[0], ds[1], ds[2], ds[3], fs[0], fs[1], fs[3], 0, 0};
  if (scheme == PaddingScheme::kValid) {
    if (d.h < d.kh || d.w < d.kw) {
      throw DomainError("conv2d: filter larger than input");
    }
    d.oh = (d.h - d.kh) / stride_h + 1;
    d.ow = (d.w - d.kw) / stride_w + 1;
  } else {
    d.oh = (d.h + stride_h - 1) / stride_h;
    d.ow = (d.w + stride_w - 1) / stride_w;
    const int64_t pad_h = std::max<int64_t>((d.oh - 1) * stride_h + d.kh - d.h, 0);
    const int64_t pad_w = std::max<int64_t>((d.ow - 1) * stride_w + d.kw - d.w, 0);
    d.pad_top = pad_h / 2;
    d.pad_left = pad_w / 2;
  }
  return d;
}

// One output element. Accumulation order is fixed (kh outer, kw, then Cin);
// taps that fall outside the input contribute nothing.
inline float conv2d_element(const float* data, const float* filter,
                            const Conv2DDims& d, int64_t stride_h,
                            int64_t stride_w, int64_t n, int64_t oy, int64_t ox,
                            int64_t co) {
  float acc = 0.0f;
  for (int64_t ky = 0; ky < d.kh; ++ky) {
    const int64_t iy = oy * stride_h - d.pad_top + ky;
    if (iy < 0 || iy >= d.h) continue;
    for (int64_t kx = 0; kx < d.kw; ++kx) {
      const int64_t ix = ox * stride_w - d.pad_left + kx;
      if (ix < 0 || ix >= d.w) continue;
      const float* drow = data + ((n * d.h + iy) * d.w + ix) * d.cin;
      const float* frow = filter + ((ky * d.kw + kx) * d.cin) * d.cout + co;
      for (int64_t ci = 0; ci < d.cin; ++ci) {
        acc += drow[ci] * frow[ci * d.cout];
      }
    }
  }
  return acc;
}

struct PadDims {
  std::vector<int64_t> in_shape, out_shape;
  std::vector<int64_t> before;
  int64_t out_elems;
};

PadDims pad_dims(const Tensor& t,
                 const std::vector<std::array<int64_t, 2>>& paddings) {
  if (paddings.size() != t.shape().size()) {
    throw DomainError("pad: paddings rank mismatch");
  }
  PadDims d;
  d.in_shape = t.shape();
  d.out_shape = t.shape();
  for (size_t i = 0; i < paddings.size(); ++i) {
    if (paddings[i][0] < 0 || paddings[i][1] < 0) {
      throw DomainError("pad: negative padding");
    }
    d.before.push_back(paddings[i][0]);
    d.out_shape[i] += paddings[i][0] + paddings[i][1];
  }
  d.out_elems = shape_num_elements(d.out_shape);
  return d;
}

struct ConcatDims {
  std::vector<int64_t> out_shape;
  int64_t outer, inner;               // elements before/after the axis
  std::vector<int64_t> part_extents;  // axis extent per part
};

ConcatDims concat_dims(const std::vector<const Tensor*>& parts, int64_t axis) {
  if (parts.size() < 1) throw DomainError("concat: needs at least one input");
  const auto& first = parts[0]->shape();
  const int64_t rank = static_cast<int64_t>(first.size());
  if (axis < 0 || axis >= rank) throw DomainError("concat: axis out of range");
  ConcatDims d;
  d.out_shape = first;
  d.out_shape[axis] = 0;
  d.outer = 1;
  d.inner = 1;
  for (int64_t i = 0; i < axis; ++i) d.outer *= first[i];
  for (int64_t i = axis + 1; i < rank; ++i) d.inner *= first[i];
  for (const Tensor* t : parts) {
    const auto& s = t->shape();
    if (static_cast<int64_t>(s.size()) != rank) {
      throw DomainError("concat: rank mismatch");
    }
    for (int64_t i = 0; i < rank; ++i) {
      if (i != axis && s[i] != first[i]) {
        throw DomainError("concat: shape mismatch off the concat axis");
      }
    }
    d.part_extents.push_back(s[axis]);
    d.out_shape[axis] += s[axis];
  }
  return d;
}

void check_same_shape_f32(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DomainError(std::string(op) + ": shape mismatch " +
                      shape_to_string(a.shape()) + " vs " +
                      shape_to_string(b.shape()));
  }
}

inline float relu_one(float x) { return x > 0.0f ? x : 0.0f; }
inline float sigmoid_one(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

void set_exec_mode(ExecMode mode) { g_exec_mode.store(mode); }
ExecMode exec_mode() { return g_exec_mode.load(); }

// ---------------------------------------------------------------------------
// serial reference kernels

namespace serial {

Tensor conv2d(const Tensor& data, const Tensor& filter, const Tensor* bias,
              int64_t stride_h, int64_t stride_w, PaddingScheme scheme) {
  const Conv2DDims d = conv2d_dims(data, filter, stride_h, stride_w, scheme);
  const float* dp = data.f32_data().data();
  const float* fp = filter.f32_data().data();
  const float* bp = bias ? bias->f32_data().data() : nullptr;
  Tensor out = Tensor::zeros(DType::kF32, {d.n, d.oh, d.ow, d.cout});
  float* op = out.f32_data().data();
  for (int64_t n = 0; n < d.n; ++n) {
    for (int64_t oy = 0; oy < d.oh; ++oy) {
      for (int64_t ox = 0; ox < d.ow; ++ox) {
        float* orow = op + ((n * d.oh + oy) * d.ow + ox) * d.cout;
        for (int64_t co = 0; co < d.cout; ++co) {
          float acc = conv2d_element(dp, fp, d, stride_h, stride_w, n, oy, ox, co);
          if (bp) acc += bp[co];
          orow[co] = acc;
        }
      }
    }
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (as.size() != 2 || bs.size() != 2 || as[1] != bs[0]) {
    throw DomainError("matmul: expects [m,k] x [k,n]");
  }
  const int64_t m = as[0], k = as[1], n = bs[1];
  const float* ap = a.f32_data().data();
  const float* bp = b.f32_data().data();
  Tensor out = Tensor::zeros(DType::kF32, {m, n});
  float* op = out.f32_data().data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t kk = 0; kk < k; ++kk) {
        acc += ap[i * k + kk] * bp[kk * n + j];
      }
      op[i * n + j] = acc;
    }
  }
  return out;
}

Tensor pad(const Tensor& t, const std::vector<std::array<int64_t, 2>>& paddings,
           float value) {
  const PadDims d = pad_dims(t, paddings);
  const float* sp = t.f32_data().data();
  Tensor out = Tensor::zeros(DType::kF32, d.out_shape);
  float* op = out.f32_data().data();
  const int64_t rank = static_cast<int64_t>(d.out_shape.size());
  for (int64_t flat = 0; flat < d.out_elems; ++flat) {
    int64_t rem = flat, src = 0, stride = 1;
    bool inside = true;
    for (int64_t i = rank; i-- > 0;) {
      const int64_t coord = rem % d.out_shape[i];
      rem /= d.out_shape[i];
      const int64_t in_coord = coord - d.before[i];
      if (in_coord < 0 || in_coord >= d.in_shape[i]) {
        inside = false;
        break;
      }
      src += in_coord * stride;
      stride *= d.in_shape[i];
    }
    op[flat] = inside ? sp[src] : value;
  }
  return out;
}

Tensor concat(const std::vector<const Tensor*>& parts, int64_t axis) {
  const ConcatDims d = concat_dims(parts, axis);
  Tensor out = Tensor::zeros(DType::kF32, d.out_shape);
  float* op = out.f32_data().data();
  const int64_t axis_total = d.out_shape[axis];
  for (int64_t outer = 0; outer < d.outer; ++outer) {
    int64_t axis_off = 0;
    for (size_t p = 0; p < parts.size(); ++p) {
      const float* sp = parts[p]->f32_data().data();
      const int64_t extent = d.part_extents[p];
      std::memcpy(op + (outer * axis_total + axis_off) * d.inner,
                  sp + outer * extent * d.inner,
                  static_cast<size_t>(extent * d.inner) * sizeof(float));
      axis_off += extent;
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape_f32(a, b, "add");
  const auto av = a.f32_data();
  const auto bv = b.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, a.shape());
  auto ov = out.f32_data();
  for (size_t i = 0; i < av.size(); ++i) ov[i] = av[i] + bv[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape_f32(a, b, "mul");
  const auto av = a.f32_data();
  const auto bv = b.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, a.shape());
  auto ov = out.f32_data();
  for (size_t i = 0; i < av.size(); ++i) ov[i] = av[i] * bv[i];
  return out;
}

Tensor relu(const Tensor& t) {
  const auto tv = t.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, t.shape());
  auto ov = out.f32_data();
  for (size_t i = 0; i < tv.size(); ++i) ov[i] = relu_one(tv[i]);
  return out;
}

Tensor sigmoid(const Tensor& t) {
  const auto tv = t.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, t.shape());
  auto ov = out.f32_data();
  for (size_t i = 0; i < tv.size(); ++i) ov[i] = sigmoid_one(tv[i]);
  return out;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP kernels. Each thread owns disjoint output elements; the per-element
// arithmetic is byte-for-byte the serial code, so outputs match the reference
// exactly.

namespace parallel {

Tensor conv2d(const Tensor& data, const Tensor& filter, const Tensor* bias,
              int64_t stride_h, int64_t stride_w, PaddingScheme scheme) {
  const Conv2DDims d = conv2d_dims(data, filter, stride_h, stride_w, scheme);
  const float* dp = data.f32_data().data();
  const float* fp = filter.f32_data().data();
  const float* bp = bias ? bias->f32_data().data() : nullptr;
  Tensor out = Tensor::zeros(DType::kF32, {d.n, d.oh, d.ow, d.cout});
  float* op = out.f32_data().data();
  const int64_t pixels = d.n * d.oh * d.ow;
#pragma omp parallel for schedule(static)
  for (int64_t px = 0; px < pixels; ++px) {
    const int64_t ox = px % d.ow;
    const int64_t oy = (px / d.ow) % d.oh;
    const int64_t n = px / (d.ow * d.oh);
    float* orow = op + px * d.cout;
    for (int64_t co = 0; co < d.cout; ++co) {
      float acc = conv2d_element(dp, fp, d, stride_h, stride_w, n, oy, ox, co);
      if (bp) acc += bp[co];
      orow[co] = acc;
    }
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (as.size() != 2 || bs.size() != 2 || as[1] != bs[0]) {
    throw DomainError("matmul: expects [m,k] x [k,n]");
  }
  const int64_t m = as[0], k = as[1], n = bs[1];
  const float* ap = a.f32_data().data();
  const float* bp = b.f32_data().data();
  Tensor out = Tensor::zeros(DType::kF32, {m, n});
  float* op = out.f32_data().data();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t kk = 0; kk < k; ++kk) {
        acc += ap[i * k + kk] * bp[kk * n + j];
      }
      op[i * n + j] = acc;
    }
  }
  return out;
}

Tensor pad(const Tensor& t, const std::vector<std::array<int64_t, 2>>& paddings,
           float value) {
  const PadDims d = pad_dims(t, paddings);
  const float* sp = t.f32_data().data();
  Tensor out = Tensor::zeros(DType::kF32, d.out_shape);
  float* op = out.f32_data().data();
  const int64_t rank = static_cast<int64_t>(d.out_shape.size());
#pragma omp parallel for schedule(static)
  for (int64_t flat = 0; flat < d.out_elems; ++flat) {
    int64_t rem = flat, src = 0, stride = 1;
    bool inside = true;
    for (int64_t i = rank; i-- > 0;) {
      const int64_t coord = rem % d.out_shape[i];
      rem /= d.out_shape[i];
      const int64_t in_coord = coord - d.before[i];
      if (in_coord < 0 || in_coord >= d.in_shape[i]) {
        inside = false;
        break;
      }
      src += in_coord * stride;
      stride *= d.in_shape[i];
    }
    op[flat] = inside ? sp[src] : value;
  }
  return out;
}

Tensor concat(const std::vector<const Tensor*>& parts, int64_t axis) {
  const ConcatDims d = concat_dims(parts, axis);
  Tensor out = Tensor::zeros(DType::kF32, d.out_shape);
  float* op = out.f32_data().data();
  const int64_t axis_total = d.out_shape[axis];
#pragma omp parallel for schedule(static)
  for (int64_t outer = 0; outer < d.outer; ++outer) {
    int64_t axis_off = 0;
    for (size_t p = 0; p < parts.size(); ++p) {
      const float* sp = parts[p]->f32_data().data();
      const int64_t extent = d.part_extents[p];
      std::memcpy(op + (outer * axis_total + axis_off) * d.inner,
                  sp + outer * extent * d.inner,
                  static_cast<size_t>(extent * d.inner) * sizeof(float));
      axis_off += extent;
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape_f32(a, b, "add");
  const auto av = a.f32_data();
  const auto bv = b.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, a.shape());
  auto ov = out.f32_data();
  const int64_t n = static_cast<int64_t>(av.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) ov[i] = av[i] + bv[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape_f32(a, b, "mul");
  const auto av = a.f32_data();
  const auto bv = b.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, a.shape());
  auto ov = out.f32_data();
  const int64_t n = static_cast<int64_t>(av.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) ov[i] = av[i] * bv[i];
  return out;
}

Tensor relu(const Tensor& t) {
  const auto tv = t.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, t.shape());
  auto ov = out.f32_data();
  const int64_t n = static_cast<int64_t>(tv.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) ov[i] = relu_one(tv[i]);
  return out;
}

Tensor sigmoid(const Tensor& t) {
  const auto tv = t.f32_data();
  Tensor out = Tensor::zeros(DType::kF32, t.shape());
  auto ov = out.f32_data();
  const int64_t n = static_cast<int64_t>(tv.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) ov[i] = sigmoid_one(tv[i]);
  return out;
}

}  // namespace parallel

// ---------------------------------------------------------------------------
// dispatch

#define GSURG_DISPATCH(call) \
  (exec_mode() == ExecMode::kParallel ? parallel::call : serial::call)

Tensor conv2d(const Tensor& data, const Tensor& filter, const Tensor* bias,
              int64_t stride_h, int64_t stride_w, PaddingScheme scheme) {
  return GSURG_DISPATCH(conv2d(data, filter, bias, stride_h, stride_w, scheme));
}
Tensor matmul(const Tensor& a, const Tensor& b) {
  return GSURG_DISPATCH(matmul(a, b));
}
Tensor pad(const Tensor& t, const std::vector<std::array<int64_t, 2>>& paddings,
           float value) {
  return GSURG_DISPATCH(pad(t, paddings, value));
}
Tensor concat(const std::vector<const Tensor*>& parts, int64_t axis) {
  return GSURG_DISPATCH(concat(parts, axis));
}
Tensor add(const Tensor& a, const Tensor& b) { return GSURG_DISPATCH(add(a, b)); }
Tensor mul(const Tensor& a, const Tensor& b) { return GSURG_DISPATCH(mul(a, b)); }
Tensor relu(const Tensor& t) { return GSURG_DISPATCH(relu(t)); }
Tensor sigmoid(const Tensor& t) { return GSURG_DISPATCH(sigmoid(t)); }

#undef GSURG_DISPATCH

std::vector<Tensor> split(const Tensor& t, int64_t axis,
                          const std::vector<int64_t>& extents) {
  const auto& shape = t.shape();
  const int64_t rank = static_cast<int64_t>(shape.size());
  if (axis < 0 || axis >= rank) throw DomainError("split: axis out of range");
  int64_t total = 0;
  for (int64_t e : extents) {
    if (e < 0) throw DomainError("split: negative extent");
    total += e;
  }
  if (total != shape[axis]) {
    throw DomainError("split: extents do not cover the axis");
  }
  int64_t outer = 1, inner = 1;
  for (int64_t i = 0; i < axis; ++i) outer *= shape[i];
  for (int64_t i = axis + 1; i < rank; ++i) inner *= shape[i];
  const float* sp = t.f32_data().data();
  std::vector<Tensor> out;
  int64_t axis_off = 0;
  for (int64_t e : extents) {
    std::vector<int64_t> part_shape = shape;
    part_shape[axis] = e;
    Tensor part = Tensor::zeros(DType::kF32, part_shape);
    float* pp = part.f32_data().data();
    for (int64_t o = 0; o < outer; ++o) {
      std::memcpy(pp + o * e * inner, sp + (o * shape[axis] + axis_off) * inner,
                  static_cast<size_t>(e * inner) * sizeof(float));
    }
    out.push_back(std::move(part));
    axis_off += e;
  }
  return out;
}

}  // namespace gsurg::kernels
