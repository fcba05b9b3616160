#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "tdfn/tensor.hpp"

namespace tdfn {

/// One convolution's weight and bias together with gradient accumulators.
/// weight has dims (C_out, C_in, k, k); bias has length C_out. Kernels are
/// square and restricted to 1x1 or 3x3.
template <typename T>
struct ConvParams {
  Tensor<T> weight;
  std::vector<T> bias;
  Tensor<T> grad_weight;
  std::vector<T> grad_bias;

  ConvParams() = default;

  ConvParams(int c_out, int c_in, int k)
      : weight(c_out, c_in, k, k),
        bias(static_cast<std::size_t>(c_out), T(0)),
        grad_weight(c_out, c_in, k, k),
        grad_bias(static_cast<std::size_t>(c_out), T(0)) {
    if (k != 1 && k != 3) throw ShapeError("ConvParams: kernel must be 1x1 or 3x3");
    if (c_out < 1 || c_in < 1) throw ShapeError("ConvParams: channels must be >= 1");
  }

  int out_channels() const { return weight.n(); }
  int in_channels() const { return weight.c(); }
  int kernel() const { return weight.h(); }

  std::size_t parameter_count() const { return weight.size() + bias.size(); }

  void zero_grad() {
    grad_weight.zero();
    std::fill(grad_bias.begin(), grad_bias.end(), T(0));
  }
};

namespace detail {

template <typename T>
void check_conv_args(const Tensor<T>& input, const ConvParams<T>& params, int dilation,
                     int padding) {
  require_nonempty(input, "conv2d_dilated input");
  if (input.c() != params.in_channels()) {
    throw ShapeError("conv2d_dilated: input has " + std::to_string(input.c()) +
                     " channels, kernel expects " + std::to_string(params.in_channels()));
  }
  if (dilation < 1) throw ShapeError("conv2d_dilated: dilation must be >= 1");
  if (padding < 0) throw ShapeError("conv2d_dilated: padding must be >= 0");
}

inline std::pair<int, int> conv_output_hw(int h, int w, int k, int dilation, int padding) {
  const int span = dilation * (k - 1);
  const int oh = h + 2 * padding - span;
  const int ow = w + 2 * padding - span;
  if (oh < 1 || ow < 1) {
    throw ShapeError("conv2d_dilated: output dimension would be < 1");
  }
  return {oh, ow};
}

}  // namespace detail

/// Dilated 2-D convolution, stride 1, zero padding. The kernel taps are
/// spaced `dilation` pixels apart; with padding = dilation a 3x3 kernel
/// preserves the input resolution.
template <typename T>
Tensor<T> conv2d_dilated(const Tensor<T>& input, const ConvParams<T>& params, int dilation,
                         int padding) {
  detail::check_conv_args(input, params, dilation, padding);
  const int k = params.kernel();
  const auto [oh, ow] = detail::conv_output_hw(input.h(), input.w(), k, dilation, padding);
  const int n_batch = input.n(), c_in = input.c(), c_out = params.out_channels();
  const int h = input.h(), w = input.w();

  Tensor<T> out(n_batch, c_out, oh, ow);
  for (int n = 0; n < n_batch; ++n) {
    for (int co = 0; co < c_out; ++co) {
      T* out_plane = out.plane(n, co);
      std::fill(out_plane, out_plane + static_cast<std::size_t>(oh) * ow, params.bias[co]);
      for (int ci = 0; ci < c_in; ++ci) {
        const T* wrow = params.weight.plane(co, ci);
        for (int ky = 0; ky < k; ++ky) {
          const int dy = dilation * ky - padding;
          const int oy_lo = std::max(0, -dy);
          const int oy_hi = std::min(oh, h - dy);
          for (int kx = 0; kx < k; ++kx) {
            const T wv = wrow[ky * k + kx];
            const int dx = dilation * kx - padding;
            const int ox_lo = std::max(0, -dx);
            const int ox_hi = std::min(ow, w - dx);
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              const T* in_row = input.row(n, ci, oy + dy) + dx;
              T* out_row = out.row(n, co, oy);
              for (int ox = ox_lo; ox < ox_hi; ++ox) out_row[ox] += wv * in_row[ox];
            }
          }
        }
      }
    }
  }
  return out;
}

/// Adjoint of conv2d_dilated. Accumulates grad_weight / grad_bias into
/// `params` and returns the gradient with respect to the input (empty
/// tensor when `compute_grad_input` is false, e.g. for the first layer).
template <typename T>
Tensor<T> conv2d_backward(const Tensor<T>& input, ConvParams<T>& params, int dilation,
                          int padding, const Tensor<T>& grad_output,
                          bool compute_grad_input = true) {
  detail::check_conv_args(input, params, dilation, padding);
  const int k = params.kernel();
  const auto [oh, ow] = detail::conv_output_hw(input.h(), input.w(), k, dilation, padding);
  if (grad_output.n() != input.n() || grad_output.c() != params.out_channels() ||
      grad_output.h() != oh || grad_output.w() != ow) {
    throw ShapeError("conv2d_backward: grad_output " + grad_output.shape_str() +
                     " does not match forward output shape");
  }
  const int n_batch = input.n(), c_in = input.c(), c_out = params.out_channels();
  const int h = input.h(), w = input.w();

  Tensor<T> grad_input;
  if (compute_grad_input) grad_input = Tensor<T>(n_batch, c_in, h, w);

  for (int n = 0; n < n_batch; ++n) {
    for (int co = 0; co < c_out; ++co) {
      // Bias adjoint: plain sum over the output plane.
      T bias_acc = T(0);
      const T* gplane = grad_output.plane(n, co);
      for (std::size_t i = 0; i < static_cast<std::size_t>(oh) * ow; ++i) bias_acc += gplane[i];
      params.grad_bias[co] += bias_acc;

      for (int ci = 0; ci < c_in; ++ci) {
        const T* wrow = params.weight.plane(co, ci);
        T* gwrow = params.grad_weight.plane(co, ci);
        for (int ky = 0; ky < k; ++ky) {
          const int dy = dilation * ky - padding;
          const int oy_lo = std::max(0, -dy);
          const int oy_hi = std::min(oh, h - dy);
          for (int kx = 0; kx < k; ++kx) {
            const int dx = dilation * kx - padding;
            const int ox_lo = std::max(0, -dx);
            const int ox_hi = std::min(ow, w - dx);
            const T wv = wrow[ky * k + kx];
            T w_acc = T(0);
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              const T* in_row = input.row(n, ci, oy + dy) + dx;
              const T* g_row = grad_output.row(n, co, oy);
              T* gi_row = compute_grad_input ? grad_input.row(n, ci, oy + dy) + dx : nullptr;
              if (compute_grad_input) {
                for (int ox = ox_lo; ox < ox_hi; ++ox) {
                  w_acc += g_row[ox] * in_row[ox];
                  gi_row[ox] += wv * g_row[ox];
                }
              } else {
                for (int ox = ox_lo; ox < ox_hi; ++ox) w_acc += g_row[ox] * in_row[ox];
              }
            }
            gwrow[ky * k + kx] += w_acc;
          }
        }
      }
    }
  }
  return grad_input;
}

/// Elementwise max(0, x).
template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
  Tensor<T> out = input;
  for (T& v : out.flat()) v = v > T(0) ? v : T(0);
  return out;
}

/// Passes gradient where the forward input was > 0; the subgradient at
/// exactly 0 is fixed to 0.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_output) {
  require_same_shape(input, grad_output, "relu_backward");
  Tensor<T> grad_input(input.n(), input.c(), input.h(), input.w());
  const T* x = input.data();
  const T* g = grad_output.data();
  T* gi = grad_input.data();
  for (std::size_t i = 0; i < input.size(); ++i) gi[i] = x[i] > T(0) ? g[i] : T(0);
  return grad_input;
}

/// Channel concatenation: a's channels first, then b's.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  require_nonempty(a, "concat_channels a");
  require_nonempty(b, "concat_channels b");
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    throw ShapeError("concat_channels: batch/spatial mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
  }
  Tensor<T> out(a.n(), a.c() + b.c(), a.h(), a.w());
  const std::size_t plane = static_cast<std::size_t>(a.h()) * a.w();
  for (int n = 0; n < a.n(); ++n) {
    std::copy_n(a.plane(n, 0), plane * a.c(), out.plane(n, 0));
    std::copy_n(b.plane(n, 0), plane * b.c(), out.plane(n, a.c()));
  }
  return out;
}

/// Backward of concat_channels: splits the gradient into the two operands'
/// slices (first c_a channels, then the rest).
template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& grad, int c_a) {
  require_nonempty(grad, "split_channels");
  if (c_a < 1 || c_a >= grad.c()) throw ShapeError("split_channels: bad split point");
  const int c_b = grad.c() - c_a;
  Tensor<T> ga(grad.n(), c_a, grad.h(), grad.w());
  Tensor<T> gb(grad.n(), c_b, grad.h(), grad.w());
  const std::size_t plane = static_cast<std::size_t>(grad.h()) * grad.w();
  for (int n = 0; n < grad.n(); ++n) {
    std::copy_n(grad.plane(n, 0), plane * c_a, ga.plane(n, 0));
    std::copy_n(grad.plane(n, c_a), plane * c_b, gb.plane(n, 0));
  }
  return {std::move(ga), std::move(gb)};
}

/// Elementwise sum.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_nonempty(a, "add");
  require_same_shape(a, b, "add");
  Tensor<T> out = a;
  const T* pb = b.data();
  T* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] += pb[i];
  return out;
}

/// Backward of add: the gradient flows unchanged to both operands.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> add_backward(const Tensor<T>& grad_output) {
  return {grad_output, grad_output};
}

/// In-place a += b, used by backward accumulation paths.
template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add_inplace");
  const T* pb = b.data();
  T* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] += pb[i];
}

}  // namespace tdfn
