#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "tdfn/errors.hpp"

namespace tdfn {

/// Dense 4-D array in NCHW layout, row-major with W fastest.
/// Carries images, feature maps and gradients. The scalar type is float
/// for training and double for gradient verification.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  Tensor(int n, int c, int h, int w) : n_(n), c_(c), h_(h), w_(w) {
    if (n < 0 || c < 0 || h < 0 || w < 0) {
      throw ShapeError("Tensor dims must be nonnegative");
    }
    data_.assign(static_cast<std::size_t>(n) * c * h * w, T(0));
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  std::array<int, 4> dims() const { return {n_, c_, h_, w_}; }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> flat() { return {data_.data(), data_.size()}; }
  std::span<const T> flat() const { return {data_.data(), data_.size()}; }

  T& at(int n, int c, int y, int x) { return data_[index(n, c, y, x)]; }
  const T& at(int n, int c, int y, int x) const { return data_[index(n, c, y, x)]; }

  /// Pointer to the start of row y of plane (n, c).
  T* row(int n, int c, int y) { return data_.data() + index(n, c, y, 0); }
  const T* row(int n, int c, int y) const { return data_.data() + index(n, c, y, 0); }

  T* plane(int n, int c) { return row(n, c, 0); }
  const T* plane(int n, int c) const { return row(n, c, 0); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(T(0)); }

  bool same_shape(const Tensor& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "(" << n_ << "," << c_ << "," << h_ << "," << w_ << ")";
    return os.str();
  }

 private:
  std::size_t index(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x;
  }

  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<T> data_;
};

/// Rejects tensors that have not been given a full positive shape.
template <typename T>
void require_nonempty(const Tensor<T>& t, const char* what) {
  if (t.n() < 1 || t.c() < 1 || t.h() < 1 || t.w() < 1) {
    throw ShapeError(std::string(what) + ": all dims must be >= 1, got " + t.shape_str());
  }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
  }
}

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  Tensor<To> out(t.n(), t.c(), t.h(), t.w());
  const From* src = t.data();
  To* dst = out.data();
  for (std::size_t i = 0; i < t.size(); ++i) dst[i] = static_cast<To>(src[i]);
  return out;
}

template <typename T>
Tensor<T> clamp01(const Tensor<T>& t) {
  Tensor<T> out = t;
  for (T& v : out.flat()) v = std::clamp(v, T(0), T(1));
  return out;
}

}  // namespace tdfn
