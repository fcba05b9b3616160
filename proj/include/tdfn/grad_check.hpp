#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tdfn/errors.hpp"

namespace tdfn {

/// Flat view of one named parameter tensor and its gradient buffer.
/// `dims` is informational; biases are reported as (C, 1, 1, 1).
template <typename T>
struct ParamTensor {
  std::string name;
  std::array<int, 4> dims{};
  T* values = nullptr;
  T* grads = nullptr;
  std::size_t size = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

/// Central finite-difference verification of analytic gradients.
///
/// `loss_fn` evaluates the scalar loss at the current parameter values
/// without touching gradient buffers; `grad_fn` fills every gradient buffer
/// (zeroing it first). Each parameter scalar is perturbed by +/- epsilon and
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8) is accumulated.
/// Meant to run at 64-bit precision.
inline GradCheckReport grad_check(const std::function<double()>& loss_fn,
                                  const std::function<void()>& grad_fn,
                                  std::span<const ParamTensor<double>> params, double epsilon) {
  grad_fn();
  // Snapshot analytic gradients: loss_fn re-runs below must not depend on them,
  // but a careless loss_fn could still overwrite.
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.emplace_back(p.grads, p.grads + p.size);

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    const auto& p = params[pi];
    for (std::size_t i = 0; i < p.size; ++i) {
      const double saved = p.values[i];
      p.values[i] = saved + epsilon;
      const double l_plus = loss_fn();
      p.values[i] = saved - epsilon;
      const double l_minus = loss_fn();
      p.values[i] = saved;
      if (!std::isfinite(l_plus) || !std::isfinite(l_minus)) {
        throw NumericError("grad_check: non-finite loss at parameter " + p.name);
      }
      const double numeric = (l_plus - l_minus) / (2.0 * epsilon);
      const double a = analytic[pi][i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(a - numeric) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p.name;
        report.worst_index = i;
        report.analytic_at_worst = a;
        report.numeric_at_worst = numeric;
      }
    }
  }
  return report;
}

}  // namespace tdfn
