#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdfn/conv_ops.hpp"
#include "tdfn/grad_check.hpp"
#include "tdfn/rng.hpp"
#include "tdfn/tensor.hpp"

namespace tdfn {

/// Which of the two fusion trees are active.
///   kTree       - full model: pairwise fusion within blocks and across blocks.
///   kSum        - parallel baseline: both trees replaced by elementwise sums
///                 (within-block sum of dilated features; reconstruction reads
///                 the last block).
///   kWithinOnly - fusion tree inside each block only.
///   kAcrossOnly - fusion tree over block outputs only.
enum class FusionMode { kTree, kSum, kWithinOnly, kAcrossOnly };

inline const char* to_string(FusionMode m) {
  switch (m) {
    case FusionMode::kTree: return "tree";
    case FusionMode::kSum: return "sum";
    case FusionMode::kWithinOnly: return "within_only";
    case FusionMode::kAcrossOnly: return "across_only";
  }
  return "?";
}

inline FusionMode fusion_mode_from_string(const std::string& s) {
  if (s == "tree") return FusionMode::kTree;
  if (s == "sum") return FusionMode::kSum;
  if (s == "within_only") return FusionMode::kWithinOnly;
  if (s == "across_only") return FusionMode::kAcrossOnly;
  throw DataError("unknown fusion_mode '" + s + "' (tree|sum|within_only|across_only)");
}

inline int fusion_mode_code(FusionMode m) { return static_cast<int>(m); }

inline FusionMode fusion_mode_from_code(int code) {
  if (code < 0 || code > 3) throw DataError("bad fusion mode code " + std::to_string(code));
  return static_cast<FusionMode>(code);
}

/// Architecture hyperparameters defining one network variant.
struct NetworkConfig {
  int num_blocks = 8;
  int max_dilation = 4;
  int channels = 16;
  FusionMode fusion_mode = FusionMode::kTree;
  int input_channels = 3;
  std::uint32_t seed = 1;

  bool within_fusion_active() const {
    return fusion_mode == FusionMode::kTree || fusion_mode == FusionMode::kWithinOnly;
  }
  bool across_fusion_active() const {
    return fusion_mode == FusionMode::kTree || fusion_mode == FusionMode::kAcrossOnly;
  }

  void validate() const {
    if (num_blocks < 1) throw ShapeError("NetworkConfig: num_blocks must be >= 1");
    if (max_dilation < 1) throw ShapeError("NetworkConfig: max_dilation must be >= 1");
    if (channels < 1) throw ShapeError("NetworkConfig: channels must be >= 1");
    if (input_channels < 1) throw ShapeError("NetworkConfig: input_channels must be >= 1");
  }
};

/// One dilated convolution block: a single 3x3 kernel shared by every
/// dilation factor 1..max_dilation, plus the 1x1 fusion kernels of the
/// within-block tree (empty when that tree is inactive).
template <typename T>
struct BlockParams {
  ConvParams<T> shared_conv;
  std::vector<ConvParams<T>> within_fuse;
};

// ---------------------------------------------------------------------------
// Fusion primitives
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void check_fuse_args(const Tensor<T>& z1, const Tensor<T>& z2, const ConvParams<T>& params) {
  require_same_shape(z1, z2, "fuse");
  require_nonempty(z1, "fuse");
  if (params.kernel() != 1 || params.in_channels() != 2 * z1.c() ||
      params.out_channels() != z1.c()) {
    throw ShapeError("fuse: params must be 1x1, 2C->C for C=" + std::to_string(z1.c()));
  }
}

}  // namespace detail

/// Pairwise feature fusion: relu(conv1x1(concat(z1, z2))). Output has the
/// same dimensions as either input.
template <typename T>
Tensor<T> fuse(const Tensor<T>& z1, const Tensor<T>& z2, const ConvParams<T>& params) {
  detail::check_fuse_args(z1, z2, params);
  return relu(conv2d_dilated(concat_channels(z1, z2), params, 1, 0));
}

/// Hierarchical pairwise reduction of same-shape features. At each level,
/// adjacent pairs (0,1), (2,3), ... are fused in order; with an odd count the
/// last feature is carried up unfused. fuse_params are consumed in level
/// order, left to right; exactly n-1 fusions happen in total.
///
/// When `first_level_out` is given, the fusion results of the first level
/// (adjacent leaf pairs) are copied into it, for feature inspection.
template <typename T>
Tensor<T> tree_reduce(std::span<const Tensor<T>> features,
                      std::span<const ConvParams<T>> fuse_params,
                      std::vector<Tensor<T>>* first_level_out = nullptr) {
  const std::size_t n = features.size();
  if (n == 0) throw ShapeError("tree_reduce: needs at least one feature");
  if (fuse_params.size() != n - 1) {
    throw ShapeError("tree_reduce: got " + std::to_string(fuse_params.size()) +
                     " fuse params for " + std::to_string(n) + " features, expected n-1");
  }
  std::vector<Tensor<T>> level(features.begin(), features.end());
  std::size_t param_idx = 0;
  bool first_level = true;
  while (level.size() > 1) {
    std::vector<Tensor<T>> next;
    next.reserve((level.size() + 1) / 2);
    std::size_t i = 0;
    for (; i + 1 < level.size(); i += 2) {
      next.push_back(fuse(level[i], level[i + 1], fuse_params[param_idx++]));
      if (first_level && first_level_out) first_level_out->push_back(next.back());
    }
    if (i < level.size()) next.push_back(std::move(level[i]));
    level = std::move(next);
    first_level = false;
  }
  return std::move(level.front());
}

// ---------------------------------------------------------------------------
// Traced fusion (training path). A trace keeps exactly the intermediates the
// hand-ordered backward pass needs: the concat input of each 1x1 fusion and
// its pre-activation output. Node ids: leaves are 0..n-1, fusion outputs are
// appended in execution order.
// ---------------------------------------------------------------------------

template <typename T>
struct FuseTrace {
  int left = 0, right = 0, out = 0;
  int param_index = 0;
  Tensor<T> concat;
  Tensor<T> pre_act;
};

template <typename T>
struct TreeTrace {
  int leaf_count = 0;
  std::vector<FuseTrace<T>> fuses;
};

namespace detail {

template <typename T>
Tensor<T> tree_reduce_traced(std::span<const Tensor<T>> features,
                             std::span<const ConvParams<T>> fuse_params, TreeTrace<T>& trace) {
  const std::size_t n = features.size();
  if (fuse_params.size() != n - 1) throw ShapeError("tree_reduce: fuse param count != n-1");
  trace.leaf_count = static_cast<int>(n);
  trace.fuses.clear();

  std::vector<std::pair<int, Tensor<T>>> level;  // (node id, value)
  level.reserve(n);
  for (std::size_t i = 0; i < n; ++i) level.emplace_back(static_cast<int>(i), features[i]);
  int next_id = static_cast<int>(n);
  std::size_t param_idx = 0;
  while (level.size() > 1) {
    std::vector<std::pair<int, Tensor<T>>> next;
    next.reserve((level.size() + 1) / 2);
    std::size_t i = 0;
    for (; i + 1 < level.size(); i += 2) {
      const auto& p = fuse_params[param_idx];
      check_fuse_args(level[i].second, level[i + 1].second, p);
      FuseTrace<T> ft;
      ft.left = level[i].first;
      ft.right = level[i + 1].first;
      ft.out = next_id;
      ft.param_index = static_cast<int>(param_idx);
      ft.concat = concat_channels(level[i].second, level[i + 1].second);
      ft.pre_act = conv2d_dilated(ft.concat, p, 1, 0);
      next.emplace_back(next_id, relu(ft.pre_act));
      trace.fuses.push_back(std::move(ft));
      ++next_id;
      ++param_idx;
    }
    if (i < level.size()) next.push_back(std::move(level[i]));
    level = std::move(next);
  }
  return std::move(level.front().second);
}

/// Adjoint of tree_reduce_traced: distributes the gradient at the tree root
/// back to every leaf; accumulates into the fuse params' gradients.
template <typename T>
std::vector<Tensor<T>> tree_backward(const TreeTrace<T>& trace,
                                     std::span<ConvParams<T>> fuse_params,
                                     const Tensor<T>& grad_root) {
  const int total_nodes = trace.leaf_count + static_cast<int>(trace.fuses.size());
  std::vector<Tensor<T>> node_grads(total_nodes);
  node_grads[total_nodes - 1] = grad_root;
  for (auto it = trace.fuses.rbegin(); it != trace.fuses.rend(); ++it) {
    const FuseTrace<T>& f = *it;
    Tensor<T>& g_out = node_grads[f.out];
    Tensor<T> g_pre = relu_backward(f.pre_act, g_out);
    Tensor<T> g_concat =
        conv2d_backward(f.concat, fuse_params[f.param_index], 1, 0, g_pre);
    auto [gl, gr] = split_channels(g_concat, f.concat.c() / 2);
    if (node_grads[f.left].empty()) node_grads[f.left] = std::move(gl);
    else add_inplace(node_grads[f.left], gl);
    if (node_grads[f.right].empty()) node_grads[f.right] = std::move(gr);
    else add_inplace(node_grads[f.right], gr);
    g_out = Tensor<T>();  // release
  }
  node_grads.resize(trace.leaf_count);
  return node_grads;
}

template <typename T>
Tensor<T> sum_features(const std::vector<Tensor<T>>& features) {
  Tensor<T> out = features.front();
  for (std::size_t i = 1; i < features.size(); ++i) add_inplace(out, features[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Block forward
// ---------------------------------------------------------------------------

/// One dilated block: applies the shared 3x3 kernel at dilation 1..max_dilation
/// (no activation), merges the multi-scale features (tree or sum), then
/// relu(fused + input) via the skip connection.
template <typename T>
Tensor<T> block_forward(const Tensor<T>& f_prev, const BlockParams<T>& block,
                        const NetworkConfig& config) {
  std::vector<Tensor<T>> dilated;
  dilated.reserve(config.max_dilation);
  for (int d = 1; d <= config.max_dilation; ++d) {
    dilated.push_back(conv2d_dilated(f_prev, block.shared_conv, d, d));
  }
  Tensor<T> fused =
      config.within_fusion_active()
          ? tree_reduce<T>(dilated, block.within_fuse)
          : detail::sum_features(dilated);
  return relu(add(fused, f_prev));
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

template <typename T>
struct BlockTrace {
  Tensor<T> input;
  TreeTrace<T> tree;   // empty when the within tree is inactive
  Tensor<T> pre_act;   // fused + input, before the block ReLU
};

template <typename T>
struct ForwardTrace {
  Tensor<T> input;
  Tensor<T> extract_pre;
  std::vector<BlockTrace<T>> blocks;
  TreeTrace<T> cross;  // empty when the across tree is inactive
  Tensor<T> rec_input;
};

/// Intermediate features captured during inference for visualization and
/// redundancy statistics.
template <typename T>
struct BlockTaps {
  std::vector<Tensor<T>> dilated;      // pre-fusion features, one per dilation
  std::vector<Tensor<T>> fused_pairs;  // first-level within-tree fusions
  Tensor<T> output;                    // post-skip, post-ReLU block output
};

template <typename T>
struct FeatureTaps {
  std::vector<BlockTaps<T>> blocks;
  std::vector<Tensor<T>> cross_fused_pairs;  // first-level across-tree fusions
};

template <typename T>
struct ForwardResult {
  Tensor<T> y;
  Tensor<T> residual;
};

/// The full model: feature extraction, num_blocks shared-weight dilated
/// blocks, optional across-block fusion tree, and 1x1 residual
/// reconstruction with Y = X - R.
template <typename T>
class Network {
 public:
  Network() = default;

  explicit Network(const NetworkConfig& config) : config_(config) {
    config.validate();
    const int c = config.channels;
    extract_ = ConvParams<T>(c, config.input_channels, 3);
    blocks_.resize(config.num_blocks);
    for (auto& b : blocks_) {
      b.shared_conv = ConvParams<T>(c, c, 3);
      if (config.within_fusion_active()) {
        b.within_fuse.reserve(config.max_dilation - 1);
        for (int i = 0; i < config.max_dilation - 1; ++i) {
          b.within_fuse.emplace_back(c, 2 * c, 1);
        }
      }
    }
    if (config.across_fusion_active()) {
      cross_fuse_.reserve(config.num_blocks - 1);
      for (int i = 0; i < config.num_blocks - 1; ++i) cross_fuse_.emplace_back(c, 2 * c, 1);
    }
    reconstruct_ = ConvParams<T>(config.input_channels, c, 1);
  }

  const NetworkConfig& config() const { return config_; }

  ConvParams<T>& extract() { return extract_; }
  ConvParams<T>& reconstruct() { return reconstruct_; }
  std::vector<BlockParams<T>>& blocks() { return blocks_; }
  std::vector<ConvParams<T>>& cross_fuse() { return cross_fuse_; }
  const ConvParams<T>& extract() const { return extract_; }
  const ConvParams<T>& reconstruct() const { return reconstruct_; }
  const std::vector<BlockParams<T>>& blocks() const { return blocks_; }
  const std::vector<ConvParams<T>>& cross_fuse() const { return cross_fuse_; }

  std::size_t count_parameters() const {
    std::size_t total = extract_.parameter_count() + reconstruct_.parameter_count();
    for (const auto& b : blocks_) {
      total += b.shared_conv.parameter_count();
      for (const auto& f : b.within_fuse) total += f.parameter_count();
    }
    for (const auto& f : cross_fuse_) total += f.parameter_count();
    return total;
  }

  /// Flat named views over every parameter tensor and its grad buffer, in
  /// the fixed serialization order.
  std::vector<ParamTensor<T>> parameters() {
    std::vector<ParamTensor<T>> out;
    auto push = [&out](const std::string& name, ConvParams<T>& p) {
      out.push_back({name + ".weight", p.weight.dims(), p.weight.data(), p.grad_weight.data(),
                     p.weight.size()});
      out.push_back({name + ".bias",
                     {static_cast<int>(p.bias.size()), 1, 1, 1},
                     p.bias.data(),
                     p.grad_bias.data(),
                     p.bias.size()});
    };
    push("extract", extract_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const std::string prefix = "block" + std::to_string(b);
      push(prefix + ".shared", blocks_[b].shared_conv);
      for (std::size_t j = 0; j < blocks_[b].within_fuse.size(); ++j) {
        push(prefix + ".fuse" + std::to_string(j), blocks_[b].within_fuse[j]);
      }
    }
    for (std::size_t j = 0; j < cross_fuse_.size(); ++j) {
      push("cross.fuse" + std::to_string(j), cross_fuse_[j]);
    }
    push("reconstruct", reconstruct_);
    return out;
  }

  void zero_grad() {
    extract_.zero_grad();
    reconstruct_.zero_grad();
    for (auto& b : blocks_) {
      b.shared_conv.zero_grad();
      for (auto& f : b.within_fuse) f.zero_grad();
    }
    for (auto& f : cross_fuse_) f.zero_grad();
  }

  /// Inference: forward pass with the output clamped to [0,1] and no trace.
  /// Pass `taps` to capture intermediate features.
  ForwardResult<T> infer(const Tensor<T>& x, FeatureTaps<T>* taps = nullptr) const {
    check_input(x);
    Tensor<T> f = relu(conv2d_dilated(x, extract_, 1, 1));
    if (taps) taps->blocks.assign(blocks_.size(), {});
    std::vector<Tensor<T>> block_outputs;
    const bool need_outputs = config_.across_fusion_active() || taps;
    if (need_outputs) block_outputs.reserve(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& block = blocks_[b];
      std::vector<Tensor<T>> dilated;
      dilated.reserve(config_.max_dilation);
      for (int d = 1; d <= config_.max_dilation; ++d) {
        dilated.push_back(conv2d_dilated(f, block.shared_conv, d, d));
      }
      std::vector<Tensor<T>>* pairs_out = taps ? &taps->blocks[b].fused_pairs : nullptr;
      Tensor<T> fused = config_.within_fusion_active()
                            ? tree_reduce<T>(dilated, block.within_fuse, pairs_out)
                            : detail::sum_features(dilated);
      f = relu(add(fused, f));
      if (taps) {
        taps->blocks[b].dilated = std::move(dilated);
        taps->blocks[b].output = f;
      }
      if (config_.across_fusion_active()) block_outputs.push_back(f);
    }
    Tensor<T> rec_in =
        config_.across_fusion_active()
            ? tree_reduce<T>(block_outputs, cross_fuse_,
                             taps ? &taps->cross_fused_pairs : nullptr)
            : std::move(f);
    Tensor<T> r = conv2d_dilated(rec_in, reconstruct_, 1, 0);
    Tensor<T> y = subtract_residual(x, r);
    return {clamp01(y), std::move(r)};
  }

  /// Training forward pass: no clamp, records the trace for backward().
  ForwardResult<T> forward_train(const Tensor<T>& x, ForwardTrace<T>& trace) const {
    check_input(x);
    trace = ForwardTrace<T>();
    trace.input = x;
    trace.extract_pre = conv2d_dilated(x, extract_, 1, 1);
    Tensor<T> f = relu(trace.extract_pre);
    trace.blocks.resize(blocks_.size());
    std::vector<Tensor<T>> block_outputs;
    if (config_.across_fusion_active()) block_outputs.reserve(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& block = blocks_[b];
      BlockTrace<T>& bt = trace.blocks[b];
      bt.input = f;
      std::vector<Tensor<T>> dilated;
      dilated.reserve(config_.max_dilation);
      for (int d = 1; d <= config_.max_dilation; ++d) {
        dilated.push_back(conv2d_dilated(f, block.shared_conv, d, d));
      }
      Tensor<T> fused = config_.within_fusion_active()
                            ? detail::tree_reduce_traced<T>(dilated, block.within_fuse, bt.tree)
                            : detail::sum_features(dilated);
      bt.pre_act = add(fused, f);
      f = relu(bt.pre_act);
      if (config_.across_fusion_active()) block_outputs.push_back(f);
    }
    trace.rec_input = config_.across_fusion_active()
                          ? detail::tree_reduce_traced<T>(block_outputs, cross_fuse_, trace.cross)
                          : std::move(f);
    Tensor<T> r = conv2d_dilated(trace.rec_input, reconstruct_, 1, 0);
    Tensor<T> y = subtract_residual(x, r);
    return {std::move(y), std::move(r)};
  }

  /// Accumulates parameter gradients for dL/dY. Call zero_grad() first when
  /// fresh gradients are wanted.
  void backward(const ForwardTrace<T>& trace, const Tensor<T>& grad_y) {
    // Y = X - R, so dL/dR = -dL/dY.
    Tensor<T> grad_r = grad_y;
    for (T& v : grad_r.flat()) v = -v;
    Tensor<T> grad_rec_in = conv2d_backward(trace.rec_input, reconstruct_, 1, 0, grad_r);

    const std::size_t nb = blocks_.size();
    std::vector<Tensor<T>> out_grads(nb);
    if (config_.across_fusion_active()) {
      out_grads = detail::tree_backward<T>(trace.cross, cross_fuse_, grad_rec_in);
    } else {
      out_grads[nb - 1] = std::move(grad_rec_in);
    }

    Tensor<T> carry;  // gradient w.r.t. the current block's input
    for (std::size_t bi = nb; bi-- > 0;) {
      const BlockTrace<T>& bt = trace.blocks[bi];
      Tensor<T> g = std::move(out_grads[bi]);
      if (!carry.empty()) {
        if (g.empty()) g = std::move(carry);
        else add_inplace(g, carry);
      }
      Tensor<T> g_pre = relu_backward(bt.pre_act, g);
      Tensor<T> g_input = g_pre;  // skip connection
      auto& block = blocks_[bi];
      if (config_.within_fusion_active()) {
        std::vector<Tensor<T>> leaf_grads =
            detail::tree_backward<T>(bt.tree, block.within_fuse, g_pre);
        for (int d = 1; d <= config_.max_dilation; ++d) {
          add_inplace(g_input, conv2d_backward(bt.input, block.shared_conv, d, d,
                                               leaf_grads[d - 1]));
        }
      } else {
        for (int d = 1; d <= config_.max_dilation; ++d) {
          add_inplace(g_input, conv2d_backward(bt.input, block.shared_conv, d, d, g_pre));
        }
      }
      carry = std::move(g_input);
    }
    Tensor<T> g_extract_pre = relu_backward(trace.extract_pre, carry);
    conv2d_backward(trace.input, extract_, 1, 1, g_extract_pre, /*compute_grad_input=*/false);
  }

 private:
  void check_input(const Tensor<T>& x) const {
    require_nonempty(x, "Network input");
    if (x.c() != config_.input_channels) {
      throw ShapeError("Network input has " + std::to_string(x.c()) + " channels, expected " +
                       std::to_string(config_.input_channels));
    }
  }

  static Tensor<T> subtract_residual(const Tensor<T>& x, const Tensor<T>& r) {
    require_same_shape(x, r, "residual subtraction");
    Tensor<T> y = x;
    const T* pr = r.data();
    T* py = y.data();
    for (std::size_t i = 0; i < y.size(); ++i) py[i] -= pr[i];
    return y;
  }

  NetworkConfig config_;
  ConvParams<T> extract_;
  std::vector<BlockParams<T>> blocks_;
  std::vector<ConvParams<T>> cross_fuse_;
  ConvParams<T> reconstruct_;
};

namespace detail {

template <typename T>
void init_conv(ConvParams<T>& p, Rng& rng) {
  // Zero-mean Gaussian with std = sqrt(2 / fan_in), zero bias. Values are
  // drawn in double and narrowed so float and double networks built from the
  // same seed hold the same parameters.
  const double fan_in =
      static_cast<double>(p.in_channels()) * p.kernel() * p.kernel();
  const double std_dev = std::sqrt(2.0 / fan_in);
  for (T& v : p.weight.flat()) v = static_cast<T>(std_dev * rng.normal());
}

}  // namespace detail

/// Allocates and initializes every parameter; deterministic given config.seed.
template <typename T>
Network<T> build_network(const NetworkConfig& config) {
  Network<T> net(config);
  Rng rng(config.seed);
  detail::init_conv(net.extract(), rng);
  for (auto& b : net.blocks()) {
    detail::init_conv(b.shared_conv, rng);
    for (auto& f : b.within_fuse) detail::init_conv(f, rng);
  }
  for (auto& f : net.cross_fuse()) detail::init_conv(f, rng);
  detail::init_conv(net.reconstruct(), rng);
  return net;
}

template <typename T>
std::size_t count_parameters(const Network<T>& net) {
  return net.count_parameters();
}

// ---------------------------------------------------------------------------
// Feature statistics (redundancy inspection)
// ---------------------------------------------------------------------------

/// Per-channel mean and population standard deviation over (N, H, W).
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

template <typename T>
ChannelStats channel_stats(const Tensor<T>& t) {
  require_nonempty(t, "channel_stats");
  ChannelStats stats;
  stats.mean.resize(t.c());
  stats.stddev.resize(t.c());
  const std::size_t plane = static_cast<std::size_t>(t.h()) * t.w();
  const double count = static_cast<double>(plane) * t.n();
  for (int c = 0; c < t.c(); ++c) {
    double sum = 0.0;
    for (int n = 0; n < t.n(); ++n) {
      const T* p = t.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) sum += static_cast<double>(p[i]);
    }
    const double mean = sum / count;
    double ssd = 0.0;
    for (int n = 0; n < t.n(); ++n) {
      const T* p = t.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) {
        const double d = static_cast<double>(p[i]) - mean;
        ssd += d * d;
      }
    }
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(ssd / count);
  }
  return stats;
}

struct FeatureStatsTriple {
  ChannelStats z1, z2, diff, fused;
};

/// Statistics backing the redundancy error bars: per-channel mean/std of two
/// adjacent features, their difference, and the fused result.
template <typename T>
FeatureStatsTriple feature_stats(const Tensor<T>& z1, const Tensor<T>& z2,
                                 const Tensor<T>& fused) {
  require_same_shape(z1, z2, "feature_stats");
  require_same_shape(z1, fused, "feature_stats");
  Tensor<T> diff = z1;
  const T* p2 = z2.data();
  T* pd = diff.data();
  for (std::size_t i = 0; i < diff.size(); ++i) pd[i] -= p2[i];
  return {channel_stats(z1), channel_stats(z2), channel_stats(diff), channel_stats(fused)};
}

}  // namespace tdfn
