#include "lci/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "lci/error.hpp"
#include "lci/rng.hpp"

namespace lci {

void GBDTConfig::validate() const {
  if (max_bins < 2 || max_bins > 65000 || max_leaves < 1 || max_depth < 1 ||
      min_samples_leaf < 1 || lambda < 0.0 || gamma < 0.0 || learning_rate <= 0.0 ||
      n_rounds < 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid GBDT configuration");
  }
  if (use_goss && (goss_a <= 0.0 || goss_b < 0.0 || goss_a + goss_b > 1.0)) {
    throw Error(ErrorCode::InvalidFractions, "need 0 < a, 0 <= b, a+b <= 1");
  }
}

BinMapper BinMapper::fit(const DataMatrix& x, int max_bins) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::EmptyMatrix, "cannot fit bins on an empty matrix");
  }
  BinMapper mapper;
  mapper.boundaries_.resize(x.cols);
  std::vector<double> values;
  for (std::size_t f = 0; f < x.cols; ++f) {
    values.clear();
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (x.is_present(r, f)) values.push_back(x.at(r, f));
    }
    auto& bounds = mapper.boundaries_[f];
    bounds.clear();
    if (values.empty()) continue;  // single (missing-only) bin
    std::sort(values.begin(), values.end());
    std::vector<double> distinct;
    distinct.push_back(values[0]);
    for (double v : values) {
      if (v != distinct.back()) distinct.push_back(v);
    }
    if (static_cast<int>(distinct.size()) <= max_bins) {
      // One bin per distinct value, boundaries at midpoints.
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        bounds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
      }
      continue;
    }
    // Quantile boundaries over the sorted values, deduplicated.
    const std::size_t n = values.size();
    for (int v = 1; v < max_bins; ++v) {
      const std::size_t idx = v * n / max_bins;
      const double candidate = values[idx];
      if (bounds.empty() || candidate > bounds.back()) bounds.push_back(candidate);
    }
    // Boundaries are upper-inclusive; drop one equal to the global max so
    // the top bin stays nonempty.
    while (!bounds.empty() && bounds.back() >= values.back()) bounds.pop_back();
  }
  return mapper;
}

std::uint16_t BinMapper::bin(std::size_t feature, double value, bool present) const {
  if (!present) return kMissingBinSentinel;
  const auto& bounds = boundaries_[feature];
  const auto it = std::lower_bound(bounds.begin(), bounds.end(), value);
  return static_cast<std::uint16_t>(it - bounds.begin());
}

std::vector<std::uint16_t> BinMapper::bin_matrix(const DataMatrix& x) const {
  std::vector<std::uint16_t> binned(x.rows() * x.cols);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t f = 0; f < x.cols; ++f) {
      binned[r * x.cols + f] = bin(f, x.at(r, f), x.is_present(r, f));
    }
  }
  return binned;
}

Histogram build_histogram(std::span<const std::int32_t> rows,
                          std::span<const std::uint16_t> binned_column,
                          int n_finite_bins, std::span<const double> g,
                          std::span<const double> h,
                          std::span<const double> sample_weights) {
  Histogram hist;
  hist.grad.assign(n_finite_bins + 1, 0.0);
  hist.hess.assign(n_finite_bins + 1, 0.0);
  hist.count.assign(n_finite_bins + 1, 0);
  for (const std::int32_t r : rows) {
    const std::uint16_t b = binned_column[r];
    const int slot = b == kMissingBinSentinel ? n_finite_bins : b;
    const double w = sample_weights.empty() ? 1.0 : sample_weights[r];
    hist.grad[slot] += w * g[r];
    hist.hess[slot] += w * h[r];
    hist.count[slot] += 1;
  }
  return hist;
}

double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda, double gamma) {
  const double g_sum = g_left + g_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) +
                g_right * g_right / (h_right + lambda) -
                g_sum * g_sum / (h_left + h_right + lambda)) -
         gamma;
}

std::optional<SplitCandidate> best_split(const std::vector<Histogram>& node_histograms,
                                         const GBDTConfig& config,
                                         double g_total, double h_total,
                                         std::int64_t count_total) {
  SplitCandidate best;
  bool found = false;
  for (std::size_t f = 0; f < node_histograms.size(); ++f) {
    const Histogram& hist = node_histograms[f];
    const int finite = static_cast<int>(hist.grad.size()) - 1;
    if (finite < 2) continue;
    const double g_miss = hist.grad[finite];
    const double h_miss = hist.hess[finite];
    const std::int64_t c_miss = hist.count[finite];

    double g_cum = 0.0, h_cum = 0.0;
    std::int64_t c_cum = 0;
    for (int v = 0; v + 1 < finite; ++v) {
      g_cum += hist.grad[v];
      h_cum += hist.hess[v];
      c_cum += hist.count[v];
      for (const bool missing_left : {true, false}) {
        const double g_left = g_cum + (missing_left ? g_miss : 0.0);
        const double h_left = h_cum + (missing_left ? h_miss : 0.0);
        const std::int64_t c_left = c_cum + (missing_left ? c_miss : 0);
        const double g_right = g_total - g_left;
        const double h_right = h_total - h_left;
        const std::int64_t c_right = count_total - c_left;
        if (c_left < config.min_samples_leaf || c_right < config.min_samples_leaf) {
          continue;
        }
        const double gain =
            split_gain(g_left, h_left, g_right, h_right, config.lambda, config.gamma);
        if (!found || gain > best.gain) {
          found = true;
          best.feature = static_cast<int>(f);
          best.bin = v;
          best.missing_left = missing_left;
          best.gain = gain;
          best.g_left = g_left;
          best.h_left = h_left;
          best.g_right = g_right;
          best.h_right = h_right;
          best.count_left = c_left;
          best.count_right = c_right;
        }
      }
    }
  }
  if (!found || best.gain <= 0.0) return std::nullopt;
  return best;
}

double Tree::predict_binned(const std::uint16_t* binned_row) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    const std::uint16_t b = binned_row[n.feature];
    const bool go_left =
        b == kMissingBinSentinel ? n.missing_left : b <= static_cast<std::uint16_t>(n.bin);
    node = go_left ? n.left : n.right;
  }
  return nodes[node].value;
}

namespace {

struct GrowNode {
  int node_id;
  int depth;
  std::size_t begin, end;  // range in the shared row index array
  double g_sum, h_sum;
  std::optional<SplitCandidate> split;
};

std::vector<Histogram> node_histograms(std::span<const std::int32_t> rows,
                                       std::span<const std::uint16_t> binned,
                                       std::size_t n_features,
                                       const BinMapper& mapper,
                                       std::span<const double> g,
                                       std::span<const double> h) {
  std::vector<Histogram> hists(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    const int finite = mapper.n_bins(f);
    hists[f].grad.assign(finite + 1, 0.0);
    hists[f].hess.assign(finite + 1, 0.0);
    hists[f].count.assign(finite + 1, 0);
  }
  for (const std::int32_t r : rows) {
    const std::uint16_t* row = binned.data() + static_cast<std::size_t>(r) * n_features;
    const double gr = g[r];
    const double hr = h[r];
    for (std::size_t f = 0; f < n_features; ++f) {
      const std::uint16_t b = row[f];
      const int slot = b == kMissingBinSentinel ? mapper.n_bins(f) : b;
      hists[f].grad[slot] += gr;
      hists[f].hess[slot] += hr;
      hists[f].count[slot] += 1;
    }
  }
  return hists;
}

}  // namespace

Tree grow_tree(std::span<const double> g, std::span<const double> h,
               std::span<const std::uint16_t> binned, std::size_t n_features,
               const BinMapper& mapper, const GBDTConfig& config,
               std::span<const std::int32_t> rows) {
  Tree tree;
  std::vector<std::int32_t> index(rows.begin(), rows.end());

  double g_root = 0.0, h_root = 0.0;
  for (const std::int32_t r : index) {
    g_root += g[r];
    h_root += h[r];
  }
  tree.nodes.push_back(TreeNode{});
  tree.nodes[0].value = -g_root / (h_root + config.lambda);

  struct FrontierEntry {
    double gain;
    int order;  // creation order breaks gain ties deterministically
    int slot;   // index into the pending vector
  };
  const auto cmp = [](const FrontierEntry& a, const FrontierEntry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.order > b.order;
  };
  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, decltype(cmp)> frontier(cmp);
  std::vector<GrowNode> pending;

  const auto consider = [&](int node_id, int depth, std::size_t begin, std::size_t end,
                            double g_sum, double h_sum) {
    if (depth >= config.max_depth) return;
    const std::span<const std::int32_t> node_rows(index.data() + begin, end - begin);
    const auto hists = node_histograms(node_rows, binned, n_features, mapper, g, h);
    const auto split = best_split(hists, config, g_sum, h_sum,
                                  static_cast<std::int64_t>(end - begin));
    if (!split) return;
    pending.push_back(GrowNode{node_id, depth, begin, end, g_sum, h_sum, split});
    frontier.push(FrontierEntry{split->gain, static_cast<int>(pending.size()) - 1,
                                static_cast<int>(pending.size()) - 1});
  };

  consider(0, 0, 0, index.size(), g_root, h_root);
  int leaves = 1;
  while (!frontier.empty() && leaves < config.max_leaves) {
    const GrowNode grow = pending[frontier.top().slot];
    frontier.pop();
    const SplitCandidate& split = *grow.split;

    const std::uint16_t* col_base = binned.data();
    const auto goes_left = [&](std::int32_t r) {
      const std::uint16_t b = col_base[static_cast<std::size_t>(r) * n_features +
                                       static_cast<std::size_t>(split.feature)];
      return b == kMissingBinSentinel ? split.missing_left
                                      : b <= static_cast<std::uint16_t>(split.bin);
    };
    const auto mid_it = std::stable_partition(index.begin() + grow.begin,
                                              index.begin() + grow.end, goes_left);
    const std::size_t mid = static_cast<std::size_t>(mid_it - index.begin());

    TreeNode& parent = tree.nodes[grow.node_id];
    parent.feature = split.feature;
    parent.bin = split.bin;
    parent.missing_left = split.missing_left;
    parent.left = static_cast<int>(tree.nodes.size());
    parent.right = parent.left + 1;

    TreeNode left_leaf, right_leaf;
    left_leaf.value = -split.g_left / (split.h_left + config.lambda);
    right_leaf.value = -split.g_right / (split.h_right + config.lambda);
    tree.nodes.push_back(left_leaf);
    tree.nodes.push_back(right_leaf);
    tree.split_gains.push_back(split.gain);
    ++leaves;

    consider(parent.left, grow.depth + 1, grow.begin, mid, split.g_left, split.h_left);
    consider(parent.right, grow.depth + 1, mid, grow.end, split.g_right, split.h_right);
  }
  return tree;
}

GossSample goss_select(std::span<const double> gradient_norms, double a, double b,
                       std::uint64_t seed) {
  if (a <= 0.0 || b < 0.0 || a + b > 1.0) {
    throw Error(ErrorCode::InvalidFractions, "need 0 < a, 0 <= b, a+b <= 1");
  }
  const auto n = static_cast<std::int64_t>(gradient_norms.size());
  GossSample sample;
  if (n == 0) return sample;

  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int32_t x, std::int32_t y) {
    if (gradient_norms[x] != gradient_norms[y]) {
      return gradient_norms[x] > gradient_norms[y];
    }
    return x < y;
  });

  const auto top = std::min<std::int64_t>(
      n, static_cast<std::int64_t>(std::ceil(a * static_cast<double>(n) - 1e-12)));
  for (std::int64_t i = 0; i < top; ++i) {
    sample.rows.push_back(order[i]);
    sample.amplification.push_back(1.0);
  }
  const std::int64_t rest = n - top;
  const auto want = std::min<std::int64_t>(
      rest,
      b <= 0.0 ? 0
               : static_cast<std::int64_t>(std::ceil(b * static_cast<double>(n) - 1e-12)));
  if (want > 0) {
    // Partial Fisher-Yates over the small-gradient tail.
    std::vector<std::int32_t> tail(order.begin() + top, order.end());
    Rng rng(seed);
    const double amplification = (1.0 - a) / b;
    for (std::int64_t i = 0; i < want; ++i) {
      const auto j = i + static_cast<std::int64_t>(
                             rng.uniform_below(static_cast<std::uint64_t>(rest - i)));
      std::swap(tail[i], tail[j]);
      sample.rows.push_back(tail[i]);
      sample.amplification.push_back(amplification);
    }
  }
  // Ascending row order keeps histogram accumulation order identical to a
  // full-data pass (a=1, b=0 must reproduce the unsampled model bit-exactly).
  std::vector<std::size_t> perm(sample.rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    return sample.rows[x] < sample.rows[y];
  });
  GossSample sorted;
  sorted.rows.reserve(perm.size());
  sorted.amplification.reserve(perm.size());
  for (const std::size_t i : perm) {
    sorted.rows.push_back(sample.rows[i]);
    sorted.amplification.push_back(sample.amplification[i]);
  }
  return sorted;
}

SoftmaxGrad softmax_objective(std::span<const double> logits, std::size_t n_rows,
                              std::span<const LcClass> labels,
                              const ClassWeights& weights) {
  if (logits.size() != n_rows * kNumClasses || labels.size() != n_rows) {
    throw Error(ErrorCode::ShapeMismatch, "logits/labels shape mismatch");
  }
  SoftmaxGrad out;
  out.g.assign(n_rows * kNumClasses, 0.0);
  out.h.assign(n_rows * kNumClasses, 0.0);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double* z = logits.data() + i * kNumClasses;
    const double m = std::max({z[0], z[1], z[2]});
    double denom = 0.0;
    double p[kNumClasses];
    for (int c = 0; c < kNumClasses; ++c) {
      p[c] = std::exp(z[c] - m);
      denom += p[c];
    }
    const int label = static_cast<int>(labels[i]);
    const double w = weights.weight[label];
    for (int c = 0; c < kNumClasses; ++c) {
      p[c] /= denom;
      const double y = c == label ? 1.0 : 0.0;
      out.g[i * kNumClasses + c] = w * (p[c] - y);
      out.h[i * kNumClasses + c] = w * p[c] * (1.0 - p[c]);
    }
    out.loss -= w * std::log(std::max(p[label], 1e-300));
  }
  out.loss /= static_cast<double>(n_rows);
  return out;
}

GBDTModel train_gbdt(const DataMatrix& x, const std::vector<LcClass>& y,
                     const ClassWeights& weights, const GBDTConfig& config) {
  config.validate();
  const std::size_t n = x.rows();
  if (y.size() != n || n == 0) {
    throw Error(ErrorCode::ShapeMismatch, "labels do not match matrix rows");
  }
  std::array<std::int64_t, kNumClasses> counts{};
  for (LcClass c : y) counts[static_cast<int>(c)]++;
  int present_classes = 0;
  for (auto c : counts) present_classes += c > 0 ? 1 : 0;
  if (present_classes < 2) {
    throw Error(ErrorCode::SingleClass, "training labels carry a single class");
  }

  GBDTModel model;
  model.config = config;
  model.class_weights = weights;
  model.mapper = BinMapper::fit(x, config.max_bins);
  const auto binned = model.mapper.bin_matrix(x);
  const std::size_t n_features = x.cols;

  for (int c = 0; c < kNumClasses; ++c) {
    const double prior =
        std::max(static_cast<double>(counts[c]), 0.5) / static_cast<double>(n);
    model.base_score[c] = std::log(prior);
  }

  std::vector<double> logits(n * kNumClasses);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < kNumClasses; ++c) {
      logits[i * kNumClasses + c] = model.base_score[c];
    }
  }

  std::vector<std::int32_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  std::vector<double> g_class(n), h_class(n), norms(n);
  for (int round = 0; round < config.n_rounds; ++round) {
    const SoftmaxGrad grad = softmax_objective(logits, n, y, weights);
    model.train_loss.push_back(grad.loss);

    std::span<const std::int32_t> rows(all_rows);
    GossSample goss;
    std::vector<double> amp;
    if (config.use_goss) {
      for (std::size_t i = 0; i < n; ++i) {
        norms[i] = std::abs(grad.g[i * kNumClasses]) +
                   std::abs(grad.g[i * kNumClasses + 1]) +
                   std::abs(grad.g[i * kNumClasses + 2]);
      }
      goss = goss_select(norms, config.goss_a, config.goss_b,
                         mix_seed(config.seed, static_cast<std::uint64_t>(round)));
      rows = goss.rows;
      amp.assign(n, 1.0);
      for (std::size_t i = 0; i < goss.rows.size(); ++i) {
        amp[goss.rows[i]] = goss.amplification[i];
      }
    }

    model.rounds.emplace_back();
    for (int c = 0; c < kNumClasses; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const double a = amp.empty() ? 1.0 : amp[i];
        g_class[i] = a * grad.g[i * kNumClasses + c];
        h_class[i] = a * grad.h[i * kNumClasses + c];
      }
      Tree tree = grow_tree(g_class, h_class, binned, n_features, model.mapper,
                            config, rows);
      for (std::size_t i = 0; i < n; ++i) {
        logits[i * kNumClasses + c] +=
            config.learning_rate * tree.predict_binned(binned.data() + i * n_features);
      }
      model.rounds.back()[c] = std::move(tree);
    }
  }
  return model;
}

std::vector<double> predict_proba(const GBDTModel& model, const DataMatrix& x) {
  const std::size_t n = x.rows();
  const auto binned = model.mapper.bin_matrix(x);
  std::vector<double> probs(n * kNumClasses);
  for (std::size_t i = 0; i < n; ++i) {
    double z[kNumClasses];
    for (int c = 0; c < kNumClasses; ++c) z[c] = model.base_score[c];
    const std::uint16_t* row = binned.data() + i * x.cols;
    for (const auto& round : model.rounds) {
      for (int c = 0; c < kNumClasses; ++c) {
        z[c] += model.config.learning_rate * round[c].predict_binned(row);
      }
    }
    const double m = std::max({z[0], z[1], z[2]});
    double denom = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
      probs[i * kNumClasses + c] = std::exp(z[c] - m);
      denom += probs[i * kNumClasses + c];
    }
    for (int c = 0; c < kNumClasses; ++c) probs[i * kNumClasses + c] /= denom;
  }
  return probs;
}

}  // namespace lci
