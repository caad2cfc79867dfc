#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lci/imbalance.hpp"
#include "lci/matrix.hpp"
#include "lci/types.hpp"

namespace lci {

// Sentinel bin index for missing values in binned rows; histograms and
// trees route it through the learned missing direction.
inline constexpr std::uint16_t kMissingBinSentinel = 0xFFFF;

struct GBDTConfig {
  int max_bins = 255;
  int max_leaves = 31;
  int max_depth = 8;
  int min_samples_leaf = 20;
  double lambda = 1.0;        // L2 on leaf values
  double gamma = 0.0;         // per-split gain subtraction
  double learning_rate = 0.1;
  int n_rounds = 100;
  bool use_goss = false;
  double goss_a = 0.2;  // top fraction kept by |gradient|
  double goss_b = 0.1;  // remainder fraction sampled and amplified
  std::uint64_t seed = 0;

  void validate() const;
};

// Quantile bin boundaries per feature; missing values get a dedicated bin.
class BinMapper {
 public:
  // Boundaries at empirical quantiles of present values; features with
  // at most max_bins distinct values get one bin per distinct value.
  static BinMapper fit(const DataMatrix& x, int max_bins);

  std::size_t n_features() const { return boundaries_.size(); }
  // Number of finite bins for a feature (missing bin sits after them).
  int n_bins(std::size_t feature) const {
    return static_cast<int>(boundaries_[feature].size()) + 1;
  }
  const std::vector<double>& boundaries(std::size_t feature) const {
    return boundaries_[feature];
  }

  // Finite values map to [0, n_bins); absent values to the sentinel.
  std::uint16_t bin(std::size_t feature, double value, bool present) const;

  // Whole matrix to row-major binned form.
  std::vector<std::uint16_t> bin_matrix(const DataMatrix& x) const;

  std::vector<std::vector<double>>& mutable_boundaries() { return boundaries_; }

 private:
  std::vector<std::vector<double>> boundaries_;
};

// Per-bin gradient/hessian/count sums for one feature at one node; the
// missing bin is the final slot.
struct Histogram {
  std::vector<double> grad;
  std::vector<double> hess;
  std::vector<std::int64_t> count;
};

// G/H/count sums over the given sample rows for one binned feature column.
// Weights scale g and h when provided (empty span = unit weights).
Histogram build_histogram(std::span<const std::int32_t> rows,
                          std::span<const std::uint16_t> binned_column,
                          int n_finite_bins, std::span<const double> g,
                          std::span<const double> h,
                          std::span<const double> sample_weights);

// Regularized split gain: 1/2 (GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)) - gamma.
double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda, double gamma);

struct SplitCandidate {
  int feature = -1;
  int bin = -1;  // left branch takes bins <= bin
  bool missing_left = true;
  double gain = 0.0;
  double g_left = 0.0, h_left = 0.0;
  double g_right = 0.0, h_right = 0.0;
  std::int64_t count_left = 0, count_right = 0;
};

// Maximal-gain split over every (feature, boundary, missing-direction)
// triple honoring min_samples_leaf; empty when no positive gain exists.
// Ties resolve to the lowest feature, then lowest bin, then missing-left.
std::optional<SplitCandidate> best_split(const std::vector<Histogram>& node_histograms,
                                         const GBDTConfig& config,
                                         double g_total, double h_total,
                                         std::int64_t count_total);

struct TreeNode {
  int feature = -1;  // -1: leaf
  int bin = 0;
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf value -G/(H+lambda)
};

struct Tree {
  std::vector<TreeNode> nodes;       // nodes[0] is the root
  std::vector<double> split_gains;   // in growth order

  double predict_binned(const std::uint16_t* binned_row) const;
};

// Leaf-wise growth: repeatedly split the frontier leaf with the largest
// positive gain until max_leaves/max_depth/min_samples_leaf or no positive
// gain stops it.
Tree grow_tree(std::span<const double> g, std::span<const double> h,
               std::span<const std::uint16_t> binned, std::size_t n_features,
               const BinMapper& mapper, const GBDTConfig& config,
               std::span<const std::int32_t> rows);

struct GossSample {
  std::vector<std::int32_t> rows;
  std::vector<double> amplification;  // parallel to rows
};

// Keeps the ceil(a*N) largest |gradient| rows plus ceil(b*N) uniformly
// sampled from the rest, amplified by (1-a)/b.
GossSample goss_select(std::span<const double> gradient_norms, double a, double b,
                       std::uint64_t seed);

// Weighted softmax cross-entropy: loss, per-class gradients and hessians.
struct SoftmaxGrad {
  double loss = 0.0;
  std::vector<double> g;  // n x C row-major
  std::vector<double> h;
};
SoftmaxGrad softmax_objective(std::span<const double> logits, std::size_t n_rows,
                              std::span<const LcClass> labels,
                              const ClassWeights& weights);

struct GBDTModel {
  GBDTConfig config;
  BinMapper mapper;
  std::array<double, kNumClasses> base_score{};
  std::vector<std::array<Tree, kNumClasses>> rounds;
  ClassWeights class_weights;
  std::vector<double> train_loss;  // per round, before that round's trees

  bool trained() const { return mapper.n_features() > 0; }
};

// Fits bins on x, then boosts n_rounds times (one tree per class per
// round). Per-sample weights fold into g and h. Throws Error{SingleClass}
// when labels carry fewer than two classes.
GBDTModel train_gbdt(const DataMatrix& x, const std::vector<LcClass>& y,
                     const ClassWeights& weights, const GBDTConfig& config);

// Row-normalized class probabilities (n x 3, row-major).
std::vector<double> predict_proba(const GBDTModel& model, const DataMatrix& x);

}  // namespace lci
