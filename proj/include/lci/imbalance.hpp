#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "lci/matrix.hpp"
#include "lci/types.hpp"

namespace lci {

struct ResampleConfig {
  std::array<double, kNumClasses> target_ratio = {27.0, 1.0, 1.0};  // No:L:R
  int k_neighbors = 5;
  std::uint64_t seed = 0;
};

// Inverse-frequency class weights. Construction guarantees the exact
// floating-point identity weight(c) * frequency(c) == 1.0 for every class.
struct ClassWeights {
  std::array<double, kNumClasses> weight{1.0, 1.0, 1.0};
  std::array<double, kNumClasses> frequency{0.0, 0.0, 0.0};
};

struct ThresholdSet {
  double tau_left = 0.5;
  double tau_right = 0.5;
};

struct ResampleReport {
  std::array<std::int64_t, kNumClasses> before{};
  std::array<std::int64_t, kNumClasses> after_smote{};
  std::array<std::int64_t, kNumClasses> after_tomek{};
};

// SMOTE over one class: each synthetic point is x + u * (nn - x) with
// u ~ U(0,1) and nn among the k Euclidean nearest neighbors of x. Distances
// and interpolation use mutually present dimensions only; synthetics
// inherit the base point's missing pattern. Deterministic under seed.
DataMatrix smote(const DataMatrix& samples, std::int64_t n_new, int k,
                 std::uint64_t seed);

// Cross-class mutual-nearest-neighbor pairs (i < j), Euclidean distance over
// mutually present dimensions, ties broken toward the lower index.
std::vector<std::pair<std::size_t, std::size_t>> tomek_links(
    const DataMatrix& x, const std::vector<LcClass>& y);

// SMOTE each minority class up to target_ratio (relative to the largest
// class), then drop both endpoints of every Tomek link.
std::pair<DataMatrix, std::vector<LcClass>> resample(const DataMatrix& x,
                                                     const std::vector<LcClass>& y,
                                                     const ResampleConfig& cfg,
                                                     ResampleReport* report = nullptr);

ClassWeights inverse_frequency_weights(const std::array<std::int64_t, kNumClasses>& counts);

// Decision rule: when a minority probability clears its threshold, predict
// the minority class with the larger p/tau ratio (ties toward Left);
// otherwise argmax.
LcClass apply_thresholds(std::span<const double> prob_row, const ThresholdSet& taus);

// Exhaustive grid search of (tau_left, tau_right) over {0.02, 0.04, ..,
// 0.50} maximizing macro-F1 of apply_thresholds; ties resolve toward the
// lexicographically smaller pair (favoring minority recall).
ThresholdSet calibrate_thresholds(const DataMatrix& probs,
                                  const std::vector<LcClass>& labels);

std::string format_resample_report(const ResampleReport& report);

}  // namespace lci
