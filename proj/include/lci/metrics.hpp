#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "lci/types.hpp"

namespace lci {

// Three-class report: confusion rows are true labels, columns predictions.
// Per-class F1 uses the 0/0 -> 0 convention; macro-F1 is the unweighted
// mean of the three per-class F1 scores.
struct MetricsReport {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> confusion{};
  std::int64_t total = 0;
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  double macro_f1 = 0.0;
};

MetricsReport compute_metrics(std::span<const LcClass> predictions,
                              std::span<const LcClass> labels);

// Human-readable block: confusion matrix plus the per-class table.
std::string format_metrics(const MetricsReport& report);

}  // namespace lci
