#include "lci/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "lci/error.hpp"

namespace lci {

MetricsReport compute_metrics(std::span<const LcClass> predictions,
                              std::span<const LcClass> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) {
    throw Error(ErrorCode::EmptyInput, "no samples to score");
  }

  MetricsReport r;
  r.total = static_cast<std::int64_t>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    r.confusion[static_cast<int>(labels[i])][static_cast<int>(predictions[i])]++;
  }

  std::int64_t trace = 0;
  for (int c = 0; c < kNumClasses; ++c) trace += r.confusion[c][c];
  r.accuracy = static_cast<double>(trace) / static_cast<double>(r.total);

  for (int c = 0; c < kNumClasses; ++c) {
    const auto tp = r.confusion[c][c];
    std::int64_t fp = 0, fn = 0;
    for (int o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      fp += r.confusion[o][c];
      fn += r.confusion[c][o];
    }
    r.precision[c] = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    r.recall[c] = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    const double pr = r.precision[c] + r.recall[c];
    r.f1[c] = pr == 0.0 ? 0.0 : 2.0 * r.precision[c] * r.recall[c] / pr;
    r.macro_f1 += r.f1[c];
  }
  r.macro_f1 /= kNumClasses;
  return r;
}

std::string format_metrics(const MetricsReport& r) {
  std::ostringstream out;
  char buf[128];
  out << "confusion (rows=true, cols=pred):\n";
  out << "            NoLC   LeftLC  RightLC\n";
  for (int c = 0; c < kNumClasses; ++c) {
    std::snprintf(buf, sizeof(buf), "%-9s %7lld %8lld %8lld\n",
                  lc_class_name(static_cast<LcClass>(c)),
                  static_cast<long long>(r.confusion[c][0]),
                  static_cast<long long>(r.confusion[c][1]),
                  static_cast<long long>(r.confusion[c][2]));
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "accuracy %.4f  macro_f1 %.4f\n", r.accuracy,
                r.macro_f1);
  out << buf;
  for (int c = 0; c < kNumClasses; ++c) {
    std::snprintf(buf, sizeof(buf), "%-9s precision %.4f recall %.4f f1 %.4f\n",
                  lc_class_name(static_cast<LcClass>(c)), r.precision[c], r.recall[c],
                  r.f1[c]);
    out << buf;
  }
  return out.str();
}

}  // namespace lci
