#include "lci/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lci/error.hpp"
#include "lci/kernels.hpp"
#include "lci/metrics.hpp"
#include "lci/rng.hpp"

namespace lci {
namespace {

double masked_distance2(const DataMatrix& m, std::size_t a, std::size_t b) {
  std::size_t shared = 0;
  const double d = kernels::masked_squared_distance(
      m.values.data() + a * m.cols, m.present.data() + a * m.cols,
      m.values.data() + b * m.cols, m.present.data() + b * m.cols, m.cols, &shared);
  // No shared dimensions: maximally distant rather than distance zero.
  return shared == 0 ? std::numeric_limits<double>::infinity() : d;
}

}  // namespace

DataMatrix smote(const DataMatrix& samples, std::int64_t n_new, int k,
                 std::uint64_t seed) {
  const std::size_t n = samples.rows();
  if (n < 2 || k < 1 || static_cast<std::size_t>(k) > n - 1) {
    throw Error(ErrorCode::TooFewSamples,
                "SMOTE needs >= 2 samples and 1 <= k <= n-1 (n=" + std::to_string(n) +
                    ", k=" + std::to_string(k) + ")");
  }
  DataMatrix out(samples.cols);
  if (n_new <= 0) return out;
  out.values.reserve(static_cast<std::size_t>(n_new) * samples.cols);
  out.present.reserve(static_cast<std::size_t>(n_new) * samples.cols);

  // k nearest neighbors per base point, ties toward the lower index.
  std::vector<std::vector<std::size_t>> knn(n);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.emplace_back(masked_distance2(samples, i, j), j);
    }
    std::sort(dist.begin(), dist.end());
    knn[i].reserve(k);
    for (int t = 0; t < k; ++t) knn[i].push_back(dist[t].second);
  }

  Rng rng(seed);
  std::vector<double> row(samples.cols);
  std::vector<std::uint8_t> mask(samples.cols);
  for (std::int64_t s = 0; s < n_new; ++s) {
    const std::size_t base = static_cast<std::size_t>(s) % n;
    const std::size_t nn = knn[base][rng.uniform_below(static_cast<std::uint64_t>(k))];
    const double u = rng.uniform();
    for (std::size_t c = 0; c < samples.cols; ++c) {
      const bool bp = samples.is_present(base, c);
      const bool np = samples.is_present(nn, c);
      mask[c] = bp ? 1 : 0;
      if (bp && np) {
        row[c] = samples.at(base, c) + u * (samples.at(nn, c) - samples.at(base, c));
      } else if (bp) {
        row[c] = samples.at(base, c);
      } else {
        row[c] = 0.0;
      }
    }
    out.push_row(row, mask);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> tomek_links(
    const DataMatrix& x, const std::vector<LcClass>& y) {
  const std::size_t n = x.rows();
  if (n < 2) return {};
  if (y.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "labels do not match matrix rows");
  }
  std::vector<std::size_t> nearest(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = masked_distance2(x, i, j);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    nearest[i] = arg;
  }
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nearest[i];
    if (i < j && nearest[j] == i && y[i] != y[j]) links.emplace_back(i, j);
  }
  return links;
}

std::pair<DataMatrix, std::vector<LcClass>> resample(const DataMatrix& x,
                                                     const std::vector<LcClass>& y,
                                                     const ResampleConfig& cfg,
                                                     ResampleReport* report) {
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::LengthMismatch, "labels do not match matrix rows");
  }
  std::array<std::int64_t, kNumClasses> counts{};
  for (LcClass c : y) counts[static_cast<int>(c)]++;
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::TooFewSamples,
                  std::string("class ") + lc_class_name(static_cast<LcClass>(c)) +
                      " is empty");
    }
  }

  const int ref = static_cast<int>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());

  DataMatrix combined = x;
  std::vector<LcClass> labels = y;
  std::array<std::int64_t, kNumClasses> after = counts;
  Rng rng(cfg.seed);

  for (int c = 0; c < kNumClasses; ++c) {
    if (c == ref) continue;
    const auto target = static_cast<std::int64_t>(
        std::llround(static_cast<double>(counts[ref]) * cfg.target_ratio[c] /
                     cfg.target_ratio[ref]));
    const std::int64_t n_new = target - counts[c];
    if (n_new <= 0) continue;

    DataMatrix members(x.cols);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (static_cast<int>(y[i]) == c) members.push_row(x.row(i), x.row_mask(i));
    }
    const int k = std::min<std::int64_t>(cfg.k_neighbors,
                                         static_cast<std::int64_t>(members.rows()) - 1);
    if (k < 1) {
      throw Error(ErrorCode::TooFewSamples,
                  std::string("class ") + lc_class_name(static_cast<LcClass>(c)) +
                      " too small for SMOTE");
    }
    const DataMatrix synth =
        smote(members, n_new, k, mix_seed(rng.next_u64(), static_cast<std::uint64_t>(c)));
    for (std::size_t i = 0; i < synth.rows(); ++i) {
      combined.push_row(synth.row(i), synth.row_mask(i));
      labels.push_back(static_cast<LcClass>(c));
    }
    after[c] += static_cast<std::int64_t>(synth.rows());
  }

  const auto links = tomek_links(combined, labels);
  std::vector<std::uint8_t> drop(labels.size(), 0);
  for (const auto& [i, j] : links) {
    drop[i] = 1;  // both endpoints removed
    drop[j] = 1;
  }
  DataMatrix kept(combined.cols);
  std::vector<LcClass> kept_labels;
  std::array<std::int64_t, kNumClasses> final_counts{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (drop[i]) continue;
    kept.push_row(combined.row(i), combined.row_mask(i));
    kept_labels.push_back(labels[i]);
    final_counts[static_cast<int>(labels[i])]++;
  }

  if (report) {
    report->before = counts;
    report->after_smote = after;
    report->after_tomek = final_counts;
  }
  return {std::move(kept), std::move(kept_labels)};
}

ClassWeights inverse_frequency_weights(
    const std::array<std::int64_t, kNumClasses>& counts) {
  std::int64_t total = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] <= 0) {
      throw Error(ErrorCode::EmptyClass,
                  std::string("class ") + lc_class_name(static_cast<LcClass>(c)) +
                      " has no samples");
    }
    total += counts[c];
  }
  ClassWeights out;
  for (int c = 0; c < kNumClasses; ++c) {
    const double f = static_cast<double>(counts[c]) / static_cast<double>(total);
    out.frequency[c] = f;
    // Nudge 1/f by ulps until w*f == 1.0 holds exactly; rounding can leave
    // the naive quotient one ulp off.
    double w = 1.0 / f;
    if (w * f != 1.0) {
      for (int step = 1; step <= 4 && w * f != 1.0; ++step) {
        const double up = std::nextafter(w, std::numeric_limits<double>::infinity());
        if (up * f == 1.0) {
          w = up;
          break;
        }
        const double down = std::nextafter(w, 0.0);
        if (down * f == 1.0) {
          w = down;
          break;
        }
        w = step % 2 == 1 ? up : down;
      }
    }
    out.weight[c] = w;
  }
  return out;
}

LcClass apply_thresholds(std::span<const double> p, const ThresholdSet& taus) {
  if (p.size() != kNumClasses) {
    throw Error(ErrorCode::InvalidArgument, "probability row must have 3 entries");
  }
  const double sum = p[0] + p[1] + p[2];
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidArgument, "probability row must sum to 1");
  }
  const bool left_fires = p[1] >= taus.tau_left;
  const bool right_fires = p[2] >= taus.tau_right;
  if (left_fires || right_fires) {
    const double ratio_left = p[1] / taus.tau_left;
    const double ratio_right = p[2] / taus.tau_right;
    return ratio_left >= ratio_right ? LcClass::Left : LcClass::Right;
  }
  int arg = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (p[c] > p[arg]) arg = c;
  }
  return static_cast<LcClass>(arg);
}

ThresholdSet calibrate_thresholds(const DataMatrix& probs,
                                  const std::vector<LcClass>& labels) {
  const std::size_t n = probs.rows();
  if (n == 0 || probs.cols != kNumClasses || labels.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "bad calibration inputs");
  }
  bool multi = false;
  for (std::size_t i = 1; i < n; ++i) multi |= labels[i] != labels[0];
  if (!multi) {
    throw Error(ErrorCode::DegenerateInput, "calibration labels are single-class");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = probs.row(i);
    if (std::abs(row[0] + row[1] + row[2] - 1.0) > 1e-6) {
      throw Error(ErrorCode::InvalidArgument, "probability rows must sum to 1");
    }
  }

  ThresholdSet best;
  double best_f1 = -1.0;
  std::vector<LcClass> preds(n);
  for (int li = 1; li <= 25; ++li) {
    for (int ri = 1; ri <= 25; ++ri) {
      const ThresholdSet taus{0.02 * li, 0.02 * ri};
      for (std::size_t i = 0; i < n; ++i) {
        preds[i] = apply_thresholds(probs.row(i), taus);
      }
      const double f1 = compute_metrics(preds, labels).macro_f1;
      if (f1 > best_f1) {  // strict: first (smallest) pair wins ties
        best_f1 = f1;
        best = taus;
      }
    }
  }
  return best;
}

std::string format_resample_report(const ResampleReport& r) {
  std::ostringstream out;
  char buf[160];
  out << "class      before  after_smote  after_tomek\n";
  for (int c = 0; c < kNumClasses; ++c) {
    std::snprintf(buf, sizeof(buf), "%-9s %7lld %12lld %12lld\n",
                  lc_class_name(static_cast<LcClass>(c)),
                  static_cast<long long>(r.before[c]),
                  static_cast<long long>(r.after_smote[c]),
                  static_cast<long long>(r.after_tomek[c]));
    out << buf;
  }
  return out.str();
}

}  // namespace lci
