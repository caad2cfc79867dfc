#include <doctest.h>

#include <cmath>
#include <limits>

#include "lci/error.hpp"
#include "lci/imbalance.hpp"
#include "lci/metrics.hpp"
#include "lci/rng.hpp"

using namespace lci;

namespace {

DataMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
  DataMatrix m(rows.empty() ? 0 : rows[0].size());
  for (const auto& r : rows) m.push_row(r);
  return m;
}

// Independent O(N^2) Tomek oracle: mutual nearest neighbors across classes.
std::vector<std::pair<std::size_t, std::size_t>> tomek_oracle(
    const DataMatrix& x, const std::vector<LcClass>& y) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> nn(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double diff = x.at(i, c) - x.at(j, c);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    nn[i] = arg;
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < nn[i] && nn[nn[i]] == i && y[i] != y[nn[i]]) out.emplace_back(i, nn[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("smote: zero requests, forced geometry, identity") {
  const auto base = matrix_from({{0.0, 0.0}, {1.0, 2.0}});
  CHECK(smote(base, 0, 1, 1).rows() == 0);

  // Two points with k=1: every synthetic lies on the segment.
  const auto synth = smote(base, 50, 1, 42);
  REQUIRE(synth.rows() == 50);
  for (std::size_t i = 0; i < synth.rows(); ++i) {
    const double x = synth.at(i, 0);
    const double y = synth.at(i, 1);
    // Segment from (0,0) to (1,2): y = 2x, x in [0,1].
    CHECK(std::abs(y - 2.0 * x) < 1e-9);
    CHECK(x >= -1e-12);
    CHECK(x <= 1.0 + 1e-12);
  }

  // Identical points collapse interpolation onto the base point.
  const auto twin = matrix_from({{3.0, 4.0}, {3.0, 4.0}});
  const auto synth2 = smote(twin, 10, 1, 7);
  for (std::size_t i = 0; i < synth2.rows(); ++i) {
    CHECK(synth2.at(i, 0) == 3.0);
    CHECK(synth2.at(i, 1) == 4.0);
  }

  CHECK_THROWS_AS(smote(matrix_from({{1.0}}), 5, 1, 0), Error);
  CHECK_THROWS_AS(smote(base, 5, 5, 0), Error);
}

TEST_CASE("smote: synthetics inherit the base missing pattern") {
  DataMatrix m(3);
  const double r1[] = {1.0, 5.0, 9.0};
  const std::uint8_t m1[] = {1, 0, 1};
  const double r2[] = {2.0, 6.0, 10.0};
  const std::uint8_t m2[] = {1, 1, 0};
  m.push_row(std::span<const double>(r1, 3), std::span<const std::uint8_t>(m1, 3));
  m.push_row(std::span<const double>(r2, 3), std::span<const std::uint8_t>(m2, 3));
  const auto synth = smote(m, 4, 1, 3);
  REQUIRE(synth.rows() == 4);
  // Base rows alternate 0,1,0,1.
  CHECK(!synth.is_present(0, 1));  // base row 0 lacks dim 1
  CHECK(synth.is_present(0, 0));
  CHECK(synth.is_present(1, 1));   // base row 1 has dim 1; neighbor lacks it
  CHECK(synth.at(1, 1) == 6.0);    // copied, not interpolated
  CHECK(!synth.is_present(1, 2));  // base row 1 lacks dim 2
}

TEST_CASE("tomek: hand cases") {
  SUBCASE("single class never links") {
    const auto x = matrix_from({{0.0}, {0.1}, {0.2}});
    std::vector<LcClass> y(3, LcClass::NoLc);
    CHECK(tomek_links(x, y).empty());
  }
  SUBCASE("borderline pair is the only link") {
    const auto x = matrix_from({{0.0}, {0.1}, {10.0}});
    const std::vector<LcClass> y = {LcClass::NoLc, LcClass::Left, LcClass::NoLc};
    const auto links = tomek_links(x, y);
    REQUIRE(links.size() == 1);
    CHECK(links[0].first == 0);
    CHECK(links[0].second == 1);
  }
  SUBCASE("well-separated clusters have no links") {
    const auto x = matrix_from({{0.0}, {0.2}, {0.4}, {100.0}, {100.2}, {100.4}});
    const std::vector<LcClass> y = {LcClass::NoLc, LcClass::NoLc, LcClass::NoLc,
                                    LcClass::Left, LcClass::Left, LcClass::Left};
    CHECK(tomek_links(x, y).empty());
  }
}

TEST_CASE("tomek: matches the brute-force oracle on random sets") {
  Rng rng(505);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(120);
    const std::size_t dims = 1 + rng.uniform_below(4);
    DataMatrix x(dims);
    std::vector<LcClass> y;
    std::vector<double> row(dims);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : row) v = rng.uniform(-3.0, 3.0);
      x.push_row(row);
      y.push_back(static_cast<LcClass>(rng.uniform_below(3)));
    }
    CHECK(tomek_links(x, y) == tomek_oracle(x, y));
  }
}

TEST_CASE("resample: ratio arithmetic") {
  Rng rng(88);
  // 2700:10:10 with target 27:1:1 -> minorities grow to about 100 each.
  DataMatrix x(3);
  std::vector<LcClass> y;
  std::vector<double> row(3);
  const auto add = [&](LcClass c, double center, int count) {
    for (int i = 0; i < count; ++i) {
      for (auto& v : row) v = center + rng.normal(0.0, 0.3);
      x.push_row(row);
      y.push_back(c);
    }
  };
  add(LcClass::NoLc, 0.0, 2700);
  add(LcClass::Left, 30.0, 10);
  add(LcClass::Right, -30.0, 10);

  ResampleReport report;
  ResampleConfig cfg;
  cfg.seed = 9;
  const auto [rx, ry] = resample(x, y, cfg, &report);
  CHECK(report.after_smote[0] == 2700);
  CHECK(report.after_smote[1] == doctest::Approx(100).epsilon(0.10));
  CHECK(report.after_smote[2] == doctest::Approx(100).epsilon(0.10));
  CHECK(rx.rows() == ry.size());

  // Already at target: SMOTE adds nothing.
  DataMatrix x3(2);
  std::vector<LcClass> y3;
  std::vector<double> r2(2);
  const auto add3 = [&](LcClass c, double center, int count) {
    for (int i = 0; i < count; ++i) {
      r2[0] = center + rng.normal(0.0, 0.1);
      r2[1] = center + rng.normal(0.0, 0.1);
      x3.push_row(r2);
      y3.push_back(c);
    }
  };
  add3(LcClass::NoLc, 0.0, 270);
  add3(LcClass::Left, 50.0, 10);
  add3(LcClass::Right, -50.0, 10);
  ResampleReport rep3;
  resample(x3, y3, ResampleConfig{{27.0, 1.0, 1.0}, 5, 1}, &rep3);
  CHECK(rep3.after_smote == rep3.before);
}

TEST_CASE("inverse frequency weights: arithmetic and exactness") {
  const auto w1 = inverse_frequency_weights({50, 25, 25});
  CHECK(w1.weight[0] == doctest::Approx(2.0));
  CHECK(w1.weight[1] == doctest::Approx(4.0));
  CHECK(w1.weight[2] == doctest::Approx(4.0));

  const auto w2 = inverse_frequency_weights({10, 10, 10});
  for (int c = 0; c < 3; ++c) CHECK(w2.weight[c] == doctest::Approx(3.0));

  const auto w3 = inverse_frequency_weights({98, 1, 1});
  CHECK(w3.weight[0] == doctest::Approx(100.0 / 98.0));
  CHECK(w3.weight[1] == doctest::Approx(100.0));

  // w_c * f_c == 1 exactly, across many count patterns.
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::array<std::int64_t, 3> counts{};
    for (auto& c : counts) c = 1 + static_cast<std::int64_t>(rng.uniform_below(100000));
    const auto w = inverse_frequency_weights(counts);
    for (int c = 0; c < 3; ++c) {
      CHECK(w.weight[c] * w.frequency[c] == 1.0);  // exact
    }
  }

  CHECK_THROWS_AS(inverse_frequency_weights({5, 0, 5}), Error);
}

TEST_CASE("apply_thresholds: decision rule") {
  const ThresholdSet half{0.5, 0.5};
  const double a[] = {0.9, 0.05, 0.05};
  CHECK(apply_thresholds(a, half) == LcClass::NoLc);

  const double b[] = {0.6, 0.35, 0.05};
  CHECK(apply_thresholds(b, ThresholdSet{0.3, 0.5}) == LcClass::Left);

  // Equal p/tau ratios resolve to Left by class order.
  const double c[] = {0.4, 0.3, 0.3};
  CHECK(apply_thresholds(c, ThresholdSet{0.25, 0.25}) == LcClass::Left);

  const double bad[] = {0.5, 0.4, 0.4};
  CHECK_THROWS_AS(apply_thresholds(bad, half), Error);
}

TEST_CASE("calibrate_thresholds: grid argmax with guarantees") {
  Rng rng(31);

  SUBCASE("perfect separation returns the smallest grid point") {
    DataMatrix probs(3);
    std::vector<LcClass> labels;
    for (int i = 0; i < 30; ++i) {
      const auto c = static_cast<LcClass>(i % 3);
      double row[3] = {0.01, 0.01, 0.01};
      row[i % 3] = 0.98;
      probs.push_row(row);
      labels.push_back(c);
    }
    const auto taus = calibrate_thresholds(probs, labels);
    CHECK(taus.tau_left == doctest::Approx(0.02));
    CHECK(taus.tau_right == doctest::Approx(0.02));
  }

  SUBCASE("never worse than the argmax rule") {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 20 + rng.uniform_below(60);
      DataMatrix probs(3);
      std::vector<LcClass> labels;
      for (std::size_t i = 0; i < n; ++i) {
        double row[3];
        double sum = 0.0;
        for (double& v : row) {
          v = -std::log(std::max(rng.uniform(), 1e-12));
          sum += v;
        }
        for (double& v : row) v /= sum;
        probs.push_row(row);
        labels.push_back(static_cast<LcClass>(rng.uniform_below(3)));
      }
      bool multi = false;
      for (const auto l : labels) multi |= l != labels[0];
      if (!multi) continue;

      const auto taus = calibrate_thresholds(probs, labels);
      std::vector<LcClass> cal(n), arg(n);
      for (std::size_t i = 0; i < n; ++i) {
        cal[i] = apply_thresholds(probs.row(i), taus);
        int a = 0;
        for (int c = 1; c < 3; ++c) {
          if (probs.at(i, c) > probs.at(i, a)) a = c;
        }
        arg[i] = static_cast<LcClass>(a);
      }
      CHECK(compute_metrics(cal, labels).macro_f1 >=
            compute_metrics(arg, labels).macro_f1 - 1e-12);
    }
  }

  SUBCASE("minority mass at 0.3 is recovered by a low threshold") {
    DataMatrix probs(3);
    std::vector<LcClass> labels;
    for (int i = 0; i < 40; ++i) {
      if (i % 4 == 0) {
        const double row[3] = {0.65, 0.30, 0.05};
        probs.push_row(row);
        labels.push_back(LcClass::Left);
      } else {
        const double row[3] = {0.90, 0.05, 0.05};
        probs.push_row(row);
        labels.push_back(LcClass::NoLc);
      }
    }
    const auto taus = calibrate_thresholds(probs, labels);
    CHECK(taus.tau_left <= 0.30);
    std::vector<LcClass> cal(probs.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
      cal[i] = apply_thresholds(probs.row(i), taus);
    }
    const auto m = compute_metrics(cal, labels);
    CHECK(m.recall[1] == doctest::Approx(1.0));  // all Left rows recovered
  }

  SUBCASE("single-class labels are degenerate") {
    DataMatrix probs(3);
    const double row[3] = {0.8, 0.1, 0.1};
    probs.push_row(row);
    probs.push_row(row);
    std::vector<LcClass> labels(2, LcClass::NoLc);
    CHECK_THROWS_AS(calibrate_thresholds(probs, labels), Error);
  }
}
