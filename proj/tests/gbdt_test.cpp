#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lci/error.hpp"
#include "lci/gbdt.hpp"
#include "lci/rng.hpp"

using namespace lci;

namespace {

ClassWeights unit_weights() {
  ClassWeights w;
  w.weight = {1.0, 1.0, 1.0};
  w.frequency = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return w;
}

// Exhaustive split oracle over the raw binned column data. Enumerates the
// same (feature, boundary, missing-direction) space as best_split with the
// same tie policy, but sums gradients by direct scan rather than through
// histograms.
std::optional<SplitCandidate> brute_force_split(
    const std::vector<std::uint16_t>& binned, std::size_t n_features,
    const BinMapper& mapper, std::span<const double> g, std::span<const double> h,
    const GBDTConfig& cfg, std::span<const std::int32_t> rows) {
  SplitCandidate best;
  bool found = false;
  double g_total = 0.0, h_total = 0.0;
  for (const auto r : rows) {
    g_total += g[r];
    h_total += h[r];
  }
  for (std::size_t f = 0; f < n_features; ++f) {
    const int finite = mapper.n_bins(f);
    for (int v = 0; v + 1 < finite; ++v) {
      for (const bool missing_left : {true, false}) {
        double gl = 0.0, hl = 0.0;
        std::int64_t cl = 0;
        for (const auto r : rows) {
          const std::uint16_t b = binned[r * n_features + f];
          const bool left = b == kMissingBinSentinel ? missing_left : b <= v;
          if (left) {
            gl += g[r];
            hl += h[r];
            ++cl;
          }
        }
        const std::int64_t cr = static_cast<std::int64_t>(rows.size()) - cl;
        if (cl < cfg.min_samples_leaf || cr < cfg.min_samples_leaf) continue;
        const double gain = split_gain(gl, hl, g_total - gl, h_total - hl, cfg.lambda,
                                       cfg.gamma);
        if (!found || gain > best.gain) {
          found = true;
          best.feature = static_cast<int>(f);
          best.bin = v;
          best.missing_left = missing_left;
          best.gain = gain;
        }
      }
    }
  }
  if (!found || best.gain <= 0.0) return std::nullopt;
  return best;
}

}  // namespace

TEST_CASE("fit_bins: distinct values, constants, quantiles") {
  SUBCASE("three distinct values get three bins") {
    DataMatrix x(1);
    for (double v : {1.0, 2.0, 3.0, 2.0, 1.0}) x.push_row(std::span<const double>(&v, 1));
    const auto mapper = BinMapper::fit(x, 255);
    CHECK(mapper.n_bins(0) == 3);
    CHECK(mapper.bin(0, 1.0, true) == 0);
    CHECK(mapper.bin(0, 2.0, true) == 1);
    CHECK(mapper.bin(0, 3.0, true) == 2);
    CHECK(mapper.bin(0, 0.0, false) == kMissingBinSentinel);
  }
  SUBCASE("constant feature collapses to one bin") {
    DataMatrix x(1);
    for (int i = 0; i < 10; ++i) {
      const double v = 5.0;
      x.push_row(std::span<const double>(&v, 1));
    }
    const auto mapper = BinMapper::fit(x, 255);
    CHECK(mapper.n_bins(0) == 1);
  }
  SUBCASE("uniform values split into near-equal bins") {
    Rng rng(1);
    DataMatrix x(1);
    for (int i = 0; i < 10000; ++i) {
      const double v = rng.uniform();
      x.push_row(std::span<const double>(&v, 1));
    }
    const auto mapper = BinMapper::fit(x, 10);
    CHECK(mapper.n_bins(0) == 10);
    std::vector<int> counts(10, 0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      counts[mapper.bin(0, x.at(r, 0), true)]++;
    }
    for (int c : counts) CHECK(c == doctest::Approx(1000).epsilon(0.05));
  }
  SUBCASE("empty matrix is rejected") {
    CHECK_THROWS_AS(BinMapper::fit(DataMatrix(3), 255), Error);
  }
}

TEST_CASE("build_histogram: direct sums and additivity") {
  const std::vector<std::uint16_t> column = {0, 0, 0, 1, kMissingBinSentinel};
  const std::vector<double> g = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> h = {0.5, 0.5, 0.5, 0.5, 0.5};
  const std::vector<std::int32_t> all = {0, 1, 2, 3, 4};

  const auto hist = build_histogram(all, column, 2, g, h, {});
  CHECK(hist.grad[0] == doctest::Approx(6.0));
  CHECK(hist.grad[1] == doctest::Approx(4.0));
  CHECK(hist.grad[2] == doctest::Approx(5.0));  // missing slot
  CHECK(hist.count[0] == 3);

  // Weighted: G = sum w*g.
  const std::vector<double> w = {2.0, 1.0, 1.0, 1.0, 1.0};
  const auto wh = build_histogram(all, column, 2, g, h, w);
  CHECK(wh.grad[0] == doctest::Approx(7.0));

  // Parent equals left + right, elementwise.
  const std::vector<std::int32_t> left = {0, 1}, right = {2, 3, 4};
  const auto hl = build_histogram(left, column, 2, g, h, {});
  const auto hr = build_histogram(right, column, 2, g, h, {});
  for (int b = 0; b < 3; ++b) {
    CHECK(hist.grad[b] ==
          doctest::Approx(hl.grad[b] + hr.grad[b]).epsilon(1e-9));
    CHECK(hist.hess[b] == doctest::Approx(hl.hess[b] + hr.hess[b]).epsilon(1e-9));
    CHECK(hist.count[b] == hl.count[b] + hr.count[b]);
  }
}

TEST_CASE("split_gain: tabled arithmetic and symmetry") {
  CHECK(split_gain(0.0, 1.0, 0.0, 1.0, 1.0, 0.7) == doctest::Approx(-0.7));
  CHECK(split_gain(2.0, 1.0, -2.0, 1.0, 0.0, 0.0) == doctest::Approx(4.0));
  // Identical halves g=1, h=1, lambda=1: 1/2 (1 - 4/3) = -1/6.
  CHECK(split_gain(1.0, 1.0, 1.0, 1.0, 1.0, 0.0) == doctest::Approx(-1.0 / 6.0));
  // Swapping sides leaves the gain unchanged.
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double gl = rng.uniform(-3, 3), hl = rng.uniform(0, 3);
    const double gr = rng.uniform(-3, 3), hr = rng.uniform(0, 3);
    const double lm = rng.uniform(0, 2), gm = rng.uniform(0, 1);
    CHECK(split_gain(gl, hl, gr, hr, lm, gm) ==
          doctest::Approx(split_gain(gr, hr, gl, hl, lm, gm)));
  }
}

TEST_CASE("best_split: equals exhaustive enumeration on random instances") {
  Rng rng(404);
  int with_split = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(199);
    const std::size_t n_features = 1 + rng.uniform_below(3);
    const int max_bins = 2 + static_cast<int>(rng.uniform_below(7));

    DataMatrix x(n_features);
    std::vector<double> row(n_features);
    std::vector<std::uint8_t> mask(n_features);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t f = 0; f < n_features; ++f) {
        row[f] = std::floor(rng.uniform(0.0, 8.0));
        mask[f] = rng.uniform() < 0.15 ? 0 : 1;
      }
      x.push_row(row, mask);
    }
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = rng.uniform(-2.0, 2.0);
      h[i] = rng.uniform(0.05, 1.0);
    }
    GBDTConfig cfg;
    cfg.max_bins = max_bins;
    cfg.min_samples_leaf = 1 + static_cast<int>(rng.uniform_below(5));
    cfg.lambda = rng.uniform(0.0, 2.0);
    cfg.gamma = rng.uniform(0.0, 0.2);

    const auto mapper = BinMapper::fit(x, max_bins);
    const auto binned = mapper.bin_matrix(x);
    std::vector<std::int32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);

    std::vector<Histogram> hists;
    for (std::size_t f = 0; f < n_features; ++f) {
      std::vector<std::uint16_t> column(n);
      for (std::size_t r = 0; r < n; ++r) column[r] = binned[r * n_features + f];
      hists.push_back(build_histogram(rows, column, mapper.n_bins(f), g, h, {}));
    }
    double g_total = 0.0, h_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g_total += g[i];
      h_total += h[i];
    }

    const auto fast = best_split(hists, cfg, g_total, h_total, n);
    const auto oracle = brute_force_split(binned, n_features, mapper, g, h, cfg, rows);
    REQUIRE(fast.has_value() == oracle.has_value());
    if (fast) {
      ++with_split;
      CHECK(fast->feature == oracle->feature);
      CHECK(fast->bin == oracle->bin);
      CHECK(fast->missing_left == oracle->missing_left);
      CHECK(fast->gain == doctest::Approx(oracle->gain).epsilon(1e-9));
    }
  }
  CHECK(with_split > 100);  // the comparison must not be vacuous
}

TEST_CASE("best_split: pure and separable nodes") {
  // One bin only: nothing to split.
  std::vector<Histogram> hists(1);
  hists[0].grad = {5.0, 0.0};
  hists[0].hess = {2.0, 0.0};
  hists[0].count = {10, 0};
  GBDTConfig cfg;
  cfg.min_samples_leaf = 1;
  CHECK(!best_split(hists, cfg, 5.0, 2.0, 10).has_value());

  // Two bins separating gradient signs: boundary 0 chosen.
  hists[0].grad = {-4.0, 4.0, 0.0};
  hists[0].hess = {2.0, 2.0, 0.0};
  hists[0].count = {8, 8, 0};
  const auto split = best_split(hists, cfg, 0.0, 4.0, 16);
  REQUIRE(split.has_value());
  CHECK(split->feature == 0);
  CHECK(split->bin == 0);
}

TEST_CASE("grow_tree: single leaf and positive gain sequence") {
  Rng rng(8);
  const std::size_t n = 120;
  DataMatrix x(2);
  std::vector<double> g(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double row[2] = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
    x.push_row(row);
    g[i] = row[0] > 0.5 ? 1.0 + rng.uniform(0.0, 0.1) : -1.0 - rng.uniform(0.0, 0.1);
    h[i] = 1.0;
  }
  const auto mapper = BinMapper::fit(x, 16);
  const auto binned = mapper.bin_matrix(x);
  std::vector<std::int32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);

  GBDTConfig cfg;
  cfg.min_samples_leaf = 5;
  SUBCASE("max_leaves=1 gives the Newton root leaf") {
    cfg.max_leaves = 1;
    const auto tree = grow_tree(g, h, binned, 2, mapper, cfg, rows);
    REQUIRE(tree.nodes.size() == 1);
    double gs = 0.0, hs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gs += g[i];
      hs += h[i];
    }
    CHECK(tree.nodes[0].value == doctest::Approx(-gs / (hs + cfg.lambda)));
  }
  SUBCASE("every recorded split gain is positive") {
    cfg.max_leaves = 8;
    const auto tree = grow_tree(g, h, binned, 2, mapper, cfg, rows);
    CHECK(!tree.split_gains.empty());
    for (const double gain : tree.split_gains) CHECK(gain > 0.0);
  }
  SUBCASE("leaf-wise with 3 leaves is at least as good as one split") {
    cfg.max_leaves = 3;
    const auto tree = grow_tree(g, h, binned, 2, mapper, cfg, rows);
    cfg.max_leaves = 2;
    const auto stump = grow_tree(g, h, binned, 2, mapper, cfg, rows);
    const auto objective = [&](const Tree& t) {
      // Sum of leaf objective terms -1/2 G^2/(H+lambda) over samples.
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = t.predict_binned(binned.data() + i * 2);
        total += g[i] * v + 0.5 * h[i] * v * v;
      }
      return total;
    };
    CHECK(objective(tree) <= objective(stump) + 1e-12);
  }
}

TEST_CASE("goss_select: fractions and amplification") {
  SUBCASE("a=1 keeps everything at unit amplification") {
    const std::vector<double> norms = {0.5, 0.1, 0.9, 0.3};
    const auto s = goss_select(norms, 1.0, 0.0, 3);
    CHECK(s.rows.size() == 4);
    for (double a : s.amplification) CHECK(a == 1.0);
  }
  SUBCASE("N=10, a=0.2, b=0.1: two top rows plus one amplified at 8") {
    std::vector<double> norms(10);
    for (int i = 0; i < 10; ++i) norms[i] = i * 0.1;  // rows 8, 9 are the top-2
    const auto s = goss_select(norms, 0.2, 0.1, 17);
    REQUIRE(s.rows.size() == 3);
    int top_count = 0, amplified = 0;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      if (s.amplification[i] == 1.0) {
        ++top_count;
        CHECK(s.rows[i] >= 8);
      } else {
        ++amplified;
        CHECK(s.amplification[i] == doctest::Approx(8.0));
        CHECK(s.rows[i] < 8);
      }
    }
    CHECK(top_count == 2);
    CHECK(amplified == 1);
  }
  SUBCASE("b=0 keeps only the top fraction") {
    std::vector<double> norms(10);
    for (int i = 0; i < 10; ++i) norms[i] = i * 0.1;
    const auto s = goss_select(norms, 0.3, 0.0, 5);
    CHECK(s.rows.size() == 3);
  }
  CHECK_THROWS_AS(goss_select(std::vector<double>{1.0}, 0.7, 0.5, 0), Error);
}

TEST_CASE("softmax_objective: symmetry, limits, finite differences") {
  const auto w = unit_weights();
  SUBCASE("uniform logits give log 3 loss") {
    const std::vector<double> logits(6, 0.0);
    const std::vector<LcClass> labels = {LcClass::NoLc, LcClass::Left};
    const auto out = softmax_objective(logits, 2, labels, w);
    CHECK(out.loss == doctest::Approx(std::log(3.0)));
    CHECK(out.g[0] == doctest::Approx(1.0 / 3 - 1.0));
  }
  SUBCASE("confident correct logit drives loss and gradient to zero") {
    const std::vector<double> logits = {50.0, 0.0, 0.0};
    const std::vector<LcClass> labels = {LcClass::NoLc};
    const auto out = softmax_objective(logits, 1, labels, w);
    CHECK(out.loss < 1e-12);
    for (double g : out.g) CHECK(std::abs(g) < 1e-12);
  }
  SUBCASE("gradients and hessians match central finite differences") {
    Rng rng(99);
    ClassWeights cw;
    cw.weight = {1.0, 2.5, 0.7};
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 5;
      std::vector<double> logits(n * 3);
      for (auto& z : logits) z = rng.uniform(-3.0, 3.0);
      std::vector<LcClass> labels(n);
      for (auto& l : labels) l = static_cast<LcClass>(rng.uniform_below(3));

      const auto out = softmax_objective(logits, n, labels, cw);
      const double eps = 1e-5;
      for (std::size_t i = 0; i < n * 3; ++i) {
        auto zp = logits, zm = logits;
        zp[i] += eps;
        zm[i] -= eps;
        // loss is mean over samples; per-logit derivative scales by n.
        const double fd_g = (softmax_objective(zp, n, labels, cw).loss -
                             softmax_objective(zm, n, labels, cw).loss) /
                            (2 * eps) * n;
        const double fd_h = (softmax_objective(zp, n, labels, cw).g[i] -
                             softmax_objective(zm, n, labels, cw).g[i]) /
                            (2 * eps);
        CHECK(std::abs(out.g[i] - fd_g) <=
              1e-5 * std::max(1.0, std::abs(out.g[i])));
        CHECK(std::abs(out.h[i] - fd_h) <=
              1e-5 * std::max(1.0, std::abs(out.h[i])));
      }
    }
  }
}

TEST_CASE("train: priors, separability, GOSS equivalence, loss monotone") {
  Rng rng(1234);
  // Linearly separable 3-class toy in 2 features.
  const std::size_t n = 300;
  DataMatrix x(2);
  std::vector<LcClass> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    const double cx = c == 0 ? 0.0 : c == 1 ? 6.0 : -6.0;
    const double row[2] = {cx + rng.normal(0.0, 0.5), rng.normal(0.0, 0.5)};
    x.push_row(row);
    y.push_back(static_cast<LcClass>(c));
  }
  const auto w = unit_weights();

  SUBCASE("n_rounds=0 predicts class priors") {
    GBDTConfig cfg;
    cfg.n_rounds = 0;
    const auto model = train_gbdt(x, y, w, cfg);
    const auto probs = predict_proba(model, x);
    CHECK(probs[0] == doctest::Approx(1.0 / 3));
    CHECK(probs[1] == doctest::Approx(1.0 / 3));
  }
  SUBCASE("separable set reaches 0.99 training accuracy within 50 rounds") {
    GBDTConfig cfg;
    cfg.n_rounds = 50;
    cfg.min_samples_leaf = 5;
    const auto model = train_gbdt(x, y, w, cfg);
    const auto probs = predict_proba(model, x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      for (int c = 1; c < 3; ++c) {
        if (probs[i * 3 + c] > probs[i * 3 + arg]) arg = c;
      }
      if (arg == static_cast<int>(y[i])) ++correct;
    }
    CHECK(static_cast<double>(correct) / n >= 0.99);
    // Probability rows sum to one.
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(probs[i * 3] + probs[i * 3 + 1] + probs[i * 3 + 2] - 1.0) < 1e-9);
    }
    // Training loss is non-increasing with GOSS disabled.
    for (std::size_t r = 1; r < model.train_loss.size(); ++r) {
      CHECK(model.train_loss[r] <= model.train_loss[r - 1] + 1e-12);
    }
  }
  SUBCASE("GOSS with a=1, b=0 reproduces the unsampled model") {
    GBDTConfig cfg;
    cfg.n_rounds = 8;
    cfg.min_samples_leaf = 5;
    const auto plain = train_gbdt(x, y, w, cfg);
    cfg.use_goss = true;
    cfg.goss_a = 1.0;
    cfg.goss_b = 0.0;
    const auto sampled = train_gbdt(x, y, w, cfg);
    const auto p1 = predict_proba(plain, x);
    const auto p2 = predict_proba(sampled, x);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);  // bitwise
  }
  SUBCASE("single-class labels are rejected") {
    std::vector<LcClass> mono(n, LcClass::NoLc);
    CHECK_THROWS_AS(train_gbdt(x, mono, w, GBDTConfig{}), Error);
  }
}
