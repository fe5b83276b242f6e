#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "propcheck/error.hpp"
#include "propcheck/stats.hpp"
#include "support.hpp"

using namespace propcheck;
using testing_support::data_path;

namespace {

// Direct summation of C(n,i) p^i (1-p)^(n-i) in long double; fine for n <= 200.
long double bcdf_oracle(std::uint64_t k, std::uint64_t n, long double p) {
  long double sum = 0;
  long double c = 1; // C(n, i)
  for (std::uint64_t i = 0; i <= k; ++i) {
    sum += c * std::pow(p, static_cast<long double>(i)) * std::pow(1 - p, static_cast<long double>(n - i));
    c = c * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  }
  return sum;
}

// Rarity tests evaluated with the oracle; nullopt when a value sits too close
// to its threshold for the comparison to be meaningful.
std::optional<Classification> classify_oracle(const PairStats& s, const ModelConfig& cfg, std::uint64_t min_support) {
  // full support is exactly 1, so ties against a threshold of 1 are decidable
  long double prop_side = s.k == s.n_a ? 1.0L : bcdf_oracle(s.k, s.n_a, cfg.p_prop);
  long double path_side = s.k == s.n_prop ? 1.0L : bcdf_oracle(s.k, s.n_prop, cfg.p_a);
  auto near = [](long double v, double th) { return v != th && std::fabs(static_cast<double>(v) - th) < 1e-9; };
  if (near(prop_side, cfg.p_cprop) || near(path_side, cfg.p_ca)) return std::nullopt;
  bool a = prop_side < cfg.p_cprop;
  bool b = path_side < cfg.p_ca;
  if (a && b) return Classification::Anomalous;
  if (!a && !b && s.k >= min_support) return Classification::Expected;
  return Classification::Unknown;
}

PairKey key(const std::string& path, const std::string& prop) { return PairKey{parse_path(path), prop}; }

CountTable load_pairs(const std::string& rel) { return load_table_file(data_path(rel)); }

// Precision/recall recomputed from the classification map.
Metrics metrics_oracle(const std::map<PairKey, Classification>& cls, const LabelSet& labels) {
  Metrics m;
  std::uint64_t flagged = 0, incorrect = 0;
  for (const auto& [k, kind] : labels) {
    auto it = cls.find(k);
    bool anomalous = it != cls.end() && it->second == Classification::Anomalous;
    if (kind == LabelKind::Incorrect) ++incorrect;
    if (anomalous) ++flagged;
    if (anomalous && kind == LabelKind::Incorrect) ++m.true_positives;
    if (anomalous && kind == LabelKind::Correct) ++m.false_positives;
    if (!anomalous && kind == LabelKind::Incorrect) ++m.false_negatives;
  }
  m.precision = Ratio{m.true_positives, flagged};
  m.recall = Ratio{m.true_positives, incorrect};
  return m;
}

double value_or(const Ratio& r, double fallback) { return r.defined() ? r.value() : fallback; }

// Index of the best point by (precision desc, recall desc, index asc), undefined precision last.
std::size_t brute_force_optimum(const std::vector<SweepPoint>& pts) {
  std::size_t best = 0;
  auto key_of = [&](std::size_t i) {
    const Metrics& m = pts[i].metrics;
    return std::make_tuple(m.precision.defined() ? 1 : 0, value_or(m.precision, -1), value_or(m.recall, -1));
  };
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (key_of(i) > key_of(best)) best = i;
  return best;
}

void expect_front_sound(const SweepResult& r) {
  auto prec = [&](std::size_t i) { return r.points[i].metrics.precision.value(); };
  auto rec = [&](std::size_t i) { return value_or(r.points[i].metrics.recall, 0); };
  std::set<std::size_t> on_front(r.front.begin(), r.front.end());
  for (std::size_t f : r.front) {
    ASSERT_TRUE(r.points[f].metrics.precision.defined());
    for (std::size_t q = 0; q < r.points.size(); ++q) {
      if (!r.points[q].metrics.precision.defined()) continue;
      bool dominated = (prec(q) >= prec(f) && rec(q) > rec(f)) || (prec(q) > prec(f) && rec(q) >= rec(f));
      EXPECT_FALSE(dominated) << "front point " << f << " dominated by " << q;
    }
  }
  // every undominated defined point is on the front
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    if (!r.points[p].metrics.precision.defined() || on_front.count(p)) continue;
    bool dominated = false;
    for (std::size_t q = 0; q < r.points.size() && !dominated; ++q) {
      if (!r.points[q].metrics.precision.defined()) continue;
      dominated = (prec(q) >= prec(p) && rec(q) > rec(p)) || (prec(q) > prec(p) && rec(q) >= rec(p));
    }
    EXPECT_TRUE(dominated) << "point " << p << " missing from front";
  }
  for (std::size_t i = 1; i < r.front.size(); ++i) {
    EXPECT_GE(prec(r.front[i - 1]), prec(r.front[i]));
    if (prec(r.front[i - 1]) > prec(r.front[i])) EXPECT_LT(rec(r.front[i - 1]), rec(r.front[i]));
  }
}

std::string folds_text(const std::vector<FoldResult>& folds) {
  std::ostringstream out;
  write_folds_csv(folds, out);
  return out.str();
}

} // namespace

// ---- bcdf ------------------------------------------------------------------------

TEST(Bcdf, MatchesDirectSummation) {
  for (double p : {0.0, 0.005, 0.01, 0.05, 0.25, 0.5, 0.9, 1.0})
    for (std::uint64_t n = 0; n <= 200; n += (n < 20 ? 1 : 7))
      for (std::uint64_t k = 0; k <= n; ++k)
        ASSERT_NEAR(bcdf(k, n, p), static_cast<double>(bcdf_oracle(k, n, p)), 1e-12) << k << " " << n << " " << p;
}

TEST(Bcdf, WorkedValue) { EXPECT_NEAR(bcdf(2, 10, 0.5), 56.0 / 1024.0, 1e-15); }

TEST(Bcdf, HugeCorpusValueDoesNotOverflow) {
  double v = bcdf(19, 23360505, 0.01);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1e-300);
}

TEST(Bcdf, Limits) {
  EXPECT_EQ(bcdf(0, 0, 0.3), 1.0);
  EXPECT_EQ(bcdf(7, 7, 0.3), 1.0);
  EXPECT_EQ(bcdf(100000000, 100000000, 0.5), 1.0);
  EXPECT_EQ(bcdf(0, 10, 0.0), 1.0);
  EXPECT_EQ(bcdf(9, 10, 1.0), 0.0);
  EXPECT_EQ(bcdf(10, 10, 1.0), 1.0);
}

TEST(Bcdf, DomainErrors) {
  EXPECT_THROW(bcdf(3, 2, 0.5), DomainError);
  EXPECT_THROW(bcdf(1, 2, -0.1), DomainError);
  EXPECT_THROW(bcdf(1, 2, 1.5), DomainError);
  EXPECT_THROW(bcdf(1, 2, std::nan("")), DomainError);
}

TEST(Bcdf, MonotoneInKAndP) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(1, 200)(rng);
    std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
    double p = std::uniform_real_distribution<double>(0, 1)(rng);
    double q = std::uniform_real_distribution<double>(p, 1)(rng);
    EXPECT_LE(bcdf(k, n, p), bcdf(k + 1, n, p) + 1e-15);
    EXPECT_GE(bcdf(k, n, p) + 1e-15, bcdf(k, n, q));
    EXPECT_NEAR(bcdf(k, n, p), static_cast<double>(bcdf_oracle(k, n, p)), 1e-12);
    double v = bcdf(k, n, p);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

// ---- classification ----------------------------------------------------------

TEST(Classify, RareCorpusPairIsAnomalous) {
  ModelConfig cfg{0.005, 0.02, 0.005, 0.005};
  EXPECT_EQ(classify_pair({19, 23360505, 306170}, cfg), Classification::Anomalous);
}

TEST(Classify, OnlyUsageIsNeverAnomalous) {
  ModelConfig cfg{0.05, 0.05, 0.05, 0.05};
  EXPECT_NE(classify_pair({7, 7, 7}, cfg), Classification::Anomalous);
  EXPECT_EQ(classify_pair({7, 7, 7}, cfg), Classification::Expected);
  EXPECT_EQ(classify_pair({3, 3, 3}, cfg), Classification::Unknown); // below min support
}

TEST(Classify, SmallCountInLargeMarginals) {
  ModelConfig cfg{0.05, 0.05, 0.05, 0.05};
  EXPECT_EQ(classify_pair({1, 10000, 10000}, cfg), Classification::Anomalous);
  EXPECT_LT(bcdf_oracle(1, 10000, 0.05), 1e-6L);
}

TEST(Classify, MinSupportIsConfigurable) {
  ModelConfig cfg{0.05, 0.05, 0.05, 0.05};
  EXPECT_EQ(classify_pair({3, 3, 3}, cfg, 3), Classification::Expected);
}

TEST(Classify, AgreesWithOracleOnRandomStats) {
  std::mt19937_64 rng(3);
  const auto& grid = default_rarity_grid();
  const auto& cgrid = default_confidence_grid();
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    PairStats s;
    s.k = std::uniform_int_distribution<std::uint64_t>(1, 40)(rng);
    s.n_a = s.k + std::uniform_int_distribution<std::uint64_t>(0, 160)(rng);
    s.n_prop = s.k + std::uniform_int_distribution<std::uint64_t>(0, 160)(rng);
    auto pick = [&](const std::vector<double>& g) { return g[std::uniform_int_distribution<std::size_t>(0, g.size() - 1)(rng)]; };
    ModelConfig cfg{pick(grid), pick(grid), pick(cgrid), pick(cgrid)};
    auto expected = classify_oracle(s, cfg, kDefaultMinSupport);
    if (!expected) continue;
    ++checked;
    EXPECT_EQ(classify_pair(s, cfg), *expected) << s.k << " " << s.n_a << " " << s.n_prop;
    if (s.k == s.n_a || s.k == s.n_prop) EXPECT_NE(classify_pair(s, cfg), Classification::Anomalous);
  }
  EXPECT_GT(checked, 2500);
}

TEST(Classify, RaisingConfidenceOnlyGrowsAnomalousSet) {
  CountTable t = load_pairs("mini_corpus.pairs");
  const auto& cgrid = default_confidence_grid();
  for (double p_a : {0.005, 0.1, 0.25})
    for (double p_prop : {0.01, 0.25})
      for (std::size_t i = 0; i < cgrid.size(); ++i)
        for (std::size_t j = 0; j < cgrid.size(); ++j) {
          auto base = anomalous_pairs(classify_all(t, {p_a, p_prop, cgrid[i], cgrid[j]}, default_excluded_props()));
          std::set<PairKey> lo(base.begin(), base.end());
          for (std::size_t i2 = i; i2 < cgrid.size(); i2 += 2)
            for (std::size_t j2 = j; j2 < cgrid.size(); j2 += 3) {
              auto more = anomalous_pairs(classify_all(t, {p_a, p_prop, cgrid[i2], cgrid[j2]}, default_excluded_props()));
              std::set<PairKey> hi(more.begin(), more.end());
              EXPECT_TRUE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
            }
        }
}

TEST(Classify, ExcludedPropsAreUnknown) {
  CountTable t;
  t.add(key("require('fs')", "toString"), 1);
  t.add(key("require('fs')", "x"), 100000);
  t.add(key("String", "toString"), 100000);
  auto cls = classify_all(t, {0.25, 0.25, 1, 1}, default_excluded_props());
  EXPECT_EQ(cls.at(key("require('fs')", "toString")), Classification::Unknown);
  auto no_excl = classify_all(t, {0.25, 0.25, 1, 1}, {});
  EXPECT_EQ(no_excl.at(key("require('fs')", "toString")), Classification::Anomalous);
  EXPECT_TRUE(default_excluded_props().count("hasOwnProperty"));
}

TEST(Classify, EmptyTable) { EXPECT_TRUE(classify_all(CountTable{}, ModelConfig{}, default_excluded_props()).empty()); }

TEST(Classify, MiniCorpusGolden) {
  CountTable t = load_pairs("mini_corpus.pairs");
  auto cls = classify_all(t, ModelConfig{}, default_excluded_props());
  std::ostringstream out;
  std::vector<PairKey> keys;
  for (const auto& [k, c] : cls) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), RenderedOrder{});
  for (const auto& k : keys) out << render(k.path) << '\t' << k.prop << '\t' << to_string(cls.at(k)) << '\n';
  EXPECT_EQ(out.str(), testing_support::read_file(data_path("mini_corpus.classification")));
}

TEST(Classify, ThresholdValidation) {
  EXPECT_THROW((ModelConfig{0, 0.1, 0.1, 0.1}.validate()), DomainError);
  EXPECT_THROW((ModelConfig{0.1, 1.01, 0.1, 0.1}.validate()), DomainError);
  EXPECT_NO_THROW((ModelConfig{1, 1, 1, 1}.validate()));
}

TEST(AnomalousList, RoundTripAndSorting) {
  std::vector<PairKey> pairs{key("require('z')", "b"), key("Array", "size"), key("require('a').x()", "y")};
  std::ostringstream out;
  save_anomalous(pairs, out);
  EXPECT_EQ(out.str(), "Array\tsize\nrequire('a').x()\ty\nrequire('z')\tb\n");
  std::istringstream in(out.str());
  auto loaded = load_anomalous(in, "mem");
  std::vector<PairKey> sorted = pairs;
  std::sort(sorted.begin(), sorted.end(), RenderedOrder{});
  EXPECT_EQ(loaded, sorted);
}

TEST(AnomalousList, MalformedLine) {
  std::istringstream in("Array\tsize\nnot a path\tx\n");
  try {
    load_anomalous(in, "mem");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream in2("Array size\n");
  EXPECT_THROW(load_anomalous(in2, "mem"), FormatError);
}

// ---- sweep -----------------------------------------------------------------------

TEST(Sweep, SingleConfigurationIsItsOwnFront) {
  CountTable t = load_pairs("mini_corpus.pairs");
  LabelSet labels = load_labels_file(data_path("mini_corpus.labels"));
  SweepOptions o;
  o.rarity_grid = {0.25};
  o.confidence_grid = {0.1};
  SweepResult r = sweep(t, labels, o);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.optimum, 0u);
  EXPECT_EQ(r.front, std::vector<std::size_t>{0});
}

TEST(Sweep, SyntheticTableOptimumMatchesBruteForce) {
  // Two rare uses of common properties labeled incorrect among well-used pairs.
  CountTable t;
  t.add(key("require('m')", "good"), 400);
  t.add(key("require('m')", "length"), 1);
  t.add(key("require('m').f()", "length"), 300);
  t.add(key("require('m').f()", "size"), 2);
  t.add(key("String", "size"), 200);
  t.add(key("String", "length"), 500);
  LabelSet labels{{key("require('m')", "length"), LabelKind::Incorrect},
                  {key("require('m').f()", "size"), LabelKind::Incorrect},
                  {key("require('m')", "good"), LabelKind::Correct},
                  {key("String", "size"), LabelKind::Correct}};
  SweepOptions o;
  o.rarity_grid = {0.005, 0.05, 0.25};
  o.confidence_grid = {0.005, 0.05, 0.5};
  SweepResult r = sweep(t, labels, o);
  ASSERT_EQ(r.points.size(), 81u);
  std::size_t idx = 0;
  for (double p_a : o.rarity_grid)
    for (double p_prop : o.rarity_grid)
      for (double p_ca : o.confidence_grid)
        for (double p_cprop : o.confidence_grid) {
          ModelConfig cfg{p_a, p_prop, p_ca, p_cprop};
          const SweepPoint& pt = r.points[idx++];
          EXPECT_EQ(pt.cfg, cfg);
          std::map<PairKey, Classification> cls;
          std::uint64_t flagged = 0;
          for (const auto& [k, c] : t.pairs()) {
            auto oc = classify_oracle({c, t.n_a(k.path), t.n_prop(k.prop)}, cfg, kDefaultMinSupport);
            ASSERT_TRUE(oc.has_value());
            cls[k] = *oc;
            if (*oc == Classification::Anomalous) ++flagged;
          }
          Metrics m = metrics_oracle(cls, labels);
          EXPECT_EQ(pt.metrics.precision.num, m.precision.num);
          EXPECT_EQ(pt.metrics.precision.den, m.precision.den);
          EXPECT_EQ(pt.metrics.recall.num, m.recall.num);
          EXPECT_EQ(pt.anomalous_count, flagged);
        }
  EXPECT_EQ(r.optimum, brute_force_optimum(r.points));
  const Metrics& best = r.points[r.optimum].metrics;
  EXPECT_EQ(best.precision.num, 2u);
  EXPECT_EQ(best.precision.den, 2u);
  EXPECT_EQ(best.recall.num, 2u);
  expect_front_sound(r);
}

TEST(Sweep, RandomTablesFrontAndOptimum) {
  std::mt19937_64 rng(77);
  const char* paths[] = {"require('a')", "require('b')", "String", "Array", "require('a').x()"};
  const char* props[] = {"p", "q", "r", "s", "t", "u"};
  int runs = 0;
  for (int trial = 0; trial < 60; ++trial) {
    CountTable t;
    LabelSet labels;
    for (const char* pa : paths)
      for (const char* pr : props) {
        int roll = std::uniform_int_distribution<int>(0, 3)(rng);
        if (roll == 0) continue;
        std::uint64_t c = roll == 1 ? std::uniform_int_distribution<std::uint64_t>(1, 3)(rng)
                                    : std::uniform_int_distribution<std::uint64_t>(5, 300)(rng);
        t.add(key(pa, pr), c);
        int lab = std::uniform_int_distribution<int>(0, 2)(rng);
        if (lab == 1) labels[key(pa, pr)] = LabelKind::Correct;
        if (lab == 2) labels[key(pa, pr)] = LabelKind::Incorrect;
      }
    bool any_incorrect = false;
    for (const auto& [k, v] : labels) any_incorrect |= v == LabelKind::Incorrect;
    SweepOptions o;
    o.rarity_grid = {0.01, 0.1, 0.25};
    o.confidence_grid = {0.01, 0.1, 1};
    if (!any_incorrect) {
      EXPECT_THROW(sweep(t, labels, o), EmptyLabelSet);
      continue;
    }
    SweepResult r = sweep(t, labels, o);
    ++runs;
    EXPECT_EQ(r.optimum, brute_force_optimum(r.points));
    expect_front_sound(r);
    o.workers = 3;
    SweepResult r3 = sweep(t, labels, o);
    EXPECT_EQ(r3.front, r.front);
    EXPECT_EQ(r3.optimum, r.optimum);
  }
  EXPECT_GT(runs, 50);
}

TEST(Sweep, MiniCorpusDefaultGrids) {
  CountTable t = load_pairs("mini_corpus.pairs");
  LabelSet labels = load_labels_file(data_path("mini_corpus.labels"));
  SweepResult r = sweep(t, labels);
  ASSERT_EQ(r.points.size(), 4096u);
  EXPECT_EQ(r.optimum, brute_force_optimum(r.points));
  expect_front_sound(r);
  EXPECT_EQ(r.points[r.optimum].cfg, (ModelConfig{0.005, 0.25, 1, 0.02}));
  std::ostringstream csv;
  write_sweep_csv(r, csv);
  std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "p_a,p_prop,p_ca,p_cprop,precision,recall,anomalous_count");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4097);
}

TEST(Sweep, Errors) {
  CountTable t = load_pairs("mini_corpus.pairs");
  LabelSet only_correct{{key("String", "length"), LabelKind::Correct}};
  EXPECT_THROW(sweep(t, only_correct), EmptyLabelSet);
  LabelSet labels = load_labels_file(data_path("mini_corpus.labels"));
  SweepOptions empty_grid;
  empty_grid.rarity_grid = {};
  EXPECT_THROW(sweep(t, labels, empty_grid), UsageError);
  SweepOptions zero;
  zero.confidence_grid = {0.0};
  EXPECT_THROW(sweep(t, labels, zero), DomainError);
}

TEST(Sweep, UndefinedPrecisionRanksLast) {
  std::vector<SweepPoint> pts(3);
  pts[0].metrics.recall = Ratio{0, 2};
  pts[1].metrics.precision = Ratio{0, 1};
  pts[1].metrics.recall = Ratio{0, 2};
  pts[2].metrics.precision = Ratio{1, 3};
  pts[2].metrics.recall = Ratio{1, 2};
  EXPECT_EQ(select_optimum(pts), 2u);
  EXPECT_EQ(pareto_front(pts), std::vector<std::size_t>{2});
  EXPECT_EQ(format_ratio(pts[0].metrics.precision), "undefined");
  EXPECT_EQ(format_ratio(pts[2].metrics.precision), "0.333333");
}

// ---- cross-validation ----------------------------------------------------------

TEST(CrossValidate, TenFoldsOnMiniCorpus) {
  CountTable t = load_pairs("mini_corpus.pairs");
  LabelSet labels = load_labels_file(data_path("mini_corpus.labels"));
  auto folds = cross_validate(t, labels, 10, 42);
  ASSERT_EQ(folds.size(), 10u);
  for (std::size_t i = 0; i < folds.size(); ++i) EXPECT_EQ(folds[i].fold, i);
  SweepOptions eight;
  eight.workers = 8;
  EXPECT_EQ(folds_text(folds), folds_text(cross_validate(t, labels, 10, 42)));
  EXPECT_EQ(folds_text(folds), folds_text(cross_validate(t, labels, 10, 42, eight)));
}

TEST(CrossValidate, FoldAssignmentIsBalancedAndSeeded) {
  LabelSet labels = load_labels_file(data_path("mini_corpus.labels"));
  auto a = assign_folds(labels, 10, 1);
  EXPECT_EQ(a, assign_folds(labels, 10, 1));
  EXPECT_NE(a, assign_folds(labels, 10, 2));
  std::vector<std::size_t> sizes(10);
  for (auto f : a) ++sizes.at(f);
  auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  EXPECT_LE(*hi - *lo, 1u);
}

TEST(CrossValidate, SymmetricLabelsChooseSameConfig) {
  CountTable t;
  LabelSet labels;
  for (int i = 0; i < 4; ++i) {
    std::string path = "require('m" + std::to_string(i) + "')";
    std::string other = "require('o" + std::to_string(i) + "')";
    std::string prop = "p" + std::to_string(i);
    std::string filler = "f" + std::to_string(i);
    t.add(key(path, prop), 1);
    t.add(key(path, filler), 99);
    t.add(key(other, prop), 99);
    labels[key(path, prop)] = LabelKind::Incorrect;
    labels[key(path, filler)] = LabelKind::Correct;
  }
  for (std::uint64_t seed : {0ull, 1ull, 9ull}) {
    auto folds = cross_validate(t, labels, 2, seed);
    ASSERT_EQ(folds.size(), 2u);
    EXPECT_EQ(folds[0].cfg, folds[1].cfg);
  }
}

TEST(CrossValidate, Errors) {
  CountTable t = load_pairs("mini_corpus.pairs");
  LabelSet labels = load_labels_file(data_path("mini_corpus.labels"));
  EXPECT_THROW(cross_validate(t, labels, 1, 0), UsageError);
  EXPECT_THROW(cross_validate(t, labels, labels.size() + 1, 0), UsageError);
  LabelSet only_correct{{key("String", "length"), LabelKind::Correct}, {key("String", "split"), LabelKind::Correct}};
  EXPECT_THROW(cross_validate(t, only_correct, 2, 0), EmptyLabelSet);
}

TEST(CrossValidate, TrainingFoldWithoutIncorrectLabelsStillRuns) {
  CountTable t = load_pairs("mini_corpus.pairs");
  LabelSet labels{{key("String", "length"), LabelKind::Correct}, {key("require('path')", "length"), LabelKind::Incorrect}};
  auto folds = cross_validate(t, labels, 2, 0);
  ASSERT_EQ(folds.size(), 2u);
  bool saw_undefined_recall = false;
  for (const auto& f : folds) saw_undefined_recall |= !f.train.recall.defined();
  EXPECT_TRUE(saw_undefined_recall);
}
