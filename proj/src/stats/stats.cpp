#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "propcheck/error.hpp"
#include "propcheck/stats.hpp"

namespace propcheck {

void ModelConfig::validate() const {
  for (double v : {p_a, p_prop, p_ca, p_cprop})
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("model thresholds must lie in (0,1]");
}

const std::vector<double>& default_rarity_grid() {
  static const std::vector<double> grid = {0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.25};
  return grid;
}

const std::vector<double>& default_confidence_grid() {
  static const std::vector<double> grid = {0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 1.0};
  return grid;
}

const std::set<std::string>& default_excluded_props() {
  static const std::set<std::string> props = {"toString",       "toLocaleString", "valueOf",
                                              "hasOwnProperty", "isPrototypeOf",  "propertyIsEnumerable",
                                              "constructor",    "__proto__"};
  return props;
}

Classification classify_pair(const PairStats& s, const ModelConfig& cfg, std::uint64_t min_support) {
  bool rare_prop = bcdf(s.k, s.n_a, cfg.p_prop) < cfg.p_cprop;
  bool rare_path = bcdf(s.k, s.n_prop, cfg.p_a) < cfg.p_ca;
  if (rare_prop && rare_path) return Classification::Anomalous;
  if (!rare_prop && !rare_path && s.k >= min_support) return Classification::Expected;
  return Classification::Unknown;
}

std::map<PairKey, Classification> classify_all(const CountTable& table, const ModelConfig& cfg,
                                               const std::set<std::string>& excluded,
                                               std::uint64_t min_support) {
  cfg.validate();
  std::map<PairKey, Classification> out;
  for (const auto& [key, k] : table.pairs()) {
    if (excluded.count(key.prop)) {
      out.emplace(key, Classification::Unknown);
      continue;
    }
    PairStats s{k, table.n_a(key.path), table.n_prop(key.prop)};
    out.emplace(key, classify_pair(s, cfg, min_support));
  }
  return out;
}

std::vector<PairKey> anomalous_pairs(const std::map<PairKey, Classification>& classified) {
  std::vector<PairKey> out;
  for (const auto& [key, c] : classified)
    if (c == Classification::Anomalous) out.push_back(key);
  std::sort(out.begin(), out.end(), RenderedOrder{});
  return out;
}

void save_anomalous(const std::vector<PairKey>& pairs, std::ostream& out) {
  std::vector<PairKey> sorted = pairs;
  std::sort(sorted.begin(), sorted.end(), RenderedOrder{});
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& key : sorted) out << render(key.path) << '\t' << key.prop << '\n';
}

std::vector<PairKey> load_anomalous(std::istream& in, const std::string& source_name) {
  std::vector<PairKey> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw FormatError(source_name, lineno, "expected 'path<TAB>prop'");
    AccessPath path;
    try {
      path = parse_path(line.substr(0, tab));
    } catch (const PathSyntaxError& e) {
      throw FormatError(source_name, lineno, e.what());
    }
    std::string prop = line.substr(tab + 1);
    if (prop.empty()) throw FormatError(source_name, lineno, "empty property name");
    out.push_back(PairKey{std::move(path), std::move(prop)});
  }
  if (in.bad()) throw IoError("error reading " + source_name);
  std::sort(out.begin(), out.end(), RenderedOrder{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void save_anomalous_file(const std::vector<PairKey>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_anomalous(pairs, out);
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<PairKey> load_anomalous_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return load_anomalous(in, path.string());
}

// ---- sweep -----------------------------------------------------------------

namespace {

std::vector<double> normalized_grid(std::vector<double> grid, const char* what) {
  if (grid.empty()) throw UsageError(std::string(what) + " grid must not be empty");
  for (double v : grid)
    if (!(v > 0.0 && v <= 1.0)) throw DomainError(std::string(what) + " grid values must lie in (0,1]");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// BCDF values of every pair at every rarity threshold, computed once and
// shared by all configurations and folds.
class SweepEngine {
public:
  SweepEngine(const CountTable& table, const SweepOptions& options)
      : rarity_(normalized_grid(options.rarity_grid, "rarity")),
        confidence_(normalized_grid(options.confidence_grid, "confidence")), workers_(options.workers) {
    std::size_t r = rarity_.size();
    for (const auto& [key, k] : table.pairs()) {
      index_.emplace(key, keys_.size());
      keys_.push_back(&key);
      bool excl = options.excluded.count(key.prop) > 0;
      excluded_.push_back(excl);
      std::uint64_t n_a = table.n_a(key.path);
      std::uint64_t n_prop = table.n_prop(key.prop);
      for (std::size_t i = 0; i < r; ++i) {
        prop_rarity_.push_back(bcdf(k, n_a, rarity_[i]));  // tested against p_cprop
        path_rarity_.push_back(bcdf(k, n_prop, rarity_[i])); // tested against p_ca
      }
    }
  }

  std::size_t config_count() const {
    std::size_t r = rarity_.size();
    std::size_t c = confidence_.size();
    return r * r * c * c;
  }

  ModelConfig config(std::size_t idx) const {
    std::size_t c = confidence_.size();
    std::size_t r = rarity_.size();
    std::size_t icp = idx % c;
    idx /= c;
    std::size_t ica = idx % c;
    idx /= c;
    std::size_t ip = idx % r;
    idx /= r;
    return ModelConfig{rarity_[idx], rarity_[ip], confidence_[ica], confidence_[icp]};
  }

  bool anomalous(std::size_t pair, std::size_t idx) const {
    if (excluded_[pair]) return false;
    std::size_t c = confidence_.size();
    std::size_t r = rarity_.size();
    std::size_t icp = idx % c;
    idx /= c;
    std::size_t ica = idx % c;
    idx /= c;
    std::size_t ip = idx % r;
    std::size_t ia = idx / r;
    return prop_rarity_[pair * r + ip] < confidence_[icp] && path_rarity_[pair * r + ia] < confidence_[ica];
  }

  struct LabelIndex {
    std::vector<std::pair<std::size_t, LabelKind>> in_table;
    std::uint64_t incorrect_total = 0;
  };

  LabelIndex index_labels(const LabelSet& labels) const {
    LabelIndex li;
    for (const auto& [key, kind] : labels) {
      if (kind == LabelKind::Incorrect) ++li.incorrect_total;
      auto it = index_.find(key);
      if (it != index_.end()) li.in_table.emplace_back(it->second, kind);
    }
    return li;
  }

  Metrics metrics(std::size_t idx, const LabelIndex& li) const {
    Metrics m;
    std::uint64_t flagged = 0;
    for (const auto& [pair, kind] : li.in_table) {
      bool a = anomalous(pair, idx);
      if (a) ++flagged;
      if (a && kind == LabelKind::Incorrect) ++m.true_positives;
      if (a && kind == LabelKind::Correct) ++m.false_positives;
      if (!a && kind == LabelKind::Incorrect) ++m.false_negatives;
    }
    // incorrect labels for pairs absent from the table are misses too
    std::uint64_t absent_incorrect = li.incorrect_total - m.true_positives - m.false_negatives;
    m.false_negatives += absent_incorrect;
    m.precision = Ratio{m.true_positives, flagged};
    m.recall = Ratio{m.true_positives, li.incorrect_total};
    return m;
  }

  // A training fold may hold no incorrect label; recall is then undefined
  // and selection falls back to precision alone.
  SweepResult run(const LabelSet& labels, bool require_incorrect = true) const {
    LabelIndex li = index_labels(labels);
    if (require_incorrect && li.incorrect_total == 0) throw EmptyLabelSet();
    SweepResult result;
    result.points.resize(config_count());
    parallel_for(result.points.size(), workers_, [&](std::size_t idx) {
      SweepPoint& p = result.points[idx];
      p.cfg = config(idx);
      p.metrics = metrics(idx, li);
      std::uint64_t count = 0;
      for (std::size_t i = 0; i < keys_.size(); ++i)
        if (anomalous(i, idx)) ++count;
      p.anomalous_count = count;
    });
    result.front = pareto_front(result.points);
    result.optimum = select_optimum(result.points);
    return result;
  }

private:
  std::vector<double> rarity_;
  std::vector<double> confidence_;
  unsigned workers_;
  std::vector<const PairKey*> keys_;
  std::map<PairKey, std::size_t> index_;
  std::vector<bool> excluded_;
  std::vector<double> prop_rarity_;
  std::vector<double> path_rarity_;
};

bool better(const Metrics& a, const Metrics& b) {
  // a strictly better than b under (precision, recall) lexicographic order
  if (a.precision.defined() != b.precision.defined()) return a.precision.defined();
  if (!a.precision.defined()) return less(b.recall, a.recall);
  if (!same_value(a.precision, b.precision)) return less(b.precision, a.precision);
  return less(b.recall, a.recall);
}

bool dominates(const Metrics& q, const Metrics& p) {
  bool prec_ge = !less(q.precision, p.precision);
  bool rec_ge = !less(q.recall, p.recall);
  bool prec_gt = less(p.precision, q.precision);
  bool rec_gt = less(p.recall, q.recall);
  return (prec_ge && rec_gt) || (prec_gt && rec_ge);
}

} // namespace

std::size_t select_optimum(const std::vector<SweepPoint>& points) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (better(points[i].metrics, points[best].metrics)) best = i;
  return best;
}

std::vector<std::size_t> pareto_front(const std::vector<SweepPoint>& points) {
  std::vector<std::size_t> defined;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].metrics.precision.defined()) defined.push_back(i);
  // distinct (precision, recall) values decide membership
  std::vector<std::size_t> reps;
  for (std::size_t i : defined) {
    bool seen = false;
    for (std::size_t r : reps)
      if (same_value(points[r].metrics.precision, points[i].metrics.precision) &&
          same_value(points[r].metrics.recall, points[i].metrics.recall)) {
        seen = true;
        break;
      }
    if (!seen) reps.push_back(i);
  }
  std::vector<std::size_t> undominated;
  for (std::size_t p : reps) {
    bool dom = false;
    for (std::size_t q : reps)
      if (q != p && dominates(points[q].metrics, points[p].metrics)) {
        dom = true;
        break;
      }
    if (!dom) undominated.push_back(p);
  }
  std::vector<std::size_t> front;
  for (std::size_t i : defined)
    for (std::size_t u : undominated)
      if (same_value(points[u].metrics.precision, points[i].metrics.precision) &&
          same_value(points[u].metrics.recall, points[i].metrics.recall)) {
        front.push_back(i);
        break;
      }
  std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    const Metrics& ma = points[a].metrics;
    const Metrics& mb = points[b].metrics;
    if (!same_value(ma.precision, mb.precision)) return less(mb.precision, ma.precision);
    if (!same_value(ma.recall, mb.recall)) return less(ma.recall, mb.recall);
    return a < b;
  });
  return front;
}

SweepResult sweep(const CountTable& table, const LabelSet& labels, const SweepOptions& options) {
  SweepEngine engine(table, options);
  return engine.run(labels);
}

std::vector<std::size_t> assign_folds(const LabelSet& labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
  if (folds > labels.size()) throw UsageError("more folds than labeled pairs");
  std::vector<PairKey> keys;
  for (const auto& [key, kind] : labels) keys.push_back(key);
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return RenderedOrder{}(keys[a], keys[b]);
  });
  // Fisher-Yates with an explicit modulus so results do not depend on the
  // standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i-- > 1;) {
    std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> fold_of(keys.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) fold_of[order[pos]] = pos % folds;
  return fold_of;
}

std::vector<FoldResult> cross_validate(const CountTable& table, const LabelSet& labels, std::size_t folds,
                                       std::uint64_t seed, const SweepOptions& options) {
  bool any_incorrect = std::any_of(labels.begin(), labels.end(),
                                   [](const auto& e) { return e.second == LabelKind::Incorrect; });
  if (!any_incorrect) throw EmptyLabelSet();
  std::vector<std::size_t> fold_of = assign_folds(labels, folds, seed);
  SweepEngine engine(table, options);
  std::vector<FoldResult> out;
  for (std::size_t f = 0; f < folds; ++f) {
    LabelSet train;
    LabelSet held_out;
    std::size_t i = 0;
    for (const auto& [key, kind] : labels) {
      (fold_of[i++] == f ? held_out : train).emplace(key, kind);
    }
    SweepResult r = engine.run(train, false);
    FoldResult fr;
    fr.fold = f;
    fr.cfg = r.points[r.optimum].cfg;
    fr.train = r.points[r.optimum].metrics;
    fr.validation = engine.metrics(r.optimum, engine.index_labels(held_out));
    out.push_back(fr);
  }
  return out;
}

std::string format_ratio(const Ratio& r) {
  if (!r.defined()) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", r.value());
  return buf;
}

std::string format_threshold(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

namespace {

void write_point(const SweepPoint& p, std::ostream& out) {
  out << format_threshold(p.cfg.p_a) << ',' << format_threshold(p.cfg.p_prop) << ','
      << format_threshold(p.cfg.p_ca) << ',' << format_threshold(p.cfg.p_cprop) << ','
      << format_ratio(p.metrics.precision) << ',' << format_ratio(p.metrics.recall) << ','
      << p.anomalous_count << '\n';
}

constexpr const char* kSweepHeader = "p_a,p_prop,p_ca,p_cprop,precision,recall,anomalous_count\n";

} // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << kSweepHeader;
  for (const auto& p : result.points) write_point(p, out);
}

void write_front_csv(const SweepResult& result, std::ostream& out) {
  out << kSweepHeader;
  for (std::size_t i : result.front) write_point(result.points[i], out);
}

void write_optimum(const SweepResult& result, std::ostream& out) {
  const SweepPoint& p = result.points[result.optimum];
  out << "p_a=" << format_threshold(p.cfg.p_a) << " p_prop=" << format_threshold(p.cfg.p_prop)
      << " p_ca=" << format_threshold(p.cfg.p_ca) << " p_cprop=" << format_threshold(p.cfg.p_cprop)
      << " precision=" << format_ratio(p.metrics.precision) << " (" << p.metrics.precision.num << "/"
      << p.metrics.precision.den << ")"
      << " recall=" << format_ratio(p.metrics.recall) << " (" << p.metrics.recall.num << "/"
      << p.metrics.recall.den << ")"
      << " anomalous=" << p.anomalous_count << '\n';
}

void write_folds_csv(const std::vector<FoldResult>& folds, std::ostream& out) {
  out << "fold,p_a,p_prop,p_ca,p_cprop,train_precision,train_recall,validation_precision,validation_recall\n";
  for (const auto& f : folds) {
    out << f.fold << ',' << format_threshold(f.cfg.p_a) << ',' << format_threshold(f.cfg.p_prop) << ','
        << format_threshold(f.cfg.p_ca) << ',' << format_threshold(f.cfg.p_cprop) << ','
        << format_ratio(f.train.precision) << ',' << format_ratio(f.train.recall) << ','
        << format_ratio(f.validation.precision) << ',' << format_ratio(f.validation.recall) << '\n';
  }
}

} // namespace propcheck
