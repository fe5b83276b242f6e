#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "propcheck/miner.hpp"
#include "propcheck/validation.hpp"

namespace propcheck {

struct ModelConfig {
  double p_a = 0.005;
  double p_prop = 0.02;
  double p_ca = 0.005;
  double p_cprop = 0.005;

  // Throws DomainError unless every threshold lies in (0,1].
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
  friend auto operator<=>(const ModelConfig&, const ModelConfig&) = default;
};

struct PairStats {
  std::uint64_t k = 0;
  std::uint64_t n_a = 0;
  std::uint64_t n_prop = 0;
};

inline constexpr std::uint64_t kDefaultMinSupport = 5;

const std::vector<double>& default_rarity_grid();
const std::vector<double>& default_confidence_grid();
const std::set<std::string>& default_excluded_props();

// P(X <= k) for X ~ Binomial(n, p). Throws DomainError if k > n or p is
// outside [0,1].
double bcdf(std::uint64_t k, std::uint64_t n, double p);

Classification classify_pair(const PairStats& stats, const ModelConfig& cfg,
                             std::uint64_t min_support = kDefaultMinSupport);

std::map<PairKey, Classification> classify_all(const CountTable& table, const ModelConfig& cfg,
                                               const std::set<std::string>& excluded,
                                               std::uint64_t min_support = kDefaultMinSupport);

// Anomalous pairs in (rendered path, prop) order.
std::vector<PairKey> anomalous_pairs(const std::map<PairKey, Classification>& classified);

void save_anomalous(const std::vector<PairKey>& pairs, std::ostream& out);
std::vector<PairKey> load_anomalous(std::istream& in, const std::string& source_name);
void save_anomalous_file(const std::vector<PairKey>& pairs, const std::filesystem::path& path);
std::vector<PairKey> load_anomalous_file(const std::filesystem::path& path);

struct SweepOptions {
  std::vector<double> rarity_grid = default_rarity_grid();
  std::vector<double> confidence_grid = default_confidence_grid();
  std::set<std::string> excluded = default_excluded_props();
  std::uint64_t min_support = kDefaultMinSupport;
  unsigned workers = 1;
};

struct SweepPoint {
  ModelConfig cfg;
  Metrics metrics;
  std::uint64_t anomalous_count = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points; // lexicographic (p_a, p_prop, p_ca, p_cprop) order
  std::vector<std::size_t> front; // indices into points: precision desc, recall asc, then index
  std::size_t optimum = 0;        // index into points
};

// Throws EmptyLabelSet when labels hold no incorrect pair, UsageError on an
// empty grid, DomainError on a threshold outside (0,1].
SweepResult sweep(const CountTable& table, const LabelSet& labels, const SweepOptions& options = {});

// Highest precision, then highest recall, then smallest configuration;
// configurations with undefined precision rank last.
std::size_t select_optimum(const std::vector<SweepPoint>& points);
std::vector<std::size_t> pareto_front(const std::vector<SweepPoint>& points);

struct FoldResult {
  std::size_t fold = 0;
  ModelConfig cfg;
  Metrics train;
  Metrics validation;
};

std::vector<FoldResult> cross_validate(const CountTable& table, const LabelSet& labels, std::size_t folds,
                                       std::uint64_t seed, const SweepOptions& options = {});

// Fold index of every labeled pair (in LabelSet order) for the given seed.
std::vector<std::size_t> assign_folds(const LabelSet& labels, std::size_t folds, std::uint64_t seed);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_front_csv(const SweepResult& result, std::ostream& out);
void write_optimum(const SweepResult& result, std::ostream& out);
void write_folds_csv(const std::vector<FoldResult>& folds, std::ostream& out);

std::string format_ratio(const Ratio& r); // %.6f or "undefined"
std::string format_threshold(double v);

} // namespace propcheck
