#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "propcheck/access_path.hpp"
#include "propcheck/analysis.hpp"

namespace propcheck {

struct PairKey {
  AccessPath path;
  std::string prop;

  friend bool operator==(const PairKey&, const PairKey&) = default;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

// Orders by (rendered path, prop), the order used in every output file.
struct RenderedOrder {
  bool operator()(const PairKey& a, const PairKey& b) const;
};

struct Observation {
  PairKey key;
  Span span;
};

// Pair counts k(a,p) with their marginals n_a, n_prop and the total.
class CountTable {
public:
  void add(const PairKey& key, std::uint64_t count = 1);

  std::uint64_t k(const PairKey& key) const;
  std::uint64_t n_a(const AccessPath& path) const;
  std::uint64_t n_prop(const std::string& prop) const;
  std::uint64_t total() const { return total_; }
  bool empty() const { return pairs_.empty(); }

  const std::map<PairKey, std::uint64_t>& pairs() const { return pairs_; }
  const std::map<AccessPath, std::uint64_t>& path_totals() const { return path_totals_; }
  const std::map<std::string, std::uint64_t>& prop_totals() const { return prop_totals_; }

  // The three marginal identities and positivity of every count.
  bool consistent() const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

private:
  std::map<PairKey, std::uint64_t> pairs_;
  std::map<AccessPath, std::uint64_t> path_totals_;
  std::map<std::string, std::uint64_t> prop_totals_;
  std::uint64_t total_ = 0;
};

// One observation per member read e.p per path of e. Properties that are
// empty or contain tab/newline characters are skipped.
std::vector<Observation> extract(const Ast& ast, const PathMap& paths);

CountTable aggregate(const std::vector<Observation>& observations);
CountTable merge(const CountTable& a, const CountTable& b);

void save_table(const CountTable& table, std::ostream& out);
CountTable load_table(std::istream& in, const std::string& source_name);
void save_table_file(const CountTable& table, const std::filesystem::path& path);
CountTable load_table_file(const std::filesystem::path& path);

// `path<TAB>prop<TAB>file:line:col` per observation.
void write_observations(const std::vector<Observation>& observations, std::ostream& out);

// Recursively collects .js/.mjs/.cjs files (plus .ts/.mts/.cts when
// `include_ts`), skipping node_modules and hidden directories. Sorted.
std::vector<std::filesystem::path> discover_sources(const std::vector<std::filesystem::path>& roots,
                                                    bool include_ts);

struct FileError {
  std::string file;
  std::string message;
};

struct MineResult {
  CountTable table;
  std::vector<Observation> observations; // file order, then source order
  std::vector<FileError> errors;
  std::size_t files = 0;
};

MineResult mine(const std::vector<std::filesystem::path>& files, const AnalysisOptions& options,
                unsigned workers);

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace propcheck
