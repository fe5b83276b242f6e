#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "propcheck/analysis.hpp"
#include "propcheck/miner.hpp"

namespace propcheck {

using AnomalousSet = std::set<PairKey>;

enum class Heuristic : std::uint8_t { H1 = 0, H2, H3, H4, H5 };

// Set of heuristics that fired for one instance.
class HeuristicSet {
public:
  HeuristicSet() = default;
  HeuristicSet(std::initializer_list<Heuristic> hs) {
    for (Heuristic h : hs) insert(h);
  }

  void insert(Heuristic h) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(h)); }
  bool contains(Heuristic h) const { return (bits_ >> static_cast<unsigned>(h)) & 1u; }
  bool empty() const { return bits_ == 0; }
  std::uint8_t bits() const { return bits_; }
  static HeuristicSet from_bits(std::uint8_t bits) {
    HeuristicSet s;
    s.bits_ = bits & 0x1f;
    return s;
  }

  // "H1,H3"; empty string for the empty set.
  std::string to_string() const;
  // Inverse of to_string. Throws std::invalid_argument.
  static HeuristicSet parse(const std::string& text);

  friend bool operator==(const HeuristicSet&, const HeuristicSet&) = default;
  friend auto operator<=>(const HeuristicSet&, const HeuristicSet&) = default;

private:
  std::uint8_t bits_ = 0;
};

struct Instance {
  std::vector<PairKey> keys; // matching anomalous pairs, rendered order; all share one prop
  Span span;                 // the member access
  NodeId member = kNoNode;
  NodeId base = kNoNode;
  std::optional<SsaVar> ssa_var; // identity of an identifier base

  const std::string& prop() const { return keys.front().prop; }
};

struct Finding {
  Instance instance;
  HeuristicSet heuristics; // empty means Unsafe

  bool unsafe() const { return heuristics.empty(); }
};

// Codebase-wide index of property writes `e.p = ...` keyed by (path of e, p).
using WriteIndex = std::set<PairKey>;

void add_writes(const FileAnalysis& fa, WriteIndex& index);

// One instance per member read whose base has at least one path a with
// ⟨a, p⟩ anomalous. `fa` must carry flow data for ssa_var to be set.
std::vector<Instance> find_instances(const FileAnalysis& fa, const AnomalousSet& anomalous);

bool h1_custom_assignment(const Instance& inst, const WriteIndex& writes);
bool h2_conditional_guard(const Ast& ast, const Instance& inst, bool typeof_guard = false);
bool h3_dominated_access(const FileAnalysis& fa, const Instance& inst);
bool h4_alternate_path(const Instance& inst, const PathMap& paths, const AnomalousSet& anomalous);
bool h5_reassigned_base(const FileAnalysis& fa, const Instance& inst);

struct CheckOptions {
  AnalysisOptions analysis;
  bool h2_typeof_guard = false; // also treat `typeof e.p` as a guard
  unsigned workers = 1;
};

struct CheckResult {
  std::vector<Finding> findings; // sorted by (file, line, column)
  std::vector<FileError> errors; // sorted by file
  std::size_t files = 0;

  std::size_t unsafe_count() const;
};

// Findings for in-memory sources. Files that fail to parse are reported in
// errors and contribute nothing else.
CheckResult check_sources(const std::vector<SourceFile>& sources, const AnomalousSet& anomalous,
                          const CheckOptions& options = {});

// Loads every file first; unreadable files throw IoError.
CheckResult check_files(const std::vector<std::filesystem::path>& files, const AnomalousSet& anomalous,
                        const CheckOptions& options = {});

// Safe findings counted by the exact set of heuristics that fired.
std::map<HeuristicSet, std::size_t> heuristic_overlap(const std::vector<Finding>& findings);

// `file:line:col<TAB>paths<TAB>prop<TAB>UNSAFE|SAFE(H..)`, paths joined by " | ".
void write_findings_text(const CheckResult& result, std::ostream& out);
void write_findings_json(const CheckResult& result, std::ostream& out);
// `H2,H3<TAB>count` lines in heuristic-set order.
void write_overlap(const std::map<HeuristicSet, std::size_t>& overlap, std::ostream& out);

// Reads findings back from the JSON report. Node ids are not preserved.
CheckResult load_findings_json(std::istream& in, const std::string& source_name);

} // namespace propcheck
