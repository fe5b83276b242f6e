#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "propcheck/analysis.hpp"
#include "propcheck/checker.hpp"
#include "propcheck/stats.hpp"

namespace propcheck {

// Settings shared by every pipeline stage. A config file overrides values
// set on the command line.
struct RunConfig {
  ModelConfig thresholds;
  std::vector<double> rarity_grid = default_rarity_grid();
  std::vector<double> confidence_grid = default_confidence_grid();
  std::uint64_t min_support = kDefaultMinSupport;
  std::set<std::string> excluded_props = default_excluded_props();
  std::uint64_t seed = 0;
  std::set<std::string> tracked_modules; // empty tracks every module
  std::size_t folds = 10;
  unsigned workers = 1;
  std::size_t path_cap = 16;
  bool lenient_ts = false;
  bool h2_typeof_in = false;

  // Overlays the keys present in a JSON object. Throws FormatError on
  // malformed JSON, unknown keys or wrongly typed values, DomainError on
  // thresholds outside (0,1].
  void apply_json(const std::string& text, const std::string& source_name);
  void apply_file(const std::filesystem::path& path);
  std::string to_json() const;

  // Throws DomainError or UsageError for inconsistent settings.
  void validate() const;

  AnalysisOptions analysis_options() const;
  SweepOptions sweep_options() const;
  CheckOptions check_options() const;
};

} // namespace propcheck
