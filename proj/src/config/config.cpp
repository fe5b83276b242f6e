#include "propcheck/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "propcheck/error.hpp"

namespace propcheck {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {"thresholds",  "rarity_grid", "confidence_grid", "min_support",
                                     "excluded_props", "seed",     "tracked_modules", "folds",
                                     "workers",     "path_cap",    "lenient_ts",      "h2_typeof_in"};

template <typename T> T get_as(const json& j, const char* key, const std::string& source) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw FormatError(source, 1, std::string("wrong type for '") + key + "'");
  }
}

std::uint64_t get_unsigned(const json& j, const char* key, const std::string& source) {
  if (!j.is_number_unsigned()) throw FormatError(source, 1, std::string("'") + key + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

} // namespace

void RunConfig::apply_json(const std::string& text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source_name, 1, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError(source_name, 1, "config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!kKeys.count(key)) throw FormatError(source_name, 1, "unknown config key '" + key + "'");

  RunConfig next = *this;
  if (doc.contains("thresholds")) {
    const json& t = doc["thresholds"];
    if (!t.is_object()) throw FormatError(source_name, 1, "'thresholds' must be an object");
    for (const auto& [key, value] : t.items()) {
      double v = get_as<double>(value, key.c_str(), source_name);
      if (key == "p_a") next.thresholds.p_a = v;
      else if (key == "p_prop") next.thresholds.p_prop = v;
      else if (key == "p_ca") next.thresholds.p_ca = v;
      else if (key == "p_cprop") next.thresholds.p_cprop = v;
      else throw FormatError(source_name, 1, "unknown threshold '" + key + "'");
    }
  }
  if (doc.contains("rarity_grid")) next.rarity_grid = get_as<std::vector<double>>(doc["rarity_grid"], "rarity_grid", source_name);
  if (doc.contains("confidence_grid"))
    next.confidence_grid = get_as<std::vector<double>>(doc["confidence_grid"], "confidence_grid", source_name);
  if (doc.contains("min_support")) next.min_support = get_unsigned(doc["min_support"], "min_support", source_name);
  if (doc.contains("excluded_props"))
    next.excluded_props = get_as<std::set<std::string>>(doc["excluded_props"], "excluded_props", source_name);
  if (doc.contains("seed")) next.seed = get_unsigned(doc["seed"], "seed", source_name);
  if (doc.contains("tracked_modules"))
    next.tracked_modules = get_as<std::set<std::string>>(doc["tracked_modules"], "tracked_modules", source_name);
  if (doc.contains("folds")) next.folds = get_unsigned(doc["folds"], "folds", source_name);
  if (doc.contains("workers")) next.workers = static_cast<unsigned>(get_unsigned(doc["workers"], "workers", source_name));
  if (doc.contains("path_cap")) next.path_cap = get_unsigned(doc["path_cap"], "path_cap", source_name);
  if (doc.contains("lenient_ts")) next.lenient_ts = get_as<bool>(doc["lenient_ts"], "lenient_ts", source_name);
  if (doc.contains("h2_typeof_in")) next.h2_typeof_in = get_as<bool>(doc["h2_typeof_in"], "h2_typeof_in", source_name);
  next.validate();
  *this = std::move(next);
}

void RunConfig::apply_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_json(buf.str(), path.string());
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["thresholds"] = {{"p_a", thresholds.p_a},
                     {"p_prop", thresholds.p_prop},
                     {"p_ca", thresholds.p_ca},
                     {"p_cprop", thresholds.p_cprop}};
  j["rarity_grid"] = rarity_grid;
  j["confidence_grid"] = confidence_grid;
  j["min_support"] = min_support;
  j["excluded_props"] = excluded_props;
  j["seed"] = seed;
  j["tracked_modules"] = tracked_modules;
  j["folds"] = folds;
  j["workers"] = workers;
  j["path_cap"] = path_cap;
  j["lenient_ts"] = lenient_ts;
  j["h2_typeof_in"] = h2_typeof_in;
  return j.dump(2) + "\n";
}

void RunConfig::validate() const {
  thresholds.validate();
  if (rarity_grid.empty() || confidence_grid.empty()) throw UsageError("grids must not be empty");
  for (double v : rarity_grid)
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("rarity grid values must lie in (0,1]");
  for (double v : confidence_grid)
    if (!(v > 0.0 && v <= 1.0)) throw DomainError("confidence grid values must lie in (0,1]");
  if (workers == 0) throw UsageError("workers must be at least 1");
  if (path_cap == 0) throw UsageError("path_cap must be at least 1");
  if (folds < 2) throw UsageError("folds must be at least 2");
}

AnalysisOptions RunConfig::analysis_options() const {
  AnalysisOptions o;
  o.parse.lenient_types = lenient_ts;
  o.infer.path_cap = path_cap;
  o.infer.roots.all_modules = tracked_modules.empty();
  o.infer.roots.modules = tracked_modules;
  return o;
}

SweepOptions RunConfig::sweep_options() const {
  SweepOptions o;
  o.rarity_grid = rarity_grid;
  o.confidence_grid = confidence_grid;
  o.excluded = excluded_props;
  o.min_support = min_support;
  o.workers = workers;
  return o;
}

CheckOptions RunConfig::check_options() const {
  CheckOptions o;
  o.analysis = analysis_options();
  o.h2_typeof_guard = h2_typeof_in;
  o.workers = workers;
  return o;
}

} // namespace propcheck
