#include "propcheck/propcheck.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "propcheck/checker.hpp"
#include "propcheck/config.hpp"
#include "propcheck/error.hpp"
#include "propcheck/miner.hpp"
#include "propcheck/stats.hpp"
#include "propcheck/validation.hpp"

struct pc_config {
  propcheck::RunConfig cfg;
};

struct pc_table {
  propcheck::CountTable table;
};

struct pc_findings {
  propcheck::CheckResult result;
};

namespace {

using namespace propcheck;

thread_local std::string last_error;

template <typename F> pc_status guard(F&& f) {
  last_error.clear();
  try {
    f();
    return PC_OK;
  } catch (const UsageError& e) {
    last_error = e.what();
    return PC_ERR_USAGE;
  } catch (const IoError& e) {
    last_error = e.what();
    return PC_ERR_IO;
  } catch (const FormatError& e) {
    last_error = e.what();
    return PC_ERR_FORMAT;
  } catch (const SyntaxError& e) {
    last_error = e.what();
    return PC_ERR_SYNTAX;
  } catch (const PathSyntaxError& e) {
    last_error = e.what();
    return PC_ERR_FORMAT;
  } catch (const DomainError& e) {
    last_error = e.what();
    return PC_ERR_DOMAIN;
  } catch (const ModelError& e) {
    last_error = e.what();
    return PC_ERR_MODEL;
  } catch (const EmptyLabelSet& e) {
    last_error = e.what();
    return PC_ERR_EMPTY_LABELS;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return PC_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw UsageError(std::string("invalid argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

std::vector<std::filesystem::path> to_paths(const char* const* roots, size_t n) {
  require(n == 0 || roots != nullptr, "roots");
  std::vector<std::filesystem::path> out;
  for (size_t i = 0; i < n; ++i) {
    require(roots[i] != nullptr, "root");
    out.emplace_back(roots[i]);
  }
  return out;
}

std::set<std::string> to_set(const char* const* items, size_t n) {
  require(n == 0 || items != nullptr, "list");
  std::set<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    require(items[i] != nullptr, "list item");
    out.insert(items[i]);
  }
  return out;
}

} // namespace

extern "C" {

const char* pc_version(void) { return "0.1.0"; }

const char* pc_last_error(void) { return last_error.c_str(); }

void pc_string_free(char* s) { std::free(s); }

pc_status pc_config_new(pc_config** out) {
  return guard([&] {
    require(out != nullptr, "out");
    *out = new pc_config();
  });
}

void pc_config_free(pc_config* cfg) { delete cfg; }

pc_status pc_config_apply_json(pc_config* cfg, const char* json_text) {
  return guard([&] {
    require(cfg && json_text, "cfg/json_text");
    cfg->cfg.apply_json(json_text, "<config>");
  });
}

pc_status pc_config_apply_file(pc_config* cfg, const char* path) {
  return guard([&] {
    require(cfg && path, "cfg/path");
    cfg->cfg.apply_file(path);
  });
}

pc_status pc_config_to_json(const pc_config* cfg, char** out) {
  return guard([&] {
    require(cfg && out, "cfg/out");
    *out = dup_string(cfg->cfg.to_json());
  });
}

pc_status pc_config_set_thresholds(pc_config* cfg, double p_a, double p_prop, double p_ca, double p_cprop) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    ModelConfig m{p_a, p_prop, p_ca, p_cprop};
    m.validate();
    cfg->cfg.thresholds = m;
  });
}

pc_status pc_config_set_grids(pc_config* cfg, const double* rarity, size_t n_rarity, const double* confidence,
                              size_t n_confidence) {
  return guard([&] {
    require(cfg && rarity && confidence, "cfg/grids");
    RunConfig next = cfg->cfg;
    next.rarity_grid.assign(rarity, rarity + n_rarity);
    next.confidence_grid.assign(confidence, confidence + n_confidence);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

pc_status pc_config_set_min_support(pc_config* cfg, uint64_t min_support) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    cfg->cfg.min_support = min_support;
  });
}

pc_status pc_config_set_seed(pc_config* cfg, uint64_t seed) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    cfg->cfg.seed = seed;
  });
}

pc_status pc_config_set_folds(pc_config* cfg, size_t folds) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    if (folds < 2) throw UsageError("folds must be at least 2");
    cfg->cfg.folds = folds;
  });
}

pc_status pc_config_set_workers(pc_config* cfg, unsigned workers) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    if (workers == 0) throw UsageError("workers must be at least 1");
    cfg->cfg.workers = workers;
  });
}

pc_status pc_config_set_lenient_ts(pc_config* cfg, int enabled) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    cfg->cfg.lenient_ts = enabled != 0;
  });
}

pc_status pc_config_set_tracked_modules(pc_config* cfg, const char* const* modules, size_t n) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    cfg->cfg.tracked_modules = to_set(modules, n);
  });
}

pc_status pc_config_set_excluded_props(pc_config* cfg, const char* const* props, size_t n) {
  return guard([&] {
    require(cfg != nullptr, "cfg");
    cfg->cfg.excluded_props = to_set(props, n);
  });
}

pc_status pc_mine(const pc_config* cfg, const char* const* roots, size_t n_roots, pc_table** out,
                  char** observations_out, char** errors_out) {
  return guard([&] {
    require(cfg && out, "cfg/out");
    const RunConfig& rc = cfg->cfg;
    auto files = discover_sources(to_paths(roots, n_roots), rc.lenient_ts);
    MineResult r = mine(files, rc.analysis_options(), rc.workers);
    std::string obs;
    if (observations_out) {
      std::ostringstream os;
      write_observations(r.observations, os);
      obs = os.str();
    }
    std::string errs;
    for (const auto& e : r.errors) errs += e.file + '\t' + e.message + '\n';
    auto* t = new pc_table{std::move(r.table)};
    char* o = nullptr;
    try {
      if (observations_out) o = dup_string(obs);
      set_out(errors_out, errs);
    } catch (...) {
      std::free(o);
      delete t;
      throw;
    }
    if (observations_out) *observations_out = o;
    *out = t;
  });
}

pc_status pc_table_new(pc_table** out) {
  return guard([&] {
    require(out != nullptr, "out");
    *out = new pc_table();
  });
}

void pc_table_free(pc_table* table) { delete table; }

pc_status pc_table_load(const char* path, pc_table** out) {
  return guard([&] {
    require(path && out, "path/out");
    *out = new pc_table{load_table_file(path)};
  });
}

pc_status pc_table_parse(const char* text, pc_table** out) {
  return guard([&] {
    require(text && out, "text/out");
    std::istringstream in(text);
    *out = new pc_table{load_table(in, "<text>")};
  });
}

pc_status pc_table_save(const pc_table* table, const char* path) {
  return guard([&] {
    require(table && path, "table/path");
    save_table_file(table->table, path);
  });
}

pc_status pc_table_to_text(const pc_table* table, char** out) {
  return guard([&] {
    require(table && out, "table/out");
    std::ostringstream os;
    save_table(table->table, os);
    *out = dup_string(os.str());
  });
}

pc_status pc_table_add(pc_table* table, const char* path, const char* prop, uint64_t count) {
  return guard([&] {
    require(table && path && prop, "table/path/prop");
    if (count == 0) throw UsageError("count must be positive");
    table->table.add(PairKey{parse_path(path), prop}, count);
  });
}

pc_status pc_table_merge(const pc_table* a, const pc_table* b, pc_table** out) {
  return guard([&] {
    require(a && b && out, "a/b/out");
    *out = new pc_table{merge(a->table, b->table)};
  });
}

pc_status pc_table_counts(const pc_table* table, const char* path, const char* prop, uint64_t* k, uint64_t* n_a,
                          uint64_t* n_prop) {
  return guard([&] {
    require(table && path && prop, "table/path/prop");
    AccessPath p = parse_path(path);
    if (k) *k = table->table.k(PairKey{p, prop});
    if (n_a) *n_a = table->table.n_a(p);
    if (n_prop) *n_prop = table->table.n_prop(prop);
  });
}

size_t pc_table_pairs(const pc_table* table) { return table ? table->table.pairs().size() : 0; }

uint64_t pc_table_total(const pc_table* table) { return table ? table->table.total() : 0; }

pc_status pc_bcdf(uint64_t k, uint64_t n, double p, double* out) {
  return guard([&] {
    require(out != nullptr, "out");
    *out = bcdf(k, n, p);
  });
}

pc_status pc_classify_pair(const pc_config* cfg, uint64_t k, uint64_t n_a, uint64_t n_prop,
                           pc_classification* out) {
  return guard([&] {
    require(cfg && out, "cfg/out");
    if (k > n_a || k > n_prop) throw DomainError("k must not exceed n_a or n_prop");
    cfg->cfg.thresholds.validate();
    switch (classify_pair(PairStats{k, n_a, n_prop}, cfg->cfg.thresholds, cfg->cfg.min_support)) {
    case Classification::Expected:
      *out = PC_EXPECTED;
      break;
    case Classification::Anomalous:
      *out = PC_ANOMALOUS;
      break;
    case Classification::Unknown:
      *out = PC_UNKNOWN;
      break;
    }
  });
}

pc_status pc_classify(const pc_config* cfg, const pc_table* table, char** anomalous_out, size_t* count) {
  return guard([&] {
    require(cfg && table && anomalous_out, "cfg/table/out");
    const RunConfig& rc = cfg->cfg;
    auto pairs = anomalous_pairs(classify_all(table->table, rc.thresholds, rc.excluded_props, rc.min_support));
    std::ostringstream os;
    save_anomalous(pairs, os);
    *anomalous_out = dup_string(os.str());
    if (count) *count = pairs.size();
  });
}

pc_status pc_label(const pc_table* table, const char* model_path, char** labels_out, char** summary_out) {
  return guard([&] {
    require(table && model_path && labels_out, "table/model_path/out");
    ApiModel model = ApiModel::load(model_path);
    ValidationSet vs = build_validation_set(table->table, model);
    std::ostringstream labels;
    save_labels(vs.labels, labels);
    std::string summary;
    if (summary_out) {
      std::ostringstream os;
      write_summary(vs.summary, os);
      summary = os.str();
    }
    char* l = dup_string(labels.str());
    if (summary_out) {
      try {
        *summary_out = dup_string(summary);
      } catch (...) {
        std::free(l);
        throw;
      }
    }
    *labels_out = l;
  });
}

pc_status pc_sweep(const pc_config* cfg, const pc_table* table, const char* labels_path, char** sweep_csv_out,
                   char** front_csv_out, char** optimum_out) {
  return guard([&] {
    require(cfg && table && labels_path, "cfg/table/labels_path");
    LabelSet labels = load_labels_file(labels_path);
    SweepResult r = sweep(table->table, labels, cfg->cfg.sweep_options());
    std::ostringstream s, f, o;
    write_sweep_csv(r, s);
    write_front_csv(r, f);
    write_optimum(r, o);
    std::vector<char*> made;
    try {
      if (sweep_csv_out) made.push_back(*sweep_csv_out = dup_string(s.str()));
      if (front_csv_out) made.push_back(*front_csv_out = dup_string(f.str()));
      if (optimum_out) made.push_back(*optimum_out = dup_string(o.str()));
    } catch (...) {
      for (char* m : made) std::free(m);
      throw;
    }
  });
}

pc_status pc_crossval(const pc_config* cfg, const pc_table* table, const char* labels_path, char** folds_csv_out) {
  return guard([&] {
    require(cfg && table && labels_path && folds_csv_out, "cfg/table/labels_path/out");
    LabelSet labels = load_labels_file(labels_path);
    const RunConfig& rc = cfg->cfg;
    auto folds = cross_validate(table->table, labels, rc.folds, rc.seed, rc.sweep_options());
    std::ostringstream os;
    write_folds_csv(folds, os);
    *folds_csv_out = dup_string(os.str());
  });
}

pc_status pc_check(const pc_config* cfg, const char* const* roots, size_t n_roots, const char* anomalous_path,
                   pc_findings** out) {
  return guard([&] {
    require(cfg && anomalous_path && out, "cfg/anomalous_path/out");
    const RunConfig& rc = cfg->cfg;
    auto pairs = load_anomalous_file(anomalous_path);
    AnomalousSet anomalous(pairs.begin(), pairs.end());
    auto files = discover_sources(to_paths(roots, n_roots), rc.lenient_ts);
    *out = new pc_findings{check_files(files, anomalous, rc.check_options())};
  });
}

pc_status pc_findings_load_json(const char* path, pc_findings** out) {
  return guard([&] {
    require(path && out, "path/out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(std::string("cannot read ") + path);
    *out = new pc_findings{load_findings_json(in, path)};
  });
}

void pc_findings_free(pc_findings* findings) { delete findings; }

size_t pc_findings_count(const pc_findings* findings) { return findings ? findings->result.findings.size() : 0; }

size_t pc_findings_unsafe(const pc_findings* findings) { return findings ? findings->result.unsafe_count() : 0; }

size_t pc_findings_parse_errors(const pc_findings* findings) {
  return findings ? findings->result.errors.size() : 0;
}

pc_status pc_findings_text(const pc_findings* findings, char** out) {
  return guard([&] {
    require(findings && out, "findings/out");
    std::ostringstream os;
    write_findings_text(findings->result, os);
    *out = dup_string(os.str());
  });
}

pc_status pc_findings_json(const pc_findings* findings, char** out) {
  return guard([&] {
    require(findings && out, "findings/out");
    std::ostringstream os;
    write_findings_json(findings->result, os);
    *out = dup_string(os.str());
  });
}

pc_status pc_findings_overlap(const pc_findings* findings, char** out) {
  return guard([&] {
    require(findings && out, "findings/out");
    std::ostringstream os;
    write_overlap(heuristic_overlap(findings->result.findings), os);
    *out = dup_string(os.str());
  });
}

pc_status pc_findings_errors(const pc_findings* findings, char** out) {
  return guard([&] {
    require(findings && out, "findings/out");
    std::string s;
    for (const auto& e : findings->result.errors) s += e.file + '\t' + e.message + '\n';
    *out = dup_string(s);
  });
}

} // extern "C"
