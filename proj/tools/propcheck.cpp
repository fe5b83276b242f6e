// Command-line front end. Talks to the analysis only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "propcheck/propcheck.h"

namespace {

enum Exit { kOk = 0, kUnsafe = 1, kUsage = 2, kInput = 3 };

struct Failure {
  int code;
  std::string message;
};

int exit_code(pc_status s) {
  switch (s) {
  case PC_OK:
    return kOk;
  case PC_ERR_USAGE:
  case PC_ERR_DOMAIN:
    return kUsage;
  default:
    return kInput;
  }
}

void ok(pc_status s) {
  if (s != PC_OK) throw Failure{exit_code(s), pc_last_error()};
}

// Owns a string returned by the C API.
class CStr {
public:
  CStr() = default;
  CStr(const CStr&) = delete;
  CStr& operator=(const CStr&) = delete;
  ~CStr() { pc_string_free(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ ? p_ : ""; }

private:
  char* p_ = nullptr;
};

template <typename T, void (*Free)(T*)> class Handle {
public:
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p_); }
  T** out() { return &p_; }
  T* get() const { return p_; }

private:
  T* p_ = nullptr;
};

using Config = Handle<pc_config, pc_config_free>;
using Table = Handle<pc_table, pc_table_free>;
using Findings = Handle<pc_findings, pc_findings_free>;

// "-" or empty writes to stdout.
void emit(const std::string& target, const std::string& text) {
  if (target.empty() || target == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Failure{kInput, "error writing standard output"};
    return;
  }
  std::ofstream out(target, std::ios::binary);
  if (!out) throw Failure{kInput, "cannot write " + target};
  out << text;
  if (!out) throw Failure{kInput, "error writing " + target};
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

struct Common {
  std::string config_file;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> min_support;
  std::vector<double> thresholds;
  std::vector<double> rarity_grid;
  std::vector<double> confidence_grid;
  std::optional<std::vector<std::string>> excluded;
  std::vector<std::string> modules;
  bool lenient_ts = false;
  bool h2_typeof = false;
};

// Flags first, then the config file on top.
void build_config(const Common& c, Config& cfg) {
  ok(pc_config_new(cfg.out()));
  if (c.workers) ok(pc_config_set_workers(cfg.get(), *c.workers));
  if (c.seed) ok(pc_config_set_seed(cfg.get(), *c.seed));
  if (c.folds) ok(pc_config_set_folds(cfg.get(), *c.folds));
  if (c.min_support) ok(pc_config_set_min_support(cfg.get(), *c.min_support));
  if (!c.thresholds.empty())
    ok(pc_config_set_thresholds(cfg.get(), c.thresholds[0], c.thresholds[1], c.thresholds[2], c.thresholds[3]));
  if (!c.rarity_grid.empty() || !c.confidence_grid.empty()) {
    std::string json = "{";
    auto list = [](const std::vector<double>& v) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        s += (i ? "," : "") + std::string(buf);
      }
      return s + "]";
    };
    if (!c.rarity_grid.empty()) json += "\"rarity_grid\":" + list(c.rarity_grid);
    if (!c.confidence_grid.empty())
      json += std::string(c.rarity_grid.empty() ? "" : ",") + "\"confidence_grid\":" + list(c.confidence_grid);
    json += "}";
    ok(pc_config_apply_json(cfg.get(), json.c_str()));
  }
  if (c.excluded) {
    auto v = c_strings(*c.excluded);
    ok(pc_config_set_excluded_props(cfg.get(), v.data(), v.size()));
  }
  if (!c.modules.empty()) {
    auto v = c_strings(c.modules);
    ok(pc_config_set_tracked_modules(cfg.get(), v.data(), v.size()));
  }
  if (c.lenient_ts) ok(pc_config_set_lenient_ts(cfg.get(), 1));
  if (c.h2_typeof) ok(pc_config_apply_json(cfg.get(), "{\"h2_typeof_in\":true}"));
  if (!c.config_file.empty()) ok(pc_config_apply_file(cfg.get(), c.config_file.c_str()));
}

void load_table(const std::string& path, Table& t) { ok(pc_table_load(path.c_str(), t.out())); }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"propcheck: mine property-access statistics and flag unlikely property accesses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pc_version()));

  Common common;
  app.add_option("--config", common.config_file, "JSON config file; its values override flags")
      ->check(CLI::ExistingFile);
  app.add_option("-j,--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);

  auto add_analysis_flags = [&](CLI::App* sub) {
    sub->add_option("--modules", common.modules, "track only these modules (default: all)")->delimiter(',');
    sub->add_flag("--lenient-ts", common.lenient_ts, "accept .ts files and strip type annotations");
  };
  auto add_model_flags = [&](CLI::App* sub) {
    sub->add_option("--thresholds", common.thresholds, "p_a p_prop p_ca p_cprop")->expected(4);
    sub->add_option("--min-support", common.min_support, "minimum k for an Expected classification");
    sub->add_option("--exclude", common.excluded, "excluded property names (comma separated)")->delimiter(',');
  };
  auto add_grid_flags = [&](CLI::App* sub) {
    sub->add_option("--rarity-grid", common.rarity_grid, "rarity thresholds")->delimiter(',');
    sub->add_option("--confidence-grid", common.confidence_grid, "confidence thresholds")->delimiter(',');
  };

  // mine
  std::vector<std::string> mine_roots;
  std::string mine_out, mine_obs;
  auto* mine = app.add_subcommand("mine", "count (access path, property) pairs in source trees");
  mine->add_option("sources", mine_roots, "source files or directories")->required();
  mine->add_option("-o,--output", mine_out, "pair file (default stdout)");
  mine->add_option("--observations", mine_obs, "also write the observation log");
  add_analysis_flags(mine);

  // classify
  std::string classify_in, classify_out;
  auto* classify = app.add_subcommand("classify", "list anomalous pairs");
  classify->add_option("pairs", classify_in, "pair file")->required();
  classify->add_option("-o,--output", classify_out, "anomalous list (default stdout)");
  add_model_flags(classify);

  // label
  std::string label_in, label_model, label_out, label_summary;
  auto* label = app.add_subcommand("label", "label pairs against an API model");
  label->add_option("pairs", label_in, "pair file")->required();
  label->add_option("--model", label_model, "API model JSON")->required();
  label->add_option("-o,--output", label_out, "label file (default stdout)");
  label->add_option("--summary", label_summary, "per-root summary table");

  // sweep
  std::string sweep_in, sweep_labels, sweep_out, sweep_front, sweep_optimum;
  auto* sweep = app.add_subcommand("sweep", "evaluate every threshold configuration");
  sweep->add_option("pairs", sweep_in, "pair file")->required();
  sweep->add_option("--labels", sweep_labels, "label file")->required();
  sweep->add_option("-o,--output", sweep_out, "sweep CSV (default stdout)");
  sweep->add_option("--front", sweep_front, "Pareto front CSV");
  sweep->add_option("--optimum", sweep_optimum, "selected configuration (default stderr)");
  add_grid_flags(sweep);
  sweep->add_option("--exclude", common.excluded, "excluded property names (comma separated)")->delimiter(',');

  // crossval
  std::string cv_in, cv_labels, cv_out;
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation of the threshold sweep");
  crossval->add_option("pairs", cv_in, "pair file")->required();
  crossval->add_option("--labels", cv_labels, "label file")->required();
  crossval->add_option("-o,--output", cv_out, "fold CSV (default stdout)");
  crossval->add_option("--folds", common.folds, "number of folds (default 10)");
  crossval->add_option("--seed", common.seed, "shuffle seed");
  add_grid_flags(crossval);
  crossval->add_option("--exclude", common.excluded, "excluded property names (comma separated)")->delimiter(',');

  // check
  std::vector<std::string> check_roots;
  std::string check_anomalous, check_out, check_json, check_overlap, check_format = "text";
  auto* check = app.add_subcommand("check", "find and classify instances of anomalous pairs");
  check->add_option("targets", check_roots, "source files or directories")->required();
  check->add_option("--anomalous", check_anomalous, "anomalous list")->required();
  check->add_option("-o,--output", check_out, "findings (default stdout)");
  check->add_option("--format", check_format, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--json", check_json, "also write the JSON report");
  check->add_option("--overlap", check_overlap, "also write the heuristic overlap report");
  check->add_flag("--h2-typeof", common.h2_typeof, "treat typeof e.p as a guard");
  add_analysis_flags(check);

  // report
  std::string report_in, report_out, report_format = "overlap";
  auto* report = app.add_subcommand("report", "summarize a JSON findings report");
  report->add_option("findings", report_in, "JSON report from check")->required();
  report->add_option("-o,--output", report_out, "output (default stdout)");
  report->add_option("--format", report_format, "overlap, text or json")
      ->check(CLI::IsMember({"overlap", "text", "json"}));

  // bcdf
  std::uint64_t bk = 0, bn = 0;
  double bp = 0;
  auto* bcdf = app.add_subcommand("bcdf", "print P(X <= k) for X ~ Binomial(n, p)");
  bcdf->add_option("k", bk)->required();
  bcdf->add_option("n", bn)->required();
  bcdf->add_option("p", bp)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Config cfg;
    build_config(common, cfg);

    if (*mine) {
      auto roots = c_strings(mine_roots);
      Table t;
      CStr obs, errs;
      ok(pc_mine(cfg.get(), roots.data(), roots.size(), t.out(), mine_obs.empty() ? nullptr : obs.out(),
                 errs.out()));
      std::cerr << errs.str();
      CStr text;
      ok(pc_table_to_text(t.get(), text.out()));
      emit(mine_out, text.str());
      if (!mine_obs.empty()) emit(mine_obs, obs.str());
    } else if (*classify) {
      Table t;
      load_table(classify_in, t);
      CStr text;
      std::size_t count = 0;
      ok(pc_classify(cfg.get(), t.get(), text.out(), &count));
      emit(classify_out, text.str());
      std::cerr << count << " anomalous pair(s)\n";
    } else if (*label) {
      Table t;
      load_table(label_in, t);
      CStr labels, summary;
      ok(pc_label(t.get(), label_model.c_str(), labels.out(), summary.out()));
      emit(label_out, labels.str());
      if (!label_summary.empty()) emit(label_summary, summary.str());
    } else if (*sweep) {
      Table t;
      load_table(sweep_in, t);
      CStr csv, front, optimum;
      ok(pc_sweep(cfg.get(), t.get(), sweep_labels.c_str(), csv.out(), front.out(), optimum.out()));
      emit(sweep_out, csv.str());
      if (!sweep_front.empty()) emit(sweep_front, front.str());
      if (sweep_optimum.empty()) std::cerr << optimum.str();
      else emit(sweep_optimum, optimum.str());
    } else if (*crossval) {
      Table t;
      load_table(cv_in, t);
      CStr csv;
      ok(pc_crossval(cfg.get(), t.get(), cv_labels.c_str(), csv.out()));
      emit(cv_out, csv.str());
    } else if (*check) {
      auto roots = c_strings(check_roots);
      Findings f;
      ok(pc_check(cfg.get(), roots.data(), roots.size(), check_anomalous.c_str(), f.out()));
      CStr errs;
      ok(pc_findings_errors(f.get(), errs.out()));
      std::cerr << errs.str();
      CStr text;
      if (check_format == "json") ok(pc_findings_json(f.get(), text.out()));
      else ok(pc_findings_text(f.get(), text.out()));
      emit(check_out, text.str());
      if (!check_json.empty()) {
        CStr json;
        ok(pc_findings_json(f.get(), json.out()));
        emit(check_json, json.str());
      }
      if (!check_overlap.empty()) {
        CStr overlap;
        ok(pc_findings_overlap(f.get(), overlap.out()));
        emit(check_overlap, overlap.str());
      }
      return pc_findings_unsafe(f.get()) > 0 ? kUnsafe : kOk;
    } else if (*report) {
      Findings f;
      ok(pc_findings_load_json(report_in.c_str(), f.out()));
      CStr text;
      if (report_format == "overlap") ok(pc_findings_overlap(f.get(), text.out()));
      else if (report_format == "text") ok(pc_findings_text(f.get(), text.out()));
      else ok(pc_findings_json(f.get(), text.out()));
      emit(report_out, text.str());
    } else if (*bcdf) {
      double v = 0;
      ok(pc_bcdf(bk, bn, bp, &v));
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      emit("", buf);
    }
  } catch (const Failure& f) {
    std::cerr << "propcheck: " << f.message << '\n';
    return f.code;
  }
  return kOk;
}
