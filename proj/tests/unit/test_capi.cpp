// Exercises the shared library through its C interface only.
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>

#include "propcheck/propcheck.h"

namespace fs = std::filesystem;

namespace {

std::string data(const std::string& rel) { return (fs::path(PROPCHECK_TEST_DATA) / rel).string(); }

// Takes ownership of a library-allocated string.
std::string take(char* s) {
  std::string out = s ? s : "";
  pc_string_free(s);
  return out;
}

struct Config {
  pc_config* cfg = nullptr;
  Config() { EXPECT_EQ(pc_config_new(&cfg), PC_OK); }
  ~Config() { pc_config_free(cfg); }
};

struct Table {
  pc_table* t = nullptr;
  ~Table() { pc_table_free(t); }
};

struct Scratch {
  fs::path dir;
  Scratch() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("propcheck-capi-" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir / name, std::ios::binary) << text;
    return (dir / name).string();
  }
};

} // namespace

TEST(CApi, VersionAndErrors) {
  EXPECT_STRNE(pc_version(), "");
  double v = 0;
  EXPECT_EQ(pc_bcdf(3, 2, 0.5, &v), PC_ERR_DOMAIN);
  EXPECT_STRNE(pc_last_error(), "");
  EXPECT_EQ(pc_bcdf(2, 10, 0.5, &v), PC_OK);
  EXPECT_STREQ(pc_last_error(), "");
  EXPECT_NEAR(v, 56.0 / 1024.0, 1e-15);
  EXPECT_EQ(pc_bcdf(2, 10, 0.5, nullptr), PC_ERR_USAGE);
}

TEST(CApi, LastErrorIsPerThread) {
  double v = 0;
  EXPECT_EQ(pc_bcdf(3, 2, 0.5, &v), PC_ERR_DOMAIN);
  std::string other;
  std::thread([&] { other = pc_last_error(); }).join();
  EXPECT_EQ(other, "");
  EXPECT_STRNE(pc_last_error(), "");
}

TEST(CApi, ClassifyPair) {
  Config c;
  ASSERT_EQ(pc_config_set_thresholds(c.cfg, 0.005, 0.02, 0.005, 0.005), PC_OK);
  pc_classification cls = PC_UNKNOWN;
  ASSERT_EQ(pc_classify_pair(c.cfg, 19, 23360505, 306170, &cls), PC_OK);
  EXPECT_EQ(cls, PC_ANOMALOUS);
  EXPECT_EQ(pc_config_set_thresholds(c.cfg, 0, 0.1, 0.1, 0.1), PC_ERR_DOMAIN);
  EXPECT_EQ(pc_classify_pair(c.cfg, 2, 1, 5, &cls), PC_ERR_DOMAIN);
}

TEST(CApi, ConfigJson) {
  Config c;
  ASSERT_EQ(pc_config_apply_json(c.cfg, R"({"seed": 12, "folds": 3})"), PC_OK);
  char* text = nullptr;
  ASSERT_EQ(pc_config_to_json(c.cfg, &text), PC_OK);
  std::string json = take(text);
  EXPECT_NE(json.find("\"seed\": 12"), std::string::npos);
  EXPECT_EQ(pc_config_apply_json(c.cfg, R"({"bogus": 1})"), PC_ERR_FORMAT);
  EXPECT_EQ(pc_config_apply_file(c.cfg, "/nonexistent/cfg.json"), PC_ERR_IO);
  EXPECT_EQ(pc_config_set_workers(c.cfg, 0), PC_ERR_USAGE);
  EXPECT_EQ(pc_config_set_folds(c.cfg, 1), PC_ERR_USAGE);
  const double bad[] = {2.0};
  const double ok[] = {0.1};
  EXPECT_EQ(pc_config_set_grids(c.cfg, bad, 1, ok, 1), PC_ERR_DOMAIN);
  EXPECT_EQ(pc_config_set_grids(c.cfg, ok, 0, ok, 1), PC_ERR_USAGE);
}

TEST(CApi, TableOperations) {
  Table a, b, m;
  ASSERT_EQ(pc_table_new(&a.t), PC_OK);
  ASSERT_EQ(pc_table_parse("path\tprop\tcount\nrequire('fs')\tsize\t2\n", &b.t), PC_OK);
  ASSERT_EQ(pc_table_add(a.t, "require('fs')", "size", 3), PC_OK);
  ASSERT_EQ(pc_table_add(a.t, "String", "size", 1), PC_OK);
  EXPECT_EQ(pc_table_add(a.t, "require(fs", "size", 1), PC_ERR_FORMAT);
  ASSERT_EQ(pc_table_merge(a.t, b.t, &m.t), PC_OK);
  std::uint64_t k = 0, n_a = 0, n_prop = 0;
  ASSERT_EQ(pc_table_counts(m.t, "require('fs')", "size", &k, &n_a, &n_prop), PC_OK);
  EXPECT_EQ(k, 5u);
  EXPECT_EQ(n_a, 5u);
  EXPECT_EQ(n_prop, 6u);
  EXPECT_EQ(pc_table_pairs(m.t), 2u);
  EXPECT_EQ(pc_table_total(m.t), 6u);
  char* text = nullptr;
  ASSERT_EQ(pc_table_to_text(m.t, &text), PC_OK);
  EXPECT_EQ(take(text), "path\tprop\tcount\nString\tsize\t1\nrequire('fs')\tsize\t5\n");
  Table bad;
  EXPECT_EQ(pc_table_parse("nope\n", &bad.t), PC_ERR_FORMAT);
  EXPECT_EQ(bad.t, nullptr);
  EXPECT_EQ(pc_table_load("/nonexistent.pairs", &bad.t), PC_ERR_IO);
}

TEST(CApi, MineLabelSweepPipeline) {
  Config c;
  Table t;
  std::string root = data("mini_corpus");
  const char* roots[] = {root.c_str()};
  char* obs = nullptr;
  char* errs = nullptr;
  ASSERT_EQ(pc_mine(c.cfg, roots, 1, &t.t, &obs, &errs), PC_OK) << pc_last_error();
  EXPECT_FALSE(take(obs).empty());
  EXPECT_NE(take(errs).find("broken.js"), std::string::npos);
  char* text = nullptr;
  ASSERT_EQ(pc_table_to_text(t.t, &text), PC_OK);
  std::ifstream golden(data("mini_corpus.pairs"));
  std::string expected((std::istreambuf_iterator<char>(golden)), std::istreambuf_iterator<char>());
  EXPECT_EQ(take(text), expected);

  char* labels = nullptr;
  char* summary = nullptr;
  ASSERT_EQ(pc_label(t.t, data("models/fs_model.json").c_str(), &labels, &summary), PC_OK);
  std::ifstream golden_labels(data("mini_corpus.labels"));
  std::string expected_labels((std::istreambuf_iterator<char>(golden_labels)), std::istreambuf_iterator<char>());
  EXPECT_EQ(take(labels), expected_labels);
  EXPECT_NE(take(summary).find("(total)"), std::string::npos);

  char* csv = nullptr;
  char* optimum = nullptr;
  ASSERT_EQ(pc_sweep(c.cfg, t.t, data("mini_corpus.labels").c_str(), &csv, nullptr, &optimum), PC_OK);
  std::string sweep = take(csv);
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 4097);
  EXPECT_EQ(take(optimum).rfind("p_a=0.005 p_prop=0.25 p_ca=1 p_cprop=0.02 ", 0), 0u);

  char* folds = nullptr;
  ASSERT_EQ(pc_crossval(c.cfg, t.t, data("mini_corpus.labels").c_str(), &folds), PC_OK);
  std::string f = take(folds);
  EXPECT_EQ(std::count(f.begin(), f.end(), '\n'), 11);

  char* anomalous = nullptr;
  size_t count = 0;
  ASSERT_EQ(pc_config_set_thresholds(c.cfg, 0.25, 0.25, 0.1, 0.05), PC_OK);
  ASSERT_EQ(pc_classify(c.cfg, t.t, &anomalous, &count), PC_OK);
  EXPECT_EQ(count, 1u);
  EXPECT_EQ(take(anomalous), "require('fs').readFileSync().toString().split()\tsize\n");
}

TEST(CApi, PipelineErrors) {
  Config c;
  Table t;
  ASSERT_EQ(pc_table_new(&t.t), PC_OK);
  char* labels = nullptr;
  EXPECT_EQ(pc_label(t.t, "/nonexistent/model.json", &labels, nullptr), PC_ERR_IO);
  Scratch s;
  std::string bad_model = s.write("m.json", R"({"modules": {"m": "Nope"}})");
  EXPECT_EQ(pc_label(t.t, bad_model.c_str(), &labels, nullptr), PC_ERR_MODEL);
  std::string correct_only = s.write("l.labels", "String\tlength\tcorrect\n");
  char* csv = nullptr;
  EXPECT_EQ(pc_sweep(c.cfg, t.t, correct_only.c_str(), &csv, nullptr, nullptr), PC_ERR_EMPTY_LABELS);
  pc_table* out = nullptr;
  const char* missing[] = {"/nonexistent/dir"};
  EXPECT_EQ(pc_mine(c.cfg, missing, 1, &out, nullptr, nullptr), PC_ERR_IO);
  EXPECT_EQ(out, nullptr);
}

TEST(CApi, CheckAndFindings) {
  Config c;
  Scratch s;
  std::string list = s.write("anomalous.txt", "require('fs')\tsize\nrequire('fs').openSync()\tsize\n");
  std::string target = data("fixtures/fig1a.js");
  const char* roots[] = {target.c_str()};
  pc_findings* f = nullptr;
  ASSERT_EQ(pc_check(c.cfg, roots, 1, list.c_str(), &f), PC_OK) << pc_last_error();
  EXPECT_EQ(pc_findings_count(f), 1u);
  EXPECT_EQ(pc_findings_unsafe(f), 1u);
  EXPECT_EQ(pc_findings_parse_errors(f), 0u);
  char* text = nullptr;
  ASSERT_EQ(pc_findings_text(f, &text), PC_OK);
  std::string row = take(text);
  EXPECT_NE(row.find(":3:12\trequire('fs')\tsize\tUNSAFE"), std::string::npos);
  char* json = nullptr;
  ASSERT_EQ(pc_findings_json(f, &json), PC_OK);
  std::string report = s.write("report.json", take(json));
  pc_findings_free(f);

  pc_findings* back = nullptr;
  ASSERT_EQ(pc_findings_load_json(report.c_str(), &back), PC_OK);
  ASSERT_EQ(pc_findings_text(back, &text), PC_OK);
  EXPECT_EQ(take(text), row);
  char* overlap = nullptr;
  ASSERT_EQ(pc_findings_overlap(back, &overlap), PC_OK);
  EXPECT_EQ(take(overlap), "");
  pc_findings_free(back);

  std::string bad_list = s.write("bad.txt", "not-a-path\n");
  EXPECT_EQ(pc_check(c.cfg, roots, 1, bad_list.c_str(), &f), PC_ERR_FORMAT);
  std::string bad_report = s.write("bad.json", "{}");
  EXPECT_EQ(pc_findings_load_json(bad_report.c_str(), &back), PC_ERR_FORMAT);
}
