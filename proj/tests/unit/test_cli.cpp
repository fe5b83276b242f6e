// Runs the installed command-line tool as a child process.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string data(const std::string& rel) { return (fs::path(PROPCHECK_TEST_DATA) / rel).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("propcheck-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  struct Result {
    int code;
    std::string out;
    std::string err;
  };

  Result run(const std::string& args) {
    fs::path out = dir_ / "stdout", err = dir_ / "stderr";
    std::string cmd = std::string("'") + PROPCHECK_CLI + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out), slurp(err)};
  }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return (dir_ / name).string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kFigurePairs = "require('fs')\tsize\nrequire('fs').openSync()\tsize\n";

} // namespace

TEST_F(Cli, Figure1bIsSafeAndExitsZero) {
  std::string list = write("a.txt", kFigurePairs);
  Result r = run("check " + data("fixtures/fig1b.js") + " --anomalous " + list);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
  EXPECT_NE(r.out.find(":5:12\trequire('fs')\tsize\tSAFE(H1)\n"), std::string::npos) << r.out;
}

TEST_F(Cli, UnsafeFindingExitsOne) {
  std::string list = write("a.txt", "require('path')\tlength\n");
  Result r = run("check " + data("fixtures/example1.js") + " --anomalous " + list);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find(":3:15\trequire('path')\tlength\tUNSAFE"), std::string::npos) << r.out;
}

TEST_F(Cli, CheckWritesJsonAndOverlapReports) {
  std::string list = write("a.txt", kFigurePairs);
  Result r = run("check " + data("fixtures/fig1c.js") + " --anomalous " + list + " --json " + path("f.json") +
                 " --overlap " + path("o.txt"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("o.txt")), "H2\t1\nH3\t1\n");
  Result rep = run("report " + path("f.json") + " --format text");
  EXPECT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(rep.out, r.out);
  Result json = run("check " + data("fixtures/fig1c.js") + " --anomalous " + list + " --format json");
  EXPECT_EQ(json.out, slurp(path("f.json")));
}

TEST_F(Cli, MineMiniCorpus) {
  Result r = run("mine " + data("mini_corpus") + " -o " + path("p.pairs"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("p.pairs")), slurp(data("mini_corpus.pairs")));
  EXPECT_NE(r.err.find("broken.js"), std::string::npos);
}

TEST_F(Cli, EmptyDirectoryGivesHeaderOnly) {
  fs::create_directories(dir_ / "empty");
  Result r = run("mine " + path("empty"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "path\tprop\tcount\n");
}

TEST_F(Cli, LabelClassifySweepCrossval) {
  Result label = run("label " + data("mini_corpus.pairs") + " --model " + data("models/fs_model.json"));
  EXPECT_EQ(label.code, 0) << label.err;
  EXPECT_EQ(label.out, slurp(data("mini_corpus.labels")));

  Result cls = run("classify " + data("mini_corpus.pairs") + " --thresholds 0.25 0.25 0.1 0.05");
  EXPECT_EQ(cls.code, 0) << cls.err;
  EXPECT_EQ(cls.out, "require('fs').readFileSync().toString().split()\tsize\n");

  Result sweep = run("sweep " + data("mini_corpus.pairs") + " --labels " + data("mini_corpus.labels") + " --front " +
                     path("front.csv"));
  EXPECT_EQ(sweep.code, 0) << sweep.err;
  EXPECT_EQ(std::count(sweep.out.begin(), sweep.out.end(), '\n'), 4097);
  EXPECT_EQ(sweep.out.substr(0, sweep.out.find('\n')), "p_a,p_prop,p_ca,p_cprop,precision,recall,anomalous_count");
  EXPECT_NE(sweep.err.find("p_a=0.005 p_prop=0.25 p_ca=1 p_cprop=0.02"), std::string::npos) << sweep.err;
  EXPECT_FALSE(slurp(path("front.csv")).empty());

  Result cv1 = run("crossval " + data("mini_corpus.pairs") + " --labels " + data("mini_corpus.labels") + " --seed 3");
  Result cv8 = run("-j 8 crossval " + data("mini_corpus.pairs") + " --labels " + data("mini_corpus.labels") +
                   " --seed 3");
  EXPECT_EQ(cv1.code, 0) << cv1.err;
  EXPECT_EQ(cv1.out, cv8.out);
  EXPECT_EQ(std::count(cv1.out.begin(), cv1.out.end(), '\n'), 11);
}

TEST_F(Cli, ConfigFileOverridesFlags) {
  std::string cfg = write("c.json", R"({"thresholds": {"p_a": 0.25, "p_prop": 0.25, "p_ca": 0.1, "p_cprop": 0.05}})");
  Result r = run("--config " + cfg + " classify " + data("mini_corpus.pairs") + " --thresholds 0.005 0.005 0.005 0.005");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "require('fs').readFileSync().toString().split()\tsize\n");
}

TEST_F(Cli, Bcdf) {
  Result r = run("bcdf 2 10 0.5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::stod(r.out), 56.0 / 1024.0);
  EXPECT_EQ(run("bcdf 19 23360505 0.01").out, "0\n");
  EXPECT_EQ(run("bcdf 3 2 0.5").code, 2);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("classify").code, 2);
  EXPECT_EQ(run("check x --anomalous y --format xml").code, 2);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("classify /nonexistent.pairs").code, 3);
  EXPECT_EQ(run("classify " + write("bad.pairs", "garbage\n")).code, 3);
  EXPECT_EQ(run("label " + data("mini_corpus.pairs") + " --model " + write("m.json", "{")).code, 3);
  EXPECT_EQ(run("sweep " + data("mini_corpus.pairs") + " --labels " + write("l.txt", "String\tlength\tcorrect\n")).code,
            3);
  EXPECT_EQ(run("classify " + data("mini_corpus.pairs") + " --thresholds 0 0.1 0.1 0.1").code, 2);
  EXPECT_EQ(run("crossval " + data("mini_corpus.pairs") + " --labels " + data("mini_corpus.labels") + " --folds 1").code,
            2);
  Result r = run("classify /nonexistent.pairs");
  EXPECT_FALSE(r.err.empty());
}
