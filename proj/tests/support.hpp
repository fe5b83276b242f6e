#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "propcheck/analysis.hpp"
#include "propcheck/source.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(PROPCHECK_TEST_DATA) / rel;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline propcheck::SourceFile source(const std::string& text, const std::string& name = "test.js") {
  return propcheck::SourceFile::from_string(name, text);
}

inline propcheck::FileAnalysis analyze(const std::string& text, bool with_flow = true,
                                       const std::string& name = "test.js") {
  return propcheck::analyze_file(source(text, name), propcheck::AnalysisOptions{}, with_flow);
}

inline propcheck::FileAnalysis analyze_fixture(const std::string& rel) {
  return propcheck::analyze_file(propcheck::SourceFile::load(data_path(rel)), propcheck::AnalysisOptions{}, true);
}

// Fresh temporary directory removed on destruction.
class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("propcheck-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& rel, const std::string& text) const {
    auto p = path_ / rel;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
  }

private:
  std::filesystem::path path_;
};

} // namespace testing_support
