#include "propcheck/miner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include "propcheck/error.hpp"

namespace propcheck {

bool RenderedOrder::operator()(const PairKey& a, const PairKey& b) const {
  std::string ra = render(a.path);
  std::string rb = render(b.path);
  if (ra != rb) return ra < rb;
  return a.prop < b.prop;
}

void CountTable::add(const PairKey& key, std::uint64_t count) {
  if (count == 0) return;
  pairs_[key] += count;
  path_totals_[key.path] += count;
  prop_totals_[key.prop] += count;
  total_ += count;
}

std::uint64_t CountTable::k(const PairKey& key) const {
  auto it = pairs_.find(key);
  return it == pairs_.end() ? 0 : it->second;
}

std::uint64_t CountTable::n_a(const AccessPath& path) const {
  auto it = path_totals_.find(path);
  return it == path_totals_.end() ? 0 : it->second;
}

std::uint64_t CountTable::n_prop(const std::string& prop) const {
  auto it = prop_totals_.find(prop);
  return it == prop_totals_.end() ? 0 : it->second;
}

bool CountTable::consistent() const {
  std::map<AccessPath, std::uint64_t> by_path;
  std::map<std::string, std::uint64_t> by_prop;
  std::uint64_t sum = 0;
  for (const auto& [key, count] : pairs_) {
    if (count == 0 || key.prop.empty()) return false;
    by_path[key.path] += count;
    by_prop[key.prop] += count;
    sum += count;
  }
  return by_path == path_totals_ && by_prop == prop_totals_ && sum == total_;
}

namespace {

bool usable_prop(const std::string& p) {
  return !p.empty() && p.find_first_of("\t\n\r") == std::string::npos;
}

} // namespace

std::vector<Observation> extract(const Ast& ast, const PathMap& paths) {
  std::vector<Observation> out;
  for (NodeId m : member_reads(ast)) {
    const Node& n = ast.node(m);
    if (!usable_prop(n.text)) continue;
    auto it = paths.find(n.children[0]);
    if (it == paths.end()) continue;
    for (const auto& p : it->second) out.push_back(Observation{PairKey{p, n.text}, n.span});
  }
  return out;
}

CountTable aggregate(const std::vector<Observation>& observations) {
  CountTable t;
  for (const auto& o : observations) t.add(o.key);
  return t;
}

CountTable merge(const CountTable& a, const CountTable& b) {
  CountTable out = a;
  for (const auto& [key, count] : b.pairs()) out.add(key, count);
  return out;
}

void save_table(const CountTable& table, std::ostream& out) {
  std::vector<std::pair<std::string, const std::pair<const PairKey, std::uint64_t>*>> rows;
  rows.reserve(table.pairs().size());
  for (const auto& entry : table.pairs()) rows.emplace_back(render(entry.first.path), &entry);
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second->first.prop < y.second->first.prop;
  });
  out << "path\tprop\tcount\n";
  for (const auto& [rendered, entry] : rows)
    out << rendered << '\t' << entry->first.prop << '\t' << entry->second << '\n';
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

} // namespace

CountTable load_table(std::istream& in, const std::string& source_name) {
  CountTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != "path\tprop\tcount")
        throw FormatError(source_name, lineno, "expected header 'path<TAB>prop<TAB>count'");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3)
      throw FormatError(source_name, lineno, "expected 3 tab-separated fields in row '" + line + "'");
    AccessPath path;
    try {
      path = parse_path(fields[0]);
    } catch (const PathSyntaxError& e) {
      throw FormatError(source_name, lineno, e.what());
    }
    if (fields[1].empty()) throw FormatError(source_name, lineno, "empty property name");
    std::uint64_t count = 0;
    const std::string& c = fields[2];
    auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (c.empty() || ec != std::errc() || ptr != c.data() + c.size() || count == 0)
      throw FormatError(source_name, lineno, "invalid count '" + c + "' in row '" + line + "'");
    t.add(PairKey{std::move(path), fields[1]}, count);
  }
  if (in.bad()) throw IoError("error reading " + source_name);
  if (!header) throw FormatError(source_name, 1, "missing header line");
  return t;
}

void save_table_file(const CountTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_table(table, out);
  if (!out) throw IoError("error writing " + path.string());
}

CountTable load_table_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return load_table(in, path.string());
}

void write_observations(const std::vector<Observation>& observations, std::ostream& out) {
  for (const auto& o : observations)
    out << render(o.key.path) << '\t' << o.key.prop << '\t' << o.span.to_string() << '\n';
}

std::vector<std::filesystem::path> discover_sources(const std::vector<std::filesystem::path>& roots,
                                                    bool include_ts) {
  namespace fs = std::filesystem;
  auto wanted = [&](const fs::path& p) {
    std::string ext = p.extension().string();
    if (ext == ".js" || ext == ".mjs" || ext == ".cjs") return true;
    if (!include_ts) return false;
    std::string name = p.filename().string();
    if (name.size() > 5 && name.compare(name.size() - 5, 5, ".d.ts") == 0) return false;
    return ext == ".ts" || ext == ".mts" || ext == ".cts";
  };
  std::vector<fs::path> out;
  for (const auto& root : roots) {
    std::error_code ec;
    auto status = fs::status(root, ec);
    if (ec || !fs::exists(status)) throw IoError("no such file or directory: " + root.string());
    if (fs::is_regular_file(status)) {
      out.push_back(root);
      continue;
    }
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw IoError("cannot read directory " + root.string() + ": " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
      if (ec) throw IoError("error walking " + root.string() + ": " + ec.message());
      const fs::path& p = it->path();
      std::string name = p.filename().string();
      if (it->is_directory()) {
        if (name == "node_modules" || (!name.empty() && name[0] == '.')) it.disable_recursion_pending();
        continue;
      }
      if (it->is_regular_file() && wanted(p)) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n, 256))));
  if (count <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < count; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (failure) std::rethrow_exception(failure);
}

MineResult mine(const std::vector<std::filesystem::path>& files, const AnalysisOptions& options,
                unsigned workers) {
  struct PerFile {
    std::vector<Observation> observations;
    std::string error;
  };
  std::vector<PerFile> results(files.size());
  parallel_for(files.size(), workers, [&](std::size_t i) {
    try {
      SourceFile src = SourceFile::load(files[i]);
      FileAnalysis fa = analyze_file(src, options, false);
      results[i].observations = extract(fa.ast, fa.paths);
    } catch (const SyntaxError& e) {
      results[i].error = e.what();
    }
  });
  MineResult out;
  out.files = files.size();
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!results[i].error.empty()) {
      out.errors.push_back(FileError{files[i].generic_string(), results[i].error});
      continue;
    }
    for (auto& o : results[i].observations) {
      out.table.add(o.key);
      out.observations.push_back(std::move(o));
    }
  }
  return out;
}

} // namespace propcheck
