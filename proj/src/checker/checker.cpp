#include "propcheck/checker.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "propcheck/error.hpp"

namespace propcheck {

std::string HeuristicSet::to_string() const {
  std::string out;
  for (unsigned i = 0; i < 5; ++i) {
    if (!contains(static_cast<Heuristic>(i))) continue;
    if (!out.empty()) out += ',';
    out += 'H';
    out += static_cast<char>('1' + i);
  }
  return out;
}

HeuristicSet HeuristicSet::parse(const std::string& text) {
  HeuristicSet s;
  if (text.empty()) return s;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (item.size() != 2 || item[0] != 'H' || item[1] < '1' || item[1] > '5')
      throw std::invalid_argument("bad heuristic '" + item + "'");
    s.insert(static_cast<Heuristic>(item[1] - '1'));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return s;
}

void add_writes(const FileAnalysis& fa, WriteIndex& index) {
  for (NodeId m : member_writes(fa.ast)) {
    const Node& n = fa.ast.node(m);
    auto it = fa.paths.find(n.children[0]);
    if (it == fa.paths.end()) continue;
    for (const auto& p : it->second) index.insert(PairKey{p, n.text});
  }
}

std::vector<Instance> find_instances(const FileAnalysis& fa, const AnomalousSet& anomalous) {
  std::vector<Instance> out;
  for (NodeId m : member_reads(fa.ast)) {
    const Node& n = fa.ast.node(m);
    auto it = fa.paths.find(n.children[0]);
    if (it == fa.paths.end()) continue;
    Instance inst;
    for (const auto& p : it->second) {
      PairKey key{p, n.text};
      if (anomalous.count(key)) inst.keys.push_back(std::move(key));
    }
    if (inst.keys.empty()) continue;
    std::sort(inst.keys.begin(), inst.keys.end(), RenderedOrder{});
    inst.span = n.span;
    inst.member = m;
    inst.base = n.children[0];
    if (fa.ast.node(inst.base).kind == NodeKind::Identifier) inst.ssa_var = fa.ssa.var_of(inst.base);
    out.push_back(std::move(inst));
  }
  return out;
}

bool h1_custom_assignment(const Instance& inst, const WriteIndex& writes) {
  return std::any_of(inst.keys.begin(), inst.keys.end(), [&](const PairKey& k) { return writes.count(k) > 0; });
}

bool h2_conditional_guard(const Ast& ast, const Instance& inst, bool typeof_guard) {
  NodeId cur = inst.member;
  bool negated = false;
  for (NodeId p = ast.node(cur).parent; p != kNoNode; cur = p, p = ast.node(p).parent) {
    const Node& pn = ast.node(p);
    if (pn.kind == NodeKind::Unary && pn.text == "!") {
      negated = true;
      continue;
    }
    if (pn.kind == NodeKind::Unary && pn.text == "typeof" && typeof_guard) return true;
    if (pn.kind == NodeKind::Logical && (pn.text == "&&" || pn.text == "||")) continue;
    switch (pn.kind) {
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::Conditional:
      if (pn.children[0] == cur) return true;
      break;
    case NodeKind::DoWhile:
    case NodeKind::For:
      if (pn.children[1] == cur) return true;
      break;
    default:
      break;
    }
    return negated;
  }
  return negated;
}

namespace {

bool is_ancestor(const Ast& ast, NodeId anc, NodeId n) {
  for (; n != kNoNode; n = ast.node(n).parent)
    if (n == anc) return true;
  return false;
}

// True when `first` is evaluated on every path that reaches `second`, both
// lying in the same CFG element and `first` ending before `second` starts.
bool evaluated_before(const Ast& ast, NodeId first, NodeId second) {
  if (ast.node(first).span.end.offset > ast.node(second).span.start.offset) return false;
  NodeId cur = first;
  for (NodeId p = ast.node(cur).parent; p != kNoNode; cur = p, p = ast.node(p).parent) {
    if (is_ancestor(ast, p, second)) return true;
    const Node& pn = ast.node(p);
    if (ast.is_function(p)) return false;
    if (pn.kind == NodeKind::Conditional && cur != pn.children[0]) return false;
    if (pn.kind == NodeKind::Logical && cur == pn.children[1]) return false;
    if ((pn.kind == NodeKind::Member || pn.kind == NodeKind::Call) && pn.has(node_flags::kOptional)) return false;
  }
  return false;
}

} // namespace

bool h3_dominated_access(const FileAnalysis& fa, const Instance& inst) {
  if (!inst.ssa_var) return false;
  std::size_t ci = fa.cfg_of(inst.member);
  if (ci >= fa.cfgs.size()) return false;
  const Cfg& cfg = fa.cfgs[ci];
  auto loc = cfg.locate(fa.ast, inst.member);
  if (!loc) return false;
  const std::string& prop = fa.ast.node(inst.member).text;
  for (NodeId other : member_reads(fa.ast)) {
    if (other == inst.member) continue;
    const Node& on = fa.ast.node(other);
    if (on.text != prop) continue;
    NodeId base = on.children[0];
    if (fa.ast.node(base).kind != NodeKind::Identifier) continue;
    if (fa.ssa.var_of(base) != inst.ssa_var) continue;
    if (fa.cfg_of(other) != ci) continue;
    auto oloc = cfg.locate(fa.ast, other);
    if (!oloc) continue;
    if (fa.doms[ci].strictly_dominates(oloc->block, loc->block)) return true;
    if (oloc->block != loc->block) continue;
    if (oloc->index < loc->index) return true;
    if (oloc->index == loc->index && evaluated_before(fa.ast, other, inst.member)) return true;
  }
  return false;
}

bool h4_alternate_path(const Instance& inst, const PathMap& paths, const AnomalousSet& anomalous) {
  auto it = paths.find(inst.base);
  if (it == paths.end()) return false;
  const std::string& prop = inst.prop();
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const AccessPath& a) { return anomalous.count(PairKey{a, prop}) == 0; });
}

bool h5_reassigned_base(const FileAnalysis& fa, const Instance& inst) {
  const Ast& ast = fa.ast;
  if (ast.node(inst.base).kind != NodeKind::Identifier) return false;
  auto binding = fa.scopes.binding_of(inst.base);
  if (!binding) return false;
  std::uint32_t limit = ast.node(inst.member).span.start.offset;
  for (NodeId occ : fa.scopes.occurrences[*binding]) {
    if (fa.scopes.role_of(occ) != IdentRole::AssignTarget) continue;
    if (ast.node(occ).span.start.offset >= limit) continue;
    NodeId parent = ast.node(occ).parent;
    if (parent == kNoNode) continue;
    const Node& pn = ast.node(parent);
    if (pn.kind == NodeKind::Assign && pn.children[0] == occ) {
      // compound assignments produce a fresh, unmapped value
      if (pn.text != "=" || !fa.paths.count(pn.children[1])) return true;
    } else if (pn.kind == NodeKind::Update) {
      return true;
    }
  }
  return false;
}

std::size_t CheckResult::unsafe_count() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const Finding& f) { return f.unsafe(); }));
}

namespace {

bool finding_less(const Finding& a, const Finding& b) {
  const Span& sa = a.instance.span;
  const Span& sb = b.instance.span;
  if (sa.file != sb.file) return sa.file < sb.file;
  if (sa.start.offset != sb.start.offset) return sa.start.offset < sb.start.offset;
  if (sa.end.offset != sb.end.offset) return sa.end.offset < sb.end.offset;
  return a.instance.keys < b.instance.keys;
}

} // namespace

CheckResult check_sources(const std::vector<SourceFile>& sources, const AnomalousSet& anomalous,
                          const CheckOptions& options) {
  struct PerFile {
    std::optional<FileAnalysis> fa;
    std::string error;
    std::vector<Finding> findings;
  };
  std::vector<PerFile> results(sources.size());
  parallel_for(sources.size(), options.workers, [&](std::size_t i) {
    try {
      results[i].fa = analyze_file(sources[i], options.analysis, true);
    } catch (const SyntaxError& e) {
      results[i].error = e.what();
    }
  });

  WriteIndex writes;
  for (const auto& r : results)
    if (r.fa) add_writes(*r.fa, writes);

  parallel_for(sources.size(), options.workers, [&](std::size_t i) {
    if (!results[i].fa) return;
    const FileAnalysis& fa = *results[i].fa;
    for (Instance& inst : find_instances(fa, anomalous)) {
      Finding f;
      if (h1_custom_assignment(inst, writes)) f.heuristics.insert(Heuristic::H1);
      if (h2_conditional_guard(fa.ast, inst, options.h2_typeof_guard)) f.heuristics.insert(Heuristic::H2);
      if (h3_dominated_access(fa, inst)) f.heuristics.insert(Heuristic::H3);
      if (h4_alternate_path(inst, fa.paths, anomalous)) f.heuristics.insert(Heuristic::H4);
      if (h5_reassigned_base(fa, inst)) f.heuristics.insert(Heuristic::H5);
      f.instance = std::move(inst);
      results[i].findings.push_back(std::move(f));
    }
    results[i].fa.reset();
  });

  CheckResult out;
  out.files = sources.size();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!results[i].error.empty()) out.errors.push_back(FileError{sources[i].path, results[i].error});
    for (auto& f : results[i].findings) out.findings.push_back(std::move(f));
  }
  std::sort(out.findings.begin(), out.findings.end(), finding_less);
  std::stable_sort(out.errors.begin(), out.errors.end(),
                   [](const FileError& a, const FileError& b) { return a.file < b.file; });
  return out;
}

CheckResult check_files(const std::vector<std::filesystem::path>& files, const AnomalousSet& anomalous,
                        const CheckOptions& options) {
  std::vector<SourceFile> sources;
  std::vector<FileError> load_errors;
  sources.reserve(files.size());
  for (const auto& f : files) {
    try {
      sources.push_back(SourceFile::load(f));
    } catch (const SyntaxError& e) {
      // invalid UTF-8 is a per-file parse failure
      load_errors.push_back(FileError{f.generic_string(), e.what()});
    }
  }
  CheckResult out = check_sources(sources, anomalous, options);
  out.files = files.size();
  if (!load_errors.empty()) {
    out.errors.insert(out.errors.end(), load_errors.begin(), load_errors.end());
    std::stable_sort(out.errors.begin(), out.errors.end(),
                     [](const FileError& a, const FileError& b) { return a.file < b.file; });
  }
  return out;
}

std::map<HeuristicSet, std::size_t> heuristic_overlap(const std::vector<Finding>& findings) {
  std::map<HeuristicSet, std::size_t> out;
  for (const auto& f : findings)
    if (!f.unsafe()) ++out[f.heuristics];
  return out;
}

namespace {

std::string joined_paths(const Instance& inst) {
  std::string out;
  for (const auto& k : inst.keys) {
    if (!out.empty()) out += " | ";
    out += render(k.path);
  }
  return out;
}

std::string verdict_text(const Finding& f) {
  return f.unsafe() ? "UNSAFE" : "SAFE(" + f.heuristics.to_string() + ")";
}

} // namespace

void write_findings_text(const CheckResult& result, std::ostream& out) {
  for (const auto& f : result.findings)
    out << f.instance.span.to_string() << '\t' << joined_paths(f.instance) << '\t' << f.instance.prop() << '\t'
        << verdict_text(f) << '\n';
}

void write_findings_json(const CheckResult& result, std::ostream& out) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["version"] = 1;
  ordered_json findings = ordered_json::array();
  for (const auto& f : result.findings) {
    const Span& s = f.instance.span;
    ordered_json paths = ordered_json::array();
    for (const auto& k : f.instance.keys) paths.push_back(render(k.path));
    ordered_json hs = ordered_json::array();
    for (unsigned i = 0; i < 5; ++i)
      if (f.heuristics.contains(static_cast<Heuristic>(i))) hs.push_back("H" + std::to_string(i + 1));
    findings.push_back(ordered_json{{"file", s.file},
                                    {"line", s.start.line},
                                    {"column", s.start.column},
                                    {"offset", s.start.offset},
                                    {"end_line", s.end.line},
                                    {"end_column", s.end.column},
                                    {"end_offset", s.end.offset},
                                    {"paths", paths},
                                    {"prop", f.instance.prop()},
                                    {"verdict", f.unsafe() ? "unsafe" : "safe"},
                                    {"heuristics", hs}});
  }
  doc["findings"] = findings;
  ordered_json errors = ordered_json::array();
  for (const auto& e : result.errors) errors.push_back(ordered_json{{"file", e.file}, {"message", e.message}});
  doc["errors"] = errors;
  std::size_t unsafe = result.unsafe_count();
  doc["summary"] = ordered_json{{"files", result.files},
                                {"instances", result.findings.size()},
                                {"unsafe", unsafe},
                                {"safe", result.findings.size() - unsafe},
                                {"parse_errors", result.errors.size()}};
  out << doc.dump(2) << '\n';
}

void write_overlap(const std::map<HeuristicSet, std::size_t>& overlap, std::ostream& out) {
  for (const auto& [set, count] : overlap) out << set.to_string() << '\t' << count << '\n';
}

CheckResult load_findings_json(std::istream& in, const std::string& source_name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(source_name, 1, std::string("invalid JSON: ") + e.what());
  }
  CheckResult out;
  try {
    if (doc.at("version").get<int>() != 1) throw FormatError(source_name, 1, "unsupported report version");
    for (const auto& jf : doc.at("findings")) {
      Finding f;
      Span& s = f.instance.span;
      s.file = jf.at("file").get<std::string>();
      s.start = Position{jf.at("line").get<std::uint32_t>(), jf.at("column").get<std::uint32_t>(),
                         jf.value("offset", 0u)};
      s.end = Position{jf.at("end_line").get<std::uint32_t>(), jf.at("end_column").get<std::uint32_t>(),
                       jf.value("end_offset", 0u)};
      std::string prop = jf.at("prop").get<std::string>();
      for (const auto& p : jf.at("paths")) f.instance.keys.push_back(PairKey{parse_path(p.get<std::string>()), prop});
      if (f.instance.keys.empty()) throw FormatError(source_name, 1, "finding without paths");
      std::string verdict = jf.at("verdict").get<std::string>();
      for (const auto& h : jf.at("heuristics")) {
        HeuristicSet one = HeuristicSet::parse(h.get<std::string>());
        f.heuristics = HeuristicSet::from_bits(f.heuristics.bits() | one.bits());
      }
      if ((verdict == "unsafe") != f.heuristics.empty() || (verdict != "unsafe" && verdict != "safe"))
        throw FormatError(source_name, 1, "verdict does not match heuristics");
      out.findings.push_back(std::move(f));
    }
    for (const auto& je : doc.at("errors"))
      out.errors.push_back(FileError{je.at("file").get<std::string>(), je.at("message").get<std::string>()});
    out.files = doc.at("summary").at("files").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source_name, 1, std::string("malformed report: ") + e.what());
  } catch (const PathSyntaxError& e) {
    throw FormatError(source_name, 1, e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(source_name, 1, e.what());
  }
  return out;
}

} // namespace propcheck
