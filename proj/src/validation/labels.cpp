#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "propcheck/error.hpp"
#include "propcheck/validation.hpp"

namespace propcheck {

namespace {

constexpr const char* kExemptBuiltins[] = {"String", "Number", "Boolean", "Promise", "Array"};

std::optional<UnresolvedReason> opaque(const TypeRef& t) {
  if (t.kind == TypeRef::Kind::Any) return UnresolvedReason::AnyType;
  if (t.kind == TypeRef::Kind::TypeVar) return UnresolvedReason::TypeVariable;
  return std::nullopt;
}

Resolution failed(UnresolvedReason reason) {
  Resolution r;
  r.reason = reason;
  return r;
}

} // namespace

Resolution resolve(const AccessPath& path, const ApiModel& model) {
  TypeRef cur;
  if (path.root.kind == Root::Kind::Require) {
    auto it = model.modules.find(path.root.module);
    if (it == model.modules.end()) return failed(UnresolvedReason::Unresolvable);
    cur = it->second;
  } else {
    cur = TypeRef::builtin(std::string(to_string(path.root.builtin)));
  }
  for (const Step& step : path.steps) {
    if (auto why = opaque(cur)) return failed(*why);
    const TypeDef* def = model.definition(cur);
    if (!def) throw ModelError("type '" + to_string(cur) + "' has no definition");
    switch (step.kind) {
      case Step::Kind::Prop: {
        auto p = model.property(cur, step.name);
        if (!p) return failed(UnresolvedReason::MissingProperty);
        cur = *p;
        break;
      }
      case Step::Kind::Call:
        if (!def->call) return failed(UnresolvedReason::Unresolvable);
        cur = def->call->returns;
        break;
      case Step::Kind::Arg:
        if (!def->call || step.index >= def->call->params.size())
          return failed(UnresolvedReason::Unresolvable);
        cur = def->call->params[step.index];
        break;
      case Step::Kind::New:
        if (!def->construct) return failed(UnresolvedReason::Unresolvable);
        cur = *def->construct;
        break;
    }
  }
  if (auto why = opaque(cur)) return failed(*why);
  Resolution r;
  r.type = cur;
  return r;
}

Label label_pair(const PairKey& key, const ApiModel& model) {
  Resolution r = resolve(key.path, model);
  if (!r.ok()) return Label{LabelKind::Unclassified, r.reason};
  const TypeRef& t = *r.type;
  if (model.property(t, key.prop)) return Label{LabelKind::Correct, {}};
  if (t.kind == TypeRef::Kind::Builtin)
    for (const char* b : kExemptBuiltins)
      if (t.name == b) return Label{LabelKind::Incorrect, {}};
  for (const auto& [name, def] : model.types) {
    if (t.kind == TypeRef::Kind::Named && t.name == name) continue;
    if (def.properties.count(key.prop)) return Label{LabelKind::Incorrect, {}};
  }
  for (const auto& [name, def] : model.builtins) {
    if (t.kind == TypeRef::Kind::Builtin && t.name == name) continue;
    if (def.properties.count(key.prop)) return Label{LabelKind::Incorrect, {}};
  }
  return Label{LabelKind::Unclassified, UnresolvedReason::MissingProperty};
}

ValidationSet build_validation_set(const CountTable& table, const ApiModel& model) {
  ValidationSet out;
  std::map<std::string, RootSummary> by_root;
  for (const auto& [key, count] : table.pairs()) {
    const Root& root = key.path.root;
    std::string name = root.kind == Root::Kind::Require ? root.module : std::string(to_string(root.builtin));
    RootSummary& s = by_root[name];
    s.root = name;
    ++s.pairs;
    Label label = label_pair(key, model);
    switch (label.kind) {
      case LabelKind::Correct:
        ++s.correct;
        out.labels.emplace(key, LabelKind::Correct);
        break;
      case LabelKind::Incorrect:
        ++s.incorrect;
        out.labels.emplace(key, LabelKind::Incorrect);
        break;
      case LabelKind::Unclassified:
        ++s.unclassified[label.reason];
        break;
    }
  }
  for (auto& [name, s] : by_root) out.summary.push_back(std::move(s));
  return out;
}

void write_summary(const std::vector<RootSummary>& summary, std::ostream& out) {
  out << "root\tpairs\tcorrect\tincorrect\tany-type\ttype-variable\tmissing-property\tunresolvable\n";
  RootSummary total;
  total.root = "(total)";
  auto get = [](const RootSummary& s, UnresolvedReason r) {
    auto it = s.unclassified.find(r);
    return it == s.unclassified.end() ? std::uint64_t{0} : it->second;
  };
  auto row = [&](const RootSummary& s) {
    out << s.root << '\t' << s.pairs << '\t' << s.correct << '\t' << s.incorrect << '\t'
        << get(s, UnresolvedReason::AnyType) << '\t' << get(s, UnresolvedReason::TypeVariable) << '\t'
        << get(s, UnresolvedReason::MissingProperty) << '\t' << get(s, UnresolvedReason::Unresolvable)
        << '\n';
  };
  for (const auto& s : summary) {
    row(s);
    total.pairs += s.pairs;
    total.correct += s.correct;
    total.incorrect += s.incorrect;
    for (const auto& [r, c] : s.unclassified) total.unclassified[r] += c;
  }
  row(total);
}

void save_labels(const LabelSet& labels, std::ostream& out) {
  std::vector<std::pair<std::string, const std::pair<const PairKey, LabelKind>*>> rows;
  for (const auto& e : labels) rows.emplace_back(render(e.first.path), &e);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->first.prop < b.second->first.prop;
  });
  for (const auto& [rendered, e] : rows)
    out << rendered << '\t' << e->first.prop << '\t'
        << (e->second == LabelKind::Correct ? "correct" : "incorrect") << '\n';
}

LabelSet load_labels(std::istream& in, const std::string& source_name) {
  LabelSet labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw FormatError(source_name, lineno, "expected 'path<TAB>prop<TAB>correct|incorrect'");
    AccessPath path;
    try {
      path = parse_path(line.substr(0, t1));
    } catch (const PathSyntaxError& e) {
      throw FormatError(source_name, lineno, e.what());
    }
    std::string prop = line.substr(t1 + 1, t2 - t1 - 1);
    std::string tag = line.substr(t2 + 1);
    if (prop.empty()) throw FormatError(source_name, lineno, "empty property name");
    LabelKind kind;
    if (tag == "correct") {
      kind = LabelKind::Correct;
    } else if (tag == "incorrect") {
      kind = LabelKind::Incorrect;
    } else {
      throw FormatError(source_name, lineno, "label must be 'correct' or 'incorrect', got '" + tag + "'");
    }
    PairKey key{std::move(path), std::move(prop)};
    auto [it, inserted] = labels.emplace(key, kind);
    if (!inserted && it->second != kind)
      throw FormatError(source_name, lineno, "conflicting labels for the same pair");
  }
  if (in.bad()) throw IoError("error reading " + source_name);
  return labels;
}

void save_labels_file(const LabelSet& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_labels(labels, out);
  if (!out) throw IoError("error writing " + path.string());
}

LabelSet load_labels_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return load_labels(in, path.string());
}

bool less(const Ratio& a, const Ratio& b) {
  return static_cast<unsigned __int128>(a.num) * b.den < static_cast<unsigned __int128>(b.num) * a.den;
}

bool same_value(const Ratio& a, const Ratio& b) {
  return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Expected: return "expected";
    case Classification::Anomalous: return "anomalous";
    case Classification::Unknown: return "unknown";
  }
  return "?";
}

Metrics precision_recall(const std::map<PairKey, Classification>& classified, const LabelSet& labels) {
  Metrics m;
  std::uint64_t flagged_labeled = 0;
  std::uint64_t incorrect = 0;
  for (const auto& [key, label] : labels) {
    auto it = classified.find(key);
    bool anomalous = it != classified.end() && it->second == Classification::Anomalous;
    if (label == LabelKind::Incorrect) ++incorrect;
    if (anomalous) ++flagged_labeled;
    if (anomalous && label == LabelKind::Incorrect) ++m.true_positives;
    if (anomalous && label == LabelKind::Correct) ++m.false_positives;
    if (!anomalous && label == LabelKind::Incorrect) ++m.false_negatives;
  }
  m.precision = Ratio{m.true_positives, flagged_labeled};
  m.recall = Ratio{m.true_positives, incorrect};
  return m;
}

} // namespace propcheck
