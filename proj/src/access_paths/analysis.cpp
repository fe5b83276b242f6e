#include "propcheck/analysis.hpp"

#include <algorithm>

namespace propcheck {

std::size_t FileAnalysis::cfg_of(NodeId node) const {
  NodeId fn = ast.enclosing_function(node);
  if (fn == kNoNode) fn = ast.root();
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    if (cfgs[i].function == fn) return i;
  return cfgs.size();
}

FileAnalysis analyze_file(const SourceFile& file, const AnalysisOptions& options, bool with_flow) {
  FileAnalysis fa;
  fa.ast = parse(file, options.parse);
  fa.scopes = analyze_scopes(fa.ast);
  fa.paths = infer_paths(fa.ast, fa.scopes, options.infer);
  if (with_flow) {
    for (NodeId root : cfg_roots(fa.ast)) {
      fa.cfgs.push_back(build_cfg(fa.ast, root));
      fa.doms.push_back(dominators(fa.cfgs.back()));
    }
    fa.ssa = build_ssa(fa.ast, fa.scopes, fa.cfgs, fa.doms);
  }
  return fa;
}

namespace {

bool is_named_member(const Node& n) { return n.kind == NodeKind::Member && n.children.size() == 1; }

bool is_plain_write(const Ast& ast, NodeId id) {
  NodeId p = ast.node(id).parent;
  if (p == kNoNode) return false;
  const Node& pn = ast.node(p);
  if (pn.kind == NodeKind::Assign && pn.text == "=" && pn.children[0] == id) return true;
  if (pn.kind == NodeKind::ForIn && pn.children[0] == id) return true;
  return false;
}

bool in_pattern_target(const Ast& ast, NodeId id) {
  // member inside a destructuring assignment target, e.g. [a.b] = xs
  NodeId n = id;
  for (NodeId p = ast.node(n).parent; p != kNoNode; n = p, p = ast.node(p).parent) {
    const Node& pn = ast.node(p);
    if (pn.kind == NodeKind::Property && pn.children.back() != n) return false;
    if (pn.kind == NodeKind::ObjectLit || pn.kind == NodeKind::ArrayLit || pn.kind == NodeKind::Property ||
        pn.kind == NodeKind::Spread)
      continue;
    if (pn.kind == NodeKind::Assign && pn.text == "=" && pn.children[0] == n) return n != id;
    return false;
  }
  return false;
}

std::vector<NodeId> sorted(const Ast& ast, std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    const auto& sa = ast.node(a).span;
    const auto& sb = ast.node(b).span;
    if (sa.start.offset != sb.start.offset) return sa.start.offset < sb.start.offset;
    return sa.end.offset < sb.end.offset;
  });
  return ids;
}

} // namespace

std::vector<NodeId> member_reads(const Ast& ast) {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < ast.size(); ++id) {
    if (!is_named_member(ast.node(id))) continue;
    if (is_plain_write(ast, id) || in_pattern_target(ast, id)) continue;
    out.push_back(id);
  }
  return sorted(ast, std::move(out));
}

std::vector<NodeId> member_writes(const Ast& ast) {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < ast.size(); ++id) {
    if (!is_named_member(ast.node(id))) continue;
    if (is_plain_write(ast, id) || in_pattern_target(ast, id)) out.push_back(id);
  }
  return sorted(ast, std::move(out));
}

} // namespace propcheck
