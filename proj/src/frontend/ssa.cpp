#include "propcheck/ssa.hpp"

#include <algorithm>
#include <set>

namespace propcheck {

std::optional<SsaVar> SsaInfo::var_of(NodeId ident) const {
  auto it = value_of.find(ident);
  if (it == value_of.end()) return std::nullopt;
  return it->second;
}

namespace {

// Node whose completion performs the write to `ident`.
NodeId def_site(const Ast& ast, NodeId ident) {
  NodeId n = ident;
  for (;;) {
    NodeId p = ast.node(n).parent;
    if (p == kNoNode) return n;
    NodeKind k = ast.node(p).kind;
    if (k == NodeKind::Declarator || k == NodeKind::Update) return p;
    if (k == NodeKind::Assign && ast.node(p).children[0] == n && ast.node(p).text == "=") {
      // a default inside a pattern is not the outer write
      NodeId gp = ast.node(p).parent;
      NodeKind gk = gp == kNoNode ? NodeKind::Empty : ast.node(gp).kind;
      if (gk != NodeKind::Property && gk != NodeKind::ArrayLit) return p;
    } else if (k == NodeKind::Assign && ast.node(p).children[0] == n) {
      return p;
    }
    if (k == NodeKind::ForIn) return n;
    n = p;
  }
}

bool is_decl_def(const Ast& ast, NodeId ident) {
  // Declarator with an initializer, or the left side of for-in/of.
  for (NodeId n = ident, p = ast.node(ident).parent; p != kNoNode; n = p, p = ast.node(p).parent) {
    const Node& pn = ast.node(p);
    if (pn.kind == NodeKind::Declarator) {
      if (pn.children.size() > 1 && pn.children[0] == n) return true;
      NodeId vd = pn.parent;
      NodeId loop = vd == kNoNode ? kNoNode : ast.node(vd).parent;
      return loop != kNoNode && ast.node(loop).kind == NodeKind::ForIn && ast.node(loop).children[0] == vd;
    }
    if (pn.kind != NodeKind::ObjectLit && pn.kind != NodeKind::ArrayLit && pn.kind != NodeKind::Property &&
        pn.kind != NodeKind::Spread && pn.kind != NodeKind::Assign)
      return false;
  }
  return false;
}

struct Event {
  std::uint32_t index;
  std::uint32_t offset;
  bool is_def;
  NodeId node;

  bool operator<(const Event& o) const {
    if (index != o.index) return index < o.index;
    if (offset != o.offset) return offset < o.offset;
    return is_def < o.is_def;
  }
};

class SsaBuilder {
public:
  SsaBuilder(const Ast& ast, const ScopeInfo& scopes, const std::vector<Cfg>& cfgs,
             const std::vector<DomInfo>& doms)
      : ast_(ast), scopes_(scopes), cfgs_(cfgs), doms_(doms) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) cfg_index_[cfgs[i].function] = i;
  }

  SsaInfo run() {
    for (BindingId b = 0; b < scopes_.bindings.size(); ++b) binding(b);
    return std::move(info_);
  }

private:
  NodeId owner_function(NodeId n) const {
    NodeId f = ast_.enclosing_function(n);
    return f == kNoNode ? ast_.root() : f;
  }

  void binding(BindingId b) {
    const Binding& bind = scopes_.bindings[b];
    const auto& occ = scopes_.occurrences[b];
    std::vector<NodeId> uses;
    std::vector<NodeId> defs;
    int decl_defs = 0;
    switch (bind.kind) {
      case BindingKind::Param:
      case BindingKind::CatchParam:
      case BindingKind::Function:
      case BindingKind::Class:
      case BindingKind::Import:
        decl_defs = 1;
        break;
      default:
        break;
    }
    for (NodeId id : occ) {
      IdentRole role = scopes_.roles.at(id);
      if (role == IdentRole::Ref) {
        uses.push_back(id);
      } else if (role == IdentRole::AssignTarget) {
        defs.push_back(id);
      } else if ((bind.kind == BindingKind::Var || bind.kind == BindingKind::Let ||
                  bind.kind == BindingKind::Const) &&
                 is_decl_def(ast_, id)) {
        defs.push_back(id);
      }
    }
    if (decl_defs + defs.size() <= 1) {
      SsaVar v = next_++;
      for (NodeId u : uses) info_.value_of[u] = v;
      return;
    }
    if (bind.kind == BindingKind::Global) return;
    NodeId fn = bind.function;
    for (NodeId d : defs)
      if (owner_function(d) != fn) return;
    auto it = cfg_index_.find(fn);
    if (it == cfg_index_.end()) return;
    rename(cfgs_[it->second], doms_[it->second], uses, defs, fn);
  }

  void rename(const Cfg& cfg, const DomInfo& dom, const std::vector<NodeId>& uses,
              const std::vector<NodeId>& defs, NodeId fn) {
    std::size_t n = cfg.blocks.size();
    std::vector<std::vector<Event>> events(n);
    std::set<BlockId> def_blocks;
    for (NodeId d : defs) {
      NodeId site = def_site(ast_, d);
      auto loc = cfg.locate(ast_, site);
      if (!loc) continue;
      events[loc->block].push_back(Event{loc->index, ast_.node(site).span.end.offset, true, d});
      def_blocks.insert(loc->block);
    }
    for (NodeId u : uses) {
      if (owner_function(u) != fn) continue;
      auto loc = cfg.locate(ast_, u);
      if (!loc) continue;
      events[loc->block].push_back(Event{loc->index, ast_.node(u).span.start.offset, false, u});
    }
    for (auto& e : events) std::sort(e.begin(), e.end());

    // phi placement on the iterated dominance frontier
    auto df = dominance_frontiers(cfg, dom);
    std::vector<bool> phi(n, false);
    std::vector<BlockId> work(def_blocks.begin(), def_blocks.end());
    while (!work.empty()) {
      BlockId b = work.back();
      work.pop_back();
      for (BlockId f : df[b]) {
        if (phi[f]) continue;
        phi[f] = true;
        if (!def_blocks.count(f)) work.push_back(f);
      }
    }

    std::vector<std::vector<BlockId>> children(n);
    for (auto& [b, p] : dom.idom) children[p].push_back(b);

    std::vector<SsaVar> stack{next_++};
    walk(cfg.entry, events, phi, children, stack);
  }

  void walk(BlockId b, const std::vector<std::vector<Event>>& events, const std::vector<bool>& phi,
            const std::vector<std::vector<BlockId>>& children, std::vector<SsaVar>& stack) {
    std::size_t depth = stack.size();
    if (phi[b]) stack.push_back(next_++);
    for (const Event& e : events[b]) {
      if (e.is_def) {
        stack.push_back(next_++);
      } else {
        info_.value_of[e.node] = stack.back();
      }
    }
    for (BlockId c : children[b]) walk(c, events, phi, children, stack);
    stack.resize(depth);
  }

  const Ast& ast_;
  const ScopeInfo& scopes_;
  const std::vector<Cfg>& cfgs_;
  const std::vector<DomInfo>& doms_;
  std::unordered_map<NodeId, std::size_t> cfg_index_;
  SsaInfo info_;
  SsaVar next_ = 0;
};

} // namespace

SsaInfo build_ssa(const Ast& ast, const ScopeInfo& scopes, const std::vector<Cfg>& cfgs,
                  const std::vector<DomInfo>& doms) {
  return SsaBuilder(ast, scopes, cfgs, doms).run();
}

} // namespace propcheck
