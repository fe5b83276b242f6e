#include "propcheck/scope.hpp"

#include <algorithm>
#include <map>

namespace propcheck {

std::optional<BindingId> ScopeInfo::binding_of(NodeId node) const {
  auto it = resolved.find(node);
  if (it == resolved.end()) return std::nullopt;
  return it->second;
}

std::optional<IdentRole> ScopeInfo::role_of(NodeId node) const {
  auto it = roles.find(node);
  if (it == roles.end()) return std::nullopt;
  return it->second;
}

namespace {

void collect_pattern(const Ast& ast, NodeId id, std::vector<NodeId>& out) {
  const Node& n = ast.node(id);
  switch (n.kind) {
    case NodeKind::Identifier:
      out.push_back(id);
      break;
    case NodeKind::ObjectLit:
      for (NodeId prop : n.children) collect_pattern(ast, prop, out);
      break;
    case NodeKind::Property:
      collect_pattern(ast, n.children.back(), out);
      break;
    case NodeKind::ArrayLit:
      for (NodeId e : n.children) collect_pattern(ast, e, out);
      break;
    case NodeKind::Spread:
      collect_pattern(ast, n.children[0], out);
      break;
    case NodeKind::Assign:
      collect_pattern(ast, n.children[0], out);
      break;
    default:
      break;
  }
}

class Resolver {
public:
  explicit Resolver(const Ast& ast) : ast_(ast) {}

  ScopeInfo run() {
    visit(ast_.root());
    info_.occurrences.resize(info_.bindings.size());
    for (auto& [node, b] : info_.resolved) {
      if (ast_.node(node).kind == NodeKind::Identifier) info_.occurrences[b].push_back(node);
    }
    for (auto& occ : info_.occurrences) std::sort(occ.begin(), occ.end(), [&](NodeId a, NodeId b) {
      return ast_.node(a).span.start < ast_.node(b).span.start;
    });
    return std::move(info_);
  }

private:
  struct Scope {
    NodeId owner;
    NodeId function;
    std::map<std::string, BindingId, std::less<>> names;
  };

  const Node& node(NodeId id) const { return ast_.node(id); }

  void push(NodeId owner, NodeId function) { scopes_.push_back(Scope{owner, function, {}}); }
  void pop() { scopes_.pop_back(); }

  BindingId declare(Scope& scope, const std::string& name, BindingKind kind, NodeId decl) {
    auto it = scope.names.find(name);
    if (it != scope.names.end()) return it->second;
    BindingId id = static_cast<BindingId>(info_.bindings.size());
    info_.bindings.push_back(Binding{name, kind, decl, scope.owner, scope.function});
    scope.names.emplace(name, id);
    return id;
  }

  Scope& function_scope() {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (it->owner == it->function) return *it;
    return scopes_.front();
  }

  BindingId resolve(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->names.find(name);
      if (found != it->names.end()) return found->second;
    }
    auto g = globals_.find(name);
    if (g != globals_.end()) return g->second;
    BindingId id = static_cast<BindingId>(info_.bindings.size());
    info_.bindings.push_back(Binding{name, BindingKind::Global, kNoNode, kNoNode, kNoNode});
    globals_.emplace(name, id);
    return id;
  }

  void declare_pattern(Scope& scope, NodeId pattern, BindingKind kind) {
    for (NodeId id : pattern_identifiers(ast_, pattern)) {
      BindingId b = declare(scope, node(id).text, kind, id);
      (void)b;
    }
  }

  // `var` declarations and nothing else, through nested statements but not
  // into nested functions.
  void hoist_var(NodeId id, Scope& scope) {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::VarDecl:
        if (n.text == "var")
          for (NodeId d : n.children) declare_pattern(scope, node(d).children[0], BindingKind::Var);
        break;
      case NodeKind::Block:
      case NodeKind::If:
      case NodeKind::While:
      case NodeKind::DoWhile:
      case NodeKind::For:
      case NodeKind::ForIn:
      case NodeKind::Try:
      case NodeKind::Switch:
      case NodeKind::Case:
      case NodeKind::Labeled:
      case NodeKind::Program:
        for (NodeId c : n.children) hoist_var(c, scope);
        break;
      default:
        break;
    }
  }

  void hoist_lexical(const std::vector<NodeId>& stmts, Scope& scope) {
    for (NodeId s : stmts) {
      NodeId target = s;
      while (node(target).kind == NodeKind::Labeled) target = node(target).children[0];
      const Node& n = node(target);
      switch (n.kind) {
        case NodeKind::VarDecl:
          if (n.text != "var") {
            BindingKind k = n.text == "const" ? BindingKind::Const : BindingKind::Let;
            for (NodeId d : n.children) declare_pattern(scope, node(d).children[0], k);
          }
          break;
        case NodeKind::FunctionDecl:
          if (!n.text.empty())
            info_.resolved[target] = declare(scope, n.text, BindingKind::Function, target);
          break;
        case NodeKind::Unanalyzed:
          if (!n.alt.empty() && n.text == "class")
            info_.resolved[target] = declare(scope, n.alt, BindingKind::Class, target);
          break;
        case NodeKind::Import:
          for (NodeId b : n.children)
            info_.resolved[b] = declare(scope, node(b).text, BindingKind::Import, b);
          break;
        default:
          break;
      }
    }
  }

  void mark(NodeId ident, IdentRole role) {
    info_.resolved[ident] = resolve(node(ident).text);
    info_.roles[ident] = role;
  }

  // Binding positions of a pattern get `role`; defaults and computed keys
  // are ordinary expressions.
  void visit_pattern(NodeId id, IdentRole role) {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::Identifier:
        mark(id, role);
        break;
      case NodeKind::ObjectLit:
        for (NodeId p : n.children) visit_pattern(p, role);
        break;
      case NodeKind::Property:
        if (n.has(node_flags::kComputed)) visit(n.children[0]);
        visit_pattern(n.children.back(), role);
        break;
      case NodeKind::ArrayLit:
        for (NodeId e : n.children) visit_pattern(e, role);
        break;
      case NodeKind::Spread:
        visit_pattern(n.children[0], role);
        break;
      case NodeKind::Assign:
        visit_pattern(n.children[0], role);
        visit(n.children[1]);
        break;
      default:
        visit(id);
        break;
    }
  }

  void visit_function(NodeId fn) {
    const Node& n = node(fn);
    bool named_expr = n.kind == NodeKind::FunctionExpr && !n.text.empty() && !n.has(node_flags::kMethod);
    if (named_expr) {
      push(fn, scopes_.back().function);
      info_.resolved[fn] = declare(scopes_.back(), n.text, BindingKind::Function, fn);
    }
    push(fn, fn);
    Scope& scope = scopes_.back();
    for (NodeId p : ast_.params(fn)) declare_pattern(scope, p, BindingKind::Param);
    NodeId body = ast_.body(fn);
    bool block_body = node(body).kind == NodeKind::Block;
    if (block_body) {
      hoist_lexical(node(body).children, scopes_.back());
      hoist_var(body, scopes_.back());
    }
    for (NodeId p : ast_.params(fn)) visit_pattern(p, IdentRole::Decl);
    if (block_body) {
      for (NodeId s : node(body).children) visit(s);
    } else {
      visit(body);
    }
    pop();
    if (named_expr) pop();
  }

  void visit_children(NodeId id) {
    for (NodeId c : node(id).children) visit(c);
  }

  void visit(NodeId id) {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::Program:
        push(id, id);
        hoist_lexical(n.children, scopes_.back());
        hoist_var(id, scopes_.back());
        visit_children(id);
        pop();
        break;
      case NodeKind::FunctionDecl:
      case NodeKind::FunctionExpr:
      case NodeKind::ArrowFunction:
        visit_function(id);
        break;
      case NodeKind::Block:
        push(id, scopes_.back().function);
        hoist_lexical(n.children, scopes_.back());
        visit_children(id);
        pop();
        break;
      case NodeKind::Switch:
        visit(n.children[0]);
        push(id, scopes_.back().function);
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          const Node& c = node(n.children[i]);
          hoist_lexical(std::vector<NodeId>(c.children.begin() + 1, c.children.end()), scopes_.back());
        }
        for (std::size_t i = 1; i < n.children.size(); ++i) visit(n.children[i]);
        pop();
        break;
      case NodeKind::For:
      case NodeKind::ForIn: {
        push(id, scopes_.back().function);
        hoist_lexical({n.children[0]}, scopes_.back());
        NodeId left = n.children[0];
        if (n.kind == NodeKind::ForIn && node(left).kind != NodeKind::VarDecl) {
          visit_pattern(left, IdentRole::AssignTarget);
        } else {
          visit(left);
        }
        for (std::size_t i = 1; i < n.children.size(); ++i) visit(n.children[i]);
        pop();
        break;
      }
      case NodeKind::Try: {
        visit(n.children[0]);
        push(id, scopes_.back().function);
        if (node(n.children[1]).kind != NodeKind::Empty) {
          declare_pattern(scopes_.back(), n.children[1], BindingKind::CatchParam);
          visit_pattern(n.children[1], IdentRole::Decl);
        }
        visit(n.children[2]);
        pop();
        visit(n.children[3]);
        break;
      }
      case NodeKind::Declarator:
        visit_pattern(n.children[0], IdentRole::Decl);
        if (n.children.size() > 1) visit(n.children[1]);
        break;
      case NodeKind::Identifier:
        mark(id, IdentRole::Ref);
        break;
      case NodeKind::Assign:
        if (n.text == "=") {
          visit_pattern(n.children[0], IdentRole::AssignTarget);
        } else if (node(n.children[0]).kind == NodeKind::Identifier) {
          mark(n.children[0], IdentRole::AssignTarget);
        } else {
          visit(n.children[0]);
        }
        visit(n.children[1]);
        break;
      case NodeKind::Update:
        if (node(n.children[0]).kind == NodeKind::Identifier) {
          mark(n.children[0], IdentRole::AssignTarget);
        } else {
          visit(n.children[0]);
        }
        break;
      case NodeKind::Import:
      case NodeKind::ImportBinding:
        break;
      default:
        visit_children(id);
        break;
    }
  }

  const Ast& ast_;
  ScopeInfo info_;
  std::vector<Scope> scopes_;
  std::map<std::string, BindingId, std::less<>> globals_;
};

} // namespace

std::vector<NodeId> pattern_identifiers(const Ast& ast, NodeId pattern) {
  std::vector<NodeId> out;
  collect_pattern(ast, pattern, out);
  return out;
}

ScopeInfo analyze_scopes(const Ast& ast) { return Resolver(ast).run(); }

} // namespace propcheck
