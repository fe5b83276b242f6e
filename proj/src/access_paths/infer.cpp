#include "propcheck/infer.hpp"

namespace propcheck {

bool TrackedRoots::tracks(const Root& root) const {
  if (root.kind == Root::Kind::Builtin) return builtins.count(root.builtin) > 0;
  return all_modules || modules.count(root.module) > 0;
}

namespace {

// A path set that collapses to `top` once it exceeds the cap; anything
// derived from top is top and never reported.
struct PSet {
  bool top = false;
  PathSetValue paths;

  bool empty() const { return !top && paths.empty(); }
};

class Inference {
public:
  Inference(const Ast& ast, const ScopeInfo& scopes, const InferOptions& options)
      : ast_(ast), scopes_(scopes), opt_(options), bindings_(scopes.bindings.size()),
        fn_value_(ast.size()), vals_(ast.size()) {}

  PathMap run() {
    if (ast_.root() == kNoNode) return {};
    do {
      changed_ = false;
      for (auto& v : vals_) v = PSet{};
      exec(ast_.root());
    } while (changed_);
    PathMap out;
    for (NodeId id = 0; id < vals_.size(); ++id) {
      const PSet& v = vals_[id];
      if (v.top || v.paths.empty()) continue;
      if (!is_expression(id)) continue;
      out.emplace(id, v.paths);
    }
    return out;
  }

private:
  const Node& node(NodeId id) const { return ast_.node(id); }

  bool is_expression(NodeId id) const {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::Identifier: {
        auto role = scopes_.role_of(id);
        return role && *role == IdentRole::Ref;
      }
      case NodeKind::StringLit:
      case NodeKind::NumberLit:
      case NodeKind::BoolLit:
      case NodeKind::ArrayLit:
      case NodeKind::FunctionExpr:
      case NodeKind::ArrowFunction:
      case NodeKind::Member:
      case NodeKind::Call:
      case NodeKind::New:
      case NodeKind::Logical:
      case NodeKind::Conditional:
      case NodeKind::Assign:
      case NodeKind::Sequence:
        return true;
      default:
        return false;
    }
  }

  void add_all(PSet& into, const PSet& from) const {
    if (into.top) return;
    if (from.top) {
      into.top = true;
      into.paths.clear();
      return;
    }
    for (const auto& p : from.paths) {
      into.paths.insert(p);
      if (into.paths.size() > opt_.path_cap) {
        into.top = true;
        into.paths.clear();
        return;
      }
    }
  }

  PSet single(AccessPath p) const {
    PSet s;
    if (opt_.roots.tracks(p.root)) s.paths.insert(std::move(p));
    return s;
  }

  PSet extend(const PSet& base, const Step& step) const {
    PSet out;
    if (base.top) {
      out.top = true;
      return out;
    }
    for (const auto& p : base.paths) out.paths.insert(p.extended(step));
    return out;
  }

  // Persistent sets (bindings, function values) grow monotonically.
  void merge_into(PSet& target, const PSet& value) {
    if (target.top || value.empty()) return;
    std::size_t before = target.paths.size();
    add_all(target, value);
    if (target.top || target.paths.size() != before) changed_ = true;
  }

  void bind(NodeId ident, const PSet& value) {
    auto b = scopes_.binding_of(ident);
    if (b) merge_into(bindings_[*b], value);
  }

  // Function node referenced by a callee or argument identifier, if the name
  // is bound to a locally declared function.
  NodeId local_function(NodeId expr) const {
    const Node& n = node(expr);
    if (n.kind == NodeKind::FunctionExpr || n.kind == NodeKind::ArrowFunction) return expr;
    if (n.kind != NodeKind::Identifier) return kNoNode;
    auto b = scopes_.binding_of(expr);
    if (!b) return kNoNode;
    const Binding& bind = scopes_.bindings[*b];
    if (bind.kind == BindingKind::Function && bind.decl != kNoNode && ast_.is_function(bind.decl))
      return bind.decl;
    if ((bind.kind == BindingKind::Const || bind.kind == BindingKind::Let || bind.kind == BindingKind::Var) &&
        bind.decl != kNoNode) {
      // single-definition variable initialized with a function literal
      int defs = 0;
      for (NodeId occ : scopes_.occurrences[*b])
        if (scopes_.roles.at(occ) == IdentRole::AssignTarget) ++defs;
      if (defs > 0) return kNoNode;
      NodeId decl = node(bind.decl).parent;
      if (decl != kNoNode && node(decl).kind == NodeKind::Declarator && node(decl).children.size() > 1 &&
          node(decl).children[0] == bind.decl) {
        NodeId init = node(decl).children[1];
        if (ast_.is_function(init)) return init;
      }
    }
    return kNoNode;
  }

  // Binds parameter j of `fn` to `value_of_param(j)`.
  template <typename F>
  void bind_params(NodeId fn, F value_of_param) {
    auto params = ast_.params(fn);
    for (std::uint32_t j = 0; j < params.size(); ++j) {
      NodeId p = params[j];
      if (node(p).kind == NodeKind::Assign) p = node(p).children[0];
      if (node(p).kind == NodeKind::Spread) break;
      PSet value = value_of_param(j);
      bind_pattern(p, value);
    }
  }

  void bind_pattern(NodeId target, const PSet& value) {
    const Node& t = node(target);
    if (t.kind == NodeKind::Identifier) {
      bind(target, value);
    } else if (t.kind == NodeKind::ObjectLit) {
      for (NodeId prop : t.children) {
        const Node& p = node(prop);
        if (p.kind != NodeKind::Property || p.has(node_flags::kComputed)) continue;
        NodeId inner = p.children.back();
        if (node(inner).kind == NodeKind::Assign) inner = node(inner).children[0];
        bind_pattern(inner, extend(value, Step::prop(p.text)));
      }
    }
  }

  PSet eval(NodeId id) {
    PSet v = compute(id);
    vals_[id] = v;
    return v;
  }

  void eval_children(NodeId id) {
    for (NodeId c : node(id).children) eval(c);
  }

  bool is_require(const Node& call) const {
    if (call.children.size() != 2) return false;
    const Node& callee = node(call.children[0]);
    if (callee.kind != NodeKind::Identifier || callee.text != "require") return false;
    auto b = scopes_.binding_of(call.children[0]);
    if (b && scopes_.bindings[*b].kind != BindingKind::Global) return false;
    const Node& arg = node(call.children[1]);
    return arg.kind == NodeKind::StringLit && !arg.text.empty();
  }

  PSet compute(NodeId id) {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::Identifier: {
        auto role = scopes_.role_of(id);
        if (!role || *role != IdentRole::Ref) return {};
        auto b = scopes_.binding_of(id);
        return b ? bindings_[*b] : PSet{};
      }
      case NodeKind::StringLit:
        return single(AccessPath{Root::of(BuiltinKind::String), {}});
      case NodeKind::NumberLit:
        return single(AccessPath{Root::of(BuiltinKind::Number), {}});
      case NodeKind::BoolLit:
        return single(AccessPath{Root::of(BuiltinKind::Boolean), {}});
      case NodeKind::ArrayLit:
        eval_children(id);
        return single(AccessPath{Root::of(BuiltinKind::Array), {}});
      case NodeKind::Member: {
        PSet base = eval(n.children[0]);
        if (n.children.size() > 1) {
          eval(n.children[1]);
          return {};
        }
        return extend(base, Step::prop(n.text));
      }
      case NodeKind::Call: {
        if (is_require(n)) {
          eval_children(id);
          return single(AccessPath{Root::require(node(n.children[1]).text), {}});
        }
        NodeId callee_id = n.children[0];
        PSet callee = eval(callee_id);
        NodeId local = local_function(callee_id);
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          NodeId arg = n.children[i];
          if (node(arg).kind == NodeKind::Spread) {
            eval(arg);
            continue;
          }
          NodeId fn = local_function(arg);
          if (fn != kNoNode && !callee.top && !callee.paths.empty()) {
            // rule 5: callbacks of tracked calls
            PSet fv = extend(callee, Step::arg(static_cast<std::uint32_t>(i - 1)));
            merge_into(fn_value_[fn], fv);
            if (fn != arg) bind(arg, fv);
            bind_params(fn, [&](std::uint32_t j) { return extend(fv, Step::arg(j)); });
          }
          eval(arg);
        }
        if (local != kNoNode) {
          // rule 7: local call sites bind actual arguments
          bind_params(local, [&](std::uint32_t j) {
            std::size_t idx = j + 1;
            if (idx >= n.children.size()) return PSet{};
            for (std::size_t k = 1; k <= idx; ++k)
              if (node(n.children[k]).kind == NodeKind::Spread) return PSet{};
            return vals_[n.children[idx]];
          });
        }
        return extend(callee, Step::call());
      }
      case NodeKind::New: {
        PSet callee = eval(n.children[0]);
        for (std::size_t i = 1; i < n.children.size(); ++i) eval(n.children[i]);
        return extend(callee, Step::construct());
      }
      case NodeKind::FunctionExpr:
      case NodeKind::ArrowFunction:
      case NodeKind::FunctionDecl:
        exec_function(id);
        return fn_value_[id];
      case NodeKind::Logical: {
        PSet out = eval(n.children[0]);
        add_all(out, eval(n.children[1]));
        return out;
      }
      case NodeKind::Conditional: {
        eval(n.children[0]);
        PSet out = eval(n.children[1]);
        add_all(out, eval(n.children[2]));
        return out;
      }
      case NodeKind::Sequence: {
        PSet last;
        for (NodeId c : n.children) last = eval(c);
        return last;
      }
      case NodeKind::Assign: {
        NodeId target = n.children[0];
        if (node(target).kind != NodeKind::Identifier) eval_target(target);
        PSet value = eval(n.children[1]);
        if (n.text != "=") return {};
        bind_pattern(target, value);
        return value;
      }
      default:
        eval_children(id);
        return {};
    }
  }

  // Subexpressions of an assignment target (e.g. the object of `a.b = c`).
  void eval_target(NodeId target) {
    const Node& t = node(target);
    switch (t.kind) {
      case NodeKind::Member:
        eval(t.children[0]);
        if (t.children.size() > 1) eval(t.children[1]);
        break;
      case NodeKind::ObjectLit:
      case NodeKind::ArrayLit:
      case NodeKind::Property:
      case NodeKind::Spread:
        for (NodeId c : t.children) eval_target(c);
        break;
      case NodeKind::Assign:
        eval_target(t.children[0]);
        eval(t.children[1]);
        break;
      case NodeKind::Identifier:
        break;
      default:
        eval(target);
        break;
    }
  }

  void exec_function(NodeId fn) {
    for (NodeId p : ast_.params(fn)) {
      const Node& pn = node(p);
      if (pn.kind == NodeKind::Assign) {
        eval_target(pn.children[0]);
        bind_pattern(pn.children[0], eval(pn.children[1]));
      } else {
        eval_target(p);
      }
    }
    exec(ast_.body(fn));
  }

  void exec(NodeId id) {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::Import:
        for (NodeId b : n.children) {
          const Node& bn = node(b);
          AccessPath p{Root::require(n.text), {}};
          if (!bn.has(node_flags::kDefaultImport) && !bn.has(node_flags::kNamespaceImport))
            p = p.extended(Step::prop(bn.alt));
          auto binding = scopes_.binding_of(b);
          if (binding && !n.text.empty()) merge_into(bindings_[*binding], single(std::move(p)));
        }
        break;
      case NodeKind::Declarator: {
        NodeId target = n.children[0];
        eval_target(target);
        if (n.children.size() > 1) bind_pattern(target, eval(n.children[1]));
        break;
      }
      case NodeKind::ForIn:
        if (node(n.children[0]).kind == NodeKind::VarDecl) {
          exec(n.children[0]);
        } else {
          eval_target(n.children[0]);
        }
        eval(n.children[1]);
        exec(n.children[2]);
        break;
      case NodeKind::FunctionDecl:
        eval(id);
        break;
      default:
        if (is_expression_kind(n.kind)) {
          eval(id);
        } else {
          for (NodeId c : n.children) exec(c);
        }
        break;
    }
  }

  static bool is_expression_kind(NodeKind k) {
    return k >= NodeKind::Identifier;
  }

  const Ast& ast_;
  const ScopeInfo& scopes_;
  const InferOptions& opt_;
  std::vector<PSet> bindings_;
  std::vector<PSet> fn_value_;
  std::vector<PSet> vals_;
  bool changed_ = false;
};

} // namespace

PathMap infer_paths(const Ast& ast, const ScopeInfo& scopes, const InferOptions& options) {
  return Inference(ast, scopes, options).run();
}

} // namespace propcheck
