#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "propcheck/ast.hpp"

namespace propcheck {

using BindingId = std::uint32_t;

enum class BindingKind : std::uint8_t { Var, Let, Const, Function, Param, CatchParam, Import, Class, Global };

struct Binding {
  std::string name;
  BindingKind kind = BindingKind::Global;
  NodeId decl = kNoNode;     // first declaring node; kNoNode for implicit globals
  NodeId scope = kNoNode;    // node that owns the scope (function, block, Try, ...)
  NodeId function = kNoNode; // function or Program whose body declares it
};

enum class IdentRole : std::uint8_t { Decl, Ref, AssignTarget };

// Lexical name resolution for one file. Unresolved names become implicit
// global bindings, one per distinct name.
struct ScopeInfo {
  std::vector<Binding> bindings;
  // Identifier, ImportBinding, FunctionDecl/FunctionExpr (named) and class
  // declaration nodes mapped to the binding they declare or reference.
  std::unordered_map<NodeId, BindingId> resolved;
  std::unordered_map<NodeId, IdentRole> roles;
  // Identifier nodes resolved to each binding, in source order.
  std::vector<std::vector<NodeId>> occurrences;

  std::optional<BindingId> binding_of(NodeId node) const;
  std::optional<IdentRole> role_of(NodeId node) const;
};

ScopeInfo analyze_scopes(const Ast& ast);

// Identifier nodes bound by a declaration pattern (identifier, object or
// array pattern, defaults, rest elements).
std::vector<NodeId> pattern_identifiers(const Ast& ast, NodeId pattern);

} // namespace propcheck
