#pragma once

#include <map>
#include <set>
#include <string>

#include "propcheck/access_path.hpp"
#include "propcheck/ast.hpp"
#include "propcheck/scope.hpp"

namespace propcheck {

using PathSetValue = std::set<AccessPath>;
// Expression node → non-empty path set. Unmapped expressions are absent.
using PathMap = std::map<NodeId, PathSetValue>;

struct TrackedRoots {
  bool all_modules = true;        // track every require()/import'd module
  std::set<std::string> modules;  // used when all_modules is false
  std::set<BuiltinKind> builtins{BuiltinKind::String, BuiltinKind::Number, BuiltinKind::Boolean,
                                 BuiltinKind::Promise, BuiltinKind::Array};

  bool tracks(const Root& root) const;
};

struct InferOptions {
  TrackedRoots roots;
  std::size_t path_cap = 16; // larger sets are dropped
};

PathMap infer_paths(const Ast& ast, const ScopeInfo& scopes, const InferOptions& options = {});

} // namespace propcheck
