#pragma once

#include <vector>

#include "propcheck/ast.hpp"
#include "propcheck/cfg.hpp"
#include "propcheck/infer.hpp"
#include "propcheck/scope.hpp"
#include "propcheck/ssa.hpp"

namespace propcheck {

struct AnalysisOptions {
  ParseOptions parse;
  InferOptions infer;
};

// Per-file analysis results. Control-flow and SSA data are filled only when
// requested.
struct FileAnalysis {
  Ast ast;
  ScopeInfo scopes;
  PathMap paths;
  std::vector<Cfg> cfgs; // one per cfg_roots(ast) entry
  std::vector<DomInfo> doms;
  SsaInfo ssa;

  // Index into cfgs of the CFG owning `node`.
  std::size_t cfg_of(NodeId node) const;
};

FileAnalysis analyze_file(const SourceFile& file, const AnalysisOptions& options, bool with_flow);

// Member-access nodes read as values (dot or constant-key bracket), in
// source order. Plain `=` targets are writes and excluded; compound
// assignment and update targets count as reads.
std::vector<NodeId> member_reads(const Ast& ast);

// Member nodes that are the target of a plain `=` assignment.
std::vector<NodeId> member_writes(const Ast& ast);

} // namespace propcheck
