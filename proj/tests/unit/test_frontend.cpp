#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "propcheck/analysis.hpp"
#include "propcheck/ast.hpp"
#include "propcheck/cfg.hpp"
#include "propcheck/error.hpp"
#include "propcheck/scope.hpp"
#include "propcheck/ssa.hpp"
#include "support.hpp"

using namespace propcheck;
using testing_support::analyze;
using testing_support::data_path;
using testing_support::read_file;
using testing_support::source;

namespace {

std::vector<NodeId> nodes_of(const Ast& ast, NodeKind kind) {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < ast.size(); ++id)
    if (ast.node(id).kind == kind) out.push_back(id);
  return out;
}

NodeId member_at(const Ast& ast, const std::string& prop, std::uint32_t line) {
  for (NodeId id = 0; id < ast.size(); ++id) {
    const Node& n = ast.node(id);
    if (n.kind == NodeKind::Member && n.text == prop && n.span.start.line == line) return id;
  }
  return kNoNode;
}

NodeId first_statement_on_line(const Ast& ast, std::uint32_t line) {
  for (NodeId id = 0; id < ast.size(); ++id) {
    const Node& n = ast.node(id);
    if ((n.kind == NodeKind::ExprStmt || n.kind == NodeKind::VarDecl) && n.span.start.line == line) return id;
  }
  return kNoNode;
}

// Dominance by exhaustive reachability: a dominates b iff b cannot be reached
// from the entry once a is removed.
bool brute_dominates(const Cfg& cfg, BlockId a, BlockId b) {
  if (a == b) return true;
  if (a == cfg.entry) return true;
  std::vector<bool> seen(cfg.blocks.size(), false);
  std::vector<BlockId> stack{cfg.entry};
  seen[cfg.entry] = true;
  while (!stack.empty()) {
    BlockId x = stack.back();
    stack.pop_back();
    if (x == b) return false;
    for (BlockId s : cfg.blocks[x].succs)
      if (s != a && !seen[s]) {
        seen[s] = true;
        stack.push_back(s);
      }
  }
  return true;
}

void expect_dominance_matches(const Cfg& cfg) {
  DomInfo dom = dominators(cfg);
  for (BlockId a = 0; a < cfg.blocks.size(); ++a)
    for (BlockId b = 0; b < cfg.blocks.size(); ++b)
      ASSERT_EQ(dom.dominates(a, b), brute_dominates(cfg, a, b)) << "a=" << a << " b=" << b;
}

bool has_edge(const Cfg& cfg, BlockId a, BlockId b) {
  const auto& s = cfg.blocks[a].succs;
  return std::find(s.begin(), s.end(), b) != s.end();
}

// Random structured statement lists for CFG property tests.
class ProgramGen {
public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  std::string program() {
    std::string out;
    int n = pick(1, 4);
    for (int i = 0; i < n; ++i) out += statement(0, false);
    return out;
  }

private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string statement(int depth, bool in_loop) {
    int choice = depth >= 3 ? 0 : pick(0, 9);
    std::string v = "v" + std::to_string(pick(0, 3));
    switch (choice) {
    case 1:
    case 2:
      return "if (" + v + ".ok) {\n" + block(depth, in_loop) + "}" +
             (pick(0, 1) ? " else {\n" + block(depth, in_loop) + "}\n" : "\n");
    case 3:
      return "while (" + v + ".more) {\n" + block(depth, true) + "}\n";
    case 4:
      return "try {\n" + block(depth, in_loop) + "} catch (e) {\n" + block(depth, in_loop) + "}\n";
    case 5:
      if (in_loop) return pick(0, 1) ? "break;\n" : "continue;\n";
      return v + ".f();\n";
    case 6:
      return "do {\n" + block(depth, true) + "} while (" + v + ".again);\n";
    case 7:
      return "for (let i = 0; i < " + v + ".n; i++) {\n" + block(depth, true) + "}\n";
    case 8:
      return pick(0, 3) == 0 ? "return " + v + ";\n" : v + " = " + v + ".next;\n";
    default:
      return v + ".g();\n";
    }
  }

  std::string block(int depth, bool in_loop) {
    std::string out;
    int n = pick(1, 3);
    for (int i = 0; i < n; ++i) out += statement(depth + 1, in_loop);
    return out;
  }

  std::mt19937_64 rng_;
};

} // namespace

// ---- parsing ---------------------------------------------------------------

TEST(Parse, EmptyFileGivesEmptyProgram) {
  Ast ast = parse(source(""));
  ASSERT_NE(ast.root(), kNoNode);
  EXPECT_EQ(ast.node(ast.root()).kind, NodeKind::Program);
  EXPECT_TRUE(ast.node(ast.root()).children.empty());
}

TEST(Parse, UnbalancedParenIsSyntaxErrorOnLineOne) {
  try {
    parse(source("let x = ("));
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.span().start.line, 1u);
  }
}

TEST(Parse, Figure1aHasCallsOnFsMembers) {
  Ast ast = parse(SourceFile::load(data_path("fixtures/fig1a.js")));
  std::set<std::string> callees;
  for (NodeId c : nodes_of(ast, NodeKind::Call)) {
    const Node& callee = ast.node(ast.node(c).children[0]);
    if (callee.kind != NodeKind::Member) continue;
    const Node& base = ast.node(callee.children[0]);
    if (base.kind == NodeKind::Identifier && base.text == "fs") callees.insert(callee.text);
  }
  EXPECT_EQ(callees, (std::set<std::string>{"size", "readFile"}));
}

TEST(Parse, ConstantBracketKeyIsNormalized) {
  Ast ast = parse(source("x['size']; x[k];"));
  auto members = nodes_of(ast, NodeKind::Member);
  ASSERT_EQ(members.size(), 2u);
  const Node& constant = ast.node(members[0]).text == "size" ? ast.node(members[0]) : ast.node(members[1]);
  EXPECT_TRUE(constant.has(node_flags::kComputed));
  EXPECT_TRUE(constant.has(node_flags::kConstantKey));
  EXPECT_EQ(constant.children.size(), 1u);
  const Node& dynamic = ast.node(members[0]).text == "size" ? ast.node(members[1]) : ast.node(members[0]);
  EXPECT_TRUE(dynamic.has(node_flags::kComputed));
  EXPECT_FALSE(dynamic.has(node_flags::kConstantKey));
  EXPECT_EQ(dynamic.children.size(), 2u);
}

TEST(Parse, ClassesBecomeUnanalyzedNodes) {
  Ast ast = parse(source("class A { m() { return 1; } }\nlet y = 2;"));
  EXPECT_EQ(nodes_of(ast, NodeKind::Unanalyzed).size(), 1u);
  EXPECT_EQ(nodes_of(ast, NodeKind::VarDecl).size(), 1u);
}

TEST(Parse, InvalidUtf8IsRejected) {
  EXPECT_THROW(SourceFile::from_string("bad.js", std::string("let s = '\xff';")), SyntaxError);
}

TEST(Parse, EmptyPathIsUsageError) { EXPECT_THROW(SourceFile::from_string("", "x"), UsageError); }

TEST(Parse, TypeAnnotationsNeedLenientMode) {
  const std::string text = "let n: number = 1;\nfunction f(a: string): void { return; }\n";
  EXPECT_THROW(parse(source(text, "a.ts")), SyntaxError);
  ParseOptions lenient;
  lenient.lenient_types = true;
  Ast ast = parse(source(text, "a.ts"), lenient);
  EXPECT_EQ(nodes_of(ast, NodeKind::FunctionDecl).size(), 1u);
}

TEST(Parse, NewlineTerminatesStatements) {
  Ast ast = parse(source("let a = 1\nlet b = a\nb.c()\n"));
  EXPECT_EQ(ast.node(ast.root()).children.size(), 3u);
}

TEST(Parse, ErrorReportsPosition) {
  try {
    parse(source("let a = 1;\nlet b = );\n"));
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.span().start.line, 2u);
    EXPECT_NE(std::string(e.what()).find("test.js:2:"), std::string::npos);
  }
}

TEST(Parse, SpansLieInsideTheFile) {
  for (const char* f : {"fixtures/fig1a.js", "fixtures/fig1b.js", "fixtures/fig1c.js", "fixtures/fig1d.js",
                        "fixtures/example1.js", "fixtures/example2.js", "mini_corpus/read.js"}) {
    std::string text = read_file(data_path(f));
    Ast ast = parse(SourceFile::from_string(f, text));
    for (NodeId id = 0; id < ast.size(); ++id) {
      const Span& s = ast.node(id).span;
      EXPECT_LE(s.start.offset, s.end.offset) << f;
      EXPECT_LE(s.end.offset, text.size()) << f;
      EXPECT_GE(s.start.line, 1u);
      EXPECT_GE(s.start.column, 1u);
    }
  }
}

TEST(Parse, Deterministic) {
  std::string text = read_file(data_path("mini_corpus/read.js"));
  EXPECT_EQ(parse(source(text)).dump(), parse(source(text)).dump());
}

// ---- scopes ----------------------------------------------------------------

TEST(Scope, ParameterShadowsImport) {
  Ast ast = parse(SourceFile::load(data_path("fixtures/example1.js")));
  ScopeInfo scopes = analyze_scopes(ast);
  NodeId length = member_at(ast, "length", 3);
  ASSERT_NE(length, kNoNode);
  auto b = scopes.binding_of(ast.node(length).children[0]);
  ASSERT_TRUE(b);
  EXPECT_EQ(scopes.bindings[*b].kind, BindingKind::Param);
}

TEST(Scope, UnresolvedNamesAreGlobals) {
  Ast ast = parse(source("console.log(1);"));
  ScopeInfo scopes = analyze_scopes(ast);
  auto ids = nodes_of(ast, NodeKind::Identifier);
  ASSERT_EQ(ids.size(), 1u);
  auto b = scopes.binding_of(ids[0]);
  ASSERT_TRUE(b);
  EXPECT_EQ(scopes.bindings[*b].kind, BindingKind::Global);
}

// ---- control flow ------------------------------------------------------------

TEST(Cfg, SingleStatementIsOneBlock) {
  Ast ast = parse(source("f();"));
  Cfg cfg = build_cfg(ast, ast.root());
  EXPECT_EQ(cfg.blocks.size(), 1u);
  EXPECT_TRUE(dominators(cfg).idom.empty());
}

TEST(Cfg, EntryHasNoPredecessorsOthersHaveSome) {
  ProgramGen gen(11);
  for (int i = 0; i < 200; ++i) {
    Ast ast = parse(source(gen.program()));
    for (NodeId root : cfg_roots(ast)) {
      Cfg cfg = build_cfg(ast, root);
      for (BlockId b = 0; b < cfg.blocks.size(); ++b) {
        if (b == cfg.entry) EXPECT_TRUE(cfg.blocks[b].preds.empty());
        else EXPECT_FALSE(cfg.blocks[b].preds.empty());
      }
    }
  }
}

TEST(Cfg, TryCatchEdges) {
  Ast ast = parse(source("try { a(); } catch (e) { b(); }\nc();"));
  Cfg cfg = build_cfg(ast, ast.root());
  auto a = cfg.locate(ast, first_statement_on_line(ast, 1));
  ASSERT_TRUE(a);
  // statements of the try block, the handler and the continuation
  std::vector<NodeId> stmts = nodes_of(ast, NodeKind::ExprStmt);
  ASSERT_EQ(stmts.size(), 3u);
  auto la = cfg.locate(ast, stmts[0]);
  auto lb = cfg.locate(ast, stmts[1]);
  auto lc = cfg.locate(ast, stmts[2]);
  ASSERT_TRUE(la && lb && lc);
  EXPECT_TRUE(has_edge(cfg, la->block, lb->block));
  EXPECT_TRUE(has_edge(cfg, la->block, lc->block));
  EXPECT_TRUE(has_edge(cfg, lb->block, lc->block));
}

TEST(Cfg, Figure1cThenBlockFollowsGuard) {
  FileAnalysis fa = testing_support::analyze_fixture("fixtures/fig1c.js");
  const Ast& ast = fa.ast;
  NodeId guard = member_at(ast, "size", 2);
  NodeId use = member_at(ast, "size", 3);
  ASSERT_NE(guard, kNoNode);
  ASSERT_NE(use, kNoNode);
  const Cfg& cfg = fa.cfgs[fa.cfg_of(guard)];
  auto lg = cfg.locate(ast, guard);
  auto lu = cfg.locate(ast, use);
  ASSERT_TRUE(lg && lu);
  EXPECT_TRUE(has_edge(cfg, lg->block, lu->block));
  EXPECT_TRUE(fa.doms[fa.cfg_of(guard)].strictly_dominates(lg->block, lu->block));
}

TEST(Dominators, DiamondJoinIsDominatedByGuard) {
  Ast ast = parse(source("if (c) { a(); } else { b(); }\nd();"));
  Cfg cfg = build_cfg(ast, ast.root());
  std::vector<NodeId> stmts = nodes_of(ast, NodeKind::ExprStmt);
  ASSERT_EQ(stmts.size(), 3u);
  auto la = cfg.locate(ast, stmts[0]);
  auto lb = cfg.locate(ast, stmts[1]);
  auto ld = cfg.locate(ast, stmts[2]);
  ASSERT_TRUE(la && lb && ld);
  DomInfo dom = dominators(cfg);
  EXPECT_EQ(dom.idom.at(ld->block), cfg.entry);
  EXPECT_FALSE(dom.dominates(la->block, ld->block));
  EXPECT_FALSE(dom.dominates(lb->block, ld->block));
  expect_dominance_matches(cfg);
}

TEST(Dominators, MatchBruteForceOnGeneratedPrograms) {
  ProgramGen gen(2024);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Ast ast = parse(source(gen.program()));
    for (NodeId root : cfg_roots(ast)) {
      Cfg cfg = build_cfg(ast, root);
      if (cfg.blocks.size() > 8) continue;
      expect_dominance_matches(cfg);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Dominators, FrontierOfDiamondBranches) {
  Ast ast = parse(source("if (c) { a(); } else { b(); }\nd();"));
  Cfg cfg = build_cfg(ast, ast.root());
  DomInfo dom = dominators(cfg);
  auto df = dominance_frontiers(cfg, dom);
  std::vector<NodeId> stmts = nodes_of(ast, NodeKind::ExprStmt);
  auto la = cfg.locate(ast, stmts[0]);
  auto ld = cfg.locate(ast, stmts[2]);
  ASSERT_TRUE(la && ld);
  EXPECT_EQ(df[la->block], std::vector<BlockId>{ld->block});
}

// ---- SSA ---------------------------------------------------------------------

TEST(Ssa, SingleDefinitionSharesVariable) {
  FileAnalysis fa = testing_support::analyze_fixture("fixtures/fig1c.js");
  NodeId guard = member_at(fa.ast, "size", 2);
  NodeId use = member_at(fa.ast, "size", 3);
  auto v1 = fa.ssa.var_of(fa.ast.node(guard).children[0]);
  auto v2 = fa.ssa.var_of(fa.ast.node(use).children[0]);
  ASSERT_TRUE(v1 && v2);
  EXPECT_EQ(*v1, *v2);
}

TEST(Ssa, ReassignmentSplitsVariables) {
  FileAnalysis fa = analyze("let x = a();\nx.p;\nx = b();\nx.p;\nif (c) { x = d(); }\nx.p;\n");
  auto base = [&](std::uint32_t line) { return fa.ssa.var_of(fa.ast.node(member_at(fa.ast, "p", line)).children[0]); };
  auto v2 = base(2), v4 = base(4), v6 = base(6);
  ASSERT_TRUE(v2 && v4 && v6);
  EXPECT_NE(*v2, *v4);
  EXPECT_NE(*v4, *v6); // phi at the join
}

TEST(Ssa, VariablesWrittenFromClosuresHaveNoIdentity) {
  FileAnalysis fa = analyze("let x = a();\nfunction f() { x = b(); }\nx.p;\nx.p;\n");
  EXPECT_FALSE(fa.ssa.var_of(fa.ast.node(member_at(fa.ast, "p", 3)).children[0]));
}
