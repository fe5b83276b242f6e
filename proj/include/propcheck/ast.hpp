#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propcheck/source.hpp"

namespace propcheck {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeKind : std::uint8_t {
  // statements
  Program,
  Block,
  Empty,        // also used as a placeholder for absent optional children
  ExprStmt,     // [expr]
  VarDecl,      // text = var|let|const; children = Declarator...
  Declarator,   // [target, init?]
  FunctionDecl, // text = name; children = params..., body; aux = param count
  Return,       // [expr?]
  If,           // [test, consequent, alternate?]
  While,        // [test, body]
  DoWhile,      // [body, test]
  For,          // [init, test, update, body]  (Empty for absent parts)
  ForIn,        // text = in|of; [left, right, body]
  Break,        // text = label
  Continue,     // text = label
  Throw,        // [expr]
  Try,          // [block, catch-param, handler, finalizer]  (Empty for absent parts)
  Switch,       // [discriminant, Case...]
  Case,         // [test-or-Empty, statements...]
  Labeled,      // text = label; [statement]
  Import,       // text = module specifier; children = ImportBinding...
  ImportBinding,// text = local name; alt = imported name ("" for default/namespace)
  Unanalyzed,   // construct outside the subset; text = what was skipped

  // expressions
  Identifier,
  This,
  StringLit, // text = decoded value
  NumberLit, // text = raw literal
  BoolLit,
  NullLit,
  RegExpLit,
  ArrayLit,     // elements (Empty for holes)
  ObjectLit,    // Property...
  Property,     // text = static key; [value] or [key-expr, value] when computed
  FunctionExpr, // same layout as FunctionDecl
  ArrowFunction,
  Member,      // [object] (+ [index] when computed with a non-constant key); text = property
  Call,        // [callee, args...]
  New,         // [callee, args...]
  Unary,       // text = operator; [operand]
  Update,      // text = ++|--; [operand]
  Binary,      // text = operator; [lhs, rhs]
  Logical,     // text = &&|"||"|??; [lhs, rhs]
  Conditional, // [test, consequent, alternate]
  Assign,      // text = operator; [target, value]
  Sequence,
  Spread, // [argument]
};

std::string_view to_string(NodeKind kind);

namespace node_flags {
inline constexpr std::uint32_t kComputed = 1u << 0;      // x[...]
inline constexpr std::uint32_t kConstantKey = 1u << 1;   // x["f"], normalized to a property name
inline constexpr std::uint32_t kOptional = 1u << 2;      // ?. chains
inline constexpr std::uint32_t kShorthand = 1u << 3;     // { a } in object literals
inline constexpr std::uint32_t kMethod = 1u << 4;        // { m() {} }
inline constexpr std::uint32_t kConciseBody = 1u << 5;   // x => expr
inline constexpr std::uint32_t kPrefix = 1u << 6;        // ++x
inline constexpr std::uint32_t kAsync = 1u << 7;
inline constexpr std::uint32_t kGenerator = 1u << 8;
inline constexpr std::uint32_t kDefaultImport = 1u << 9;
inline constexpr std::uint32_t kNamespaceImport = 1u << 10;
inline constexpr std::uint32_t kTemplate = 1u << 11;     // string literal written as `...`
} // namespace node_flags

struct Node {
  NodeKind kind = NodeKind::Empty;
  Span span;
  std::string text;
  std::string alt;
  std::vector<NodeId> children;
  NodeId parent = kNoNode;
  std::uint32_t flags = 0;
  std::uint32_t aux = 0;

  bool has(std::uint32_t flag) const { return (flags & flag) != 0; }
};

// Arena-allocated syntax tree. Node ids are stable indices; the root is the
// Program node returned by root().
class Ast {
public:
  NodeId add(Node node);
  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return root_; }
  void set_root(NodeId id) { root_ = id; }
  const std::string& file() const { return file_; }
  void set_file(std::string file) { file_ = std::move(file); }

  // Recomputes parent links from children lists.
  void link_parents();

  bool is_function(NodeId id) const;
  // Parameter nodes and body of a function node.
  std::span<const NodeId> params(NodeId fn) const;
  NodeId body(NodeId fn) const;

  // Nearest enclosing function node (or the Program) of `id`, excluding `id` itself.
  NodeId enclosing_function(NodeId id) const;

  // Indented textual dump used by tests and debugging; spans are omitted when
  // `with_spans` is false so that structure can be compared across files.
  std::string dump(bool with_spans = true) const;

private:
  std::vector<Node> nodes_;
  NodeId root_ = kNoNode;
  std::string file_;
};

struct ParseOptions {
  // Strip TypeScript-style annotations (`: T`, `as T`, `interface`, `type`)
  // instead of rejecting them.
  bool lenient_types = false;
};

// Throws SyntaxError on malformed input.
Ast parse(const SourceFile& file, const ParseOptions& options = {});

} // namespace propcheck
