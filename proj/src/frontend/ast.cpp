#include "propcheck/ast.hpp"

#include <sstream>

namespace propcheck {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Program: return "Program";
    case NodeKind::Block: return "Block";
    case NodeKind::Empty: return "Empty";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::Declarator: return "Declarator";
    case NodeKind::FunctionDecl: return "FunctionDecl";
    case NodeKind::Return: return "Return";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::DoWhile: return "DoWhile";
    case NodeKind::For: return "For";
    case NodeKind::ForIn: return "ForIn";
    case NodeKind::Break: return "Break";
    case NodeKind::Continue: return "Continue";
    case NodeKind::Throw: return "Throw";
    case NodeKind::Try: return "Try";
    case NodeKind::Switch: return "Switch";
    case NodeKind::Case: return "Case";
    case NodeKind::Labeled: return "Labeled";
    case NodeKind::Import: return "Import";
    case NodeKind::ImportBinding: return "ImportBinding";
    case NodeKind::Unanalyzed: return "Unanalyzed";
    case NodeKind::Identifier: return "Identifier";
    case NodeKind::This: return "This";
    case NodeKind::StringLit: return "StringLit";
    case NodeKind::NumberLit: return "NumberLit";
    case NodeKind::BoolLit: return "BoolLit";
    case NodeKind::NullLit: return "NullLit";
    case NodeKind::RegExpLit: return "RegExpLit";
    case NodeKind::ArrayLit: return "ArrayLit";
    case NodeKind::ObjectLit: return "ObjectLit";
    case NodeKind::Property: return "Property";
    case NodeKind::FunctionExpr: return "FunctionExpr";
    case NodeKind::ArrowFunction: return "ArrowFunction";
    case NodeKind::Member: return "Member";
    case NodeKind::Call: return "Call";
    case NodeKind::New: return "New";
    case NodeKind::Unary: return "Unary";
    case NodeKind::Update: return "Update";
    case NodeKind::Binary: return "Binary";
    case NodeKind::Logical: return "Logical";
    case NodeKind::Conditional: return "Conditional";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Sequence: return "Sequence";
    case NodeKind::Spread: return "Spread";
  }
  return "?";
}

NodeId Ast::add(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Ast::link_parents() {
  for (auto& n : nodes_) n.parent = kNoNode;
  for (NodeId id = 0; id < nodes_.size(); ++id)
    for (NodeId c : nodes_[id].children) nodes_[c].parent = id;
}

bool Ast::is_function(NodeId id) const {
  NodeKind k = node(id).kind;
  return k == NodeKind::FunctionDecl || k == NodeKind::FunctionExpr || k == NodeKind::ArrowFunction;
}

std::span<const NodeId> Ast::params(NodeId fn) const {
  const Node& n = node(fn);
  return std::span<const NodeId>(n.children.data(), n.aux);
}

NodeId Ast::body(NodeId fn) const { return node(fn).children.back(); }

NodeId Ast::enclosing_function(NodeId id) const {
  NodeId p = node(id).parent;
  while (p != kNoNode && !is_function(p) && node(p).kind != NodeKind::Program) p = node(p).parent;
  return p;
}

namespace {

void dump_node(const Ast& ast, NodeId id, int depth, bool spans, std::ostringstream& out) {
  const Node& n = ast.node(id);
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(n.kind);
  if (!n.text.empty()) out << " '" << n.text << "'";
  if (!n.alt.empty()) out << " alt='" << n.alt << "'";
  if (n.flags) out << " flags=" << n.flags;
  if (spans) {
    out << " @" << n.span.start.line << ":" << n.span.start.column << "-" << n.span.end.line << ":"
        << n.span.end.column;
  }
  out << "\n";
  for (NodeId c : n.children) dump_node(ast, c, depth + 1, spans, out);
}

} // namespace

std::string Ast::dump(bool with_spans) const {
  std::ostringstream out;
  if (root_ != kNoNode) dump_node(*this, root_, 0, with_spans, out);
  return out.str();
}

} // namespace propcheck
