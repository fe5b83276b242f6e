#include <algorithm>
#include <array>
#include <optional>
#include <string_view>

#include "lexer.hpp"
#include "propcheck/ast.hpp"
#include "propcheck/error.hpp"

namespace propcheck {

namespace {

using detail::Token;
using detail::TokenKind;
namespace nf = node_flags;

constexpr std::array<std::string_view, 27> kReserved = {
    "break",  "case",   "catch", "continue", "debugger", "default", "delete",
    "do",     "else",   "export", "finally", "for",      "function", "if",
    "import", "in",     "instanceof", "new", "return",   "switch",  "throw",
    "try",    "typeof", "var",   "void",     "while",    "with"};

bool is_reserved(std::string_view name) {
  return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end() ||
         name == "class" || name == "const" || name == "enum" || name == "extends" ||
         name == "super" || name == "this" || name == "null" || name == "true" || name == "false";
}

int binary_precedence(const Token& t, bool allow_in) {
  if (t.kind == TokenKind::Identifier) {
    if (t.value == "instanceof") return 8;
    if (t.value == "in" && allow_in) return 8;
    return -1;
  }
  if (t.kind != TokenKind::Punctuator) return -1;
  const std::string& v = t.value;
  if (v == "??") return 1;
  if (v == "||") return 2;
  if (v == "&&") return 3;
  if (v == "|") return 4;
  if (v == "^") return 5;
  if (v == "&") return 6;
  if (v == "==" || v == "!=" || v == "===" || v == "!==") return 7;
  if (v == "<" || v == ">" || v == "<=" || v == ">=") return 8;
  if (v == "<<" || v == ">>" || v == ">>>") return 9;
  if (v == "+" || v == "-") return 10;
  if (v == "*" || v == "/" || v == "%") return 11;
  if (v == "**") return 12;
  return -1;
}

bool is_assign_op(const Token& t) {
  if (t.kind != TokenKind::Punctuator) return false;
  static constexpr std::array<std::string_view, 16> ops = {
      "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=",
      "&&=", "||=", "?\?="};
  return std::find(ops.begin(), ops.end(), t.value) != ops.end();
}

class Parser {
public:
  Parser(const SourceFile& file, const ParseOptions& options)
      : file_(file), options_(options), tokens_(detail::tokenize(file)) {
    ast_.set_file(file.path);
  }

  Ast run() {
    Position start = cur().start;
    std::vector<NodeId> body;
    while (!at_end()) body.push_back(parse_statement());
    NodeId program = make(NodeKind::Program, start);
    ast_.node(program).children = std::move(body);
    // The program spans the whole file.
    ast_.node(program).span.start = Position{};
    ast_.node(program).span.end = tokens_.back().end;
    ast_.set_root(program);
    ast_.link_parents();
    return std::move(ast_);
  }

private:
  // ---- token helpers -------------------------------------------------------

  const Token& cur() const { return tokens_[idx_]; }
  const Token& peek(std::size_t n = 1) const {
    return tokens_[std::min(idx_ + n, tokens_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokenKind::End; }
  bool at(std::string_view punct) const {
    return cur().kind == TokenKind::Punctuator && cur().value == punct;
  }
  bool at_kw(std::string_view name) const {
    return cur().kind == TokenKind::Identifier && cur().value == name;
  }
  static bool is_punct(const Token& t, std::string_view p) {
    return t.kind == TokenKind::Punctuator && t.value == p;
  }
  static bool is_kw(const Token& t, std::string_view p) {
    return t.kind == TokenKind::Identifier && t.value == p;
  }

  const Token& next() {
    const Token& t = tokens_[idx_];
    last_end_ = t.end;
    if (idx_ + 1 < tokens_.size()) ++idx_;
    return t;
  }

  bool eat(std::string_view punct) {
    if (!at(punct)) return false;
    next();
    return true;
  }

  bool eat_kw(std::string_view name) {
    if (!at_kw(name)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw SyntaxError(Span{file_.path, t.start, t.end}, msg);
  }

  [[noreturn]] void unexpected() const {
    const Token& t = cur();
    if (t.kind == TokenKind::End) fail_at(t, "unexpected end of input");
    fail_at(t, "unexpected token '" + t.value + "'");
  }

  void expect(std::string_view punct) {
    if (!eat(punct)) {
      if (at_end()) fail_at(cur(), "unexpected end of input, expected '" + std::string(punct) + "'");
      fail_at(cur(), "expected '" + std::string(punct) + "' but found '" + cur().value + "'");
    }
  }

  void expect_kw(std::string_view name) {
    if (!eat_kw(name)) fail_at(cur(), "expected '" + std::string(name) + "'");
  }

  // Statement terminator with newline-based insertion.
  void terminator() {
    if (eat(";")) return;
    if (at("}") || at_end() || cur().newline_before) return;
    fail_at(cur(), "expected ';' but found '" + cur().value + "'");
  }

  // ---- node helpers --------------------------------------------------------

  NodeId make(NodeKind kind, Position start) {
    Node n;
    n.kind = kind;
    n.span = Span{file_.path, start, last_end_ < start ? start : last_end_};
    return ast_.add(std::move(n));
  }

  NodeId make(NodeKind kind, Position start, std::vector<NodeId> children, std::string text = {}) {
    NodeId id = make(kind, start);
    ast_.node(id).children = std::move(children);
    ast_.node(id).text = std::move(text);
    return id;
  }

  NodeId empty_at(Position at) {
    Node n;
    n.kind = NodeKind::Empty;
    n.span = Span{file_.path, at, at};
    return ast_.add(std::move(n));
  }

  Position start_of(NodeId id) const { return ast_.node(id).span.start; }

  // ---- skipping (unanalyzed constructs) ------------------------------------

  // Current token is an opener; consumes through the matching closer.
  void skip_balanced() {
    const Token& open = cur();
    int depth = 0;
    do {
      if (at_end()) fail_at(open, "unbalanced '" + open.value + "'");
      if (at("{") || at("(") || at("[")) ++depth;
      if (at("}") || at(")") || at("]")) --depth;
      next();
    } while (depth > 0);
  }

  // Skips to the end of the current statement at bracket depth zero.
  void skip_statement() {
    bool first = true;
    while (!at_end()) {
      if (!first && cur().newline_before) return;
      if (at(";")) {
        next();
        return;
      }
      if (at("}")) return;
      if (at("{") || at("(") || at("[")) {
        skip_balanced();
      } else {
        next();
      }
      first = false;
    }
  }

  NodeId unanalyzed(Position start, std::string what, std::string declared = {}) {
    NodeId id = make(NodeKind::Unanalyzed, start);
    ast_.node(id).text = std::move(what);
    ast_.node(id).alt = std::move(declared);
    return id;
  }

  // Skips a type annotation (lenient mode). Stops before `,` `)` `]` `}` `=`
  // `;` at depth zero; optionally before `{` or `=>`.
  void skip_type(bool stop_at_brace, bool stop_at_arrow) {
    int angle = 0;
    bool first = true;
    while (!at_end()) {
      const Token& t = cur();
      if (!first && t.newline_before && angle == 0) {
        const Token& prev = tokens_[idx_ - 1];
        bool continues = prev.kind == TokenKind::Punctuator &&
                         (prev.value == "|" || prev.value == "&" || prev.value == ":" ||
                          prev.value == "," || prev.value == "<" || prev.value == "=>");
        bool leading = t.kind == TokenKind::Punctuator && (t.value == "|" || t.value == "&");
        if (!continues && !leading) return;
      }
      if (t.kind == TokenKind::Punctuator) {
        const std::string& v = t.value;
        if (v == "<") {
          ++angle;
        } else if (v == ">" && angle > 0) {
          --angle;
        } else if (v == ">>" && angle > 0) {
          angle = std::max(0, angle - 2);
        } else if (v == ">>>" && angle > 0) {
          angle = std::max(0, angle - 3);
        } else if (angle == 0) {
          if (v == "," || v == ")" || v == "]" || v == "}" || v == "=" || v == ";") return;
          if (v == "{" && stop_at_brace) return;
          if (v == "=>" && stop_at_arrow) return;
          if (v == ">" || v == ">=" || v == ">>") return;
        }
        if (v == "(" || v == "[" || v == "{") {
          skip_balanced();
          first = false;
          continue;
        }
        if (v == ")" || v == "]" || v == "}") return;
      }
      next();
      first = false;
    }
  }

  bool lenient() const { return options_.lenient_types; }

  void skip_type_params() {
    if (!lenient() || !at("<")) return;
    int depth = 0;
    do {
      if (at_end()) unexpected();
      if (at("<")) ++depth;
      if (at(">")) --depth;
      if (at(">>")) depth -= 2;
      next();
    } while (depth > 0);
  }

  void skip_annotation(bool stop_at_brace = false, bool stop_at_arrow = false) {
    if (!lenient()) return;
    if (at("?") && (is_punct(peek(), ":") || is_punct(peek(), ",") || is_punct(peek(), ")") ||
                    is_punct(peek(), "="))) {
      next();
    }
    if (at("!") && is_punct(peek(), ":")) next();
    if (eat(":")) skip_type(stop_at_brace, stop_at_arrow);
  }

  // ---- statements ----------------------------------------------------------

  NodeId parse_statement() {
    const Token& t = cur();
    Position start = t.start;
    if (t.kind == TokenKind::Punctuator) {
      if (t.value == "{") return parse_block();
      if (t.value == ";") {
        next();
        return make(NodeKind::Empty, start);
      }
      if (t.value == "@") fail_at(t, "decorators are not supported");
      return parse_expression_statement();
    }
    if (t.kind != TokenKind::Identifier) return parse_expression_statement();

    const std::string& kw = t.value;
    if (kw == "var" || kw == "const") {
      if (kw == "const" && lenient() && is_kw(peek(), "enum")) return skip_ts_declaration(start);
      NodeId d = parse_var_decl(true);
      terminator();
      ast_.node(d).span.end = last_end_;
      return d;
    }
    if (kw == "let") {
      const Token& n = peek();
      if (n.kind == TokenKind::Identifier || is_punct(n, "[") || is_punct(n, "{")) {
        NodeId d = parse_var_decl(true);
        terminator();
        ast_.node(d).span.end = last_end_;
        return d;
      }
    }
    if (kw == "function") return parse_function(NodeKind::FunctionDecl, start, 0);
    if (kw == "async" && is_kw(peek(), "function") && !peek().newline_before) {
      next();
      return parse_function(NodeKind::FunctionDecl, start, nf::kAsync);
    }
    if (kw == "if") return parse_if();
    if (kw == "while") {
      next();
      expect("(");
      NodeId test = parse_expression();
      expect(")");
      NodeId body = parse_statement();
      return make(NodeKind::While, start, {test, body});
    }
    if (kw == "do") {
      next();
      NodeId body = parse_statement();
      expect_kw("while");
      expect("(");
      NodeId test = parse_expression();
      expect(")");
      eat(";");
      return make(NodeKind::DoWhile, start, {body, test});
    }
    if (kw == "for") return parse_for();
    if (kw == "return") {
      next();
      std::vector<NodeId> kids;
      if (!at(";") && !at("}") && !at_end() && !cur().newline_before) kids.push_back(parse_expression());
      terminator();
      return make(NodeKind::Return, start, std::move(kids));
    }
    if (kw == "throw") {
      next();
      if (cur().newline_before) fail_at(cur(), "illegal newline after throw");
      NodeId arg = parse_expression();
      terminator();
      return make(NodeKind::Throw, start, {arg});
    }
    if (kw == "try") return parse_try();
    if (kw == "break" || kw == "continue") {
      next();
      std::string label;
      if (cur().kind == TokenKind::Identifier && !cur().newline_before && !is_reserved(cur().value))
        label = next().value;
      terminator();
      return make(kw == "break" ? NodeKind::Break : NodeKind::Continue, start, {}, std::move(label));
    }
    if (kw == "switch") return parse_switch();
    if (kw == "import" && !is_punct(peek(), "(") && !is_punct(peek(), ".")) return parse_import();
    if (kw == "export") return parse_export();
    if (kw == "class") return parse_class(start, true);
    if (kw == "debugger") {
      next();
      terminator();
      return make(NodeKind::Empty, start);
    }
    if (kw == "with") {
      // `with` changes scoping in ways the analysis does not model.
      next();
      skip_balanced();
      parse_statement();
      return unanalyzed(start, "with");
    }
    if (lenient()) {
      if ((kw == "interface" || kw == "enum" || kw == "declare" || kw == "namespace" ||
           kw == "module" || kw == "abstract") &&
          peek().kind == TokenKind::Identifier && !peek().newline_before)
        return skip_ts_declaration(start);
      if (kw == "type" && peek().kind == TokenKind::Identifier && !peek().newline_before)
        return skip_ts_declaration(start);
    }
    if (peek().kind == TokenKind::Punctuator && peek().value == ":" && !is_reserved(kw)) {
      std::string label = next().value;
      next();
      NodeId body = parse_statement();
      return make(NodeKind::Labeled, start, {body}, std::move(label));
    }
    return parse_expression_statement();
  }

  NodeId skip_ts_declaration(Position start) {
    std::string what = cur().value;
    if (what == "abstract") {
      next();
      if (at_kw("class")) return parse_class(start, true);
    }
    while (!at_end()) {
      if (at("{")) {
        skip_balanced();
        break;
      }
      if (at(";")) {
        next();
        break;
      }
      if (at("(") || at("[")) {
        skip_balanced();
        continue;
      }
      if (what == "type" && at("=")) {
        next();
        skip_type(false, false);
        eat(";");
        break;
      }
      next();
    }
    return unanalyzed(start, what);
  }

  NodeId parse_expression_statement() {
    Position start = cur().start;
    NodeId e = parse_expression();
    terminator();
    return make(NodeKind::ExprStmt, start, {e});
  }

  NodeId parse_block() {
    Position start = cur().start;
    expect("{");
    std::vector<NodeId> body;
    while (!at("}")) {
      if (at_end()) unexpected();
      body.push_back(parse_statement());
    }
    next();
    return make(NodeKind::Block, start, std::move(body));
  }

  NodeId parse_var_decl(bool allow_in) {
    Position start = cur().start;
    std::string kind = next().value;
    std::vector<NodeId> decls;
    do {
      Position dstart = cur().start;
      NodeId target = parse_binding_target();
      skip_annotation();
      std::vector<NodeId> kids{target};
      if (eat("=")) {
        bool saved = no_in_;
        no_in_ = !allow_in;
        kids.push_back(parse_assignment());
        no_in_ = saved;
      }
      NodeId d = make(NodeKind::Declarator, dstart, std::move(kids));
      ast_.node(d).aux = ast_.node(d).children.size() > 1 ? 1 : 0;
      decls.push_back(d);
    } while (eat(","));
    return make(NodeKind::VarDecl, start, std::move(decls), std::move(kind));
  }

  // Identifier or destructuring pattern (parsed as an object/array literal).
  NodeId parse_binding_target() {
    const Token& t = cur();
    if (t.kind == TokenKind::Identifier) {
      if (is_reserved(t.value)) fail_at(t, "unexpected reserved word '" + t.value + "'");
      Position start = t.start;
      std::string name = next().value;
      return make(NodeKind::Identifier, start, {}, std::move(name));
    }
    if (at("{")) return parse_object_literal();
    if (at("[")) return parse_array_literal();
    unexpected();
  }

  NodeId parse_if() {
    Position start = cur().start;
    next();
    expect("(");
    NodeId test = parse_expression();
    expect(")");
    NodeId cons = parse_statement();
    std::vector<NodeId> kids{test, cons};
    if (eat_kw("else")) kids.push_back(parse_statement());
    return make(NodeKind::If, start, std::move(kids));
  }

  NodeId parse_for() {
    Position start = cur().start;
    next();
    eat_kw("await");
    expect("(");
    NodeId init;
    bool is_decl = at_kw("var") || at_kw("const") ||
                   (at_kw("let") && (peek().kind == TokenKind::Identifier || is_punct(peek(), "[") ||
                                     is_punct(peek(), "{")));
    if (at(";")) {
      init = empty_at(cur().start);
    } else if (is_decl) {
      init = parse_var_decl(false);
    } else {
      bool saved = no_in_;
      no_in_ = true;
      init = parse_expression();
      no_in_ = saved;
    }
    if (at_kw("of") || at_kw("in")) {
      std::string kind = next().value;
      NodeId right = kind == "of" ? parse_assignment() : parse_expression();
      expect(")");
      NodeId body = parse_statement();
      return make(NodeKind::ForIn, start, {init, right, body}, std::move(kind));
    }
    expect(";");
    NodeId test = at(";") ? empty_at(cur().start) : parse_expression();
    expect(";");
    NodeId update = at(")") ? empty_at(cur().start) : parse_expression();
    expect(")");
    NodeId body = parse_statement();
    return make(NodeKind::For, start, {init, test, update, body});
  }

  NodeId parse_try() {
    Position start = cur().start;
    next();
    NodeId block = parse_block();
    NodeId param = empty_at(last_end_);
    NodeId handler = empty_at(last_end_);
    NodeId finalizer = empty_at(last_end_);
    bool any = false;
    if (eat_kw("catch")) {
      any = true;
      if (eat("(")) {
        param = parse_binding_target();
        skip_annotation();
        expect(")");
      }
      handler = parse_block();
    }
    if (eat_kw("finally")) {
      any = true;
      finalizer = parse_block();
    }
    if (!any) fail_at(cur(), "missing catch or finally after try");
    return make(NodeKind::Try, start, {block, param, handler, finalizer});
  }

  NodeId parse_switch() {
    Position start = cur().start;
    next();
    expect("(");
    NodeId disc = parse_expression();
    expect(")");
    expect("{");
    std::vector<NodeId> kids{disc};
    while (!at("}")) {
      Position cstart = cur().start;
      NodeId test;
      if (eat_kw("case")) {
        test = parse_expression();
      } else if (eat_kw("default")) {
        test = empty_at(cstart);
      } else {
        unexpected();
      }
      expect(":");
      std::vector<NodeId> body{test};
      while (!at("}") && !at_kw("case") && !at_kw("default")) {
        if (at_end()) unexpected();
        body.push_back(parse_statement());
      }
      kids.push_back(make(NodeKind::Case, cstart, std::move(body)));
    }
    next();
    return make(NodeKind::Switch, start, std::move(kids));
  }

  std::string expect_module_specifier() {
    if (cur().kind != TokenKind::String) fail_at(cur(), "expected module specifier string");
    return next().value;
  }

  NodeId import_binding(Position start, std::string local, std::string imported, std::uint32_t flags) {
    NodeId id = make(NodeKind::ImportBinding, start, {}, std::move(local));
    ast_.node(id).alt = std::move(imported);
    ast_.node(id).flags = flags;
    return id;
  }

  NodeId parse_import() {
    Position start = cur().start;
    next();
    if (lenient() && at_kw("type") && !is_kw(peek(), "from") && !is_punct(peek(), ",")) {
      skip_statement();
      return unanalyzed(start, "import type");
    }
    std::vector<NodeId> bindings;
    if (cur().kind == TokenKind::String) {
      std::string module = next().value;
      terminator();
      return make(NodeKind::Import, start, {}, std::move(module));
    }
    if (cur().kind == TokenKind::Identifier && !at_kw("from")) {
      if (lenient() && is_punct(peek(), "=")) { // import x = require('m')
        skip_statement();
        return unanalyzed(start, "import-equals");
      }
      Position bstart = cur().start;
      std::string local = next().value;
      bindings.push_back(import_binding(bstart, std::move(local), "", nf::kDefaultImport));
      if (!eat(",")) goto from_clause;
    } else if (at_kw("from")) {
      // `import from from 'm'`
      Position bstart = cur().start;
      next();
      bindings.push_back(import_binding(bstart, "from", "", nf::kDefaultImport));
      goto from_clause;
    }
    if (at("*")) {
      Position bstart = cur().start;
      next();
      expect_kw("as");
      if (cur().kind != TokenKind::Identifier) unexpected();
      std::string local = next().value;
      bindings.push_back(import_binding(bstart, std::move(local), "", nf::kNamespaceImport));
    } else if (eat("{")) {
      while (!at("}")) {
        Position bstart = cur().start;
        if (lenient() && at_kw("type") && peek().kind == TokenKind::Identifier) next();
        if (cur().kind != TokenKind::Identifier && cur().kind != TokenKind::String) unexpected();
        std::string imported = next().value;
        std::string local = imported;
        if (eat_kw("as")) {
          if (cur().kind != TokenKind::Identifier) unexpected();
          local = next().value;
        }
        std::uint32_t flags = imported == "default" ? nf::kDefaultImport : 0;
        bindings.push_back(import_binding(bstart, std::move(local),
                                          flags ? std::string() : std::move(imported), flags));
        if (!eat(",")) break;
      }
      expect("}");
    } else {
      unexpected();
    }
  from_clause:
    expect_kw("from");
    std::string module = expect_module_specifier();
    if (at_kw("assert") || at_kw("with")) {
      next();
      skip_balanced();
    }
    terminator();
    return make(NodeKind::Import, start, std::move(bindings), std::move(module));
  }

  NodeId parse_export() {
    Position start = cur().start;
    next();
    if (eat_kw("default")) {
      if (at_kw("function")) return parse_function(NodeKind::FunctionDecl, start, 0, true);
      if (at_kw("async") && is_kw(peek(), "function")) {
        next();
        return parse_function(NodeKind::FunctionDecl, start, nf::kAsync, true);
      }
      if (at_kw("class")) return parse_class(start, true);
      NodeId e = parse_assignment();
      terminator();
      return make(NodeKind::ExprStmt, start, {e});
    }
    if (at("{") || at("*")) {
      skip_statement();
      return unanalyzed(start, "export list");
    }
    if (lenient() && at_kw("type") && is_punct(peek(), "{")) {
      skip_statement();
      return unanalyzed(start, "export type");
    }
    NodeId decl = parse_statement();
    NodeKind k = ast_.node(decl).kind;
    if (k != NodeKind::VarDecl && k != NodeKind::FunctionDecl && k != NodeKind::Unanalyzed)
      fail_at(tokens_[idx_ - 1], "expected declaration after export");
    return decl;
  }

  NodeId parse_class(Position start, bool declaration) {
    expect_kw("class");
    std::string name;
    if (cur().kind == TokenKind::Identifier && !at_kw("extends") && !at_kw("implements"))
      name = next().value;
    skip_type_params();
    while (!at("{")) {
      if (at_end()) unexpected();
      if (at("(") || at("[")) {
        skip_balanced();
      } else {
        next();
      }
    }
    skip_balanced();
    return unanalyzed(start, declaration ? "class" : "class expression", std::move(name));
  }

  // ---- functions -----------------------------------------------------------

  std::vector<NodeId> parse_params() {
    expect("(");
    std::vector<NodeId> params;
    while (!at(")")) {
      Position pstart = cur().start;
      if (lenient()) {
        while ((at_kw("public") || at_kw("private") || at_kw("protected") || at_kw("readonly")) &&
               peek().kind == TokenKind::Identifier)
          next();
      }
      if (eat("...")) {
        NodeId target = parse_binding_target();
        skip_annotation();
        params.push_back(make(NodeKind::Spread, pstart, {target}));
      } else {
        NodeId target = parse_binding_target();
        skip_annotation();
        if (eat("=")) {
          NodeId def = parse_assignment();
          params.push_back(make(NodeKind::Assign, pstart, {target, def}, "="));
        } else {
          params.push_back(target);
        }
      }
      if (!eat(",")) break;
    }
    expect(")");
    return params;
  }

  NodeId finish_function(NodeKind kind, Position start, std::string name, std::vector<NodeId> params,
                         NodeId body, std::uint32_t flags) {
    std::size_t count = params.size();
    params.push_back(body);
    NodeId fn = make(kind, start, std::move(params), std::move(name));
    ast_.node(fn).aux = static_cast<std::uint32_t>(count);
    ast_.node(fn).flags |= flags;
    return fn;
  }

  NodeId parse_function(NodeKind kind, Position start, std::uint32_t flags, bool anonymous_ok = false) {
    expect_kw("function");
    if (eat("*")) flags |= nf::kGenerator;
    std::string name;
    if (cur().kind == TokenKind::Identifier && !at("(")) {
      if (is_reserved(cur().value)) unexpected();
      name = next().value;
    } else if (kind == NodeKind::FunctionDecl && !anonymous_ok) {
      fail_at(cur(), "function declaration requires a name");
    }
    skip_type_params();
    std::vector<NodeId> params = parse_params();
    skip_annotation(true);
    if (lenient() && !at("{")) { // overload signature
      terminator();
      return unanalyzed(start, "function signature", name);
    }
    NodeId body = parse_block();
    return finish_function(kind, start, std::move(name), std::move(params), body, flags);
  }

  NodeId parse_arrow_body(Position start, std::vector<NodeId> params, std::uint32_t flags) {
    expect("=>");
    NodeId body;
    if (at("{")) {
      body = parse_block();
    } else {
      bool saved = no_in_;
      no_in_ = false;
      body = parse_assignment();
      no_in_ = saved;
      flags |= nf::kConciseBody;
    }
    return finish_function(NodeKind::ArrowFunction, start, {}, std::move(params), body, flags);
  }

  // Index of the token after the `)` matching the `(` at `from`, or npos.
  std::size_t after_matching_paren(std::size_t from) const {
    int depth = 0;
    for (std::size_t i = from; i < tokens_.size(); ++i) {
      const Token& t = tokens_[i];
      if (t.kind == TokenKind::End) return std::string::npos;
      if (t.kind == TokenKind::Punctuator) {
        if (t.value == "(" || t.value == "[" || t.value == "{") ++depth;
        if (t.value == ")" || t.value == "]" || t.value == "}") {
          --depth;
          if (depth == 0) return i + 1;
        }
      }
    }
    return std::string::npos;
  }

  bool arrow_follows_paren(std::size_t open) const {
    std::size_t after = after_matching_paren(open);
    if (after == std::string::npos) return false;
    const Token& t = tokens_[after];
    if (is_punct(t, "=>")) return !t.newline_before;
    if (lenient() && is_punct(t, ":")) {
      int depth = 0;
      for (std::size_t i = after + 1; i < tokens_.size(); ++i) {
        const Token& u = tokens_[i];
        if (u.kind == TokenKind::End) return false;
        if (u.kind != TokenKind::Punctuator) continue;
        if (u.value == "(" || u.value == "[" || u.value == "{" || u.value == "<") ++depth;
        else if (u.value == ")" || u.value == "]" || u.value == "}" || u.value == ">") {
          if (--depth < 0) return false;
        } else if (depth == 0 && u.value == "=>") {
          return true;
        } else if (depth == 0 && (u.value == ";" || u.value == "," || u.value == "=" || u.value == "?" ||
                                  u.value == ":")) {
          return false;
        }
      }
    }
    return false;
  }

  std::optional<NodeId> try_arrow() {
    const Token& t = cur();
    Position start = t.start;
    std::uint32_t flags = 0;
    std::size_t i = idx_;
    if (is_kw(t, "async") && !peek().newline_before &&
        (peek().kind == TokenKind::Identifier || is_punct(peek(), "("))) {
      bool ident_arrow = peek().kind == TokenKind::Identifier && is_punct(peek(2), "=>");
      bool paren_arrow = is_punct(peek(), "(") && arrow_follows_paren(idx_ + 1);
      if (!ident_arrow && !paren_arrow) return std::nullopt;
      flags |= nf::kAsync;
      ++i;
    }
    const Token& head = tokens_[i];
    if (head.kind == TokenKind::Identifier && !is_reserved(head.value) &&
        is_punct(tokens_[std::min(i + 1, tokens_.size() - 1)], "=>")) {
      if (flags) next();
      Position pstart = cur().start;
      std::string name = next().value;
      NodeId param = make(NodeKind::Identifier, pstart, {}, std::move(name));
      return parse_arrow_body(start, {param}, flags);
    }
    if (is_punct(head, "(") && arrow_follows_paren(i)) {
      if (flags) next();
      std::vector<NodeId> params = parse_params();
      skip_annotation(false, true);
      return parse_arrow_body(start, std::move(params), flags);
    }
    if (lenient() && is_punct(head, "<")) {
      // generic arrow: <T>(x: T) => x
      std::size_t j = i;
      int depth = 0;
      for (; j < tokens_.size(); ++j) {
        if (is_punct(tokens_[j], "<")) ++depth;
        if (is_punct(tokens_[j], ">") && --depth == 0) break;
        if (tokens_[j].kind == TokenKind::End) return std::nullopt;
      }
      if (j + 1 < tokens_.size() && is_punct(tokens_[j + 1], "(") && arrow_follows_paren(j + 1)) {
        if (flags) next();
        skip_type_params();
        std::vector<NodeId> params = parse_params();
        skip_annotation(false, true);
        return parse_arrow_body(start, std::move(params), flags);
      }
    }
    return std::nullopt;
  }

  // ---- expressions ---------------------------------------------------------

  NodeId parse_expression() {
    Position start = cur().start;
    NodeId first = parse_assignment();
    if (!at(",")) return first;
    std::vector<NodeId> items{first};
    while (eat(",")) items.push_back(parse_assignment());
    return make(NodeKind::Sequence, start, std::move(items));
  }

  bool valid_target(NodeId id, bool plain) const {
    const Node& n = ast_.node(id);
    switch (n.kind) {
      case NodeKind::Identifier:
      case NodeKind::Member:
        return true;
      case NodeKind::ObjectLit:
      case NodeKind::ArrayLit:
        return plain;
      default:
        return false;
    }
  }

  NodeId parse_assignment() {
    if (auto arrow = try_arrow()) return *arrow;
    if (at_kw("yield")) {
      Position start = cur().start;
      next();
      std::vector<NodeId> kids;
      eat("*");
      if (!at(")") && !at("]") && !at("}") && !at(",") && !at(";") && !at(":") && !at_end() &&
          !cur().newline_before)
        kids.push_back(parse_assignment());
      return make(NodeKind::Unary, start, std::move(kids), "yield");
    }
    Position start = cur().start;
    NodeId lhs = parse_conditional();
    if (is_assign_op(cur())) {
      const Token& op = cur();
      if (!valid_target(lhs, op.value == "=")) fail_at(op, "invalid assignment target");
      std::string text = next().value;
      NodeId rhs = parse_assignment();
      return make(NodeKind::Assign, start, {lhs, rhs}, std::move(text));
    }
    return lhs;
  }

  NodeId parse_conditional() {
    Position start = cur().start;
    NodeId test = parse_binary(0);
    if (!at("?")) return test;
    next();
    bool saved = no_in_;
    no_in_ = false;
    NodeId cons = parse_assignment();
    no_in_ = saved;
    expect(":");
    NodeId alt = parse_assignment();
    return make(NodeKind::Conditional, start, {test, cons, alt});
  }

  NodeId parse_binary(int min_prec) {
    Position start = cur().start;
    NodeId lhs = parse_unary();
    for (;;) {
      if (lenient() && (at_kw("as") || at_kw("satisfies")) && !cur().newline_before) {
        next();
        skip_type(false, false);
        continue;
      }
      int prec = binary_precedence(cur(), !no_in_);
      if (prec < 0 || prec <= min_prec) {
        if (!(prec == 12 && min_prec == 12)) break; // ** is right-associative
      }
      std::string op = next().value;
      NodeId rhs = parse_binary(prec == 12 ? prec - 1 : prec);
      NodeKind kind = (op == "&&" || op == "||" || op == "??") ? NodeKind::Logical : NodeKind::Binary;
      lhs = make(kind, start, {lhs, rhs}, std::move(op));
    }
    return lhs;
  }

  bool starts_operand(const Token& t) const {
    if (t.kind == TokenKind::End) return false;
    if (t.kind == TokenKind::Punctuator) {
      static constexpr std::array<std::string_view, 12> no = {")", "]", "}", ",", ";", ":",
                                                              "=", "?", ".", "=>", "?.", "||"};
      return std::find(no.begin(), no.end(), t.value) == no.end();
    }
    if (t.kind == TokenKind::Identifier)
      return !(t.value == "in" || t.value == "instanceof" || t.value == "of");
    return true;
  }

  NodeId parse_unary() {
    const Token& t = cur();
    Position start = t.start;
    if (t.kind == TokenKind::Punctuator &&
        (t.value == "!" || t.value == "-" || t.value == "+" || t.value == "~")) {
      std::string op = next().value;
      NodeId arg = parse_unary();
      return make(NodeKind::Unary, start, {arg}, std::move(op));
    }
    if (t.kind == TokenKind::Punctuator && (t.value == "++" || t.value == "--")) {
      std::string op = next().value;
      NodeId arg = parse_unary();
      if (!valid_target(arg, false)) fail_at(t, "invalid update target");
      NodeId u = make(NodeKind::Update, start, {arg}, std::move(op));
      ast_.node(u).flags |= nf::kPrefix;
      return u;
    }
    if (t.kind == TokenKind::Identifier &&
        (t.value == "typeof" || t.value == "void" || t.value == "delete")) {
      std::string op = next().value;
      NodeId arg = parse_unary();
      return make(NodeKind::Unary, start, {arg}, std::move(op));
    }
    if (is_kw(t, "await") && !peek().newline_before && starts_operand(peek())) {
      next();
      NodeId arg = parse_unary();
      return make(NodeKind::Unary, start, {arg}, "await");
    }
    if (lenient() && is_punct(t, "<") && peek().kind == TokenKind::Identifier) {
      // <T>expr type assertion
      skip_type_params();
      return parse_unary();
    }
    NodeId expr = parse_postfix();
    if (at("**") && ast_.node(expr).kind == NodeKind::Unary)
      fail_at(cur(), "unary operand of ** must be parenthesized");
    return expr;
  }

  NodeId parse_postfix() {
    Position start = cur().start;
    NodeId expr = parse_call_member();
    if ((at("++") || at("--")) && !cur().newline_before) {
      if (!valid_target(expr, false)) fail_at(cur(), "invalid update target");
      std::string op = next().value;
      return make(NodeKind::Update, start, {expr}, std::move(op));
    }
    return expr;
  }

  std::vector<NodeId> parse_arguments() {
    expect("(");
    std::vector<NodeId> args;
    while (!at(")")) {
      Position start = cur().start;
      if (eat("...")) {
        NodeId arg = parse_assignment();
        args.push_back(make(NodeKind::Spread, start, {arg}));
      } else {
        args.push_back(parse_assignment());
      }
      if (!eat(",")) break;
    }
    expect(")");
    return args;
  }

  std::string expect_property_name() {
    const Token& t = cur();
    if (t.kind == TokenKind::Identifier || t.kind == TokenKind::PrivateName) {
      std::string name = t.kind == TokenKind::PrivateName ? "#" + t.value : t.value;
      next();
      return name;
    }
    fail_at(t, "expected property name after '.'");
  }

  NodeId member(Position start, NodeId object, std::string name, std::uint32_t flags) {
    NodeId m = make(NodeKind::Member, start, {object}, std::move(name));
    ast_.node(m).flags |= flags;
    return m;
  }

  NodeId computed_member(Position start, NodeId object, std::uint32_t flags) {
    expect("[");
    NodeId index = parse_expression();
    expect("]");
    const Node& idx = ast_.node(index);
    if (idx.kind == NodeKind::StringLit) {
      std::string key = idx.text;
      return member(start, object, std::move(key), flags | nf::kComputed | nf::kConstantKey);
    }
    NodeId m = make(NodeKind::Member, start, {object, index});
    ast_.node(m).flags |= flags | nf::kComputed;
    return m;
  }

  NodeId parse_call_member() {
    Position start = cur().start;
    NodeId expr = at_kw("new") ? parse_new() : parse_primary();
    return parse_member_tail(start, expr, true);
  }

  NodeId parse_member_tail(Position start, NodeId expr, bool allow_call) {
    for (;;) {
      if (at(".")) {
        next();
        std::string name = expect_property_name();
        expr = member(start, expr, std::move(name), 0);
      } else if (at("?.")) {
        if (!allow_call) break;
        next();
        if (at("(")) {
          std::vector<NodeId> args = parse_arguments();
          args.insert(args.begin(), expr);
          expr = make(NodeKind::Call, start, std::move(args));
          ast_.node(expr).flags |= nf::kOptional;
        } else if (at("[")) {
          expr = computed_member(start, expr, nf::kOptional);
        } else {
          std::string name = expect_property_name();
          expr = member(start, expr, std::move(name), nf::kOptional);
        }
      } else if (at("[")) {
        expr = computed_member(start, expr, 0);
      } else if (at("(") && allow_call) {
        std::vector<NodeId> args = parse_arguments();
        args.insert(args.begin(), expr);
        expr = make(NodeKind::Call, start, std::move(args));
      } else if ((cur().kind == TokenKind::Template || cur().kind == TokenKind::TemplateSubst) &&
                 allow_call) {
        // tagged template: a call whose arguments are not modeled
        next();
        expr = make(NodeKind::Call, start, {expr});
      } else if (lenient() && at("!") && !cur().newline_before && allow_call) {
        next(); // non-null assertion
      } else if (lenient() && allow_call && at("<") && generic_call_follows()) {
        skip_type_params();
      } else {
        break;
      }
    }
    return expr;
  }

  bool generic_call_follows() const {
    int depth = 0;
    for (std::size_t i = idx_; i < tokens_.size(); ++i) {
      const Token& t = tokens_[i];
      if (t.kind == TokenKind::End) return false;
      if (is_punct(t, "<")) ++depth;
      else if (is_punct(t, ">")) {
        if (--depth == 0) return i + 1 < tokens_.size() && is_punct(tokens_[i + 1], "(");
      } else if (t.kind == TokenKind::Punctuator && t.value != "," && t.value != "." &&
                 t.value != "[" && t.value != "]" && t.value != "|") {
        return false;
      }
    }
    return false;
  }

  NodeId parse_new() {
    Position start = cur().start;
    next();
    if (at(".")) {
      next();
      expect_property_name();
      return unanalyzed(start, "new.target");
    }
    Position cstart = cur().start;
    NodeId callee = at_kw("new") ? parse_new() : parse_primary();
    callee = parse_member_tail(cstart, callee, false);
    skip_type_params();
    std::vector<NodeId> kids{callee};
    if (at("(")) {
      std::vector<NodeId> args = parse_arguments();
      kids.insert(kids.end(), args.begin(), args.end());
    }
    return make(NodeKind::New, start, std::move(kids));
  }

  NodeId parse_primary() {
    const Token& t = cur();
    Position start = t.start;
    switch (t.kind) {
      case TokenKind::Number: {
        std::string raw = next().value;
        return make(NodeKind::NumberLit, start, {}, std::move(raw));
      }
      case TokenKind::String: {
        std::string v = next().value;
        return make(NodeKind::StringLit, start, {}, std::move(v));
      }
      case TokenKind::Template: {
        std::string v = next().value;
        NodeId s = make(NodeKind::StringLit, start, {}, std::move(v));
        ast_.node(s).flags |= nf::kTemplate;
        return s;
      }
      case TokenKind::TemplateSubst:
        next();
        return unanalyzed(start, "template literal");
      case TokenKind::RegExp: {
        std::string v = next().value;
        return make(NodeKind::RegExpLit, start, {}, std::move(v));
      }
      case TokenKind::PrivateName:
        unexpected();
      case TokenKind::End:
        unexpected();
      case TokenKind::Punctuator:
        if (t.value == "(") {
          next();
          bool saved = no_in_;
          no_in_ = false;
          NodeId inner = parse_expression();
          no_in_ = saved;
          expect(")");
          return inner;
        }
        if (t.value == "[") return parse_array_literal();
        if (t.value == "{") return parse_object_literal();
        unexpected();
      case TokenKind::Identifier:
        break;
    }
    const std::string& name = t.value;
    if (name == "function") return parse_function(NodeKind::FunctionExpr, start, 0);
    if (name == "async" && is_kw(peek(), "function") && !peek().newline_before) {
      next();
      return parse_function(NodeKind::FunctionExpr, start, nf::kAsync);
    }
    if (name == "class") return parse_class(start, false);
    if (name == "this") {
      next();
      return make(NodeKind::This, start);
    }
    if (name == "true" || name == "false") {
      std::string v = next().value;
      return make(NodeKind::BoolLit, start, {}, std::move(v));
    }
    if (name == "null") {
      next();
      return make(NodeKind::NullLit, start);
    }
    if (name == "import") {
      next();
      if (at(".")) {
        next();
        expect_property_name();
        return unanalyzed(start, "import.meta");
      }
      return make(NodeKind::Identifier, start, {}, "import");
    }
    if (name == "super") {
      next();
      return make(NodeKind::Identifier, start, {}, "super");
    }
    if (is_reserved(name)) unexpected();
    std::string id = next().value;
    return make(NodeKind::Identifier, start, {}, std::move(id));
  }

  NodeId parse_array_literal() {
    Position start = cur().start;
    expect("[");
    std::vector<NodeId> elems;
    while (!at("]")) {
      Position estart = cur().start;
      if (at(",")) {
        next();
        elems.push_back(empty_at(estart));
        continue;
      }
      if (eat("...")) {
        NodeId arg = parse_assignment();
        elems.push_back(make(NodeKind::Spread, estart, {arg}));
      } else {
        elems.push_back(parse_assignment());
      }
      if (!eat(",")) break;
    }
    expect("]");
    return make(NodeKind::ArrayLit, start, std::move(elems));
  }

  // Method-style property: key(params) { body }
  NodeId parse_method(Position start, std::string key, std::uint32_t flags) {
    skip_type_params();
    std::vector<NodeId> params = parse_params();
    skip_annotation(true);
    NodeId body = parse_block();
    return finish_function(NodeKind::FunctionExpr, start, std::move(key), std::move(params), body,
                           flags | nf::kMethod);
  }

  NodeId parse_object_literal() {
    Position start = cur().start;
    expect("{");
    std::vector<NodeId> props;
    while (!at("}")) {
      Position pstart = cur().start;
      if (eat("...")) {
        NodeId arg = parse_assignment();
        props.push_back(make(NodeKind::Spread, pstart, {arg}));
        if (!eat(",")) break;
        continue;
      }
      std::uint32_t fn_flags = 0;
      // get/set/async/* prefixes only apply when followed by another key
      auto prefix_applies = [&] {
        const Token& n = peek();
        return !(is_punct(n, ",") || is_punct(n, ":") || is_punct(n, "(") || is_punct(n, "}") ||
                 is_punct(n, "="));
      };
      if ((at_kw("get") || at_kw("set")) && prefix_applies()) {
        next();
      } else if (at_kw("async") && prefix_applies() && !peek().newline_before) {
        next();
        fn_flags |= nf::kAsync;
      }
      if (eat("*")) fn_flags |= nf::kGenerator;

      NodeId key_expr = kNoNode;
      std::string key;
      bool ident_key = false;
      const Token& k = cur();
      if (at("[")) {
        next();
        key_expr = parse_assignment();
        expect("]");
      } else if (k.kind == TokenKind::Identifier) {
        ident_key = true;
        key = next().value;
      } else if (k.kind == TokenKind::String || k.kind == TokenKind::Number) {
        key = next().value;
      } else {
        unexpected();
      }

      NodeId value;
      std::uint32_t flags = 0;
      if (at("(") || (lenient() && at("<"))) {
        value = parse_method(pstart, key, fn_flags);
        flags |= nf::kMethod;
      } else if (eat(":")) {
        value = parse_assignment();
      } else if (ident_key && key_expr == kNoNode) {
        flags |= nf::kShorthand;
        value = make(NodeKind::Identifier, pstart, {}, key);
        if (at("=")) { // shorthand with default, only meaningful in patterns
          next();
          NodeId def = parse_assignment();
          value = make(NodeKind::Assign, pstart, {value, def}, "=");
        }
      } else {
        unexpected();
      }
      std::vector<NodeId> kids;
      if (key_expr != kNoNode) {
        kids.push_back(key_expr);
        flags |= nf::kComputed;
      }
      kids.push_back(value);
      NodeId prop = make(NodeKind::Property, pstart, std::move(kids), std::move(key));
      ast_.node(prop).flags |= flags;
      props.push_back(prop);
      if (!eat(",")) break;
    }
    expect("}");
    return make(NodeKind::ObjectLit, start, std::move(props));
  }

  const SourceFile& file_;
  ParseOptions options_;
  std::vector<Token> tokens_;
  std::size_t idx_ = 0;
  Position last_end_;
  bool no_in_ = false;
  Ast ast_;
};

} // namespace

Ast parse(const SourceFile& file, const ParseOptions& options) {
  std::size_t bad = 0;
  if (!detail::is_utf8(file.text, &bad)) {
    Position p;
    p.offset = static_cast<std::uint32_t>(bad);
    for (std::size_t i = 0; i < bad; ++i) {
      unsigned char c = static_cast<unsigned char>(file.text[i]);
      if (c == '\n') {
        ++p.line;
        p.column = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++p.column;
      }
    }
    throw SyntaxError(Span{file.path, p, p}, "invalid UTF-8");
  }
  return Parser(file, options).run();
}

} // namespace propcheck
