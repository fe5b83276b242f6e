#include "lexer.hpp"

#include <array>
#include <string_view>

#include "propcheck/error.hpp"

namespace propcheck::detail {

namespace {

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Longest first so that greedy matching works.
constexpr std::array<std::string_view, 54> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "?\?=",
    "=>",   "==",  "!=",  "<=",  ">=",  "&&",  "||",  "??",  "?.",  "++",  "--",
    "+=",   "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",  "<<",  ">>",  "**",
    "{",    "}",   "(",   ")",   "[",   "]",   ";",   ",",   "<",   ">",   "+",
    "-",    "*",   "%",   "&",   "|",   "^",   "!",   "~",   "?",   ":"};

class Lexer {
public:
  explicit Lexer(const SourceFile& file) : file_(file), text_(file.text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    if (text_.starts_with("#!")) {
      while (pos_.offset < text_.size() && text_[pos_.offset] != '\n') advance();
    }
    for (;;) {
      bool newline = skip_trivia();
      Token tok;
      tok.newline_before = newline;
      tok.start = pos_;
      if (pos_.offset >= text_.size()) {
        tok.kind = TokenKind::End;
        tok.end = pos_;
        tokens.push_back(std::move(tok));
        return tokens;
      }
      lex_one(tok, tokens.empty() ? nullptr : &tokens.back());
      tok.end = pos_;
      tokens.push_back(std::move(tok));
    }
  }

private:
  char peek(std::size_t ahead = 0) const {
    std::size_t i = pos_.offset + ahead;
    return i < text_.size() ? text_[i] : '\0';
  }

  void advance() {
    unsigned char c = static_cast<unsigned char>(text_[pos_.offset]);
    ++pos_.offset;
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else if ((c & 0xC0) != 0x80) {
      // continuation bytes do not start a new column
      ++pos_.column;
    }
  }

  [[noreturn]] void fail(Position at, const std::string& msg) const {
    Position end = at;
    if (end.offset < text_.size()) {
      ++end.offset;
      ++end.column;
    }
    throw SyntaxError(Span{file_.path, at, end}, msg);
  }

  bool skip_trivia() {
    bool newline = false;
    while (pos_.offset < text_.size()) {
      char c = peek();
      if (c == '\n') {
        newline = true;
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_.offset < text_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        Position start = pos_;
        advance();
        advance();
        for (;;) {
          if (pos_.offset >= text_.size()) fail(start, "unterminated comment");
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            break;
          }
          if (peek() == '\n') newline = true;
          advance();
        }
      } else if (static_cast<unsigned char>(c) == 0xC2 &&
                 static_cast<unsigned char>(peek(1)) == 0xA0) { // NBSP
        advance();
        advance();
      } else if (static_cast<unsigned char>(c) == 0xEF &&
                 static_cast<unsigned char>(peek(1)) == 0xBB &&
                 static_cast<unsigned char>(peek(2)) == 0xBF) { // BOM
        advance();
        advance();
        advance();
      } else {
        break;
      }
    }
    return newline;
  }

  static bool regex_allowed(const Token* prev) {
    if (prev == nullptr) return true;
    switch (prev->kind) {
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::Template:
      case TokenKind::TemplateSubst:
      case TokenKind::RegExp:
      case TokenKind::PrivateName:
        return false;
      case TokenKind::Identifier: {
        static constexpr std::array<std::string_view, 14> kw = {
            "return", "typeof", "instanceof", "in",   "of",     "new",  "delete",
            "void",   "throw",  "case",       "do",   "else",   "yield", "await"};
        for (auto k : kw)
          if (prev->value == k) return true;
        return false;
      }
      case TokenKind::Punctuator:
        return !(prev->value == ")" || prev->value == "]" || prev->value == "}" ||
                 prev->value == "++" || prev->value == "--");
      case TokenKind::End:
        return true;
    }
    return true;
  }

  void lex_one(Token& tok, const Token* prev) {
    unsigned char c = static_cast<unsigned char>(peek());
    if (is_ident_start(c) || c == '\\') {
      tok.kind = TokenKind::Identifier;
      lex_identifier(tok.value);
      return;
    }
    if (c == '#' && is_ident_start(static_cast<unsigned char>(peek(1)))) {
      advance();
      tok.kind = TokenKind::PrivateName;
      lex_identifier(tok.value);
      return;
    }
    if (is_digit(c) || (c == '.' && is_digit(static_cast<unsigned char>(peek(1))))) {
      tok.kind = TokenKind::Number;
      lex_number(tok.value);
      return;
    }
    if (c == '"' || c == '\'') {
      tok.kind = TokenKind::String;
      lex_string(tok.value);
      return;
    }
    if (c == '`') {
      lex_template(tok);
      return;
    }
    if (c == '/') {
      if (regex_allowed(prev)) {
        tok.kind = TokenKind::RegExp;
        lex_regex(tok.value);
        return;
      }
      tok.kind = TokenKind::Punctuator;
      if (peek(1) == '=') {
        tok.value = "/=";
        advance();
      } else {
        tok.value = "/";
      }
      advance();
      return;
    }
    if (c == '.' ) {
      tok.kind = TokenKind::Punctuator;
      if (peek(1) == '.' && peek(2) == '.') {
        tok.value = "...";
        advance();
        advance();
      } else {
        tok.value = ".";
      }
      advance();
      return;
    }
    std::string_view rest(text_.data() + pos_.offset, text_.size() - pos_.offset);
    for (auto p : kPunctuators) {
      if (rest.starts_with(p)) {
        // `?.` followed by a digit is a conditional and a number (a?.5:b)
        if (p == "?." && rest.size() > 2 && is_digit(static_cast<unsigned char>(rest[2]))) continue;
        tok.kind = TokenKind::Punctuator;
        tok.value = std::string(p);
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        return;
      }
    }
    if (c == '=') {
      tok.kind = TokenKind::Punctuator;
      tok.value = "=";
      advance();
      return;
    }
    if (c == '@') { // decorators: lexed so the parser can reject or skip them
      tok.kind = TokenKind::Punctuator;
      tok.value = "@";
      advance();
      return;
    }
    fail(pos_, std::string("unexpected character '") + static_cast<char>(c) + "'");
  }

  void lex_identifier(std::string& out) {
    while (pos_.offset < text_.size()) {
      unsigned char c = static_cast<unsigned char>(peek());
      if (c == '\\' && peek(1) == 'u') {
        Position at = pos_;
        advance();
        advance();
        append_utf8(out, read_unicode_escape(at));
        continue;
      }
      if (!is_ident_part(c)) break;
      out += static_cast<char>(c);
      advance();
    }
  }

  std::uint32_t read_unicode_escape(Position at) {
    std::uint32_t cp = 0;
    if (peek() == '{') {
      advance();
      int digits = 0;
      while (peek() != '}') {
        int h = hex_value(peek());
        if (h < 0) fail(at, "invalid unicode escape");
        cp = cp * 16 + static_cast<std::uint32_t>(h);
        if (cp > 0x10FFFF) fail(at, "unicode escape out of range");
        advance();
        ++digits;
      }
      if (digits == 0) fail(at, "invalid unicode escape");
      advance();
      return cp;
    }
    for (int i = 0; i < 4; ++i) {
      int h = hex_value(peek());
      if (h < 0) fail(at, "invalid unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(h);
      advance();
    }
    return cp;
  }

  void lex_number(std::string& out) {
    std::size_t begin = pos_.offset;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B' ||
                          peek(1) == 'o' || peek(1) == 'O')) {
      advance();
      advance();
      while (hex_value(peek()) >= 0 || peek() == '_') advance();
    } else {
      while (is_digit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.') {
        advance();
        while (is_digit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t save = 1;
        if (peek(1) == '+' || peek(1) == '-') save = 2;
        if (is_digit(static_cast<unsigned char>(peek(save)))) {
          for (std::size_t i = 0; i < save; ++i) advance();
          while (is_digit(static_cast<unsigned char>(peek()))) advance();
        }
      }
    }
    if (peek() == 'n') advance(); // BigInt
    if (is_ident_start(static_cast<unsigned char>(peek())))
      fail(pos_, "identifier starts immediately after numeric literal");
    out.assign(text_, begin, pos_.offset - begin);
  }

  // Decodes one escape sequence after the backslash; appends to out.
  void lex_escape(std::string& out, Position at) {
    char e = peek();
    switch (e) {
      case 'n': out += '\n'; advance(); return;
      case 't': out += '\t'; advance(); return;
      case 'r': out += '\r'; advance(); return;
      case 'b': out += '\b'; advance(); return;
      case 'f': out += '\f'; advance(); return;
      case 'v': out += '\v'; advance(); return;
      case '0':
        if (!is_digit(static_cast<unsigned char>(peek(1)))) {
          out += '\0';
          advance();
          return;
        }
        break;
      case 'x': {
        advance();
        int h1 = hex_value(peek());
        int h2 = hex_value(peek(1));
        if (h1 < 0 || h2 < 0) fail(at, "invalid hex escape");
        advance();
        advance();
        append_utf8(out, static_cast<std::uint32_t>(h1 * 16 + h2));
        return;
      }
      case 'u':
        advance();
        append_utf8(out, read_unicode_escape(at));
        return;
      case '\r':
        advance();
        if (peek() == '\n') advance();
        return;
      case '\n':
        advance();
        return;
      default:
        break;
    }
    if (pos_.offset >= text_.size()) fail(at, "unterminated string literal");
    // identity escape (also legacy octal digits, kept verbatim)
    std::size_t start = pos_.offset;
    advance();
    while (pos_.offset < text_.size() &&
           (static_cast<unsigned char>(text_[pos_.offset]) & 0xC0) == 0x80)
      advance();
    out.append(text_, start, pos_.offset - start);
  }

  void lex_string(std::string& out) {
    Position start = pos_;
    char quote = peek();
    advance();
    for (;;) {
      if (pos_.offset >= text_.size() || peek() == '\n') fail(start, "unterminated string literal");
      char c = peek();
      if (c == quote) {
        advance();
        return;
      }
      if (c == '\\') {
        Position at = pos_;
        advance();
        lex_escape(out, at);
        continue;
      }
      out += c;
      advance();
    }
  }

  void lex_template(Token& tok) {
    Position start = pos_;
    advance();
    std::string cooked;
    bool subst = false;
    for (;;) {
      if (pos_.offset >= text_.size()) fail(start, "unterminated template literal");
      char c = peek();
      if (c == '`') {
        advance();
        break;
      }
      if (c == '\\') {
        Position at = pos_;
        advance();
        lex_escape(cooked, at);
        continue;
      }
      if (c == '$' && peek(1) == '{') {
        subst = true;
        advance();
        advance();
        skip_substitution(start);
        continue;
      }
      cooked += c;
      advance();
    }
    if (subst) {
      tok.kind = TokenKind::TemplateSubst;
      tok.value.assign(text_, start.offset, pos_.offset - start.offset);
    } else {
      tok.kind = TokenKind::Template;
      tok.value = std::move(cooked);
    }
  }

  // Skips a balanced `${ ... }` body, including nested strings and templates.
  void skip_substitution(Position template_start) {
    int depth = 1;
    while (depth > 0) {
      skip_trivia();
      if (pos_.offset >= text_.size()) fail(template_start, "unterminated template literal");
      char c = peek();
      if (c == '{') {
        ++depth;
        advance();
      } else if (c == '}') {
        --depth;
        advance();
      } else if (c == '"' || c == '\'') {
        std::string ignored;
        lex_string(ignored);
      } else if (c == '`') {
        Token ignored;
        lex_template(ignored);
      } else {
        advance();
      }
    }
  }

  void lex_regex(std::string& out) {
    Position start = pos_;
    std::size_t begin = pos_.offset;
    advance();
    bool in_class = false;
    for (;;) {
      if (pos_.offset >= text_.size() || peek() == '\n') fail(start, "unterminated regular expression");
      char c = peek();
      if (c == '\\') {
        advance();
        if (pos_.offset >= text_.size()) fail(start, "unterminated regular expression");
        advance();
        continue;
      }
      if (c == '[') in_class = true;
      if (c == ']') in_class = false;
      advance();
      if (c == '/' && !in_class) break;
    }
    while (is_ident_part(static_cast<unsigned char>(peek()))) advance();
    out.assign(text_, begin, pos_.offset - begin);
  }

  const SourceFile& file_;
  const std::string& text_;
  Position pos_;
};

} // namespace

bool is_utf8(const std::string& text, std::size_t* bad_offset) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      if (bad_offset) *bad_offset = i;
      return false;
    }
    if (i + len > n) {
      if (bad_offset) *bad_offset = i;
      return false;
    }
    for (std::size_t j = 1; j < len; ++j) {
      unsigned char cc = static_cast<unsigned char>(text[i + j]);
      if ((cc & 0xC0) != 0x80) {
        if (bad_offset) *bad_offset = i;
        return false;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      if (bad_offset) *bad_offset = i;
      return false;
    }
    i += len;
  }
  return true;
}

std::vector<Token> tokenize(const SourceFile& file) { return Lexer(file).run(); }

} // namespace propcheck::detail
