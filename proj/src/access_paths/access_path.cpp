#include "propcheck/access_path.hpp"

#include <array>

#include "propcheck/error.hpp"

namespace propcheck {

namespace {

constexpr std::array<std::string_view, 5> kBuiltinNames = {"String", "Number", "Boolean", "Promise",
                                                           "Array"};

void quote(std::string& out, std::string_view s) {
  out += '\'';
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c; break;
    }
  }
  out += '\'';
}

class PathParser {
public:
  explicit PathParser(std::string_view text) : text_(text) {}

  AccessPath run() {
    AccessPath path;
    if (text_.substr(0, 8) == "require(") {
      pos_ = 8;
      std::string module = quoted();
      expect(')');
      if (module.empty()) fail("empty module name");
      path.root = Root::require(std::move(module));
    } else {
      std::size_t end = pos_;
      while (end < text_.size() && text_[end] != '.' && text_[end] != '(' && text_[end] != '[' &&
             text_[end] != '#')
        ++end;
      auto kind = builtin_from_string(text_.substr(0, end));
      if (!kind) fail("unknown root");
      pos_ = end;
      path.root = Root::of(*kind);
    }
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '.') {
        ++pos_;
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_plain_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected property name");
        path.steps.push_back(Step::prop(std::string(text_.substr(start, pos_ - start))));
      } else if (c == '[') {
        ++pos_;
        std::string name = quoted();
        expect(']');
        if (name.empty()) fail("empty property name");
        if (is_plain_name(name)) fail("non-canonical bracket property");
        path.steps.push_back(Step::prop(std::move(name)));
      } else if (c == '(') {
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == ')') {
          ++pos_;
          path.steps.push_back(Step::call());
          continue;
        }
        std::size_t start = pos_;
        std::uint64_t value = 0;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
          value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
          if (value > UINT32_MAX) fail("argument index too large");
          ++pos_;
        }
        if (pos_ == start) fail("expected argument index or ')'");
        if (pos_ - start > 1 && text_[start] == '0') fail("leading zero in argument index");
        expect(')');
        path.steps.push_back(Step::arg(static_cast<std::uint32_t>(value)));
      } else if (text_.substr(pos_, 6) == "#new()") {
        pos_ += 6;
        path.steps.push_back(Step::construct());
      } else {
        fail("unexpected character");
      }
    }
    return path;
  }

private:
  static bool is_plain_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '$';
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw PathSyntaxError(std::string(text_), pos_, msg);
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string quoted() {
    expect('\'');
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated quoted name");
      char c = text_[pos_++];
      if (c == '\'') return out;
      if (c == '\t' || c == '\n' || c == '\r') fail("raw control character in quoted name");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("dangling escape");
      char e = text_[pos_++];
      switch (e) {
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        default: fail("unknown escape");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

std::string_view to_string(BuiltinKind kind) { return kBuiltinNames[static_cast<std::size_t>(kind)]; }

std::optional<BuiltinKind> builtin_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kBuiltinNames.size(); ++i)
    if (kBuiltinNames[i] == name) return static_cast<BuiltinKind>(i);
  return std::nullopt;
}

Root Root::require(std::string module) {
  Root r;
  r.kind = Kind::Require;
  r.module = std::move(module);
  return r;
}

Root Root::of(BuiltinKind kind) {
  Root r;
  r.kind = Kind::Builtin;
  r.builtin = kind;
  return r;
}

Step Step::prop(std::string name) {
  Step s;
  s.kind = Kind::Prop;
  s.name = std::move(name);
  return s;
}

Step Step::call() { return Step{}; }

Step Step::arg(std::uint32_t index) {
  Step s;
  s.kind = Kind::Arg;
  s.index = index;
  return s;
}

Step Step::construct() {
  Step s;
  s.kind = Kind::New;
  return s;
}

AccessPath AccessPath::extended(Step step) const {
  AccessPath p = *this;
  p.steps.push_back(std::move(step));
  return p;
}

bool is_plain_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
          c == '$'))
      return false;
  return true;
}

std::string render(const AccessPath& path) {
  std::string out;
  if (path.root.kind == Root::Kind::Require) {
    out += "require(";
    quote(out, path.root.module);
    out += ')';
  } else {
    out += to_string(path.root.builtin);
  }
  for (const Step& s : path.steps) {
    switch (s.kind) {
      case Step::Kind::Prop:
        if (is_plain_name(s.name)) {
          out += '.';
          out += s.name;
        } else {
          out += '[';
          quote(out, s.name);
          out += ']';
        }
        break;
      case Step::Kind::Call: out += "()"; break;
      case Step::Kind::Arg: out += "(" + std::to_string(s.index) + ")"; break;
      case Step::Kind::New: out += "#new()"; break;
    }
  }
  return out;
}

AccessPath parse_path(std::string_view text) { return PathParser(text).run(); }

} // namespace propcheck
