#pragma once

#include <string>
#include <vector>

#include "propcheck/source.hpp"

namespace propcheck::detail {

enum class TokenKind {
  Identifier, // includes keywords; the parser decides by text
  Punctuator,
  String,
  Number,
  Template,  // no-substitution template: `value` holds the cooked text
  TemplateSubst, // template with ${...}; value is the raw source
  RegExp,
  PrivateName, // #name inside classes
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string value; // identifier name, punctuator text, decoded string, raw number
  Position start;
  Position end;
  bool newline_before = false;
};

// Tokenizes the whole file eagerly. Regular-expression literals are told
// apart from division by the previous significant token.
std::vector<Token> tokenize(const SourceFile& file);

bool is_utf8(const std::string& text, std::size_t* bad_offset = nullptr);

} // namespace propcheck::detail
