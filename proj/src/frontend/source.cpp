#include "propcheck/source.hpp"

#include <fstream>
#include <sstream>

#include "lexer.hpp"
#include "propcheck/error.hpp"

namespace propcheck {

std::string Span::to_string() const {
  return file + ":" + std::to_string(start.line) + ":" + std::to_string(start.column);
}

SourceFile SourceFile::from_string(std::string path, std::string text) {
  if (path.empty()) throw UsageError("source file path must be non-empty");
  std::size_t bad = 0;
  if (!detail::is_utf8(text, &bad)) {
    Position p;
    p.offset = static_cast<std::uint32_t>(bad);
    for (std::size_t i = 0; i < bad; ++i) {
      unsigned char c = static_cast<unsigned char>(text[i]);
      if (c == '\n') {
        ++p.line;
        p.column = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++p.column;
      }
    }
    throw SyntaxError(Span{path, p, p}, "invalid UTF-8");
  }
  return SourceFile{std::move(path), std::move(text)};
}

SourceFile SourceFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return from_string(path.generic_string(), buf.str());
}

SyntaxError::SyntaxError(Span span, const std::string& message)
    : Error(span.to_string() + ": syntax error: " + message), span_(std::move(span)), detail_(message) {}

PathSyntaxError::PathSyntaxError(const std::string& text, std::size_t offset, const std::string& message)
    : Error("malformed access path '" + text + "' at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

FormatError::FormatError(const std::string& source, std::size_t line, const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

} // namespace propcheck
