#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>

namespace propcheck {

struct Position {
  std::uint32_t line = 1;   // 1-based
  std::uint32_t column = 1; // 1-based, counted in code points
  std::uint32_t offset = 0; // byte offset into the file text

  friend bool operator==(const Position& a, const Position& b) { return a.offset == b.offset; }
  friend auto operator<=>(const Position& a, const Position& b) { return a.offset <=> b.offset; }
};

// Half-open source range: `end` is the position just past the last character.
struct Span {
  std::string file;
  Position start;
  Position end;

  std::string to_string() const; // file:line:col
};

struct SourceFile {
  std::string path;
  std::string text;

  // Throws SyntaxError when text is not valid UTF-8, UsageError on empty path.
  static SourceFile from_string(std::string path, std::string text);
  // Throws IoError when the file cannot be read.
  static SourceFile load(const std::filesystem::path& path);
};

} // namespace propcheck
