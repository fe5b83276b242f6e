#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "propcheck/source.hpp"

namespace propcheck {

// Root of the library's exception hierarchy. The C API maps each subclass to
// a distinct status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(Span span, const std::string& message);
  const Span& span() const noexcept { return span_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  Span span_;
  std::string detail_;
};

class PathSyntaxError : public Error {
public:
  PathSyntaxError(const std::string& text, std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class FormatError : public Error {
public:
  FormatError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class ModelError : public Error {
public:
  using Error::Error;
};

class EmptyLabelSet : public Error {
public:
  EmptyLabelSet() : Error("label set contains no incorrect pairs; precision/recall undefined") {}
};

class UsageError : public Error {
public:
  using Error::Error;
};

} // namespace propcheck
