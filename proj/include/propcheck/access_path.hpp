#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace propcheck {

enum class BuiltinKind : std::uint8_t { String, Number, Boolean, Promise, Array };

std::string_view to_string(BuiltinKind kind);
std::optional<BuiltinKind> builtin_from_string(std::string_view name);

struct Root {
  enum class Kind : std::uint8_t { Require, Builtin };
  Kind kind = Kind::Require;
  std::string module;                      // Require only
  BuiltinKind builtin = BuiltinKind::String; // Builtin only

  static Root require(std::string module);
  static Root of(BuiltinKind kind);

  friend bool operator==(const Root&, const Root&) = default;
  friend auto operator<=>(const Root&, const Root&) = default;
};

struct Step {
  enum class Kind : std::uint8_t { Prop, Call, Arg, New };
  Kind kind = Kind::Call;
  std::string name;        // Prop only
  std::uint32_t index = 0; // Arg only

  static Step prop(std::string name);
  static Step call();
  static Step arg(std::uint32_t index);
  static Step construct();

  friend bool operator==(const Step&, const Step&) = default;
  friend auto operator<=>(const Step&, const Step&) = default;
};

struct AccessPath {
  Root root;
  std::vector<Step> steps;

  AccessPath extended(Step step) const;

  friend bool operator==(const AccessPath&, const AccessPath&) = default;
  friend auto operator<=>(const AccessPath&, const AccessPath&) = default;
};

// Canonical text: require('m') or a builtin name, then .f, (), (i), #new().
// Property names outside [A-Za-z0-9_$] are written ['...'] with \\ \' \t \n \r
// escapes so the form stays injective and tab-free.
std::string render(const AccessPath& path);

// Inverse of render; accepts only canonical text. Throws PathSyntaxError.
AccessPath parse_path(std::string_view text);

// True for names rendered in dot form.
bool is_plain_name(std::string_view name);

} // namespace propcheck
