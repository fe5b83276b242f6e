#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "propcheck/miner.hpp"

namespace propcheck {

// ---- API model -------------------------------------------------------------

struct TypeRef {
  enum class Kind : std::uint8_t { Named, Any, TypeVar, Builtin };
  Kind kind = Kind::Any;
  std::string name; // type name for Named, builtin name for Builtin

  static TypeRef named(std::string name) { return TypeRef{Kind::Named, std::move(name)}; }
  static TypeRef any() { return TypeRef{Kind::Any, {}}; }
  static TypeRef type_var() { return TypeRef{Kind::TypeVar, {}}; }
  static TypeRef builtin(std::string name) { return TypeRef{Kind::Builtin, std::move(name)}; }

  friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

std::string to_string(const TypeRef& ref);

struct Signature {
  std::vector<TypeRef> params;
  TypeRef returns;
};

struct TypeDef {
  std::map<std::string, TypeRef> properties;
  std::optional<Signature> call;
  std::optional<TypeRef> construct; // instance type
};

// Builtin names usable as TypeRefs. "Function" is internal: it supplies
// call/apply/bind for types with a call signature.
inline constexpr const char* kModelBuiltins[] = {"String", "Number", "Boolean", "Promise",
                                                 "Array",  "Buffer", "Object",  "Function"};

class ApiModel {
public:
  std::map<std::string, TypeRef> modules;
  std::map<std::string, TypeDef> types;
  std::map<std::string, TypeDef> builtins;

  // JSON document; see README for the schema. Throws ModelError.
  static ApiModel from_json(const std::string& text, const std::string& source_name);
  static ApiModel load(const std::filesystem::path& path);
  // Model with only the embedded builtins.
  static ApiModel with_default_builtins();

  // Throws ModelError when a Named target is missing or a builtin is absent.
  void validate() const;

  const TypeDef* definition(const TypeRef& ref) const;
  // Own properties, then Function members for callable types, then Object.
  std::optional<TypeRef> property(const TypeRef& ref, const std::string& name) const;
};

enum class UnresolvedReason : std::uint8_t { AnyType, TypeVariable, MissingProperty, Unresolvable };

std::string_view to_string(UnresolvedReason reason);

struct Resolution {
  std::optional<TypeRef> type;
  UnresolvedReason reason = UnresolvedReason::Unresolvable;

  bool ok() const { return type.has_value(); }
};

Resolution resolve(const AccessPath& path, const ApiModel& model);

// ---- labels ----------------------------------------------------------------

enum class LabelKind : std::uint8_t { Correct, Incorrect, Unclassified };

struct Label {
  LabelKind kind = LabelKind::Unclassified;
  UnresolvedReason reason = UnresolvedReason::Unresolvable; // Unclassified only

  friend bool operator==(const Label&, const Label&) = default;
};

Label label_pair(const PairKey& key, const ApiModel& model);

// Correct/Incorrect labels only.
using LabelSet = std::map<PairKey, LabelKind>;

struct RootSummary {
  std::string root; // module name or builtin name
  std::uint64_t pairs = 0;
  std::uint64_t correct = 0;
  std::uint64_t incorrect = 0;
  std::map<UnresolvedReason, std::uint64_t> unclassified;
};

struct ValidationSet {
  LabelSet labels;
  std::vector<RootSummary> summary; // sorted by root
};

ValidationSet build_validation_set(const CountTable& table, const ApiModel& model);
void write_summary(const std::vector<RootSummary>& summary, std::ostream& out);

void save_labels(const LabelSet& labels, std::ostream& out);
LabelSet load_labels(std::istream& in, const std::string& source_name);
void save_labels_file(const LabelSet& labels, const std::filesystem::path& path);
LabelSet load_labels_file(const std::filesystem::path& path);

// ---- metrics ---------------------------------------------------------------

// Exact non-negative fraction; undefined when den == 0.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  bool defined() const { return den != 0; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // Compares defined ratios by value.
  friend bool less(const Ratio& a, const Ratio& b);
  friend bool same_value(const Ratio& a, const Ratio& b);
};

enum class Classification : std::uint8_t { Expected, Anomalous, Unknown };

std::string_view to_string(Classification c);

struct Metrics {
  Ratio precision;
  Ratio recall;
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0; // Anomalous and Correct
  std::uint64_t false_negatives = 0; // Incorrect and not Anomalous
};

Metrics precision_recall(const std::map<PairKey, Classification>& classified, const LabelSet& labels);

} // namespace propcheck
