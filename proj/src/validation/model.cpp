#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "propcheck/error.hpp"
#include "propcheck/validation.hpp"

namespace propcheck {

namespace {

using nlohmann::json;

bool is_builtin_name(std::string_view name) {
  for (const char* b : kModelBuiltins)
    if (name == b) return true;
  return false;
}

TypeRef ref_from_string(const std::string& s) {
  if (s == "any") return TypeRef::any();
  if (s == "typevar") return TypeRef::type_var();
  if (is_builtin_name(s)) return TypeRef::builtin(s);
  return TypeRef::named(s);
}

// Compact builtin catalogue: "()R" is a method returning R, anything else a
// property of that type.
struct BuiltinEntry {
  const char* type;
  std::vector<std::pair<const char*, const char*>> members;
};

const std::vector<BuiltinEntry>& builtin_catalogue() {
  static const std::vector<BuiltinEntry> entries = {
      {"String",
       {{"length", "Number"},         {"at", "()String"},          {"charAt", "()String"},
        {"charCodeAt", "()Number"},   {"codePointAt", "()Number"}, {"concat", "()String"},
        {"endsWith", "()Boolean"},    {"includes", "()Boolean"},   {"indexOf", "()Number"},
        {"lastIndexOf", "()Number"},  {"localeCompare", "()Number"}, {"match", "()any"},
        {"matchAll", "()any"},        {"normalize", "()String"},   {"padEnd", "()String"},
        {"padStart", "()String"},     {"repeat", "()String"},      {"replace", "()String"},
        {"replaceAll", "()String"},   {"search", "()Number"},      {"slice", "()String"},
        {"split", "()Array"},         {"startsWith", "()Boolean"}, {"substr", "()String"},
        {"substring", "()String"},    {"toLowerCase", "()String"}, {"toUpperCase", "()String"},
        {"toLocaleLowerCase", "()String"}, {"toLocaleUpperCase", "()String"}, {"trim", "()String"},
        {"trimStart", "()String"},    {"trimEnd", "()String"}}},
      {"Number",
       {{"toFixed", "()String"}, {"toPrecision", "()String"}, {"toExponential", "()String"}}},
      {"Boolean", {}},
      {"Promise", {{"then", "()Promise"}, {"catch", "()Promise"}, {"finally", "()Promise"}}},
      {"Array",
       {{"length", "Number"},      {"at", "()typevar"},       {"concat", "()Array"},
        {"copyWithin", "()Array"}, {"entries", "()any"},      {"every", "()Boolean"},
        {"fill", "()Array"},       {"filter", "()Array"},     {"find", "()typevar"},
        {"findIndex", "()Number"}, {"flat", "()Array"},       {"flatMap", "()Array"},
        {"forEach", "()any"},      {"includes", "()Boolean"}, {"indexOf", "()Number"},
        {"join", "()String"},      {"keys", "()any"},         {"lastIndexOf", "()Number"},
        {"map", "()Array"},        {"pop", "()typevar"},      {"push", "()Number"},
        {"reduce", "()typevar"},   {"reduceRight", "()typevar"}, {"reverse", "()Array"},
        {"shift", "()typevar"},    {"slice", "()Array"},      {"some", "()Boolean"},
        {"sort", "()Array"},       {"splice", "()Array"},     {"unshift", "()Number"},
        {"values", "()any"}}},
      {"Buffer",
       {{"length", "Number"},     {"toString", "()String"}, {"toJSON", "()any"},
        {"slice", "()Buffer"},    {"subarray", "()Buffer"}, {"write", "()Number"},
        {"copy", "()Number"},     {"equals", "()Boolean"},  {"compare", "()Number"},
        {"fill", "()Buffer"},     {"indexOf", "()Number"},  {"includes", "()Boolean"},
        {"readUInt8", "()Number"}, {"readInt32LE", "()Number"}, {"writeUInt8", "()Number"}}},
      {"Object",
       {{"toString", "()String"},        {"toLocaleString", "()String"}, {"valueOf", "()any"},
        {"hasOwnProperty", "()Boolean"}, {"isPrototypeOf", "()Boolean"},
        {"propertyIsEnumerable", "()Boolean"}, {"constructor", "any"}}},
      {"Function",
       {{"call", "()typevar"}, {"apply", "()typevar"}, {"bind", "()any"}, {"length", "Number"},
        {"name", "String"}}},
  };
  return entries;
}

class ModelReader {
public:
  ModelReader(ApiModel& model, std::string source) : model_(model), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ModelError(source_ + ": " + msg); }

  std::string fresh_name(const std::string& base) {
    std::string name = base;
    for (int i = 2; model_.types.count(name) || pending_.count(name); ++i) name = base + "#" + std::to_string(i);
    pending_.insert(name);
    return name;
  }

  TypeRef ref(const json& j, const std::string& anon_name, const std::string& where) {
    if (j.is_string()) return ref_from_string(j.get<std::string>());
    if (j.is_object()) {
      std::string name = fresh_name(anon_name);
      TypeDef def = type_def(j, name);
      model_.types[name] = std::move(def);
      return TypeRef::named(name);
    }
    fail(where + ": type reference must be a string or an object");
  }

  TypeDef type_def(const json& j, const std::string& name) {
    if (!j.is_object()) fail("type '" + name + "' must be an object");
    TypeDef def;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "properties") {
        if (!it->is_object()) fail("'" + name + ".properties' must be an object");
        for (auto p = it->begin(); p != it->end(); ++p)
          def.properties[p.key()] = ref(*p, name + "." + p.key(), name + "." + p.key());
      } else if (key == "call") {
        if (!it->is_object()) fail("'" + name + ".call' must be an object");
        Signature sig;
        if (it->contains("params")) {
          const json& params = (*it)["params"];
          if (!params.is_array()) fail("'" + name + ".call.params' must be an array");
          for (std::size_t i = 0; i < params.size(); ++i)
            sig.params.push_back(ref(params[i], name + "(" + std::to_string(i) + ")", name + ".call.params"));
        }
        if (!it->contains("returns")) fail("'" + name + ".call' lacks 'returns'");
        sig.returns = ref((*it)["returns"], name + "()", name + ".call.returns");
        def.call = std::move(sig);
      } else if (key == "construct") {
        def.construct = ref(*it, name + "#new()", name + ".construct");
      } else {
        fail("unknown key '" + key + "' in type '" + name + "'");
      }
    }
    return def;
  }

private:
  ApiModel& model_;
  std::string source_;
  std::set<std::string> pending_;
};

void add_default_builtins(ApiModel& model) {
  for (const auto& entry : builtin_catalogue()) {
    TypeDef& def = model.builtins[entry.type];
    for (const auto& [name, spec] : entry.members) {
      std::string s = spec;
      if (s.rfind("()", 0) == 0) {
        std::string method_type = std::string(entry.type) + "." + name;
        TypeDef m;
        m.call = Signature{{}, ref_from_string(s.substr(2))};
        model.types[method_type] = std::move(m);
        def.properties[name] = TypeRef::named(method_type);
      } else {
        def.properties[name] = ref_from_string(s);
      }
    }
  }
}

void check_ref(const ApiModel& model, const TypeRef& r, const std::string& where) {
  if (r.kind == TypeRef::Kind::Named && !model.types.count(r.name))
    throw ModelError("unknown type '" + r.name + "' referenced from " + where);
  if (r.kind == TypeRef::Kind::Builtin && !model.builtins.count(r.name))
    throw ModelError("missing builtin '" + r.name + "' referenced from " + where);
}

void check_def(const ApiModel& model, const TypeDef& def, const std::string& name) {
  for (const auto& [p, r] : def.properties) check_ref(model, r, name + "." + p);
  if (def.call) {
    for (const auto& r : def.call->params) check_ref(model, r, name + " call parameter");
    check_ref(model, def.call->returns, name + " call result");
  }
  if (def.construct) check_ref(model, *def.construct, name + " construct");
}

} // namespace

std::string to_string(const TypeRef& ref) {
  switch (ref.kind) {
    case TypeRef::Kind::Any: return "any";
    case TypeRef::Kind::TypeVar: return "typevar";
    default: return ref.name;
  }
}

std::string_view to_string(UnresolvedReason reason) {
  switch (reason) {
    case UnresolvedReason::AnyType: return "any-type";
    case UnresolvedReason::TypeVariable: return "type-variable";
    case UnresolvedReason::MissingProperty: return "missing-property";
    case UnresolvedReason::Unresolvable: return "unresolvable";
  }
  return "?";
}

ApiModel ApiModel::with_default_builtins() {
  ApiModel model;
  add_default_builtins(model);
  return model;
}

ApiModel ApiModel::from_json(const std::string& text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(source_name + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ModelError(source_name + ": model must be a JSON object");
  ApiModel model = with_default_builtins();
  ModelReader reader(model, source_name);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "version") {
      if (!it->is_number_integer() || it->get<int>() != 1)
        reader.fail("unsupported model version (expected 1)");
    } else if (key != "modules" && key != "types" && key != "builtins") {
      reader.fail("unknown top-level key '" + key + "'");
    }
  }
  if (doc.contains("types")) {
    const json& types = doc["types"];
    if (!types.is_object()) reader.fail("'types' must be an object");
    for (auto it = types.begin(); it != types.end(); ++it) {
      if (is_builtin_name(it.key()) || it.key() == "any" || it.key() == "typevar")
        reader.fail("type name '" + it.key() + "' is reserved");
      model.types[it.key()] = TypeDef{};
    }
    for (auto it = types.begin(); it != types.end(); ++it) model.types[it.key()] = reader.type_def(*it, it.key());
  }
  if (doc.contains("builtins")) {
    const json& builtins = doc["builtins"];
    if (!builtins.is_object()) reader.fail("'builtins' must be an object");
    for (auto it = builtins.begin(); it != builtins.end(); ++it) {
      if (!is_builtin_name(it.key())) reader.fail("unknown builtin '" + it.key() + "'");
      TypeDef extra = reader.type_def(*it, it.key());
      TypeDef& def = model.builtins[it.key()];
      for (auto& [p, r] : extra.properties) def.properties[p] = r;
      if (extra.call) def.call = extra.call;
      if (extra.construct) def.construct = extra.construct;
    }
  }
  if (doc.contains("modules")) {
    const json& modules = doc["modules"];
    if (!modules.is_object()) reader.fail("'modules' must be an object");
    for (auto it = modules.begin(); it != modules.end(); ++it) {
      if (it.key().empty()) reader.fail("empty module name");
      model.modules[it.key()] = reader.ref(*it, it.key(), "module '" + it.key() + "'");
    }
  }
  model.validate();
  return model;
}

ApiModel ApiModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), path.string());
}

void ApiModel::validate() const {
  for (const char* b : kModelBuiltins)
    if (!builtins.count(b)) throw ModelError(std::string("builtin entry '") + b + "' is missing");
  for (const auto& [m, r] : modules) check_ref(*this, r, "module '" + m + "'");
  for (const auto& [name, def] : types) check_def(*this, def, name);
  for (const auto& [name, def] : builtins) check_def(*this, def, name);
}

const TypeDef* ApiModel::definition(const TypeRef& ref) const {
  if (ref.kind == TypeRef::Kind::Named) {
    auto it = types.find(ref.name);
    return it == types.end() ? nullptr : &it->second;
  }
  if (ref.kind == TypeRef::Kind::Builtin) {
    auto it = builtins.find(ref.name);
    return it == builtins.end() ? nullptr : &it->second;
  }
  return nullptr;
}

std::optional<TypeRef> ApiModel::property(const TypeRef& ref, const std::string& name) const {
  const TypeDef* def = definition(ref);
  if (!def) return std::nullopt;
  if (auto it = def->properties.find(name); it != def->properties.end()) return it->second;
  if (def->call) {
    const TypeDef* fn = definition(TypeRef::builtin("Function"));
    if (fn && fn != def)
      if (auto it = fn->properties.find(name); it != fn->properties.end()) return it->second;
  }
  const TypeDef* obj = definition(TypeRef::builtin("Object"));
  if (obj && obj != def)
    if (auto it = obj->properties.find(name); it != obj->properties.end()) return it->second;
  return std::nullopt;
}

} // namespace propcheck
