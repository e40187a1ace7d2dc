#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "selfmod/errors.hpp"

namespace selfmod::toml {

// Small TOML subset: table headers, bare (possibly dotted) keys, strings,
// integers, floats, booleans and single-line arrays of scalars. Values are
// stored flat under their full dotted path. Enough for the config files
// this project reads; parse errors carry line and column.
struct Value {
  enum class Kind { integer, floating, boolean, string, array };
  Kind kind = Kind::integer;
  int64_t i = 0;
  double d = 0.0;
  bool b = false;
  std::string s;
  std::vector<Value> array;

  double as_double() const;
  int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  std::string type_name() const;
};

struct Document {
  std::map<std::string, Value> values;  // full dotted path -> value

  bool has(const std::string& path) const { return values.count(path) > 0; }
  const Value& at(const std::string& path) const;

  // All stored paths beginning with "prefix." (or equal to prefix).
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
};

Document parse(const std::string& text);
Document parse_file(const std::string& path);

// Renders a scalar the way the parser would read it back; used by sweeps.
Value parse_scalar(const std::string& text);

}  // namespace selfmod::toml
