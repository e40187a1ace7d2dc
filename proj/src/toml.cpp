#include "selfmod/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace selfmod::toml {

namespace {

[[noreturn]] void fail(int line, int col, const std::string& what) {
  throw Error(Errc::parse, "line " + std::to_string(line) + ", column " +
                               std::to_string(col) + ": " + what);
}

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) take();
  }
  void skip_to_eol() {
    while (!eof() && peek() != '\n') take();
  }
};

bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string read_bare_key(Cursor& c) {
  std::string out;
  while (!c.eof() && is_bare_char(c.peek())) out.push_back(c.take());
  if (out.empty()) fail(c.line, c.col, "expected a key");
  return out;
}

std::string read_dotted_key(Cursor& c) {
  std::string key = read_bare_key(c);
  while (!c.eof() && c.peek() == '.') {
    c.take();
    key += '.';
    key += read_bare_key(c);
  }
  return key;
}

std::string read_string(Cursor& c) {
  int line = c.line, col = c.col;
  c.take();  // opening quote
  std::string out;
  while (true) {
    if (c.eof() || c.peek() == '\n') fail(line, col, "unterminated string");
    char ch = c.take();
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.eof()) fail(line, col, "unterminated string escape");
      char esc = c.take();
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail(c.line, c.col, std::string("unknown escape '\\") + esc + "'");
      }
    } else {
      out.push_back(ch);
    }
  }
}

Value read_number_or_bool(Cursor& c) {
  int line = c.line, col = c.col;
  std::string tok;
  while (!c.eof() && (is_bare_char(c.peek()) || c.peek() == '+' ||
                      c.peek() == '-' || c.peek() == '.')) {
    tok.push_back(c.take());
  }
  if (tok.empty()) fail(line, col, "expected a value");

  Value v;
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::boolean;
    v.b = (tok == "true");
    return v;
  }
  bool looks_float = tok.find('.') != std::string::npos ||
                     tok.find('e') != std::string::npos ||
                     tok.find('E') != std::string::npos;
  if (!looks_float) {
    int64_t out = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec == std::errc() && p == tok.data() + tok.size()) {
      v.kind = Value::Kind::integer;
      v.i = out;
      return v;
    }
  }
  {
    double out = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec == std::errc() && p == tok.data() + tok.size()) {
      v.kind = Value::Kind::floating;
      v.d = out;
      return v;
    }
  }
  fail(line, col, "cannot parse value '" + tok + "'");
}

Value read_value(Cursor& c);

Value read_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::array;
  c.take();  // '['
  c.skip_ws();
  if (!c.eof() && c.peek() == ']') {
    c.take();
    return v;
  }
  while (true) {
    c.skip_ws();
    v.array.push_back(read_value(c));
    c.skip_ws();
    if (c.eof() || c.peek() == '\n') fail(c.line, c.col, "unterminated array");
    char ch = c.take();
    if (ch == ']') return v;
    if (ch != ',') fail(c.line, c.col, "expected ',' or ']' in array");
  }
}

Value read_value(Cursor& c) {
  if (c.eof()) fail(c.line, c.col, "expected a value");
  char ch = c.peek();
  if (ch == '"') {
    Value v;
    v.kind = Value::Kind::string;
    v.s = read_string(c);
    return v;
  }
  if (ch == '[') return read_array(c);
  return read_number_or_bool(c);
}

}  // namespace

double Value::as_double() const {
  if (kind == Kind::floating) return d;
  if (kind == Kind::integer) return static_cast<double>(i);
  throw Error(Errc::config, "expected a number, got " + type_name());
}

int64_t Value::as_int() const {
  if (kind == Kind::integer) return i;
  throw Error(Errc::config, "expected an integer, got " + type_name());
}

bool Value::as_bool() const {
  if (kind == Kind::boolean) return b;
  throw Error(Errc::config, "expected a boolean, got " + type_name());
}

const std::string& Value::as_string() const {
  if (kind == Kind::string) return s;
  throw Error(Errc::config, "expected a string, got " + type_name());
}

std::string Value::type_name() const {
  switch (kind) {
    case Kind::integer: return "integer";
    case Kind::floating: return "float";
    case Kind::boolean: return "boolean";
    case Kind::string: return "string";
    case Kind::array: return "array";
  }
  return "unknown";
}

const Value& Document::at(const std::string& path) const {
  auto it = values.find(path);
  if (it == values.end()) {
    throw Error(Errc::config, "missing config key '" + path + "'");
  }
  return it->second;
}

std::vector<std::string> Document::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values) {
    (void)v;
    if (k == prefix ||
        (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0 &&
         k[prefix.size()] == '.')) {
      out.push_back(k);
    }
  }
  return out;
}

Document parse(const std::string& text) {
  Document doc;
  Cursor c{text};
  std::string table;

  while (!c.eof()) {
    c.skip_ws();
    if (c.eof()) break;
    char ch = c.peek();
    if (ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '#') {
      c.skip_to_eol();
      continue;
    }
    if (ch == '[') {
      int line = c.line, col = c.col;
      c.take();
      c.skip_ws();
      table = read_dotted_key(c);
      c.skip_ws();
      if (c.eof() || c.take() != ']') fail(line, col, "unterminated table header");
    } else {
      int line = c.line, col = c.col;
      std::string key = read_dotted_key(c);
      c.skip_ws();
      if (c.eof() || c.take() != '=') fail(line, col, "expected '=' after key");
      c.skip_ws();
      Value v = read_value(c);
      std::string path = table.empty() ? key : table + "." + key;
      if (doc.values.count(path)) {
        fail(line, col, "duplicate key '" + path + "'");
      }
      doc.values.emplace(std::move(path), std::move(v));
    }
    // Only whitespace or a comment may follow on the line.
    c.skip_ws();
    if (!c.eof() && c.peek() == '#') c.skip_to_eol();
    if (!c.eof() && c.peek() != '\n') {
      fail(c.line, c.col, "unexpected trailing characters");
    }
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io, "cannot open config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Value parse_scalar(const std::string& text) {
  Cursor c{text};
  c.skip_ws();
  Value v = read_value(c);
  c.skip_ws();
  if (!c.eof()) fail(c.line, c.col, "trailing characters after value");
  return v;
}

}  // namespace selfmod::toml
