#include "toml_lite.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fluidex/errors.hpp"

namespace fluidex::app {

double TomlValue::number() const {
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  if (auto p = std::get_if<double>(&v)) return *p;
  throw ConfigError("expected a number");
}

std::int64_t TomlValue::integer() const {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  if (auto p = std::get_if<double>(&v)) {
    if (std::floor(*p) == *p && std::abs(*p) < 9e15) return static_cast<std::int64_t>(*p);
  }
  throw ConfigError("expected an integer");
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  TomlTable run() {
    TomlTable root;
    TomlTable* cur = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        ++i_;
        skip_inline_ws();
        std::vector<std::string> path = parse_key_path(']');
        expect(']');
        end_of_line();
        cur = &open_table(root, path);
        continue;
      }
      std::vector<std::string> path = parse_key_path('=');
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      TomlValue val = parse_value();
      end_of_line();
      TomlTable* t = cur;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) t = &open_table(*t, {path[k]});
      if (t->count(path.back())) fail("duplicate key '" + path.back() + "'");
      (*t)[path.back()] = std::move(val);
    }
    return root;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }

  int line() const {
    int n = 1;
    for (std::size_t k = 0; k < i_ && k < s_.size(); ++k)
      if (s_[k] == '\n') ++n;
    return n;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line()) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++i_;
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++i_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') ++i_;
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::vector<std::string> parse_key_path(char stop) {
    std::vector<std::string> path;
    while (true) {
      skip_inline_ws();
      std::string key;
      if (peek() == '"') {
        key = parse_basic_string();
      } else {
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
          key += s_[i_++];
      }
      if (key.empty()) fail("expected a key");
      path.push_back(key);
      skip_inline_ws();
      if (peek() == '.') {
        ++i_;
        continue;
      }
      if (peek() != stop) fail(std::string("expected '") + stop + "' after key");
      return path;
    }
  }

  static TomlTable& open_table(TomlTable& root, const std::vector<std::string>& path) {
    TomlTable* t = &root;
    for (const auto& k : path) {
      auto it = t->find(k);
      if (it == t->end()) {
        TomlValue v;
        v.v = std::make_shared<TomlTable>();
        it = t->emplace(k, std::move(v)).first;
      }
      if (!it->second.is_table()) throw ConfigError("config: key '" + k + "' is not a table");
      t = std::get<std::shared_ptr<TomlTable>>(it->second.v).get();
    }
    return *t;
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        char e = s_[i_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[i_++];
      if (c == '\'') break;
      out += c;
    }
    return out;
  }

  TomlValue parse_value() {
    TomlValue v;
    char c = peek();
    if (c == '"') {
      v.v = parse_basic_string();
    } else if (c == '\'') {
      v.v = parse_literal_string();
    } else if (c == '[') {
      ++i_;
      auto arr = std::make_shared<TomlArray>();
      while (true) {
        skip_ws_comments_newlines();
        if (peek() == ']') {
          ++i_;
          break;
        }
        arr->push_back(parse_value());
        skip_ws_comments_newlines();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        if (peek() == ']') {
          ++i_;
          break;
        }
        fail("expected ',' or ']' in array");
      }
      v.v = arr;
    } else if (s_.compare(i_, 4, "true") == 0) {
      i_ += 4;
      v.v = true;
    } else if (s_.compare(i_, 5, "false") == 0) {
      i_ += 5;
      v.v = false;
    } else {
      std::string tok;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                        peek() == '.' || peek() == '_'))
        tok += s_[i_++];
      if (tok.empty()) fail("expected a value");
      std::string clean;
      for (char ch : tok)
        if (ch != '_') clean += ch;
      if (clean == "inf" || clean == "+inf" || clean == "-inf" || clean == "nan")
        fail("non-finite numbers are not accepted");
      const bool is_float = clean.find_first_of(".eE") != std::string::npos;
      std::size_t used = 0;
      try {
        if (is_float) {
          v.v = std::stod(clean, &used);
        } else {
          v.v = static_cast<std::int64_t>(std::stoll(clean, &used));
        }
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != clean.size()) fail("malformed value '" + tok + "'");
    }
    return v;
  }
};

}  // namespace

TomlTable parse_toml(const std::string& text) { return Parser(text).run(); }

TomlTable parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

}  // namespace fluidex::app
