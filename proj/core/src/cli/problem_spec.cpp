#include "exitmoment/cli/problem_spec.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "exitmoment/expr/parser.hpp"

namespace exitmoment::cli {

SpecError::SpecError(const std::string& source, int line, int column, const std::string& detail)
    : Error("cli", source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + detail),
      line_(line),
      column_(column) {}

namespace {

struct Value {
  enum class Kind { kString, kNumber, kWord, kRange, kArray };
  Kind kind = Kind::kWord;
  std::string text;  // string contents, number/word spelling, or "a..b"
  std::vector<Value> items;
  int line = 0;
  int column = 0;
};

struct Entry {
  Value value;
  int line = 0;
  int column = 0;
};

class Reader {
 public:
  Reader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  std::map<std::string, std::map<std::string, Entry>> parse(std::vector<std::string>* order) {
    std::map<std::string, std::map<std::string, Entry>> out;
    std::string section;
    bool any = false;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      any = true;
      if (peek() == '[') {
        const int l = line_, c = col_;
        get();
        std::string name = identifier();
        if (name.empty()) fail(l, c, "expected a section name");
        expect(']');
        end_of_line();
        if (!kSections.count(name)) fail(l, c, "unknown section [" + name + "]");
        if (out.count(name)) fail(l, c, "duplicate section [" + name + "]");
        out[name];
        section = name;
        order->push_back(name);
        continue;
      }
      const int l = line_, c = col_;
      std::string key = identifier();
      if (key.empty()) fail(l, c, std::string("unexpected character '") + peek() + "'");
      skip_spaces();
      expect('=');
      skip_spaces();
      Entry e{value(), l, c};
      end_of_line();
      auto& sec = out[section];
      if (sec.count(key)) fail(l, c, "duplicate key '" + key + "'");
      sec[key] = std::move(e);
    }
    if (!any) fail(1, 1, "empty problem file");
    return out;
  }

  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    throw SpecError(source_, line, col, msg);
  }

 private:
  inline static const std::set<std::string> kSections = {"state", "dynamics", "safe_set", "solve", "mc"};

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  char get() {
    const char ch = text_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }
  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') get();
  }
  void skip_blank_lines() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }
  // Inside arrays newlines and comments are whitespace.
  void skip_array_space() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail(line_, col_, std::string("unexpected '") + peek() + "' after value");
    get();
  }
  void expect(char ch) {
    if (peek() != ch) {
      fail(line_, col_, std::string("expected '") + ch + "'" + (eof() ? " before end of file" : ""));
    }
    get();
  }
  std::string identifier() {
    std::string s;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) s += get();
    return s;
  }

  Value value() {
    Value v;
    v.line = line_;
    v.column = col_;
    const char ch = peek();
    if (ch == '"') {
      get();
      v.kind = Value::Kind::kString;
      while (true) {
        if (eof() || peek() == '\n') fail(v.line, v.column, "unterminated string");
        const char c = get();
        if (c == '"') break;
        v.text += c;
      }
      return v;
    }
    if (ch == '[') {
      get();
      v.kind = Value::Kind::kArray;
      skip_array_space();
      if (peek() == ']') {
        get();
        return v;
      }
      while (true) {
        skip_array_space();
        v.items.push_back(value());
        skip_array_space();
        if (peek() == ',') {
          get();
          skip_array_space();
          if (peek() == ']') {
            get();
            return v;
          }
          continue;
        }
        if (peek() == ']') {
          get();
          return v;
        }
        fail(line_, col_, eof() ? "unterminated array" : "expected ',' or ']' in array");
      }
    }
    std::string word;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || std::string("+-._").find(peek()) != std::string::npos)) {
      word += get();
    }
    if (word.empty()) fail(v.line, v.column, eof() ? "missing value" : std::string("unexpected '") + ch + "'");
    v.text = word;
    if (word.find("..") != std::string::npos) {
      v.kind = Value::Kind::kRange;
    } else if (std::isdigit(static_cast<unsigned char>(word[0])) || word[0] == '-' || word[0] == '+' || word[0] == '.') {
      v.kind = Value::Kind::kNumber;
    } else {
      v.kind = Value::Kind::kWord;
    }
    return v;
  }

  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Binder {
 public:
  Binder(const Reader& reader, std::map<std::string, Entry>* section, std::string name)
      : reader_(reader), section_(section), name_(std::move(name)) {}

  const Entry* find(const std::string& key) {
    if (!section_) return nullptr;
    auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  const Entry& require(const std::string& key, int line) {
    const Entry* e = find(key);
    if (!e) reader_.fail(line, 1, "missing key '" + key + "' in [" + name_ + "]");
    return *e;
  }
  void check_unused() const {
    if (!section_) return;
    for (const auto& [key, e] : *section_) {
      if (!used_.count(key)) reader_.fail(e.line, e.column, "unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  [[noreturn]] void fail(const Value& v, const std::string& msg) const { reader_.fail(v.line, v.column, msg); }

  std::string string(const Value& v) const {
    if (v.kind != Value::Kind::kString) fail(v, "expected a quoted string");
    return v.text;
  }
  std::string word(const Value& v) const {
    if (v.kind != Value::Kind::kWord && v.kind != Value::Kind::kString) fail(v, "expected a word");
    return v.text;
  }
  bool boolean(const Value& v) const {
    if (v.kind == Value::Kind::kWord && v.text == "true") return true;
    if (v.kind == Value::Kind::kWord && v.text == "false") return false;
    fail(v, "expected true or false");
  }
  double number(const Value& v) const {
    if (v.kind != Value::Kind::kNumber) fail(v, "expected a number");
    try {
      return expr::to_double(expr::parse_rational(v.text));
    } catch (const Error&) {
      fail(v, "malformed number '" + v.text + "'");
    }
  }
  template <typename Int>
  Int integer(const Value& v) const {
    const double d = number(v);
    if (d != static_cast<double>(static_cast<Int>(d))) fail(v, "expected an integer");
    return static_cast<Int>(d);
  }
  /// Number or quoted constant expression, exactly.
  expr::Rational rational(const Value& v) const {
    if (v.kind == Value::Kind::kNumber) {
      try {
        return expr::parse_rational(v.text);
      } catch (const Error&) {
        fail(v, "malformed number '" + v.text + "'");
      }
    }
    if (v.kind == Value::Kind::kString) {
      try {
        const expr::Polynomial p = expr::parse_polynomial(v.text, {});
        return p.coefficient(expr::MultiIndex(std::size_t{0}));
      } catch (const expr::ParseError& e) {
        reader_.fail(v.line, v.column + 1 + std::max(0, e.column() - 1), e.detail());
      }
    }
    fail(v, "expected a number or a quoted constant expression");
  }
  std::vector<Value> array(const Value& v) const {
    if (v.kind != Value::Kind::kArray) return {v};
    return v.items;
  }
  std::vector<int> int_list(const Value& v) const {
    if (v.kind == Value::Kind::kRange) {
      try {
        return parse_int_list(v.text);
      } catch (const Error& e) {
        fail(v, "malformed range '" + v.text + "'");
      }
    }
    std::vector<int> out;
    for (const auto& item : array(v)) {
      if (item.kind == Value::Kind::kRange) {
        for (int k : int_list(item)) out.push_back(k);
      } else {
        out.push_back(integer<int>(item));
      }
    }
    if (out.empty()) fail(v, "expected at least one integer");
    return out;
  }

 private:
  const Reader& reader_;
  std::map<std::string, Entry>* section_;
  std::string name_;
  std::set<std::string> used_;
};

// Re-raise an expression error at its position inside the file.
void check_expression(const Reader& reader, const Value& v, const std::vector<std::string>& names) {
  try {
    expr::parse_expression(v.text, names);
  } catch (const expr::ParseError& e) {
    reader.fail(v.line, v.column + 1 + std::max(0, e.column() - 1), e.detail());
  }
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw Error("cli", "malformed integer list '" + text + "'");
    }
    if (used != s.size()) throw Error("cli", "malformed integer list '" + text + "'");
    return v;
  };
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(part));
      continue;
    }
    const int a = to_int(part.substr(0, dots)), b = to_int(part.substr(dots + 2));
    if (b < a) throw Error("cli", "empty range '" + part + "'");
    for (int k = a; k <= b; ++k) out.push_back(k);
  }
  if (out.empty()) throw Error("cli", "empty integer list");
  return out;
}

ProblemSpec parse_spec_text(const std::string& text, const std::string& source) {
  Reader reader(text, source);
  std::vector<std::string> order;
  auto doc = reader.parse(&order);
  ProblemSpec spec;
  spec.source = source;

  auto section = [&](const std::string& name) -> std::map<std::string, Entry>* {
    auto it = doc.find(name);
    return it == doc.end() ? nullptr : &it->second;
  };
  {
    Binder top(reader, section(""), "top level");
    if (const Entry* e = top.find("name")) spec.name = top.string(e->value);
    top.check_unused();
  }
  if (!section("state")) reader.fail(1, 1, "missing section [state]");
  auto first_line = [&](const std::string& name) {
    int line = 1 << 30;
    for (const auto& [k, e] : *section(name)) line = std::min(line, e.line);
    return line == (1 << 30) ? 1 : line;
  };

  std::vector<std::string> names;
  {
    Binder b(reader, section("state"), "state");
    const Entry& vars = b.require("variables", first_line("state"));
    for (const auto& v : b.array(vars.value)) {
      const std::string n = b.string(v);
      if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_')) b.fail(v, "invalid variable name '" + n + "'");
      for (char c : n)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) b.fail(v, "invalid variable name '" + n + "'");
      if (n == "t") b.fail(v, "'t' is reserved for time");
      if (n == "sin" || n == "cos") b.fail(v, "'" + n + "' is reserved");
      for (const auto& seen : spec.state)
        if (seen == n) b.fail(v, "duplicate variable '" + n + "'");
      spec.state.push_back(n);
    }
    if (spec.state.empty()) b.fail(vars.value, "at least one state variable is required");
    const Entry& x0 = b.require("x0", first_line("state"));
    const auto items = b.array(x0.value);
    if (items.size() != spec.state.size()) b.fail(x0.value, "x0 has " + std::to_string(items.size()) + " entries for " + std::to_string(spec.state.size()) + " variables");
    for (const auto& v : items) {
      spec.x0_text.push_back(v.text);
      spec.x0.push_back(expr::to_double(b.rational(v)));
    }
    b.check_unused();
  }
  names = spec.state;
  names.push_back("t");
  if (section("dynamics")) {
    Binder b(reader, section("dynamics"), "dynamics");
    const Entry& drift = b.require("drift", first_line("dynamics"));
    const auto items = b.array(drift.value);
    if (items.size() != spec.state.size()) b.fail(drift.value, "drift has " + std::to_string(items.size()) + " entries for " + std::to_string(spec.state.size()) + " variables");
    for (const auto& v : items) {
      spec.drift.push_back(b.string(v));
      check_expression(reader, v, names);
    }
    const Entry& diff = b.require("diffusion", first_line("dynamics"));
    const auto rows = b.array(diff.value);
    if (rows.size() != spec.state.size()) b.fail(diff.value, "diffusion needs one row per state variable");
    std::size_t width = 0;
    for (const auto& row : rows) {
      if (row.kind != Value::Kind::kArray) b.fail(row, "diffusion rows must be arrays");
      std::vector<std::string> r;
      for (const auto& v : row.items) {
        r.push_back(b.string(v));
        check_expression(reader, v, names);
      }
      if (r.empty()) b.fail(row, "empty diffusion row");
      if (width && r.size() != width) b.fail(row, "diffusion rows have different lengths");
      width = r.size();
      spec.diffusion.push_back(std::move(r));
    }
    const Entry& horizon = b.require("horizon", first_line("dynamics"));
    spec.horizon = b.rational(horizon.value);
    if (spec.horizon <= 0) b.fail(horizon.value, "horizon must be positive");
    b.check_unused();
  }
  if (section("safe_set")) {
    Binder b(reader, section("safe_set"), "safe_set");
    const Entry& polys = b.require("polys", first_line("safe_set"));
    for (const auto& v : b.array(polys.value)) {
      spec.safe_set.push_back(b.string(v));
      try {
        expr::parse_polynomial(v.text, names);
      } catch (const expr::ParseError& e) {
        reader.fail(v.line, v.column + 1 + std::max(0, e.column() - 1), e.detail());
      } catch (const Error& e) {
        b.fail(v, "safe-set entries must be polynomials: " + std::string(e.what()));
      }
    }
    if (spec.safe_set.empty()) b.fail(polys.value, "at least one safe-set polynomial is required");
    b.check_unused();
  }
  for (const char* required : {"dynamics", "safe_set"}) {
    if (!section(required)) reader.fail(1, 1, std::string("missing section [") + required + "]");
  }
  if (section("solve")) {
    Binder b(reader, section("solve"), "solve");
    auto& plan = spec.solve;
    if (const Entry* e = b.find("K")) plan.K = b.int_list(e->value);
    if (const Entry* e = b.find("orders")) plan.orders = b.int_list(e->value);
    if (const Entry* e = b.find("variants")) {
      plan.variants.clear();
      for (const auto& v : b.array(e->value)) {
        try {
          plan.variants.push_back(moment::parse_variant(b.word(v)));
        } catch (const Error&) {
          b.fail(v, "unknown variant '" + v.text + "' (expected original or reduced)");
        }
      }
    }
    if (const Entry* e = b.find("time_scale")) plan.time_scale = b.rational(e->value);
    if (plan.time_scale <= 0) reader.fail(1, 1, "time_scale must be positive");
    if (const Entry* e = b.find("scaling")) plan.scale_state = b.boolean(e->value);
    if (const Entry* e = b.find("widths")) {
      for (const auto& pair : b.array(e->value)) {
        if (pair.kind != Value::Kind::kArray || pair.items.size() != 2) {
          b.fail(pair, "widths entries must be [\"variable\", width] pairs");
        }
        const std::string var = b.string(pair.items[0]);
        if (std::find(spec.state.begin(), spec.state.end(), var) == spec.state.end()) {
          b.fail(pair.items[0], "unknown state variable '" + var + "'");
        }
        const expr::Rational w = b.rational(pair.items[1]);
        if (w <= 0) b.fail(pair.items[1], "widths must be positive");
        plan.widths[var] = w;
      }
    }
    if (const Entry* e = b.find("max_iters")) plan.settings.max_iters = b.integer<int>(e->value);
    if (const Entry* e = b.find("eps_abs")) plan.settings.eps_abs = b.number(e->value);
    if (const Entry* e = b.find("eps_rel")) plan.settings.eps_rel = b.number(e->value);
    if (const Entry* e = b.find("rho")) plan.settings.rho = b.number(e->value);
    if (const Entry* e = b.find("alpha")) plan.settings.alpha = b.number(e->value);
    if (const Entry* e = b.find("time_limit")) plan.settings.time_limit = b.number(e->value);
    for (int k : plan.K)
      if (k < 1) reader.fail(b.find("K")->line, 1, "K must be positive");
    for (int n : plan.orders)
      if (n < 1) reader.fail(b.find("orders")->line, 1, "moment orders must be positive");
    try {
      plan.settings.validate();
    } catch (const Error& e) {
      reader.fail(first_line("solve"), 1, e.what());
    }
    b.check_unused();
  }
  if (section("mc")) {
    Binder b(reader, section("mc"), "mc");
    auto& c = spec.mc.config;
    if (const Entry* e = b.find("dt")) c.dt = b.number(e->value);
    if (const Entry* e = b.find("paths")) c.paths = b.integer<std::int64_t>(e->value);
    if (const Entry* e = b.find("seed")) c.seed = b.integer<std::uint64_t>(e->value);
    if (const Entry* e = b.find("max_order")) c.max_moment_order = b.integer<int>(e->value);
    if (const Entry* e = b.find("bridge")) c.bridge_correction = b.boolean(e->value);
    try {
      c.validate(spec.horizon.get_d());
    } catch (const Error& e) {
      reader.fail(first_line("mc"), 1, e.what());
    }
    b.check_unused();
  }
  // Shape and alphabet checks of the assembled model.
  try {
    spec.model();
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    reader.fail(1, 1, e.what());
  }
  return spec;
}

ProblemSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cli", "cannot open problem file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ProblemSpec spec = parse_spec_text(ss.str(), path);
  if (spec.name.empty()) {
    std::string base = path.substr(path.find_last_of('/') + 1);
    spec.name = base.substr(0, base.find('.'));
  }
  return spec;
}

augment::SdeModel ProblemSpec::model() const {
  augment::SdeModel m = augment::make_model(state, drift, diffusion, x0, horizon, safe_set);
  return m;
}

}  // namespace exitmoment::cli
