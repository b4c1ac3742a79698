#include "blochball/mapfile.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace blochball::mapio {

namespace {

bool parse_complex(const std::string& w, cplx& out) {
  if (w.empty()) return false;
  if (w == "i" || w == "+i") {
    out = {0.0, 1.0};
    return true;
  }
  if (w == "-i") {
    out = {0.0, -1.0};
    return true;
  }
  const char* s = w.c_str();
  char* end = nullptr;
  const double a = std::strtod(s, &end);
  if (end == s) return false;
  if (*end == '\0') {
    out = {a, 0.0};
    return true;
  }
  if (std::string(end) == "i") {
    out = {0.0, a};
    return true;
  }
  // re +/- im i
  std::string rest(end);
  double b = 0.0;
  if (rest == "+i") {
    b = 1.0;
  } else if (rest == "-i") {
    b = -1.0;
  } else {
    char* end2 = nullptr;
    b = std::strtod(rest.c_str(), &end2);
    if (end2 == rest.c_str() || std::string(end2) != "i") return false;
  }
  out = {a, b};
  return true;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(cplx c) {
  if (c.imag() == 0.0) return format_real(c.real());
  std::string s;
  if (c.real() != 0.0) {
    s = format_real(c.real());
    if (c.imag() > 0.0 || std::isnan(c.imag())) s += "+";
  }
  s += format_real(c.imag());
  s += "i";
  return s;
}

struct Entry {
  std::string kind;
  int line = 0;
  std::vector<std::pair<std::string, std::vector<cplx>>> params;
  std::vector<Entry> children;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  struct Token {
    enum class Type { word, punct, eof };
    Type type = Type::eof;
    std::string word;
    char p = 0;
    int line = 1;
  };

  const Token& peek() {
    if (!have_) {
      tok_ = scan();
      have_ = true;
    }
    return tok_;
  }
  Token next() {
    const Token t = peek();
    have_ = false;
    return t;
  }
  int line() const { return line_; }

 private:
  Token scan() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    Token t;
    t.line = line_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (c == '(' || c == ')' || c == '{' || c == '}' || c == ',' || c == '=') {
      t.type = Token::Type::punct;
      t.p = c;
      ++pos_;
      return t;
    }
    t.type = Token::Type::word;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == '{' || d == '}' || d == ',' ||
          d == '=' || d == '#' || std::isspace(static_cast<unsigned char>(d)))
        break;
      t.word += d;
      ++pos_;
    }
    return t;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool have_ = false;
  Token tok_;
};

using Token = Lexer::Token;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError(line, msg);
}

std::vector<cplx> parse_value(Lexer& lex) {
  std::vector<cplx> vals;
  const Token t = lex.next();
  if (t.type == Token::Type::punct && t.p == '(') {
    for (;;) {
      const Token v = lex.next();
      if (v.type != Token::Type::word)
        fail(v.line, "expected a number inside the value list");
      cplx c;
      if (!parse_complex(v.word, c))
        fail(v.line, "cannot parse number '" + v.word + "'");
      vals.push_back(c);
      const Token sep = lex.next();
      if (sep.type == Token::Type::punct && sep.p == ',') continue;
      if (sep.type == Token::Type::punct && sep.p == ')') break;
      fail(sep.line, "expected ',' or ')' in value list");
    }
    return vals;
  }
  if (t.type != Token::Type::word)
    fail(t.line, "expected a value after '='");
  cplx c;
  if (!parse_complex(t.word, c))
    fail(t.line, "cannot parse number '" + t.word + "'");
  vals.push_back(c);
  return vals;
}

Entry parse_entry(Lexer& lex) {
  const Token name = lex.next();
  if (name.type != Token::Type::word)
    fail(name.line, "expected a map kind");
  Entry e;
  e.kind = name.word;
  e.line = name.line;
  if (lex.peek().type == Token::Type::punct && lex.peek().p == '(') {
    lex.next();
    if (lex.peek().type == Token::Type::punct && lex.peek().p == ')') {
      lex.next();
    } else {
      for (;;) {
        const Token key = lex.next();
        if (key.type != Token::Type::word)
          fail(key.line, "expected a parameter name in '" + e.kind + "'");
        const Token eq = lex.next();
        if (eq.type != Token::Type::punct || eq.p != '=')
          fail(eq.line, "expected '=' after '" + key.word + "'");
        e.params.emplace_back(key.word, parse_value(lex));
        const Token sep = lex.next();
        if (sep.type == Token::Type::punct && sep.p == ',') continue;
        if (sep.type == Token::Type::punct && sep.p == ')') break;
        fail(sep.line, "expected ',' or ')' in parameter list");
      }
    }
  }
  if (lex.peek().type == Token::Type::punct && lex.peek().p == '{') {
    lex.next();
    while (!(lex.peek().type == Token::Type::punct && lex.peek().p == '}')) {
      if (lex.peek().type == Token::Type::eof)
        fail(lex.peek().line, "unterminated '{' in '" + e.kind + "'");
      e.children.push_back(parse_entry(lex));
    }
    lex.next();
  }
  return e;
}

const std::vector<cplx>* find_param(const Entry& e, const std::string& key) {
  for (const auto& [k, v] : e.params)
    if (k == key) return &v;
  return nullptr;
}

cplx require_scalar(const Entry& e, const std::string& key) {
  const auto* v = find_param(e, key);
  if (!v || v->size() != 1)
    fail(e.line, "'" + e.kind + "' needs scalar parameter '" + key + "'");
  return (*v)[0];
}

double require_real(const Entry& e, const std::string& key) {
  const cplx c = require_scalar(e, key);
  if (c.imag() != 0.0)
    fail(e.line, "'" + key + "' must be real in '" + e.kind + "'");
  return c.real();
}

int require_int(const Entry& e, const std::string& key) {
  const double x = require_real(e, key);
  const int i = static_cast<int>(std::lround(x));
  if (x != static_cast<double>(i))
    fail(e.line, "'" + key + "' must be an integer in '" + e.kind + "'");
  return i;
}

holo::HoloMap build(const Entry& e);

holo::PolyComponent build_component(const Entry& comp, int n) {
  if (comp.kind != "comp")
    fail(comp.line, "poly children must be 'comp' blocks, got '" + comp.kind + "'");
  holo::PolyComponent out;
  for (const Entry& term : comp.children) {
    if (term.kind != "term")
      fail(term.line, "comp children must be 'term' entries");
    holo::PolyTerm t;
    t.coeff = require_scalar(term, "c");
    t.powers.assign(n, 0);
    if (const auto* p = find_param(term, "p")) {
      if (static_cast<int>(p->size()) != n)
        fail(term.line, "'p' must list one power per dimension");
      for (int k = 0; k < n; ++k) {
        const cplx c = (*p)[k];
        const int e2 = static_cast<int>(std::lround(c.real()));
        if (c.imag() != 0.0 || c.real() != e2 || e2 < 0)
          fail(term.line, "'p' entries must be nonnegative integers");
        t.powers[k] = e2;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

holo::HoloMap build(const Entry& e) {
  try {
    if (e.kind == "identity") {
      return holo::HoloMap::identity(require_int(e, "n"));
    }
    if (e.kind == "poly") {
      const int n = require_int(e, "n");
      if (static_cast<int>(e.children.size()) != n)
        fail(e.line, "poly needs exactly n 'comp' children");
      std::vector<holo::PolyComponent> comps;
      for (const Entry& c : e.children) comps.push_back(build_component(c, n));
      return holo::HoloMap::polynomial(n, std::move(comps));
    }
    if (e.kind == "extremal") {
      return holo::extremal_map(require_real(e, "m"), require_int(e, "n"));
    }
    if (e.kind == "mobius") {
      const auto* a = find_param(e, "a");
      if (!a || a->empty()) fail(e.line, "mobius needs anchor vector 'a'");
      return holo::mobius_auto(BallPoint(*a));
    }
    if (e.kind == "compose") {
      if (e.children.size() != 2)
        fail(e.line, "compose needs exactly two children: outer then inner");
      return holo::compose(build(e.children[0]), build(e.children[1]));
    }
    if (e.kind == "stack") {
      if (e.children.empty()) fail(e.line, "stack needs children");
      std::vector<holo::HoloMap> cs;
      for (const Entry& c : e.children) cs.push_back(build(c));
      return holo::HoloMap::diagonal_stack(std::move(cs));
    }
    if (e.kind == "rotation") {
      return holo::HoloMap::scalar_rotation(require_int(e, "n"),
                                            require_int(e, "row"),
                                            require_scalar(e, "factor"));
    }
    if (e.kind == "scale") {
      if (e.children.size() != 1) fail(e.line, "scale needs one child");
      return holo::scaled(build(e.children[0]), require_scalar(e, "c"));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    fail(e.line, std::string(ex.what()));
  }
  fail(e.line, "unknown map kind '" + e.kind + "'");
}

// scaled() wrappers serialize as scale{...}: outer diagonal polynomial with
// one identical linear term per component.
bool scale_pattern(const holo::HoloMap& m, cplx& c) {
  if (m.kind() != holo::MapKind::composition) return false;
  const holo::HoloMap& outer = m.child(0);
  if (outer.kind() != holo::MapKind::polynomial) return false;
  const auto& comps = outer.poly_components();
  const int n = outer.dim();
  cplx common;
  for (int i = 0; i < n; ++i) {
    if (comps[i].size() != 1) return false;
    const holo::PolyTerm& t = comps[i][0];
    for (int k = 0; k < n; ++k)
      if (t.powers[k] != (k == i ? 1 : 0)) return false;
    if (i == 0)
      common = t.coeff;
    else if (t.coeff != common)
      return false;
  }
  c = common;
  return true;
}

void serialize_into(const holo::HoloMap& m, std::string& out) {
  using holo::MapKind;
  switch (m.kind()) {
    case MapKind::polynomial: {
      const int n = m.dim();
      out += "poly(n=" + std::to_string(n) + "){ ";
      for (const auto& comp : m.poly_components()) {
        out += "comp{ ";
        for (const auto& t : comp) {
          out += "term(c=" + format_complex(t.coeff) + ", p=(";
          for (int k = 0; k < n; ++k) {
            if (k) out += ",";
            out += std::to_string(t.powers[k]);
          }
          out += ")) ";
        }
        out += "} ";
      }
      out += "}";
      return;
    }
    case MapKind::extremal:
      out += "extremal(n=" + std::to_string(m.dim()) +
             ", m=" + format_real(m.extremal_m()) + ")";
      return;
    case MapKind::automorphism: {
      out += "mobius(a=(";
      const auto& a = m.mobius().anchor();
      for (int k = 0; k < a.dim(); ++k) {
        if (k) out += ",";
        out += format_complex(a[k]);
      }
      out += "))";
      return;
    }
    case MapKind::composition: {
      cplx c;
      if (scale_pattern(m, c)) {
        out += "scale(c=" + format_complex(c) + "){ ";
        serialize_into(m.child(1), out);
        out += " }";
        return;
      }
      out += "compose{ ";
      serialize_into(m.child(0), out);
      out += " ";
      serialize_into(m.child(1), out);
      out += " }";
      return;
    }
    case MapKind::diagonal_stack: {
      out += "stack{ ";
      for (int i = 0; i < m.child_count(); ++i) {
        serialize_into(m.child(i), out);
        out += " ";
      }
      out += "}";
      return;
    }
    case MapKind::scalar_rotation:
      out += "rotation(n=" + std::to_string(m.dim()) +
             ", row=" + std::to_string(m.rotation_row()) +
             ", factor=" + format_complex(m.rotation_factor()) + ")";
      return;
  }
  throw std::logic_error("serialize: unknown kind");
}

}  // namespace

cplx parse_complex_literal(const std::string& text) {
  cplx out;
  if (!parse_complex(text, out))
    throw std::invalid_argument("cannot parse complex literal: " + text);
  return out;
}

std::vector<holo::HoloMap> parse_battery(const std::string& text) {
  Lexer lex(text);
  std::vector<holo::HoloMap> maps;
  while (lex.peek().type != Token::Type::eof) {
    if (lex.peek().type == Token::Type::punct)
      fail(lex.peek().line, "expected a map kind, got punctuation");
    maps.push_back(build(parse_entry(lex)));
  }
  if (maps.empty()) fail(lex.line(), "no maps found in battery");
  return maps;
}

std::vector<holo::HoloMap> load_battery_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open battery file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_battery(ss.str());
}

std::string serialize(const holo::HoloMap& map) {
  std::string out;
  serialize_into(map, out);
  return out;
}

std::string serialize_battery(const std::vector<holo::HoloMap>& maps) {
  std::string out;
  for (const auto& m : maps) {
    serialize_into(m, out);
    out += "\n";
  }
  return out;
}

}  // namespace blochball::mapio
