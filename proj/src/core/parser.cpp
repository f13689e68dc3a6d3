#include "hamalg/core/parser.hpp"

#include "hamalg/core/json.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace hamalg {

namespace {

struct Token {
  enum Type { Ident, Int, Sym, End } type = End;
  std::string text;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t k = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t t = 0; t < n; ++t) {
      if (src[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++k;
    }
  };
  while (k < src.size()) {
    unsigned char ch = static_cast<unsigned char>(src[k]);
    if (std::isspace(ch)) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    std::size_t e = k;
    if (std::isalpha(ch) || ch == '_') {
      while (e < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[e])) || src[e] == '_'))
        ++e;
      t.type = Token::Ident;
    } else if (std::isdigit(ch)) {
      while (e < src.size() && std::isdigit(static_cast<unsigned char>(src[e]))) ++e;
      t.type = Token::Int;
    } else if (std::string("+-*/^()[],;").find(static_cast<char>(ch)) != std::string::npos) {
      e = k + 1;
      t.type = Token::Sym;
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + src[k] + "'");
    }
    t.text = src.substr(k, e - k);
    advance(e - k);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// A term under construction: dummies are parse-wide unique placeholders and
// `bound` lists the ones integrated over, outermost binder first.
struct PTerm {
  Term t;
  std::vector<std::uint16_t> bound;
};
using Value = std::vector<PTerm>;

class Parser {
 public:
  Parser(const Session& s, const std::string& src) : s_(s), toks_(lex(src)) {}

  Parsed run() {
    Value v = expr();
    if (peek().type != Token::End) fail(peek(), "unexpected '" + peek().text + "'");
    if (saw_int_ && saw_operator_)
      fail(toks_.front(), "cannot mix int and qint (or Phi/Pi) in one expression");
    std::vector<Term> terms;
    for (auto& p : v) terms.push_back(finalize(std::move(p)));
    if (saw_operator_) return OperatorExpr(std::move(terms));
    return Symbol(std::move(terms));
  }

  bool saw_int() const { return saw_int_; }

 private:
  const Session& s_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, std::uint16_t>> scope_;
  std::uint16_t next_ = 0;
  bool saw_int_ = false;
  bool saw_operator_ = false;

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool accept(const char* sym) {
    if (peek().type == Token::Sym && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* sym) {
    if (!accept(sym)) fail(peek(), std::string("expected '") + sym + "'");
  }

  static Value scalar(const Rational& c) {
    PTerm p;
    p.t.c = c;
    return {p};
  }

  Value product(const Value& a, const Value& b) {
    Value out;
    for (const auto& x : a)
      for (const auto& y : b) {
        PTerm r = x;
        std::map<std::uint16_t, std::uint16_t> fresh;
        for (auto id : y.bound) fresh[id] = next_++;
        auto ren = [&](Var v) {
          if (v.is_dummy())
            if (auto it = fresh.find(v.id); it != fresh.end()) v.id = it->second;
          return v;
        };
        r.t.c = x.t.c * y.t.c;
        multiply_formal(r.t, y.t.f);
        for (Factor f : y.t.fields) {
          f.arg = ren(f.arg);
          r.t.fields.push_back(f);
        }
        for (Factor f : y.t.funcs) {
          f.arg = ren(f.arg);
          r.t.funcs.push_back(f);
        }
        for (Delta d : y.t.deltas) {
          d.left = ren(d.left);
          d.right = ren(d.right);
          r.t.deltas.push_back(d);
        }
        for (auto id : y.bound) r.bound.push_back(fresh[id]);
        out.push_back(std::move(r));
      }
    return out;
  }

  static bool pure_scalar(const Value& v) {
    return v.size() == 1 && v[0].bound.empty() && v[0].t.fields.empty() &&
           v[0].t.funcs.empty() && v[0].t.deltas.empty() && v[0].t.f.h == 0 &&
           v[0].t.f.i == 0 && !v[0].t.f.divergent();
  }

  Value expr() {
    Value acc;
    bool neg = false;
    if (accept("-")) neg = true;
    else accept("+");
    Value t = term();
    if (neg)
      for (auto& p : t) p.t.c = -p.t.c;
    acc = std::move(t);
    while (true) {
      if (accept("+")) {
        Value r = term();
        acc.insert(acc.end(), r.begin(), r.end());
      } else if (accept("-")) {
        Value r = term();
        for (auto& p : r) p.t.c = -p.t.c;
        acc.insert(acc.end(), r.begin(), r.end());
      } else {
        break;
      }
    }
    return acc;
  }

  Value term() {
    Value acc = unary();
    while (true) {
      if (accept("*")) {
        acc = product(acc, unary());
      } else if (peek().type == Token::Sym && peek().text == "/") {
        Token at = take();
        Value d = unary();
        if (!pure_scalar(d) || d[0].t.f.m != 0)
          fail(at, "division is only defined by a nonzero rational");
        if (d[0].t.c == 0) fail(at, "division by zero");
        Rational inv = 1 / d[0].t.c;
        for (auto& p : acc) p.t.c *= inv;
      } else {
        break;
      }
    }
    return acc;
  }

  Value unary() {
    if (accept("-")) {
      Value v = unary();
      for (auto& p : v) p.t.c = -p.t.c;
      return v;
    }
    return power();
  }

  Value power() {
    Value base = atom();
    if (!accept("^")) return base;
    bool neg = accept("-");
    Token e = take();
    if (e.type != Token::Int) fail(e, "expected an integer exponent");
    if (e.text.size() > 3) fail(e, "exponent too large");
    int k = std::stoi(e.text);
    if (k > 64) fail(e, "exponent too large");
    if (neg) {
      if (!pure_scalar(base)) fail(e, "negative exponents apply only to m and rationals");
      if (base[0].t.c == 0) fail(e, "division by zero");
      PTerm p = base[0];
      p.t.c = 1 / p.t.c;
      p.t.f.m = static_cast<std::int16_t>(-p.t.f.m);
      base = {p};
    }
    Value r = scalar(1);
    for (int t = 0; t < k; ++t) r = product(r, base);
    return r;
  }

  MultiIndex multi_index() {
    MultiIndex k;
    auto number = [&]() {
      Token t = take();
      if (t.type != Token::Int) fail(t, "expected a derivative order");
      if (t.text.size() > 3 || std::stoi(t.text) > 255) fail(t, "derivative order too large");
      return static_cast<std::uint8_t>(std::stoi(t.text));
    };
    if (accept("(")) {
      int n = 0;
      do {
        if (n >= s_.dimension()) fail(peek(), "multi-index longer than the spatial dimension");
        k.v[n++] = number();
      } while (accept(","));
      expect(")");
    } else {
      k.v[0] = number();
    }
    return k;
  }

  Var variable() {
    Token t = take();
    if (t.type == Token::Int && t.text == "0") return Var::origin();
    if (t.type != Token::Ident) fail(t, "expected a variable");
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == t.text) return Var{VarKind::Dummy, it->second};
    int id = free_variable_id(t.text);
    if (id < 0 && t.text.size() > 1 && t.text[0] == 'x' &&
        std::all_of(t.text.begin() + 1, t.text.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) &&
        t.text[1] != '0' && t.text.size() < 5)
      id = static_cast<int>(variable_names().size()) + std::stoi(t.text.substr(1)) - 1;
    if (id < 0) fail(t, "unknown variable '" + t.text + "'");
    return Var::free(id);
  }

  Value single(Factor f, bool field) {
    PTerm p;
    (field ? p.t.fields : p.t.funcs).push_back(f);
    return {p};
  }

  static bool reserved(const std::string& w) {
    static const char* words[] = {"int", "qint", "phi", "pi",  "Phi", "Pi", "D",
                                  "delta", "delta0", "deltasq", "vol", "h", "i", "m"};
    return std::any_of(std::begin(words), std::end(words), [&](const char* x) { return w == x; });
  }

  Value integral(const Token& kw) {
    const bool q = kw.text == "qint";
    (q ? saw_operator_ : saw_int_) = true;
    expect("[");
    std::vector<std::uint16_t> ids;
    std::size_t mark = scope_.size();
    do {
      Token v = take();
      if (v.type != Token::Ident) fail(v, "expected an integration variable");
      if (reserved(v.text) || s_.function_kind(v.text))
        fail(v, "'" + v.text + "' cannot be an integration variable");
      for (std::size_t k = mark; k < scope_.size(); ++k)
        if (scope_[k].first == v.text) fail(v, "duplicate integration variable '" + v.text + "'");
      scope_.emplace_back(v.text, next_);
      ids.push_back(next_++);
    } while (accept(","));
    expect("]");
    expect("(");
    Value body = expr();
    expect(")");
    scope_.resize(mark);
    for (auto& p : body) p.bound.insert(p.bound.begin(), ids.begin(), ids.end());
    return body;
  }

  Value atom() {
    Token t = take();
    if (t.type == Token::Int) return scalar(Rational(t.text));
    if (t.type == Token::Sym && t.text == "(") {
      Value v = expr();
      expect(")");
      return v;
    }
    if (t.type != Token::Ident) fail(t, t.type == Token::End ? "unexpected end of input"
                                                             : "unexpected '" + t.text + "'");
    const std::string& w = t.text;
    if (w == "int" || w == "qint") return integral(t);
    if (w == "phi" || w == "pi" || w == "Phi" || w == "Pi") {
      if (w[0] == 'P') saw_operator_ = true;
      expect("(");
      Var v = variable();
      expect(")");
      return single({(w == "phi" || w == "Phi") ? kPhi : kPi, v, {}}, true);
    }
    if (w == "D") {
      expect("(");
      Token n = take();
      KindCode kind;
      bool field = true;
      if (n.text == "phi" || n.text == "Phi") kind = kPhi;
      else if (n.text == "pi" || n.text == "Pi") kind = kPi;
      else if (auto k = s_.function_kind(n.text); n.type == Token::Ident && k) kind = *k, field = false;
      else fail(n, "undeclared function '" + n.text + "'");
      if (field && n.text[0] == 'P') saw_operator_ = true;
      expect(",");
      MultiIndex k = multi_index();
      expect(")");
      expect("(");
      Var v = variable();
      expect(")");
      return single({kind, v, k}, field);
    }
    if (w == "delta") {
      expect("(");
      Delta d;
      d.left = variable();
      d.right = Var::origin();
      if (accept("-")) d.right = variable();
      if (accept(";")) d.d = multi_index();
      expect(")");
      PTerm p;
      p.t.deltas.push_back(d);
      return {p};
    }
    if (w == "delta0") {
      expect("(");
      MultiIndex k = multi_index();
      expect(")");
      PTerm p;
      p.t.f.div.push_back({DivergentKind::DeltaAtZero, k});
      return {p};
    }
    PTerm p;
    if (w == "deltasq") {
      p.t.f.div.push_back({DivergentKind::DeltaSquaredIntegral, {}});
      return {p};
    }
    if (w == "vol") {
      p.t.f.div.push_back({DivergentKind::Volume, {}});
      return {p};
    }
    if (w == "h") {
      p.t.f.h = 1;
      return {p};
    }
    if (w == "i") {
      p.t.f.i = 1;
      return {p};
    }
    if (w == "m") {
      p.t.f.m = 1;
      return {p};
    }
    if (auto k = s_.function_kind(w)) {
      expect("(");
      Var v = variable();
      expect(")");
      return single({*k, v, {}}, false);
    }
    if (peek().type == Token::Sym && peek().text == "(") fail(t, "undeclared function '" + w + "'");
    fail(t, "unexpected identifier '" + w + "'");
  }

  static Term finalize(PTerm p) {
    std::map<std::uint16_t, std::uint16_t> to;
    for (std::size_t k = 0; k < p.bound.size(); ++k)
      to[p.bound[k]] = static_cast<std::uint16_t>(k);
    auto fix = [&](Var& v) {
      if (v.is_dummy()) v.id = to.at(v.id);
    };
    for (auto& f : p.t.fields) fix(f.arg);
    for (auto& f : p.t.funcs) fix(f.arg);
    for (auto& d : p.t.deltas) {
      fix(d.left);
      fix(d.right);
    }
    p.t.nd = static_cast<std::uint16_t>(p.bound.size());
    return p.t;
  }
};

// ---------------------------------------------------------------- formatting

std::string rational_text(const Rational& c) {
  if (c.get_den() == 1) return c.get_num().get_str();
  std::string s = Rational(abs(c)).get_str();
  return c < 0 ? "-(" + s + ")" : "(" + s + ")";
}

std::string index_text(const Session& s, const MultiIndex& k) {
  if (s.dimension() == 1) return std::to_string(k.v[0]);
  std::string r = "(";
  for (int d = 0; d < s.dimension(); ++d) {
    if (d) r += ",";
    r += std::to_string(k.v[d]);
  }
  return r + ")";
}

std::vector<std::string> formal_parts(const Session* s, const Formal& f) {
  std::vector<std::string> parts;
  if (f.i) parts.push_back("i");
  if (f.h == 1) parts.push_back("h");
  else if (f.h > 1) parts.push_back("h^" + std::to_string(f.h));
  if (f.m == 1) parts.push_back("m");
  else if (f.m != 0) parts.push_back("m^" + std::to_string(f.m));
  for (const auto& d : f.div) {
    switch (d.kind) {
      case DivergentKind::DeltaAtZero: {
        std::string k;
        if (s) {
          k = index_text(*s, d.d);
        } else {
          k = std::to_string(d.d.v[0]);
        }
        parts.push_back("delta0(" + k + ")");
        break;
      }
      case DivergentKind::DeltaSquaredIntegral: parts.push_back("deltasq"); break;
      case DivergentKind::Volume: parts.push_back("vol"); break;
    }
  }
  return parts;
}

std::string join_powers(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size();) {
    std::size_t e = k;
    while (e < parts.size() && parts[e] == parts[k]) ++e;
    if (!out.empty()) out += "*";
    out += parts[k];
    if (e - k > 1) out += "^" + std::to_string(e - k);
    k = e;
  }
  return out;
}

std::string with_scalar(const Rational& c, const std::string& body) {
  if (body.empty()) return rational_text(c);
  if (c == 1) return body;
  if (c == -1) return "-" + body;
  return rational_text(c) + "*" + body;
}

class Printer {
 public:
  Printer(const Session& s, const Term& t, bool ordered) : s_(s), t_(t), ordered_(ordered) {
    std::vector<bool> taken(64, false);
    auto mark = [&](Var v) {
      if (v.is_free() && v.id < taken.size()) taken[v.id] = true;
    };
    for (const auto& f : t.fields) mark(f.arg);
    for (const auto& f : t.funcs) mark(f.arg);
    for (const auto& d : t.deltas) mark(d.left), mark(d.right);
    int next = 0;
    for (int k = 0; k < t.nd; ++k) {
      while (next < static_cast<int>(taken.size()) && taken[next]) ++next;
      dummy_names_.push_back(variable_name(next++));
    }
  }

  const std::vector<std::string>& dummy_names() const { return dummy_names_; }

  std::string name(Var v) const {
    if (v.is_origin()) return "0";
    if (v.is_dummy()) return dummy_names_.at(v.id);
    return variable_name(v.id);
  }

  std::string factor(const Factor& f) const {
    std::string n = s_.kind_name(f.kind);
    if (ordered_ && is_field(f.kind)) n[0] = static_cast<char>(std::toupper(n[0]));
    if (f.d.zero()) return n + "(" + name(f.arg) + ")";
    return "D(" + n + "," + index_text(s_, f.d) + ")(" + name(f.arg) + ")";
  }

  std::string delta(const Delta& d) const {
    std::string r = "delta(" + name(d.left);
    if (!d.right.is_origin()) r += "-" + name(d.right);
    if (!d.d.zero()) r += ";" + index_text(s_, d.d);
    return r + ")";
  }

  // Factors without the scalar, in reading order.
  std::string body() const {
    std::vector<Var> vars;
    for (int k = 0; k < t_.nd; ++k) vars.push_back(Var::dummy(k));
    std::vector<Var> rest;
    auto add = [&](Var v) {
      if (!v.is_dummy()) rest.push_back(v);
    };
    for (const auto& f : t_.fields) add(f.arg);
    for (const auto& f : t_.funcs) add(f.arg);
    for (const auto& d : t_.deltas) add(d.left), add(d.right);
    std::sort(rest.begin(), rest.end());
    rest.erase(std::unique(rest.begin(), rest.end()), rest.end());
    vars.insert(vars.end(), rest.begin(), rest.end());

    // Commutative terms read per variable: functions, fields, deltas leaving it.
    std::vector<std::string> parts;
    if (ordered_) {
      for (Var v : vars)
        for (const auto& f : t_.funcs)
          if (f.arg == v) parts.push_back(factor(f));
      for (const auto& f : t_.fields) parts.push_back(factor(f));
      for (Var v : vars)
        for (const auto& d : t_.deltas)
          if (d.left == v) parts.push_back(delta(d));
    } else {
      for (Var v : vars) {
        for (const auto& f : t_.funcs)
          if (f.arg == v) parts.push_back(factor(f));
        for (const auto& f : t_.fields)
          if (f.arg == v) parts.push_back(factor(f));
        for (const auto& d : t_.deltas)
          if (d.left == v) parts.push_back(delta(d));
      }
    }
    return join_powers(parts);
  }

  std::string scalar_body() const {
    return join_powers(formal_parts(&s_, t_.f));
  }

  std::string full() const {
    std::string f = scalar_body();
    std::string b = body();
    if (!f.empty() && !b.empty()) f += "*";
    return with_scalar(t_.c, f + b);
  }

 private:
  const Session& s_;
  const Term& t_;
  bool ordered_;
  std::vector<std::string> dummy_names_;
};

void append_signed(std::string& out, const std::string& piece) {
  if (out.empty()) {
    out = piece;
  } else if (piece[0] == '-') {
    out += " - " + piece.substr(1);
  } else {
    out += " + " + piece;
  }
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string r;
  for (std::size_t k = 0; k < v.size(); ++k) r += (k ? sep : "") + v[k];
  return r;
}

}  // namespace

Parsed parse(const Session& s, const std::string& src) { return Parser(s, src).run(); }

Symbol parse_symbol(const Session& s, const std::string& src) {
  Parsed p = parse(s, src);
  if (auto* sym = std::get_if<Symbol>(&p)) return *sym;
  throw Error(ErrorCode::Parse, "expected a classical expression (int), got an operator expression");
}

OperatorExpr parse_operator(const Session& s, const std::string& src) {
  Parser parser(s, src);
  Parsed p = parser.run();
  if (auto* e = std::get_if<OperatorExpr>(&p)) return *e;
  if (parser.saw_int())
    throw Error(ErrorCode::Parse, "expected an operator expression (qint), got a classical one");
  return OperatorExpr(std::get<Symbol>(p).terms());
}

std::string format_scalar(const Rational& c, const Formal& f) {
  return with_scalar(c, join_powers(formal_parts(nullptr, f)));
}

std::string format_terms(const Session& s, const std::vector<Term>& terms, bool ordered,
                         FormatStyle style) {
  if (terms.empty()) return "0";
  const char* kw = ordered ? "qint" : "int";
  std::string out;
  for (std::size_t k = 0; k < terms.size();) {
    Printer first(s, terms[k], ordered);
    if (terms[k].nd == 0) {
      append_signed(out, first.full());
      ++k;
      continue;
    }
    std::size_t e = k + 1;
    while (e < terms.size() && terms[e].nd > 0 &&
           Printer(s, terms[e], ordered).dummy_names() == first.dummy_names())
      ++e;
    const std::string head = std::string(kw) + "[" + join(first.dummy_names(), ",") + "]";
    if (style == FormatStyle::Compact && e == k + 1) {
      std::string sc = format_scalar(terms[k].c, terms[k].f);
      std::string b = first.body();
      std::string integral = head + "(" + (b.empty() ? "1" : b) + ")";
      if (sc == "1") append_signed(out, integral);
      else if (sc == "-1") append_signed(out, "-" + integral);
      else append_signed(out, sc + "*" + integral);
    } else {
      std::string inner;
      for (std::size_t t = k; t < e; ++t) append_signed(inner, Printer(s, terms[t], ordered).full());
      if (style == FormatStyle::Canonical) append_signed(out, head + "( " + inner + " )");
      else append_signed(out, head + "(" + inner + ")");
    }
    k = e;
  }
  return out;
}

std::string format(const Session& s, const Symbol& sym, FormatStyle style) {
  return format_terms(s, sym.terms(), false, style);
}

std::string format(const Session& s, const OperatorExpr& e, FormatStyle style) {
  return format_terms(s, e.terms(), true, style);
}

Json multi_index_json(const Session& s, const MultiIndex& k) {
  Json a = Json::array();
  for (int d = 0; d < s.dimension(); ++d) a.push_back(k.v[d]);
  return a;
}

Json ast_json(const Session& s, const std::vector<Term>& terms, bool ordered) {
  Json out;
  out["ordered"] = ordered;
  Json arr = Json::array();
  for (const auto& t : terms) {
    Printer p(s, t, ordered);
    Json j;
    j["variables"] = p.dummy_names();
    Json c;
    c["rational"] = t.c.get_str();
    c["h"] = t.f.h;
    c["i"] = t.f.i;
    c["m"] = t.f.m;
    Json div = Json::array();
    for (const auto& d : t.f.div) {
      Json x;
      switch (d.kind) {
        case DivergentKind::DeltaAtZero:
          x["kind"] = "delta_at_zero";
          x["order"] = multi_index_json(s, d.d);
          break;
        case DivergentKind::DeltaSquaredIntegral: x["kind"] = "delta_squared_integral"; break;
        case DivergentKind::Volume: x["kind"] = "volume"; break;
      }
      div.push_back(x);
    }
    c["divergent"] = div;
    Json funcs = Json::array();
    for (const auto& f : t.funcs) {
      Json x;
      x["name"] = s.kind_name(f.kind);
      x["order"] = multi_index_json(s, f.d);
      x["arg"] = p.name(f.arg);
      funcs.push_back(x);
    }
    c["functions"] = funcs;
    j["coefficient"] = c;
    Json fields = Json::array();
    for (const auto& f : t.fields) {
      Json x;
      x["field"] = s.kind_name(f.kind);
      x["order"] = multi_index_json(s, f.d);
      x["arg"] = p.name(f.arg);
      fields.push_back(x);
    }
    j["factors"] = fields;
    Json deltas = Json::array();
    for (const auto& d : t.deltas) {
      Json x;
      x["order"] = multi_index_json(s, d.d);
      x["left"] = p.name(d.left);
      x["right"] = p.name(d.right);
      deltas.push_back(x);
    }
    j["deltas"] = deltas;
    arr.push_back(j);
  }
  out["terms"] = arr;
  return out;
}

std::string to_json(const Session& s, const Symbol& sym, int indent) {
  return ast_json(s, sym.terms(), false).dump(indent);
}

std::string to_json(const Session& s, const OperatorExpr& e, int indent) {
  return ast_json(s, e.terms(), true).dump(indent);
}

}  // namespace hamalg
