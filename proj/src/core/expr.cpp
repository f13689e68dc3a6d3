#include "hamalg/core/expr.hpp"

#include <algorithm>

namespace hamalg {

Symbol Symbol::constant(const Rational& c) {
  if (c == 0) return Symbol{};
  Term t;
  t.c = c;
  return Symbol({t});
}

namespace {

bool same_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k].c != b[k].c || !same_structure(a[k], b[k])) return false;
  return true;
}

std::vector<Term> concat(const std::vector<Term>& a, const std::vector<Term>& b,
                         const Rational& sb) {
  std::vector<Term> r = a;
  r.reserve(a.size() + b.size());
  for (const auto& t : b) {
    r.push_back(t);
    r.back().c *= sb;
  }
  return r;
}

std::vector<Term> scaled(const Rational& c, const std::vector<Term>& ts) {
  std::vector<Term> r;
  if (c == 0) return r;
  r = ts;
  for (auto& t : r) t.c *= c;
  return r;
}

void shift(Var& v, int by) {
  if (v.is_dummy()) v.id = static_cast<std::uint16_t>(v.id + by);
}

}  // namespace

bool operator==(const Symbol& a, const Symbol& b) { return same_terms(a.terms_, b.terms_); }
bool operator==(const OperatorExpr& a, const OperatorExpr& b) {
  return same_terms(a.terms_, b.terms_);
}

bool OperatorExpr::divergent() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.f.divergent(); });
}

void multiply_by_i(Term& t) {
  if (t.f.i) {
    t.f.i = 0;
    t.c = -t.c;
  } else {
    t.f.i = 1;
  }
}

void multiply_formal(Term& t, const Formal& f) {
  t.f.h = static_cast<std::uint16_t>(t.f.h + f.h);
  t.f.m = static_cast<std::int16_t>(t.f.m + f.m);
  if (f.i) multiply_by_i(t);
  t.f.div.insert(t.f.div.end(), f.div.begin(), f.div.end());
  std::sort(t.f.div.begin(), t.f.div.end());
}

Term term_product(const Term& a, const Term& b) {
  Term r = a;
  r.c = a.c * b.c;
  multiply_formal(r, b.f);
  const int off = a.nd;
  r.nd = static_cast<std::uint16_t>(a.nd + b.nd);
  for (Factor x : b.fields) {
    shift(x.arg, off);
    r.fields.push_back(x);
  }
  for (Factor x : b.funcs) {
    shift(x.arg, off);
    r.funcs.push_back(x);
  }
  for (Delta d : b.deltas) {
    shift(d.left, off);
    shift(d.right, off);
    r.deltas.push_back(d);
  }
  return r;
}

Symbol operator+(const Symbol& a, const Symbol& b) { return Symbol(concat(a.terms(), b.terms(), 1)); }
Symbol operator-(const Symbol& a, const Symbol& b) { return Symbol(concat(a.terms(), b.terms(), -1)); }
Symbol operator*(const Rational& c, const Symbol& s) { return Symbol(scaled(c, s.terms())); }
OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  return OperatorExpr(concat(a.terms(), b.terms(), 1));
}
OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) {
  return OperatorExpr(concat(a.terms(), b.terms(), -1));
}
OperatorExpr operator*(const Rational& c, const OperatorExpr& s) {
  return OperatorExpr(scaled(c, s.terms()));
}

Symbol forget_order(const OperatorExpr& e) { return Symbol(e.terms()); }

}  // namespace hamalg
