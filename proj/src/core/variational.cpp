#include "hamalg/core/variational.hpp"

#include <algorithm>

namespace hamalg {

KindCode field_kind(Field f) { return f == Field::Phi ? kPhi : kPi; }

Var fresh_free_variable(std::initializer_list<const std::vector<Term>*> lists) {
  std::vector<bool> used;
  auto mark = [&](Var v) {
    if (!v.is_free()) return;
    if (used.size() <= v.id) used.resize(v.id + 1, false);
    used[v.id] = true;
  };
  for (const auto* terms : lists)
    for (const auto& t : *terms) {
      for (const auto& f : t.fields) mark(f.arg);
      for (const auto& f : t.funcs) mark(f.arg);
      for (const auto& d : t.deltas) mark(d.left), mark(d.right);
    }
  std::size_t id = 0;
  while (id < used.size() && used[id]) ++id;
  return Var::free(static_cast<int>(id));
}

namespace {

bool mentions(const Term& t, Var v) {
  for (const auto& f : t.fields)
    if (f.arg == v) return true;
  for (const auto& f : t.funcs)
    if (f.arg == v) return true;
  for (const auto& d : t.deltas)
    if (d.left == v || d.right == v) return true;
  return false;
}

}  // namespace

Symbol vderiv(const Session& ses, const Symbol& s, Field field, Var y) {
  if (!y.is_free()) throw Error(ErrorCode::Usage, "vderiv needs a free variable");
  const KindCode kind = field_kind(field);
  std::vector<Term> out;
  for (const auto& t : s.terms()) {
    if (mentions(t, y))
      throw Error(ErrorCode::Usage, "the variable " + variable_name(y.id) +
                                        " already occurs in the functional");
    for (std::size_t i = 0; i < t.fields.size(); ++i) {
      if (t.fields[i].kind != kind) continue;
      Term r = t;
      const Factor f = r.fields[i];
      r.fields.erase(r.fields.begin() + static_cast<std::ptrdiff_t>(i));
      Delta d{f.arg, y, f.d};
      if (orient(d) < 0) r.c = -r.c;
      r.deltas.push_back(d);
      out.push_back(std::move(r));
    }
  }
  return Symbol(canonical_terms(ses, std::move(out), Mode::Classical, false));
}

Symbol second_vderiv(const Session& ses, const Symbol& s, Field field1, Field field2, Var y,
                     Var z) {
  if (y == z) throw Error(ErrorCode::Usage, "second_vderiv needs two distinct variables");
  return vderiv(ses, vderiv(ses, s, field1, y), field2, z);
}

SymbolReport check_symbol(const Session& ses, const Symbol& s) {
  SymbolReport r;
  Var y = fresh_free_variable({&s.terms()});
  auto witnesses = [&](Field f) {
    std::vector<Term> w;
    const Symbol d1 = vderiv(ses, s, f, y);
    for (const auto& t : d1.terms())
      for (const auto& d : t.deltas)
        if (d.left == y || d.right == y) {
          w.push_back(t);
          break;
        }
    return w;
  };
  r.phi_witnesses = witnesses(Field::Phi);
  r.pi_witnesses = witnesses(Field::Pi);
  r.is_symbol = r.phi_witnesses.empty() && r.pi_witnesses.empty();
  return r;
}

}  // namespace hamalg
