#include "hamalg/core/quantum.hpp"

#include <algorithm>

namespace hamalg {

namespace {

// [p, q] for single field factors, as a c-number term; nullopt if zero.
std::optional<Term> single_commutator(const Factor& p, const Factor& q) {
  if (p.kind == q.kind) return std::nullopt;
  Term t;
  t.f.h = 1;
  t.f.i = 1;
  if (p.kind == kPhi) {
    // [phi^(a)(u), pi^(b)(v)] = i h (-1)^|b| delta^(a+b)(u - v)
    t.c = parity_sign(q.d);
    t.deltas.push_back({p.arg, q.arg, p.d + q.d});
  } else {
    // [pi^(a)(u), phi^(b)(v)] = -i h (-1)^|a| delta^(a+b)(v - u)
    t.c = -parity_sign(p.d);
    t.deltas.push_back({q.arg, p.arg, p.d + q.d});
  }
  return t;
}

std::vector<Term> normal_order(std::vector<Term> work) {
  std::vector<Term> out;
  while (!work.empty()) {
    Term t = std::move(work.back());
    work.pop_back();
    std::size_t i = 0;
    while (i + 1 < t.fields.size() && !(t.fields[i].kind == kPi && t.fields[i + 1].kind == kPhi))
      ++i;
    if (i + 1 >= t.fields.size()) {
      out.push_back(std::move(t));
      continue;
    }
    const Factor p = t.fields[i], q = t.fields[i + 1];
    Term c = t;
    c.fields.erase(c.fields.begin() + static_cast<std::ptrdiff_t>(i),
                   c.fields.begin() + static_cast<std::ptrdiff_t>(i + 2));
    Term k = *single_commutator(p, q);
    c.c *= k.c;
    multiply_formal(c, k.f);
    c.deltas.push_back(k.deltas.front());
    std::swap(t.fields[i], t.fields[i + 1]);
    work.push_back(std::move(t));
    work.push_back(std::move(c));
  }
  return out;
}

std::vector<Term> products(const std::vector<Term>& a, const std::vector<Term>& b,
                           const Rational& sign) {
  std::vector<Term> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      out.push_back(term_product(x, y));
      out.back().c *= sign;
    }
  return out;
}

}  // namespace

OperatorExpr quantize(const Session& s, const Symbol& sym, Ordering ordering) {
  std::vector<Term> out;
  for (const auto& t : sym.terms()) {
    Term w = t;
    std::sort(w.fields.begin(), w.fields.end());
    if (ordering == Ordering::Normal) {
      out.push_back(w);
      continue;
    }
    std::vector<Term> perms;
    auto word = w.fields;
    do {
      Term p = w;
      p.fields = word;
      perms.push_back(std::move(p));
    } while (std::next_permutation(word.begin(), word.end()));
    const Rational weight(1, static_cast<unsigned long>(perms.size()));
    for (auto& p : perms) {
      p.c *= weight;
      out.push_back(std::move(p));
    }
  }
  return OperatorExpr(canonical_terms(s, std::move(out), Mode::Quantum, true));
}

OperatorExpr ccr_reduce(const Session& s, const OperatorExpr& e) {
  return OperatorExpr(canonical_terms(s, normal_order(e.terms()), Mode::Quantum, true));
}

OperatorExpr commutator(const Session& s, const OperatorExpr& a, const OperatorExpr& b) {
  std::vector<Term> t = products(a.terms(), b.terms(), 1);
  std::vector<Term> u = products(b.terms(), a.terms(), -1);
  t.insert(t.end(), u.begin(), u.end());
  return OperatorExpr(canonical_terms(s, normal_order(std::move(t)), Mode::Quantum, true));
}

Symbol classical_limit(const Session& s, const OperatorExpr& e) {
  OperatorExpr r = ccr_reduce(s, e);
  if (r.is_zero()) return Symbol{};
  int lowest = r.terms().front().f.h;
  for (const auto& t : r.terms()) lowest = std::min<int>(lowest, t.f.h);
  std::vector<Term> lead;
  for (const auto& t : r.terms()) {
    if (t.f.h != lowest) continue;
    if (t.f.divergent())
      throw Error(ErrorCode::Divergent,
                  "the lowest h-order term carries a divergent constant; no classical limit");
    Term c = t;
    c.f.h = 0;
    lead.push_back(std::move(c));
  }
  return Symbol(canonical_terms(s, std::move(lead), Mode::Classical, false));
}

OperatorExpr divide_by_minus_ih(const OperatorExpr& e) {
  std::vector<Term> out = e.terms();
  for (auto& t : out) {
    if (t.f.h == 0)
      throw Error(ErrorCode::Domain, "cannot divide a term without a factor of h by -ih");
    --t.f.h;
    multiply_by_i(t);  // 1/(-i) = i
  }
  return OperatorExpr(std::move(out));
}

CorrespondenceReport correspondence_check(const Session& s, const Symbol& a, const Symbol& b,
                                          Ordering ordering) {
  CorrespondenceReport r;
  OperatorExpr qb = quantize(s, bracket(s, a, b), ordering);
  std::vector<Term> ihq = qb.terms();
  for (auto& t : ihq) {
    ++t.f.h;
    multiply_by_i(t);
  }
  OperatorExpr c = commutator(s, quantize(s, a, ordering), quantize(s, b, ordering));
  r.residual = ccr_reduce(s, c + OperatorExpr(std::move(ihq)));
  for (const auto& t : r.residual.terms())
    (t.fields.empty() ? r.central : r.noncentral).push_back(t);
  return r;
}

namespace {

using Word = std::vector<Factor>;

Word without(const Word& w, std::size_t k) {
  Word r = w;
  r.erase(r.begin() + static_cast<std::ptrdiff_t>(k));
  return r;
}

// Word built from pieces, times (1/ih) [p, q]; empty if the commutator vanishes.
std::vector<Term> expansion_term(const std::vector<const Word*>& pieces, const Factor& p,
                                 const Factor& q) {
  auto k = single_commutator(p, q);
  if (!k) return {};
  Term t;
  t.c = k->c;  // (1/ih) * ih
  for (const Word* w : pieces) t.fields.insert(t.fields.end(), w->begin(), w->end());
  t.deltas.push_back(k->deltas.front());
  if (orient(t.deltas.front()) < 0) t.c = -t.c;
  return {t};
}

// F(y) delta^(k)(x - y) = sum_j C(k, j) F^(j)(x) delta^(k-j)(x - y), applied to
// every operator factor sitting at y.
std::vector<Term> move_to(const Term& t, Var x, Var y) {
  const Delta d = t.deltas.front();
  Term rest = t;
  rest.deltas.clear();
  std::vector<Term> out;
  for (int j = 0; j <= d.d.v[0]; ++j) {
    MultiIndex jj;
    jj.v[0] = static_cast<std::uint8_t>(j);
    for (auto& r : differentiate(rest, y, jj)) {
      r.c *= multi_binomial(d.d, jj);
      for (auto& f : r.fields)
        if (f.arg == y) f.arg = x;
      r.deltas.push_back({x, y, d.d - jj});
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Term> leading_normalized(std::vector<Term> terms, Rational& c0, Formal& f0) {
  if (terms.empty()) return terms;
  c0 = terms.front().c;
  f0 = Formal{};
  f0.h = terms.front().f.h;
  f0.i = terms.front().f.i;
  for (auto& t : terms) {
    if (t.f.h != f0.h || t.f.i != f0.i)
      throw Error(ErrorCode::Internal, "residual terms carry different powers of h or i");
    t.c /= c0;
    t.f.h = 0;
    t.f.i = 0;
  }
  return terms;
}

}  // namespace

ResidualIdentity leibniz_residual(const Session& s, const std::string& f, const std::string& g,
                                  bool ccr) {
  if (s.dimension() != 1)
    throw Error(ErrorCode::Usage, "the residual identity is computed for dimension 1");
  for (const auto* n : {&f, &g})
    if (!s.function_kind(*n)) throw Error(ErrorCode::Usage, "function '" + *n + "' is not declared");
  ResidualIdentity r;
  r.f = f;
  r.g = g;
  const Var x = Var::free(0), y = Var::free(1);
  const Word A{{kPhi, x, {}}, {kPhi, x, MultiIndex::unit(0)}};
  const Word C{{kPi, y, {}}, {kPi, y, {}}};

  std::vector<Term> w1, w2;
  if (ccr) {
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < C.size(); ++j) {
        Word a_lo(A.begin(), A.begin() + static_cast<std::ptrdiff_t>(i));
        Word a_hi(A.begin() + static_cast<std::ptrdiff_t>(i) + 1, A.end());
        Word c_rest = without(C, j);
        for (auto& t : expansion_term({&a_lo, &c_rest, &a_hi}, A[i], C[j]))
          for (auto& m : move_to(t, x, y)) w1.push_back(std::move(m));
        Word c_lo(C.begin(), C.begin() + static_cast<std::ptrdiff_t>(j));
        Word c_hi(C.begin() + static_cast<std::ptrdiff_t>(j) + 1, C.end());
        Word a_rest = without(A, i);
        for (auto& t : expansion_term({&c_lo, &a_rest, &c_hi}, A[i], C[j]))
          for (auto& m : move_to(t, x, y)) w2.push_back(std::move(m));
      }
  }
  combine_like_terms(w1);
  combine_like_terms(w2);
  r.way1 = OperatorExpr(w1);
  r.way2 = OperatorExpr(w2);

  std::vector<Term> diff = w1;
  for (auto t : w2) {
    t.c = -t.c;
    diff.push_back(std::move(t));
  }
  std::vector<Term> reduced =
      ccr ? normal_order(std::move(diff)) : std::move(diff);
  reduced = canonical_terms(s, std::move(reduced), Mode::Quantum, true);
  reduced = substitute_free(std::move(reduced), {{y, Var::origin()}});
  r.residual = canonical_terms(s, std::move(reduced), Mode::Quantum, true);
  r.combination = leading_normalized(r.residual, r.prefactor_rational, r.prefactor);

  // d/dx of delta(x)^2 = delta(0) delta(x), both sides differentiated first.
  Term sq;
  sq.deltas = {{x, Var::origin(), {}}, {x, Var::origin(), {}}};
  Term lin;
  lin.f.div.push_back({DivergentKind::DeltaAtZero, {}});
  lin.deltas = {{x, Var::origin(), {}}};
  std::vector<Term> path = differentiate(lin, x, MultiIndex::unit(0));
  for (auto t : differentiate(sq, x, MultiIndex::unit(0))) {
    t.c = -t.c;
    path.push_back(std::move(t));
  }
  r.differentiated = canonical_terms(s, std::move(path), Mode::Quantum, false);
  Rational c0;
  Formal f0;
  std::vector<Term> norm = leading_normalized(r.differentiated, c0, f0);
  r.paths_agree = !r.combination.empty() && Symbol(norm) == Symbol(r.combination);
  return r;
}

}  // namespace hamalg
