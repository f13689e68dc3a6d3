#include "hamalg/core/canonical.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

namespace hamalg {

namespace {

// Placeholder argument that hides a slot from differentiate().
constexpr Var kHidden{VarKind::Dummy, 0xFFFF};

template <class F>
void for_each_var(Term& t, F&& fn) {
  for (auto& x : t.fields) fn(x.arg);
  for (auto& x : t.funcs) fn(x.arg);
  for (auto& d : t.deltas) {
    fn(d.left);
    fn(d.right);
  }
}

void substitute(Term& t, Var from, Var to) {
  for_each_var(t, [&](Var& v) {
    if (v == from) v = to;
  });
}

// Drop dummy `v` (already unused) and close the gap in the numbering.
void remove_dummy(Term& t, Var v) {
  for_each_var(t, [&](Var& w) {
    if (w.is_dummy() && w.id > v.id && w != kHidden) --w.id;
  });
  --t.nd;
}

void add_divergent(Term& t, DivergentConstant c) {
  t.f.div.insert(std::upper_bound(t.f.div.begin(), t.f.div.end(), c), c);
}

struct Slot {
  enum Type { Field, Func, DeltaLeft, DeltaRight } type;
  std::size_t index;
};

void expand(const Term& base, const std::vector<Slot>& slots, std::size_t at,
            const MultiIndex& remaining, long coef, Term& cur,
            std::vector<Term>& out) {
  auto bump = [&](Term& t, const Slot& s, const MultiIndex& j) -> int {
    switch (s.type) {
      case Slot::Field: t.fields[s.index].d = t.fields[s.index].d + j; return 1;
      case Slot::Func: t.funcs[s.index].d = t.funcs[s.index].d + j; return 1;
      case Slot::DeltaLeft: t.deltas[s.index].d = t.deltas[s.index].d + j; return 1;
      case Slot::DeltaRight:
        t.deltas[s.index].d = t.deltas[s.index].d + j;
        return parity_sign(j);
    }
    return 1;
  };
  if (at + 1 == slots.size()) {
    Term t = cur;
    int sg = bump(t, slots[at], remaining);
    t.c = base.c * (coef * sg);
    out.push_back(std::move(t));
    return;
  }
  MultiIndex j;
  for (j.v[0] = 0; j.v[0] <= remaining.v[0]; ++j.v[0])
    for (j.v[1] = 0; j.v[1] <= remaining.v[1]; ++j.v[1])
      for (j.v[2] = 0; j.v[2] <= remaining.v[2]; ++j.v[2]) {
        Term next = cur;
        int sg = bump(next, slots[at], j);
        long c = coef * multi_binomial(remaining, j) * sg;
        expand(base, slots, at + 1, remaining - j, c, next, out);
      }
}

}  // namespace

int orient(Delta& d) {
  if (d.right < d.left) {
    std::swap(d.left, d.right);
    return parity_sign(d.d);
  }
  return 1;
}

std::vector<Term> differentiate(const Term& t, Var v, const MultiIndex& k) {
  if (k.zero()) return {t};
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < t.fields.size(); ++i)
    if (t.fields[i].arg == v) slots.push_back({Slot::Field, i});
  for (std::size_t i = 0; i < t.funcs.size(); ++i)
    if (t.funcs[i].arg == v) slots.push_back({Slot::Func, i});
  for (std::size_t i = 0; i < t.deltas.size(); ++i) {
    if (t.deltas[i].left == v) slots.push_back({Slot::DeltaLeft, i});
    else if (t.deltas[i].right == v) slots.push_back({Slot::DeltaRight, i});
  }
  std::vector<Term> out;
  if (slots.empty()) return out;
  Term cur = t;
  expand(t, slots, 0, k, 1, cur, out);
  combine_like_terms(out);
  return out;
}

void combine_like_terms(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return compare_structure(a, b) < 0;
  });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && same_structure(out.back(), t)) {
      out.back().c += t.c;
    } else {
      if (!out.empty() && out.back().c == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().c == 0) out.pop_back();
  terms = std::move(out);
}

bool is_normal_ordered(const Term& t) {
  bool seen_pi = false;
  for (const auto& x : t.fields) {
    if (x.kind == kPi) seen_pi = true;
    else if (seen_pi) return false;
  }
  return true;
}

namespace {

class Canonicalizer {
 public:
  Canonicalizer(const Session& s, Mode mode, bool ordered)
      : s_(s), mode_(mode), ordered_(ordered) {}

  std::vector<Term> run(std::vector<Term> terms) {
    std::vector<Term> mid;
    for (auto& t : terms) {
      validate(t);
      if (t.c == 0) continue;
      fix_deltas(t);
      for (auto& c : contract(std::move(t)))
        for (auto& m : move_external(std::move(c))) mid.push_back(std::move(m));
    }
    // Merge before the expensive integration-by-parts step.
    for (auto& t : mid) finish(t);
    combine_like_terms(mid);
    std::vector<Term> out;
    for (auto& t : mid)
      for (auto& n : normalize_parts(std::move(t))) out.push_back(std::move(n));
    for (auto& t : out) {
      finish(t);
      check_bounds(t);
    }
    combine_like_terms(out);
    return out;
  }

 private:
  const Session& s_;
  Mode mode_;
  bool ordered_;

  void validate(const Term& t) const {
    auto check_var = [&](Var v) {
      if (v.is_dummy() && v.id >= t.nd)
        throw Error(ErrorCode::Internal, "term references an undeclared integration variable");
    };
    for (const auto& x : t.fields) {
      check_var(x.arg);
      if (!is_field(x.kind)) throw Error(ErrorCode::Internal, "field factor with a function kind");
      s_.check_order(x.d);
    }
    for (const auto& x : t.funcs) {
      check_var(x.arg);
      if (x.kind >= s_.functions().size())
        throw Error(ErrorCode::Usage, "undeclared function in term");
      s_.check_order(x.d);
    }
    for (const auto& d : t.deltas) {
      check_var(d.left);
      check_var(d.right);
      s_.check_order(d.d);
    }
  }

  void check_bounds(const Term& t) const {
    for (const auto& x : t.fields) s_.check_order(x.d);
    for (const auto& x : t.funcs) s_.check_order(x.d);
    for (const auto& d : t.deltas) s_.check_order(d.d);
  }

  // Orientation plus coincident-point handling. Returns false if the term
  // vanished (never happens today; kept for symmetry with callers).
  bool fix_deltas(Term& t) const {
    for (std::size_t i = 0; i < t.deltas.size();) {
      Delta& d = t.deltas[i];
      if (d.left == d.right) {
        if (mode_ == Mode::Classical)
          throw Error(ErrorCode::Divergent,
                      "coincident-point delta product in a classical term");
        add_divergent(t, {DivergentKind::DeltaAtZero, d.d});
        t.deltas.erase(t.deltas.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      if (orient(d) < 0) t.c = -t.c;
      ++i;
    }
    return true;
  }

  static int pick_dummy_delta(const Term& t) {
    int best = -1;
    for (std::size_t i = 0; i < t.deltas.size(); ++i) {
      const Delta& d = t.deltas[i];
      if (!d.left.is_dummy() && !d.right.is_dummy()) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      const Delta& b = t.deltas[best];
      if (d.d < b.d || (d.d == b.d && d < b)) best = static_cast<int>(i);
    }
    return best;
  }

  // Step 1: integrate out every dummy that appears in a delta.
  std::vector<Term> contract(Term t) const {
    std::vector<Term> work{std::move(t)}, out;
    while (!work.empty()) {
      Term u = std::move(work.back());
      work.pop_back();
      int di = pick_dummy_delta(u);
      if (di < 0) {
        drop_vacuous(u);
        out.push_back(std::move(u));
        continue;
      }
      Delta dl = u.deltas[di];
      u.deltas.erase(u.deltas.begin() + di);
      Var v, keep;
      int sign;
      if (dl.right.is_dummy()) {
        v = dl.right, keep = dl.left, sign = 1;
      } else {
        v = dl.left, keep = dl.right, sign = parity_sign(dl.d);
      }
      for (auto& r : differentiate(u, v, dl.d)) {
        if (sign < 0) r.c = -r.c;
        substitute(r, v, keep);
        remove_dummy(r, v);
        fix_deltas(r);
        work.push_back(std::move(r));
      }
    }
    return out;
  }

  void drop_vacuous(Term& t) const {
    for (int id = t.nd - 1; id >= 0; --id) {
      Var v = Var::dummy(id);
      bool used = false;
      for (const auto& x : t.fields) used |= x.arg == v;
      for (const auto& x : t.funcs) used |= x.arg == v;
      if (used) continue;
      if (mode_ == Mode::Classical)
        throw Error(ErrorCode::Divergent,
                    "integration variable with an empty integrand (divergent volume)");
      add_divergent(t, {DivergentKind::Volume, {}});
      remove_dummy(t, v);
    }
  }

  // Step 2: for each free variable u joined to a greater variable by a delta,
  // Taylor-move everything else that depends on u onto the anchor's far end.
  std::vector<Term> move_external(Term t) const {
    std::vector<Term> work{std::move(t)}, out;
    while (!work.empty()) {
      Term u = std::move(work.back());
      work.pop_back();
      auto moved = move_once(u);
      if (!moved) {
        out.push_back(std::move(u));
        continue;
      }
      for (auto& r : *moved) work.push_back(std::move(r));
    }
    return out;
  }

  std::optional<std::vector<Term>> move_once(const Term& t) const {
    std::vector<Var> lefts;
    for (const auto& d : t.deltas)
      if (d.left.is_free()) lefts.push_back(d.left);
    std::sort(lefts.begin(), lefts.end());
    lefts.erase(std::unique(lefts.begin(), lefts.end()), lefts.end());
    for (Var u : lefts) {
      int anchor = -1;
      for (std::size_t i = 0; i < t.deltas.size(); ++i) {
        const Delta& d = t.deltas[i];
        if (d.left != u) continue;
        if (anchor < 0) {
          anchor = static_cast<int>(i);
          continue;
        }
        const Delta& a = t.deltas[anchor];
        if (d.d < a.d || (d.d == a.d && d.right < a.right)) anchor = static_cast<int>(i);
      }
      bool busy = false;
      for (const auto& x : t.fields) busy |= x.arg == u;
      for (const auto& x : t.funcs) busy |= x.arg == u;
      for (std::size_t i = 0; i < t.deltas.size(); ++i)
        if (static_cast<int>(i) != anchor && (t.deltas[i].left == u || t.deltas[i].right == u))
          busy = true;
      if (!busy) continue;

      Term rest = t;
      const Delta a = t.deltas[anchor];
      rest.deltas.erase(rest.deltas.begin() + anchor);
      std::vector<Term> result;
      MultiIndex j;
      for (j.v[0] = 0; j.v[0] <= a.d.v[0]; ++j.v[0])
        for (j.v[1] = 0; j.v[1] <= a.d.v[1]; ++j.v[1])
          for (j.v[2] = 0; j.v[2] <= a.d.v[2]; ++j.v[2]) {
            Rational coef = multi_binomial(a.d, j) * parity_sign(j);
            for (auto& r : differentiate(rest, u, j)) {
              r.c *= coef;
              substitute(r, u, a.right);
              r.deltas.push_back({u, a.right, a.d - j});
              fix_deltas(r);
              result.push_back(std::move(r));
            }
          }
      return result;
    }
    return std::nullopt;
  }

  // Step 3: integration-by-parts normal form per single-variable integrand.
  std::vector<Term> normalize_parts(Term t) const {
    if (ordered_ && !is_normal_ordered(t)) return {std::move(t)};
    std::vector<Term> cur{std::move(t)};
    const int nd = cur.front().nd;
    for (int id = 0; id < nd; ++id) {
      std::vector<Term> next;
      for (const auto& u : cur)
        for (auto& r : project(u, Var::dummy(id))) next.push_back(std::move(r));
      cur = std::move(next);
    }
    return cur;
  }

  using Mono = std::vector<std::pair<KindCode, MultiIndex>>;
  using Projection = std::vector<std::pair<Rational, Mono>>;

  // Pi depends only on the multiset of (kind, order) at x, so results are
  // memoized per thread.
  std::vector<Term> project(const Term& t, Var x) const {
    Mono key = cluster_key(t, x);
    if (key.empty()) return {t};
    const Projection& proj = projection(key);
    Term rest = t;
    auto at_x = [&](const Factor& f) { return f.arg == x; };
    rest.fields.erase(std::remove_if(rest.fields.begin(), rest.fields.end(), at_x),
                      rest.fields.end());
    rest.funcs.erase(std::remove_if(rest.funcs.begin(), rest.funcs.end(), at_x),
                     rest.funcs.end());
    std::vector<Term> out;
    out.reserve(proj.size());
    for (const auto& [c, mono] : proj) {
      Term r = rest;
      r.c *= c;
      for (const auto& [kind, d] : mono)
        (is_field(kind) ? r.fields : r.funcs).push_back({kind, x, d});
      out.push_back(std::move(r));
    }
    return out;
  }

  const Projection& projection(const Mono& key) const {
    thread_local std::map<std::pair<bool, Mono>, Projection> cache;
    const bool fault = s_.fault() == Fault::CanonicalizerSign;
    auto k = std::make_pair(fault, key);
    if (auto it = cache.find(k); it != cache.end()) return it->second;
    if (cache.size() > 200000) cache.clear();
    Term t;
    t.nd = 1;
    const Var x = Var::dummy(0);
    for (const auto& [kind, d] : key) (is_field(kind) ? t.fields : t.funcs).push_back({kind, x, d});
    Projection p;
    for (const auto& r : project_slow(t, x, fault)) p.emplace_back(r.c, cluster_key(r, x));
    return cache.emplace(std::move(k), std::move(p)).first->second;
  }

  // Pi(M) = (1/mu) sum_j (-1)^|k_j| a_0 D^{k_j}(M / a_{k_j}), where a is the
  // greatest kind at x and mu its multiplicity. A projection whose kernel is
  // exactly the total derivatives.
  static std::vector<Term> project_slow(const Term& t, Var x, bool fault) {
    KindCode top = 0;
    bool any = false;
    for (const auto& f : t.fields)
      if (f.arg == x) top = any ? std::max(top, f.kind) : f.kind, any = true;
    for (const auto& f : t.funcs)
      if (f.arg == x) top = any ? std::max(top, f.kind) : f.kind, any = true;
    if (!any) return {t};
    const bool in_fields = is_field(top);
    const auto& slots = in_fields ? t.fields : t.funcs;
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].arg == x && slots[i].kind == top) picks.push_back(i);
    const Rational inv_mu(1, static_cast<unsigned long>(picks.size()));

    std::vector<Term> out;
    for (std::size_t i : picks) {
      Term base = t;
      auto& slot = in_fields ? base.fields[i] : base.funcs[i];
      const MultiIndex k = slot.d;
      slot.d = MultiIndex{};
      slot.arg = kHidden;
      const int sign = fault ? 1 : parity_sign(k);
      for (auto& r : differentiate(base, x, k)) {
        substitute(r, kHidden, x);
        r.c *= inv_mu * sign;
        out.push_back(std::move(r));
      }
    }
    for (auto& r : out) {
      std::sort(r.fields.begin(), r.fields.end());
      std::sort(r.funcs.begin(), r.funcs.end());
    }
    combine_like_terms(out);
    return out;
  }

  static std::vector<std::pair<KindCode, MultiIndex>> cluster_key(const Term& t, Var x) {
    std::vector<std::pair<KindCode, MultiIndex>> key;
    for (const auto& f : t.funcs)
      if (f.arg == x) key.emplace_back(f.kind, f.d);
    for (const auto& f : t.fields)
      if (f.arg == x) key.emplace_back(f.kind, f.d);
    std::sort(key.begin(), key.end());
    return key;
  }

  // Step 4: canonical dummy numbering, sorting, formal constant merge.
  void finish(Term& t) const {
    const bool word = ordered_ && !is_normal_ordered(t);
    std::vector<int> order;  // new position -> old id
    if (word) {
      std::vector<bool> seen(t.nd, false);
      for (const auto& f : t.fields)
        if (f.arg.is_dummy() && !seen[f.arg.id]) {
          seen[f.arg.id] = true;
          order.push_back(f.arg.id);
        }
      std::vector<int> rest;
      for (int id = 0; id < t.nd; ++id)
        if (!seen[id]) rest.push_back(id);
      std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
        return cluster_key(t, Var::dummy(a)) < cluster_key(t, Var::dummy(b));
      });
      order.insert(order.end(), rest.begin(), rest.end());
    } else {
      order.resize(t.nd);
      std::iota(order.begin(), order.end(), 0);
      std::vector<std::vector<std::pair<KindCode, MultiIndex>>> keys(t.nd);
      for (int id = 0; id < t.nd; ++id) keys[id] = cluster_key(t, Var::dummy(id));
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return keys[a] < keys[b]; });
    }
    std::vector<std::uint16_t> to(t.nd);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      to[order[pos]] = static_cast<std::uint16_t>(pos);
    for_each_var(t, [&](Var& v) {
      if (v.is_dummy()) v.id = to[v.id];
    });
    if (!word) std::sort(t.fields.begin(), t.fields.end());
    std::sort(t.funcs.begin(), t.funcs.end());
    std::sort(t.deltas.begin(), t.deltas.end());
    merge_divergent(t.f);
  }

  // delta0(0) * vol == deltasq; keep the merged form canonical.
  static void merge_divergent(Formal& f) {
    int zeros = 0, vols = 0;
    SmallVec<DivergentConstant, 2> other;
    for (const auto& c : f.div) {
      if (c.kind == DivergentKind::DeltaSquaredIntegral) {
        ++zeros, ++vols;
      } else if (c.kind == DivergentKind::Volume) {
        ++vols;
      } else if (c.kind == DivergentKind::DeltaAtZero && c.d.zero()) {
        ++zeros;
      } else {
        other.push_back(c);
      }
    }
    const int pairs = std::min(zeros, vols);
    for (int k = 0; k < pairs; ++k) other.push_back({DivergentKind::DeltaSquaredIntegral, {}});
    for (int k = pairs; k < zeros; ++k) other.push_back({DivergentKind::DeltaAtZero, {}});
    for (int k = pairs; k < vols; ++k) other.push_back({DivergentKind::Volume, {}});
    std::sort(other.begin(), other.end());
    f.div = std::move(other);
  }
};

}  // namespace

std::vector<Term> canonical_terms(const Session& s, std::vector<Term> terms, Mode mode,
                                  bool ordered) {
  return Canonicalizer(s, mode, ordered).run(std::move(terms));
}

Symbol canonicalize(const Session& s, const Symbol& sym, Mode mode) {
  return Symbol(canonical_terms(s, sym.terms(), mode, false));
}

OperatorExpr canonicalize(const Session& s, const OperatorExpr& e) {
  return OperatorExpr(canonical_terms(s, e.terms(), Mode::Quantum, true));
}

Symbol multiply(const Session& s, const Symbol& a, const Symbol& b) {
  std::vector<Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& x : a.terms())
    for (const auto& y : b.terms()) out.push_back(term_product(x, y));
  return Symbol(canonical_terms(s, std::move(out), Mode::Classical, false));
}

OperatorExpr multiply(const Session& s, const OperatorExpr& a, const OperatorExpr& b) {
  std::vector<Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& x : a.terms())
    for (const auto& y : b.terms()) out.push_back(term_product(x, y));
  return OperatorExpr(canonical_terms(s, std::move(out), Mode::Quantum, true));
}

bool equals(const Session& s, const Symbol& a, const Symbol& b) {
  return canonicalize(s, a) == canonicalize(s, b);
}

std::vector<Term> substitute_free(std::vector<Term> terms,
                                  const std::vector<std::pair<Var, Var>>& map) {
  for (auto& t : terms)
    for_each_var(t, [&](Var& v) {
      for (const auto& [from, to] : map)
        if (v == from) {
          v = to;
          break;
        }
    });
  return terms;
}

Symbol integrate_free(const Session& s, const Symbol& sym, Var v, Mode mode) {
  std::vector<Term> terms = sym.terms();
  for (auto& t : terms) {
    Var d = Var::dummy(t.nd);
    ++t.nd;
    substitute(t, v, d);
  }
  return Symbol(canonical_terms(s, std::move(terms), mode, false));
}

}  // namespace hamalg
