#include "hamalg/core/random.hpp"

#include "hamalg/core/canonical.hpp"

namespace hamalg {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = g_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

namespace {

Rational coefficient(Rng& rng) {
  static const Rational pool[] = {Rational(1), Rational(-1), Rational(1, 2),
                                  Rational(-1, 2), Rational(2), Rational(-2)};
  return pool[rng.below(6)];
}

MultiIndex derivative(const Session& s, Rng& rng, int max_deriv) {
  MultiIndex k;
  int budget = rng.range(0, max_deriv);
  for (int t = 0; t < budget; ++t) ++k.v[rng.below(static_cast<std::uint64_t>(s.dimension()))];
  return k;
}

// One local integral int[x]( c * funcs * fields ).
Term local_term(const Session& s, Rng& rng, const SymbolShape& shape, int grade) {
  Term t;
  t.nd = 1;
  t.c = coefficient(rng);
  const Var x = Var::dummy(0);
  int pis = grade >= 0 ? grade : rng.range(0, shape.max_grade);
  int phis = rng.range(pis == 0 ? 1 : 0, shape.max_phi);
  if (shape.max_degree >= 0) {
    while (pis + phis > shape.max_degree && (phis > 0 || grade < 0)) {
      if (phis > 0 && (grade >= 0 || rng.coin())) --phis;
      else --pis;
    }
    if (pis + phis == 0) phis = 1;
  }
  for (int k = 0; k < phis; ++k) t.fields.push_back({kPhi, x, derivative(s, rng, shape.max_deriv)});
  for (int k = 0; k < pis; ++k) t.fields.push_back({kPi, x, derivative(s, rng, shape.max_deriv)});
  // A linear term is a symbol only with a Schwartz coefficient in front.
  const bool linear = t.fields.size() == 1;
  if (!shape.functions.empty() && (linear || rng.coin())) {
    const auto& name = shape.functions[rng.below(shape.functions.size())];
    auto kind = s.function_kind(name);
    if (!kind) throw Error(ErrorCode::Usage, "function '" + name + "' is not declared");
    t.funcs.push_back({*kind, x, derivative(s, rng, 1)});
  } else if (linear) {
    t.fields.push_back({kPhi, x, derivative(s, rng, shape.max_deriv)});
  }
  return t;
}

}  // namespace

Symbol random_symbol(const Session& s, Rng& rng, const SymbolShape& shape) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Term> terms;
    int n = rng.range(1, shape.max_terms);
    for (int k = 0; k < n; ++k) {
      if (shape.bilocal && rng.below(6) == 0) {
        // grade splits between the two factors
        int g = shape.grade >= 0 ? shape.grade : rng.range(0, shape.max_grade);
        int g1 = rng.range(0, g);
        Term a = local_term(s, rng, shape, g1);
        Term b = local_term(s, rng, shape, g - g1);
        if (shape.max_degree >= 0 &&
            a.fields.size() + b.fields.size() > static_cast<std::size_t>(shape.max_degree)) {
          terms.push_back(local_term(s, rng, shape, shape.grade));
          continue;
        }
        terms.push_back(term_product(a, b));
      } else {
        terms.push_back(local_term(s, rng, shape, shape.grade));
      }
    }
    Symbol r = canonicalize(s, Symbol(std::move(terms)));
    if (!r.is_zero()) return r;
  }
  throw Error(ErrorCode::Internal, "random symbol generator kept producing zero");
}

Symbol random_quadratic_symbol(const Session& s, Rng& rng) {
  SymbolShape shape;
  shape.max_grade = 2;
  shape.max_degree = 2;
  shape.max_terms = 2;
  shape.bilocal = false;
  return random_symbol(s, rng, shape);
}

}  // namespace hamalg
