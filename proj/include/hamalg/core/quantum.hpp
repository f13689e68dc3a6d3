#pragma once

#include "hamalg/core/poisson.hpp"

namespace hamalg {

enum class Ordering { Normal, Weyl };

/// Symbol -> operator. Normal: every word written phi...phi pi...pi. Weyl:
/// each word averaged over its distinct orderings with equal weights.
OperatorExpr quantize(const Session& s, const Symbol& sym, Ordering ordering);

/// Normal order every word using [phi(x), pi(y)] = i h delta(x - y).
/// Coincident-point contractions become divergent constants.
OperatorExpr ccr_reduce(const Session& s, const OperatorExpr& e);

/// ccr_reduce(a b - b a).
OperatorExpr commutator(const Session& s, const OperatorExpr& a, const OperatorExpr& b);

/// Lowest h-order part with h stripped, order forgotten, canonicalized.
/// Throws Divergent if that part carries a divergent constant.
Symbol classical_limit(const Session& s, const OperatorExpr& e);

/// Multiply by 1/(-i h). Throws Domain on a term without a factor of h.
OperatorExpr divide_by_minus_ih(const OperatorExpr& e);

struct CorrespondenceReport {
  OperatorExpr residual;           // commutator(Q a, Q b) + i h Q({a, b}), reduced
  std::vector<Term> noncentral;    // terms with field factors: must be empty
  std::vector<Term> central;       // c-number terms, possibly divergent
  bool passed() const { return noncentral.empty(); }
};

CorrespondenceReport correspondence_check(const Session& s, const Symbol& a, const Symbol& b,
                                          Ordering ordering);

struct ResidualIdentity {
  std::string f, g;
  /// (1/ih)[phi(x) phi'(x), pi(y)^2] expanded by the Leibniz rule on the
  /// left factor (way1) and on the right factor (way2), operators moved to x.
  OperatorExpr way1, way2;
  /// (way1 - way2) after normal ordering with coincident limits, y := 0.
  std::vector<Term> residual;
  /// residual = prefactor * combination, combination has leading coefficient 1.
  Rational prefactor_rational{0};
  Formal prefactor;
  std::vector<Term> combination;
  /// d/dx[delta(0) delta(x)] - d/dx[delta(x) delta(x)], canonicalized.
  std::vector<Term> differentiated;
  bool paths_agree = false;  // both combinations equal up to a scalar
};

/// The two-way Leibniz expansion of [int f phi phi', int g pi^2]. With
/// `ccr` false the commutators are dropped and the residual is zero.
ResidualIdentity leibniz_residual(const Session& s, const std::string& f, const std::string& g,
                                  bool ccr = true);

}  // namespace hamalg
