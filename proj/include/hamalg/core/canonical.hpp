#pragma once

#include "hamalg/core/expr.hpp"

#include <vector>

namespace hamalg {

/// Classical mode rejects coincident-point delta products (they signal a
/// pipeline bug); quantum mode turns them into divergent constants.
enum class Mode { Classical, Quantum };

/// Canonical form of a list of terms:
///  1. contract every delta touching an integration dummy, moving its
///     derivatives onto the rest of the integrand;
///  2. Taylor-move factors along deltas between free variables / the origin
///     so that each connected group hangs off its greatest variable;
///  3. integration-by-parts normal form inside each single-variable
///     integrand (skipped for ordered words that are not normal-ordered);
///  4. canonical dummy numbering, sorting, merging of like terms.
/// `ordered` keeps field words in operator order.
std::vector<Term> canonical_terms(const Session& s, std::vector<Term> terms, Mode mode,
                                  bool ordered);

Symbol canonicalize(const Session& s, const Symbol& sym, Mode mode = Mode::Classical);
OperatorExpr canonicalize(const Session& s, const OperatorExpr& e);

/// Canonical product; commutative, associative, grades add.
Symbol multiply(const Session& s, const Symbol& a, const Symbol& b);
/// Ordered product a*b (no commutation relations applied).
OperatorExpr multiply(const Session& s, const OperatorExpr& a, const OperatorExpr& b);

/// Structural equality of canonical forms.
bool equals(const Session& s, const Symbol& a, const Symbol& b);

/// True iff every field word is normal ordered (all phi before all pi).
bool is_normal_ordered(const Term& t);

/// Turn the free variable `v` into a new integration dummy and canonicalize.
Symbol integrate_free(const Session& s, const Symbol& sym, Var v, Mode mode = Mode::Classical);

/// Replace free variables according to `map` (pairs from -> to); `to` may be
/// the origin or another free variable. No canonicalization.
std::vector<Term> substitute_free(std::vector<Term> terms,
                                  const std::vector<std::pair<Var, Var>>& map);

/// D_v^k applied to the term's dependence on `v` (fields, functions and
/// deltas), by the general Leibniz rule. Used by contraction, IBP and the
/// quantum module's explicit Taylor moves.
std::vector<Term> differentiate(const Term& t, Var v, const MultiIndex& k);

/// Merge like terms and drop zeros; result sorted structurally.
void combine_like_terms(std::vector<Term>& terms);

/// Put a delta into canonical orientation (left < right), returning the sign.
int orient(Delta& d);

}  // namespace hamalg
