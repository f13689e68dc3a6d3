#pragma once

#include "hamalg/core/canonical.hpp"

namespace hamalg {

enum class Field { Phi, Pi };

KindCode field_kind(Field f);

/// Variational derivative with respect to `field` at the free variable `y`:
/// each factor field^(a)(x) is replaced in turn by delta^(a)(x - y), then the
/// result is canonicalized. `y` must not already occur in `s`.
Symbol vderiv(const Session& ses, const Symbol& s, Field field, Var y);

/// vderiv applied twice: first (field1, y), then (field2, z).
Symbol second_vderiv(const Session& ses, const Symbol& s, Field field1, Field field2, Var y,
                     Var z);

struct SymbolReport {
  bool is_symbol = true;
  /// Offending terms of the first variational derivatives (free variable y).
  std::vector<Term> phi_witnesses;
  std::vector<Term> pi_witnesses;
};

/// True iff both first variational derivatives are free of deltas touching y.
SymbolReport check_symbol(const Session& ses, const Symbol& s);

/// Smallest free variable that does not occur in any of the terms.
Var fresh_free_variable(std::initializer_list<const std::vector<Term>*> lists);

}  // namespace hamalg
