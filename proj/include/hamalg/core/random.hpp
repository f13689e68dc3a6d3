#pragma once

#include "hamalg/core/expr.hpp"

#include <cstdint>
#include <random>

namespace hamalg {

/// Seeded source with draws that do not depend on the standard library's
/// distribution implementations, so corpora are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  /// Uniform double in [0, 1).
  double uniform();
  bool coin() { return below(2) == 1; }

 private:
  std::mt19937_64 g_;
};

struct SymbolShape {
  int max_grade = 3;       // pi factors per term
  int max_phi = 2;         // phi factors per term
  int max_deriv = 2;       // derivative order per factor
  int max_terms = 2;
  int grade = -1;          // >= 0: every term has exactly this many pi factors
  int max_degree = 3;      // >= 0: cap on total field degree per term
  bool bilocal = true;     // occasionally emit products of two local integrals
  std::vector<std::string> functions{"f", "g"};
};

/// Random canonical symbol; never zero. Coefficients from {+-1, +-1/2, +-2}.
Symbol random_symbol(const Session& s, Rng& rng, const SymbolShape& shape);

/// Quadratic corpus: total field degree 1 or 2 per term.
Symbol random_quadratic_symbol(const Session& s, Rng& rng);

}  // namespace hamalg
