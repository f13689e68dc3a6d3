#pragma once

#include "hamalg/core/random.hpp"
#include "hamalg/core/variational.hpp"

#include <map>
#include <string>

namespace hamalg {

/// {a, b} = int( da/dpi(y) db/dphi(y) - da/dphi(y) db/dpi(y) ) dy, built from
/// vderiv, multiply and one fresh integration variable. Throws Closure if the
/// result keeps a delta on a free variable or a coincident-point product.
Symbol bracket(const Session& s, const Symbol& a, const Symbol& b);

/// grade (number of pi factors) -> homogeneous component. Zero gives {}.
std::map<int, Symbol> grade_decompose(const Symbol& s);

/// -1 if s is zero or not homogeneous.
int homogeneous_grade(const Symbol& s);

struct LawResult {
  std::string law;
  bool passed = true;
  int samples = 0;
  std::string counterexample;  // empty when passed
};

struct AlgebraReport {
  std::uint64_t seed = 0;
  std::vector<LawResult> laws;
  bool passed() const;
  std::string text() const;
  std::string json() const;
};

struct AlgebraOptions {
  std::uint64_t seed = 42;
  int samples = 100;
  int max_grade = 3;
  int max_deriv = 2;
};

/// Antisymmetry, bilinearity, Leibniz, Jacobi, closure and the grading law on
/// seeded random symbols. Failures are report entries, not exceptions.
AlgebraReport check_algebra(const Session& s, const AlgebraOptions& opt);

}  // namespace hamalg
