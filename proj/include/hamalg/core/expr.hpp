#pragma once

#include "hamalg/core/session.hpp"
#include "hamalg/core/types.hpp"

#include <vector>

namespace hamalg {

/// A finite sum of classical terms: a polynomial functional of (phi, pi).
/// Terms may also carry free variables (variational derivatives) and formal
/// constants. Canonical form is produced by canonicalize().
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static Symbol constant(const Rational& c);

  const std::vector<Term>& terms() const { return terms_; }
  std::vector<Term>& terms() { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Structural identity of the stored terms (call on canonical forms).
  friend bool operator==(const Symbol& a, const Symbol& b);

 private:
  std::vector<Term> terms_;
};

/// Sum of ordered operator words over the canonical commutation relations.
class OperatorExpr {
 public:
  OperatorExpr() = default;
  explicit OperatorExpr(std::vector<Term> terms) : terms_(std::move(terms)) {}

  const std::vector<Term>& terms() const { return terms_; }
  std::vector<Term>& terms() { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// True iff some coefficient carries a divergent constant.
  bool divergent() const;

  friend bool operator==(const OperatorExpr& a, const OperatorExpr& b);

 private:
  std::vector<Term> terms_;
};

/// Product of two terms; the second term's dummies are renamed apart. For
/// ordered products the field words are concatenated a then b.
Term term_product(const Term& a, const Term& b);

void multiply_formal(Term& t, const Formal& f);
/// Multiply a term by i (folding i^2 into the sign).
void multiply_by_i(Term& t);

Symbol operator+(const Symbol& a, const Symbol& b);
Symbol operator-(const Symbol& a, const Symbol& b);
Symbol operator*(const Rational& c, const Symbol& s);
OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr operator*(const Rational& c, const OperatorExpr& s);

/// Forget operator order (keeps everything else).
Symbol forget_order(const OperatorExpr& e);

}  // namespace hamalg
