#pragma once

// Value types shared by every module: variables, multi-indices, factors,
// deltas, formal coefficients and terms.

#include <boost/container/small_vector.hpp>
#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamalg {

using Rational = mpq_class;

template <class T, std::size_t N>
using SmallVec = boost::container::small_vector<T, N>;

template <class T, std::size_t N>
std::strong_ordering lex_compare(const SmallVec<T, N>& a, const SmallVec<T, N>& b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

inline constexpr int kMaxDim = 3;

enum class ErrorCode {
  Usage,
  Parse,
  Domain,          // precondition violated: not a symbol, caustic, unbound name...
  Divergent,       // a divergent constant where a finite quantity is required
  Closure,         // bracket output left the admissible class
  DerivativeBound, // derivative order above the session maximum
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorCode::Parse, "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Derivative multi-index. Entries past the session dimension stay zero.
struct MultiIndex {
  std::array<std::uint8_t, kMaxDim> v{};

  static MultiIndex unit(int dir) {
    MultiIndex m;
    m.v[dir] = 1;
    return m;
  }
  int total() const {
    int s = 0;
    for (auto x : v) s += x;
    return s;
  }
  bool zero() const { return total() == 0; }
  int max_entry() const {
    int s = 0;
    for (auto x : v) s = x > s ? x : s;
    return s;
  }
  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r;
    for (int d = 0; d < kMaxDim; ++d) r.v[d] = static_cast<std::uint8_t>(v[d] + o.v[d]);
    return r;
  }
  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r;
    for (int d = 0; d < kMaxDim; ++d) r.v[d] = static_cast<std::uint8_t>(v[d] - o.v[d]);
    return r;
  }
  bool le(const MultiIndex& o) const {
    for (int d = 0; d < kMaxDim; ++d)
      if (v[d] > o.v[d]) return false;
    return true;
  }
  // Total degree first so that printing and sorting read naturally.
  std::strong_ordering operator<=>(const MultiIndex& o) const {
    if (auto c = total() <=> o.total(); c != 0) return c;
    return v <=> o.v;
  }
  bool operator==(const MultiIndex&) const = default;
};

/// (-1)^|k|
inline int parity_sign(const MultiIndex& k) { return (k.total() % 2) ? -1 : 1; }

/// prod_d C(k_d, j_d)
long multi_binomial(const MultiIndex& k, const MultiIndex& j);

enum class VarKind : std::uint8_t { Dummy = 0, Free = 1, Origin = 2 };

/// Integration dummy, free variable (named from a fixed list) or the origin.
/// The global order puts dummies first and the origin last, so an anchored
/// delta always has the origin on the right.
struct Var {
  VarKind kind = VarKind::Dummy;
  std::uint16_t id = 0;

  static Var dummy(int i) { return {VarKind::Dummy, static_cast<std::uint16_t>(i)}; }
  static Var free(int i) { return {VarKind::Free, static_cast<std::uint16_t>(i)}; }
  static Var origin() { return {VarKind::Origin, 0}; }
  bool is_dummy() const { return kind == VarKind::Dummy; }
  bool is_free() const { return kind == VarKind::Free; }
  bool is_origin() const { return kind == VarKind::Origin; }
  auto operator<=>(const Var&) const = default;
};

/// Names available to free variables; dummies are printed from the same list,
/// skipping names already taken by free variables.
const std::vector<std::string>& variable_names();
int free_variable_id(const std::string& name);  // -1 if not in the list
std::string variable_name(int list_index);       // extends past the list with x1, x2, ...

/// Kind codes: named functions take their index in the session's sorted name
/// table; the two fields sort after every function.
using KindCode = std::uint16_t;
inline constexpr KindCode kPhi = 0xFF00;
inline constexpr KindCode kPi = 0xFF01;
inline bool is_field(KindCode k) { return k == kPhi || k == kPi; }

/// phi^(d)(arg), pi^(d)(arg) or a named coefficient function f^(d)(arg).
struct Factor {
  KindCode kind = kPhi;
  Var arg;
  MultiIndex d;
  auto operator<=>(const Factor&) const = default;
};

/// delta^(d)(left - right); right may be the origin (anchored delta).
struct Delta {
  Var left;
  Var right;
  MultiIndex d;
  auto operator<=>(const Delta& o) const {
    if (auto c = left <=> o.left; c != 0) return c;
    if (auto c = right <=> o.right; c != 0) return c;
    return d <=> o.d;
  }
  bool operator==(const Delta&) const = default;
};

enum class DivergentKind : std::uint8_t {
  DeltaAtZero = 0,          // delta^(k)(0)
  DeltaSquaredIntegral = 1, // \int\int delta(x - x')^2 dx dx'
  Volume = 2,               // \int dx over an empty integrand
};

struct DivergentConstant {
  DivergentKind kind = DivergentKind::DeltaAtZero;
  MultiIndex d;
  auto operator<=>(const DivergentConstant&) const = default;
};

/// The non-rational part of a coefficient: h^h * i^i * m^m * (divergent constants).
/// i is kept in {0, 1}; i^2 folds into the rational sign.
struct Formal {
  std::uint16_t h = 0;
  std::uint8_t i = 0;
  std::int16_t m = 0;
  SmallVec<DivergentConstant, 2> div;  // sorted

  bool divergent() const { return !div.empty(); }
  std::strong_ordering operator<=>(const Formal& o) const {
    if (auto c = h <=> o.h; c != 0) return c;
    if (auto c = i <=> o.i; c != 0) return c;
    if (auto c = m <=> o.m; c != 0) return c;
    return lex_compare(div, o.div);
  }
  bool operator==(const Formal& o) const { return (*this <=> o) == 0; }
};

/// One integral term. `fields` is an operator word in ordered (quantum)
/// expressions and a sorted multiset otherwise. Dummies are 0..nd-1.
struct Term {
  Rational c{1};
  Formal f;
  std::uint16_t nd = 0;
  SmallVec<Factor, 6> fields;
  SmallVec<Factor, 6> funcs;
  SmallVec<Delta, 3> deltas;

  int pi_degree() const {
    int n = 0;
    for (const auto& x : fields) n += x.kind == kPi;
    return n;
  }
};

/// Structural order on terms ignoring the rational scalar.
std::strong_ordering compare_structure(const Term& a, const Term& b);
inline bool same_structure(const Term& a, const Term& b) {
  return compare_structure(a, b) == 0;
}

}  // namespace hamalg
