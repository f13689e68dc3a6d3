#pragma once

#include "hamalg/core/expr.hpp"

#include <string>
#include <variant>

namespace hamalg {

/// Result of parsing: `int` blocks give a Symbol, `qint` blocks an
/// OperatorExpr whose words keep source order. Terms come back raw (not
/// canonicalized).
using Parsed = std::variant<Symbol, OperatorExpr>;

/// Grammar:
///   expr   := ['+'|'-'] term {('+'|'-') term}
///   term   := unary {('*'|'/') unary}
///   unary  := '-' unary | power
///   power  := atom ['^' ['-'] integer]
///   atom   := integer | '(' expr ')' | ('int'|'qint') '[' vars ']' '(' expr ')'
///           | phi(v) | pi(v) | Phi(v) | Pi(v) | name(v)
///           | D(field|name, k)(v) | delta(v - v [; k]) | delta(v [; k])
///           | delta0(k) | deltasq | vol | h | i | m
///   k      := integer | '(' integer {',' integer} ')'
///   v      := variable name, or 0 for the origin
Parsed parse(const Session& s, const std::string& src);

/// Parse and require a classical expression (no qint).
Symbol parse_symbol(const Session& s, const std::string& src);
/// Parse and require an operator expression; plain constants are accepted.
OperatorExpr parse_operator(const Session& s, const std::string& src);

enum class FormatStyle {
  Canonical,  // int[x]( (1/2)*phi(x)^2 + (1/2)*pi(x)^2 )
  Compact,    // -4*int[x](phi(x)*pi(x)): scalar pulled out of single terms
};

std::string format(const Session& s, const Symbol& sym, FormatStyle style = FormatStyle::Canonical);
std::string format(const Session& s, const OperatorExpr& e, FormatStyle style = FormatStyle::Canonical);
/// Format a bare term list; `ordered` selects operator spelling (Phi, Pi).
std::string format_terms(const Session& s, const std::vector<Term>& terms, bool ordered,
                         FormatStyle style);
/// The scalar part of a coefficient (rational, i, h, m, divergent constants).
std::string format_scalar(const Rational& c, const Formal& f);

/// JSON AST (one object per term), keys in a fixed order.
std::string to_json(const Session& s, const Symbol& sym, int indent = -1);
std::string to_json(const Session& s, const OperatorExpr& e, int indent = -1);

}  // namespace hamalg
