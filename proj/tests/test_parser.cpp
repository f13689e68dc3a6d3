#include <doctest.h>

#include "hamalg/core/canonical.hpp"
#include "hamalg/core/json.hpp"
#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"
#include "hamalg/core/random.hpp"

using namespace hamalg;

namespace {

ErrorCode code_of(const Session& s, const std::string& src) {
  try {
    parse(s, src);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;  // no error at all
}

}  // namespace

TEST_CASE("parse examples") {
  Session s;
  const Symbol a = parse_symbol(s, "int[x]( f(x)*phi(x)*D(phi,1)(x) )");
  REQUIRE(a.terms().size() == 1);
  const Term& t = a.terms()[0];
  CHECK(t.funcs.size() == 1);
  CHECK(t.fields.size() == 2);

  const Symbol h = parse_symbol(s, "int[x]( (1/2)*(pi(x)^2 + phi(x)^2) )");
  CHECK(format(s, canonicalize(s, h)) == "int[x]( (1/2)*phi(x)^2 + (1/2)*pi(x)^2 )");

  // word order is kept for operators
  const OperatorExpr w = parse_operator(s, "qint[x]( (1/2)*(phi(x)*pi(x) + pi(x)*phi(x)) )");
  CHECK(format(s, w) == "qint[x]( (1/2)*Phi(x)*Pi(x) + (1/2)*Pi(x)*Phi(x) )");
}

TEST_CASE("format of zero") {
  Session s;
  CHECK(format(s, Symbol()) == "0");
  CHECK(format(s, Symbol(), FormatStyle::Compact) == "0");
  CHECK(format(s, canonicalize(s, parse_symbol(s, "int[x](phi(x)) - int[y](phi(y))"))) == "0");
}

TEST_CASE("parse errors") {
  Session s;
  CHECK(code_of(s, "int[x](phi(x)") == ErrorCode::Parse);
  CHECK(code_of(s, "int[x](phi(x) +* pi(x))") == ErrorCode::Parse);
  CHECK(code_of(s, "int[x](q(x)*phi(x))") == ErrorCode::Parse);  // undeclared
  CHECK(code_of(s, "int[x](D(phi,(1,0))(x))") == ErrorCode::Parse);  // dimension mismatch
  try {
    parse(s, "int[x](phi(x)\n  + )");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
  // bound exceeded
  CHECK_THROWS_AS(canonicalize(s, parse_symbol(s, "int[x](D(phi,9)(x)*pi(x))")), Error);
}

TEST_CASE("two dimensions") {
  SessionOptions o;
  o.dimension = 2;
  Session s(o);
  const auto a = canonicalize(s, parse_symbol(s, "int[x](phi(x)*D(phi,(1,0))(x))"));
  CHECK(a.is_zero());
  CHECK(format(s, bracket(s, parse_symbol(s, "int[x](phi(x)^2)"), parse_symbol(s, "int[x](pi(x)^2)")),
               FormatStyle::Compact) == "-4*int[x](phi(x)*pi(x))");
}

TEST_CASE("round trip and idempotence on the random corpus") {
  Session s;
  Rng rng(7);
  SymbolShape shape;
  for (int k = 0; k < 200; ++k) {
    const Symbol x = random_symbol(s, rng, shape);
    CHECK(canonicalize(s, x) == x);
    for (auto style : {FormatStyle::Canonical, FormatStyle::Compact}) {
      const std::string text = format(s, x, style);
      CHECK(format(s, canonicalize(s, parse_symbol(s, text)), style) == text);
    }
  }
}

TEST_CASE("json is deterministic and ordered") {
  Session s;
  const Symbol a = canonicalize(s, parse_symbol(s, "int[x](f(x)*phi(x)^2*pi(x)) + 3"));
  const std::string j1 = to_json(s, a), j2 = to_json(s, canonicalize(s, parse_symbol(s, "3 + int[y](f(y)*pi(y)*phi(y)^2)")));
  CHECK(j1 == j2);
  CHECK_NOTHROW(Json::parse(j1));
}

TEST_CASE("multiply examples") {
  Session s;
  auto P = [&](const std::string& src) { return canonicalize(s, parse_symbol(s, src)); };
  const Symbol phi2 = P("int[x](phi(x)^2)");
  CHECK(multiply(s, phi2, Symbol::constant(Rational(1))) == phi2);
  const Symbol m = multiply(s, phi2, P("int[y](pi(y)^2)"));
  CHECK(format(s, m) == "int[x,y]( phi(x)^2*pi(y)^2 )");
  CHECK(grade_decompose(m).count(2) == 1);
  const Symbol sq = multiply(s, phi2, phi2);
  CHECK(format(s, sq) == "int[x,y]( phi(x)^2*phi(y)^2 )");
  // commutative
  const Symbol a = P("int[x](f(x)*phi(x)*pi(x))"), b = P("int[x](g(x)*D(phi,1)(x)^2)");
  CHECK(multiply(s, a, b) == multiply(s, b, a));
}

TEST_CASE("equals examples") {
  Session s;
  auto P = [&](const std::string& src) { return parse_symbol(s, src); };
  CHECK(equals(s, P("int[x](phi(x)*D(phi,1)(x))"), Symbol()));
  CHECK(equals(s, P("int[x](f(x)*phi(x)*D(phi,1)(x))"), P("int[x](-(1/2)*D(f,1)(x)*phi(x)^2)")));
  CHECK_FALSE(equals(s, P("int[x](phi(x)^2)"), P("int[x](pi(x)^2)")));
  // independent of term order
  CHECK(format(s, canonicalize(s, P("int[x](pi(x)^2) + int[x](phi(x)^2) + 2"))) ==
        format(s, canonicalize(s, P("2 + int[x](phi(x)^2 + pi(x)^2)"))));
}
