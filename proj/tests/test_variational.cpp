#include <doctest.h>

#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"
#include "hamalg/core/random.hpp"
#include "hamalg/core/variational.hpp"

using namespace hamalg;

namespace {

const char* kEq1 =
    "int[x]((1/2)*(pi(x)^2 + D(phi,1)(x)^2 + m^2*phi(x)^2) + (1/24)*g(x)*phi(x)^4 + j(x)*phi(x))";
const char* kFree = "int[x]((1/2)*(pi(x)^2 + D(phi,1)(x)^2 + m^2*phi(x)^2))";

Symbol P(const Session& s, const std::string& src) { return canonicalize(s, parse_symbol(s, src)); }

std::string vd(const Session& s, const std::string& src, Field f) {
  return format(s, vderiv(s, P(s, src), f, Var::free(1)), FormatStyle::Compact);
}

std::string C(const Session& s, const std::string& src) { return format(s, P(s, src), FormatStyle::Compact); }

}  // namespace

TEST_CASE("vderiv examples") {
  Session s;
  CHECK(vd(s, "int[x](phi(x)^2)", Field::Phi) == "2*phi(y)");
  CHECK(vd(s, "int[x](phi(x)^2)", Field::Pi) == "0");
  CHECK(vd(s, "int[x](f(x)*phi(x)*D(phi,1)(x))", Field::Phi) == "-D(f,1)(y)*phi(y)");
  CHECK(vd(s, kFree, Field::Phi) == C(s, "m^2*phi(y) - D(phi,2)(y)"));
  CHECK(vd(s, kFree, Field::Pi) == "pi(y)");
}

TEST_CASE("second variational derivative") {
  Session s;
  const Var y = Var::free(1), z = Var::free(2);
  auto sv = [&](const std::string& src, Field a, Field b) {
    return format(s, second_vderiv(s, P(s, src), a, b, y, z), FormatStyle::Compact);
  };
  CHECK(sv("int[x](phi(x)^2)", Field::Phi, Field::Phi) == "2*delta(y-z)");
  CHECK(sv("int[x](phi(x)^2)", Field::Phi, Field::Pi) == "0");
  // the local kernel of -f' phi
  CHECK(sv("int[x](f(x)*phi(x)*D(phi,1)(x))", Field::Phi, Field::Phi) == C(s, "-D(f,1)(y)*delta(y-z)"));

  // symmetric under y <-> z
  Rng rng(11);
  SymbolShape shape;
  shape.bilocal = false;
  for (int k = 0; k < 100; ++k) {
    const Symbol a = random_symbol(s, rng, shape);
    const Symbol yz = second_vderiv(s, a, Field::Phi, Field::Phi, y, z);
    const Symbol zy = second_vderiv(s, a, Field::Phi, Field::Phi, z, y);
    CHECK(equals(s, yz, zy));
  }
}

TEST_CASE("check_symbol examples") {
  Session s;
  CHECK(check_symbol(s, P(s, "int[x](phi(x)^2)")).is_symbol);
  const auto ev = check_symbol(s, P(s, "int[x](delta(x)*phi(x))"));
  CHECK_FALSE(ev.is_symbol);
  REQUIRE(ev.phi_witnesses.size() == 1);
  CHECK(format_terms(s, ev.phi_witnesses, false, FormatStyle::Compact) == "delta(x)");
  CHECK(check_symbol(s, P(s, kEq1)).is_symbol);
}

TEST_CASE("grade examples") {
  Session s;
  const auto g = grade_decompose(P(s, kEq1));
  REQUIRE(g.size() == 2);
  CHECK(format(s, g.at(2), FormatStyle::Compact) == "(1/2)*int[x](pi(x)^2)");
  CHECK(grade_decompose(P(s, "int[x](phi(x)*pi(x))")).begin()->first == 1);
  CHECK(grade_decompose(Symbol()).empty());
}

TEST_CASE("bracket of a symbol with itself vanishes") {
  Session s;
  Rng rng(5);
  SymbolShape shape;
  for (int k = 0; k < 30; ++k) {
    const Symbol a = random_symbol(s, rng, shape);
    CHECK(bracket(s, a, a).is_zero());
  }
  CHECK(bracket(s, P(s, kEq1), P(s, kEq1)).is_zero());
}
