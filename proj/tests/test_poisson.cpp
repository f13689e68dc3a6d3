#include <doctest.h>

#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"

#include <chrono>
#include <iostream>

using namespace hamalg;

namespace {

std::string br(const Session& s, const std::string& a, const std::string& b) {
  return format(s, bracket(s, parse_symbol(s, a), parse_symbol(s, b)), FormatStyle::Compact);
}

}  // namespace

TEST_CASE("bracket examples") {
  Session s;
  CHECK(br(s, "int[x](phi(x)^2)", "int[x](pi(x)^2)") == "-4*int[x](phi(x)*pi(x))");
  CHECK(br(s, "int[x](f(x)*phi(x)*D(phi,1)(x))", "int[y](g(y)*pi(y)^2)") ==
        format(s, canonicalize(s, parse_symbol(s, "int[x](2*D(f,1)(x)*g(x)*phi(x)*pi(x))")),
               FormatStyle::Compact));
}

TEST_CASE("algebra suite timing") {
  Session s;
  auto t0 = std::chrono::steady_clock::now();
  AlgebraOptions o;
  o.samples = 100;
  auto r = check_algebra(s, o);
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << r.text() << dt << " s\n";
  CHECK(r.passed());
}
