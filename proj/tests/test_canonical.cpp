#include <doctest.h>

#include "hamalg/core/canonical.hpp"
#include "hamalg/core/parser.hpp"

using namespace hamalg;

namespace {

std::string canon(const Session& s, const std::string& src) {
  return format(s, canonicalize(s, parse_symbol(s, src)));
}

}  // namespace

TEST_CASE("total derivative vanishes") {
  Session s;
  CHECK(canon(s, "int[x](phi(x)*D(phi,1)(x))") == "0");
  CHECK(canon(s, "int[x](D(phi,2)(x))") == "0");
  CHECK(canon(s, "int[x](D(f,1)(x)*pi(x)^2 + 2*f(x)*pi(x)*D(pi,1)(x))") == "0");
}

TEST_CASE("delta contraction") {
  Session s;
  CHECK(canon(s, "int[x,y](f(x)*delta(x-y)*phi(y))") == "int[x]( f(x)*phi(x) )");
  CHECK(canon(s, "int[x,y](f(x)*delta(x-y;1)*phi(y))") == canon(s, "int[x](f(x)*D(phi,1)(x))"));
  CHECK(canon(s, "int[x](f(x)*phi(x)*D(phi,1)(x))") == "int[x]( -(1/2)*D(f,1)(x)*phi(x)^2 )");
}

TEST_CASE("format examples") {
  Session s;
  CHECK(canon(s, "int[x]( (1/2)*(pi(x)^2 + phi(x)^2) )") ==
        "int[x]( (1/2)*phi(x)^2 + (1/2)*pi(x)^2 )");
  CHECK(format(s, parse_symbol(s, "int[x,y]( f(x)*delta(x-y;1)*pi(y) )")) ==
        "int[x,y]( f(x)*delta(x-y;1)*pi(y) )");
}
