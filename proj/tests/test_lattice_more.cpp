#include "hamalg/core/canonical.hpp"
#include "hamalg/core/lattice.hpp"
#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>

using namespace hamalg;

namespace {

StateProfile random_states(std::uint64_t seed, int n, std::vector<StateProfile>& out) {
  Rng rng(seed);
  for (int k = 0; k < n; ++k) out.push_back(random_state_profile(rng));
  return out.front();
}

}  // namespace

TEST_CASE("zero symbol evaluates to zero") {
  Session s;
  LatticeConfig cfg{128, 8.0, 2};
  std::vector<StateProfile> st;
  random_states(1, 1, st);
  LatticeFunctional Z(s, Symbol(), cfg, Binding::defaults(s));
  CHECK(Z(st[0].sample(cfg)) == 0.0);
}

TEST_CASE("f phi phi' against adaptive quadrature") {
  Session s;
  const Binding bind = Binding::defaults(s);
  const GaussianProfile f = bind.functions.at("f");
  const GaussianProfile phi{{1.0, 0.4}, 0.9, 0.2};
  auto integrand = [&](double x) { return f.derivative(0, x) * phi.derivative(0, x) * phi.derivative(1, x); };
  const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -8.0, 8.0, 15, 1e-14);
  LatticeConfig cfg{512, 8.0, 4};
  StateProfile p;
  p.phi.push_back(phi);
  p.pi.push_back({{0.0}, 1.0, 0.0});
  LatticeFunctional F(s, parse_symbol(s, "int[x](f(x)*phi(x)*D(phi,1)(x))"), cfg, bind);
  CHECK(std::abs(F(p.sample(cfg)) - ref) < 1e-6);
}

TEST_CASE("numeric bracket identities") {
  Session s;
  const Binding bind = Binding::defaults(s);
  LatticeConfig cfg{256, 8.0, 2};
  std::vector<StateProfile> st;
  random_states(3, 3, st);
  const Symbol phi2 = parse_symbol(s, "int[x](phi(x)^2)"), pi2 = parse_symbol(s, "int[x](pi(x)^2)");
  LatticeFunctional F(s, phi2, cfg, bind), G(s, pi2, cfg, bind);
  LatticeFunctional B(s, bracket(s, phi2, pi2), cfg, bind);
  LatticeFunctional H(s, parse_symbol(s, "int[x](f(x)*D(phi,1)(x)^2*pi(x) + g(x)*phi(x)*pi(x))"), cfg, bind);
  LatticeFunctional K0(s, parse_symbol(s, "int[x](g(x)*D(phi,1)(x)^2)"), cfg, bind);
  for (const auto& p : st) {
    const auto x = p.sample(cfg);
    const double num = numeric_bracket(F, G, x);
    CHECK(std::abs(num - B(x)) <= 1e-4 * std::abs(num));
    double scale = 0;
    CHECK(std::abs(numeric_bracket(H, H, x, &scale)) <= 1e-8 * std::max(1.0, scale));
    // no pi dependence on either side
    CHECK(numeric_bracket(F, K0, x) == 0.0);
  }
}

TEST_CASE("convergence study examples") {
  Session s;
  const Binding bind = Binding::defaults(s);
  std::vector<StateProfile> st;
  random_states(9, 3, st);
  std::vector<LatticeConfig> ladder{{128, 8.0, 2}, {256, 8.0, 2}, {512, 8.0, 2}};
  // raw input: the derivative stays on phi, so the discrete bracket is only second order
  const auto v = verify_bracket(s, parse_symbol(s, "int[x](f(x)*phi(x)*D(phi,1)(x))"),
                                parse_symbol(s, "int[x](g(x)*pi(x)^2)"), ladder, bind, st);
  REQUIRE(v.rows.size() == 3);
  for (int k = 0; k + 1 < 3; ++k) {
    const double ratio = v.rows[k].error / v.rows[k + 1].error;
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
  }
  const Symbol a = canonicalize(s, parse_symbol(s, "int[x](f(x)*D(phi,1)(x)^2*pi(x))"));
  const auto self = verify_bracket(s, a, a, ladder, bind, st);
  CHECK(self.exact);
  const auto fg = verify_bracket(s, parse_symbol(s, "int[x](phi(x)^2)"), parse_symbol(s, "int[x](pi(x)^2)"),
                                 {{128, 8.0, 2}, {256, 8.0, 2}}, bind, st);
  CHECK(fg.finest_error() < 1e-3);
}

TEST_CASE("products and integration by parts on the lattice") {
  Session s;
  const Binding bind = Binding::defaults(s);
  LatticeConfig cfg{512, 8.0, 4};
  std::vector<StateProfile> st;
  random_states(4, 3, st);
  const Symbol phi2 = parse_symbol(s, "int[x](phi(x)^2)");
  LatticeFunctional A(s, phi2, cfg, bind), Sq(s, multiply(s, canonicalize(s, phi2), canonicalize(s, phi2)), cfg, bind);
  LatticeFunctional L(s, parse_symbol(s, "int[x](f(x)*phi(x)*D(phi,1)(x))"), cfg, bind);
  LatticeFunctional R(s, parse_symbol(s, "int[x](-(1/2)*D(f,1)(x)*phi(x)^2)"), cfg, bind);
  for (const auto& p : st) {
    const auto x = p.sample(cfg);
    CHECK(Sq(x) == doctest::Approx(A(x) * A(x)).epsilon(1e-12));
    CHECK(L(x) == doctest::Approx(R(x)).epsilon(1e-6));
  }
}
