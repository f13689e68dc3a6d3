#include "hamalg/core/canonical.hpp"
#include "hamalg/core/lattice.hpp"
#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"
#include "hamalg/core/variational.hpp"

#include <doctest.h>

#include <cmath>

using namespace hamalg;

namespace {

StateProfile bump_state() {
  StateProfile p;
  p.phi.push_back({{1.0}, 1.0, 0.0});
  p.pi.push_back({{0.5, 0.3}, 0.8, 0.4});
  return p;
}

std::vector<LatticeConfig> ladder(int stencil = 2) {
  std::vector<LatticeConfig> r;
  for (int n : {128, 256, 512}) r.push_back({n, 8.0, stencil});
  return r;
}

}  // namespace

TEST_CASE("gaussian profile derivatives") {
  GaussianProfile g{{1.0, 2.0}, 0.7, 0.3};
  const double x = 0.9, e = 1e-4;
  for (int k = 0; k < 4; ++k) {
    const double fd = (g.derivative(k, x + e) - g.derivative(k, x - e)) / (2 * e);
    CHECK(g.derivative(k + 1, x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("integral of phi squared") {
  Session s;
  LatticeConfig cfg{512, 8.0, 2};
  LatticeFunctional F(s, parse_symbol(s, "int[x](phi(x)^2)"), cfg, Binding::defaults(s));
  StateProfile p;
  p.phi.push_back({{1.0}, 1.0, 0.0});
  p.pi.push_back({{0.0}, 1.0, 0.0});
  CHECK(F(p.sample(cfg)) == doctest::Approx(std::sqrt(M_PI / 2)).epsilon(1e-10));
}

TEST_CASE("stencil orders") {
  for (int stencil : {2, 4}) {
    std::vector<double> errs;
    for (int n : {128, 256}) {
      LatticeConfig cfg{n, 8.0, stencil};
      GaussianProfile g{{1.0}, 1.0, 0.1};
      std::vector<double> u(n);
      for (int i = 0; i < n; ++i) u[i] = g.derivative(0, cfg.x(i));
      for (int k : {1, 2, 3}) {
        auto d = lattice_derivative(cfg, u, k);
        double err = 0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(d[i] - g.derivative(k, cfg.x(i))));
        if (k == 3) errs.push_back(err);
      }
    }
    CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(stencil).epsilon(0.1));
  }
}

TEST_CASE("delta kernels against contracted forms") {
  Session s;
  const auto bind = Binding::defaults(s);
  LatticeConfig cfg{256, 8.0, 2};
  auto st = bump_state().sample(cfg);
  const std::pair<const char*, const char*> cases[] = {
      {"int[x,y](f(x)*phi(x)*pi(y)*delta(x-y))", "int[x](f(x)*phi(x)*pi(x))"},
      {"int[x](phi(x)*delta(x;1))", "-D(phi,1)(0)"},
      {"int[x,y](phi(x)*phi(y)*delta(x-y;2))", "int[x](phi(x)*D(phi,2)(x))"},
  };
  for (auto [raw, contracted] : cases) {
    LatticeFunctional A(s, parse_symbol(s, raw), cfg, bind);
    LatticeFunctional B(s, parse_symbol(s, contracted), cfg, bind);
    CHECK(A(st) == doctest::Approx(B(st)).epsilon(1e-9));
  }
}

TEST_CASE("canonicalization preserves the lattice value") {
  Session s;
  const auto bind = Binding::defaults(s);
  LatticeConfig cfg{512, 8.0, 4};
  auto st = bump_state().sample(cfg);
  for (const char* src : {"int[x](f(x)*phi(x)*D(phi,1)(x))", "int[x](D(phi,1)(x)*D(pi,2)(x))",
                          "int[x](g(x)*D(phi,2)(x)*phi(x)^2)"}) {
    const Symbol raw = parse_symbol(s, src);
    LatticeFunctional A(s, raw, cfg, bind), B(s, canonicalize(s, raw), cfg, bind);
    CHECK(A(st) == doctest::Approx(B(st)).epsilon(1e-6));
  }
}

TEST_CASE("variational derivative agrees with the lattice gradient") {
  Session s;
  const auto bind = Binding::defaults(s);
  LatticeConfig cfg{512, 8.0, 4};
  auto st = bump_state().sample(cfg);
  const Symbol F = parse_symbol(s, "int[x](f(x)*D(phi,1)(x)^2*pi(x))");
  LatticeFunctional LF(s, F, cfg, bind);
  std::vector<double> dphi, dpi;
  LF.gradient(st, dphi, dpi);
  const Symbol dF = vderiv(s, F, Field::Phi, Var::free(0));
  LatticeFunctional LdF(s, dF, cfg, bind);
  for (int i : {200, 256, 300}) {
    CHECK(dphi[i] / cfg.dx() == doctest::Approx(LdF(st, {{0, i}})).epsilon(1e-3));
  }
}

TEST_CASE("bracket convergence") {
  Session s;
  const auto bind = Binding::defaults(s);
  std::vector<StateProfile> states{bump_state()};
  SUBCASE("discretely exact pair") {
    auto v = verify_bracket(s, parse_symbol(s, "int[x](phi(x)^2)"),
                            parse_symbol(s, "int[x](pi(x)^2)"), ladder(), bind, states);
    CHECK(v.exact);
  }
  SUBCASE("second order pair") {
    auto v = verify_bracket(s, parse_symbol(s, "int[x](f(x)*phi(x)*D(phi,1)(x))"),
                            parse_symbol(s, "int[x](g(x)*pi(x)^2)"), ladder(), bind, states);
    CHECK_FALSE(v.exact);
    CHECK(v.order > 1.8);
    CHECK(v.finest_error() < 1e-3);
  }
  SUBCASE("error rejects a wrong bracket") {
    // scale the symbolic side by feeding a different pair to the oracle
    LatticeConfig cfg{256, 8.0, 2};
    const Symbol a = parse_symbol(s, "int[x](phi(x)^2)"), b = parse_symbol(s, "int[x](pi(x)^2)");
    LatticeFunctional F(s, a, cfg, bind), G(s, b, cfg, bind);
    LatticeFunctional wrong(s, parse_symbol(s, "int[x](2*phi(x)*pi(x))"), cfg, bind);
    auto st = states[0].sample(cfg);
    const double num = numeric_bracket(F, G, st);
    CHECK(std::abs(num - wrong(st)) > 0.1 * std::abs(num));
  }
}

TEST_CASE("oracle refusals") {
  Session s;
  LatticeConfig cfg;
  const auto bind = Binding::defaults(s);
  CHECK_THROWS_AS(LatticeFunctional(s, parse_symbol(s, "h*int[x](phi(x))"), cfg, bind), Error);
  Binding empty;
  CHECK_THROWS_AS(LatticeFunctional(s, parse_symbol(s, "int[x](f(x)*phi(x))"), cfg, empty), Error);
  LatticeConfig bad{7, 8.0, 2};
  CHECK_THROWS_AS(bad.validate(), Error);
}
