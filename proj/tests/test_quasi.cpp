#include <doctest.h>

#include "hamalg/core/quasi.hpp"

#include <cmath>

using namespace hamalg;

namespace {

Eigen::VectorXd vec(double x) {
  Eigen::VectorXd v(1);
  v(0) = x;
  return v;
}

std::vector<Eigen::VectorXd> points(const std::vector<double>& xs) {
  std::vector<Eigen::VectorXd> r;
  for (double x : xs) r.push_back(vec(x));
  return r;
}

}  // namespace

TEST_CASE("polynomial parsing") {
  auto p = Polynomial::parse("(p + q)^2/2 - 3*t*q", {"t", "p", "q"});
  CHECK(p({2.0, 1.0, 3.0}) == doctest::Approx(8 - 18));
  CHECK(p.derivative(1)({0.0, 1.0, 3.0}) == doctest::Approx(4));
  CHECK_THROWS_AS(Polynomial::parse("p/q", {"p", "q"}), Error);
  CHECK_THROWS_AS(Polynomial::parse("x + 1", {"p", "q"}), Error);
  CHECK(FiniteDimHamiltonian("p^2/2 + q^4/4", 1).has_zero_mixed_trace());
  CHECK_FALSE(FiniteDimHamiltonian("p*q", 1).has_zero_mixed_trace());
  CHECK(FiniteDimHamiltonian("p1*q2 - p2*q1", 2).has_zero_mixed_trace());
}

TEST_CASE("characteristics") {
  SUBCASE("oscillator") {
    FiniteDimHamiltonian H("(p^2 + q^2)/2", 1);
    auto tr = integrate_characteristics(H, parse_action("0", 1), vec(1), 1.0, 1e-3);
    CHECK(std::abs(tr.back().q(0) - std::cos(1.0)) < 1e-8);
    CHECK(std::abs(tr.back().det - std::cos(1.0)) < 1e-8);
    for (const auto& pt : tr.points) CHECK(std::abs(H.H(pt.t, pt.p, pt.q) - 0.5) < 1e-8);
  }
  SUBCASE("free particle") {
    FiniteDimHamiltonian H("p^2/2", 1);
    auto tr = integrate_characteristics(H, parse_action("q^2/2", 1), vec(1), 1.0, 1e-3);
    CHECK(tr.back().q(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(tr.back().det == doctest::Approx(2.0).epsilon(1e-12));
    auto a = transport_amplitude(H, tr, [](const Eigen::VectorXd&) { return 1.0; });
    CHECK(a.back() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("T = 0") {
    FiniteDimHamiltonian H("p^2/2 + q^4", 1);
    auto tr = integrate_characteristics(H, parse_action("q^3", 1), vec(0.7), 0.0, 1e-3);
    CHECK(tr.points.size() == 1);
    CHECK(tr.back().det == 1.0);
    auto a = transport_amplitude(H, tr, [](const Eigen::VectorXd& q) { return 2 + q(0); });
    CHECK(a[0] == 2.7);
  }
  SUBCASE("caustic") {
    FiniteDimHamiltonian H("(p^2 + q^2)/2", 1);
    CHECK_THROWS_AS(integrate_characteristics(H, parse_action("0", 1), vec(1), 2.0, 1e-3), Error);
  }
  SUBCASE("flag") {
    FiniteDimHamiltonian H("p*q", 1);
    auto tr = integrate_characteristics(H, parse_action("0", 1), vec(1), 0.1, 1e-3);
    CHECK_THROWS_AS(transport_amplitude(H, tr, [](const Eigen::VectorXd&) { return 1.0; }), Error);
  }
  SUBCASE("linear flows have a q0-independent monodromy") {
    FiniteDimHamiltonian H("(p1^2 + p2^2)/2 + (q1^2 + 3*q2^2)/2 + q1*q2/2", 2);
    Eigen::VectorXd a(2), b(2);
    a << 0.3, -0.2;
    b << -1.1, 0.6;
    const auto S0 = parse_action("q1*q2 + q2^2/2", 2);
    auto ta = integrate_characteristics(H, S0, a, 0.8, 1e-3);
    auto tb = integrate_characteristics(H, S0, b, 0.8, 1e-3);
    CHECK((ta.back().D - tb.back().D).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("transport residual of closed forms") {
  for (const char* name : {"oscillator", "free"}) {
    auto p = quasi_preset(name);
    FiniteDimHamiltonian H(p.hamiltonian, 1);
    auto rep = transport_residual(H, p.S_exact, p.a_exact, linspace(0.01, 1, 12),
                                  points(linspace(-1, 1, 11)));
    CHECK(rep.hj_residual < 1e-6);
    CHECK(rep.transport_residual < 1e-6);
    auto zero = [](double, const Eigen::VectorXd&) { return 0.0; };
    CHECK(transport_residual(H, p.S_exact, zero, {0.5}, points({0.2})).transport_residual == 0.0);
  }
}

TEST_CASE("shooting reproduces the closed forms") {
  auto p = quasi_preset("oscillator");
  FiniteDimHamiltonian H(p.hamiltonian, 1);
  ShootingWkb w(H, parse_action(p.action, 1), p.a0);
  for (double t : {0.2, 0.9})
    for (double q : {-0.7, 0.4}) {
      CHECK(w.S(t, vec(q)) == doctest::Approx(p.S_exact(t, vec(q))).epsilon(1e-10));
      CHECK(w.a(t, vec(q)) == doctest::Approx(p.a_exact(t, vec(q))).epsilon(1e-10));
    }
}

TEST_CASE("wkb residual") {
  SUBCASE("oscillator ansatz is exact") {
    auto p = quasi_preset("oscillator");
    FiniteDimHamiltonian H(p.hamiltonian, 1);
    auto rep = wkb_residual(H, p.S_exact, p.a_exact, {0.1, 0.05, 0.025}, linspace(0.05, 1, 8),
                            linspace(-1, 1, 9));
    for (const auto& r : rep.rows) CHECK(r.residual < 1e-7);
  }
  SUBCASE("zero amplitude") {
    FiniteDimHamiltonian H("p^2/2", 1);
    auto zero = [](double, const Eigen::VectorXd&) { return 0.0; };
    auto rep = wkb_residual(H, zero, zero, {0.1, 0.05}, {0.5}, {0.0});
    CHECK(rep.vanishing);
    for (const auto& r : rep.rows) CHECK(r.residual == 0.0);
  }
  SUBCASE("quartic scales like h^2") {
    auto p = quasi_preset("quartic");
    FiniteDimHamiltonian H(p.hamiltonian, 1);
    ShootingWkb w(H, parse_action(p.action, 1), p.a0);
    auto tg = linspace(0.1, p.T, 3);
    auto qg = linspace(-1, 1, 5);
    auto tr = transport_residual(H, w.S_fn(), w.a_fn(), tg, points(qg));
    CHECK(tr.transport_residual < 1e-6);
    auto rep = wkb_residual(H, w.S_fn(), w.a_fn(), {0.1, 0.05, 0.025}, tg, qg);
    CHECK(rep.exponent > 1.9);
    CHECK(rep.rows[2].residual / rep.rows[1].residual == doctest::Approx(0.25).epsilon(0.05));
  }
}
