#include <doctest.h>

#include "hamalg/core/parser.hpp"
#include "hamalg/core/quantum.hpp"

using namespace hamalg;

TEST_CASE("residual identity") {
  Session s;
  auto r = leibniz_residual(s, "f", "g");
  CHECK(format_terms(s, r.combination, false, FormatStyle::Compact) ==
        "delta0(0)*delta(x;1) - 2*delta0(1)*delta(x)");
  CHECK(format_scalar(r.prefactor_rational, r.prefactor) == "i*h");
  CHECK(r.paths_agree);
  // the two expansions, operators at x
  CHECK(format(s, r.way1) ==
        "2*Phi(x)*Pi(x)*delta(x-y;1) + 2*Phi(x)*D(Pi,1)(x)*delta(x-y) + "
        "2*Pi(x)*D(Phi,1)(x)*delta(x-y)");
  CHECK(format(s, r.way2) ==
        "Phi(x)*Pi(x)*delta(x-y;1) + Phi(x)*D(Pi,1)(x)*delta(x-y) + D(Phi,1)(x)*Pi(x)*delta(x-y) + "
        "Pi(x)*Phi(x)*delta(x-y;1) + Pi(x)*D(Phi,1)(x)*delta(x-y) + D(Pi,1)(x)*Phi(x)*delta(x-y)");
  auto z = leibniz_residual(s, "f", "g", false);
  CHECK(z.residual.empty());
}

namespace {

std::string op(const Session& s, const OperatorExpr& e) { return format(s, e); }

}  // namespace

TEST_CASE("ccr examples") {
  Session s;
  CHECK(op(s, ccr_reduce(s, parse_operator(s, "Pi(x)*Phi(y)"))) ==
        "Phi(y)*Pi(x) - i*h*delta(x-y)");
  auto e = ccr_reduce(s, parse_operator(s, "Pi(x)*Phi(x)"));
  CHECK(op(s, e) == "Phi(x)*Pi(x) - i*h*delta0(0)");
  CHECK(e.divergent());
}

TEST_CASE("quantize") {
  Session s;
  auto sym = parse_symbol(s, "int[x](phi(x)*pi(x))");
  CHECK(op(s, quantize(s, sym, Ordering::Weyl)) ==
        "qint[x]( (1/2)*Phi(x)*Pi(x) + (1/2)*Pi(x)*Phi(x) )");
  CHECK(op(s, quantize(s, sym, Ordering::Normal)) == "qint[x]( Phi(x)*Pi(x) )");
  CHECK(op(s, quantize(s, parse_symbol(s, "int[x](phi(x)^2)"), Ordering::Weyl)) ==
        "qint[x]( Phi(x)^2 )");
}

TEST_CASE("divergent square of the free Hamiltonian") {
  Session s;
  auto H = parse_operator(s, "qint[x]((1/2)*(Pi(x)^2 + Phi(x)^2))");
  auto sq = ccr_reduce(s, multiply(s, H, H));
  CHECK(sq.divergent());
  bool has_deltasq = false;
  for (const auto& t : sq.terms())
    for (const auto& d : t.f.div) has_deltasq |= d.kind == DivergentKind::DeltaSquaredIntegral;
  CHECK(has_deltasq);
  MESSAGE(op(s, sq));
}

TEST_CASE("commutator examples") {
  Session s;
  auto a = parse_operator(s, "qint[x](Phi(x)^2/2)");
  auto b = parse_operator(s, "qint[y](Pi(y)^2/2)");
  auto c = commutator(s, a, b);
  CHECK(op(s, c) == op(s, ccr_reduce(s, parse_operator(s, "qint[x](i*h/2*(Phi(x)*Pi(x) + Pi(x)*Phi(x)))"))));
  // (ih/2)(Phi Pi + Pi Phi) carries (h^2/2) delta(0) vol once normal ordered
  CHECK(op(s, c) == "(1/2)*h^2*deltasq + qint[x]( i*h*Phi(x)*Pi(x) )");
  CHECK(format(s, classical_limit(s, divide_by_minus_ih(c)), FormatStyle::Compact) ==
        "-int[x](phi(x)*pi(x))");
  CHECK(commutator(s, a, a).is_zero());
}

TEST_CASE("correspondence") {
  Session s;
  for (auto ord : {Ordering::Weyl, Ordering::Normal}) {
    auto r = correspondence_check(s, parse_symbol(s, "int[x](phi(x)^2/2)"),
                                  parse_symbol(s, "int[x](pi(x)^2/2)"), ord);
    CHECK(r.passed());
    auto r2 = correspondence_check(s, parse_symbol(s, "int[x](f(x)*phi(x)*D(phi,1)(x))"),
                                   parse_symbol(s, "int[y](g(y)*pi(y)^2)"), ord);
    CHECK(r2.passed());
    MESSAGE(format_terms(s, r.central, true, FormatStyle::Compact));
  }
}
