// Exercises the shared library through hamalg.h only.
#include "hamalg/hamalg.h"

#include <doctest.h>

#include <cstring>
#include <string>
#include <thread>

namespace {

struct Fixture {
  hamalg_session* s = nullptr;
  Fixture() { REQUIRE(hamalg_session_new(1, nullptr, 0, HAMALG_FAULT_NONE, &s) == HAMALG_OK); }
  ~Fixture() { hamalg_session_free(s); }

  hamalg_expr* parse(const char* src) {
    hamalg_expr* e = nullptr;
    REQUIRE(hamalg_parse(s, src, &e) == HAMALG_OK);
    return e;
  }
  std::string text(const hamalg_expr* e) {
    char* out = nullptr;
    REQUIRE(hamalg_format(s, e, HAMALG_STYLE_COMPACT, &out) == HAMALG_OK);
    std::string r = out;
    hamalg_string_free(out);
    return r;
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "bracket through the C API") {
  hamalg_expr* a = parse("int[x](phi(x)^2)");
  hamalg_expr* b = parse("int[x](pi(x)^2)");
  hamalg_expr* r = nullptr;
  CHECK(hamalg_bracket(s, a, b, &r) == HAMALG_OK);
  CHECK(text(r) == "-4*int[x](phi(x)*pi(x))");
  CHECK_FALSE(hamalg_expr_is_operator(r));
  hamalg_expr_free(r);
  hamalg_expr_free(a);
  hamalg_expr_free(b);
}

TEST_CASE_FIXTURE(Fixture, "error codes and messages") {
  hamalg_expr* e = reinterpret_cast<hamalg_expr*>(0x1);
  CHECK(hamalg_parse(s, "int[x](phi(x)", &e) == HAMALG_E_PARSE);
  CHECK(e == nullptr);
  CHECK(std::strstr(hamalg_last_error(), "column") != nullptr);

  CHECK(hamalg_parse(nullptr, "1", &e) == HAMALG_E_USAGE);

  hamalg_expr* q = parse("qint[x](Phi(x)*Pi(x))");
  hamalg_expr* out = nullptr;
  CHECK(hamalg_bracket(s, q, q, &out) == HAMALG_E_DOMAIN);
  CHECK(out == nullptr);

  // [int Phi, int Pi] = i h vol: nothing finite survives the classical limit
  hamalg_expr* x = parse("qint[x](Phi(x))");
  hamalg_expr* p = parse("qint[y](Pi(y))");
  hamalg_expr* c = nullptr;
  REQUIRE(hamalg_commutator(s, x, p, HAMALG_NORMAL, &c) == HAMALG_OK);
  CHECK(hamalg_expr_is_divergent(c));
  hamalg_expr* lim = nullptr;
  CHECK(hamalg_classical_limit(s, c, &lim) == HAMALG_E_DIVERGENT);
  CHECK(lim == nullptr);
  for (auto* y : {x, p, c}) hamalg_expr_free(y);
  hamalg_expr_free(q);

  hamalg_session* bad = nullptr;
  CHECK(hamalg_session_new(0, nullptr, 0, HAMALG_FAULT_NONE, &bad) == HAMALG_E_USAGE);
  CHECK(hamalg_kg_flow(7, 8, 2, 1, 1, nullptr, nullptr, nullptr) != HAMALG_OK);
  CHECK(hamalg_kg_flow(64, 8, 2, -1, 1, nullptr, nullptr, nullptr) != HAMALG_OK);
}

TEST_CASE_FIXTURE(Fixture, "vderiv names its variable y") {
  hamalg_expr* a = parse("int[x](f(x)*phi(x)*D(phi,1)(x))");
  hamalg_expr* r = nullptr;
  REQUIRE(hamalg_vderiv(s, a, HAMALG_PHI, &r) == HAMALG_OK);
  CHECK(text(r) == "-D(f,1)(y)*phi(y)");
  hamalg_expr_free(r);
  // an input already using y gets another name
  hamalg_expr* b = parse("phi(y)*int[x](phi(x)^2)");
  REQUIRE(hamalg_vderiv(s, b, HAMALG_PHI, &r) == HAMALG_OK);
  CHECK(text(r).find("phi(x)") != std::string::npos);
  hamalg_expr_free(r);
  hamalg_expr_free(a);
  hamalg_expr_free(b);
}

TEST_CASE_FIXTURE(Fixture, "grade, multiply, equals, quantize") {
  hamalg_expr* e = parse("int[x](phi(x)^2 + pi(x)^2*phi(x))");
  std::size_t n = 0;
  REQUIRE(hamalg_grade(s, e, 0, nullptr, nullptr, &n) == HAMALG_OK);
  CHECK(n == 2);
  int grades[2];
  hamalg_expr* parts[2];
  REQUIRE(hamalg_grade(s, e, 2, grades, parts, &n) == HAMALG_OK);
  CHECK(grades[0] == 0);
  CHECK(grades[1] == 2);
  CHECK(text(parts[1]) == "int[x](phi(x)*pi(x)^2)");
  hamalg_expr_free(parts[0]);
  hamalg_expr_free(parts[1]);

  hamalg_expr* a = parse("int[x](f(x)*phi(x)*D(phi,1)(x))");
  hamalg_expr* b = parse("int[x](-(1/2)*D(f,1)(x)*phi(x)^2)");
  int eq = 0;
  CHECK(hamalg_equals(s, a, b, &eq) == HAMALG_OK);
  CHECK(eq == 1);
  CHECK(hamalg_equals(s, a, e, &eq) == HAMALG_OK);
  CHECK(eq == 0);

  hamalg_expr* m = nullptr;
  REQUIRE(hamalg_multiply(s, a, a, &m) == HAMALG_OK);
  CHECK(text(m) == "(1/4)*int[x,y](D(f,1)(x)*phi(x)^2*D(f,1)(y)*phi(y)^2)");
  hamalg_expr* q = parse("qint[x](Phi(x))");
  CHECK(hamalg_multiply(s, a, q, &m) == HAMALG_E_USAGE);

  hamalg_expr* w = nullptr;
  hamalg_expr* pp = parse("int[x](phi(x)*pi(x))");
  REQUIRE(hamalg_quantize(s, pp, HAMALG_WEYL, &w) == HAMALG_OK);
  CHECK(text(w) == "qint[x]((1/2)*Phi(x)*Pi(x) + (1/2)*Pi(x)*Phi(x))");
  CHECK(hamalg_expr_is_operator(w));
  for (auto* x : {e, a, b, m, q, w, pp}) hamalg_expr_free(x);
}

TEST_CASE_FIXTURE(Fixture, "reports") {
  char *text = nullptr, *json = nullptr;
  REQUIRE(hamalg_residual_identity(s, "f", "g", &text, &json) == HAMALG_OK);
  CHECK(std::string(text).rfind("delta0(0)*delta(x;1) - 2*delta0(1)*delta(x)\n", 0) == 0);
  hamalg_string_free(text);
  hamalg_string_free(json);

  hamalg_expr* a = parse("int[x](phi(x)^2/2)");
  hamalg_expr* b = parse("int[x](pi(x)^2/2)");
  int passed = 0;
  REQUIRE(hamalg_correspondence(s, a, b, HAMALG_WEYL, &passed, nullptr, &json) == HAMALG_OK);
  CHECK(passed == 1);
  CHECK(std::string(json).find("\"central\": []") != std::string::npos);
  hamalg_string_free(json);

  int exact = 0;
  double order = 0, err = 0;
  const int Ns[] = {64, 128};
  REQUIRE(hamalg_lattice_verify(s, a, b, Ns, 2, 8.0, 2, 42, 2, &exact, &order, &err, nullptr, nullptr) ==
          HAMALG_OK);
  CHECK(exact == 1);
  hamalg_expr_free(a);
  hamalg_expr_free(b);

  REQUIRE(hamalg_check_algebra(s, 42, 5, 2, 1, &passed, &text, nullptr) == HAMALG_OK);
  CHECK(passed == 1);
  hamalg_string_free(text);
}

TEST_CASE("numeric entry points") {
  double defect = 1, drift = 1;
  REQUIRE(hamalg_kg_flow(64, 8.0, 2, 1.0, 1.7, &defect, &drift, nullptr) == HAMALG_OK);
  CHECK(defect < 1e-10);
  CHECK(drift < 1e-9);

  char* csv = nullptr;
  const double q0 = 1.0;
  REQUIRE(hamalg_qc_characteristics("free", nullptr, 1, nullptr, nullptr, &q0, 1.0, 0.1, &csv) == HAMALG_OK);
  CHECK(std::string(csv).rfind("t,q,p,detD,a\n", 0) == 0);
  hamalg_string_free(csv);
  // caustic of the focusing action
  CHECK(hamalg_qc_characteristics(nullptr, "p^2/2", 1, "-q^2", nullptr, &q0, 1.0, 0.01, &csv) ==
        HAMALG_E_DOMAIN);
  CHECK(hamalg_qc_characteristics(nullptr, nullptr, 1, nullptr, nullptr, &q0, 1.0, 0.01, &csv) ==
        HAMALG_E_USAGE);

  double r = 1;
  REQUIRE(hamalg_qc_transport("free", nullptr, nullptr, nullptr, 0, 5, &r, nullptr) == HAMALG_OK);
  CHECK(r < 1e-6);
}

TEST_CASE("errors are per thread") {
  hamalg_session* s = nullptr;
  REQUIRE(hamalg_session_new(1, nullptr, 0, HAMALG_FAULT_NONE, &s) == HAMALG_OK);
  hamalg_expr* e = nullptr;
  CHECK(hamalg_parse(s, "int[x](", &e) == HAMALG_E_PARSE);
  std::string other;
  std::thread([&] {
    hamalg_expr* x = nullptr;
    CHECK(hamalg_parse(s, "int[x](phi(x))", &x) == HAMALG_OK);
    other = hamalg_last_error();
    hamalg_expr_free(x);
  }).join();
  CHECK(other.empty());
  CHECK(std::string(hamalg_last_error()).size() > 0);
  hamalg_session_free(s);
}
