#include "hamalg/core/poisson.hpp"

#include "hamalg/core/json.hpp"
#include "hamalg/core/parser.hpp"

#include <sstream>

namespace hamalg {

Symbol bracket(const Session& s, const Symbol& a, const Symbol& b) {
  const Var y = fresh_free_variable({&a.terms(), &b.terms()});
  Symbol a_pi = vderiv(s, a, Field::Pi, y);
  Symbol b_phi = vderiv(s, b, Field::Phi, y);
  Symbol a_phi = vderiv(s, a, Field::Phi, y);
  Symbol b_pi = vderiv(s, b, Field::Pi, y);
  Symbol integrand = multiply(s, a_pi, b_phi) - multiply(s, a_phi, b_pi);
  Symbol r;
  try {
    r = integrate_free(s, integrand, y);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Divergent) throw;
    throw Error(ErrorCode::Closure, std::string("bracket left the symbol class: ") + e.what());
  }
  for (const auto& t : r.terms())
    for (const auto& d : t.deltas)
      if (d.left.is_free() || d.right.is_free())
        throw Error(ErrorCode::Closure,
                    "bracket left the symbol class: a delta on a free variable remains");
  return r;
}

std::map<int, Symbol> grade_decompose(const Symbol& s) {
  std::map<int, Symbol> out;
  for (const auto& t : s.terms()) out[t.pi_degree()].terms().push_back(t);
  return out;
}

int homogeneous_grade(const Symbol& s) {
  auto g = grade_decompose(s);
  return g.size() == 1 ? g.begin()->first : -1;
}

bool AlgebraReport::passed() const {
  for (const auto& l : laws)
    if (!l.passed) return false;
  return true;
}

std::string AlgebraReport::text() const {
  std::ostringstream os;
  os << "law            samples  result\n";
  for (const auto& l : laws) {
    os << l.law;
    for (std::size_t k = l.law.size(); k < 15; ++k) os << ' ';
    std::string n = std::to_string(l.samples);
    for (std::size_t k = n.size(); k < 7; ++k) os << ' ';
    os << n << "  " << (l.passed ? "pass" : "FAIL") << "\n";
    if (!l.passed) os << "  counterexample: " << l.counterexample << "\n";
  }
  os << (passed() ? "all laws pass" : "some laws FAILED") << " (seed " << seed << ")\n";
  return os.str();
}

std::string AlgebraReport::json() const {
  Json j;
  j["seed"] = seed;
  Json laws_j;
  for (const auto& l : laws) {
    Json x;
    x["passed"] = l.passed;
    x["samples"] = l.samples;
    if (!l.passed) x["counterexample"] = l.counterexample;
    laws_j[l.law] = x;
  }
  j["laws"] = laws_j;
  j["passed"] = passed();
  return j.dump(2);
}

namespace {

class LawRunner {
 public:
  LawRunner(const Session& s, std::string name) : s_(s) { r_.law = std::move(name); }

  // `check` returns an empty string on success or a description of the failure.
  template <class F>
  void sample(F&& check) {
    ++r_.samples;
    if (!r_.passed) return;
    std::string why;
    try {
      why = check();
    } catch (const Error& e) {
      why = std::string("error: ") + e.what();
    }
    if (!why.empty()) {
      r_.passed = false;
      r_.counterexample = why;
    }
  }

  std::string show(const Symbol& x) const { return format(s_, x, FormatStyle::Compact); }
  LawResult result() const { return r_; }

 private:
  const Session& s_;
  LawResult r_;
};

}  // namespace

AlgebraReport check_algebra(const Session& base, const AlgebraOptions& opt) {
  // Nested brackets raise derivative orders well past the interactive default.
  const Session s = base.with_max_derivative_order(std::max(base.max_derivative_order(), 64));
  AlgebraReport report;
  report.seed = opt.seed;
  Rng rng(opt.seed);
  SymbolShape shape;
  shape.max_grade = opt.max_grade;
  shape.max_deriv = opt.max_deriv;
  for (const auto& n : std::vector<std::string>{"f", "g"})
    if (!s.function_kind(n)) shape.functions.clear();

  LawRunner anti(s, "antisymmetry"), bilin(s, "bilinearity"), leib(s, "leibniz"),
      jacobi(s, "jacobi"), closure(s, "closure"), grading(s, "grading");
  static const Rational scalars[] = {Rational(1), Rational(-1), Rational(1, 2), Rational(-2),
                                     Rational(3)};

  for (int k = 0; k < opt.samples; ++k) {
    Symbol a = random_symbol(s, rng, shape);
    Symbol b = random_symbol(s, rng, shape);
    Symbol c = random_symbol(s, rng, shape);
    Rational al = scalars[rng.below(5)], be = scalars[rng.below(5)];
    auto triple = [&] {
      return "a = " + anti.show(a) + "; b = " + anti.show(b) + "; c = " + anti.show(c);
    };

    anti.sample([&]() -> std::string {
      Symbol r = bracket(s, a, b) + bracket(s, b, a);
      return canonicalize(s, r).is_zero() ? "" : "{a,b}+{b,a} != 0 for " + triple();
    });
    bilin.sample([&]() -> std::string {
      Symbol lhs = bracket(s, canonicalize(s, al * a + be * b), c);
      Symbol r = lhs - al * bracket(s, a, c) - be * bracket(s, b, c);
      return canonicalize(s, r).is_zero() ? "" : "{al a + be b, c} not bilinear for " + triple();
    });
    leib.sample([&]() -> std::string {
      Symbol lhs = bracket(s, a, multiply(s, b, c));
      Symbol r = lhs - multiply(s, bracket(s, a, b), c) - multiply(s, b, bracket(s, a, c));
      return canonicalize(s, r).is_zero() ? "" : "{a,bc} != {a,b}c + b{a,c} for " + triple();
    });
    jacobi.sample([&]() -> std::string {
      Symbol r = bracket(s, a, bracket(s, b, c)) + bracket(s, b, bracket(s, c, a)) +
                 bracket(s, c, bracket(s, a, b));
      return canonicalize(s, r).is_zero() ? "" : "Jacobi sum != 0 for " + triple();
    });
    closure.sample([&]() -> std::string {
      Symbol r = bracket(s, a, b);
      return check_symbol(s, r).is_symbol ? "" : "{a,b} is not a symbol for " + triple();
    });

    SymbolShape hs = shape;
    hs.grade = static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_grade + 1)));
    Symbol u = random_symbol(s, rng, hs);
    hs.grade = static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_grade + 1)));
    Symbol v = random_symbol(s, rng, hs);
    grading.sample([&]() -> std::string {
      int gu = homogeneous_grade(u), gv = homogeneous_grade(v);
      Symbol r = bracket(s, u, v);
      if (r.is_zero()) return "";
      if (gu + gv == 0 || homogeneous_grade(r) != gu + gv - 1)
        return "grade of {u,v} is not " + std::to_string(gu + gv - 1) + " for u = " +
               grading.show(u) + "; v = " + grading.show(v);
      return "";
    });
  }
  for (auto* l : {&anti, &bilin, &leib, &jacobi, &closure, &grading})
    report.laws.push_back(l->result());
  return report;
}

}  // namespace hamalg
