#include "hamalg/core/suite.hpp"

#include "hamalg/core/canonical.hpp"
#include "hamalg/core/kg.hpp"
#include "hamalg/core/lattice.hpp"
#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"
#include "hamalg/core/quantum.hpp"
#include "hamalg/core/quasi.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hamalg {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::fixed << v;
  return os.str();
}

// Runtime budgets apply to the full profile only.
bool within(double seconds, double budget, bool quick) { return quick || seconds < budget; }

}  // namespace

CriterionResult check_algebra_laws(const Session& s, std::uint64_t seed, bool quick,
                                   CriterionResult* grading) {
  const auto t0 = Clock::now();
  AlgebraOptions opt;
  opt.seed = seed;
  opt.samples = quick ? 15 : 100;
  const AlgebraReport rep = check_algebra(s, opt);
  const double secs = since(t0);

  CriterionResult r{1, "algebraic laws", true, "", Json::object(), secs};
  std::string failed;
  Json laws = Json::array();
  for (const auto& l : rep.laws) {
    Json x;
    x["law"] = l.law;
    x["passed"] = l.passed;
    x["samples"] = l.samples;
    if (!l.passed) x["counterexample"] = l.counterexample;
    if (l.law == "grading") {
      if (grading) {
        *grading = CriterionResult{2, "grading law", l.passed, "", Json::object(), secs};
        grading->detail = std::to_string(l.samples) + " homogeneous pairs, bracket grade k+l-1 or zero";
        if (!l.passed) grading->detail += "; counterexample: " + l.counterexample;
        grading->data["samples"] = l.samples;
        if (!l.passed) grading->data["counterexample"] = l.counterexample;
      }
      continue;
    }
    laws.push_back(x);
    if (!l.passed) {
      r.passed = false;
      failed += (failed.empty() ? "" : "; ") + l.law + ": " + l.counterexample;
    }
  }
  r.data["seed"] = seed;
  r.data["samples"] = opt.samples;
  r.data["laws"] = laws;
  r.passed = r.passed && within(secs, 60, quick);
  r.detail = std::to_string(opt.samples) +
             " samples each of antisymmetry, bilinearity, leibniz, jacobi, closure";
  if (!failed.empty()) r.detail += "; counterexample: " + failed;
  if (!within(secs, 60, quick)) r.detail += "; over the 60 s budget";
  return r;
}

CriterionResult check_oracle(const Session& s, std::uint64_t seed, bool quick) {
  const auto t0 = Clock::now();
  OracleOptions opt;
  opt.seed = seed;
  opt.pairs = quick ? 4 : 20;
  const OracleStudy st = oracle_study(s, opt);
  const double secs = since(t0);
  const bool order_ok = std::abs(st.pooled_order - 2.0) <= 0.3 &&
                        (st.exact_pairs == static_cast<int>(st.pairs.size()) || st.min_order >= 1.7);
  const bool error_ok = st.worst_error < 1e-3;
  const bool budget_ok = within(secs, 120, quick);
  CriterionResult r{3, "lattice oracle", order_ok && error_ok && budget_ok, "",
                    Json::object(), secs};
  r.detail = std::to_string(st.pairs.size()) + " pairs x " + std::to_string(opt.states) +
             " states: pooled order " + fixed(st.pooled_order) + " (2.0 +- 0.3), min pair order " +
             fixed(st.min_order) + " (>= 1.7), max error at N=512 " + sci(st.worst_error) +
             " (< 1e-3), " + std::to_string(st.exact_pairs) + " discretely exact";
  if (!error_ok) r.detail += "; error bound not met";
  r.data = Json::parse(st.json());
  r.data["order_ok"] = order_ok;
  r.data["error_ok"] = error_ok;
  r.data["budget_ok"] = budget_ok;
  return r;
}

CriterionResult check_residual_identity(const Session& s) {
  const auto t0 = Clock::now();
  const ResidualIdentity ri = leibniz_residual(s, "f", "g");
  const std::string combo = format_terms(s, ri.combination, true, FormatStyle::Compact);
  const std::string diff = format_terms(s, ri.differentiated, true, FormatStyle::Compact);
  const std::string want = "delta0(0)*delta(x;1) - 2*delta0(1)*delta(x)";
  CriterionResult r{4, "residual identity", combo == want && ri.paths_agree, "", Json::object(),
                    since(t0)};
  r.detail = "combination " + combo + ", prefactor " +
             format_scalar(ri.prefactor_rational, ri.prefactor) +
             (ri.paths_agree ? ", differentiated path agrees" : ", differentiated path differs: " + diff);
  r.data["combination"] = combo;
  r.data["differentiated"] = diff;
  r.data["paths_agree"] = ri.paths_agree;
  return r;
}

CriterionResult check_divergence(const Session& s) {
  const auto t0 = Clock::now();
  const std::string src = "(1/2)*(pi(x)^2 + phi(x)^2)";
  const OperatorExpr H = parse_operator(s, "qint[x](" + src + ")");
  const OperatorExpr sq = ccr_reduce(s, multiply(s, H, H));
  bool flagged = false;
  for (const auto& t : sq.terms())
    for (const auto& d : t.f.div) flagged |= d.kind == DivergentKind::DeltaSquaredIntegral;
  const Symbol h = parse_symbol(s, "int[x](" + src + ")");
  bool classical_flag = false;
  std::string classical_error;
  try {
    const Symbol c = multiply(s, h, h);
    for (const auto& t : c.terms()) classical_flag |= t.f.divergent();
  } catch (const Error& e) {
    classical_flag = true;
    classical_error = e.what();
  }
  CriterionResult r{5, "divergence detection", flagged && !classical_flag, "", Json::object(),
                    since(t0)};
  r.detail = std::string("normal-ordered square ") + (flagged ? "carries" : "lacks") +
             " deltasq; classical square " + (classical_flag ? "flagged" : "unflagged");
  if (!classical_error.empty()) r.detail += " (" + classical_error + ")";
  r.data["quantum_flagged"] = flagged;
  r.data["classical_flagged"] = classical_flag;
  r.data["normal_ordered_square"] = format(s, sq, FormatStyle::Compact);
  return r;
}

CriterionResult check_quadratic_contract(const Session& base, std::uint64_t seed, bool quick) {
  const auto t0 = Clock::now();
  // brackets of canonical forms go past the interactive derivative bound
  const Session s = base.with_max_derivative_order(std::max(base.max_derivative_order(), 64));
  Rng rng(seed);
  const int pairs = quick ? 8 : 20;
  int bad = 0;
  std::string example;
  for (int k = 0; k < pairs; ++k) {
    const Symbol a = random_quadratic_symbol(s, rng), b = random_quadratic_symbol(s, rng);
    for (auto ord : {Ordering::Weyl, Ordering::Normal}) {
      std::string why;
      try {
        const OperatorExpr c = commutator(s, quantize(s, a, ord), quantize(s, b, ord));
        const Symbol br = bracket(s, a, b);
        const Symbol lim = c.is_zero() ? Symbol{} : classical_limit(s, divide_by_minus_ih(c));
        if (!equals(s, lim, br))
          why = "classical limit " + format(s, lim, FormatStyle::Compact) + " != bracket " +
                format(s, br, FormatStyle::Compact);
      } catch (const Error& e) {
        why = e.what();
      }
      if (!why.empty()) {
        ++bad;
        if (example.empty())
          example = std::string(ord == Ordering::Weyl ? "weyl" : "normal") + ": a = " +
                    format(s, a, FormatStyle::Compact) + "; b = " +
                    format(s, b, FormatStyle::Compact) + ": " + why;
      }
    }
  }
  CriterionResult r{6, "quadratic quantization", bad == 0, "", Json::object(), since(t0)};
  r.detail = std::to_string(pairs) + " pairs x {weyl, normal}: " + std::to_string(bad) +
             " mismatches";
  if (!example.empty()) r.detail += "; counterexample " + example;
  r.data["seed"] = seed;
  r.data["pairs"] = pairs;
  r.data["mismatches"] = bad;
  if (!example.empty()) r.data["counterexample"] = example;
  return r;
}

CriterionResult check_kg(bool quick) {
  const auto t0 = Clock::now();
  const std::vector<int> Ns = quick ? std::vector<int>{64, 128} : std::vector<int>{64, 128, 256};
  double defect = 0, drift = 0, group = 0;
  for (int N : Ns)
    for (double m : {0.0, 1.0, 2.5}) {
      const LatticeConfig cfg{N, 8.0, 2};
      for (double t : {0.5, 3.3, 10.0}) {
        const KgFlow f = kg_flow(cfg, m, t);
        defect = std::max(defect, f.defect);
        drift = std::max(drift, kg_energy_drift(cfg, m, f));
      }
      const KgFlow a = kg_flow(cfg, m, 3.3), b = kg_flow(cfg, m, 6.7), ab = kg_flow(cfg, m, 10.0);
      group = std::max(group, (ab.M - a.M * b.M).cwiseAbs().maxCoeff());
    }
  const double zero_mode = kg_flow({64, 8.0, 2}, 1.0, 2 * M_PI).zero_mode_defect;
  const double secs = since(t0);
  CriterionResult r{7, "klein-gordon symplecticity",
                    defect < 1e-10 && drift < 1e-9 && group < 1e-9 && zero_mode < 1e-10 &&
                        within(secs, 30, quick),
                    "", Json::object(), secs};
  r.detail = "N <= " + std::to_string(Ns.back()) + ", t <= 10, m in {0, 1, 2.5}: defect " +
             sci(defect) + " (< 1e-10), energy drift " + sci(drift) + " (< 1e-9), group " +
             sci(group) + ", zero mode " + sci(zero_mode);
  r.data["max_defect"] = defect;
  r.data["max_energy_drift"] = drift;
  r.data["group_defect"] = group;
  r.data["zero_mode_defect"] = zero_mode;
  return r;
}

CriterionResult check_quasiclassics(bool quick) {
  const auto t0 = Clock::now();
  auto pts = [](const std::vector<double>& xs) {
    std::vector<Eigen::VectorXd> r;
    for (double x : xs) r.push_back(Eigen::VectorXd::Constant(1, x));
    return r;
  };
  double transport = 0, eq9 = 0;
  for (const char* name : {"oscillator", "free"}) {
    const QuasiPreset p = quasi_preset(name);
    const FiniteDimHamiltonian H(p.hamiltonian, 1);
    const auto tg = linspace(0.01, p.T, quick ? 5 : 11);
    const auto qg = linspace(p.qmin, p.qmax, quick ? 5 : 11);
    transport = std::max(transport,
                         transport_residual(H, p.S_exact, p.a_exact, tg, pts(qg)).transport_residual);
    // The amplitude formula along characteristics against the closed form.
    const auto S0 = parse_action(p.action, 1);
    for (double q0 : qg) {
      const auto tr = integrate_characteristics(H, S0, Eigen::VectorXd::Constant(1, q0), p.T, 1e-3);
      const auto a = transport_amplitude(H, tr, p.a0);
      for (std::size_t k = 0; k < tr.points.size(); k += 50)
        eq9 = std::max(eq9, std::abs(a[k] - p.a_exact(tr.points[k].t, tr.points[k].q)));
    }
  }
  const QuasiPreset p = quasi_preset("quartic");
  const FiniteDimHamiltonian H(p.hamiltonian, 1);
  const ShootingWkb w(H, parse_action(p.action, 1), p.a0);
  const auto tg = linspace(0.1, p.T, quick ? 2 : 3);
  const auto qg = linspace(p.qmin, p.qmax, quick ? 3 : 5);
  const double quartic_transport =
      transport_residual(H, w.S_fn(), w.a_fn(), tg, pts(qg)).transport_residual;
  const WkbReport wkb = wkb_residual(H, w.S_fn(), w.a_fn(), {0.1, 0.05, 0.025}, tg, qg);
  const double secs = since(t0);
  CriterionResult r{8, "quasiclassics",
                    transport < 1e-6 && eq9 < 1e-8 && quartic_transport < 1e-6 &&
                        wkb.exponent >= 1.9 && within(secs, 60, quick),
                    "", Json::object(), secs};
  r.detail = "closed-form transport residual " + sci(transport) + " (< 1e-6), amplitude formula " +
             sci(eq9) + ", quartic transport " + sci(quartic_transport) + ", wkb exponent " +
             fixed(wkb.exponent) + " (>= 1.9)";
  r.data["transport_residual"] = transport;
  r.data["amplitude_formula_error"] = eq9;
  r.data["quartic_transport_residual"] = quartic_transport;
  r.data["wkb"] = Json::parse(wkb.json());
  return r;
}

CriterionResult check_infrastructure(const Session& s, std::uint64_t seed, bool quick) {
  const auto t0 = Clock::now();
  Rng rng(seed);
  SymbolShape shape;
  const int trips = quick ? 100 : 500, idem = quick ? 40 : 200;
  int trip_bad = 0, idem_bad = 0;
  std::string example;
  for (int k = 0; k < trips; ++k) {
    const Symbol x = random_symbol(s, rng, shape);
    for (auto style : {FormatStyle::Canonical, FormatStyle::Compact}) {
      const std::string text = format(s, x, style);
      std::string back;
      try {
        back = format(s, canonicalize(s, parse_symbol(s, text)), style);
      } catch (const Error& e) {
        back = std::string("error: ") + e.what();
      }
      if (back != text) {
        ++trip_bad;
        if (example.empty()) example = "round trip " + text + " -> " + back;
      }
    }
  }
  for (int k = 0; k < idem; ++k) {
    // raw products and sums, not yet canonical
    const Symbol a = random_symbol(s, rng, shape), b = random_symbol(s, rng, shape);
    std::vector<Term> raw;
    for (const auto& ta : a.terms())
      for (const auto& tb : b.terms()) raw.push_back(term_product(ta, tb));
    for (const auto& t : a.terms()) raw.push_back(t);
    const Symbol once = canonicalize(s, Symbol(raw));
    const Symbol twice = canonicalize(s, once);
    if (!(once == twice)) {
      ++idem_bad;
      if (example.empty())
        example = "idempotence " + format(s, once, FormatStyle::Compact) + " -> " +
                  format(s, twice, FormatStyle::Compact);
    }
  }
  auto corpus_json = [&] {
    Rng r2(seed);
    Json arr = Json::array();
    for (int k = 0; k < 20; ++k) arr.push_back(Json::parse(to_json(s, random_symbol(s, r2, shape))));
    return arr.dump();
  };
  const bool deterministic = corpus_json() == corpus_json();
  CriterionResult r{9, "infrastructure", trip_bad == 0 && idem_bad == 0 && deterministic, "",
                    Json::object(), since(t0)};
  r.detail = std::to_string(trips) + " symbols x 2 styles round-trip (" + std::to_string(trip_bad) +
             " bad), " + std::to_string(idem) + " idempotence (" + std::to_string(idem_bad) +
             " bad), JSON " + (deterministic ? "deterministic" : "not deterministic");
  if (!example.empty()) r.detail += "; counterexample " + example;
  r.data["round_trip_failures"] = trip_bad;
  r.data["idempotence_failures"] = idem_bad;
  r.data["json_deterministic"] = deterministic;
  return r;
}

bool SuiteReport::passed() const {
  for (const auto& c : criteria)
    if (!c.passed) return false;
  return !criteria.empty();
}

std::string SuiteReport::text() const {
  std::ostringstream os;
  for (const auto& c : criteria)
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << ": " << c.detail << " ("
       << fixed(c.seconds, 1) << " s)\n";
  os << (passed() ? "all criteria passed" : "some criteria failed") << "\n";
  return os.str();
}

std::string SuiteReport::json() const {
  Json j;
  j["profile"] = options.profile == SuiteProfile::Quick ? "quick" : "full";
  j["seed"] = options.seed;
  j["passed"] = passed();
  Json cs = Json::array();
  for (const auto& c : criteria) {
    Json x;
    x["id"] = c.id;
    x["name"] = c.name;
    x["passed"] = c.passed;
    x["detail_values"] = c.data;
    cs.push_back(x);
  }
  j["criteria"] = cs;
  return j.dump(2);
}

SuiteReport run_suite(const SuiteOptions& opt) {
  SessionOptions so;
  so.fault = opt.fault;
  const Session s(so);
  const bool quick = opt.profile == SuiteProfile::Quick;
  SuiteReport rep;
  rep.options = opt;
  auto guarded = [&](int id, const char* name, auto&& run) {
    try {
      rep.criteria.push_back(run());
    } catch (const std::exception& e) {
      CriterionResult r{id, name, false, std::string("error: ") + e.what(), Json::object(), 0};
      r.data["error"] = e.what();
      rep.criteria.push_back(r);
    }
  };
  CriterionResult grading{2, "grading law", false, "not run", Json::object(), 0};
  guarded(1, "algebraic laws", [&] { return check_algebra_laws(s, opt.seed, quick, &grading); });
  rep.criteria.push_back(grading);
  guarded(3, "lattice oracle", [&] { return check_oracle(s, opt.seed, quick); });
  guarded(4, "residual identity", [&] { return check_residual_identity(s); });
  guarded(5, "divergence detection", [&] { return check_divergence(s); });
  guarded(6, "quadratic quantization", [&] { return check_quadratic_contract(s, opt.seed, quick); });
  guarded(7, "klein-gordon symplecticity", [&] { return check_kg(quick); });
  guarded(8, "quasiclassics", [&] { return check_quasiclassics(quick); });
  guarded(9, "infrastructure", [&] { return check_infrastructure(s, opt.seed, quick); });
  return rep;
}

}  // namespace hamalg
