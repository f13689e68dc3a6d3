#include "hamalg/hamalg.h"

#include "hamalg/core/canonical.hpp"
#include "hamalg/core/json.hpp"
#include "hamalg/core/kg.hpp"
#include "hamalg/core/lattice.hpp"
#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"
#include "hamalg/core/quantum.hpp"
#include "hamalg/core/quasi.hpp"
#include "hamalg/core/suite.hpp"
#include "hamalg/core/variational.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <variant>

using namespace hamalg;

struct hamalg_session {
  Session s;
};

struct hamalg_expr {
  Parsed v;
};

namespace {

thread_local std::string g_error;

hamalg_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::Usage: return HAMALG_E_USAGE;
    case ErrorCode::Parse: return HAMALG_E_PARSE;
    case ErrorCode::Domain: return HAMALG_E_DOMAIN;
    case ErrorCode::Divergent: return HAMALG_E_DIVERGENT;
    case ErrorCode::Closure: return HAMALG_E_CLOSURE;
    case ErrorCode::DerivativeBound: return HAMALG_E_DERIVATIVE_BOUND;
    case ErrorCode::Internal: return HAMALG_E_INTERNAL;
  }
  return HAMALG_E_INTERNAL;
}

template <class F>
hamalg_status guard(F&& f) {
  g_error.clear();
  try {
    f();
    return HAMALG_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
  } catch (const std::exception& e) {
    g_error = e.what();
  } catch (...) {
    g_error = "unknown error";
  }
  return HAMALG_E_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::Usage, std::string("null argument: ") + what);
}

char* dup(const std::string& s) {
  char* r = static_cast<char*>(std::malloc(s.size() + 1));
  if (!r) throw std::bad_alloc();
  std::memcpy(r, s.c_str(), s.size() + 1);
  return r;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

const Symbol& symbol(const hamalg_expr* e, const char* what) {
  need(e, what);
  if (auto* p = std::get_if<Symbol>(&e->v)) return *p;
  throw Error(ErrorCode::Domain, std::string(what) + " must be a classical symbol (int), not an operator");
}

const OperatorExpr& op(const hamalg_expr* e, const char* what) {
  need(e, what);
  if (auto* p = std::get_if<OperatorExpr>(&e->v)) return *p;
  throw Error(ErrorCode::Domain, std::string(what) + " must be an operator expression (qint)");
}

Ordering ordering(hamalg_ordering o) { return o == HAMALG_WEYL ? Ordering::Weyl : Ordering::Normal; }

hamalg_expr* wrap(Parsed v) { return new hamalg_expr{std::move(v)}; }

std::vector<std::string> split_names(const char* s) {
  std::vector<std::string> r;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos) r.push_back(item.substr(b, e - b + 1));
  }
  return r;
}

std::string terms_json(const Session& s, const std::vector<Term>& ts) {
  return to_json(s, OperatorExpr(ts));
}

// One-degree-of-freedom problem assembled from a preset or explicit strings.
struct QcProblem {
  std::string H, S0;
  AmplitudeFn a0;
  double T = 1, qmin = -1, qmax = 1;
  FieldFn S_exact, a_exact;
};

QcProblem qc_problem(const char* preset, const char* H, const char* S0, const char* a0, double T,
                     int dof) {
  QcProblem p;
  if (preset && *preset) {
    if (dof != 1) throw Error(ErrorCode::Usage, "presets have one degree of freedom");
    QuasiPreset q = quasi_preset(preset);
    p.H = q.hamiltonian;
    p.S0 = q.action;
    p.a0 = q.a0;
    p.T = q.T;
    p.qmin = q.qmin;
    p.qmax = q.qmax;
    p.S_exact = q.S_exact;
    p.a_exact = q.a_exact;
  }
  if (H) {
    p.H = H;
    p.S_exact = p.a_exact = nullptr;
  }
  if (S0) {
    p.S0 = S0;
    p.S_exact = p.a_exact = nullptr;
  }
  if (a0) {
    const Polynomial poly = parse_action(a0, dof);
    p.a0 = [poly](const Eigen::VectorXd& q) { return poly(std::vector<double>(q.data(), q.data() + q.size())); };
    p.a_exact = nullptr;
  }
  if (p.H.empty()) throw Error(ErrorCode::Usage, "a Hamiltonian or a preset is required");
  if (p.S0.empty()) p.S0 = "0";
  if (!p.a0) p.a0 = [](const Eigen::VectorXd&) { return 1.0; };
  if (T > 0) p.T = T;
  if (!std::isfinite(p.T)) throw Error(ErrorCode::Usage, "T must be finite");
  return p;
}

std::vector<Eigen::VectorXd> points(const std::vector<double>& xs) {
  std::vector<Eigen::VectorXd> r;
  for (double x : xs) r.push_back(Eigen::VectorXd::Constant(1, x));
  return r;
}

}  // namespace

extern "C" {

const char* hamalg_version(void) { return "1.0.0"; }
const char* hamalg_last_error(void) { return g_error.c_str(); }
void hamalg_string_free(char* s) { std::free(s); }

hamalg_status hamalg_session_new(int dimension, const char* functions, int max_order,
                                 hamalg_fault fault, hamalg_session** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    if (dimension < 1) throw Error(ErrorCode::Usage, "dimension must be at least 1");
    SessionOptions o;
    o.dimension = dimension;
    if (functions) o.functions = split_names(functions);
    if (max_order > 0) o.max_derivative_order = max_order;
    o.fault = fault == HAMALG_FAULT_CANONICALIZER_SIGN ? Fault::CanonicalizerSign : Fault::None;
    *out = new hamalg_session{Session(o)};
  });
}

void hamalg_session_free(hamalg_session* s) { delete s; }

hamalg_status hamalg_parse(const hamalg_session* s, const char* src, hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(src, "source");
    need(out, "out");
    *out = nullptr;
    Parsed p = parse(s->s, src);
    if (auto* sym = std::get_if<Symbol>(&p))
      *out = wrap(canonicalize(s->s, *sym));
    else
      *out = wrap(canonicalize(s->s, std::get<OperatorExpr>(p)));
  });
}

void hamalg_expr_free(hamalg_expr* e) { delete e; }

int hamalg_expr_is_operator(const hamalg_expr* e) {
  return e && std::holds_alternative<OperatorExpr>(e->v);
}

int hamalg_expr_is_zero(const hamalg_expr* e) {
  if (!e) return 0;
  return std::visit([](const auto& x) { return x.is_zero() ? 1 : 0; }, e->v);
}

int hamalg_expr_is_divergent(const hamalg_expr* e) {
  if (!e) return 0;
  if (auto* o = std::get_if<OperatorExpr>(&e->v)) return o->divergent();
  for (const auto& t : std::get<Symbol>(e->v).terms())
    if (t.f.divergent()) return 1;
  return 0;
}

hamalg_status hamalg_format(const hamalg_session* s, const hamalg_expr* e, hamalg_style style,
                            char** out) {
  return guard([&] {
    need(s, "session");
    need(e, "expression");
    need(out, "out");
    const FormatStyle fs = style == HAMALG_STYLE_CANONICAL ? FormatStyle::Canonical : FormatStyle::Compact;
    *out = dup(std::visit([&](const auto& x) { return format(s->s, x, fs); }, e->v));
  });
}

hamalg_status hamalg_to_json(const hamalg_session* s, const hamalg_expr* e, int indent, char** out) {
  return guard([&] {
    need(s, "session");
    need(e, "expression");
    need(out, "out");
    *out = dup(std::visit([&](const auto& x) { return to_json(s->s, x, indent); }, e->v));
  });
}

hamalg_status hamalg_vderiv(const hamalg_session* s, const hamalg_expr* e, hamalg_field field,
                            hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    const Symbol& a = symbol(e, "argument");
    // y when it is free to take, else the first unused name
    Var y = Var::free(1);
    auto uses = [&](Var v) {
      for (const auto& t : a.terms()) {
        for (const auto& f : t.fields) if (f.arg == v) return true;
        for (const auto& f : t.funcs) if (f.arg == v) return true;
        for (const auto& d : t.deltas) if (d.left == v || d.right == v) return true;
      }
      return false;
    };
    if (uses(y)) y = fresh_free_variable({&a.terms()});
    *out = wrap(vderiv(s->s, a, field == HAMALG_PI ? Field::Pi : Field::Phi, y));
  });
}

hamalg_status hamalg_bracket(const hamalg_session* s, const hamalg_expr* a, const hamalg_expr* b,
                             hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    *out = wrap(bracket(s->s, symbol(a, "first argument"), symbol(b, "second argument")));
  });
}

hamalg_status hamalg_grade(const hamalg_session* s, const hamalg_expr* e, size_t cap, int* grades,
                           hamalg_expr** parts, size_t* count) {
  return guard([&] {
    need(s, "session");
    need(count, "count");
    const auto g = grade_decompose(symbol(e, "argument"));
    *count = g.size();
    std::size_t k = 0;
    for (const auto& [grade, part] : g) {
      if (k >= cap) break;
      if (grades) grades[k] = grade;
      if (parts) parts[k] = wrap(part);
      ++k;
    }
  });
}

hamalg_status hamalg_multiply(const hamalg_session* s, const hamalg_expr* a, const hamalg_expr* b,
                              hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(a, "first argument");
    need(b, "second argument");
    need(out, "out");
    if (hamalg_expr_is_operator(a) != hamalg_expr_is_operator(b))
      throw Error(ErrorCode::Usage, "cannot multiply a symbol by an operator expression");
    if (hamalg_expr_is_operator(a))
      *out = wrap(multiply(s->s, op(a, "first argument"), op(b, "second argument")));
    else
      *out = wrap(multiply(s->s, symbol(a, "first argument"), symbol(b, "second argument")));
  });
}

hamalg_status hamalg_equals(const hamalg_session* s, const hamalg_expr* a, const hamalg_expr* b,
                            int* equal) {
  return guard([&] {
    need(s, "session");
    need(a, "first argument");
    need(b, "second argument");
    need(equal, "equal");
    if (hamalg_expr_is_operator(a) != hamalg_expr_is_operator(b))
      throw Error(ErrorCode::Usage, "cannot compare a symbol with an operator expression");
    if (hamalg_expr_is_operator(a))
      *equal = ccr_reduce(s->s, op(a, "first argument") - op(b, "second argument")).is_zero();
    else
      *equal = equals(s->s, symbol(a, "first argument"), symbol(b, "second argument"));
  });
}

hamalg_status hamalg_check_symbol(const hamalg_session* s, const hamalg_expr* e, int* is_symbol,
                                  char** why) {
  return guard([&] {
    need(s, "session");
    need(is_symbol, "is_symbol");
    const SymbolReport r = check_symbol(s->s, symbol(e, "argument"));
    *is_symbol = r.is_symbol;
    std::string w;
    if (!r.phi_witnesses.empty())
      w += "dphi: " + format_terms(s->s, r.phi_witnesses, false, FormatStyle::Compact);
    if (!r.pi_witnesses.empty())
      w += std::string(w.empty() ? "" : "; ") + "dpi: " +
           format_terms(s->s, r.pi_witnesses, false, FormatStyle::Compact);
    put(why, w);
  });
}

hamalg_status hamalg_quantize(const hamalg_session* s, const hamalg_expr* e, hamalg_ordering o,
                              hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    *out = wrap(quantize(s->s, symbol(e, "argument"), ordering(o)));
  });
}

hamalg_status hamalg_commutator(const hamalg_session* s, const hamalg_expr* a, const hamalg_expr* b,
                                hamalg_ordering o, hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(a, "first argument");
    need(b, "second argument");
    need(out, "out");
    auto as_op = [&](const hamalg_expr* e) {
      if (auto* p = std::get_if<OperatorExpr>(&e->v)) return *p;
      return quantize(s->s, std::get<Symbol>(e->v), ordering(o));
    };
    *out = wrap(commutator(s->s, as_op(a), as_op(b)));
  });
}

hamalg_status hamalg_classical_limit(const hamalg_session* s, const hamalg_expr* e, hamalg_expr** out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    *out = wrap(classical_limit(s->s, op(e, "argument")));
  });
}

hamalg_status hamalg_correspondence(const hamalg_session* s, const hamalg_expr* a, const hamalg_expr* b,
                                    hamalg_ordering o, int* passed, char** text, char** json) {
  return guard([&] {
    need(s, "session");
    const CorrespondenceReport r =
        correspondence_check(s->s, symbol(a, "first argument"), symbol(b, "second argument"), ordering(o));
    if (passed) *passed = r.passed();
    const auto fmt = [&](const std::vector<Term>& ts) {
      return ts.empty() ? std::string("0") : format_terms(s->s, ts, true, FormatStyle::Compact);
    };
    std::string t;
    t += std::string(r.passed() ? "PASS" : "FAIL") + " correspondence (" +
         (o == HAMALG_WEYL ? "weyl" : "normal") + ")\n";
    t += "residual: " + format(s->s, r.residual, FormatStyle::Compact) + "\n";
    t += "noncentral: " + fmt(r.noncentral) + "\n";
    t += "central: " + fmt(r.central) + "\n";
    put(text, t);
    Json j = Json::object();
    j["passed"] = r.passed();
    j["ordering"] = o == HAMALG_WEYL ? "weyl" : "normal";
    j["residual"] = format(s->s, r.residual, FormatStyle::Compact);
    j["noncentral"] = Json::parse(terms_json(s->s, r.noncentral))["terms"];
    j["central"] = Json::parse(terms_json(s->s, r.central))["terms"];
    put(json, j.dump(2));
  });
}

hamalg_status hamalg_residual_identity(const hamalg_session* s, const char* f, const char* g,
                                       char** text, char** json) {
  return guard([&] {
    need(s, "session");
    const std::string fn = f ? f : "f", gn = g ? g : "g";
    const ResidualIdentity r = leibniz_residual(s->s, fn, gn);
    const std::string combo = format_terms(s->s, r.combination, true, FormatStyle::Compact);
    const std::string pref = format_scalar(r.prefactor_rational, r.prefactor);
    const std::string diff = format_terms(s->s, r.differentiated, true, FormatStyle::Compact);
    const std::string resid = format_terms(s->s, r.residual, true, FormatStyle::Compact);
    std::string t = combo + "\n";
    t += "prefactor: " + pref + "\n";
    t += "residual: " + resid + "\n";
    t += "differentiated: " + diff + "\n";
    t += std::string("paths agree: ") + (r.paths_agree ? "yes" : "no") + "\n";
    put(text, t);
    Json j = Json::object();
    j["f"] = fn;
    j["g"] = gn;
    j["combination"] = combo;
    j["prefactor"] = pref;
    j["residual"] = resid;
    j["differentiated"] = diff;
    j["paths_agree"] = r.paths_agree;
    put(json, j.dump(2));
  });
}

hamalg_status hamalg_check_algebra(const hamalg_session* s, uint64_t seed, int samples, int max_grade,
                                   int max_deriv, int* passed, char** text, char** json) {
  return guard([&] {
    need(s, "session");
    if (samples < 1 || max_grade < 1 || max_deriv < 0)
      throw Error(ErrorCode::Usage, "samples and max grade must be positive, max derivative non-negative");
    AlgebraOptions o;
    o.seed = seed;
    o.samples = samples;
    o.max_grade = max_grade;
    o.max_deriv = max_deriv;
    // laws raise derivative orders; give them headroom like the suite does
    const Session big = s->s.with_max_derivative_order(std::max(s->s.max_derivative_order(), 64));
    const AlgebraReport r = check_algebra(big, o);
    if (passed) *passed = r.passed();
    put(text, r.text());
    put(json, r.json());
  });
}

hamalg_status hamalg_lattice_verify(const hamalg_session* s, const hamalg_expr* a, const hamalg_expr* b,
                                    const int* Ns, size_t n_count, double L, int stencil, uint64_t seed,
                                    int states, int* exact, double* order, double* finest_error,
                                    char** csv, char** json) {
  return guard([&] {
    need(s, "session");
    need(Ns, "resolutions");
    if (n_count < 2) throw Error(ErrorCode::Usage, "need at least two resolutions");
    if (states < 1) throw Error(ErrorCode::Usage, "need at least one state");
    std::vector<LatticeConfig> cfgs;
    for (std::size_t k = 0; k < n_count; ++k) {
      LatticeConfig c{Ns[k], L, stencil};
      c.validate();
      cfgs.push_back(c);
    }
    Rng rng(seed);
    std::vector<StateProfile> st;
    for (int k = 0; k < states; ++k) st.push_back(random_state_profile(rng));
    const BracketVerification v = verify_bracket(s->s, symbol(a, "first argument"),
                                                 symbol(b, "second argument"), cfgs,
                                                 Binding::defaults(s->s), st);
    if (exact) *exact = v.exact;
    if (order) *order = v.order;
    if (finest_error) *finest_error = v.finest_error();
    put(csv, v.csv());
    put(json, v.json());
  });
}

hamalg_status hamalg_kg_flow(int N, double L, int stencil, double m, double t, double* defect,
                             double* energy_drift, char** json) {
  return guard([&] {
    LatticeConfig c{N, L, stencil};
    c.validate();
    const KgFlow f = kg_flow(c, m, t);
    const double drift = kg_energy_drift(c, m, f);
    if (defect) *defect = f.defect;
    if (energy_drift) *energy_drift = drift;
    if (json) {
      Json j = Json::parse(f.json());
      j["N"] = N;
      j["L"] = L;
      j["stencil"] = stencil;
      j["m"] = m;
      j["t"] = t;
      j["energy_drift"] = drift;
      *json = dup(j.dump(2));
    }
  });
}

hamalg_status hamalg_qc_characteristics(const char* preset, const char* H, int dof, const char* S0,
                                        const char* a0, const double* q0, double T, double dt,
                                        char** csv) {
  return guard([&] {
    need(q0, "q0");
    need(csv, "csv");
    if (!(dt > 0)) throw Error(ErrorCode::Usage, "dt must be positive");
    const QcProblem p = qc_problem(preset, H, S0, a0, T, dof);
    const FiniteDimHamiltonian h(p.H, dof);
    const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(q0, dof);
    const Trajectory tr = integrate_characteristics(h, parse_action(p.S0, dof), q, p.T, dt);
    // the amplitude column needs the zero mixed trace
    *csv = dup(h.has_zero_mixed_trace() ? tr.csv(transport_amplitude(h, tr, p.a0)) : tr.csv());
  });
}

hamalg_status hamalg_qc_transport(const char* preset, const char* H, const char* S0, const char* a0,
                                  double T, int grid, double* residual, char** json) {
  return guard([&] {
    if (grid < 2) throw Error(ErrorCode::Usage, "grid needs at least two points");
    const QcProblem p = qc_problem(preset, H, S0, a0, T, 1);
    const FiniteDimHamiltonian h(p.H, 1);
    const auto tg = linspace(0.01 * p.T, p.T, grid);
    const auto qg = points(linspace(p.qmin, p.qmax, grid));
    const ShootingWkb w(h, parse_action(p.S0, 1), p.a0);
    const TransportReport r = transport_residual(h, w.S_fn(), w.a_fn(), tg, qg);
    Json j = Json::parse(r.json());
    j["source"] = "shooting";
    if (p.S_exact && p.a_exact) {
      const TransportReport c = transport_residual(h, p.S_exact, p.a_exact, tg, qg);
      j["closed_form"] = Json::parse(c.json());
    }
    if (residual) *residual = r.transport_residual;
    put(json, j.dump(2));
  });
}

hamalg_status hamalg_qc_wkb(const char* preset, const char* H, const char* S0, const char* a0, double T,
                            const double* hs, size_t h_count, int grid, double* exponent, char** csv,
                            char** json) {
  return guard([&] {
    need(hs, "h values");
    if (h_count < 2) throw Error(ErrorCode::Usage, "need at least two values of h");
    if (grid < 2) throw Error(ErrorCode::Usage, "grid needs at least two points");
    const QcProblem p = qc_problem(preset, H, S0, a0, T, 1);
    const FiniteDimHamiltonian h(p.H, 1);
    const ShootingWkb w(h, parse_action(p.S0, 1), p.a0);
    const auto tg = linspace(0.2 * p.T, p.T, std::max(2, grid / 2));
    const auto qg = linspace(p.qmin, p.qmax, grid);
    const WkbReport r = wkb_residual(h, w.S_fn(), w.a_fn(), std::vector<double>(hs, hs + h_count), tg, qg);
    if (exponent) *exponent = r.exponent;
    put(csv, r.csv());
    put(json, r.json());
  });
}

hamalg_status hamalg_suite(int quick, uint64_t seed, hamalg_fault fault, int* passed, char** text,
                           char** json) {
  return guard([&] {
    SuiteOptions o;
    o.profile = quick ? SuiteProfile::Quick : SuiteProfile::Full;
    o.seed = seed;
    o.fault = fault == HAMALG_FAULT_CANONICALIZER_SIGN ? Fault::CanonicalizerSign : Fault::None;
    const SuiteReport r = run_suite(o);
    if (passed) *passed = r.passed();
    put(text, r.text());
    put(json, r.json());
  });
}

}  // extern "C"
