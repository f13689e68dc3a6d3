#pragma once

#include "hamalg/core/expr.hpp"
#include "hamalg/core/random.hpp"

#include <map>
#include <string>
#include <vector>

namespace hamalg {

/// Periodic grid x_i = -L + i*dx, dx = 2L/N, i = 0..N-1; the origin is i = N/2.
struct LatticeConfig {
  int N = 256;
  double L = 8.0;
  int stencil = 2;  // central-difference order: 2 or 4

  double dx() const { return 2.0 * L / N; }
  double x(int i) const { return -L + i * dx(); }
  int origin() const { return N / 2; }
  void validate() const;
};

struct LatticeState {
  std::vector<double> phi, pi;
};

/// P(x - c) * exp(-a (x - c)^2), P given by coefficients in ascending powers.
struct GaussianProfile {
  std::vector<double> poly{1.0};
  double a = 1.0;
  double c = 0.0;

  /// k-th derivative at x, exactly.
  double derivative(int k, double x) const;
};

/// Numeric values for the declared functions and the mass.
struct Binding {
  std::map<std::string, GaussianProfile> functions;
  double mass = 1.0;

  /// A fixed catalog entry for every declared name.
  static Binding defaults(const Session& s);
};

/// Continuum test state: phi and pi as sums of Gaussian bumps, so the same
/// state can be sampled at any resolution.
struct StateProfile {
  std::vector<GaussianProfile> phi, pi;
  LatticeState sample(const LatticeConfig& cfg) const;
};

StateProfile random_state_profile(Rng& rng);

/// Discretized functional: integrals become dx-weighted sums, field
/// derivatives central differences, delta^(k)(x_i - x_j) the matrix entry
/// (D^k)_ij / dx. Named functions are evaluated exactly.
class LatticeFunctional {
 public:
  LatticeFunctional(const Session& s, const Symbol& sym, const LatticeConfig& cfg,
                    const Binding& bind);

  /// `free_index` assigns grid indices to free variables (by variable id).
  double operator()(const LatticeState& st, const std::map<int, int>& free_index = {}) const;

  const LatticeConfig& config() const { return cfg_; }

  /// dF/dphi_i, dF/dpi_i by 4-point central differences with step 1e-5 relative to
  /// the state's scale.
  void gradient(const LatticeState& st, std::vector<double>& dphi, std::vector<double>& dpi) const;

 private:
  struct Prepared;
  double term_value(const Term& t, const Prepared& p, const std::map<int, int>& free_index) const;

  const Session* s_;
  std::vector<Term> terms_;
  LatticeConfig cfg_;
  std::vector<double> coef_;
  std::map<std::pair<KindCode, int>, std::vector<double>> func_values_;
};

/// sum_i (1/dx) (dF/dpi_i dG/dphi_i - dF/dphi_i dG/dpi_i). Also returns the
/// L1 size of the summand through `scale` when non-null.
double numeric_bracket(const LatticeFunctional& F, const LatticeFunctional& G,
                       const LatticeState& st, double* scale = nullptr);

/// Discrete derivative D^k u on the periodic grid.
std::vector<double> lattice_derivative(const LatticeConfig& cfg, const std::vector<double>& u,
                                       int k);

struct ConvergenceRow {
  int N = 0;
  double dx = 0;
  double error = 0;  // max over states of the normalized error
};

struct BracketVerification {
  std::vector<ConvergenceRow> rows;
  /// Errors below this are rounding noise: the pair is discretely exact.
  static constexpr double kNoiseFloor = 1e-7;
  bool exact = false;
  double order = 0;  // least-squares slope of -log(error) against log(N)
  double finest_error() const { return rows.empty() ? 0 : rows.back().error; }
  std::string csv() const;
  std::string json() const;
};

/// Compare the numeric bracket of the discretized inputs with the discretized
/// symbolic bracket on each state and resolution.
BracketVerification verify_bracket(const Session& s, const Symbol& a, const Symbol& b,
                                   const std::vector<LatticeConfig>& cfgs, const Binding& bind,
                                   const std::vector<StateProfile>& states);

/// Seeded bracket-oracle corpus: random symbol pairs (input derivative order
/// <= 1) checked on random states over a resolution ladder.
struct OracleOptions {
  std::uint64_t seed = 42;
  int pairs = 20;
  int states = 3;
  std::vector<int> grid{128, 256, 512};
  double L = 8.0;
  int stencil = 2;
};

struct OraclePair {
  std::string a, b;  // compact format
  BracketVerification verification;
};

struct OracleStudy {
  std::vector<OraclePair> pairs;
  double worst_error = 0;   // max finest-grid error over pairs
  double pooled_order = 0;  // slope of the per-N max error over pairs
  double min_order = 0;     // smallest order among non-exact pairs
  int exact_pairs = 0;
  std::string json() const;
};

OracleStudy oracle_study(const Session& s, const OracleOptions& opt);

}  // namespace hamalg
