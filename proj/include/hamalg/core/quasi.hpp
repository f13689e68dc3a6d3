#pragma once

#include "hamalg/core/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace hamalg {

/// Real polynomial in a fixed list of variables; exponent vectors follow the
/// variable order.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  /// Grammar: sums/products/quotients by numbers, integer powers,
  /// parentheses. Numbers may be decimals.
  static Polynomial parse(const std::string& src, const std::vector<std::string>& vars);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double operator()(const std::vector<double>& x) const;
  Polynomial derivative(int var) const;
  int degree(int var) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double c) const;
  void add(const std::vector<int>& e, double c);

 private:
  std::vector<std::string> vars_;
  std::map<std::vector<int>, double> terms_;
};

/// H(t, p_1..p_n, q_1..q_n). With one degree of freedom the names are t, p, q;
/// otherwise t, p1..pn, q1..qn.
class FiniteDimHamiltonian {
 public:
  FiniteDimHamiltonian(const std::string& src, int dof);

  int dof() const { return n_; }
  const Polynomial& polynomial() const { return h_; }
  /// 1/2 sum_i d2H/dp_i dq_i vanishes identically.
  bool has_zero_mixed_trace() const { return zero_trace_; }
  /// Highest power of any momentum.
  int momentum_degree() const;

  double H(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  Eigen::VectorXd Hp(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  Eigen::VectorXd Hq(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  /// (i, j) = d2H / dp_i dp_j, d2H / dp_i dq_j, d2H / dq_i dq_j
  Eigen::MatrixXd Hpp(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  Eigen::MatrixXd Hpq(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  Eigen::MatrixXd Hqq(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;

  int p_index(int i) const { return 1 + i; }
  int q_index(int i) const { return 1 + n_ + i; }
  std::vector<double> point(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;

  struct Derivatives {
    double H = 0;
    Eigen::VectorXd hp, hq;
    Eigen::MatrixXd hpp, hpq, hqq;
  };
  /// H and all its first and second phase-space derivatives at one point.
  void derivatives(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q, Derivatives& d) const;

 private:
  struct Flat {
    std::vector<double> c;
    std::vector<int> e;  // row-major: terms x variables
  };
  static Flat flatten(const Polynomial& poly);
  double eval_flat(const Flat& f, const double* x) const;

  int n_;
  std::vector<Flat> flat_;  // H, hp, hq, hpp, hpq, hqq in that order
  Polynomial h_;
  std::vector<Polynomial> hp_, hq_;
  std::vector<std::vector<Polynomial>> hpp_, hpq_, hqq_;
  bool zero_trace_ = false;
};

/// Initial action S0(q) as a polynomial in q (or q1..qn).
Polynomial parse_action(const std::string& src, int dof);

struct TrajectoryPoint {
  double t = 0;
  Eigen::VectorXd q, p;
  Eigen::MatrixXd D;  // dq(t)/dq(0)
  double det = 1;
  double S = 0;       // action along the path: dS/dt = p.H_p - H
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Eigen::VectorXd q0;
  const TrajectoryPoint& back() const { return points.back(); }
  /// Columns t, q..., p..., detD, a (the last only when amplitudes are given).
  std::string csv(const std::vector<double>& amplitude = {}) const;
};

/// Classical RK4 on Hamilton's equations plus the variational equations,
/// p(0) = grad S0(q0), D(0) = I. `record` keeps every step when true, else
/// only the endpoints. Throws Domain when |det D| < 1e-8.
Trajectory integrate_characteristics(const FiniteDimHamiltonian& H, const Polynomial& S0,
                                     const Eigen::VectorXd& q0, double T, double dt,
                                     bool record = true);

inline constexpr double kCausticThreshold = 1e-8;

using AmplitudeFn = std::function<double(const Eigen::VectorXd& q)>;
/// Function of (t, q).
using FieldFn = std::function<double(double t, const Eigen::VectorXd& q)>;

/// a(t) = a0(q0) / sqrt(det D(t)) along the trajectory. Requires the
/// zero-mixed-trace flag.
std::vector<double> transport_amplitude(const FiniteDimHamiltonian& H, const Trajectory& traj,
                                        const AmplitudeFn& a0);

/// S(t, q) and a(t, q) off the characteristics: the initial point reaching q
/// at time t is found by Newton iteration with D as Jacobian.
class ShootingWkb {
 public:
  ShootingWkb(const FiniteDimHamiltonian& H, Polynomial S0, AmplitudeFn a0, double dt = 1e-3);
  double S(double t, const Eigen::VectorXd& q) const;
  double a(double t, const Eigen::VectorXd& q) const;
  FieldFn S_fn() const;
  FieldFn a_fn() const;

 private:
  struct Hit {
    double S, a;
  };
  // solved points, shared by S and a; the last one seeds the next Newton start
  struct Last {
    bool valid = false;
    double t = 0;
    Eigen::VectorXd q, q0;
    Eigen::MatrixXd D;
    Hit hit{0, 0};
  };
  struct Cache {
    std::mutex m;
    Last last;
    std::map<std::vector<double>, Hit> solved;  // key: t, q...
  };
  Hit solve(double t, const Eigen::VectorXd& q) const;
  const FiniteDimHamiltonian* H_;
  Polynomial S0_;
  AmplitudeFn a0_;
  double dt_;
  std::shared_ptr<Cache> cache_;
};

struct TransportReport {
  double hj_residual = 0;         // max |S_t + H(t, S_q, q)|
  double transport_residual = 0;  // max |a_t + a_q H_p + (a/2) tr(H_pp S_qq)|
  std::string json() const;
};

/// Grid residuals of the Hamilton-Jacobi and transport equations by 4th-order
/// central differences with step `step`. Throws Domain when the
/// Hamilton-Jacobi residual exceeds `hj_tolerance`.
TransportReport transport_residual(const FiniteDimHamiltonian& H, const FieldFn& S, const FieldFn& a,
                                   const std::vector<double>& tgrid,
                                   const std::vector<Eigen::VectorXd>& qgrid, double step = 1e-3,
                                   double hj_tolerance = 1e-4);

struct WkbRow {
  double h = 0;
  double residual = 0;
};

struct WkbReport {
  std::vector<WkbRow> rows;
  double exponent = 0;  // least-squares slope of log r against log h
  bool vanishing = false;  // all residuals zero (a = 0)
  std::string csv() const;
  std::string json() const;
};

/// r(h) = max |i h psi_t - H psi| / max |psi| for psi = a exp(i S / h), with
/// every momentum acting to the right as -i h d/dq. One degree of freedom,
/// momentum degree <= 2.
WkbReport wkb_residual(const FiniteDimHamiltonian& H, const FieldFn& S, const FieldFn& a,
                       const std::vector<double>& hs, const std::vector<double>& tgrid,
                       const std::vector<double>& qgrid, double step = 1e-3);

/// Built-in one-degree-of-freedom cases.
struct QuasiPreset {
  std::string name;
  std::string hamiltonian, action;
  AmplitudeFn a0;
  double T = 1;
  double qmin = -1, qmax = 1;
  FieldFn S_exact, a_exact;  // empty when no closed form
};

/// "oscillator", "free", "quartic".
QuasiPreset quasi_preset(const std::string& name);
std::vector<std::string> quasi_preset_names();

/// Uniform grid with n points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace hamalg
