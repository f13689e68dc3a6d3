#include "hamalg/core/quasi.hpp"

#include "hamalg/core/json.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>

namespace hamalg {

// ---------------------------------------------------------------- polynomials

void Polynomial::add(const std::vector<int>& e, double c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add(e, c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      std::vector<int> e(ea.size());
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      r.add(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::scaled(double c) const {
  Polynomial r(vars_);
  for (const auto& [e, v] : terms_) r.add(e, c * v);
  return r;
}

double Polynomial::operator()(const std::vector<double>& x) const {
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double v = c;
    for (std::size_t k = 0; k < e.size(); ++k)
      for (int j = 0; j < e[k]; ++j) v *= x[k];
    s += v;
  }
  return s;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    auto d = e;
    --d[var];
    r.add(d, c * e[var]);
  }
  return r;
}

int Polynomial::degree(int var) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

namespace {

class PolyParser {
 public:
  PolyParser(const std::string& src, const std::vector<std::string>& vars)
      : src_(src), vars_(vars) {}

  Polynomial run() {
    Polynomial r = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Parse, "column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Polynomial constant(double c) const {
    Polynomial p(vars_);
    p.add(std::vector<int>(vars_.size(), 0), c);
    return p;
  }

  Polynomial expr() {
    Polynomial r = eat('-') ? term().scaled(-1) : (eat('+'), term());
    for (;;) {
      if (eat('+')) r = r + term();
      else if (eat('-')) r = r + term().scaled(-1);
      else return r;
    }
  }
  Polynomial term() {
    Polynomial r = power();
    for (;;) {
      if (eat('*')) {
        r = r * power();
      } else if (eat('/')) {
        Polynomial d = power();
        std::vector<int> zero(vars_.size(), 0);
        if (d.terms().size() != 1 || d.terms().begin()->first != zero)
          fail("division only by a nonzero number");
        r = r.scaled(1.0 / d.terms().begin()->second);
      } else {
        return r;
      }
    }
  }
  Polynomial power() {
    Polynomial b = atom();
    if (!eat('^')) return b;
    skip();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a non-negative integer exponent");
    int k = std::stoi(src_.substr(start, pos_ - start));
    Polynomial r = constant(1);
    for (int j = 0; j < k; ++j) r = r * b;
    return r;
  }
  Polynomial atom() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (c == '-') {
      ++pos_;
      return atom().scaled(-1);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(src_.substr(pos_), &used);
      pos_ += used;
      return constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      for (std::size_t k = 0; k < vars_.size(); ++k)
        if (vars_[k] == name) {
          Polynomial p(vars_);
          std::vector<int> e(vars_.size(), 0);
          e[k] = 1;
          p.add(e, 1);
          return p;
        }
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& src_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

std::vector<std::string> phase_names(int n) {
  std::vector<std::string> v{"t"};
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? "p" : "p" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? "q" : "q" + std::to_string(i + 1));
  return v;
}

}  // namespace

Polynomial Polynomial::parse(const std::string& src, const std::vector<std::string>& vars) {
  return PolyParser(src, vars).run();
}

Polynomial parse_action(const std::string& src, int dof) {
  auto names = phase_names(dof);
  std::vector<std::string> qs(names.begin() + 1 + dof, names.end());
  return Polynomial::parse(src, qs);
}

// ---------------------------------------------------------------- Hamiltonian

FiniteDimHamiltonian::FiniteDimHamiltonian(const std::string& src, int dof) : n_(dof) {
  if (dof < 1 || dof > 16) throw Error(ErrorCode::Usage, "degrees of freedom must be in 1..16");
  h_ = Polynomial::parse(src, phase_names(dof));
  for (int i = 0; i < n_; ++i) {
    hp_.push_back(h_.derivative(p_index(i)));
    hq_.push_back(h_.derivative(q_index(i)));
  }
  hpp_.resize(n_);
  hpq_.resize(n_);
  hqq_.resize(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      hpp_[i].push_back(hp_[i].derivative(p_index(j)));
      hpq_[i].push_back(hp_[i].derivative(q_index(j)));
      hqq_[i].push_back(hq_[i].derivative(q_index(j)));
    }
  Polynomial trace(phase_names(dof));
  for (int i = 0; i < n_; ++i) trace = trace + hpq_[i][i];
  zero_trace_ = trace.is_zero();
  flat_.push_back(flatten(h_));
  for (const auto* v : {&hp_, &hq_})
    for (const auto& poly : *v) flat_.push_back(flatten(poly));
  for (const auto* m : {&hpp_, &hpq_, &hqq_})
    for (const auto& row : *m)
      for (const auto& poly : row) flat_.push_back(flatten(poly));
}

FiniteDimHamiltonian::Flat FiniteDimHamiltonian::flatten(const Polynomial& poly) {
  Flat f;
  for (const auto& [e, c] : poly.terms()) {
    f.c.push_back(c);
    f.e.insert(f.e.end(), e.begin(), e.end());
  }
  return f;
}

double FiniteDimHamiltonian::eval_flat(const Flat& f, const double* x) const {
  const std::size_t nv = 1 + 2 * static_cast<std::size_t>(n_);
  double s = 0;
  for (std::size_t k = 0; k < f.c.size(); ++k) {
    double v = f.c[k];
    const int* e = f.e.data() + k * nv;
    for (std::size_t i = 0; i < nv; ++i)
      for (int j = 0; j < e[i]; ++j) v *= x[i];
    s += v;
  }
  return s;
}

void FiniteDimHamiltonian::derivatives(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                    Derivatives& d) const {
  double x[1 + 2 * 16];
  x[0] = t;
  for (int i = 0; i < n_; ++i) {
    x[p_index(i)] = p(i);
    x[q_index(i)] = q(i);
  }
  d.hp.resize(n_);
  d.hq.resize(n_);
  d.hpp.resize(n_, n_);
  d.hpq.resize(n_, n_);
  d.hqq.resize(n_, n_);
  const Flat* f = flat_.data();
  d.H = eval_flat(*f++, x);
  for (int i = 0; i < n_; ++i) d.hp(i) = eval_flat(*f++, x);
  for (int i = 0; i < n_; ++i) d.hq(i) = eval_flat(*f++, x);
  for (auto* m : {&d.hpp, &d.hpq, &d.hqq})
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) (*m)(i, j) = eval_flat(*f++, x);
}

int FiniteDimHamiltonian::momentum_degree() const {
  int d = 0;
  for (int i = 0; i < n_; ++i) d = std::max(d, h_.degree(p_index(i)));
  return d;
}

std::vector<double> FiniteDimHamiltonian::point(double t, const Eigen::VectorXd& p,
                                                const Eigen::VectorXd& q) const {
  std::vector<double> x(1 + 2 * n_);
  x[0] = t;
  for (int i = 0; i < n_; ++i) {
    x[p_index(i)] = p(i);
    x[q_index(i)] = q(i);
  }
  return x;
}

double FiniteDimHamiltonian::H(double t, const Eigen::VectorXd& p, const Eigen::VectorXd& q) const {
  return h_(point(t, p, q));
}

Eigen::VectorXd FiniteDimHamiltonian::Hp(double t, const Eigen::VectorXd& p,
                                         const Eigen::VectorXd& q) const {
  auto x = point(t, p, q);
  Eigen::VectorXd r(n_);
  for (int i = 0; i < n_; ++i) r(i) = hp_[i](x);
  return r;
}

Eigen::VectorXd FiniteDimHamiltonian::Hq(double t, const Eigen::VectorXd& p,
                                         const Eigen::VectorXd& q) const {
  auto x = point(t, p, q);
  Eigen::VectorXd r(n_);
  for (int i = 0; i < n_; ++i) r(i) = hq_[i](x);
  return r;
}

namespace {

Eigen::MatrixXd evaluate(const std::vector<std::vector<Polynomial>>& m, const std::vector<double>& x) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = m[i][j](x);
  return r;
}

}  // namespace

Eigen::MatrixXd FiniteDimHamiltonian::Hpp(double t, const Eigen::VectorXd& p,
                                          const Eigen::VectorXd& q) const {
  return evaluate(hpp_, point(t, p, q));
}
Eigen::MatrixXd FiniteDimHamiltonian::Hpq(double t, const Eigen::VectorXd& p,
                                          const Eigen::VectorXd& q) const {
  return evaluate(hpq_, point(t, p, q));
}
Eigen::MatrixXd FiniteDimHamiltonian::Hqq(double t, const Eigen::VectorXd& p,
                                          const Eigen::VectorXd& q) const {
  return evaluate(hqq_, point(t, p, q));
}

// ---------------------------------------------------------------- characteristics

namespace {

struct Flow {
  Eigen::VectorXd q, p;
  Eigen::MatrixXd Q, P;  // dq/dq0, dp/dq0
  double S = 0;

  Flow axpy(double h, const Flow& k) const {
    return {q + h * k.q, p + h * k.p, Q + h * k.Q, P + h * k.P, S + h * k.S};
  }
};

Flow rhs(const FiniteDimHamiltonian& H, double t, const Flow& y) {
  thread_local FiniteDimHamiltonian::Derivatives h;
  H.derivatives(t, y.p, y.q, h);
  Flow d;
  d.q = h.hp;
  d.p = -h.hq;
  d.Q.noalias() = h.hpq * y.Q;
  d.Q.noalias() += h.hpp * y.P;
  d.P.noalias() = -h.hqq * y.Q;
  d.P.noalias() -= h.hpq.transpose() * y.P;
  d.S = y.p.dot(h.hp) - h.H;
  return d;
}

TrajectoryPoint snapshot(double t, const Flow& y) {
  TrajectoryPoint pt;
  pt.t = t;
  pt.q = y.q;
  pt.p = y.p;
  pt.D = y.Q;
  pt.det = y.Q.determinant();
  pt.S = y.S;
  return pt;
}

}  // namespace

Trajectory integrate_characteristics(const FiniteDimHamiltonian& H, const Polynomial& S0,
                                     const Eigen::VectorXd& q0, double T, double dt, bool record) {
  const int n = H.dof();
  if (q0.size() != n) throw Error(ErrorCode::Usage, "initial point has the wrong dimension");
  if (!(dt > 0)) throw Error(ErrorCode::Usage, "time step must be positive");
  if (!std::isfinite(T)) throw Error(ErrorCode::Usage, "horizon must be finite");
  std::vector<double> x(q0.data(), q0.data() + n);
  Flow y;
  y.q = q0;
  y.p.resize(n);
  y.P.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Polynomial di = S0.derivative(i);
    y.p(i) = di(x);
    for (int j = 0; j < n; ++j) y.P(i, j) = di.derivative(j)(x);
  }
  y.Q = Eigen::MatrixXd::Identity(n, n);
  y.S = 0;

  Trajectory traj;
  traj.q0 = q0;
  traj.points.push_back(snapshot(0, y));
  const int steps = T == 0 ? 0 : static_cast<int>(std::ceil(std::abs(T) / dt - 1e-9));
  const double h = steps ? T / steps : 0;
  double last_det = 1;
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Flow k1 = rhs(H, t, y);
    const Flow k2 = rhs(H, t + h / 2, y.axpy(h / 2, k1));
    const Flow k3 = rhs(H, t + h / 2, y.axpy(h / 2, k2));
    const Flow k4 = rhs(H, t + h, y.axpy(h, k3));
    y.q += h / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q);
    y.p += h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    y.Q += h / 6 * (k1.Q + 2 * k2.Q + 2 * k3.Q + k4.Q);
    y.P += h / 6 * (k1.P + 2 * k2.P + 2 * k3.P + k4.P);
    y.S += h / 6 * (k1.S + 2 * k2.S + 2 * k3.S + k4.S);
    const double det = y.Q.determinant();
    // a sign change means the step jumped over the zero
    if (std::abs(det) < kCausticThreshold || (det > 0) != (last_det > 0)) {
      std::ostringstream os;
      os << "caustic near t = " << (s + 1) * h << ": det dq/dq0 = " << det;
      throw Error(ErrorCode::Domain, os.str());
    }
    last_det = det;
    if (record || s + 1 == steps) traj.points.push_back(snapshot((s + 1) * h, y));
  }
  return traj;
}

std::string Trajectory::csv(const std::vector<double>& amplitude) const {
  std::ostringstream os;
  os << std::setprecision(12);
  const int n = static_cast<int>(q0.size());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",q" << (n == 1 ? "" : std::to_string(i + 1));
  for (int i = 0; i < n; ++i) os << ",p" << (n == 1 ? "" : std::to_string(i + 1));
  os << ",detD";
  if (!amplitude.empty()) os << ",a";
  os << "\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pt = points[k];
    os << pt.t;
    for (int i = 0; i < n; ++i) os << "," << pt.q(i);
    for (int i = 0; i < n; ++i) os << "," << pt.p(i);
    os << "," << pt.det;
    if (!amplitude.empty()) os << "," << amplitude[k];
    os << "\n";
  }
  return os.str();
}

std::vector<double> transport_amplitude(const FiniteDimHamiltonian& H, const Trajectory& traj,
                                        const AmplitudeFn& a0) {
  if (!H.has_zero_mixed_trace())
    throw Error(ErrorCode::Domain,
                "the amplitude formula needs sum_i d2H/dp_i dq_i = 0 identically");
  const double start = a0(traj.q0);
  std::vector<double> a;
  for (const auto& pt : traj.points) {
    if (std::abs(pt.det) < kCausticThreshold)
      throw Error(ErrorCode::Domain, "caustic on the trajectory");
    a.push_back(start / std::sqrt(pt.det));
  }
  return a;
}

// ---------------------------------------------------------------- shooting

ShootingWkb::ShootingWkb(const FiniteDimHamiltonian& H, Polynomial S0, AmplitudeFn a0, double dt)
    : H_(&H), S0_(std::move(S0)), a0_(std::move(a0)), dt_(dt), cache_(std::make_shared<Cache>()) {}

ShootingWkb::Hit ShootingWkb::solve(double t, const Eigen::VectorXd& q) const {
  std::lock_guard<std::mutex> lock(cache_->m);
  Last& c = cache_->last;
  std::vector<double> key{t};
  key.insert(key.end(), q.data(), q.data() + q.size());
  if (auto it = cache_->solved.find(key); it != cache_->solved.end()) return it->second;
  // warm start: stencil neighbours sit close to the previous point
  Eigen::VectorXd q0 = q;
  if (c.valid && std::abs(c.t - t) < 0.05 && (c.q - q).cwiseAbs().maxCoeff() < 0.05)
    q0 = c.q0 + c.D.lu().solve(q - c.q);
  const double scale = 1 + q.cwiseAbs().maxCoeff();
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    Trajectory tr = integrate_characteristics(*H_, S0_, q0, t, dt_, false);
    const auto& end = tr.back();
    const Eigen::VectorXd miss = end.q - q;
    const double m = miss.cwiseAbs().maxCoeff();
    // stalled at rounding level counts as converged
    const bool stalled = m <= 1e-11 * scale && m > 0.5 * prev;
    prev = m;
    if (m <= 1e-14 * scale || stalled || it == 59) {
      std::vector<double> x(q0.data(), q0.data() + q0.size());
      if (end.det <= 0) throw Error(ErrorCode::Domain, "characteristic passed a caustic");
      c = {true, t, q, q0, end.D, {S0_(x) + end.S, a0_(q0) / std::sqrt(end.det)}};
      if (cache_->solved.size() >= 1 << 16) cache_->solved.clear();
      cache_->solved.emplace(std::move(key), c.hit);
      return c.hit;
    }
    q0 -= end.D.lu().solve(miss);
  }
  throw Error(ErrorCode::Internal, "shooting did not converge");
}

double ShootingWkb::S(double t, const Eigen::VectorXd& q) const { return solve(t, q).S; }
double ShootingWkb::a(double t, const Eigen::VectorXd& q) const { return solve(t, q).a; }
FieldFn ShootingWkb::S_fn() const {
  return [this](double t, const Eigen::VectorXd& q) { return S(t, q); };
}
FieldFn ShootingWkb::a_fn() const {
  return [this](double t, const Eigen::VectorXd& q) { return a(t, q); };
}

// ---------------------------------------------------------------- residuals

namespace {

// 4th-order central first derivative of g along a scalar offset.
template <class G>
double d1(const G& g, double h) {
  return (8 * (g(h) - g(-h)) - (g(2 * h) - g(-2 * h))) / (12 * h);
}

template <class G>
double d2(const G& g, double h) {
  return (-g(2 * h) + 16 * g(h) - 30 * g(0.0) + 16 * g(-h) - g(-2 * h)) / (12 * h * h);
}

struct Jet {
  double f, ft;
  Eigen::VectorXd fq;
  Eigen::MatrixXd fqq;
};

Jet jet(const FieldFn& f, double t, const Eigen::VectorXd& q, double h) {
  const int n = static_cast<int>(q.size());
  Jet j;
  j.f = f(t, q);
  j.ft = d1([&](double e) { return f(t + e, q); }, h);
  j.fq.resize(n);
  j.fqq.resize(n, n);
  auto shifted = [&](int i, double e) {
    Eigen::VectorXd x = q;
    x(i) += e;
    return x;
  };
  for (int i = 0; i < n; ++i) {
    j.fq(i) = d1([&](double e) { return f(t, shifted(i, e)); }, h);
    j.fqq(i, i) = d2([&](double e) { return f(t, shifted(i, e)); }, h);
    for (int k = 0; k < i; ++k) {
      j.fqq(i, k) = j.fqq(k, i) = d1(
          [&](double e) {
            return d1([&](double g) { return f(t, shifted(k, g) + shifted(i, e) - q); }, h);
          },
          h);
    }
  }
  return j;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k], sy += y[k], sxx += x[k] * x[k], sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TransportReport transport_residual(const FiniteDimHamiltonian& H, const FieldFn& S, const FieldFn& a,
                                   const std::vector<double>& tgrid,
                                   const std::vector<Eigen::VectorXd>& qgrid, double step,
                                   double hj_tolerance) {
  TransportReport r;
  struct Point {
    double t;
    const Eigen::VectorXd* q;
    Jet s;
  };
  std::vector<Point> pts;
  for (double t : tgrid)
    for (const auto& q : qgrid) {
      if (q.size() != H.dof()) throw Error(ErrorCode::Usage, "grid point has the wrong dimension");
      Jet s = jet(S, t, q, step);
      r.hj_residual = std::max(r.hj_residual, std::abs(s.ft + H.H(t, s.fq, q)));
      pts.push_back({t, &q, std::move(s)});
    }
  if (r.hj_residual > hj_tolerance) {
    std::ostringstream os;
    os << "S does not solve the Hamilton-Jacobi equation on the grid (residual " << r.hj_residual
       << ")";
    throw Error(ErrorCode::Domain, os.str());
  }
  for (const auto& pt : pts) {
    const Jet A = jet(a, pt.t, *pt.q, step);
    const Eigen::VectorXd hp = H.Hp(pt.t, pt.s.fq, *pt.q);
    const Eigen::MatrixXd hpp = H.Hpp(pt.t, pt.s.fq, *pt.q);
    const double v = A.ft + A.fq.dot(hp) + 0.5 * A.f * (hpp.cwiseProduct(pt.s.fqq)).sum();
    r.transport_residual = std::max(r.transport_residual, std::abs(v));
  }
  return r;
}

std::string TransportReport::json() const {
  Json j;
  j["hj_residual"] = hj_residual;
  j["transport_residual"] = transport_residual;
  return j.dump(2);
}

WkbReport wkb_residual(const FiniteDimHamiltonian& H, const FieldFn& S, const FieldFn& a,
                       const std::vector<double>& hs, const std::vector<double>& tgrid,
                       const std::vector<double>& qgrid, double step) {
  if (H.dof() != 1) throw Error(ErrorCode::Usage, "wkb_residual handles one degree of freedom");
  if (H.momentum_degree() > 2) throw Error(ErrorCode::Usage, "wkb_residual needs momentum degree <= 2");
  for (double h : hs)
    if (!(h > 0)) throw Error(ErrorCode::Usage, "h must be positive");
  // Split H = sum_k c_k(t, q) p^k.
  const auto& poly = H.polynomial();
  Polynomial coef[3] = {Polynomial(poly.variables()), Polynomial(poly.variables()),
                        Polynomial(poly.variables())};
  for (const auto& [e, c] : poly.terms()) {
    auto base = e;
    base[1] = 0;
    coef[e[1]].add(base, c);
  }
  struct Sample {
    double c[3];
    Jet s, a;
  };
  std::vector<Sample> samples;
  double amax = 0;
  for (double t : tgrid)
    for (double qv : qgrid) {
      Eigen::VectorXd q(1);
      q(0) = qv;
      Sample sm;
      for (int k = 0; k < 3; ++k) sm.c[k] = coef[k]({t, 0.0, qv});
      sm.s = jet(S, t, q, step);
      sm.a = jet(a, t, q, step);
      amax = std::max(amax, std::abs(sm.a.f));
      samples.push_back(std::move(sm));
    }
  WkbReport rep;
  using C = std::complex<double>;
  const C I(0, 1);
  for (double h : hs) {
    double worst = 0;
    for (const auto& sm : samples) {
      const double A = sm.a.f, At = sm.a.ft, Aq = sm.a.fq(0), Aqq = sm.a.fqq(0, 0);
      const double St = sm.s.ft, Sq = sm.s.fq(0), Sqq = sm.s.fqq(0, 0);
      // psi and its derivatives divided by exp(i S / h)
      const C psi_t = At + I * A * St / h;
      const C d0 = A;
      const C d1v = Aq + I * A * Sq / h;
      const C d2v = Aqq + 2.0 * I * Aq * Sq / h + I * A * Sqq / h - A * Sq * Sq / (h * h);
      const C mih = -I * h;
      const C Hpsi = sm.c[0] * d0 + sm.c[1] * mih * d1v + sm.c[2] * mih * mih * d2v;
      worst = std::max(worst, std::abs(I * h * psi_t - Hpsi));
    }
    rep.rows.push_back({h, amax > 0 ? worst / amax : 0.0});
  }
  rep.vanishing = amax == 0;
  if (!rep.vanishing && rep.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : rep.rows) {
      x.push_back(std::log(r.h));
      y.push_back(std::log(std::max(r.residual, 1e-300)));
    }
    rep.exponent = fit_slope(x, y);
  }
  return rep;
}

std::string WkbReport::csv() const {
  std::ostringstream os;
  os << "h,residual\n" << std::setprecision(10);
  for (const auto& r : rows) os << r.h << "," << r.residual << "\n";
  return os.str();
}

std::string WkbReport::json() const {
  Json j;
  Json rs = Json::array();
  for (const auto& r : rows) {
    Json x;
    x["h"] = r.h;
    x["residual"] = r.residual;
    rs.push_back(x);
  }
  j["rows"] = rs;
  j["exponent"] = exponent;
  j["vanishing"] = vanishing;
  return j.dump(2);
}

// ---------------------------------------------------------------- presets

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n == 1) return {lo};
  for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * k / (n - 1));
  return v;
}

std::vector<std::string> quasi_preset_names() { return {"oscillator", "free", "quartic"}; }

QuasiPreset quasi_preset(const std::string& name) {
  QuasiPreset p;
  p.name = name;
  auto one = [](const Eigen::VectorXd&) { return 1.0; };
  if (name == "oscillator") {
    p.hamiltonian = "(p^2 + q^2)/2";
    p.action = "0";
    p.a0 = one;
    p.T = 1;
    p.S_exact = [](double t, const Eigen::VectorXd& q) { return -q(0) * q(0) * std::tan(t) / 2; };
    p.a_exact = [](double t, const Eigen::VectorXd&) { return 1 / std::sqrt(std::cos(t)); };
  } else if (name == "free") {
    p.hamiltonian = "p^2/2";
    p.action = "q^2/2";
    p.a0 = one;
    p.T = 1;
    p.S_exact = [](double t, const Eigen::VectorXd& q) { return q(0) * q(0) / (2 * (1 + t)); };
    p.a_exact = [](double t, const Eigen::VectorXd&) { return 1 / std::sqrt(1 + t); };
  } else if (name == "quartic") {
    p.hamiltonian = "p^2/2 + q^4/4";
    p.action = "q^2/2";
    p.a0 = [](const Eigen::VectorXd& q) { return std::exp(-q(0) * q(0)); };
    p.T = 0.5;
  } else {
    throw Error(ErrorCode::Usage, "unknown preset '" + name + "' (oscillator, free, quartic)");
  }
  return p;
}

}  // namespace hamalg
