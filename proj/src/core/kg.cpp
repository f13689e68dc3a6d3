#include "hamalg/core/kg.hpp"

#include "hamalg/core/json.hpp"

#include <cmath>

namespace hamalg {

double laplacian_eigenvalue(const LatticeConfig& cfg, int k) {
  const double h = cfg.dx();
  const double th = 2.0 * M_PI * k / cfg.N;
  if (cfg.stencil == 2) {
    const double s = std::sin(th / 2);
    return 4.0 * s * s / (h * h);
  }
  return (30.0 - 32.0 * std::cos(th) + 2.0 * std::cos(2 * th)) / (12.0 * h * h);
}

Eigen::MatrixXd fourier_basis(int N) {
  Eigen::MatrixXd Q(N, N);
  const double a = 1.0 / std::sqrt(static_cast<double>(N)), b = std::sqrt(2.0 / N);
  for (int i = 0; i < N; ++i) {
    Q(i, 0) = a;
    for (int k = 1; k < N / 2; ++k) {
      const double th = 2.0 * M_PI * k * i / N;
      Q(i, 2 * k - 1) = b * std::cos(th);
      Q(i, 2 * k) = b * std::sin(th);
    }
    Q(i, N - 1) = (i % 2 ? -a : a);
  }
  return Q;
}

namespace {

int column_mode(int col, int N) { return col == 0 ? 0 : col == N - 1 ? N / 2 : (col + 1) / 2; }

// 2x2 rotation of one mode: [[c, s/w], [-w s, c]], with the w -> 0 limit.
Eigen::Matrix2d mode_block(double w, double t) {
  Eigen::Matrix2d B;
  const double c = std::cos(w * t);
  B(0, 0) = c;
  B(1, 1) = c;
  B(0, 1) = w == 0 ? t : std::sin(w * t) / w;
  B(1, 0) = -w * std::sin(w * t);
  return B;
}

}  // namespace

Eigen::MatrixXd symplectic_form(const LatticeConfig& cfg) {
  const int N = cfg.N;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  J.topRightCorner(N, N) = Eigen::MatrixXd::Identity(N, N) / cfg.dx();
  J.bottomLeftCorner(N, N) = -Eigen::MatrixXd::Identity(N, N) / cfg.dx();
  return J;
}

KgFlow kg_flow(const LatticeConfig& cfg, double m, double t) {
  cfg.validate();
  if (!(m >= 0) || !std::isfinite(m)) throw Error(ErrorCode::Usage, "mass must be non-negative");
  if (!std::isfinite(t)) throw Error(ErrorCode::Usage, "time must be finite");
  const int N = cfg.N;
  KgFlow r;
  if (t == 0) {
    r.M = Eigen::MatrixXd::Identity(2 * N, 2 * N);
    return r;
  }
  const Eigen::MatrixXd Q = fourier_basis(N);
  Eigen::VectorXd c(N), s(N), ws(N);
  Eigen::Matrix2d zero;
  for (int col = 0; col < N; ++col) {
    const double w = std::sqrt(m * m + laplacian_eigenvalue(cfg, column_mode(col, N)));
    const auto B = mode_block(w, t);
    c(col) = B(0, 0);
    s(col) = B(0, 1);
    ws(col) = B(1, 0);
    if (col == 0) zero = B;
  }
  r.M.resize(2 * N, 2 * N);
  r.M.topLeftCorner(N, N) = Q * c.asDiagonal() * Q.transpose();
  r.M.topRightCorner(N, N) = Q * s.asDiagonal() * Q.transpose();
  r.M.bottomLeftCorner(N, N) = Q * ws.asDiagonal() * Q.transpose();
  r.M.bottomRightCorner(N, N) = r.M.topLeftCorner(N, N);
  const Eigen::MatrixXd J = symplectic_form(cfg);
  r.defect = (r.M.transpose() * J * r.M - J).cwiseAbs().maxCoeff();
  r.zero_mode_defect = (zero - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
  return r;
}

double kg_energy(const LatticeConfig& cfg, double m, const Eigen::VectorXd& x) {
  const int N = cfg.N;
  std::vector<double> phi(x.data(), x.data() + N);
  const auto lap = lattice_derivative(cfg, phi, 2);
  double e = 0;
  for (int i = 0; i < N; ++i)
    e += 0.5 * x(N + i) * x(N + i) - 0.5 * phi[i] * lap[i] + 0.5 * m * m * phi[i] * phi[i];
  return cfg.dx() * e;
}

double kg_energy_drift(const LatticeConfig& cfg, double m, const KgFlow& flow) {
  const int N = cfg.N;
  Eigen::VectorXd x(2 * N);
  const GaussianProfile a{{1.0}, 1.0, -0.5}, b{{0.0, 1.0}, 0.8, 0.7};
  for (int i = 0; i < N; ++i) {
    x(i) = a.derivative(0, cfg.x(i));
    x(N + i) = b.derivative(0, cfg.x(i));
  }
  const double e0 = kg_energy(cfg, m, x);
  return std::abs(kg_energy(cfg, m, flow.M * x) - e0) / std::abs(e0);
}

std::string KgFlow::json() const {
  Json j;
  j["dimension"] = M.rows();
  j["symplectic_defect"] = defect;
  j["zero_mode_defect"] = zero_mode_defect;
  return j.dump(2);
}

}  // namespace hamalg
