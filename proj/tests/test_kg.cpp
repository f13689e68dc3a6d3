#include <doctest.h>

#include "hamalg/core/kg.hpp"

using namespace hamalg;

TEST_CASE("kg flow basics") {
  LatticeConfig cfg{64, 8.0, 2};
  SUBCASE("identity at t = 0") {
    auto f = kg_flow(cfg, 1.0, 0.0);
    CHECK((f.M - Eigen::MatrixXd::Identity(128, 128)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.defect == 0.0);
  }
  SUBCASE("symplectic") { CHECK(kg_flow(cfg, 1.0, 1.7).defect < 1e-10); }
  SUBCASE("zero mode period") { CHECK(kg_flow(cfg, 1.0, 2 * M_PI).zero_mode_defect < 1e-10); }
  SUBCASE("massless zero mode is a free drift") {
    auto f = kg_flow(cfg, 0.0, 3.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(128);
    x.tail(64).setOnes();
    Eigen::VectorXd y = f.M * x;
    CHECK(y(5) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(y(64 + 5) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fourier basis is orthonormal") {
  auto Q = fourier_basis(32);
  CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("propagator matches the equations of motion") {
  // d/dt M at t: phi' = pi, pi' = D2 phi - m^2 phi
  LatticeConfig cfg{32, 8.0, 4};
  const double m = 2.5, t = 0.9, e = 1e-5;
  const Eigen::MatrixXd dM = (kg_flow(cfg, m, t + e).M - kg_flow(cfg, m, t - e).M) / (2 * e);
  const Eigen::MatrixXd M = kg_flow(cfg, m, t).M;
  Eigen::MatrixXd A(32, 32);
  for (int j = 0; j < 32; ++j) {
    std::vector<double> u(32, 0.0);
    u[j] = 1;
    auto d = lattice_derivative(cfg, u, 2);
    for (int i = 0; i < 32; ++i) A(i, j) = -d[i] + (i == j ? m * m : 0.0);
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(64, 64);
  G.topRightCorner(32, 32).setIdentity();
  G.bottomLeftCorner(32, 32) = -A;
  CHECK((dM - G * M).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("group property and energy") {
  for (double m : {0.0, 1.0, 2.5}) {
    LatticeConfig cfg{128, 8.0, 2};
    auto a = kg_flow(cfg, m, 2.5), b = kg_flow(cfg, m, 4.0), ab = kg_flow(cfg, m, 6.5);
    CHECK((ab.M - a.M * b.M).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(kg_energy_drift(cfg, m, ab) < 1e-9);
  }
}
