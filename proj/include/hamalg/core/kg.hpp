#pragma once

#include "hamalg/core/lattice.hpp"

#include <Eigen/Dense>

#include <string>

namespace hamalg {

/// Linear flow of the lattice Klein-Gordon system
///   H = dx * sum_i [ pi_i^2/2 + phi_i (-D2 phi)_i / 2 + m^2 phi_i^2 / 2 ]
/// with {phi_i, pi_j} = delta_ij / dx. State vector is (phi, pi).
struct KgFlow {
  Eigen::MatrixXd M;
  double defect = 0;            // max |M^T J M - J|, J = (1/dx) [[0, I], [-I, 0]]
  double zero_mode_defect = 0;  // max |B0 - B0(identity)|, B0 the k = 0 block in the Fourier basis
  std::string json() const;
};

/// Eigenvalues of -D2 on the periodic grid, mode k = 0..N-1.
double laplacian_eigenvalue(const LatticeConfig& cfg, int k);

/// Orthonormal real Fourier basis: column 0 constant, then cos/sin pairs,
/// last column the alternating mode.
Eigen::MatrixXd fourier_basis(int N);

KgFlow kg_flow(const LatticeConfig& cfg, double m, double t);

Eigen::MatrixXd symplectic_form(const LatticeConfig& cfg);
double kg_energy(const LatticeConfig& cfg, double m, const Eigen::VectorXd& x);

/// Relative energy change of a fixed Gaussian state over the flow.
double kg_energy_drift(const LatticeConfig& cfg, double m, const KgFlow& flow);

}  // namespace hamalg
