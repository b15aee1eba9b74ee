#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

namespace ionphase {

enum class Basis { LocalAB, CollectivePM };

struct UnphysicalStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Zero-mean two-mode Gaussian state as a 4x4 covariance matrix.
/// Quadrature ordering is (x_A, p_A, x_B, p_B) in the local basis and
/// (x_+, p_+, x_-, p_-) in the collective one. hbar = 1 throughout;
/// positions are stored in units sqrt(1/(m omega_z)), momenta in
/// sqrt(m omega_z), so the vacuum of an omega_z oscillator is I/2.
struct CovarianceState {
  Eigen::Matrix4d matrix = 0.5 * Eigen::Matrix4d::Identity();
  Basis basis = Basis::LocalAB;
  double time_tag = 0.0; // units 1/omega_z
};

/// Standard symplectic form for the (x, p, x, p) ordering.
Eigen::Matrix4d symplectic_form();

CovarianceState to_collective(const CovarianceState& state);
CovarianceState to_local(const CovarianceState& state);

/// Moduli of the eigenvalue pairs of i Omega C, sorted ascending.
/// Physical states have both >= 1/2.
std::array<double, 2> symplectic_eigenvalues(const CovarianceState& state);

/// Smallest symplectic eigenvalue minus 1/2; negative means unphysical.
double check_physicality(const CovarianceState& state);

/// Logarithmic negativity between the two local modes:
/// E_N = max{0, -ln(2 nu_-)} with nu_- the smallest symplectic
/// eigenvalue of the partially transposed covariance (p_B sign flip).
/// Accepts either basis; throws UnphysicalStateError if the state
/// violates the uncertainty bound by more than 1e-9.
double log_negativity(const CovarianceState& state);

} // namespace ionphase
