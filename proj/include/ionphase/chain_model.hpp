#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

namespace ionphase {

enum class Direction { Transverse, Axial };
enum class Parity { Even, Odd };

/// Thrown by normal_modes() when the linear chain is unstable
/// (the zig-zag transition has been crossed).
struct UnstableChainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Three-ion chain: two equal outer ions, one central ion of a
/// different species. Internal units: hbar = 1, outer-ion mass = 1,
/// omega_z = 1, lengths in units of the equilibrium spacing d_eq.
struct IonChainSpec {
  double mass_outer = 23.985;  // u, default 24Mg
  double mass_center = 9.0122; // u, default 9Be
  double freq_ratio = 1.7;     // omega_x / omega_z
  Direction direction = Direction::Transverse;

  void validate() const {
    if (!(mass_outer > 0.0) || !(mass_center > 0.0) || !(freq_ratio > 0.0))
      throw std::invalid_argument("IonChainSpec: masses and freq_ratio must be positive");
  }

  /// Central mass in units of the outer mass.
  double mass_ratio_center() const { return mass_center / mass_outer; }
};

/// Normal modes of the linearized chain, in the mass-weighted
/// coordinates q_i = sqrt(m_i) x_i.
struct ModeDecomposition {
  Eigen::Vector3d frequencies;        // omega_n in units of omega_z, sorted ascending
  Eigen::Matrix3d eigenvectors;       // columns, orthonormal, mass-weighted
  std::array<Parity, 3> parities;
  std::array<double, 2> coupling_coeffs; // (c_e1, c_e2): x_+ amplitudes of the even modes
  double omega_odd = 0.0;

  /// Indices of the two even modes, in frequency order.
  std::array<int, 2> even_indices() const;
  int odd_index() const;
};

/// Equilibrium positions (-1, 0, 1) in units of d_eq. In these units the
/// nearest-neighbor Coulomb curvature scale e^2/(2 pi eps0 d^3) is exactly
/// 8/5 m omega_z^2, so no physical constants appear downstream.
std::array<double, 3> equilibrium_positions(const IonChainSpec& spec);

/// Coupling matrix gamma for the transverse motion, units m omega_z^2.
Eigen::Matrix3d transverse_coupling_matrix(const IonChainSpec& spec);

/// Stiffness matrix for the axial motion, units m omega_z^2.
/// Pairwise spring constants: 8/5 nearest neighbors, 1/5 outer pair.
Eigen::Matrix3d axial_coupling_matrix(const IonChainSpec& spec);

/// Mass-weighted dynamical matrix K_ij = gamma_ij / sqrt(m_i m_j),
/// eigenvalues are omega_n^2 in units omega_z^2.
Eigen::Matrix3d dynamical_matrix(const IonChainSpec& spec);

/// Diagonalizes the chain and labels mode parity. Throws
/// UnstableChainError when an eigenvalue is negative.
ModeDecomposition normal_modes(const IonChainSpec& spec);

/// Smallest eigenvalue of the dynamical matrix (units omega_z^2);
/// positive iff the linear configuration is stable.
double stability_margin(const IonChainSpec& spec);

/// Critical omega_x/omega_z below which the transverse linear chain
/// goes unstable, found by bisection on stability_margin.
double critical_freq_ratio(const IonChainSpec& spec, double lo = 1.0, double hi = 5.0,
                           double tol = 1e-10);

} // namespace ionphase
