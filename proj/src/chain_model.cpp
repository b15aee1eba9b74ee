#include "ionphase/chain_model.hpp"

#include <algorithm>
#include <cmath>

namespace ionphase {

namespace {

// Coulomb curvature prefactor e^2/(2 pi eps0 d_eq^3) in units m omega_z^2.
// Follows from d_eq^3 = 5 e^2 / (16 pi m omega_z^2 eps0).
constexpr double kCoulombPrefactor = 8.0 / 5.0;

} // namespace

std::array<int, 2> ModeDecomposition::even_indices() const {
  std::array<int, 2> out{-1, -1};
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (parities[i] == Parity::Even) out[k++] = i;
  return out;
}

int ModeDecomposition::odd_index() const {
  for (int i = 0; i < 3; ++i)
    if (parities[i] == Parity::Odd) return i;
  return -1; // unreachable for a valid decomposition
}

std::array<double, 3> equilibrium_positions(const IonChainSpec& spec) {
  spec.validate();
  return {-1.0, 0.0, 1.0};
}

Eigen::Matrix3d transverse_coupling_matrix(const IonChainSpec& spec) {
  spec.validate();
  const double rho2 = spec.freq_ratio * spec.freq_ratio;
  const double mu = 1.0 / spec.mass_ratio_center(); // m / m_c

  // Coulomb terms at distances 1 and 2 (units d_eq).
  const double k_nn = kCoulombPrefactor;        // 8/5
  const double k_far = kCoulombPrefactor / 8.0; // 1/5

  Eigen::Matrix3d g;
  g(0, 0) = rho2 - (k_nn + k_far);      // omega_x^2 - 9/5
  g(2, 2) = g(0, 0);
  g(1, 1) = mu * rho2 - 2.0 * k_nn;     // (m/m_c) omega_x^2 - 16/5
  g(0, 1) = g(1, 0) = g(1, 2) = g(2, 1) = k_nn;
  g(0, 2) = g(2, 0) = k_far;
  return g;
}

Eigen::Matrix3d axial_coupling_matrix(const IonChainSpec& spec) {
  spec.validate();
  // Axial Coulomb curvature is -2x the transverse one; the sign flips
  // into restoring pairwise couplings k_nn = 8/5, k_far = 1/5.
  const double k_nn = kCoulombPrefactor;
  const double k_far = kCoulombPrefactor / 8.0;

  Eigen::Matrix3d a;
  a(0, 0) = 1.0 + k_nn + k_far; // trap curvature m omega_z^2 is mass-independent
  a(2, 2) = a(0, 0);
  a(1, 1) = 1.0 + 2.0 * k_nn;
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = -k_nn;
  a(0, 2) = a(2, 0) = -k_far;
  return a;
}

Eigen::Matrix3d dynamical_matrix(const IonChainSpec& spec) {
  const Eigen::Matrix3d g = spec.direction == Direction::Transverse
                                ? transverse_coupling_matrix(spec)
                                : axial_coupling_matrix(spec);
  const Eigen::Vector3d masses(1.0, spec.mass_ratio_center(), 1.0);
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k(i, j) = g(i, j) / std::sqrt(masses(i) * masses(j));
  return k;
}

ModeDecomposition normal_modes(const IonChainSpec& spec) {
  const Eigen::Matrix3d k = dynamical_matrix(spec);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // The mirror symmetry (k11 = k33, k12 = k23) block-diagonalizes K
  // exactly: the odd mode is (1, 0, -1)/sqrt(2), the even sector reduces
  // to a 2x2 problem in ((q1 + q3)/sqrt(2), q2).
  const double lambda_odd = k(0, 0) - k(0, 2);
  Eigen::Matrix2d even;
  even(0, 0) = k(0, 0) + k(0, 2);
  even(0, 1) = even(1, 0) = std::sqrt(2.0) * k(0, 1);
  even(1, 1) = k(1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(even);
  Eigen::Vector2d lambda_even = solver.eigenvalues(); // ascending
  Eigen::Matrix2d u = solver.eigenvectors();
  for (int n = 0; n < 2; ++n)
    if (u(0, n) < 0.0 || (u(0, n) == 0.0 && u(1, n) < 0.0)) u.col(n) *= -1.0;

  struct Mode {
    double lambda;
    Parity parity;
    Eigen::Vector3d vec;
  };
  std::array<Mode, 3> sorted{
      Mode{lambda_even(0), Parity::Even,
           {u(0, 0) * inv_sqrt2, u(1, 0), u(0, 0) * inv_sqrt2}},
      Mode{lambda_even(1), Parity::Even,
           {u(0, 1) * inv_sqrt2, u(1, 1), u(0, 1) * inv_sqrt2}},
      Mode{lambda_odd, Parity::Odd, {inv_sqrt2, 0.0, -inv_sqrt2}}};
  std::stable_sort(sorted.begin(), sorted.end(), [](const Mode& a, const Mode& b) {
    return a.lambda < b.lambda; // stable: even listed first on exact ties
  });

  if (sorted[0].lambda <= 0.0)
    throw UnstableChainError("linear chain unstable: lowest mode softened (zig-zag transition)");

  ModeDecomposition modes;
  for (int n = 0; n < 3; ++n) {
    modes.frequencies(n) = std::sqrt(sorted[static_cast<std::size_t>(n)].lambda);
    modes.parities[n] = sorted[static_cast<std::size_t>(n)].parity;
    modes.eigenvectors.col(n) = sorted[static_cast<std::size_t>(n)].vec;
  }
  modes.omega_odd = modes.frequencies(modes.odd_index());

  // x_+ = sum over even modes of c_en Q_n, c_en = sqrt(2) v1^(n)
  // (outer mass is 1 so mass-weighted and bare outer coordinates agree).
  const auto e = modes.even_indices();
  modes.coupling_coeffs = {std::sqrt(2.0) * modes.eigenvectors(0, e[0]),
                           std::sqrt(2.0) * modes.eigenvectors(0, e[1])};
  return modes;
}

double stability_margin(const IonChainSpec& spec) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(dynamical_matrix(spec));
  return solver.eigenvalues()(0);
}

double critical_freq_ratio(const IonChainSpec& spec, double lo, double hi, double tol) {
  IonChainSpec s = spec;
  auto margin = [&s](double ratio) {
    s.freq_ratio = ratio;
    return stability_margin(s);
  };
  if (margin(lo) >= 0.0) return lo; // already stable at the bottom of the bracket
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace ionphase
