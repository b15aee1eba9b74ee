#include "ionphase/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace ionphase {

namespace {

constexpr double kPhysTol = 1e-9;

// (x_+, p_+, x_-, p_-) = S (x_A, p_A, x_B, p_B); S is orthogonal,
// symplectic, and its own inverse, so the same matrix converts both ways.
Eigen::Matrix4d basis_rotation() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
  r(0, 0) = r(0, 2) = s;
  r(1, 1) = r(1, 3) = s;
  r(2, 0) = s; r(2, 2) = -s;
  r(3, 1) = s; r(3, 3) = -s;
  return r;
}

std::array<double, 2> symplectic_spectrum(const Eigen::Matrix4d& cov) {
  if (!cov.allFinite())
    throw std::invalid_argument("covariance matrix has non-finite entries");
  const Eigen::Matrix4d m = symplectic_form() * cov;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(m, /*computeEigenvectors=*/false);
  std::array<double, 4> mod;
  for (int i = 0; i < 4; ++i) mod[i] = std::abs(solver.eigenvalues()(i));
  std::sort(mod.begin(), mod.end());
  // eigenvalues come in +-i nu pairs
  return {mod[0], mod[2]};
}

} // namespace

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1.0; omega(1, 0) = -1.0;
  omega(2, 3) = 1.0; omega(3, 2) = -1.0;
  return omega;
}

CovarianceState to_collective(const CovarianceState& state) {
  if (state.basis == Basis::CollectivePM) return state;
  static const Eigen::Matrix4d r = basis_rotation();
  return {r * state.matrix * r.transpose(), Basis::CollectivePM, state.time_tag};
}

CovarianceState to_local(const CovarianceState& state) {
  if (state.basis == Basis::LocalAB) return state;
  static const Eigen::Matrix4d r = basis_rotation();
  return {r * state.matrix * r.transpose(), Basis::LocalAB, state.time_tag};
}

std::array<double, 2> symplectic_eigenvalues(const CovarianceState& state) {
  return symplectic_spectrum(state.matrix);
}

double check_physicality(const CovarianceState& state) {
  return symplectic_eigenvalues(state)[0] - 0.5;
}

double log_negativity(const CovarianceState& state) {
  const CovarianceState local = to_local(state);
  if (check_physicality(local) < -kPhysTol)
    throw UnphysicalStateError("covariance matrix violates the uncertainty bound");

  // Partial transpose on mode B: p_B -> -p_B.
  Eigen::Matrix4d pt = local.matrix;
  pt.row(3) *= -1.0;
  pt.col(3) *= -1.0;

  const double nu_min = symplectic_spectrum(pt)[0];
  return std::max(0.0, -std::log(2.0 * nu_min));
}

} // namespace ionphase
