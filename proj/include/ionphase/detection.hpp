#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ionphase {

enum class KickAxis { Momentum, Position };
enum class OffDiagonalSign { Unknown };

struct InconsistentDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ground-state-fidelity scan of one normal mode: kick the mode by
/// delta P (or delta X), measure the overlap with the vacuum.
struct FidelityScan {
  int mode_id = 0;
  KickAxis axis = KickAxis::Momentum;
  std::vector<double> kick_values;
  std::vector<double> fidelities;
  std::optional<std::int64_t> shots; // binomial trials per point, empty = noiseless
  std::uint64_t seed = 0;            // recorded when shots is set
  double mean_phonon = 0.0;
};

/// Single-mode covariance recovered from a pair of scans. The sign of
/// the off-diagonal element is not observable in this protocol.
struct Reconstruction {
  Eigen::Matrix2d covariance;
  OffDiagonalSign offdiag_sign = OffDiagonalSign::Unknown;
  Eigen::Matrix2d std_errors; // entrywise 1-sigma estimates (0 for noiseless)
};

/// Tr(C) = 2 <a^dag a> + 1.
double mean_phonon(const Eigen::Matrix2d& cov);

/// Vacuum overlap after a quadrature kick:
/// F(dP) = sqrt(det M) exp(-dP^2 M_22 / 2), M = (I/2 + C)^-1.
/// A position-axis kick uses M_11 in the exponent.
double ground_fidelity(const Eigen::Matrix2d& cov, double kick,
                       KickAxis axis = KickAxis::Momentum);

/// Forward model of the measurement. With shots set, each fidelity is
/// replaced by a binomial sample mean; the seed makes scans reproducible.
FidelityScan simulate_scan(const Eigen::Matrix2d& cov, const std::vector<double>& kick_values,
                           KickAxis axis, std::optional<std::int64_t> shots = std::nullopt,
                           std::uint64_t seed = 0, int mode_id = 0);

/// Default kick grid {0, 0.25, ..., 2.5}.
std::vector<double> default_kick_grid();

/// Least-squares inversion of a momentum-axis plus a position-axis scan:
/// ln F is affine in dP^2, with slopes -M_22/2 and -M_11/2 and common
/// intercept ln(det M)/2. Throws InconsistentDataError when the fitted
/// det M and the scans' mean phonon number disagree beyond tolerance.
Reconstruction reconstruct(const FidelityScan& momentum_scan, const FidelityScan& position_scan,
                           double consistency_tol = 0.25);

} // namespace ionphase
