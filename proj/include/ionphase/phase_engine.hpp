#pragma once

#include "ionphase/chain_model.hpp"
#include "ionphase/gaussian.hpp"

#include <utility>
#include <vector>

namespace ionphase {

/// Scalar diagnostics of the asymptotic Gaussian state. All entries are
/// dimensionless except omega_odd (units omega_z) and the plus-sector
/// dispersions (quadrature units).
struct AsymptoticParams {
  double r = 0.0;      // odd-mode squeezing
  double r_crit = 0.0; // plus-sector squeezing parameter
  double s_crit = 0.0; // final-entropy parameter
  double s_min = 0.0;  // ground-state entropy parameter
  double e_n0 = 0.0;   // vacuum-chain negativity, max{r_crit - s_min, 0}
  double omega_odd = 0.0;
  double dx_plus = 0.0;
  double dp_plus = 0.0;
};

enum class Phase { Persistent, DeathRevival, Separable };

struct PhaseLabel {
  Phase phase = Phase::Separable;
  double sup_en = 0.0; // max negativity over one odd-mode period
  double inf_en = 0.0; // min over one period
};

struct SweepRow {
  double ratio = 0.0;
  double e_n0 = 0.0;
  double r_crit = 0.0;
  double s_min = 0.0;
  bool stable = false;
};

/// Asymptotic plus-sector dispersions (Delta x_+, Delta p_+):
/// Delta^2 x_+ = (c_e1^2/w_e1 + c_e2^2/w_e2)/2,
/// Delta^2 p_+ = (w_e1 c_e1^2 + w_e2 c_e2^2)/2.
std::pair<double, double> asymptotic_even_variances(const ModeDecomposition& modes);

/// r_crit, S_min, S_crit, E_N^0 for a chain with odd-mode occupation
/// n_minus and squeezing r.
AsymptoticParams critical_params(const ModeDecomposition& modes, double n_minus, double r);

/// Squeezing induced by an abrupt trap relaxation omega_x' -> omega_x'/f.
double squeeze_by_quench(double expansion_factor);

/// Asymptotic state in the collective basis: plus sector at its cooled
/// equilibrium, minus sector a squeezed thermal state with the squeezing
/// ellipse rotated by theta (theta = 0: squeezing along position).
CovarianceState build_asymptotic_state(const ModeDecomposition& modes, double n_minus,
                                       double r, double theta = 0.0);

/// Free evolution of the minus sector for time dt (units 1/omega_z):
/// phase-space rotation by omega_odd*dt in the frequency-scaled
/// quadratures. The plus sector is pinned by the cooling.
CovarianceState evolve(const CovarianceState& state, double omega_odd, double dt);

/// Closed-form negativity at the extremal times of the odd-mode rotation:
/// E_N = max{0, -ln(2 dp_m dx_p), -ln(2 dx_m dp_p)}.
double negativity_extremal(double dx_plus, double dp_plus, double dx_minus, double dp_minus);

/// E_N(t) samples via build/evolve/log_negativity.
std::vector<std::pair<double, double>> negativity_trace(const ModeDecomposition& modes,
                                                        double n_minus, double r,
                                                        const std::vector<double>& times);

/// Labels the asymptotic phase from the closed-form extremal negativities.
PhaseLabel classify_phase(const ModeDecomposition& modes, double n_minus, double r);

/// Classification over an (n_minus, r) grid, row-major with r fastest.
/// phase_diagram() runs the cells in parallel; phase_diagram_serial() is
/// the reference implementation, kept for testing and benchmarking.
std::vector<PhaseLabel> phase_diagram(const ModeDecomposition& modes,
                                      const std::vector<double>& n_grid,
                                      const std::vector<double>& r_grid);
std::vector<PhaseLabel> phase_diagram_serial(const ModeDecomposition& modes,
                                             const std::vector<double>& n_grid,
                                             const std::vector<double>& r_grid);

/// (ratio, E_N0, r_crit, S_min) rows over a frequency-ratio grid;
/// unstable ratios are flagged rather than skipped.
std::vector<SweepRow> params_sweep(const IonChainSpec& spec_template,
                                   const std::vector<double>& ratios);

/// Covariance blocks of the two even modes in their dimensionful mode
/// quadratures (vacuum of mode n is diag(1/(2 w_n), w_n/2)).
struct EvenModeBlocks {
  Eigen::Matrix2d e1;
  Eigen::Matrix2d e2;
};

struct UnphysicalIntermediateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thermal even sector at occupation nbar per mode.
EvenModeBlocks thermal_even_blocks(const ModeDecomposition& modes, double nbar);

/// Occupation of a single-mode block with frequency omega.
double mode_occupation(const Eigen::Matrix2d& block, double omega);

/// Simplified cooling model: each even mode rotates at its own frequency
/// while its covariance relaxes exponentially (rate kappa) toward the
/// mode vacuum. Not a master equation; the fixed point reproduces
/// asymptotic_even_variances.
EvenModeBlocks cooling_relaxation(const ModeDecomposition& modes, const EvenModeBlocks& initial,
                                  double kappa, double t);

/// Plus-sector covariance block assembled from the even-mode blocks.
Eigen::Matrix2d plus_sector_block(const ModeDecomposition& modes, const EvenModeBlocks& blocks);

} // namespace ionphase
