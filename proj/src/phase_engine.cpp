#include "ionphase/phase_engine.hpp"

#include <cmath>
#include <limits>

namespace ionphase {

namespace {

constexpr double kPhaseTol = 1e-9;

// Rotation by angle in the frequency-scaled quadratures (X, P) =
// (sqrt(w) x, p/sqrt(w)), mapped back to the stored units. Symplectic.
Eigen::Matrix2d scaled_rotation(double omega, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d m;
  m(0, 0) = c;            m(0, 1) = s / omega;
  m(1, 0) = -s * omega;   m(1, 1) = c;
  return m;
}

// Squeezed thermal single-mode block for frequency omega, squeezing r,
// ellipse angle theta, occupation n: sigma^2 * rot * diag(e^-2r, e^2r) * rot^T
// in scaled quadratures, then unscaled.
Eigen::Matrix2d squeezed_thermal_block(double omega, double n, double r, double theta) {
  const double sigma2 = 0.5 * (2.0 * n + 1.0);
  const double c = std::cos(theta), s = std::sin(theta);
  const double a = std::exp(-2.0 * r), b = std::exp(2.0 * r);
  Eigen::Matrix2d scaled;
  scaled(0, 0) = c * c * a + s * s * b;
  scaled(1, 1) = s * s * a + c * c * b;
  scaled(0, 1) = scaled(1, 0) = c * s * (a - b);
  scaled *= sigma2;
  Eigen::Matrix2d out;
  out(0, 0) = scaled(0, 0) / omega;
  out(1, 1) = scaled(1, 1) * omega;
  out(0, 1) = out(1, 0) = scaled(0, 1);
  return out;
}

Eigen::Matrix2d mode_vacuum(double omega) {
  Eigen::Matrix2d v = Eigen::Matrix2d::Zero();
  v(0, 0) = 0.5 / omega;
  v(1, 1) = 0.5 * omega;
  return v;
}

PhaseLabel classify_from_dispersions(double dx_p, double dp_p, double omega_odd,
                                     double n_minus, double r) {
  const double sigma = std::sqrt(0.5 * (2.0 * n_minus + 1.0));
  const double sw = std::sqrt(omega_odd);
  // Extremal dispersions of the rotating squeezed thermal odd mode:
  // at t = 0 the squeezing is along position, a quarter period later
  // the roles of e^{-r} and e^{+r} swap.
  const double e0 = negativity_extremal(dx_p, dp_p, sigma * std::exp(-r) / sw,
                                        sigma * std::exp(r) * sw);
  const double e1 = negativity_extremal(dx_p, dp_p, sigma * std::exp(r) / sw,
                                        sigma * std::exp(-r) * sw);
  PhaseLabel label;
  label.sup_en = std::max(e0, e1);
  label.inf_en = std::min(e0, e1);
  if (label.inf_en > kPhaseTol)
    label.phase = Phase::Persistent;
  else if (label.sup_en > kPhaseTol)
    label.phase = Phase::DeathRevival;
  else
    label.phase = Phase::Separable;
  return label;
}

} // namespace

std::pair<double, double> asymptotic_even_variances(const ModeDecomposition& modes) {
  const auto e = modes.even_indices();
  const double c1 = modes.coupling_coeffs[0], c2 = modes.coupling_coeffs[1];
  const double w1 = modes.frequencies(e[0]), w2 = modes.frequencies(e[1]);
  const double dx2 = 0.5 * (c1 * c1 / w1 + c2 * c2 / w2);
  const double dp2 = 0.5 * (w1 * c1 * c1 + w2 * c2 * c2);
  return {std::sqrt(dx2), std::sqrt(dp2)};
}

AsymptoticParams critical_params(const ModeDecomposition& modes, double n_minus, double r) {
  if (n_minus < 0.0) throw std::invalid_argument("critical_params: n_minus must be >= 0");
  const auto [dx_p, dp_p] = asymptotic_even_variances(modes);

  AsymptoticParams p;
  p.r = std::abs(r);
  p.omega_odd = modes.omega_odd;
  p.dx_plus = dx_p;
  p.dp_plus = dp_p;
  p.r_crit = 0.5 * std::abs(std::log(modes.omega_odd * dx_p / dp_p));
  p.s_min = 0.5 * std::log(2.0 * dx_p * dp_p);
  // Delta x_- Delta p_- = (2 n_- + 1)/2: odd-mode squeezing preserves the product.
  p.s_crit = p.s_min + 0.5 * std::log(2.0 * n_minus + 1.0);
  p.e_n0 = std::max(p.r_crit - p.s_min, 0.0);
  return p;
}

double squeeze_by_quench(double expansion_factor) {
  if (!(expansion_factor > 0.0))
    throw std::invalid_argument("squeeze_by_quench: expansion factor must be positive");
  return 0.5 * std::log(expansion_factor);
}

CovarianceState build_asymptotic_state(const ModeDecomposition& modes, double n_minus,
                                       double r, double theta) {
  if (n_minus < 0.0) throw std::invalid_argument("build_asymptotic_state: n_minus must be >= 0");
  const auto [dx_p, dp_p] = asymptotic_even_variances(modes);

  CovarianceState state;
  state.basis = Basis::CollectivePM;
  state.matrix = Eigen::Matrix4d::Zero();
  state.matrix(0, 0) = dx_p * dx_p;
  state.matrix(1, 1) = dp_p * dp_p;
  state.matrix.block<2, 2>(2, 2) = squeezed_thermal_block(modes.omega_odd, n_minus, r, theta);
  return state;
}

CovarianceState evolve(const CovarianceState& state, double omega_odd, double dt) {
  if (state.basis != Basis::CollectivePM)
    throw std::invalid_argument("evolve: expected a CollectivePM state");
  const Eigen::Matrix2d rot = scaled_rotation(omega_odd, omega_odd * dt);
  CovarianceState out = state;
  out.matrix.block<2, 2>(2, 2) =
      rot * state.matrix.block<2, 2>(2, 2) * rot.transpose();
  out.time_tag = state.time_tag + dt;
  return out;
}

double negativity_extremal(double dx_plus, double dp_plus, double dx_minus, double dp_minus) {
  if (!(dx_plus > 0.0 && dp_plus > 0.0 && dx_minus > 0.0 && dp_minus > 0.0))
    throw std::invalid_argument("negativity_extremal: dispersions must be positive");
  const double a = -std::log(2.0 * dp_minus * dx_plus);
  const double b = -std::log(2.0 * dx_minus * dp_plus);
  return std::max({0.0, a, b});
}

std::vector<std::pair<double, double>> negativity_trace(const ModeDecomposition& modes,
                                                        double n_minus, double r,
                                                        const std::vector<double>& times) {
  const CovarianceState initial = build_asymptotic_state(modes, n_minus, r);
  std::vector<std::pair<double, double>> trace;
  trace.reserve(times.size());
  for (double t : times)
    trace.emplace_back(t, log_negativity(evolve(initial, modes.omega_odd, t)));
  return trace;
}

PhaseLabel classify_phase(const ModeDecomposition& modes, double n_minus, double r) {
  if (n_minus < 0.0 || r < 0.0)
    throw std::invalid_argument("classify_phase: n_minus and r must be >= 0");
  const auto [dx_p, dp_p] = asymptotic_even_variances(modes);
  return classify_from_dispersions(dx_p, dp_p, modes.omega_odd, n_minus, r);
}

std::vector<PhaseLabel> phase_diagram_serial(const ModeDecomposition& modes,
                                             const std::vector<double>& n_grid,
                                             const std::vector<double>& r_grid) {
  const auto [dx_p, dp_p] = asymptotic_even_variances(modes);
  std::vector<PhaseLabel> out(n_grid.size() * r_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    for (std::size_t j = 0; j < r_grid.size(); ++j)
      out[i * r_grid.size() + j] =
          classify_from_dispersions(dx_p, dp_p, modes.omega_odd, n_grid[i], r_grid[j]);
  return out;
}

std::vector<PhaseLabel> phase_diagram(const ModeDecomposition& modes,
                                      const std::vector<double>& n_grid,
                                      const std::vector<double>& r_grid) {
  const auto [dx_p, dp_p] = asymptotic_even_variances(modes);
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n_grid.size());
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(r_grid.size());
  std::vector<PhaseLabel> out(static_cast<std::size_t>(nn * nr));
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t i = 0; i < nn; ++i)
    for (std::ptrdiff_t j = 0; j < nr; ++j)
      out[static_cast<std::size_t>(i * nr + j)] =
          classify_from_dispersions(dx_p, dp_p, modes.omega_odd, n_grid[i], r_grid[j]);
  return out;
}

std::vector<SweepRow> params_sweep(const IonChainSpec& spec_template,
                                   const std::vector<double>& ratios) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ratios.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    IonChainSpec spec = spec_template;
    spec.freq_ratio = ratios[static_cast<std::size_t>(i)];
    SweepRow row;
    row.ratio = spec.freq_ratio;
    if (stability_margin(spec) > 0.0) {
      const AsymptoticParams p = critical_params(normal_modes(spec), 0.0, 0.0);
      row.e_n0 = p.e_n0;
      row.r_crit = p.r_crit;
      row.s_min = p.s_min;
      row.stable = true;
    } else {
      row.e_n0 = row.r_crit = row.s_min = std::numeric_limits<double>::quiet_NaN();
      row.stable = false;
    }
    rows[static_cast<std::size_t>(i)] = row;
  }
  return rows;
}

EvenModeBlocks thermal_even_blocks(const ModeDecomposition& modes, double nbar) {
  if (nbar < 0.0) throw std::invalid_argument("thermal_even_blocks: nbar must be >= 0");
  const auto e = modes.even_indices();
  return {(2.0 * nbar + 1.0) * mode_vacuum(modes.frequencies(e[0])),
          (2.0 * nbar + 1.0) * mode_vacuum(modes.frequencies(e[1]))};
}

double mode_occupation(const Eigen::Matrix2d& block, double omega) {
  return 0.5 * (omega * block(0, 0) + block(1, 1) / omega - 1.0);
}

EvenModeBlocks cooling_relaxation(const ModeDecomposition& modes, const EvenModeBlocks& initial,
                                  double kappa, double t) {
  if (!(kappa > 0.0)) throw std::invalid_argument("cooling_relaxation: kappa must be positive");
  const auto e = modes.even_indices();
  const double decay = std::exp(-kappa * t);

  auto relax = [&](const Eigen::Matrix2d& block, double omega) {
    const Eigen::Matrix2d rot = scaled_rotation(omega, omega * t);
    // Convex mix of the rotated initial state and the vacuum target;
    // both are physical, so the result is.
    const Eigen::Matrix2d out =
        (1.0 - decay) * mode_vacuum(omega) + decay * rot * block * rot.transpose();
    if (std::sqrt(out.determinant()) < 0.5 - 1e-9)
      throw UnphysicalIntermediateError("cooling_relaxation produced an unphysical block");
    return out;
  };

  return {relax(initial.e1, modes.frequencies(e[0])),
          relax(initial.e2, modes.frequencies(e[1]))};
}

Eigen::Matrix2d plus_sector_block(const ModeDecomposition& modes, const EvenModeBlocks& blocks) {
  // x_+ = c_e1 Q_e1 + c_e2 Q_e2 and likewise for p_+; modes are uncorrelated.
  const double c1 = modes.coupling_coeffs[0], c2 = modes.coupling_coeffs[1];
  return c1 * c1 * blocks.e1 + c2 * c2 * blocks.e2;
}

} // namespace ionphase
