#include "ionphase/detection.hpp"

#include "ionphase/gaussian.hpp" // UnphysicalStateError

#include <algorithm>
#include <cmath>
#include <random>

namespace ionphase {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double var_slope = 0.0;
  double var_intercept = 0.0;
  double cov_si = 0.0;
};

// Ordinary least squares of y on x with intercept. Error estimates come
// from the known per-point noise variances when available (sandwich
// form; the binomial noise is strongly heteroscedastic in ln F), else
// from the residuals.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& noise_var) {
  const std::size_t n = x.size();
  if (n < 3)
    throw InconsistentDataError("reconstruct: too few usable scan points for the fit");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;

  if (noise_var.empty()) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      rss += e * e;
    }
    const double s2 = rss / (n - 2);
    f.var_slope = s2 / sxx;
    f.var_intercept = s2 * (1.0 / n + mx * mx / sxx);
    f.cov_si = -s2 * mx / sxx;
  } else {
    // slope = sum h_i y_i with h_i = (x_i - mx)/sxx,
    // intercept = sum (1/n - mx h_i) y_i
    for (std::size_t i = 0; i < n; ++i) {
      const double h = (x[i] - mx) / sxx;
      const double g = 1.0 / n - mx * h;
      f.var_slope += h * h * noise_var[i];
      f.var_intercept += g * g * noise_var[i];
      f.cov_si += h * g * noise_var[i];
    }
  }
  return f;
}

LineFit fit_scan(const FidelityScan& scan) {
  std::vector<double> x, y, v;
  x.reserve(scan.kick_values.size());
  for (std::size_t i = 0; i < scan.kick_values.size(); ++i) {
    const double f = scan.fidelities[i];
    if (f <= 0.0) continue; // sampled zeros carry no log information
    x.push_back(scan.kick_values[i] * scan.kick_values[i]);
    y.push_back(std::log(f));
    if (scan.shots)
      v.push_back((1.0 - f) / (f * static_cast<double>(*scan.shots))); // var(ln F-hat)
  }
  return fit_line(x, y, v);
}

void require_physical(const Eigen::Matrix2d& cov) {
  if (!cov.allFinite() || std::abs(cov(0, 1) - cov(1, 0)) > 1e-12)
    throw std::invalid_argument("single-mode covariance must be finite and symmetric");
  if (std::sqrt(cov.determinant()) < 0.5 - 1e-9 || cov(0, 0) <= 0.0)
    throw UnphysicalStateError("single-mode covariance below the vacuum bound");
}

} // namespace

double mean_phonon(const Eigen::Matrix2d& cov) {
  require_physical(cov);
  return 0.5 * (cov.trace() - 1.0);
}

double ground_fidelity(const Eigen::Matrix2d& cov, double kick, KickAxis axis) {
  require_physical(cov);
  const Eigen::Matrix2d m = (0.5 * Eigen::Matrix2d::Identity() + cov).inverse();
  const double exponent = axis == KickAxis::Momentum ? m(1, 1) : m(0, 0);
  return std::sqrt(m.determinant()) * std::exp(-0.5 * kick * kick * exponent);
}

FidelityScan simulate_scan(const Eigen::Matrix2d& cov, const std::vector<double>& kick_values,
                           KickAxis axis, std::optional<std::int64_t> shots,
                           std::uint64_t seed, int mode_id) {
  FidelityScan scan;
  scan.mode_id = mode_id;
  scan.axis = axis;
  scan.kick_values = kick_values;
  scan.shots = shots;
  scan.seed = seed;
  scan.mean_phonon = mean_phonon(cov);

  std::mt19937_64 rng(seed);
  scan.fidelities.reserve(kick_values.size());
  for (double k : kick_values) {
    double f = ground_fidelity(cov, k, axis);
    if (shots) {
      std::binomial_distribution<std::int64_t> dist(*shots, f);
      f = static_cast<double>(dist(rng)) / static_cast<double>(*shots);
    }
    scan.fidelities.push_back(f);
  }
  return scan;
}

std::vector<double> default_kick_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.25 * i);
  return grid;
}

Reconstruction reconstruct(const FidelityScan& momentum_scan, const FidelityScan& position_scan,
                           double consistency_tol) {
  if (momentum_scan.axis != KickAxis::Momentum || position_scan.axis != KickAxis::Position)
    throw std::invalid_argument("reconstruct: expected one momentum-axis and one position-axis scan");
  if (std::abs(momentum_scan.mean_phonon - position_scan.mean_phonon) > 1e-9)
    throw std::invalid_argument("reconstruct: scans disagree on the mean phonon number");

  const LineFit fp = fit_scan(momentum_scan); // slope = -M22/2
  const LineFit fx = fit_scan(position_scan); // slope = -M11/2

  const double m22 = -2.0 * fp.slope;
  const double m11 = -2.0 * fx.slope;
  const double det_m = std::exp(fp.intercept + fx.intercept); // both intercepts are ln(det M)/2
  if (m11 <= 0.0 || m22 <= 0.0 || det_m <= 0.0)
    throw InconsistentDataError("reconstruct: fitted M is not positive");

  const double q = std::max(m11 * m22 - det_m, 0.0); // M12^2
  Eigen::Matrix2d cov;
  cov(0, 0) = m22 / det_m - 0.5;
  cov(1, 1) = m11 / det_m - 0.5;
  cov(0, 1) = cov(1, 0) = std::sqrt(q) / det_m; // magnitude only

  // Cross-check the fitted trace against the directly measured phonon number.
  const double trace_expected = 2.0 * momentum_scan.mean_phonon + 1.0;
  if (std::abs(cov.trace() - trace_expected) > consistency_tol)
    throw InconsistentDataError("reconstruct: fitted covariance trace disagrees with Tr(C) = 2<n>+1");

  // Delta-method errors in the fit parameters (b_p, a_p, b_x, a_x);
  // the two scans are independent.
  auto prop = [&](const Eigen::Vector4d& g) {
    return std::sqrt(g(0) * g(0) * fp.var_slope + g(1) * g(1) * fp.var_intercept +
                     2.0 * g(0) * g(1) * fp.cov_si + g(2) * g(2) * fx.var_slope +
                     g(3) * g(3) * fx.var_intercept + 2.0 * g(2) * g(3) * fx.cov_si);
  };

  Eigen::Matrix2d se = Eigen::Matrix2d::Zero();
  se(0, 0) = prop({-2.0 / det_m, -m22 / det_m, 0.0, -m22 / det_m});
  se(1, 1) = prop({0.0, -m11 / det_m, -2.0 / det_m, -m11 / det_m});
  if (q > 0.0) {
    const double sq = std::sqrt(q);
    const double dd = -0.5 / sq - sq / det_m; // d(C12)/d(ln det M) / 1
    se(0, 1) = se(1, 0) = prop({-m11 / (sq * det_m), dd, -m22 / (sq * det_m), dd});
  }

  return {cov, OffDiagonalSign::Unknown, se};
}

} // namespace ionphase
