// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Tolerances are pinned in the checks themselves.

#include "ionphase/chain_model.hpp"
#include "ionphase/detection.hpp"
#include "ionphase/gaussian.hpp"
#include "ionphase/phase_engine.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

using namespace ionphase;

namespace {

int g_failures = 0;
// criterion 9 piggybacks on every state the other criteria produce
double g_worst_physicality = 0.0;

void report(int criterion, bool ok, const char* what, double seconds) {
  std::printf("%s criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", criterion, what, seconds);
  if (!ok) ++g_failures;
}

void track(const CovarianceState& st) {
  const double m = check_physicality(st);
  if (m < g_worst_physicality) g_worst_physicality = m;
}

IonChainSpec mg_be_mg(double ratio, Direction dir = Direction::Transverse) {
  return {23.985, 9.0122, ratio, dir};
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void criterion_1() {
  Timer timer;
  const double crit = critical_freq_ratio(mg_be_mg(1.7));
  report(1, std::abs(crit - 1.673) <= 0.002, "zig-zag stability threshold 1.673 +- 0.002",
         timer.seconds());
}

void criterion_2() {
  Timer timer;
  const auto pt = critical_params(normal_modes(mg_be_mg(1.7)), 0.0, 0.0);
  const auto pa = critical_params(normal_modes(mg_be_mg(1.7, Direction::Axial)), 0.0, 0.0);
  const bool ok = std::abs(pt.r_crit - 0.30) <= 0.01 && std::abs(pt.s_min - 0.12) <= 0.01 &&
                  std::abs(pa.r_crit - 0.14) <= 0.01 && std::abs(pa.s_min - 0.04) <= 0.01;
  report(2, ok, "r_crit/S_min at ratio 1.7, transverse and axial", timer.seconds());
}

void criterion_3() {
  Timer timer;
  std::vector<double> ratios;
  for (int i = 0; i < 200; ++i) ratios.push_back(1.675 + (5.0 - 1.675) * i / 199.0);
  const auto rows = params_sweep(mg_be_mg(1.7), ratios);

  bool ok = true;
  double at17 = 0.0;
  for (const auto& row : rows) {
    if (!row.stable) ok = false;
    if (std::abs(row.ratio - 1.7) < 0.01) at17 = row.e_n0;
  }
  const auto p17 = critical_params(normal_modes(mg_be_mg(1.7)), 0.0, 0.0);
  at17 = p17.e_n0;
  ok = ok && std::abs(at17 - 0.18) <= 0.02;
  ok = ok && at17 == std::max(p17.r_crit - p17.s_min, 0.0);

  // Monotone decay to zero at figure resolution: strictly decreasing
  // while E_N0 is above 0.02, any later rises bounded below 0.01 (the
  // |ln| cusp in r_crit near ratio 2.2 produces ~6e-3 wiggles).
  for (std::size_t i = 1; i < rows.size() && ok; ++i) {
    if (rows[i - 1].e_n0 > 0.02 && rows[i].e_n0 >= rows[i - 1].e_n0) ok = false;
    if (rows[i].e_n0 > rows[i - 1].e_n0 + 0.01) ok = false;
  }
  ok = ok && rows.back().e_n0 < 0.01;
  report(3, ok, "E_N0 = max{r_crit - S_min, 0} = 0.18 +- 0.02 at 1.7, decays to zero",
         timer.seconds());
}

void criterion_4() {
  Timer timer;
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> ratio(1.8, 4.0), mass(5.0, 50.0);
  std::uniform_real_distribution<double> nd(0.0, 3.0), rd(0.0, 2.0), td(0.0, 2.0 * M_PI);
  std::uniform_int_distribution<int> dir(0, 1);

  bool ok = true;
  int checked = 0;
  while (checked < 1000) {
    IonChainSpec spec{mass(rng), mass(rng), ratio(rng),
                      dir(rng) ? Direction::Axial : Direction::Transverse};
    if (stability_margin(spec) <= 1e-6) continue;
    ++checked;
    const auto modes = normal_modes(spec);
    const double n = nd(rng), r = rd(rng), theta = td(rng);
    const auto [dx_p, dp_p] = asymptotic_even_variances(modes);
    const double sigma = std::sqrt(0.5 * (2.0 * n + 1.0));
    const double sw = std::sqrt(modes.omega_odd);

    // evolve the state from a random phase to its extremal times
    const auto st = build_asymptotic_state(modes, n, r, theta);
    track(st);
    const double to_extremum = theta / modes.omega_odd; // evolution rotates the ellipse by -omega t
    const auto at0 = evolve(st, modes.omega_odd, to_extremum);
    const auto atq = evolve(st, modes.omega_odd, to_extremum + 0.5 * M_PI / modes.omega_odd);
    track(at0);
    track(atq);

    const double e0 = negativity_extremal(dx_p, dp_p, sigma * std::exp(-r) / sw,
                                          sigma * std::exp(r) * sw);
    const double eq = negativity_extremal(dx_p, dp_p, sigma * std::exp(r) / sw,
                                          sigma * std::exp(-r) * sw);
    if (std::abs(e0 - log_negativity(at0)) > 1e-9) ok = false;
    if (std::abs(eq - log_negativity(atq)) > 1e-9) ok = false;
  }
  report(4, ok, "closed-form extremal negativity vs symplectic E_N, 1000 draws, 1e-9",
         timer.seconds());
}

void criterion_5() {
  Timer timer;
  const auto modes = normal_modes(mg_be_mg(1.7));
  const auto p = critical_params(modes, 0.0, 0.0);
  const double period = M_PI / modes.omega_odd;
  const double tol = 1e-9, margin = 1e-6;

  bool ok = true;
  int compared = 0;
#pragma omp parallel for collapse(2) schedule(dynamic) reduction(&& : ok) reduction(+ : compared)
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double n = 3.0 * i / 49.0;
      const double r = 1.5 * j / 49.0;
      // closed-form discriminants; cells near a phase boundary are excluded
      const double l = 0.5 * std::log(2.0 * n + 1.0);
      const double sup_d = r + p.r_crit - p.s_min - l;
      const double inf_d = std::abs(r - p.r_crit) - p.s_min - l;
      if (std::abs(sup_d) < margin || std::abs(inf_d) < margin) continue;
      ++compared;

      const PhaseLabel closed = classify_phase(modes, n, r);
      const auto st = build_asymptotic_state(modes, n, r);
      double lo = 1e300, hi = -1e300;
      for (int k = 0; k < 401; ++k) {
        const double en = log_negativity(evolve(st, modes.omega_odd, period * k / 400.0));
        lo = std::min(lo, en);
        hi = std::max(hi, en);
      }
      Phase brute;
      if (lo > tol) brute = Phase::Persistent;
      else if (hi > tol) brute = Phase::DeathRevival;
      else brute = Phase::Separable;
      if (brute != closed.phase) ok = false;
      if (hi > closed.sup_en + tol || lo < closed.inf_en - tol) ok = false;
    }
  }
  ok = ok && compared > 2000;
  report(5, ok, "closed-form vs brute-force phase classification on a 50x50 grid",
         timer.seconds());
}

void criterion_6() {
  Timer timer;
  const auto modes = normal_modes(mg_be_mg(1.7));
  const double r_crit = critical_params(modes, 0.0, 0.0).r_crit;

  auto band_width = [&](double n) {
    // bisect the two death-revival boundaries in r
    auto is_dr_or_above = [&](double r) {
      return classify_phase(modes, n, r).phase != Phase::Separable;
    };
    auto is_persistent = [&](double r) {
      return classify_phase(modes, n, r).phase == Phase::Persistent;
    };
    double lo = 0.0, hi = 5.0;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (is_dr_or_above(mid) ? hi : lo) = mid;
    }
    const double lower = 0.5 * (lo + hi);
    lo = lower; hi = 8.0;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (is_persistent(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi) - lower;
  };

  bool ok = true;
  for (double n : {2.0, 3.0, 5.0, 10.0}) {
    const double width = band_width(n);
    if (std::abs(width - 2.0 * r_crit) > 0.02 * 2.0 * r_crit) ok = false;
  }
  report(6, ok, "death-revival band width = 2 r_crit (+-2%) for n_minus >= 2", timer.seconds());
}

void criterion_7() {
  Timer timer;
  const auto modes = normal_modes(mg_be_mg(1.7));
  const double period = M_PI / modes.omega_odd;
  std::vector<double> times;
  for (int i = 0; i <= 400; ++i) times.push_back(3.0 * period * i / 400.0);

  bool ok = true;

  // (0, 0): constant positive trace
  const double e_n0 = critical_params(modes, 0.0, 0.0).e_n0;
  for (const auto& [t, en] : negativity_trace(modes, 0.0, 0.0, times))
    if (std::abs(en - e_n0) > 1e-9 || en <= 0.0) ok = false;

  // all four presets: period pi/omega_odd to 1e-9; at least one shows
  // zero intervals with revivals
  const std::pair<double, double> presets[] = {{0.0, 0.0}, {0.0, 0.3}, {0.0, 1.0}, {1.0, 0.7}};
  bool any_death_revival = false;
  for (const auto& [n, r] : presets) {
    const auto st = build_asymptotic_state(modes, n, r);
    track(st);
    bool has_zero = false, has_positive = false;
    for (double t : {0.0, 0.13 * period, 0.4 * period, 0.77 * period}) {
      const auto a = evolve(st, modes.omega_odd, t);
      const auto b = evolve(st, modes.omega_odd, t + period);
      track(a);
      track(b);
      if (std::abs(log_negativity(a) - log_negativity(b)) > 1e-9) ok = false;
    }
    for (int i = 0; i <= 200; ++i) {
      const double en = log_negativity(evolve(st, modes.omega_odd, period * i / 200.0));
      if (en == 0.0) has_zero = true;
      if (en > 1e-6) has_positive = true;
    }
    if (has_zero && has_positive) any_death_revival = true;
  }
  ok = ok && any_death_revival;
  report(7, ok, "trace presets: flat vacuum trace, death/revival preset, period pi/omega_odd",
         timer.seconds());
}

void criterion_8() {
  Timer timer;
  const auto kicks = default_kick_grid();
  bool ok = true;

  // noiseless round trip over 1000 random physical covariances
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> nu(0.5, 3.0), squeeze(-0.8, 0.8),
      angle(0.0, 2.0 * M_PI);
  for (int i = 0; i < 1000; ++i) {
    const double z = squeeze(rng), phi = angle(rng);
    Eigen::Matrix2d rot, sq;
    rot << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    sq << std::exp(z), 0.0, 0.0, std::exp(-z);
    const Eigen::Matrix2d symp = rot * sq;
    const Eigen::Matrix2d truth = nu(rng) * symp * symp.transpose();
    const auto rec = reconstruct(simulate_scan(truth, kicks, KickAxis::Momentum),
                                 simulate_scan(truth, kicks, KickAxis::Position));
    if (std::abs(rec.covariance(0, 0) - truth(0, 0)) > 1e-6 ||
        std::abs(rec.covariance(1, 1) - truth(1, 1)) > 1e-6 ||
        std::abs(rec.covariance(0, 1) - std::abs(truth(0, 1))) > 1e-6)
      ok = false;
  }

  // 500 seeded noisy trials at 1e4 shots: >= 95% within 3 estimated sigma
  Eigen::Matrix2d truth;
  truth << 0.7, 0.3, 0.3, 1.2;
  int within3 = 0;
  const int trials = 500;
#pragma omp parallel for schedule(static) reduction(+ : within3)
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed = 1000ull + 2ull * static_cast<std::uint64_t>(trial);
    const auto rec = reconstruct(simulate_scan(truth, kicks, KickAxis::Momentum, 10000, seed),
                                 simulate_scan(truth, kicks, KickAxis::Position, 10000, seed + 1));
    if (std::abs(rec.covariance(0, 0) - truth(0, 0)) <= 3.0 * rec.std_errors(0, 0) &&
        std::abs(rec.covariance(1, 1) - truth(1, 1)) <= 3.0 * rec.std_errors(1, 1) &&
        std::abs(rec.covariance(0, 1) - truth(0, 1)) <= 3.0 * rec.std_errors(0, 1))
      ++within3;
  }
  ok = ok && within3 >= static_cast<int>(0.95 * trials);
  report(8, ok, "detection round trip: noiseless < 1e-6; 3-sigma coverage >= 95% at 1e4 shots",
         timer.seconds());
}

void criterion_9() {
  Timer timer;
  // sample states across the full parameter range used by the commands
  const auto modes_t = normal_modes(mg_be_mg(1.7));
  const auto modes_a = normal_modes(mg_be_mg(1.7, Direction::Axial));
  for (const auto& modes : {modes_t, modes_a}) {
    const double period = M_PI / modes.omega_odd;
    for (double n : {0.0, 0.5, 1.5, 3.0})
      for (double r : {0.0, 0.3, 0.9, 1.5})
        for (int k = 0; k <= 20; ++k) {
          const auto st = evolve(build_asymptotic_state(modes, n, r), modes.omega_odd,
                                 2.0 * period * k / 20.0);
          track(st);
          track(to_local(st));
        }
  }
  const bool ok = g_worst_physicality >= -1e-9;
  std::printf("       worst symplectic-uncertainty margin observed: %.3e\n", g_worst_physicality);
  report(9, ok, "all emitted states satisfy the uncertainty bound (margin >= -1e-9)",
         timer.seconds());
}

} // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9(); // also re-checks every state tracked by criteria 4 and 7
  if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
  else std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
