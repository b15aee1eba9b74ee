#include "ionphase/chain_model.hpp"
#include "ionphase/detection.hpp"
#include "ionphase/gaussian.hpp"
#include "ionphase/phase_engine.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace ionphase;

// Exit codes: 0 success, 1 config error, 2 unstable chain, 3 reconstruction inconsistency.
constexpr int kExitConfig = 1;
constexpr int kExitUnstable = 2;
constexpr int kExitInconsistent = 3;

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i] << (i + 1 < row.size() ? "," : "\n");
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj;
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      arr.push_back(obj);
    }
    return arr;
  }
};

struct RunConfig {
  double mass_outer = 23.985;
  double mass_center = 9.0122;
  Direction direction = Direction::Transverse;
  double ratio = 1.7;
  double n_minus = 0.0;
  double r = 0.0;
  double t_max = 20.0;
  int t_steps = 400;
  int grid_n = 201;
  int grid_r = 201;
  double n_max = 3.0;
  double r_max = 1.5;
  double ratio_min = 1.675;
  double ratio_max = 5.0;
  int ratio_steps = 200;
  std::string preset;
  std::optional<std::int64_t> shots;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";

  IonChainSpec chain() const { return {mass_outer, mass_center, ratio, direction}; }
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json doc = json::parse(in);
  if (doc.contains("ions")) {
    const std::string v = doc["ions"];
    if (v != "MG_BE_MG") {
      if (v.rfind("custom:", 0) != 0) throw CLI::ValidationError("ions", "unknown ions spec " + v);
      std::sscanf(v.c_str() + 7, "%lf,%lf", &cfg.mass_outer, &cfg.mass_center);
    }
  }
  if (doc.contains("direction"))
    cfg.direction = doc["direction"] == "axial" ? Direction::Axial : Direction::Transverse;
  auto num = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc[key];
  };
  num("ratio", cfg.ratio);
  num("n_minus", cfg.n_minus);
  num("r", cfg.r);
  num("t_max", cfg.t_max);
  num("t_steps", cfg.t_steps);
  num("n_max", cfg.n_max);
  num("r_max", cfg.r_max);
  num("ratio_min", cfg.ratio_min);
  num("ratio_max", cfg.ratio_max);
  num("ratio_steps", cfg.ratio_steps);
  num("seed", cfg.seed);
  if (doc.contains("grid")) {
    const std::string g = doc["grid"];
    std::sscanf(g.c_str(), "%dx%d", &cfg.grid_n, &cfg.grid_r);
  }
  if (doc.contains("shots")) cfg.shots = doc["shots"].get<std::int64_t>();
  if (doc.contains("preset")) cfg.preset = doc["preset"];
  if (doc.contains("out")) cfg.out = doc["out"];
  if (doc.contains("format")) cfg.format = doc["format"];
}

int emit(const Table& table, const RunConfig& cfg) {
  std::ostringstream body;
  if (cfg.format == "json")
    body << table.to_json().dump(2) << "\n";
  else
    table.write_csv(body);
  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << cfg.out << "\n";
      return kExitConfig;
    }
    out << body.str();
  }
  return 0;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = n > 1 ? lo + (hi - lo) * i / (n - 1) : lo;
  return v;
}

int cmd_modes(const RunConfig& cfg) {
  const IonChainSpec spec = cfg.chain();
  const double margin = stability_margin(spec);
  if (margin <= 0.0) {
    std::cerr << "error: linear chain unstable at ratio " << fmt_num(cfg.ratio)
              << " (critical ratio " << fmt_num(critical_freq_ratio(spec)) << ")\n";
    return kExitUnstable;
  }
  const ModeDecomposition modes = normal_modes(spec);
  Table t;
  t.header = {"mode", "frequency", "parity", "coupling_coeff"};
  int even_slot = 0;
  for (int n = 0; n < 3; ++n) {
    const bool even = modes.parities[n] == Parity::Even;
    t.rows.push_back({std::to_string(n), fmt_num(modes.frequencies(n)),
                      even ? "even" : "odd",
                      even ? fmt_num(modes.coupling_coeffs[even_slot++]) : "0"});
  }
  t.rows.push_back({"omega_odd", fmt_num(modes.omega_odd), "", ""});
  t.rows.push_back({"stability_margin", fmt_num(margin), "", ""});
  return emit(t, cfg);
}

int cmd_sweep(const RunConfig& cfg) {
  const auto rows = params_sweep(cfg.chain(), linspace(cfg.ratio_min, cfg.ratio_max, cfg.ratio_steps));
  Table t;
  t.header = {"ratio", "e_n0", "r_crit", "s_min", "stable"};
  for (const auto& row : rows)
    t.rows.push_back({fmt_num(row.ratio), fmt_num(row.e_n0), fmt_num(row.r_crit),
                      fmt_num(row.s_min), row.stable ? "1" : "0"});
  return emit(t, cfg);
}

int cmd_trace(RunConfig cfg) {
  // Fig-style presets: (n_minus, r) pairs.
  if (cfg.preset == "black") { cfg.n_minus = 0.0; cfg.r = 0.0; }
  else if (cfg.preset == "red") { cfg.n_minus = 0.0; cfg.r = 0.3; }
  else if (cfg.preset == "green") { cfg.n_minus = 0.0; cfg.r = 1.0; }
  else if (cfg.preset == "blue") { cfg.n_minus = 1.0; cfg.r = 0.7; }
  else if (!cfg.preset.empty()) {
    std::cerr << "error: unknown preset " << cfg.preset << "\n";
    return kExitConfig;
  }
  const IonChainSpec spec = cfg.chain();
  if (stability_margin(spec) <= 0.0) {
    std::cerr << "error: unstable chain (critical ratio "
              << fmt_num(critical_freq_ratio(spec)) << ")\n";
    return kExitUnstable;
  }
  const ModeDecomposition modes = normal_modes(spec);
  const auto trace = negativity_trace(modes, cfg.n_minus, cfg.r,
                                      linspace(0.0, cfg.t_max, cfg.t_steps + 1));
  Table t;
  t.header = {"t_omega_z", "e_n"};
  for (const auto& [time, en] : trace) t.rows.push_back({fmt_num(time), fmt_num(en)});
  return emit(t, cfg);
}

int cmd_phase_diagram(const RunConfig& cfg) {
  const IonChainSpec spec = cfg.chain();
  if (stability_margin(spec) <= 0.0) {
    std::cerr << "error: unstable chain (critical ratio "
              << fmt_num(critical_freq_ratio(spec)) << ")\n";
    return kExitUnstable;
  }
  const ModeDecomposition modes = normal_modes(spec);
  const auto n_grid = linspace(0.0, cfg.n_max, cfg.grid_n);
  const auto r_grid = linspace(0.0, cfg.r_max, cfg.grid_r);
  const auto labels = phase_diagram(modes, n_grid, r_grid);

  auto phase_name = [](Phase p) {
    switch (p) {
      case Phase::Persistent: return "persistent";
      case Phase::DeathRevival: return "death_revival";
      default: return "separable";
    }
  };
  Table t;
  t.header = {"n_minus", "r", "phase", "sup_en", "inf_en"};
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      const PhaseLabel& lbl = labels[i * r_grid.size() + j];
      t.rows.push_back({fmt_num(n_grid[i]), fmt_num(r_grid[j]), phase_name(lbl.phase),
                        fmt_num(lbl.sup_en), fmt_num(lbl.inf_en)});
    }
  return emit(t, cfg);
}

int cmd_detect(const RunConfig& cfg) {
  if (cfg.out.empty()) {
    std::cerr << "error: detect requires --out (writes CSV scans plus a JSON report)\n";
    return kExitConfig;
  }
  const IonChainSpec spec = cfg.chain();
  if (stability_margin(spec) <= 0.0) {
    std::cerr << "error: unstable chain (critical ratio "
              << fmt_num(critical_freq_ratio(spec)) << ")\n";
    return kExitUnstable;
  }
  const ModeDecomposition modes = normal_modes(spec);

  // Per-mode covariances of the asymptotic state in the dimensionless
  // mode quadratures: even modes cooled to vacuum, odd mode squeezed thermal.
  std::vector<Eigen::Matrix2d> truths(3, 0.5 * Eigen::Matrix2d::Identity());
  {
    Eigen::Matrix2d odd;
    const double s2 = 0.5 * (2.0 * cfg.n_minus + 1.0);
    odd << s2 * std::exp(-2.0 * cfg.r), 0.0, 0.0, s2 * std::exp(2.0 * cfg.r);
    truths[static_cast<std::size_t>(modes.odd_index())] = odd;
  }

  Table scans_table;
  scans_table.header = {"mode_id", "axis", "delta_p", "fidelity", "shots"};
  json report = json::array();
  const auto kicks = default_kick_grid();

  for (int mode = 0; mode < 3; ++mode) {
    const Eigen::Matrix2d& truth = truths[static_cast<std::size_t>(mode)];
    const std::uint64_t base = cfg.seed + 2ull * static_cast<std::uint64_t>(mode);
    const FidelityScan mom = simulate_scan(truth, kicks, KickAxis::Momentum, cfg.shots, base, mode);
    const FidelityScan pos = simulate_scan(truth, kicks, KickAxis::Position, cfg.shots, base + 1, mode);

    for (const FidelityScan* scan : {&mom, &pos})
      for (std::size_t i = 0; i < kicks.size(); ++i)
        scans_table.rows.push_back({std::to_string(mode),
                                    scan->axis == KickAxis::Momentum ? "momentum" : "position",
                                    fmt_num(scan->kick_values[i]), fmt_num(scan->fidelities[i]),
                                    cfg.shots ? std::to_string(*cfg.shots) : "0"});

    const Reconstruction rec = reconstruct(mom, pos);
    json entry;
    entry["mode_id"] = mode;
    entry["truth"] = {truth(0, 0), truth(0, 1), truth(1, 1)};
    entry["estimate"] = {rec.covariance(0, 0), rec.covariance(0, 1), rec.covariance(1, 1)};
    entry["std_error"] = {rec.std_errors(0, 0), rec.std_errors(0, 1), rec.std_errors(1, 1)};
    entry["delta"] = {rec.covariance(0, 0) - truth(0, 0),
                      rec.covariance(0, 1) - std::abs(truth(0, 1)),
                      rec.covariance(1, 1) - truth(1, 1)};
    entry["offdiag_sign"] = "unknown";
    entry["mean_phonon"] = mom.mean_phonon;
    report.push_back(entry);
  }

  std::ofstream csv(cfg.out, std::ios::binary);
  if (!csv) {
    std::cerr << "error: cannot write " << cfg.out << "\n";
    return kExitConfig;
  }
  scans_table.write_csv(csv);
  const std::string report_path = cfg.out + ".report.json";
  std::ofstream rep(report_path, std::ios::binary);
  if (!rep) {
    std::cerr << "error: cannot write " << report_path << "\n";
    return kExitConfig;
  }
  rep << report.dump(2) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* threads = std::getenv("IONPHASE_THREADS"))
    if (const int n = std::atoi(threads); n > 0) omp_set_num_threads(n);
#endif

  CLI::App app{"Entanglement-phase simulator for a laser-cooled three-ion chain"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, ions, direction;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_option("--ratio", cfg.ratio, "omega_x / omega_z");
    sub->add_option("--ions", ions, "MG_BE_MG or custom:m_outer,m_center (u)");
    sub->add_option("--direction", direction, "transverse|axial");
    sub->add_option("--n-minus", cfg.n_minus, "initial odd-mode occupation");
    sub->add_option("--r", cfg.r, "odd-mode squeezing");
    sub->add_option("--t-max", cfg.t_max, "trace length, units 1/omega_z");
    sub->add_option("--t-steps", cfg.t_steps, "trace steps");
    sub->add_option("--grid", [&cfg](const std::vector<std::string>& v) {
      return std::sscanf(v[0].c_str(), "%dx%d", &cfg.grid_n, &cfg.grid_r) == 2;
    }, "phase-diagram grid, NxM");
    sub->add_option("--n-max", cfg.n_max, "phase-diagram n_minus range");
    sub->add_option("--r-max", cfg.r_max, "phase-diagram r range");
    sub->add_option("--ratio-min", cfg.ratio_min, "sweep start");
    sub->add_option("--ratio-max", cfg.ratio_max, "sweep end");
    sub->add_option("--ratio-steps", cfg.ratio_steps, "sweep points");
    sub->add_option("--preset", cfg.preset, "trace preset: black|red|green|blue");
    sub->add_option("--shots", [&cfg](const std::vector<std::string>& v) {
      cfg.shots = std::stoll(v[0]);
      return true;
    }, "binomial shots per fidelity point");
    sub->add_option("--seed", cfg.seed, "master RNG seed");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--format", cfg.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* modes_cmd = app.add_subcommand("modes", "normal-mode report");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "E_N0/r_crit/S_min vs frequency ratio");
  CLI::App* trace_cmd = app.add_subcommand("trace", "negativity vs time");
  CLI::App* diagram_cmd = app.add_subcommand("phase-diagram", "phase labels on an (n_minus, r) grid");
  CLI::App* detect_cmd = app.add_subcommand("detect", "fidelity scans and covariance reconstruction");
  for (CLI::App* sub : {modes_cmd, sweep_cmd, trace_cmd, diagram_cmd, detect_cmd})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    // Config file first, then re-parse so flags win.
    if (!config_path.empty()) {
      apply_config_file(cfg, config_path);
      app.clear();
      app.parse(argc, argv);
    }
    if (ions == "MG_BE_MG") {
      cfg.mass_outer = 23.985;
      cfg.mass_center = 9.0122;
    } else if (!ions.empty()) {
      if (ions.rfind("custom:", 0) != 0 ||
          std::sscanf(ions.c_str() + 7, "%lf,%lf", &cfg.mass_outer, &cfg.mass_center) != 2) {
        std::cerr << "error: bad --ions value " << ions << "\n";
        return kExitConfig;
      }
    }
    if (!direction.empty()) {
      if (direction == "axial") cfg.direction = Direction::Axial;
      else if (direction == "transverse") cfg.direction = Direction::Transverse;
      else {
        std::cerr << "error: bad --direction value " << direction << "\n";
        return kExitConfig;
      }
    }
    cfg.chain().validate();

    if (modes_cmd->parsed()) return cmd_modes(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (trace_cmd->parsed()) return cmd_trace(cfg);
    if (diagram_cmd->parsed()) return cmd_phase_diagram(cfg);
    if (detect_cmd->parsed()) return cmd_detect(cfg);
    return kExitConfig;
  } catch (const InconsistentDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const UnstableChainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const CLI::ParseError& e) {
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
