// Copyright 2026 The seqfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqfisher/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "seqfisher/chain.hpp"
#include "seqfisher/channels.hpp"
#include "seqfisher/estimate.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/io.hpp"
#include "seqfisher/models.hpp"
#include "seqfisher/qcore.hpp"
#include "seqfisher/rng.hpp"
#include "seqfisher/scan.hpp"

namespace seqfisher::cli {

namespace {

using io::format_g17;
using io::Json;

/// Usage or configuration problem; mapped to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  // model
  int levels = 4;
  double nbar = 1.0;
  double omega = 1.0;
  std::string basis = "computational";
  bool coarse = false;
  // tau grid
  double tau_min = 0.05;
  double tau_max = 20.0;
  int tau_points = 200;
  bool tau_log = true;
  // nbar sweep (thermo-feedback)
  double nbar_min = 0.0;
  double nbar_max = 0.0;
  int nbar_points = 0;
  bool nbar_log = false;
  // montecarlo
  std::int64_t mc_n = 10000;
  int mc_traj = 500;
  std::string estimator = "mle";
  double bracket_lo = 0.3;
  double bracket_hi = 3.0;
  double tau = -1.0;  // < 0: use the optimal single-τ schedule
  // verify
  std::string suite = "all";
  int n_max = 8;
  double perturb_f = 0.0;
  // io
  bool tau_configured = false;  // a config file supplied tau grid keys
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file is not valid JSON: " +
                      std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "levels") cfg.levels = val.get<int>();
      else if (key == "nbar") cfg.nbar = val.get<double>();
      else if (key == "omega") cfg.omega = val.get<double>();
      else if (key == "basis") cfg.basis = val.get<std::string>();
      else if (key == "coarse") cfg.coarse = val.get<bool>();
      else if (key == "tau-min") { cfg.tau_min = val.get<double>(); cfg.tau_configured = true; }
      else if (key == "tau-max") { cfg.tau_max = val.get<double>(); cfg.tau_configured = true; }
      else if (key == "tau-points") { cfg.tau_points = val.get<int>(); cfg.tau_configured = true; }
      else if (key == "tau-log") { cfg.tau_log = val.get<bool>(); cfg.tau_configured = true; }
      else if (key == "nbar-min") cfg.nbar_min = val.get<double>();
      else if (key == "nbar-max") cfg.nbar_max = val.get<double>();
      else if (key == "nbar-points") cfg.nbar_points = val.get<int>();
      else if (key == "nbar-log") cfg.nbar_log = val.get<bool>();
      else if (key == "n") cfg.mc_n = val.get<std::int64_t>();
      else if (key == "n-traj") cfg.mc_traj = val.get<int>();
      else if (key == "estimator") cfg.estimator = val.get<std::string>();
      else if (key == "bracket-lo") cfg.bracket_lo = val.get<double>();
      else if (key == "bracket-hi") cfg.bracket_hi = val.get<double>();
      else if (key == "tau") cfg.tau = val.get<double>();
      else if (key == "suite") cfg.suite = val.get<std::string>();
      else if (key == "n-max") cfg.n_max = val.get<int>();
      else if (key == "perturb-f") cfg.perturb_f = val.get<double>();
      else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
      else if (key == "out") cfg.out = val.get<std::string>();
      else if (key == "format") cfg.format = val.get<std::string>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config value has the wrong type: " +
                      std::string(e.what()));
  }
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("output path is not writable: " + path);
  f << content;
  if (!f) throw ConfigError("failed writing output file: " + path);
}

std::string sanitize_cell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += '|';
    out += flags[i];
  }
  return sanitize_cell(out);
}

scan::AxisSpec tau_axis(const RunConfig& cfg) {
  if (cfg.tau_points < 2)
    throw ConfigError("tau grid needs at least 2 points");
  if (!(cfg.tau_min < cfg.tau_max))
    throw ConfigError("tau grid needs tau-min < tau-max");
  if (cfg.tau_log && !(cfg.tau_min > 0.0))
    throw ConfigError("log-spaced tau grid needs tau-min > 0");
  return scan::AxisSpec{"gtau", cfg.tau_min, cfg.tau_max, cfg.tau_points,
                        cfg.tau_log ? scan::Spacing::log
                                    : scan::Spacing::linear};
}

struct ScanTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // pre-formatted cells
};

std::string render_table(const ScanTable& t, const std::string& format,
                         const std::string& command, const Json& config) {
  if (format == "csv") {
    std::string out = io::csv_line(t.columns);
    for (const auto& r : t.rows) out += io::csv_line(r);
    return out;
  }
  if (format != "json") throw ConfigError("format must be csv or json");
  Json doc = Json::object();
  doc.set("command", Json::str(command));
  doc.set("config", config);
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = Json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      row.set(t.columns[c], Json::str(r[c]));
    rows.push(std::move(row));
  }
  doc.set("rows", std::move(rows));
  return doc.dump();
}

// ---------------------------------------------------------------------- scan

int cmd_thermo_scan(const RunConfig& cfg, bool coarse) {
  if (cfg.levels < 2) throw ConfigError("need --levels >= 2");
  if (!(cfg.nbar > 0.0)) throw ConfigError("need --nbar > 0");
  const auto axis = tau_axis(cfg);
  const double fth = models::thermal_fi(cfg.levels, cfg.nbar);
  const models::ThermometryModel m(
      cfg.levels, cfg.nbar,
      coarse ? models::ThermoMeasurement::coarse_grained
             : models::ThermoMeasurement::full_energy_basis);
  const auto grid = scan::scan_1d(
      [&](double t) {
        return coarse ? models::thermo_coarse_fisher(m, t, t)
                      : models::thermo_fisher(m, t, t);
      },
      axis);

  ScanTable table;
  table.columns = {"gtau", "f21_ratio", "f21_g_ratio", "f21_e_ratio", "flags"};
  for (const auto& rec : grid.records) {
    if (rec.report) {
      table.rows.push_back(
          {format_g17(rec.x), format_g17(rec.report->fi_conditional / fth),
           format_g17(rec.report->fi_by_previous[0] / fth),
           format_g17(rec.report->fi_by_previous[1] / fth),
           join_flags(rec.report->flags)});
    } else {
      table.rows.push_back({format_g17(rec.x), "nan", "nan", "nan",
                            sanitize_cell("error:" + rec.error)});
    }
  }
  Json config = Json::object();
  config.set("levels", Json::integer(cfg.levels));
  config.set("nbar", Json::num(cfg.nbar));
  config.set("coarse", Json::boolean(coarse));
  config.set("tau_min", Json::num(cfg.tau_min));
  config.set("tau_max", Json::num(cfg.tau_max));
  config.set("tau_points", Json::integer(cfg.tau_points));
  config.set("tau_log", Json::boolean(cfg.tau_log));
  write_output(cfg.out, render_table(table, cfg.format,
                                     coarse ? "thermo-coarse" : "thermo-scan",
                                     config));
  return 0;
}

// ------------------------------------------------------------------ feedback

struct FeedbackPoint {
  double nbar = 0.0;
  double f_star = 0.0, tau_star = 0.0;
  double f_sharp = 0.0, tau_g = 0.0, tau_e = 0.0;
  std::vector<std::string> flags;
};

FeedbackPoint feedback_point(int levels, double nbar, bool coarse,
                             const scan::AxisSpec& axis) {
  const auto meas = coarse ? models::ThermoMeasurement::coarse_grained
                           : models::ThermoMeasurement::full_energy_basis;
  auto objective = [&](double tg, double te) {
    models::ThermometryModel m(levels, nbar, meas, tg, te);
    return models::thermo_fi_conditional_analytic(m);
  };

  FeedbackPoint pt;
  pt.nbar = nbar;
  const auto grid = scan::axis_points(axis);
  const auto best1d =
      scan::maximize_1d([&](double t) { return objective(t, t); }, grid);
  pt.f_star = best1d.value;
  pt.tau_star = best1d.argmax[0];
  for (const auto& f : best1d.flags) pt.flags.push_back("fstar-" + f);

  // Coarser product grid for the 2-d pre-scan, with the diagonal optimum
  // appended so the feedback value can never fall below F*.
  std::vector<double> grid2;
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / 24);
  for (std::size_t i = 0; i < grid.size(); i += stride)
    grid2.push_back(grid[i]);
  grid2.push_back(pt.tau_star);
  const auto best2d = scan::maximize_2d(objective, grid2, grid2);
  pt.f_sharp = best2d.value;
  pt.tau_g = best2d.argmax[0];
  pt.tau_e = best2d.argmax[1];
  for (const auto& f : best2d.flags) pt.flags.push_back("fsharp-" + f);
  return pt;
}

int cmd_thermo_feedback(const RunConfig& cfg) {
  if (cfg.levels < 2) throw ConfigError("need --levels >= 2");
  const auto axis = tau_axis(cfg);

  std::vector<double> nbars;
  if (cfg.nbar_points > 0) {
    if (cfg.nbar_points < 2)
      throw ConfigError("nbar sweep needs at least 2 points");
    if (!(cfg.nbar_min < cfg.nbar_max) || !(cfg.nbar_min > 0.0))
      throw ConfigError("nbar sweep needs 0 < nbar-min < nbar-max");
    nbars = scan::axis_points(
        {"nbar", cfg.nbar_min, cfg.nbar_max, cfg.nbar_points,
         cfg.nbar_log ? scan::Spacing::log : scan::Spacing::linear});
  } else {
    if (!(cfg.nbar > 0.0)) throw ConfigError("need --nbar > 0");
    nbars = {cfg.nbar};
  }

  ScanTable table;
  table.columns = {"nbar",      "f_star", "tau_star", "f_sharp", "tau_g_opt",
                   "tau_e_opt", "enhancement", "tau_ratio", "flags"};
  for (double nb : nbars) {
    const FeedbackPoint pt = feedback_point(cfg.levels, nb, cfg.coarse, axis);
    table.rows.push_back(
        {format_g17(pt.nbar), format_g17(pt.f_star), format_g17(pt.tau_star),
         format_g17(pt.f_sharp), format_g17(pt.tau_g), format_g17(pt.tau_e),
         format_g17(pt.f_sharp / pt.f_star),
         format_g17(pt.tau_g / pt.tau_e), join_flags(pt.flags)});
  }
  Json config = Json::object();
  config.set("levels", Json::integer(cfg.levels));
  config.set("coarse", Json::boolean(cfg.coarse));
  write_output(cfg.out,
               render_table(table, cfg.format, "thermo-feedback", config));
  return 0;
}

// ---------------------------------------------------------------------- rabi

models::RabiModel parse_rabi_model(const RunConfig& cfg, double tau) {
  if (!(cfg.omega >= 0.0)) throw ConfigError("need --omega >= 0");
  if (cfg.basis == "computational")
    return models::RabiModel::computational(cfg.omega, tau);
  if (cfg.basis == "sigma-x") return models::RabiModel::sigma_x(cfg.omega, tau);
  if (cfg.basis == "sigma-y") return models::RabiModel::sigma_y(cfg.omega, tau);
  if (cfg.basis.rfind("bloch:", 0) == 0) {
    double theta = 0.0, phi = 0.0;
    if (std::sscanf(cfg.basis.c_str(), "bloch:%lf:%lf", &theta, &phi) != 2)
      throw ConfigError("bad --basis, expected bloch:<theta>:<phi>");
    return models::RabiModel(cfg.omega, tau, theta, phi);
  }
  throw ConfigError(
      "bad --basis, expected computational|sigma-x|sigma-y|bloch:<t>:<p>");
}

int cmd_rabi_scan(const RunConfig& cfg) {
  const auto axis = tau_axis(cfg);
  parse_rabi_model(cfg, 1.0);  // validate basis/omega before scanning
  const auto grid = scan::scan_1d(
      [&](double t) { return models::rabi_fisher(parse_rabi_model(cfg, t)); },
      axis);

  ScanTable table;
  table.columns = {"gtau", "f21", "f21_k0", "f21_k1", "flags"};
  for (const auto& rec : grid.records) {
    if (rec.report) {
      table.rows.push_back({format_g17(rec.x),
                            format_g17(rec.report->fi_conditional),
                            format_g17(rec.report->fi_by_previous[0]),
                            format_g17(rec.report->fi_by_previous[1]),
                            join_flags(rec.report->flags)});
    } else {
      table.rows.push_back({format_g17(rec.x), "nan", "nan", "nan",
                            sanitize_cell("error:" + rec.error)});
    }
  }
  Json config = Json::object();
  config.set("omega", Json::num(cfg.omega));
  config.set("basis", Json::str(cfg.basis));
  write_output(cfg.out, render_table(table, cfg.format, "rabi-scan", config));
  return 0;
}

// -------------------------------------------------------------------- verify

struct Check {
  std::string name;
  bool pass = false;
  double dev = 0.0;
  std::string detail;
};

void append_suite(Json& suites, const std::string& name,
                  const std::vector<Check>& checks, bool* all_pass) {
  Json suite = Json::object();
  suite.set("name", Json::str(name));
  Json arr = Json::array();
  for (const auto& c : checks) {
    *all_pass = *all_pass && c.pass;
    Json jc = Json::object();
    jc.set("name", Json::str(c.name));
    jc.set("pass", Json::boolean(c.pass));
    jc.set("max_deviation", Json::num(c.dev));
    if (!c.detail.empty()) jc.set("detail", Json::str(c.detail));
    arr.push(std::move(jc));
  }
  suite.set("checks", std::move(arr));
  suites.push(std::move(suite));
}

const std::vector<int> kGridLevels = {2, 3, 4, 5, 6};
const std::vector<double> kGridNbar = {0.1, 1.0, 10.0};
const std::vector<double> kGridTau = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0};

std::vector<Check> verify_appendix_b(double perturb_f) {
  std::vector<Check> checks;
  for (int levels : kGridLevels)
    for (double nb : kGridNbar) {
      Check c;
      c.name = "analytic-vs-expW-vs-liouvillian:D=" + std::to_string(levels) +
               ",nbar=" + format_g17(nb);
      double worst = 0.0;
      std::string worst_at;
      for (double tau : kGridTau) {
        models::ThermoRates rates = models::thermo_rates(levels, nb, tau);
        rates.pool_relax += perturb_f;  // verification hook, normally 0
        const RMatrix pa = models::thermo_transition_entries(rates, levels);
        const RMatrix pw =
            (models::thermo_w_matrix(levels, nb) * tau).exp();
        const models::ThermometryModel m(
            levels, nb, models::ThermoMeasurement::full_energy_basis, tau,
            tau);
        const RMatrix pn = models::thermo_transition_numeric(m).matrix();
        const double dev = std::max((pa - pw).cwiseAbs().maxCoeff(),
                                    (pa - pn).cwiseAbs().maxCoeff());
        if (dev > worst) {
          worst = dev;
          worst_at = "gtau=" + format_g17(tau);
        }
      }
      c.dev = worst;
      c.pass = worst <= 1e-10;
      c.detail = worst_at;
      checks.push_back(std::move(c));
    }
  return checks;
}

std::vector<Check> verify_stationarity() {
  std::vector<Check> checks;
  for (int levels : kGridLevels)
    for (double nb : kGridNbar) {
      Check c;
      c.name = "thermal-stationarity:D=" + std::to_string(levels) +
               ",nbar=" + format_g17(nb);
      const RVector q = models::thermal_distribution(levels, nb);
      double worst = 0.0;
      for (double tau : kGridTau) {
        const models::ThermometryModel m(
            levels, nb, models::ThermoMeasurement::full_energy_basis, tau,
            tau);
        const RMatrix pa = models::thermo_transition_feedback(m).matrix();
        const RMatrix pn = models::thermo_transition_numeric(m).matrix();
        worst = std::max(worst,
                         (pa * q - q).lpNorm<Eigen::Infinity>());
        worst = std::max(worst,
                         (pn * q - q).lpNorm<Eigen::Infinity>());
      }
      c.dev = worst;
      c.pass = worst <= 1e-10;
      checks.push_back(std::move(c));
    }
  return checks;
}

std::vector<Check> verify_oracle(int n_max) {
  std::vector<Check> checks;
  struct Case {
    std::string name;
    fisher::ChainModel model;
    double theta;
  };
  std::vector<Case> cases;
  for (double nb : {0.5, 1.0}) {
    models::ThermometryModel m(2, nb,
                               models::ThermoMeasurement::full_energy_basis,
                               1.0, 1.0);
    cases.push_back({"thermometry:D=2,nbar=" + format_g17(nb),
                     models::thermo_chain_model(m), nb});
  }
  for (double om : {0.2, 1.0}) {
    const models::RabiModel m = models::RabiModel::computational(om, 1.0);
    cases.push_back({"rabi:omega=" + format_g17(om),
                     models::rabi_chain_model(m), om});
  }
  for (auto& cs : cases) {
    Check c;
    c.name = "enumeration-vs-decomposition:" + cs.name;
    fisher::ParamSpec spec{"theta", cs.theta};
    const auto p = cs.model.transition_at(cs.theta);
    const RMatrix dp = fisher::d_theta(
        std::function<RMatrix(double)>([&](double th) {
          return cs.model.transition_at(th).matrix();
        }),
        spec);
    const RVector q0 = cs.model.init_at(cs.theta);
    const RVector dq = fisher::d_theta(
        std::function<RVector(double)>(
            [&](double th) { return cs.model.init_at(th); }),
        spec);
    const double f1 = fisher::fi_of_distribution(q0, dq);
    const double f21 =
        fisher::f_conditional(p, dp, chain::StationaryDistribution(q0)).value;
    double worst = 0.0;
    for (int n = 2; n <= n_max; ++n) {
      const double enumerated = fisher::enumerate_fi(cs.model, spec, n);
      const double decomposed = fisher::f_sequential(f1, f21, n);
      worst = std::max(worst, std::abs(enumerated - decomposed) /
                                  std::max(decomposed, 1e-30));
    }
    c.dev = worst;
    c.pass = worst <= 1e-6;
    c.detail = "relative, n up to " + std::to_string(n_max);
    checks.push_back(std::move(c));
  }
  return checks;
}

std::vector<Check> verify_collision(std::uint64_t seed) {
  Check completeness, match;
  completeness.name = "povm-completeness:100-seeded-collisions";
  match.name = "probability-match-vs-joint:100-seeded-collisions";
  double worst_sum = 0.0, worst_match = 0.0;
  const auto aux_basis = channels::ProjectiveBasis::computational(2);
  for (int t = 0; t < 100; ++t) {
    Rng rng(split_seed(seed, t));
    const CMatrix u = random_unitary(rng, 4);
    const qcore::DensityMatrix rho_c(random_density(rng, 2));
    const qcore::DensityMatrix rho_s(random_density(rng, 2));
    const auto povm = channels::collision_povm(u, rho_c, aux_basis);
    CMatrix sum = CMatrix::Zero(2, 2);
    for (int i = 0; i < povm.n_outcomes(); ++i) sum += povm.effect(i);
    worst_sum = std::max(
        worst_sum, (sum - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    const CMatrix joint =
        u * qcore::kron(rho_s.matrix(), rho_c.matrix()) * u.adjoint();
    for (int i = 0; i < 2; ++i) {
      const double p_sys =
          std::real((rho_s.matrix() * povm.effect(i)).trace());
      const CMatrix proj =
          qcore::kron(CMatrix::Identity(2, 2), aux_basis.projector(i));
      const double p_joint = std::real((joint * proj).trace());
      worst_match = std::max(worst_match, std::abs(p_sys - p_joint));
    }
  }
  completeness.dev = worst_sum;
  completeness.pass = worst_sum <= 1e-12;
  match.dev = worst_match;
  match.pass = worst_match <= 1e-12;
  return {completeness, match};
}

int cmd_verify(const RunConfig& cfg) {
  const std::vector<std::string> known = {"all", "appendix-b", "stationarity",
                                          "oracle", "collision"};
  bool ok_suite = false;
  for (const auto& s : known) ok_suite = ok_suite || (s == cfg.suite);
  if (!ok_suite) throw ConfigError("unknown --suite: " + cfg.suite);
  if (cfg.n_max < 2 || std::pow(2.0, cfg.n_max) > 1e7)
    throw ConfigError("--n-max out of range");

  const bool all = cfg.suite == "all";
  bool all_pass = true;
  Json suites = Json::array();
  if (all || cfg.suite == "appendix-b")
    append_suite(suites, "appendix-b", verify_appendix_b(cfg.perturb_f),
                 &all_pass);
  if (all || cfg.suite == "stationarity")
    append_suite(suites, "stationarity", verify_stationarity(), &all_pass);
  if (all || cfg.suite == "oracle")
    append_suite(suites, "oracle", verify_oracle(cfg.n_max), &all_pass);
  if (all || cfg.suite == "collision")
    append_suite(suites, "collision", verify_collision(cfg.seed), &all_pass);

  Json doc = Json::object();
  doc.set("command", Json::str("verify"));
  doc.set("suite", Json::str(cfg.suite));
  doc.set("all_pass", Json::boolean(all_pass));
  doc.set("suites", std::move(suites));
  write_output(cfg.out, doc.dump());
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------- montecarlo

int cmd_montecarlo(const RunConfig& cfg) {
  if (cfg.mc_traj < 2)
    throw ConfigError("need --n-traj >= 2 (variance is undefined otherwise)");
  if (cfg.mc_n < 2) throw ConfigError("need --n >= 2");
  if (cfg.levels < 2) throw ConfigError("need --levels >= 2");
  if (!(cfg.nbar > 0.0)) throw ConfigError("need --nbar > 0");
  if (!(cfg.bracket_lo < cfg.nbar && cfg.nbar < cfg.bracket_hi))
    throw ConfigError("bracket must contain nbar");

  estimate::MonteCarloConfig mc;
  mc.n = cfg.mc_n;
  mc.n_trajectories = cfg.mc_traj;
  mc.seed = cfg.seed;
  mc.bracket_lo = cfg.bracket_lo;
  mc.bracket_hi = cfg.bracket_hi;
  if (cfg.estimator == "mle") mc.kind = estimate::EstimatorKind::mle;
  else if (cfg.estimator == "inversion")
    mc.kind = estimate::EstimatorKind::transition_inversion;
  else if (cfg.estimator == "ed")
    mc.kind = estimate::EstimatorKind::empirical_distribution;
  else
    throw ConfigError("unknown --estimator (use mle|inversion|ed)");

  double tau = cfg.tau;
  if (!(tau > 0.0)) {
    // Default schedule: the single-τ optimum of the information rate.
    // The grid spans four decades so strongly coupled probes (large D·n̄,
    // optimum at small γτ) stay covered.
    const auto grid = scan::axis_points(
        {"gtau", 0.005, 40.0, 96, scan::Spacing::log});
    const auto best = scan::maximize_1d(
        [&](double t) {
          models::ThermometryModel m(
              cfg.levels, cfg.nbar,
              models::ThermoMeasurement::full_energy_basis, t, t);
          return models::thermo_fi_conditional_analytic(m);
        },
        grid);
    tau = best.argmax[0];
  }

  const models::ThermometryModel m(
      cfg.levels, cfg.nbar, models::ThermoMeasurement::full_energy_basis, tau,
      tau);
  const auto report =
      estimate::monte_carlo(models::thermo_chain_model(m), cfg.nbar, mc);

  Json doc = Json::object();
  doc.set("command", Json::str("montecarlo"));
  doc.set("levels", Json::integer(cfg.levels));
  doc.set("theta0", Json::num(report.theta0));
  doc.set("gtau", Json::num(tau));
  doc.set("estimator", Json::str(estimate::to_string(report.kind)));
  doc.set("n", Json::integer(report.n_per_trajectory));
  doc.set("n_trajectories", Json::integer(report.n_trajectories));
  doc.set("seed", Json::integer(static_cast<std::int64_t>(report.seed)));
  doc.set("mean", Json::num(report.mean));
  doc.set("variance", Json::num(report.variance));
  doc.set("bias", Json::num(report.bias));
  doc.set("fi_conditional", Json::num(report.fi_conditional));
  doc.set("predicted_bound", Json::num(report.predicted_bound));
  doc.set("ratio", Json::num(report.ratio));
  doc.set("failures", Json::integer(report.failures));
  write_output(cfg.out, doc.dump());
  return 0;
}

// ------------------------------------------------------------------- dispatch

int run_impl(const std::vector<std::string>& args) {
  RunConfig cfg;

  // Config file values are applied before parsing, so flags override them.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      apply_config_file(args[i + 1], cfg);
    } else if (args[i].rfind("--config=", 0) == 0) {
      apply_config_file(args[i].substr(9), cfg);
    }
  }

  CLI::App app{"Fisher information rates of sequentially measured probes"};
  app.require_subcommand(1);
  std::string config_path;  // consumed above; declared so CLI11 accepts it

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", cfg.out, "output path (default: stdout)");
    sub->add_option("--format", cfg.format, "csv or json");
    sub->add_option("--seed", cfg.seed, "RNG seed");
  };
  auto add_tau_grid = [&](CLI::App* sub) {
    sub->add_option("--tau-min", cfg.tau_min, "grid start (gamma*tau)");
    sub->add_option("--tau-max", cfg.tau_max, "grid end");
    sub->add_option("--tau-points", cfg.tau_points, "grid size");
    sub->add_option("--tau-log", cfg.tau_log, "log spacing (bool)");
  };

  CLI::App* thermo = app.add_subcommand(
      "thermo-scan", "Information rate vs waiting time, full energy basis");
  thermo->add_option("--levels", cfg.levels, "probe levels D");
  thermo->add_option("--nbar", cfg.nbar, "bath occupation");
  add_tau_grid(thermo);
  add_common(thermo);

  CLI::App* coarse = app.add_subcommand(
      "thermo-coarse", "Same scan with the coarse ground/excited measurement");
  coarse->add_option("--levels", cfg.levels, "probe levels D");
  coarse->add_option("--nbar", cfg.nbar, "bath occupation");
  add_tau_grid(coarse);
  add_common(coarse);

  CLI::App* feedback = app.add_subcommand(
      "thermo-feedback",
      "Optimal schedules: F* (single tau) and F# (outcome-conditioned)");
  feedback->add_option("--levels", cfg.levels, "probe levels D");
  feedback->add_option("--nbar", cfg.nbar, "single occupation point");
  feedback->add_option("--nbar-min", cfg.nbar_min, "sweep start");
  feedback->add_option("--nbar-max", cfg.nbar_max, "sweep end");
  feedback->add_option("--nbar-points", cfg.nbar_points, "sweep size");
  feedback->add_option("--nbar-log", cfg.nbar_log, "sweep log spacing");
  feedback->add_flag("--coarse", cfg.coarse, "coarse measurement");
  add_tau_grid(feedback);
  add_common(feedback);

  CLI::App* rabi = app.add_subcommand(
      "rabi-scan", "Rabi frequency estimation: rate vs waiting time");
  rabi->add_option("--omega", cfg.omega, "Rabi frequency in units of gamma");
  rabi->add_option("--basis", cfg.basis,
                   "computational|sigma-x|sigma-y|bloch:<theta>:<phi>");
  add_tau_grid(rabi);
  add_common(rabi);

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the oracle and identity suites, report JSON");
  verify->add_option("--suite", cfg.suite,
                     "all|appendix-b|stationarity|oracle|collision");
  verify->add_option("--n-max", cfg.n_max, "enumeration length cap");
  verify->add_option("--perturb-f", cfg.perturb_f,
                     "inject a relaxation-factor perturbation (negative "
                     "control hook)");
  add_common(verify);

  CLI::App* mc = app.add_subcommand(
      "montecarlo", "Monte-Carlo check of the Cramer-Rao rate bound");
  mc->add_option("--levels", cfg.levels, "probe levels D");
  mc->add_option("--nbar", cfg.nbar, "true occupation");
  mc->add_option("--tau", cfg.tau, "waiting time (default: optimal)");
  mc->add_option("--estimator", cfg.estimator, "mle|inversion|ed");
  mc->add_option("--n", cfg.mc_n, "outcomes per trajectory");
  mc->add_option("--n-traj", cfg.mc_traj, "number of trajectories");
  mc->add_option("--bracket-lo", cfg.bracket_lo, "estimator bracket low");
  mc->add_option("--bracket-hi", cfg.bracket_hi, "estimator bracket high");
  add_common(mc);

  std::vector<std::string> cli_args(args.rbegin(), args.rend());
  try {
    app.parse(cli_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (rabi->parsed() && !rabi->count("--tau-min") && !rabi->count("--tau-max") &&
      !rabi->count("--tau-points") && !rabi->count("--tau-log") &&
      !cfg.tau_configured) {
    // Rabi default grid: linear on (0, 10].
    cfg.tau_min = 0.05;
    cfg.tau_max = 10.0;
    cfg.tau_log = false;
  }

  if (thermo->parsed()) return cmd_thermo_scan(cfg, false);
  if (coarse->parsed()) return cmd_thermo_scan(cfg, true);
  if (feedback->parsed()) return cmd_thermo_feedback(cfg);
  if (rabi->parsed()) return cmd_rabi_scan(cfg);
  if (verify->parsed()) return cmd_verify(cfg);
  if (mc->parsed()) return cmd_montecarlo(cfg);
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return run_impl(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? argc - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace seqfisher::cli
