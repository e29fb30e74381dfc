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

// End-to-end acceptance harness. Each criterion prints one PASS/FAIL line;
// the process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "seqfisher/chain.hpp"
#include "seqfisher/channels.hpp"
#include "seqfisher/estimate.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/models.hpp"
#include "seqfisher/qcore.hpp"
#include "seqfisher/rng.hpp"
#include "seqfisher/scan.hpp"

using namespace seqfisher;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Harness {
  int failures = 0;

  void run(int id, const std::string& name,
           const std::function<Outcome()>& body,
           double time_limit_s = 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = body();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (time_limit_s > 0.0 && secs > time_limit_s) {
      out.pass = false;
      out.detail += " (exceeded " + std::to_string(time_limit_s) + "s limit)";
    }
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n",
                out.pass ? "PASS" : "FAIL", id, name.c_str(), secs,
                out.detail.empty() ? "" : " — ", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

const std::vector<int> kLevels = {2, 3, 4, 5, 6};
const std::vector<double> kNbars = {0.1, 1.0, 10.0};
const std::vector<double> kTaus = {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0};

// Frozen regression baselines, derived on first run of this suite over the
// default 200-point log grid on [0.05, 20] (criterion 5) and the feedback
// optimization at nbar = 1 (criterion 6).
constexpr double kEnhancementArgmax = 0.323341956566;
constexpr double kEnhancementValue = 3.03937948015;
constexpr double kFeedbackGainD4 = 1.18946093883;

Outcome criterion_appendix_b() {
  Outcome out;
  double worst = 0.0;
  for (int levels : kLevels)
    for (double nbar : kNbars)
      for (double tau : kTaus) {
        const models::ThermometryModel m(
            levels, nbar, models::ThermoMeasurement::full_energy_basis, tau,
            tau);
        const RMatrix pa = models::thermo_transition_analytic(m, tau).matrix();
        const RMatrix pw = (models::thermo_w_matrix(levels, nbar) * tau).exp();
        const RMatrix pn = models::thermo_transition_numeric(m).matrix();
        worst = std::max({worst, (pa - pw).cwiseAbs().maxCoeff(),
                          (pa - pn).cwiseAbs().maxCoeff()});
      }
  out.pass = worst <= 1e-10;
  out.detail = "max entry deviation " + fmt(worst);
  return out;
}

Outcome criterion_stationarity() {
  Outcome out;
  double worst = 0.0;
  for (int levels : kLevels)
    for (double nbar : kNbars) {
      const RVector q = models::thermal_distribution(levels, nbar);
      for (double tau : kTaus) {
        const models::ThermometryModel m(
            levels, nbar, models::ThermoMeasurement::full_energy_basis, tau,
            tau);
        const RMatrix p = models::thermo_transition_analytic(m, tau).matrix();
        worst = std::max(worst, (p * q - q).lpNorm<Eigen::Infinity>());
      }
    }
  out.pass = worst <= 1e-10;
  out.detail = "max |q - Pq| " + fmt(worst);
  return out;
}

Outcome criterion_iid_limit() {
  Outcome out;
  const double spot2 = models::thermal_fi(2, 1.0);
  const double spot4 = models::thermal_fi(4, 1.0);
  out.pass = std::abs(spot2 - 1.0 / 18.0) < 1e-15 &&
             std::abs(spot4 - 0.06) < 1e-15;
  double worst = 0.0;
  for (int levels : {2, 4}) {
    const models::ThermometryModel m(levels, 1.0);
    const auto rep = models::thermo_fisher(m, 30.0, 30.0);
    worst = std::max(worst, std::abs(rep.fi_conditional /
                                         models::thermal_fi(levels, 1.0) -
                                     1.0));
  }
  out.pass = out.pass && worst <= 1e-6;
  out.detail = "max |F21/Fth - 1| at gtau=30: " + fmt(worst);
  return out;
}

Outcome criterion_decomposition_oracle() {
  Outcome out;
  double worst = 0.0;
  struct Case {
    fisher::ChainModel model;
    double theta;
  };
  std::vector<Case> cases;
  for (double nbar : {0.5, 1.0}) {
    const models::ThermometryModel m(
        2, nbar, models::ThermoMeasurement::full_energy_basis, 1.0, 1.0);
    cases.push_back({models::thermo_chain_model(m), nbar});
  }
  for (double omega : {0.2, 1.0}) {
    const auto m = models::RabiModel::computational(omega, 1.0);
    cases.push_back({models::rabi_chain_model(m), omega});
  }
  for (auto& cs : cases) {
    const fisher::ChainModel& model = cs.model;
    const double theta = cs.theta;
    fisher::ParamSpec spec{"theta", theta};
    const auto p = model.transition_at(theta);
    const RMatrix dp = fisher::d_theta(
        std::function<RMatrix(double)>(
            [&](double th) { return model.transition_at(th).matrix(); }),
        spec);
    const RVector q0 = model.init_at(theta);
    const RVector dq = fisher::d_theta(
        std::function<RVector(double)>(
            [&](double th) { return model.init_at(th); }),
        spec);
    const double f1 = fisher::fi_of_distribution(q0, dq);
    const double f21 =
        fisher::f_conditional(p, dp, chain::StationaryDistribution(q0)).value;
    for (int n = 2; n <= 8; ++n) {
      const double enumerated = fisher::enumerate_fi(model, spec, n);
      const double decomposed = fisher::f_sequential(f1, f21, n);
      worst = std::max(worst,
                       std::abs(enumerated - decomposed) / decomposed);
    }
  }
  out.pass = worst <= 1e-6;
  out.detail = "max relative deviation " + fmt(worst);
  return out;
}

Outcome criterion_enhancement_region() {
  Outcome out;
  const double fth = models::thermal_fi(4, 1.0);
  const auto grid =
      scan::axis_points({"gtau", 0.05, 20.0, 200, scan::Spacing::log});
  double best = 0.0, best_tau = 0.0;
  for (double t : grid) {
    const models::ThermometryModel m(4, 1.0);
    const double ratio = models::thermo_fisher(m, t, t).fi_conditional / fth;
    if (ratio > best) {
      best = ratio;
      best_tau = t;
    }
  }
  out.pass = best > 1.0;
  out.detail = "grid max F21/Fth = " + fmt(best) + " at gtau = " +
               fmt(best_tau);
  if (kEnhancementValue > 0.0) {
    const bool match =
        std::abs(best - kEnhancementValue) <= 1e-6 * kEnhancementValue &&
        std::abs(best_tau - kEnhancementArgmax) <= 1e-6 * kEnhancementArgmax;
    out.pass = out.pass && match;
    if (!match) out.detail += " (regression baseline mismatch)";
  } else {
    out.detail += " [baseline not yet frozen]";
  }
  return out;
}

struct FeedbackOptimum {
  double f_star = 0.0, tau_star = 0.0, f_sharp = 0.0;
};

FeedbackOptimum optimize_feedback(int levels, double nbar) {
  auto objective = [&](double tg, double te) {
    return models::thermo_fi_conditional_analytic(models::ThermometryModel(
        levels, nbar, models::ThermoMeasurement::full_energy_basis, tg, te));
  };
  const auto grid =
      scan::axis_points({"gtau", 0.01, 40.0, 48, scan::Spacing::log});
  FeedbackOptimum opt;
  const auto best1d =
      scan::maximize_1d([&](double t) { return objective(t, t); }, grid);
  opt.f_star = best1d.value;
  opt.tau_star = best1d.argmax[0];
  std::vector<double> grid2;
  for (std::size_t i = 0; i < grid.size(); i += 2) grid2.push_back(grid[i]);
  grid2.push_back(opt.tau_star);
  opt.f_sharp = scan::maximize_2d(objective, grid2, grid2).value;
  return opt;
}

Outcome criterion_feedback_dominance() {
  Outcome out;
  std::vector<double> gains_at_unit_nbar;
  for (int levels : {3, 4, 5, 6}) {
    for (double nbar : {0.3, 1.0, 3.0}) {
      const auto opt = optimize_feedback(levels, nbar);
      const double fth = models::thermal_fi(levels, nbar);
      if (!(opt.f_sharp >= opt.f_star - 1e-10) ||
          !(opt.f_star >= fth * (1.0 - 1e-9))) {
        out.pass = false;
        out.detail += " violated at D=" + std::to_string(levels) +
                      ",nbar=" + fmt(nbar);
      }
      if (nbar == 1.0) gains_at_unit_nbar.push_back(opt.f_sharp / opt.f_star);
    }
  }
  for (std::size_t i = 1; i < gains_at_unit_nbar.size(); ++i)
    if (gains_at_unit_nbar[i] < gains_at_unit_nbar[i - 1] - 1e-9) {
      out.pass = false;
      out.detail += " gain not monotone in D";
    }
  std::string gains = "F#/F* at nbar=1, D=3..6:";
  for (double g : gains_at_unit_nbar) gains += " " + fmt(g);
  out.detail = gains + out.detail;
  if (kFeedbackGainD4 > 0.0) {
    const bool match = std::abs(gains_at_unit_nbar[1] - kFeedbackGainD4) <=
                       1e-6 * kFeedbackGainD4;
    out.pass = out.pass && match;
    if (!match) out.detail += " (regression baseline mismatch)";
  } else {
    out.detail += " [baseline not yet frozen]";
  }
  return out;
}

Outcome criterion_coarse_grained() {
  Outcome out;
  double worst_eq = 0.0;
  for (int levels : {3, 4, 6})
    for (double nbar : {0.1, 1.0})
      for (double tau : kTaus) {
        const models::ThermometryModel m(levels, nbar);
        const auto full = models::thermo_fisher(m, tau, tau);
        const auto coarse = models::thermo_coarse_fisher(m, tau, tau);
        worst_eq = std::max(
            worst_eq,
            std::abs(full.fi_by_previous[0] - coarse.fi_by_previous[0]) /
                std::max(1.0, full.fi_by_previous[0]));
        // Aggregating outcomes can only lose information (1e-11 guard for
        // the saturated long-time tail, where the two sides coincide).
        if (coarse.fi_conditional >
            full.fi_conditional * (1.0 + 1e-11)) {
          out.pass = false;
          out.detail += " data-processing violated at D=" +
                        std::to_string(levels) + ",gtau=" + fmt(tau);
        }
      }
  if (worst_eq > 1e-12) {
    out.pass = false;
    out.detail += " ground-conditioned mismatch " + fmt(worst_eq);
  }
  const double fth = models::thermal_fi(4, 0.1);
  for (double tau : kTaus) {
    const models::ThermometryModel m(4, 0.1);
    const auto rep = models::thermo_coarse_fisher(m, tau, tau);
    if (rep.fi_by_previous[1] > fth * (1.0 + 1e-11)) {
      out.pass = false;
      out.detail += " excited-conditioned beats thermal at gtau=" + fmt(tau);
    }
  }
  if (out.pass)
    out.detail = "ground-conditioned equality within " + fmt(worst_eq);
  return out;
}

Outcome criterion_rabi() {
  Outcome out;
  auto max_imag = [](double omega) {
    double m = 0.0;
    for (const auto& e : qcore::spectrum(models::rabi_liouvillian(omega)))
      m = std::max(m, std::abs(e.imag()));
    return m;
  };
  if (max_imag(0.05) > 1e-10) {
    out.pass = false;
    out.detail += " spectrum not real at omega=0.05;";
  }
  if (max_imag(1.0) < 1e-3) {
    out.pass = false;
    out.detail += " no complex pair at omega=1;";
  }
  // Bracket the oscillatory threshold by bisection on the indicator.
  double lo = 0.05, hi = 1.0;
  for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    (max_imag(mid) > 1e-7 ? hi : lo) = mid;
  }
  const double threshold = 0.5 * (lo + hi);
  if (std::abs(threshold - 0.125) > 0.01) {
    out.pass = false;
    out.detail += " threshold " + fmt(threshold) + " not at 1/8;";
  }
  for (double tau : {0.5, 1.0, 2.0, 5.0}) {
    const auto rep = models::rabi_fisher(models::RabiModel::sigma_x(1.0, tau));
    if (rep.fi_conditional > 1e-10) {
      out.pass = false;
      out.detail += " sigma_x information leak at gtau=" + fmt(tau) + ";";
    }
  }
  const auto grid =
      scan::axis_points({"gtau", 0.05, 10.0, 250, scan::Spacing::linear});
  std::vector<double> vals;
  for (double t : grid)
    vals.push_back(
        models::rabi_fisher(models::RabiModel::computational(1.0, t))
            .fi_conditional);
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < vals.size(); ++i)
    if (vals[i] > vals[i - 1] && vals[i] > vals[i + 1]) ++maxima;
  if (maxima < 2) {
    out.pass = false;
    out.detail += " only " + std::to_string(maxima) + " local maxima;";
  }
  if (out.pass)
    out.detail = "threshold at " + fmt(threshold) + ", " +
                 std::to_string(maxima) + " local maxima on (0,10]";
  return out;
}

Outcome criterion_collision() {
  Outcome out;
  const auto aux = channels::ProjectiveBasis::computational(2);
  double worst_sum = 0.0, worst_match = 0.0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(split_seed(2026, t));
    const CMatrix u = random_unitary(rng, 4);
    const qcore::DensityMatrix rho_c(random_density(rng, 2));
    const qcore::DensityMatrix rho_s(random_density(rng, 2));
    const auto povm = channels::collision_povm(u, rho_c, aux);
    CMatrix sum = CMatrix::Zero(2, 2);
    for (int i = 0; i < povm.n_outcomes(); ++i) sum += povm.effect(i);
    worst_sum = std::max(
        worst_sum, (sum - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    const CMatrix joint =
        u * qcore::kron(rho_s.matrix(), rho_c.matrix()) * u.adjoint();
    for (int i = 0; i < 2; ++i) {
      const double p_sys =
          std::real((rho_s.matrix() * povm.effect(i)).trace());
      const double p_joint = std::real(
          (joint * qcore::kron(CMatrix::Identity(2, 2), aux.projector(i)))
              .trace());
      worst_match = std::max(worst_match, std::abs(p_sys - p_joint));
    }
  }
  out.pass = worst_sum <= 1e-12 && worst_match <= 1e-12;
  out.detail = "completeness " + fmt(worst_sum) + ", probability match " +
               fmt(worst_match);
  return out;
}

Outcome criterion_monte_carlo() {
  Outcome out;
  // Optimal single-τ schedule for D=2, nbar=1.
  const auto grid =
      scan::axis_points({"gtau", 0.05, 30.0, 64, scan::Spacing::log});
  const auto best = scan::maximize_1d(
      [&](double t) {
        return models::thermo_fi_conditional_analytic(
            models::ThermometryModel(
                2, 1.0, models::ThermoMeasurement::full_energy_basis, t, t));
      },
      grid);
  const models::ThermometryModel m(
      2, 1.0, models::ThermoMeasurement::full_energy_basis, best.argmax[0],
      best.argmax[0]);
  const auto model = models::thermo_chain_model(m);

  estimate::MonteCarloConfig cfg;
  cfg.n = 10000;
  cfg.n_trajectories = 500;
  cfg.seed = 1;
  cfg.bracket_lo = 0.3;
  cfg.bracket_hi = 3.0;

  cfg.kind = estimate::EstimatorKind::mle;
  const auto mle_rep = estimate::monte_carlo(model, 1.0, cfg);
  if (!(mle_rep.ratio >= 0.9 && mle_rep.ratio <= 1.1)) {
    out.pass = false;
    out.detail += " MLE ratio " + fmt(mle_rep.ratio) + " outside [0.9,1.1];";
  }
  const double floor = 1.0 - 3.0 * std::sqrt(2.0 / (500.0 - 1.0));
  std::string ratios = "ratios(mle,inv,ed):";
  ratios += " " + fmt(mle_rep.ratio);
  for (auto kind : {estimate::EstimatorKind::transition_inversion,
                    estimate::EstimatorKind::empirical_distribution}) {
    cfg.kind = kind;
    const auto rep = estimate::monte_carlo(model, 1.0, cfg);
    ratios += " " + fmt(rep.ratio);
    if (rep.ratio < floor) {
      out.pass = false;
      out.detail += " " + estimate::to_string(kind) + " beats the bound (" +
                    fmt(rep.ratio) + " < " + fmt(floor) + ");";
    }
  }
  out.detail = ratios + " at gtau=" + fmt(best.argmax[0]) + out.detail;
  return out;
}

}  // namespace

int main() {
  Harness h;
  h.run(1, "analytic transitions match exp(W tau) and the Liouvillian chain",
        criterion_appendix_b, 10.0);
  h.run(2, "thermal law is stationary at finite waiting times",
        criterion_stationarity);
  h.run(3, "long-time information rate reaches the thermal value",
        criterion_iid_limit);
  h.run(4, "enumeration oracle matches the order-1 decomposition",
        criterion_decomposition_oracle, 60.0);
  h.run(5, "partial thermalization beats the thermal information (D=4)",
        criterion_enhancement_region);
  h.run(6, "feedback schedules dominate, with gain growing in D",
        criterion_feedback_dominance);
  h.run(7, "coarse measurements: ground equality and data-processing",
        criterion_coarse_grained);
  h.run(8, "Rabi spectral criticality at omega/gamma = 1/8 and basis facts",
        criterion_rabi);
  h.run(9, "collision POVM reproduces joint-evolution statistics",
        criterion_collision);
  h.run(10, "Monte-Carlo estimators respect the Cramer-Rao rate bound",
        criterion_monte_carlo, 300.0);
  if (h.failures > 0) {
    std::printf("%d criterion(s) FAILED\n", h.failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
