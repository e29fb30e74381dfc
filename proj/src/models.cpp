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

#include "seqfisher/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace seqfisher::models {

namespace {

constexpr double kRouteRelTol = 1e-6;

// Relative agreement with an absolute floor, so schedules where both
// routes give an exactly vanishing rate (e.g. tau_g = 0) still agree.
bool routes_agree(double a, double b) {
  return std::abs(a - b) <= kRouteRelTol * std::max(std::abs(a), std::abs(b)) + 1e-12;
}

std::string format_sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

ThermometryModel::ThermometryModel(int levels_in, double nbar_in,
                                   ThermoMeasurement measurement_in,
                                   double tau_g_in, double tau_e_in)
    : levels(levels_in),
      nbar(nbar_in),
      measurement(measurement_in),
      tau_g(tau_g_in),
      tau_e(tau_e_in) {
  if (levels < 2)
    throw DimensionError("ThermometryModel: need at least 2 levels");
  if (!(nbar > 0.0) || !std::isfinite(nbar))
    throw DimensionError("ThermometryModel: nbar must be positive");
  if (!(tau_g >= 0.0) || !(tau_e >= 0.0) || !std::isfinite(tau_g) ||
      !std::isfinite(tau_e))
    throw DimensionError("ThermometryModel: waiting times must be >= 0");
}

ThermoRates thermo_rates(int levels, double nbar, double tau) {
  if (levels < 2 || !(nbar > 0.0) || !(tau >= 0.0))
    throw DimensionError("thermo_rates: invalid (levels, nbar, tau)");
  const double d = static_cast<double>(levels);
  const double den = 1.0 + d * nbar;
  ThermoRates r;
  r.tau = tau;
  r.q_ground = (1.0 + nbar) / den;
  r.q_excited = 1.0 - r.q_ground;
  r.q_level = nbar / den;
  r.d_q_ground = (1.0 - d) / (den * den);
  r.d_q_excited = (d - 1.0) / (den * den);
  r.d_q_level = 1.0 / (den * den);
  r.pool_relax = std::exp(-tau * (d * nbar + 1.0));
  r.level_relax = std::exp(-tau * (nbar + 1.0));
  r.d_pool_relax = -tau * d * r.pool_relax;
  r.d_level_relax = -tau * r.level_relax;
  r.excite_prob = r.q_excited * (1.0 - r.pool_relax);
  r.deexcite_prob = r.q_ground * (1.0 - r.pool_relax);
  r.d_excite_prob =
      r.d_q_excited * (1.0 - r.pool_relax) - r.q_excited * r.d_pool_relax;
  r.d_deexcite_prob =
      r.d_q_ground * (1.0 - r.pool_relax) - r.q_ground * r.d_pool_relax;
  return r;
}

RVector thermal_distribution(int levels, double nbar) {
  const ThermoRates r = thermo_rates(levels, nbar, 0.0);
  RVector q(levels);
  q[0] = r.q_ground;
  for (int i = 1; i < levels; ++i) q[i] = r.q_level;
  return q;
}

double thermal_fi(int levels, double nbar) {
  if (levels < 2 || !(nbar > 0.0))
    throw DimensionError("thermal_fi: invalid (levels, nbar)");
  const double d = static_cast<double>(levels);
  const double den = 1.0 + d * nbar;
  return (d - 1.0) / (nbar * (1.0 + nbar) * den * den);
}

RMatrix thermo_w_matrix(int levels, double nbar) {
  if (levels < 2 || !(nbar > 0.0))
    throw DimensionError("thermo_w_matrix: invalid (levels, nbar)");
  RMatrix w = RMatrix::Zero(levels, levels);
  w(0, 0) = -(levels - 1.0) * nbar;
  for (int i = 1; i < levels; ++i) {
    w(0, i) = nbar + 1.0;
    w(i, 0) = nbar;
    w(i, i) = -(nbar + 1.0);
  }
  return w;
}

RMatrix thermo_transition_entries(const ThermoRates& r, int levels) {
  // Rebuilt from the relaxation factors (not the cached transition
  // probabilities) so that injected rate perturbations propagate.
  const double f = r.pool_relax, g = r.level_relax;
  const double x = r.q_excited * (1.0 - f);
  const double y = r.q_ground * (1.0 - f);
  RMatrix p = RMatrix::Zero(levels, levels);
  p(0, 0) = 1.0 - x;
  const double cross = (x + f - g) / (levels - 1.0);
  for (int i = 1; i < levels; ++i) {
    p(i, 0) = x / (levels - 1.0);
    p(0, i) = y;
    for (int j = 1; j < levels; ++j) p(i, j) = cross;
    p(i, i) = g + cross;
  }
  return p;
}

RMatrix thermo_transition_derivative(const ThermoRates& r, int levels) {
  const double dx = r.d_excite_prob, dy = r.d_deexcite_prob;
  const double dcross =
      (dx + r.d_pool_relax - r.d_level_relax) / (levels - 1.0);
  RMatrix dp = RMatrix::Zero(levels, levels);
  dp(0, 0) = -dx;
  for (int i = 1; i < levels; ++i) {
    dp(i, 0) = dx / (levels - 1.0);
    dp(0, i) = dy;
    for (int j = 1; j < levels; ++j) dp(i, j) = dcross;
    dp(i, i) = r.d_level_relax + dcross;
  }
  return dp;
}

RMatrix thermo_coarse_entries(const ThermoRates& r) {
  const double x = r.q_excited * (1.0 - r.pool_relax);
  const double y = r.q_ground * (1.0 - r.pool_relax);
  RMatrix p(2, 2);
  p << 1.0 - x, y, x, 1.0 - y;
  return p;
}

RMatrix thermo_coarse_derivative(const ThermoRates& r) {
  RMatrix dp(2, 2);
  dp << -r.d_excite_prob, r.d_deexcite_prob, r.d_excite_prob,
      -r.d_deexcite_prob;
  return dp;
}

namespace {

RMatrix feedback_entries(const ThermometryModel& m, bool derivative) {
  const ThermoRates rg = thermo_rates(m.levels, m.nbar, m.tau_g);
  const ThermoRates re = thermo_rates(m.levels, m.nbar, m.tau_e);
  const bool coarse = m.measurement == ThermoMeasurement::coarse_grained;
  const RMatrix from_g =
      coarse ? (derivative ? thermo_coarse_derivative(rg)
                           : thermo_coarse_entries(rg))
             : (derivative ? thermo_transition_derivative(rg, m.levels)
                           : thermo_transition_entries(rg, m.levels));
  RMatrix out = coarse
                    ? (derivative ? thermo_coarse_derivative(re)
                                  : thermo_coarse_entries(re))
                    : (derivative
                           ? thermo_transition_derivative(re, m.levels)
                           : thermo_transition_entries(re, m.levels));
  out.col(0) = from_g.col(0);
  return out;
}

RVector feedback_waiting_times(const ThermometryModel& m, int n_outcomes) {
  RVector taus = RVector::Constant(n_outcomes, m.tau_e);
  taus[0] = m.tau_g;
  return taus;
}

}  // namespace

chain::TransitionMatrix thermo_transition_analytic(const ThermometryModel& m,
                                                   double tau) {
  ThermometryModel mm(m.levels, m.nbar, m.measurement, tau, tau);
  return thermo_transition_feedback(mm);
}

chain::TransitionMatrix thermo_transition_feedback(const ThermometryModel& m) {
  const bool coarse = m.measurement == ThermoMeasurement::coarse_grained;
  const int n = coarse ? 2 : m.levels;
  return chain::TransitionMatrix(feedback_entries(m, false),
                                 feedback_waiting_times(m, n));
}

qcore::Superoperator thermo_liouvillian(int levels, double nbar) {
  if (levels < 2 || !(nbar > 0.0))
    throw DimensionError("thermo_liouvillian: invalid (levels, nbar)");
  std::vector<qcore::Jump> jumps;
  jumps.reserve(2 * (levels - 1));
  for (int i = 1; i < levels; ++i) {
    CMatrix down = CMatrix::Zero(levels, levels);
    down(0, i) = 1.0;  // |e_0⟩⟨e_i|
    CMatrix up = CMatrix::Zero(levels, levels);
    up(i, 0) = 1.0;  // |e_i⟩⟨e_0|
    jumps.push_back({1.0 + nbar, std::move(down)});
    jumps.push_back({nbar, std::move(up)});
  }
  return qcore::liouvillian(qcore::HamiltonianSpec::zero(levels), jumps);
}

channels::MeasureEvolveStep thermo_step(const ThermometryModel& m) {
  const auto gen = thermo_liouvillian(m.levels, m.nbar);
  const auto prop_g = qcore::propagate(gen, m.tau_g);
  const auto prop_e = qcore::propagate(gen, m.tau_e);
  if (m.measurement == ThermoMeasurement::full_energy_basis) {
    std::vector<qcore::Superoperator> props;
    std::vector<double> taus;
    props.push_back(prop_g);
    taus.push_back(m.tau_g);
    for (int i = 1; i < m.levels; ++i) {
      props.push_back(prop_e);
      taus.push_back(m.tau_e);
    }
    return channels::MeasureEvolveStep(
        channels::ProjectiveBasis::computational(m.levels), std::move(props),
        std::move(taus));
  }
  CMatrix e0 = CMatrix::Zero(m.levels, m.levels);
  e0(0, 0) = 1.0;
  CMatrix e1 = CMatrix::Identity(m.levels, m.levels) - e0;
  return channels::MeasureEvolveStep(
      channels::Povm({std::move(e0), std::move(e1)}), {prop_g, prop_e},
      {m.tau_g, m.tau_e});
}

chain::TransitionMatrix thermo_transition_numeric(const ThermometryModel& m) {
  return chain::transition_matrix(thermo_step(m));
}

namespace {

struct RouteResult {
  fisher::ConditionalFisher cond;
  double fi_stationary = 0.0;
  RVector q;
};

RouteResult analytic_route(const ThermometryModel& m) {
  RouteResult r;
  const chain::TransitionMatrix p = thermo_transition_feedback(m);
  const RMatrix dp = feedback_entries(m, true);
  const auto q = chain::stationary(p);
  r.q = q.probabilities();
  fisher::ParamSpec spec{"nbar", m.nbar};
  const RVector dq = fisher::d_theta(
      std::function<RVector(double)>([&](double nb) {
        ThermometryModel mm(m.levels, nb, m.measurement, m.tau_g, m.tau_e);
        return chain::stationary(thermo_transition_feedback(mm))
            .probabilities();
      }),
      spec);
  r.cond = fisher::f_conditional(p, dp, q);
  r.fi_stationary = fisher::fi_of_distribution(r.q, dq, &r.cond.flags);
  return r;
}

RouteResult numeric_route(const ThermometryModel& m) {
  RouteResult r;
  const chain::TransitionMatrix p = thermo_transition_numeric(m);
  fisher::ParamSpec spec{"nbar", m.nbar};
  const RMatrix dp = fisher::d_theta(
      std::function<RMatrix(double)>([&](double nb) {
        ThermometryModel mm(m.levels, nb, m.measurement, m.tau_g, m.tau_e);
        return thermo_transition_numeric(mm).matrix();
      }),
      spec);
  const auto q = chain::stationary(p);
  r.q = q.probabilities();
  const RVector dq = fisher::d_theta(
      std::function<RVector(double)>([&](double nb) {
        ThermometryModel mm(m.levels, nb, m.measurement, m.tau_g, m.tau_e);
        return chain::stationary(thermo_transition_numeric(mm))
            .probabilities();
      }),
      spec);
  r.cond = fisher::f_conditional(p, dp, q);
  r.fi_stationary = fisher::fi_of_distribution(r.q, dq, &r.cond.flags);
  return r;
}

fisher::FisherReport thermo_fisher_impl(const ThermometryModel& m0,
                                        double tau_g, double tau_e,
                                        ThermoMeasurement meas) {
  const ThermometryModel m(m0.levels, m0.nbar, meas, tau_g, tau_e);
  const RouteResult a = analytic_route(m);
  const RouteResult n = numeric_route(m);

  if (!routes_agree(a.cond.value, n.cond.value) ||
      !routes_agree(a.fi_stationary, n.fi_stationary))
    throw NumericError(
        "thermo_fisher: analytic and numeric routes disagree: conditional " +
        std::to_string(a.cond.value) + " vs " + std::to_string(n.cond.value));
  for (Eigen::Index k = 0; k < a.cond.by_previous.size(); ++k)
    if (!routes_agree(a.cond.by_previous[k], n.cond.by_previous[k]))
      throw NumericError("thermo_fisher: routes disagree on column " +
                         std::to_string(k));

  fisher::FisherReport rep;
  rep.param_name = "nbar";
  rep.theta = m.nbar;
  const int n_out = a.q.size();
  rep.tau_schedule = feedback_waiting_times(m, n_out);
  rep.fi_stationary = a.fi_stationary;
  rep.fi_conditional = a.cond.value;
  rep.fi_by_previous = a.cond.by_previous;
  rep.stationary_q = a.q;
  rep.fi_reference = thermal_fi(m.levels, m.nbar);
  rep.flags = a.cond.flags;

  // Cross-checks on the stationary law: the 2-block reduction, and the
  // literature closed form for the feedback chain. The latter equals the
  // per-level probability (at equal times its limit is n̄/(1+Dn̄), the
  // thermal per-level value), so it is compared against q[1], not q[0].
  const ThermoRates rg = thermo_rates(m.levels, m.nbar, tau_g);
  const ThermoRates re = thermo_rates(m.levels, m.nbar, tau_e);
  const double block_sum = rg.excite_prob + re.deexcite_prob;
  if (block_sum > 0.0) {
    const double pi_ground = re.deexcite_prob / block_sum;
    if (std::abs(pi_ground - a.q[0]) > 1e-10)
      throw NumericError("thermo_fisher: stationary solve deviates from the "
                         "two-block closed form");
    if (tau_g != tau_e) {
      const double dd = static_cast<double>(m.levels);
      const double nb = m.nbar;
      const double closed_form_qi =
          (1.0 - rg.pool_relax) * nb /
          (1.0 + dd * nb * (1.0 - rg.pool_relax) + rg.pool_relax * nb -
           (1.0 + nb) * re.pool_relax);
      const double qi_numeric =
          (meas == ThermoMeasurement::full_energy_basis)
              ? a.q[1]
              : a.q[1] / (dd - 1.0);
      rep.flags.push_back("feedback-steady-state-closed-form-is-q-level:dev=" +
                          format_sci(std::abs(closed_form_qi - qi_numeric)));
    }
  }
  return rep;
}

}  // namespace

fisher::FisherReport thermo_fisher(const ThermometryModel& m, double tau_g,
                                   double tau_e) {
  return thermo_fisher_impl(m, tau_g, tau_e,
                            ThermoMeasurement::full_energy_basis);
}

fisher::FisherReport thermo_coarse_fisher(const ThermometryModel& m,
                                          double tau_g, double tau_e) {
  return thermo_fisher_impl(m, tau_g, tau_e,
                            ThermoMeasurement::coarse_grained);
}

double thermo_fi_conditional_analytic(const ThermometryModel& m) {
  const chain::TransitionMatrix p = thermo_transition_feedback(m);
  const RMatrix dp = feedback_entries(m, true);
  return fisher::f_conditional(p, dp, chain::stationary(p)).value;
}

fisher::ChainModel thermo_chain_model(const ThermometryModel& m) {
  fisher::ChainModel model;
  model.transition_at = [m](double nb) {
    ThermometryModel mm(m.levels, nb, m.measurement, m.tau_g, m.tau_e);
    return thermo_transition_feedback(mm);
  };
  model.init_at = [m](double nb) {
    ThermometryModel mm(m.levels, nb, m.measurement, m.tau_g, m.tau_e);
    return chain::stationary(thermo_transition_feedback(mm)).probabilities();
  };
  return model;
}

RabiModel::RabiModel(double omega_in, double tau_in, double basis_theta_in,
                     double basis_phi_in)
    : omega(omega_in),
      tau(tau_in),
      basis_theta(basis_theta_in),
      basis_phi(basis_phi_in) {
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw DimensionError("RabiModel: omega must be >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw DimensionError("RabiModel: tau must be positive");
}

RabiModel RabiModel::computational(double omega, double tau) {
  return RabiModel(omega, tau, 0.0, 0.0);
}

RabiModel RabiModel::sigma_x(double omega, double tau) {
  return RabiModel(omega, tau, std::numbers::pi / 2.0, 0.0);
}

RabiModel RabiModel::sigma_y(double omega, double tau) {
  return RabiModel(omega, tau, std::numbers::pi / 2.0, std::numbers::pi / 2.0);
}

qcore::Superoperator rabi_liouvillian(double omega) {
  CMatrix sx(2, 2), sm(2, 2);
  sx << 0, 1, 1, 0;
  sm << 0, 1, 0, 0;  // lowers |1⟩ → |0⟩
  return qcore::liouvillian(qcore::HamiltonianSpec(omega * sx),
                            {{1.0, std::move(sm)}});
}

channels::ProjectiveBasis rabi_measurement_basis(const RabiModel& m) {
  return channels::ProjectiveBasis::bloch(m.basis_theta, m.basis_phi);
}

chain::TransitionMatrix rabi_transition(const RabiModel& m) {
  const auto prop = qcore::propagate(rabi_liouvillian(m.omega), m.tau);
  channels::MeasureEvolveStep step(rabi_measurement_basis(m), {prop, prop},
                                   {m.tau, m.tau});
  return chain::transition_matrix(step);
}

fisher::FisherReport rabi_fisher(const RabiModel& m) {
  const chain::TransitionMatrix p = rabi_transition(m);
  fisher::ParamSpec spec{"omega", m.omega};
  const RMatrix dp = fisher::d_theta(
      std::function<RMatrix(double)>([&](double om) {
        return rabi_transition(RabiModel(om, m.tau, m.basis_theta,
                                         m.basis_phi))
            .matrix();
      }),
      spec);
  const auto q = chain::stationary(p);
  const RVector dq = fisher::d_theta(
      std::function<RVector(double)>([&](double om) {
        return chain::stationary(rabi_transition(RabiModel(
                                     om, m.tau, m.basis_theta, m.basis_phi)))
            .probabilities();
      }),
      spec);

  fisher::FisherReport rep;
  rep.param_name = "omega";
  rep.theta = m.omega;
  rep.tau_schedule = RVector::Constant(2, m.tau);
  auto cond = fisher::f_conditional(p, dp, q);
  rep.fi_stationary =
      fisher::fi_of_distribution(q.probabilities(), dq, &cond.flags);
  rep.fi_conditional = cond.value;
  rep.fi_by_previous = cond.by_previous;
  rep.stationary_q = q.probabilities();
  rep.fi_reference = rep.fi_stationary;
  rep.flags = std::move(cond.flags);
  return rep;
}

fisher::ChainModel rabi_chain_model(const RabiModel& m) {
  fisher::ChainModel model;
  model.transition_at = [m](double om) {
    return rabi_transition(RabiModel(om, m.tau, m.basis_theta, m.basis_phi));
  };
  model.init_at = [m](double om) {
    return chain::stationary(
               rabi_transition(RabiModel(om, m.tau, m.basis_theta,
                                         m.basis_phi)))
        .probabilities();
  };
  return model;
}

}  // namespace seqfisher::models
