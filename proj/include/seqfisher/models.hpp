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

#pragma once

#include "seqfisher/chain.hpp"
#include "seqfisher/channels.hpp"
#include "seqfisher/common.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/qcore.hpp"

namespace seqfisher::models {

// ---------------------------------------------------------------------------
// Thermometry probe: D levels, non-degenerate ground state, (D−1)-fold
// degenerate excited level, relaxing against a bosonic bath with mean
// occupation n̄ (the estimated parameter). Rates in units of γ = 1.
// ---------------------------------------------------------------------------

enum class ThermoMeasurement { full_energy_basis, coarse_grained };

struct ThermometryModel {
  ThermometryModel(int levels, double nbar,
                   ThermoMeasurement measurement =
                       ThermoMeasurement::full_energy_basis,
                   double tau_g = 1.0, double tau_e = 1.0);

  int levels;        // D ≥ 2
  double nbar;       // > 0
  ThermoMeasurement measurement;
  double tau_g;      // γτ after a ground outcome
  double tau_e;      // γτ after an excited outcome
};

/// Closed-form relaxation quantities at one (D, n̄, γτ) point, together
/// with their exact ∂/∂n̄. `pool_relax` is e^{−γτ(Dn̄+1)} (ground vs
/// excited-pool exchange); `level_relax` is e^{−γτ(n̄+1)} (memory of one
/// excited level). `excite_prob` is the ground→pool transition
/// probability, `deexcite_prob` the level→ground one.
struct ThermoRates {
  double tau = 0.0;
  double pool_relax = 0.0;     // f
  double level_relax = 0.0;    // g
  double excite_prob = 0.0;    // x = q_excited·(1−f)
  double deexcite_prob = 0.0;  // y = q_ground·(1−f)
  double q_ground = 0.0, q_excited = 0.0, q_level = 0.0;
  double d_pool_relax = 0.0, d_level_relax = 0.0;
  double d_excite_prob = 0.0, d_deexcite_prob = 0.0;
  double d_q_ground = 0.0, d_q_excited = 0.0, d_q_level = 0.0;
};

ThermoRates thermo_rates(int levels, double nbar, double tau);

/// Thermal occupations (q_ground, q_level, …, q_level).
RVector thermal_distribution(int levels, double nbar);

/// Thermal Fisher information (D−1)/(n̄(1+n̄)(1+Dn̄)²).
double thermal_fi(int levels, double nbar);

/// Classical rate matrix of the populations (columns sum to zero);
/// e^{Wτ} gives the equal-τ transition probabilities.
RMatrix thermo_w_matrix(int levels, double nbar);

/// Full-basis D×D transition entries assembled from rates (the verify
/// suites use this entry point to inject rate perturbations).
RMatrix thermo_transition_entries(const ThermoRates& r, int levels);
RMatrix thermo_transition_derivative(const ThermoRates& r, int levels);
/// Coarse (ground vs excited-subspace) 2×2 variants.
RMatrix thermo_coarse_entries(const ThermoRates& r);
RMatrix thermo_coarse_derivative(const ThermoRates& r);

/// Closed-form transition matrix at a common waiting time, honoring
/// m.measurement (D×D full basis or 2×2 coarse).
chain::TransitionMatrix thermo_transition_analytic(const ThermometryModel& m,
                                                   double tau);

/// Closed-form two-τ feedback chain (column 0 at m.tau_g, others at
/// m.tau_e), honoring m.measurement.
chain::TransitionMatrix thermo_transition_feedback(const ThermometryModel& m);

/// The same chains built through the quantum stack: Lindblad generator of
/// the bath coupling, e^{𝕃τ} propagators and the measure-evolve step.
qcore::Superoperator thermo_liouvillian(int levels, double nbar);
channels::MeasureEvolveStep thermo_step(const ThermometryModel& m);
chain::TransitionMatrix thermo_transition_numeric(const ThermometryModel& m);

/// Fisher report for the full-basis chain with waiting times (tau_g,
/// tau_e). Two routes are always evaluated — closed forms with exact
/// derivatives, and the Liouvillian chain with central differences — and
/// must agree to 1e-6 relative; the analytic values are reported. The
/// stationary law is solved from the chain; for the two-τ chain the
/// closed form in the literature is evaluated only as a cross-check
/// (it matches the per-level q_i, see the report flag).
fisher::FisherReport thermo_fisher(const ThermometryModel& m, double tau_g,
                                   double tau_e);

/// Same for the coarse measurement (2-outcome report). The
/// ground-conditioned value coincides with the full-basis one exactly.
fisher::FisherReport thermo_coarse_fisher(const ThermometryModel& m,
                                          double tau_g, double tau_e);

/// Closed-form-only conditional information rate at the model's waiting
/// times; the fast objective for schedule optimization (no Liouvillian
/// cross-route, which thermo_fisher always runs).
double thermo_fi_conditional_analytic(const ThermometryModel& m);

/// Parameterized chain over n̄ for estimators and the enumeration oracle
/// (closed-form transitions, stationary initial law).
fisher::ChainModel thermo_chain_model(const ThermometryModel& m);

// ---------------------------------------------------------------------------
// Dissipative Rabi qubit: H = Ω·σ_x with decay √γ·σ₋; Ω (in units of γ)
// is the estimated parameter. Projective measurements in a Bloch basis.
// ---------------------------------------------------------------------------

struct RabiModel {
  RabiModel(double omega, double tau, double basis_theta = 0.0,
            double basis_phi = 0.0);

  static RabiModel computational(double omega, double tau);
  static RabiModel sigma_x(double omega, double tau);
  static RabiModel sigma_y(double omega, double tau);

  double omega;  // Ω/γ ≥ 0
  double tau;    // γτ > 0
  double basis_theta, basis_phi;  // Bloch angles of outcome 0
};

qcore::Superoperator rabi_liouvillian(double omega);
channels::ProjectiveBasis rabi_measurement_basis(const RabiModel& m);
chain::TransitionMatrix rabi_transition(const RabiModel& m);

/// Fisher report for estimating Ω; derivatives by central differences on
/// the rebuilt propagator. The reference value is the stationary-law
/// Fisher information (the model has no thermal benchmark).
fisher::FisherReport rabi_fisher(const RabiModel& m);

/// Parameterized chain over Ω.
fisher::ChainModel rabi_chain_model(const RabiModel& m);

}  // namespace seqfisher::models
