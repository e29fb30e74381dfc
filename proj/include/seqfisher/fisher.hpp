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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqfisher/chain.hpp"
#include "seqfisher/common.hpp"

namespace seqfisher::fisher {

/// Probability floor below which a term is treated as impossible.
inline constexpr double kProbFloor = 1e-12;
/// Derivative magnitude below which a floored term contributes nothing.
inline constexpr double kDerivFloor = 1e-8;

enum class DerivativeMode { central, analytic_if_available };

/// The estimated parameter and how to differentiate against it.
struct ParamSpec {
  std::string name;
  double value = 0.0;
  double rel_step = 1e-5;  // relative step h; actual δ = h·max(|value|,1)
  DerivativeMode mode = DerivativeMode::central;

  double delta() const { return rel_step * std::max(std::abs(value), 1.0); }
};

/// Central difference [f(θ+δ)−f(θ−δ)]/(2δ) for scalar, vector and matrix
/// valued maps. Non-finite evaluations raise NumericError.
double d_theta(const std::function<double(double)>& f, const ParamSpec& p);
RVector d_theta(const std::function<RVector(double)>& f, const ParamSpec& p);
RMatrix d_theta(const std::function<RMatrix(double)>& f, const ParamSpec& p);

/// Σ_k (dp_k)²/p_k over outcomes with p_k above the floor. A term with
/// p ≤ floor but |dp| > kDerivFloor is a genuine near-divergence: it is
/// evaluated with the floored probability and flagged, never NaN/∞.
double fi_of_distribution(const RVector& p, const RVector& dp,
                          std::vector<std::string>* flags = nullptr);

/// Per-previous-outcome Fisher information of the transition columns and
/// its stationary-weighted average (a convex combination by construction).
struct ConditionalFisher {
  RVector by_previous;  // one value per previous outcome k'
  double value = 0.0;   // Σ_k' q_k' · by_previous[k']
  std::vector<std::string> flags;
};

ConditionalFisher f_conditional(const chain::TransitionMatrix& p,
                                const RMatrix& dp,
                                const chain::StationaryDistribution& q);

/// Sequence Fisher information of an order-1 chain after n outcomes:
/// fi_stationary + (n−1)·fi_conditional.
double f_sequential(double fi_stationary, double fi_conditional,
                    std::int64_t n);

/// A parameterized outcome chain: θ ↦ transition matrix and initial law.
struct ChainModel {
  std::function<chain::TransitionMatrix(double)> transition_at;
  std::function<RVector(double)> init_at;
};

/// Brute-force sequence Fisher information: sums (∂_θ P(ω_{1:n}))²/P over
/// every outcome sequence, with the derivative by central differences.
/// Guard: n_outcomes^n ≤ 10⁷. This is the enumeration oracle against
/// which the order-1 decomposition is validated.
double enumerate_fi(const ChainModel& model, const ParamSpec& p, int n,
                    std::vector<std::string>* flags = nullptr);

/// Everything a model evaluation reports at one (θ, schedule) point.
struct FisherReport {
  std::string param_name;
  double theta = 0.0;
  RVector tau_schedule;          // per-outcome γτ
  double fi_stationary = 0.0;    // information in the stationary law
  double fi_conditional = 0.0;   // information rate of the transitions
  RVector fi_by_previous;        // conditional value per previous outcome
  RVector stationary_q;          // weights of the convex combination
  double fi_reference = 0.0;     // iid/thermal benchmark of the model
  std::vector<std::string> flags;
};

}  // namespace seqfisher::fisher
