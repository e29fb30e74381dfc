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
#include <string>

#include "seqfisher/chain.hpp"
#include "seqfisher/common.hpp"
#include "seqfisher/fisher.hpp"

namespace seqfisher::estimate {

/// Transition counts of a trajectory: counts(k, k') is how many times
/// outcome k' was immediately followed by k. Σ counts = N−1.
struct TransitionCounts {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  int first_outcome = 0;
  std::int64_t total = 0;

  /// Column-normalized estimate P̂(k|k'). Columns of outcomes that were
  /// never visited are undefined and returned as NaN (and listed).
  RMatrix normalized(std::vector<int>* undefined_columns = nullptr) const;
};

TransitionCounts count_transitions(const chain::Trajectory& traj,
                                   int n_outcomes);

struct MleResult {
  double theta_hat = 0.0;
  double log_likelihood = 0.0;
  bool boundary = false;  // maximum at a bracket edge
  int iterations = 0;
};

/// Maximum-likelihood estimate over a bracket [lo, hi] by golden-section
/// on log P(ω_{1:N}|θ) = log init_θ(ω₁) + Σ counts·log P_θ, to an
/// argument tolerance of 1e-6·max(|θ|,1). An observed transition with
/// model probability below 1e-300 is a hard error naming the transition.
MleResult mle(const chain::Trajectory& traj, const fisher::ChainModel& model,
              double lo, double hi);

/// Outcome histogram normalized to frequencies.
RVector empirical_distribution(const chain::Trajectory& traj, int n_outcomes);

/// Keep outcomes 1, Δ+1, 2Δ+1, … (length ⌈N/Δ⌉); Δ=1 is the identity.
chain::Trajectory subsample(const chain::Trajectory& traj,
                            std::int64_t delta);

enum class EstimatorKind { mle, transition_inversion, empirical_distribution };

std::string to_string(EstimatorKind kind);

struct MonteCarloConfig {
  std::int64_t n = 10000;       // outcomes per trajectory
  int n_trajectories = 500;     // ≥ 2
  std::uint64_t seed = 1;
  EstimatorKind kind = EstimatorKind::mle;
  double bracket_lo = 0.0;      // θ search bracket
  double bracket_hi = 0.0;
};

/// Monte-Carlo validation report against the 1/(N·F_rate) bound.
struct McReport {
  int n_trajectories = 0;
  std::int64_t n_per_trajectory = 0;
  EstimatorKind kind = EstimatorKind::mle;
  double theta0 = 0.0;
  double mean = 0.0;
  double variance = 0.0;   // sample variance (n−1 denominator)
  double bias = 0.0;       // mean − θ₀
  double fi_conditional = 0.0;
  double predicted_bound = 0.0;  // 1/(N·F_rate)
  double ratio = 0.0;            // variance·N·F_rate
  int failures = 0;
  std::uint64_t seed = 0;
};

/// Simulate n_trajectories trajectories at θ₀ (stationary initial law,
/// per-trajectory seeds split from the parent seed), estimate θ on each,
/// and compare the estimator variance with the Cramér-Rao rate bound.
/// Per-trajectory estimator failures are tolerated up to 1%.
McReport monte_carlo(const fisher::ChainModel& model, double theta0,
                     const MonteCarloConfig& cfg);

}  // namespace seqfisher::estimate
