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
#include <vector>

#include "seqfisher/channels.hpp"
#include "seqfisher/common.hpp"

namespace seqfisher::chain {

// Column convention, shared by every module: P(k|k') lives at row k,
// column k'; columns are conditioned on the *previous* outcome and sum
// to one. Waiting times are per column.

class TransitionMatrix {
 public:
  TransitionMatrix(RMatrix p, RVector waiting_times);

  int n_outcomes() const { return static_cast<int>(p_.rows()); }
  const RMatrix& matrix() const { return p_; }
  const RVector& waiting_times() const { return waiting_times_; }
  /// Distribution of the next outcome given previous outcome k'.
  RVector column(int k_prev) const { return p_.col(k_prev); }

 private:
  RMatrix p_;
  RVector waiting_times_;
};

class StationaryDistribution {
 public:
  explicit StationaryDistribution(RVector q);
  const RVector& probabilities() const { return q_; }
  double operator[](int k) const { return q_[k]; }
  int size() const { return static_cast<int>(q_.size()); }

 private:
  RVector q_;
};

enum class InitTag { stationary, specified };

struct Trajectory {
  std::vector<int> outcomes;
  std::uint64_t seed = 0;
  InitTag init = InitTag::specified;

  std::int64_t length() const {
    return static_cast<std::int64_t>(outcomes.size());
  }
};

/// Outcome transition matrix of a measure-evolve step. Column k' is the
/// outcome distribution of step(·, s, k') — input-independent because the
/// measurement either projects onto vectors or (precondition) onto
/// mutually orthogonal subspaces; the maximally mixed state seeds the
/// subspace case. A POVM whose effects are not orthogonal projectors is
/// rejected: the order-1 chain reduction does not apply.
TransitionMatrix transition_matrix(const channels::MeasureEvolveStep& s);

/// Unique fixed point q = P·q. Raises DegenerateChainError (with the
/// multiplicity) when the unit eigenvalue is not unique within 1e-8.
/// Solver: inverse iteration with shift 1, linear-system fallback.
StationaryDistribution stationary(const TransitionMatrix& p);

/// Sample a length-n trajectory starting from an explicit distribution.
Trajectory sample(const TransitionMatrix& p, std::int64_t n,
                  const RVector& init, std::uint64_t seed);

/// Sample with the stationary distribution as the initial law.
Trajectory sample_stationary(const TransitionMatrix& p, std::int64_t n,
                             std::uint64_t seed);

struct SequenceProbability {
  double probability;      // may underflow to 0 for long sequences
  double log_probability;  // always well-defined unless a factor is 0
};

/// P(ω₁)·Π P(ω_{n+1}|ω_n) with its logarithm.
SequenceProbability sequence_probability(const TransitionMatrix& p,
                                         const RVector& init,
                                         const Trajectory& traj);

}  // namespace seqfisher::chain
