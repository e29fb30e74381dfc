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

#include "seqfisher/chain.hpp"

#include <cmath>
#include <string>

#include "seqfisher/rng.hpp"

namespace seqfisher::chain {

namespace {

constexpr double kEntryTol = 1e-12;
constexpr double kColSumTol = 1e-10;
constexpr double kUnitEigTol = 1e-8;

void check_distribution(const RVector& p, const char* who) {
  if (p.size() == 0) throw DimensionError(std::string(who) + ": empty");
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (!(p[k] >= -kEntryTol))
      throw DimensionError(std::string(who) + ": negative entry");
  if (std::abs(p.sum() - 1.0) > 1e-10)
    throw DimensionError(std::string(who) + ": does not sum to 1");
}

bool is_orthogonal_subspace_projector_set(const channels::Povm& povm) {
  const int n = povm.n_outcomes();
  for (int a = 0; a < n; ++a) {
    const CMatrix& ea = povm.effect(a);
    if ((ea * ea - ea).cwiseAbs().maxCoeff() > 1e-10) return false;
    for (int b = a + 1; b < n; ++b)
      if ((ea * povm.effect(b)).cwiseAbs().maxCoeff() > 1e-10) return false;
  }
  return true;
}

}  // namespace

TransitionMatrix::TransitionMatrix(RMatrix p, RVector waiting_times) {
  if (p.rows() != p.cols() || p.rows() == 0)
    throw DimensionError("TransitionMatrix: must be square and non-empty");
  if (waiting_times.size() != p.cols())
    throw DimensionError("TransitionMatrix: one waiting time per column");
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      if (p(i, j) < -kEntryTol || p(i, j) > 1.0 + kEntryTol)
        throw NumericError("TransitionMatrix: entry outside [0,1]");
    if (std::abs(p.col(j).sum() - 1.0) > kColSumTol)
      throw NumericError("TransitionMatrix: column " + std::to_string(j) +
                         " sums to " + std::to_string(p.col(j).sum()));
    if (!(waiting_times[j] >= 0.0))
      throw DimensionError("TransitionMatrix: waiting time must be >= 0");
  }
  p_ = std::move(p);
  waiting_times_ = std::move(waiting_times);
}

StationaryDistribution::StationaryDistribution(RVector q) {
  check_distribution(q, "StationaryDistribution");
  q_ = std::move(q);
}

TransitionMatrix transition_matrix(const channels::MeasureEvolveStep& s) {
  if (const auto* povm =
          std::get_if<channels::Povm>(&s.measurement())) {
    if (!is_orthogonal_subspace_projector_set(*povm))
      throw DimensionError(
          "transition_matrix: POVM effects must project onto mutually "
          "orthogonal subspaces for the order-1 chain reduction");
  }
  const int n = s.n_outcomes();
  const auto seed_state = qcore::DensityMatrix::maximally_mixed(s.dim());
  RMatrix p(n, n);
  RVector taus(n);
  for (int k_prev = 0; k_prev < n; ++k_prev) {
    const auto post = channels::step(seed_state, s, k_prev);
    p.col(k_prev) = channels::outcome_probabilities(post, s.measurement());
    taus[k_prev] = s.waiting_time(k_prev);
  }
  return TransitionMatrix(std::move(p), std::move(taus));
}

StationaryDistribution stationary(const TransitionMatrix& p) {
  const int n = p.n_outcomes();
  const RMatrix& m = p.matrix();

  // Uniqueness of the unit eigenvalue, within tolerance.
  Eigen::EigenSolver<RMatrix> es(m, false);
  if (es.info() != Eigen::Success)
    throw NumericError("stationary: eigensolver did not converge");
  int near_unit = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()[k]) >= 1.0 - kUnitEigTol) ++near_unit;
  if (near_unit != 1)
    throw DegenerateChainError(
        "stationary: unit eigenvalue has multiplicity " +
            std::to_string(near_unit) + " within tolerance",
        near_unit);

  // Inverse iteration around the unit eigenvalue. The shift is offset
  // from 1 so the factorization stays nonsingular.
  RVector q = RVector::Constant(n, 1.0 / n);
  RMatrix shifted = m - (1.0 + 1e-12) * RMatrix::Identity(n, n);
  Eigen::PartialPivLU<RMatrix> lu(shifted);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    RVector next = lu.solve(q);
    const double scale = next.lpNorm<1>();
    if (!(scale > 0.0) || !next.allFinite()) break;
    next /= scale;
    if (next.sum() < 0.0) next = -next;
    q = next;
    if ((m * q - q).lpNorm<Eigen::Infinity>() < 1e-13) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    // Fallback: solve (P−I)q = 0 with a normalization row.
    RMatrix a = m - RMatrix::Identity(n, n);
    a.row(n - 1).setOnes();
    RVector b = RVector::Zero(n);
    b[n - 1] = 1.0;
    q = a.fullPivLu().solve(b);
    if (!q.allFinite() ||
        (m * q - q).lpNorm<Eigen::Infinity>() > 1e-9)
      throw NumericError("stationary: fixed-point solve failed");
  }

  for (int k = 0; k < n; ++k) {
    if (q[k] < -kEntryTol)
      throw NumericError("stationary: fixed point has negative entry " +
                         std::to_string(q[k]));
    if (q[k] < 0.0) q[k] = 0.0;
  }
  q /= q.sum();
  return StationaryDistribution(std::move(q));
}

Trajectory sample(const TransitionMatrix& p, std::int64_t n,
                  const RVector& init, std::uint64_t seed) {
  if (n < 1) throw DimensionError("sample: need n >= 1");
  if (init.size() != p.n_outcomes())
    throw DimensionError("sample: init length mismatch");
  check_distribution(init, "sample init");
  Rng rng(seed);
  Trajectory traj;
  traj.seed = seed;
  traj.init = InitTag::specified;
  traj.outcomes.reserve(static_cast<std::size_t>(n));
  const RMatrix& pm = p.matrix();
  int state = rng.discrete(init);
  traj.outcomes.push_back(state);
  for (std::int64_t i = 1; i < n; ++i) {
    state = rng.discrete(pm.col(state));
    traj.outcomes.push_back(state);
  }
  return traj;
}

Trajectory sample_stationary(const TransitionMatrix& p, std::int64_t n,
                             std::uint64_t seed) {
  Trajectory traj = sample(p, n, stationary(p).probabilities(), seed);
  traj.init = InitTag::stationary;
  return traj;
}

SequenceProbability sequence_probability(const TransitionMatrix& p,
                                         const RVector& init,
                                         const Trajectory& traj) {
  if (traj.outcomes.empty())
    throw DimensionError("sequence_probability: empty trajectory");
  check_distribution(init, "sequence_probability init");
  for (int k : traj.outcomes)
    if (k < 0 || k >= p.n_outcomes())
      throw DimensionError("sequence_probability: outcome index out of range");
  double prob = init[traj.outcomes[0]];
  double logp = std::log(prob);
  for (std::size_t i = 1; i < traj.outcomes.size(); ++i) {
    const double t = p.matrix()(traj.outcomes[i], traj.outcomes[i - 1]);
    prob *= t;
    logp += std::log(t);
  }
  return SequenceProbability{prob, logp};
}

}  // namespace seqfisher::chain
