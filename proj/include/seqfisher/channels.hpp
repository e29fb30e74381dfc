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

#include <variant>
#include <vector>

#include "seqfisher/common.hpp"
#include "seqfisher/qcore.hpp"

namespace seqfisher::channels {

/// Probabilities below this are treated as genuinely zero; values in
/// (−kProbEps, 0) are roundoff and get clamped.
inline constexpr double kProbEps = 1e-12;

/// Orthonormal measurement basis {|k⟩} with outcome labels 0..d−1.
class ProjectiveBasis {
 public:
  explicit ProjectiveBasis(std::vector<CVector> vectors);

  static ProjectiveBasis computational(int dim);
  /// Qubit basis from Bloch angles; (0,·) is computational,
  /// (π/2, π/2) is the σ_y eigenbasis.
  static ProjectiveBasis bloch(double theta, double phi);

  int dim() const { return static_cast<int>(vectors_[0].size()); }
  int n_outcomes() const { return static_cast<int>(vectors_.size()); }
  const CVector& vector(int k) const { return vectors_.at(k); }
  CMatrix projector(int k) const;

 private:
  std::vector<CVector> vectors_;
};

/// Generalized measurement: Hermitian PSD effects summing to identity.
/// The canonical measurement operator for state update is the PSD square
/// root of each effect (fixed convention; outcome statistics do not
/// depend on the decomposition, the post-measurement state does).
class Povm {
 public:
  explicit Povm(std::vector<CMatrix> effects);

  int dim() const { return static_cast<int>(effects_[0].rows()); }
  int n_outcomes() const { return static_cast<int>(effects_.size()); }
  const CMatrix& effect(int w) const { return effects_.at(w); }
  const CMatrix& kraus(int w) const { return kraus_.at(w); }

 private:
  std::vector<CMatrix> effects_;
  std::vector<CMatrix> kraus_;
};

using Measurement = std::variant<ProjectiveBasis, Povm>;

int n_outcomes(const Measurement& m);
int dim(const Measurement& m);

/// One measure-then-evolve iteration: the measurement, and one propagator
/// (with its waiting time, bookkeeping only) per outcome — distinct
/// per-outcome entries realize outcome-conditioned feedback.
class MeasureEvolveStep {
 public:
  MeasureEvolveStep(Measurement measurement,
                    std::vector<qcore::Superoperator> propagators,
                    std::vector<double> waiting_times);

  const Measurement& measurement() const { return measurement_; }
  const qcore::Superoperator& propagator(int omega) const {
    return propagators_.at(omega);
  }
  double waiting_time(int omega) const { return waiting_times_.at(omega); }
  int n_outcomes() const { return static_cast<int>(propagators_.size()); }
  int dim() const;

 private:
  Measurement measurement_;
  std::vector<qcore::Superoperator> propagators_;
  std::vector<double> waiting_times_;
};

/// p(ω|ρ) = Tr(ρ·M_ω). Tiny negative values (roundoff) are clamped to 0
/// and the vector renormalized; values below −kProbEps are an error.
RVector outcome_probabilities(const qcore::DensityMatrix& rho,
                              const Measurement& m);

/// State update conditioned on outcome ω. Projective measurements produce
/// |ω⟩⟨ω| exactly; POVMs use L_ω ρ L_ω† / p with L_ω = √M_ω.
/// Raises ZeroProbabilityError when p(ω|ρ) ≤ kProbEps.
qcore::DensityMatrix collapse(const qcore::DensityMatrix& rho,
                              const Measurement& m, int omega);

/// Collapse on ω, then the ω-conditioned propagator.
qcore::DensityMatrix step(const qcore::DensityMatrix& rho,
                          const MeasureEvolveStep& s, int omega);

/// Effective POVM on the system realized by a collision: evolve
/// system ⊗ aux jointly with U, then measure the aux in `aux_basis`.
/// Effects are E_i = Σ_j w_j F_{i,j}† F_{i,j} with F_{i,j} = ⟨i|U|p_j⟩
/// over the eigenpairs (w_j, |p_j⟩) of the aux state.
Povm collision_povm(const CMatrix& u, const qcore::DensityMatrix& rho_aux,
                    const ProjectiveBasis& aux_basis);

}  // namespace seqfisher::channels
