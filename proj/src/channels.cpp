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

#include "seqfisher/channels.hpp"

#include <cmath>
#include <string>

namespace seqfisher::channels {

namespace {

constexpr double kGramTol = 1e-12;
constexpr double kPovmPsdTol = 1e-10;
constexpr double kPovmSumTol = 1e-10;

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success)
    throw NumericError("psd_sqrt: eigensolver failed");
  RVector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

ProjectiveBasis::ProjectiveBasis(std::vector<CVector> vectors) {
  if (vectors.empty())
    throw DimensionError("ProjectiveBasis: no vectors");
  const auto d = vectors[0].size();
  if (static_cast<Eigen::Index>(vectors.size()) != d)
    throw DimensionError("ProjectiveBasis: need exactly dim vectors");
  for (const auto& v : vectors)
    if (v.size() != d)
      throw DimensionError("ProjectiveBasis: inconsistent vector lengths");
  for (std::size_t a = 0; a < vectors.size(); ++a)
    for (std::size_t b = 0; b < vectors.size(); ++b) {
      const Complex g = vectors[a].dot(vectors[b]);
      const double expect = (a == b) ? 1.0 : 0.0;
      if (std::abs(g - Complex(expect, 0.0)) > kGramTol)
        throw NumericError("ProjectiveBasis: Gram matrix is not identity");
    }
  vectors_ = std::move(vectors);
}

ProjectiveBasis ProjectiveBasis::computational(int dim) {
  std::vector<CVector> vs;
  vs.reserve(dim);
  for (int k = 0; k < dim; ++k) {
    CVector v = CVector::Zero(dim);
    v[k] = 1.0;
    vs.push_back(std::move(v));
  }
  return ProjectiveBasis(std::move(vs));
}

ProjectiveBasis ProjectiveBasis::bloch(double theta, double phi) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const Complex phase(std::cos(phi), std::sin(phi));
  CVector v0(2), v1(2);
  v0 << c, phase * s;
  v1 << -std::conj(phase) * s, c;
  return ProjectiveBasis({v0, v1});
}

CMatrix ProjectiveBasis::projector(int k) const {
  const CVector& v = vectors_.at(k);
  return v * v.adjoint();
}

Povm::Povm(std::vector<CMatrix> effects) {
  if (effects.empty()) throw DimensionError("Povm: no effects");
  const auto d = effects[0].rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& e : effects) {
    if (e.rows() != d || e.cols() != d)
      throw DimensionError("Povm: effect dimension mismatch");
    if ((e - e.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-10)
      throw NumericError("Povm: effect is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPovmPsdTol)
      throw NumericError("Povm: effect has a negative eigenvalue");
    sum += e;
  }
  if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kPovmSumTol)
    throw NumericError("Povm: effects do not sum to identity");
  effects_ = std::move(effects);
  kraus_.reserve(effects_.size());
  for (const auto& e : effects_) kraus_.push_back(psd_sqrt(e));
}

int n_outcomes(const Measurement& m) {
  return std::visit([](const auto& mm) { return mm.n_outcomes(); }, m);
}

int dim(const Measurement& m) {
  return std::visit([](const auto& mm) { return mm.dim(); }, m);
}

MeasureEvolveStep::MeasureEvolveStep(
    Measurement measurement, std::vector<qcore::Superoperator> propagators,
    std::vector<double> waiting_times)
    : measurement_(std::move(measurement)),
      propagators_(std::move(propagators)),
      waiting_times_(std::move(waiting_times)) {
  const int n = channels::n_outcomes(measurement_);
  if (static_cast<int>(propagators_.size()) != n)
    throw DimensionError("MeasureEvolveStep: need one propagator per outcome");
  if (static_cast<int>(waiting_times_.size()) != n)
    throw DimensionError("MeasureEvolveStep: need one waiting time per outcome");
  for (double t : waiting_times_)
    if (!(t >= 0.0))
      throw DimensionError("MeasureEvolveStep: waiting times must be >= 0");
  const int d = channels::dim(measurement_);
  for (const auto& p : propagators_) {
    if (p.dim() != d)
      throw DimensionError("MeasureEvolveStep: propagator dimension mismatch");
    if (p.kind() != qcore::SuperopKind::propagator)
      throw DimensionError("MeasureEvolveStep: expected propagators");
  }
}

int MeasureEvolveStep::dim() const { return channels::dim(measurement_); }

RVector outcome_probabilities(const qcore::DensityMatrix& rho,
                              const Measurement& m) {
  if (rho.dim() != dim(m))
    throw DimensionError("outcome_probabilities: dimension mismatch");
  const int n = n_outcomes(m);
  RVector p(n);
  if (const auto* basis = std::get_if<ProjectiveBasis>(&m)) {
    for (int k = 0; k < n; ++k) {
      const CVector& v = basis->vector(k);
      p[k] = std::real((v.adjoint() * rho.matrix() * v)(0));
    }
  } else {
    const auto& povm = std::get<Povm>(m);
    for (int w = 0; w < n; ++w)
      p[w] = std::real((rho.matrix() * povm.effect(w)).trace());
  }
  for (int k = 0; k < n; ++k) {
    if (p[k] < -kProbEps)
      throw NumericError("outcome_probabilities: probability " +
                         std::to_string(p[k]) + " below -1e-12");
    if (p[k] < 0.0) p[k] = 0.0;
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > 1e-10)
    throw NumericError("outcome_probabilities: probabilities sum to " +
                       std::to_string(total));
  return p / total;
}

qcore::DensityMatrix collapse(const qcore::DensityMatrix& rho,
                              const Measurement& m, int omega) {
  if (omega < 0 || omega >= n_outcomes(m))
    throw DimensionError("collapse: outcome index out of range");
  const RVector p = outcome_probabilities(rho, m);
  if (p[omega] <= kProbEps)
    throw ZeroProbabilityError("collapse: outcome " + std::to_string(omega) +
                               " has probability " + std::to_string(p[omega]));
  if (const auto* basis = std::get_if<ProjectiveBasis>(&m))
    return qcore::DensityMatrix::pure(basis->vector(omega));
  const auto& povm = std::get<Povm>(m);
  const CMatrix& l = povm.kraus(omega);
  CMatrix out = (l * rho.matrix() * l.adjoint()) / p[omega];
  out = 0.5 * (out + out.adjoint().eval());
  return qcore::DensityMatrix(std::move(out));
}

qcore::DensityMatrix step(const qcore::DensityMatrix& rho,
                          const MeasureEvolveStep& s, int omega) {
  return s.propagator(omega).apply(collapse(rho, s.measurement(), omega));
}

Povm collision_povm(const CMatrix& u, const qcore::DensityMatrix& rho_aux,
                    const ProjectiveBasis& aux_basis) {
  const int d_aux = rho_aux.dim();
  if (aux_basis.dim() != d_aux)
    throw DimensionError("collision_povm: aux basis dimension mismatch");
  if (u.rows() != u.cols() || u.rows() % d_aux != 0)
    throw DimensionError("collision_povm: unitary does not factor over aux");
  const int d_sys = static_cast<int>(u.rows()) / d_aux;
  if ((u.adjoint() * u - CMatrix::Identity(u.rows(), u.rows()))
          .cwiseAbs()
          .maxCoeff() > 1e-10)
    throw NumericError("collision_povm: u is not unitary");

  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_aux.matrix());
  if (es.info() != Eigen::Success)
    throw NumericError("collision_povm: aux state eigensolver failed");

  std::vector<CMatrix> effects;
  effects.reserve(d_aux);
  for (int i = 0; i < d_aux; ++i) {
    const CVector& out_vec = aux_basis.vector(i);
    CMatrix e = CMatrix::Zero(d_sys, d_sys);
    for (int j = 0; j < d_aux; ++j) {
      const double w = std::max(es.eigenvalues()[j], 0.0);
      if (w == 0.0) continue;
      const CVector pj = es.eigenvectors().col(j);
      // F_{i,j}(s,s') = ⟨s,i| U |s',p_j⟩ with joint index s·d_aux + c.
      CMatrix f = CMatrix::Zero(d_sys, d_sys);
      for (int s = 0; s < d_sys; ++s)
        for (int sp = 0; sp < d_sys; ++sp) {
          Complex acc(0.0, 0.0);
          for (int c = 0; c < d_aux; ++c)
            for (int cp = 0; cp < d_aux; ++cp)
              acc += std::conj(out_vec[c]) *
                     u(s * d_aux + c, sp * d_aux + cp) * pj[cp];
          f(s, sp) = acc;
        }
      e += w * f.adjoint() * f;
    }
    effects.push_back(std::move(e));
  }
  return Povm(std::move(effects));
}

}  // namespace seqfisher::channels
