// Copyright 2026 The gleason-csm Authors
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

/// @file
/// System-side measurement pipeline. A modality is the pair (system
/// projector, context state); context states are opaque labels. Measuring in
/// a new context produces a sectorized mixture, one sector per outcome;
/// reading out sector k yields the next pre-measurement modality, which may
/// then evolve unitarily.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gleason/csm.hpp"

namespace gleason::pipeline {

struct ContextStateLabel {
  std::string context;
  Eigen::Index sector = 0;
  std::string metadata;

  bool operator==(const ContextStateLabel&) const = default;
};

template <ScalarType S>
struct PreMeasurementModality {
  Projector<S> system_projector;
  ContextStateLabel context_state;

  PreMeasurementModality(Projector<S> p, ContextStateLabel label)
      : system_projector(std::move(p)), context_state(std::move(label)) {
    if (system_projector.rank() != 1) throw Error(ErrorCode::InvalidArgument, "modality projector must be rank 1");
  }
};

template <ScalarType S>
struct Sector {
  double probability;
  Projector<S> system_projector;
  ContextStateLabel context_state;
};

/// Statistical mixture sum_j p_j |phi_j><phi_j| (x) context_j. Weights are
/// clamped at zero and must sum to one; sector projectors are mutually
/// orthogonal.
template <ScalarType S>
class SectorizedState {
 public:
  explicit SectorizedState(std::vector<Sector<S>> sectors, const Tolerances& tol = default_tolerances())
      : sectors_(std::move(sectors)) {
    if (sectors_.empty()) throw Error(ErrorCode::InvalidArgument, "no sectors");
    double sum = 0.0;
    for (auto& s : sectors_) {
      if (s.probability < -tol.structural) throw Error(ErrorCode::InvalidArgument, "negative sector weight");
      s.probability = std::max(0.0, s.probability);
      sum += s.probability;
    }
    if (std::abs(sum - 1.0) > tol.derived)
      throw Error(ErrorCode::InvalidArgument, "sector weights sum to " + std::to_string(sum));
    for (std::size_t a = 0; a < sectors_.size(); ++a)
      for (std::size_t b = a + 1; b < sectors_.size(); ++b)
        if (transition_probability(sectors_[a].system_projector, sectors_[b].system_projector) >= tol.derived)
          throw Error(ErrorCode::InvalidArgument, "sector projectors are not orthogonal");
  }

  const std::vector<Sector<S>>& sectors() const { return sectors_; }
  std::size_t size() const { return sectors_.size(); }
  const Sector<S>& operator[](std::size_t k) const { return sectors_.at(k); }

  std::vector<double> probabilities() const {
    std::vector<double> p;
    for (const auto& s : sectors_) p.push_back(s.probability);
    return p;
  }

  double total_probability() const {
    double t = 0.0;
    for (const auto& s : sectors_) t += s.probability;
    return t;
  }

 private:
  std::vector<Sector<S>> sectors_;
};

/// Interaction with context C2 before readout. Zero-weight sectors are kept
/// so sector k always means outcome k of C2.
template <ScalarType S>
SectorizedState<S> pre_measure(const PreMeasurementModality<S>& m, const csm::Context<S>& c2) {
  detail::require_dim(m.system_projector.dim(), c2.dim(), "pre_measure");
  const auto p = csm::transition_probabilities(m.system_projector, c2);
  std::vector<Sector<S>> sectors;
  sectors.reserve(p.size());
  for (Eigen::Index j = 0; j < c2.dim(); ++j)
    sectors.push_back(Sector<S>{p[j], c2.projector(j), ContextStateLabel{c2.label(), j, ""}});
  return SectorizedState<S>(std::move(sectors));
}

template <ScalarType S>
PreMeasurementModality<S> read_out(const SectorizedState<S>& s, std::size_t k,
                                   const Tolerances& tol = default_tolerances()) {
  if (k >= s.size()) throw Error(ErrorCode::InvalidArgument, "sector index out of range");
  if (s[k].probability <= tol.structural)
    throw Error(ErrorCode::ZeroProbabilitySector, "sector " + std::to_string(k) + " has zero probability");
  return PreMeasurementModality<S>(s[k].system_projector, s[k].context_state);
}

/// P -> U P U†; the context label is untouched.
template <ScalarType S>
PreMeasurementModality<S> evolve(const PreMeasurementModality<S>& m, const Matrix<S>& u,
                                 const Tolerances& tol = default_tolerances()) {
  detail::require_dim(u.rows(), m.system_projector.dim(), "evolve");
  const UnitaryMatrix<S> checked(u, tol.unitary_input);
  Matrix<S> p = u * m.system_projector.matrix() * u.adjoint();
  p = (p + p.adjoint()) / 2.0;
  return PreMeasurementModality<S>(Projector<S>(std::move(p)), m.context_state);
}

template <ScalarType S>
PreMeasurementModality<S> evolve(const PreMeasurementModality<S>& m, const UnitaryMatrix<S>& u) {
  return evolve(m, u.matrix());
}

template <ScalarType S>
struct ChainStep {
  csm::Context<S> context;
  std::optional<Matrix<S>> unitary;  // applied before the interaction
};

template <ScalarType S>
struct ChainResult {
  csm::MeasurementRecord record;
  PreMeasurementModality<S> final_modality;
};

/// Runs evolve / pre_measure / sampled read_out for each step. Step k
/// samples with child_seed(seed, k), the same draw csm::measure makes with
/// that seed, so a chain and the equivalent sequence of measure() calls
/// agree outcome for outcome.
template <ScalarType S>
ChainResult<S> run_measurement_chain(const PreMeasurementModality<S>& initial,
                                     const std::vector<ChainStep<S>>& plan, std::uint64_t seed) {
  PreMeasurementModality<S> current = initial;
  csm::MeasurementRecord record;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto& step = plan[k];
    if (step.unitary) current = evolve(current, *step.unitary);
    const SectorizedState<S> mixed = pre_measure(current, step.context);
    const auto probs = mixed.probabilities();
    const Eigen::Index j = csm::sample_outcome(probs, child_seed(seed, k));
    current = read_out(mixed, static_cast<std::size_t>(j));
    record.entries.push_back({step.context.label(), j, k});
  }
  return ChainResult<S>{std::move(record), std::move(current)};
}

}  // namespace gleason::pipeline
