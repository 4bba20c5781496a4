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
/// Contextual measurement simulator. A context is an orthonormal basis; a
/// modality is one outcome of one context; extravalent modalities (outcomes
/// of different contexts connected with certainty) share a rank-1 projector,
/// which is the only thing transition probabilities depend on.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gleason/hilbert.hpp"

namespace gleason::csm {

struct QuantumSystem {
  Eigen::Index n;  // mutually exclusive modalities per context = Hilbert dimension
  Field field;

  QuantumSystem(Eigen::Index n_, Field field_) : n(n_), field(field_) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "a system needs N >= 2");
  }
  /// Reconstruction of the probability law from frame functions is only
  /// claimed for N >= 3.
  bool gleason_applies() const { return n >= 3; }
};

template <ScalarType S>
using Context = OrthonormalBasis<S>;

/// Outcome `outcome` of context `context`, resolved to the projector of its
/// extravalence class.
template <ScalarType S>
struct Modality {
  std::string context;
  Eigen::Index outcome;
  Projector<S> class_projector;
};

template <ScalarType S>
Modality<S> modality_of(const Context<S>& c, Eigen::Index outcome) {
  if (outcome < 0 || outcome >= c.dim()) throw Error(ErrorCode::InvalidArgument, "outcome index out of range");
  return Modality<S>{c.label(), outcome, c.projector(outcome)};
}

template <ScalarType S>
struct ExtravalenceClass {
  std::size_t id;
  Projector<S> projector;
  std::vector<std::size_t> members;  // indices into the partitioned list
};

struct MeasurementRecord {
  struct Entry {
    std::string context;
    Eigen::Index outcome;
    std::size_t timestamp;
  };
  std::vector<Entry> entries;
};

// ---------------------------------------------------------------------------
// Exact probabilities and sampling

/// p_j = trace(P Q_j) over the target's outcome projectors. This is the one
/// code path every module uses for transition probabilities.
template <ScalarType S>
std::vector<double> transition_probabilities(const Projector<S>& from, const Context<S>& target,
                                             const Tolerances& tol = default_tolerances()) {
  detail::require_dim(from.dim(), target.dim(), "transition_probabilities");
  std::vector<double> p(static_cast<std::size_t>(target.dim()));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < target.dim(); ++j) {
    p[j] = transition_probability(from, target.projector(j));
    sum += p[j];
  }
  if (std::abs(sum - 1.0) > tol.derived)
    throw Error(ErrorCode::EvaluationRange, "transition probabilities sum to " + std::to_string(sum));
  return p;
}

/// N x N table trace(P_i Q_j) between two contexts.
template <ScalarType S>
Eigen::MatrixXd transition_table(const Context<S>& a, const Context<S>& b) {
  detail::require_dim(a.dim(), b.dim(), "transition_table");
  Eigen::MatrixXd t(a.dim(), b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    const auto row = transition_probabilities(a.projector(i), b);
    for (Eigen::Index j = 0; j < b.dim(); ++j) t(i, j) = row[j];
  }
  return t;
}

/// Inverse-CDF draw. Outcomes with zero probability are never returned.
inline Eigen::Index sample_outcome(std::span<const double> probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cum = 0.0;
  Eigen::Index last_nonzero = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    last_nonzero = static_cast<Eigen::Index>(j);
    cum += probs[j];
    if (u < cum) return static_cast<Eigen::Index>(j);
  }
  return last_nonzero;
}

inline Eigen::Index sample_outcome(std::span<const double> probs, std::uint64_t seed) {
  Rng rng(seed);
  return sample_outcome(probs, rng);
}

/// One measurement of `target` starting from `current`. An optional unitary
/// evolves the class projector first (free evolution defaults to identity).
template <ScalarType S>
Modality<S> measure(const Modality<S>& current, const Context<S>& target, std::uint64_t seed,
                    const std::optional<UnitaryMatrix<S>>& evolution = std::nullopt) {
  detail::require_dim(current.class_projector.dim(), target.dim(), "measure");
  std::optional<Projector<S>> evolved;
  if (evolution) {
    detail::require_dim(evolution->dim(), target.dim(), "measure evolution");
    Matrix<S> m = evolution->matrix() * current.class_projector.matrix() * evolution->matrix().adjoint();
    evolved.emplace(Matrix<S>((m + m.adjoint()) / 2.0));
  }
  const auto probs = transition_probabilities(evolved ? *evolved : current.class_projector, target);
  const Eigen::Index j = sample_outcome(probs, seed);
  return modality_of(target, j);
}

/// Outcome histogram of `trials` independent measurements of `target` from
/// the class `from`.
template <ScalarType S>
std::vector<std::size_t> sample_transitions(const Projector<S>& from, const Context<S>& target, std::size_t trials,
                                            std::uint64_t seed) {
  const auto probs = transition_probabilities(from, target);
  auto chunks = run_chunked<std::vector<std::size_t>>(
      trials, seed, [&](std::size_t, std::size_t b, std::size_t e, std::uint64_t s) {
        Rng rng(s);
        std::vector<std::size_t> c(probs.size(), 0);
        for (std::size_t t = b; t < e; ++t) ++c[sample_outcome(probs, rng)];
        return c;
      });
  std::vector<std::size_t> counts(probs.size(), 0);
  for (const auto& c : chunks)
    for (std::size_t j = 0; j < c.size(); ++j) counts[j] += c[j];
  return counts;
}

/// Joint histogram (first outcome, second outcome) of measuring `first` and
/// then `second`, starting from the class `from`.
template <ScalarType S>
Eigen::MatrixXd sample_two_step(const Projector<S>& from, const Context<S>& first, const Context<S>& second,
                                std::size_t trials, std::uint64_t seed) {
  const auto p1 = transition_probabilities(from, first);
  std::vector<std::vector<double>> p2;
  for (Eigen::Index j = 0; j < first.dim(); ++j) p2.push_back(transition_probabilities(first.projector(j), second));
  auto chunks = run_chunked<Eigen::MatrixXd>(trials, seed, [&](std::size_t, std::size_t b, std::size_t e, std::uint64_t s) {
    Rng rng(s);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(first.dim(), second.dim());
    for (std::size_t t = b; t < e; ++t) {
      const Eigen::Index j = sample_outcome(p1, rng);
      const Eigen::Index k = sample_outcome(p2[j], rng);
      c(j, k) += 1.0;
    }
    return c;
  });
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(first.dim(), second.dim());
  for (const auto& c : chunks) counts += c;
  return counts;
}

/// Binomial standard error sqrt(p(1-p)/n).
inline double binomial_sigma(double p, std::size_t n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

/// |observed - expected| within `sigmas` binomial standard errors. The tiny
/// floor keeps exact 0/1 probabilities from failing on rounding.
inline bool within_band(double observed, double expected, std::size_t n, double sigmas) {
  return std::abs(observed - expected) <= sigmas * binomial_sigma(expected, n) + 1e-12;
}

// ---------------------------------------------------------------------------
// Context relations

enum class PairKind { Permutation, Incompatible };

struct ContextRelation {
  PairKind kind;
  std::size_t unmatched;  // outcomes of the first context without an extravalent partner
  std::vector<std::optional<Eigen::Index>> mapping;  // outcome i of Ca -> outcome of Cb
};

template <ScalarType S>
ContextRelation classify_context_pair(const Context<S>& a, const Context<S>& b,
                                      const Tolerances& tol = default_tolerances()) {
  detail::require_dim(a.dim(), b.dim(), "classify_context_pair");
  const Eigen::Index n = a.dim();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  ContextRelation rel{PairKind::Permutation, 0, std::vector<std::optional<Eigen::Index>>(static_cast<std::size_t>(n))};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Projector<S> pi = a.projector(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (projector_distance(pi, b.projector(j)) <= tol.derived) {
        used[j] = true;
        rel.mapping[i] = j;
        break;
      }
    }
    if (!rel.mapping[i]) ++rel.unmatched;
  }
  if (rel.unmatched > 0) rel.kind = PairKind::Incompatible;
  return rel;
}

template <ScalarType S>
struct PartitionResult {
  std::vector<ExtravalenceClass<S>> classes;
  std::vector<std::size_t> class_of;  // per input modality
  bool relation_consistent = true;    // reflexive, symmetric, transitive on the result
};

/// Groups modalities whose class projectors agree within 1e-10 and checks
/// that the grouping is a genuine equivalence relation on the given data:
/// every pair inside a class is within tolerance, every pair across classes
/// is not.
template <ScalarType S>
PartitionResult<S> extravalence_partition(const std::vector<Modality<S>>& modalities,
                                          const Tolerances& tol = default_tolerances()) {
  PartitionResult<S> out;
  for (std::size_t m = 0; m < modalities.size(); ++m) {
    const auto& p = modalities[m].class_projector;
    if (!out.classes.empty()) detail::require_dim(p.dim(), out.classes.front().projector.dim(), "partition");
    std::optional<std::size_t> found;
    for (const auto& c : out.classes)
      if (projector_distance(c.projector, p) <= tol.derived) {
        found = c.id;
        break;
      }
    if (!found) {
      found = out.classes.size();
      out.classes.push_back(ExtravalenceClass<S>{*found, p, {}});
    }
    out.classes[*found].members.push_back(m);
    out.class_of.push_back(*found);
  }
  for (std::size_t a = 0; a < modalities.size(); ++a)
    for (std::size_t b = a; b < modalities.size(); ++b) {
      const bool close = projector_distance(modalities[a].class_projector, modalities[b].class_projector) <= tol.derived;
      if (close != (out.class_of[a] == out.class_of[b])) out.relation_consistent = false;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Theorem-level experiments

struct Theorem1Report {
  PairKind kind;
  std::size_t unmatched;
  Eigen::MatrixXd exact;      // trace(P_i Q_j)
  Eigen::MatrixXd empirical;  // observed frequencies
  std::size_t trials;
  bool rows_normalized = true;        // some outcome always occurs
  bool has_spread_row = false;        // a start reaching >= 2 outcomes
  bool rows_deterministic = true;     // every row concentrated on one outcome
  bool entries_within_band = true;    // each frequency within sigmas of trace(P_i Q_j)
  bool passed = false;
};

/// Measures every outcome of `ca` in `cb`. Incompatible pairs must show at
/// least one probabilistic row; permutation pairs must be deterministic.
template <ScalarType S>
Theorem1Report verify_theorem1(const Context<S>& ca, const Context<S>& cb, std::size_t trials, std::uint64_t seed,
                               const Tolerances& tol = default_tolerances()) {
  if (trials < 10000) throw Error(ErrorCode::InvalidArgument, "verify_theorem1 needs at least 1e4 trials");
  const auto rel = classify_context_pair(ca, cb, tol);
  Theorem1Report rep{rel.kind, rel.unmatched, transition_table(ca, cb), Eigen::MatrixXd::Zero(ca.dim(), cb.dim()), trials};
  for (Eigen::Index i = 0; i < ca.dim(); ++i) {
    const auto counts = sample_transitions(ca.projector(i), cb, trials, child_seed(seed, static_cast<std::uint64_t>(i)));
    std::size_t nonzero = 0;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < cb.dim(); ++j) {
      const double f = static_cast<double>(counts[j]) / static_cast<double>(trials);
      rep.empirical(i, j) = f;
      sum += f;
      if (counts[j] > 0) ++nonzero;
      if (!within_band(f, rep.exact(i, j), trials, tol.sigmas)) rep.entries_within_band = false;
    }
    if (std::abs(sum - 1.0) > tol.derived) rep.rows_normalized = false;
    if (nonzero >= 2) rep.has_spread_row = true;
    if (nonzero != 1) rep.rows_deterministic = false;
  }
  rep.passed = rep.rows_normalized && rep.entries_within_band &&
               (rel.kind == PairKind::Incompatible ? rep.has_spread_row : rep.rows_deterministic);
  return rep;
}

template <ScalarType S>
struct Fig1Report {
  Context<S> cu, cx, cv, cw;
  // Paths in order u->v, u->w, x->v, x->w.
  std::array<double, 4> exact{};
  std::array<double, 4> empirical{};
  double born;                 // trace(P_u P_v) computed from the direction vectors
  double two_step_empirical;   // x -> (C_u) -> v, conditioned on passing through u_i
  double two_step_unconditioned;  // x -> (C_u) -> v, any intermediate outcome
  std::size_t trials;
  bool bit_identical = false;
  bool pairwise_within_band = false;
  bool born_within_band = false;
  bool passed = false;
};

/// The four-context experiment: u_i in C_u is extravalent to x_l in C_x,
/// v_j in C_v to w_k in C_w. All four cross transition probabilities must
/// agree with each other and with trace(P_u P_v).
template <ScalarType S>
Fig1Report<S> verify_theorem2_fig1(const QuantumSystem& sys, const UnitVector<S>& u, const UnitVector<S>& v,
                                   std::size_t trials, std::uint64_t seed,
                                   const Tolerances& tol = default_tolerances()) {
  detail::require_dim(u.dim(), sys.n, "fig1 u");
  detail::require_dim(v.dim(), sys.n, "fig1 v");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  Fig1Report<S> rep{basis_containing(u, child_seed(seed, 10), "Cu"), basis_containing(u, child_seed(seed, 11), "Cx"),
                    basis_containing(v, child_seed(seed, 12), "Cv"), basis_containing(v, child_seed(seed, 13), "Cw")};
  rep.trials = trials;
  const std::array<const Context<S>*, 2> starts{&rep.cu, &rep.cx};
  const std::array<const Context<S>*, 2> ends{&rep.cv, &rep.cw};
  std::size_t k = 0;
  for (const auto* s : starts)
    for (const auto* e : ends) {
      rep.exact[k] = transition_probabilities(s->projector(0), *e)[0];
      const auto counts = sample_transitions(s->projector(0), *e, trials, child_seed(seed, 20 + k));
      rep.empirical[k] = static_cast<double>(counts[0]) / static_cast<double>(trials);
      ++k;
    }
  rep.born = std::clamp(std::norm(u.inner(v)), 0.0, 1.0);

  const Eigen::MatrixXd joint = sample_two_step(rep.cx.projector(0), rep.cu, rep.cv, trials, child_seed(seed, 30));
  const double through_u = joint.row(0).sum();
  rep.two_step_empirical = through_u > 0.0 ? joint(0, 0) / through_u : 0.0;
  rep.two_step_unconditioned = joint.col(0).sum() / static_cast<double>(trials);

  rep.bit_identical = rep.exact[0] == rep.exact[1] && rep.exact[0] == rep.exact[2] && rep.exact[0] == rep.exact[3];
  const double p = rep.exact[0];
  rep.pairwise_within_band = true;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      if (std::abs(rep.empirical[a] - rep.empirical[b]) >
          tol.sigmas * std::sqrt(2.0) * binomial_sigma(p, trials) + 1e-12)
        rep.pairwise_within_band = false;
  rep.born_within_band = std::abs(p - rep.born) <= tol.derived;
  for (double e : rep.empirical)
    if (!within_band(e, rep.born, trials, tol.sigmas)) rep.born_within_band = false;
  rep.passed = rep.bit_identical && rep.pairwise_within_band && rep.born_within_band;
  return rep;
}

/// Random directions u, v drawn from the seed.
template <ScalarType S>
Fig1Report<S> verify_theorem2_fig1(const QuantumSystem& sys, std::uint64_t seed, std::size_t trials) {
  const auto u = random_unit_vector<S>(sys.n, child_seed(seed, 0));
  const auto v = random_unit_vector<S>(sys.n, child_seed(seed, 1));
  return verify_theorem2_fig1<S>(sys, u, v, trials, seed);
}

struct RoundTripReport {
  Eigen::Index start;
  std::vector<double> forward;   // trace(P_0 Q_j)
  double exact_return;           // sum_j trace(P_0 Q_j)^2
  double empirical_return;
  double sigma;
  std::size_t trials;
  bool matches_oracle = false;
  bool not_deterministic = false;  // empirical < 1 - 3 sigma
  bool passed = false;
};

/// C_u -> C_v -> C_u round trips from outcome `start` of C_u. If the
/// intermediate measurement merely refined the first one, the start would
/// come back with certainty; it does not.
template <ScalarType S>
RoundTripReport refinement_contradiction_demo(const Context<S>& cu, const Context<S>& cv, Eigen::Index start,
                                              std::size_t trials, std::uint64_t seed,
                                              const Tolerances& tol = default_tolerances()) {
  detail::require_dim(cu.dim(), cv.dim(), "refinement_contradiction_demo");
  if (start < 0 || start >= cu.dim()) throw Error(ErrorCode::InvalidArgument, "start outcome out of range");
  const Projector<S> p0 = cu.projector(start);
  for (Eigen::Index j = 0; j < cv.dim(); ++j)
    if (projector_distance(p0, cv.projector(j)) <= tol.derived)
      throw Error(ErrorCode::PreconditionUnmet, "C_v contains the class of the starting modality");
  RoundTripReport rep{start, transition_probabilities(p0, cv), 0.0, 0.0, 0.0, trials};
  std::size_t reachable = 0;
  for (double q : rep.forward) {
    rep.exact_return += q * q;
    if (q > tol.derived) ++reachable;
  }
  if (reachable < 2) throw Error(ErrorCode::PreconditionUnmet, "starting modality reaches fewer than two outcomes");
  const Eigen::MatrixXd joint = sample_two_step(p0, cv, cu, trials, seed);
  rep.empirical_return = joint.col(start).sum() / static_cast<double>(trials);
  rep.sigma = binomial_sigma(rep.exact_return, trials);
  rep.matches_oracle = within_band(rep.empirical_return, rep.exact_return, trials, tol.sigmas);
  rep.not_deterministic = rep.empirical_return < 1.0 - tol.sigmas * rep.sigma;
  rep.passed = rep.matches_oracle && rep.not_deterministic;
  return rep;
}

template <ScalarType S>
struct ClassicalReport {
  std::vector<Context<S>> contexts;
  std::size_t n_classes;
  bool all_permutations = true;
  bool relation_consistent = true;
  bool passed = false;
};

/// A family of contexts that are all reorderings/rephasings of one basis
/// carries exactly N extravalence classes.
template <ScalarType S>
ClassicalReport<S> classical_family_demo(const QuantumSystem& sys, std::size_t n_contexts, std::uint64_t seed) {
  if (n_contexts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one context");
  ClassicalReport<S> rep;
  const auto base = random_basis<S>(sys.n, child_seed(seed, 0), "C0");
  Rng rng(child_seed(seed, 1));
  rep.contexts.push_back(base);
  for (std::size_t c = 1; c < n_contexts; ++c) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(sys.n));
    for (Eigen::Index i = 0; i < sys.n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Matrix<S> m(sys.n, sys.n);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (Eigen::Index j = 0; j < sys.n; ++j) {
      S phase;
      if constexpr (std::same_as<S, Real>) phase = angle(rng) < std::numbers::pi ? 1.0 : -1.0;
      else phase = std::polar(1.0, angle(rng));
      m.col(j) = base.matrix().col(order[j]) * phase;
    }
    rep.contexts.emplace_back(std::move(m), "C" + std::to_string(c));
  }
  std::vector<Modality<S>> all;
  for (const auto& c : rep.contexts) {
    for (Eigen::Index i = 0; i < sys.n; ++i) all.push_back(modality_of(c, i));
    if (classify_context_pair(base, c).kind != PairKind::Permutation) rep.all_permutations = false;
  }
  const auto part = extravalence_partition(all);
  rep.n_classes = part.classes.size();
  rep.relation_consistent = part.relation_consistent;
  rep.passed = rep.all_permutations && rep.relation_consistent && rep.n_classes == static_cast<std::size_t>(sys.n);
  return rep;
}

}  // namespace gleason::csm
