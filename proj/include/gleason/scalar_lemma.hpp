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
/// Finite-grid harness for the scalar lemma: a function g on [0,1] with
/// g(0) = 0, strictly increasing, and g(a) + g(b) + g(c) = 1 whenever
/// a + b + c = 1 must be the identity.
///
/// Arguments are exact grid points k/Q held as integers, so the constraint
/// a + b + c = 1 is tested exactly (i + j + k == Q). Only the values g(k/Q)
/// are floating point.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gleason/core.hpp"

namespace gleason::scalar {

/// Candidate g sampled on {k/Q : k = 0..Q}, undefined on an excluded set.
class ScalarCandidate {
 public:
  ScalarCandidate(long q, std::vector<std::optional<double>> values, std::set<long> excluded = {})
      : q_(q), values_(std::move(values)), excluded_(std::move(excluded)) {
    if (q_ < 1) throw Error(ErrorCode::InvalidArgument, "grid denominator must be positive");
    if (static_cast<long>(values_.size()) != q_ + 1)
      throw Error(ErrorCode::InvalidArgument, "need Q+1 grid values");
    for (long k : excluded_)
      if (k < 0 || k > q_) throw Error(ErrorCode::OffGrid, "excluded point " + std::to_string(k) + " off grid");
    for (long k = 0; k <= q_; ++k) {
      if (excluded_.count(k)) {
        values_[k].reset();
        continue;
      }
      if (!values_[k]) throw Error(ErrorCode::InvalidArgument, "missing value at k=" + std::to_string(k));
      const double v = *values_[k];
      if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
        throw Error(ErrorCode::InvalidArgument, "g(" + std::to_string(k) + "/Q) outside [0,1]");
    }
  }

  static ScalarCandidate from_function(long q, const std::function<double(double)>& g,
                                       std::set<long> excluded = {}) {
    std::vector<std::optional<double>> v(static_cast<std::size_t>(q + 1));
    for (long k = 0; k <= q; ++k)
      if (!excluded.count(k)) v[k] = g(static_cast<double>(k) / static_cast<double>(q));
    return ScalarCandidate(q, std::move(v), std::move(excluded));
  }

  static ScalarCandidate identity(long q, std::set<long> excluded = {}) {
    std::vector<std::optional<double>> v(static_cast<std::size_t>(q + 1));
    for (long k = 0; k <= q; ++k)
      if (!excluded.count(k)) v[k] = static_cast<double>(k) / static_cast<double>(q);
    return ScalarCandidate(q, std::move(v), std::move(excluded));
  }

  ScalarCandidate with_value(long k, double value) const {
    auto v = values_;
    v.at(static_cast<std::size_t>(k)) = value;
    return ScalarCandidate(q_, std::move(v), excluded_);
  }

  long denominator() const { return q_; }
  bool defined(long k) const { return k >= 0 && k <= q_ && values_[k].has_value(); }
  double operator[](long k) const { return values_.at(static_cast<std::size_t>(k)).value(); }
  const std::set<long>& excluded() const { return excluded_; }
  const std::vector<std::optional<double>>& values() const { return values_; }

 private:
  long q_;
  std::vector<std::optional<double>> values_;
  std::set<long> excluded_;
};

struct HypothesisResult {
  bool passed = true;
  std::size_t checked = 0;
  double worst_deviation = 0.0;
  std::vector<long> witness;  // grid numerators of the worst violation
  std::string detail;
};

struct DerivationLink {
  std::string description;
  double deviation;
};

enum class LemmaVerdict { Identity, NotIdentity, HypothesesFailed, Unverified };

inline const char* to_string(LemmaVerdict v) {
  switch (v) {
    case LemmaVerdict::Identity: return "IDENTITY";
    case LemmaVerdict::NotIdentity: return "NOT_IDENTITY";
    case LemmaVerdict::HypothesesFailed: return "HYPOTHESES_FAILED";
    case LemmaVerdict::Unverified: return "UNVERIFIED";
  }
  return "UNKNOWN";
}

struct LemmaReport {
  long q = 0;
  HypothesisResult h1_g0;
  HypothesisResult h2_monotone;
  HypothesisResult h3_triple_sum;
  double identity_deviation = std::numeric_limits<double>::quiet_NaN();
  std::optional<long> identity_witness;
  std::vector<DerivationLink> derivation;
  LemmaVerdict verdict = LemmaVerdict::Unverified;

  bool hypotheses_hold() const { return h1_g0.passed && h2_monotone.passed && h3_triple_sum.passed; }
};

struct LemmaTolerances {
  double g0 = 1e-12;
  double triple = 1e-10;
  double identity = 1e-9;
};

/// Checks the three hypotheses exhaustively on the grid. Triples touching an
/// excluded point are skipped. For each hypothesis the worst violation is
/// kept as the witness.
inline LemmaReport check_hypotheses(const ScalarCandidate& c, const LemmaTolerances& tol = {}) {
  const long q = c.denominator();
  if (q < 3) throw Error(ErrorCode::InvalidArgument, "grid denominator must be >= 3");
  LemmaReport rep;
  rep.q = q;

  auto& h1 = rep.h1_g0;
  h1.checked = 1;
  if (!c.defined(0)) {
    h1.passed = false;
    h1.witness = {0};
    h1.detail = "g(0) is undefined";
  } else {
    h1.worst_deviation = std::abs(c[0]);
    if (h1.worst_deviation > tol.g0) {
      h1.passed = false;
      h1.witness = {0};
      h1.detail = "g(0) = " + std::to_string(c[0]);
    }
  }

  auto& h2 = rep.h2_monotone;
  for (long a = 0; a <= q; ++a) {
    if (!c.defined(a)) continue;
    for (long b = a + 1; b <= q; ++b) {
      if (!c.defined(b)) continue;
      ++h2.checked;
      const double drop = c[a] - c[b];  // must be < 0
      if (drop >= 0.0 && (h2.passed || drop > h2.worst_deviation)) {
        h2.passed = false;
        h2.worst_deviation = drop;
        h2.witness = {a, b};
        h2.detail = "g(" + std::to_string(a) + "/Q) >= g(" + std::to_string(b) + "/Q)";
      }
    }
  }

  auto& h3 = rep.h3_triple_sum;
  for (long i = 0; i <= q; ++i) {
    if (!c.defined(i)) continue;
    for (long j = i; i + j <= q; ++j) {
      const long k = q - i - j;
      if (k < j) break;
      if (!c.defined(j) || !c.defined(k)) continue;
      ++h3.checked;
      const double dev = std::abs(c[i] + c[j] + c[k] - 1.0);
      if (dev > h3.worst_deviation) {
        h3.worst_deviation = dev;
        if (dev > tol.triple) {
          h3.passed = false;
          h3.witness = {i, j, k};
          h3.detail = "g(a)+g(b)+g(c) = " + std::to_string(c[i] + c[j] + c[k]);
        }
      }
    }
  }

  if (!rep.hypotheses_hold()) rep.verdict = LemmaVerdict::HypothesesFailed;
  return rep;
}

struct Rational {
  long num;
  long den = 1;
};

struct AdditivityTerms {
  double lhs;  // g(r a0) + g(s a0)
  double rhs;  // g((r + s) a0)
  double deviation;
  long k_r, k_s, k_sum;  // grid numerators of r a0, s a0, (r+s) a0
};

/// g(r a0) + g(s a0) against g((r + s) a0) with a0 = a0_k / Q. All three
/// arguments and 1 - (r + s) a0 must be defined grid points.
inline AdditivityTerms derive_additivity(const ScalarCandidate& c, long a0_k, Rational r, Rational s) {
  const long q = c.denominator();
  if (r.den <= 0 || s.den <= 0 || r.num < 0 || s.num < 0)
    throw Error(ErrorCode::InvalidArgument, "r and s must be non-negative rationals");
  if (!c.defined(a0_k)) throw Error(ErrorCode::OffGrid, "a0 is not a defined grid point");
  auto scale = [&](Rational x) -> long {
    const long n = x.num * a0_k;
    if (n % x.den != 0) throw Error(ErrorCode::OffGrid, "multiple of a0 is off the grid");
    return n / x.den;
  };
  const long kr = scale(r), ks = scale(s), ksum = kr + ks;
  if (ksum > q) throw Error(ErrorCode::OffGrid, "(r+s) a0 exceeds 1");
  for (long k : {kr, ks, ksum, q - ksum})
    if (!c.defined(k)) throw Error(ErrorCode::OffGrid, "argument k=" + std::to_string(k) + " is excluded");
  const double lhs = c[kr] + c[ks];
  const double rhs = c[ksum];
  return AdditivityTerms{lhs, rhs, std::abs(lhs - rhs), kr, ks, ksum};
}

/// Runs the finite-grid version of the derivation (g(1) = 1, complement
/// rule, additivity over multiples of the smallest defined step, and the
/// closing step g(1) = g(a0)/a0) and reports max |g(a) - a|.
inline LemmaReport verify_identity(const ScalarCandidate& c, const LemmaTolerances& tol = {}) {
  LemmaReport rep = check_hypotheses(c, tol);
  if (!rep.hypotheses_hold()) throw Error(ErrorCode::HypothesesNotMet, "hypotheses H1-H3 do not all hold");
  const long q = c.denominator();

  if (c.defined(0) && c.defined(q))
    rep.derivation.push_back({"g(1) = 1 from g(0)+g(0)+g(1) = 1", std::abs(c[q] - 1.0)});

  double complement = 0.0;
  for (long k = 0; k <= q; ++k)
    if (c.defined(k) && c.defined(q - k)) complement = std::max(complement, std::abs(c[k] + c[q - k] - 1.0));
  rep.derivation.push_back({"complement g(a) + g(1-a) = 1", complement});

  long k0 = 1;
  while (k0 <= q && !c.defined(k0)) ++k0;
  if (k0 <= q) {
    const double step = c[k0];
    double homogeneity = 0.0;
    for (long n = 1; (n + 1) * k0 <= q; ++n) {
      const std::string what = "g(" + std::to_string(n) + "a0) + g(a0) = g(" + std::to_string(n + 1) + "a0)";
      try {
        const auto t = derive_additivity(c, k0, Rational{n}, Rational{1});
        rep.derivation.push_back({what, t.deviation});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OffGrid) throw;
        rep.derivation.push_back({what + " skipped (excluded point)", 0.0});
      }
      if (c.defined((n + 1) * k0))
        homogeneity = std::max(homogeneity, std::abs(c[(n + 1) * k0] - static_cast<double>(n + 1) * step));
    }
    rep.derivation.push_back({"g(r a0) = r g(a0) with a0 = " + std::to_string(k0) + "/Q", homogeneity});
    if (q % k0 == 0)
      rep.derivation.push_back({"g(1) = g(a0)/a0", std::abs(step * static_cast<double>(q / k0) - 1.0)});
  }

  rep.identity_deviation = 0.0;
  for (long k = 0; k <= q; ++k) {
    if (!c.defined(k)) continue;
    const double dev = std::abs(c[k] - static_cast<double>(k) / static_cast<double>(q));
    if (dev > rep.identity_deviation) {
      rep.identity_deviation = dev;
      rep.identity_witness = k;
    }
  }
  rep.verdict = rep.identity_deviation <= tol.identity ? LemmaVerdict::Identity : LemmaVerdict::NotIdentity;
  return rep;
}

/// check_hypotheses, then verify_identity when they hold.
inline LemmaReport evaluate(const ScalarCandidate& c, const LemmaTolerances& tol = {}) {
  LemmaReport rep = check_hypotheses(c, tol);
  if (!rep.hypotheses_hold()) return rep;
  return verify_identity(c, tol);
}

}  // namespace gleason::scalar
