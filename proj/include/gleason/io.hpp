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
/// JSON encodings for fixtures and reports.
///
///   complex scalar   [re, im]        (real scalars are plain numbers)
///   vector           array of scalars
///   matrix           row-major array of rows
///   basis            {"dim":N,"field":"C","label":"Cu","vectors":[...]}
///   frame function   {"kind":"tabulated","dim":3,"field":"R","entries":[{"v":[...],"f":0.25}]}
///                    {"kind":"born","field":"C","rho":[[...]]}
///                    {"kind":"general","M":0.6,"m":0.1,"axes":[p,q,r]}   (R^3 only)
///   scalar candidate {"Q":60,"excluded":[7],"values":{"0":0.0,"1":0.0166,...}}
///   chain plan       {"field":"C","dim":2,"initial":{"vector":[...],"context":"C1"},
///                     "steps":[{"context":basis,"unitary":matrix}]}
///
/// Reports carry "schema":"v1". Objects serialize with sorted keys.

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "gleason/frame_function.hpp"
#include "gleason/measurement.hpp"
#include "gleason/scalar_lemma.hpp"
#include "gleason/sphere_geometry.hpp"

namespace gleason::io {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "v1";

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

inline Field parse_field(const Json& j) {
  const auto s = j.get<std::string>();
  if (s == "R") return Field::Real;
  if (s == "C") return Field::Complex;
  throw Error(ErrorCode::Parse, "field must be \"R\" or \"C\"");
}

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices

template <ScalarType S>
Json scalar_to_json(S s) {
  if constexpr (std::same_as<S, Real>) return s;
  else return Json::array({s.real(), s.imag()});
}

template <ScalarType S>
S scalar_from_json(const Json& j) {
  if (j.is_number()) return S(j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    if constexpr (std::same_as<S, Real>) {
      if (j[1].get<double>() != 0.0) throw Error(ErrorCode::Parse, "complex entry in a real object");
      return j[0].get<double>();
    } else {
      return Complex(j[0].get<double>(), j[1].get<double>());
    }
  }
  throw Error(ErrorCode::Parse, "malformed scalar: " + j.dump());
}

template <ScalarType S>
Json vector_to_json(const Vector<S>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(scalar_to_json<S>(v(i)));
  return a;
}

template <ScalarType S>
Vector<S> vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Parse, "vector must be a non-empty array");
  Vector<S> v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = scalar_from_json<S>(j[i]);
  return v;
}

template <ScalarType S>
Json matrix_to_json(const Matrix<S>& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json<S>(Vector<S>(m.row(i).transpose())));
  return rows;
}

template <ScalarType S>
Matrix<S> matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Parse, "matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix<S> m(n, static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector<S> row = vector_from_json<S>(j[static_cast<std::size_t>(i)]);
    if (row.size() != m.cols()) throw Error(ErrorCode::Parse, "ragged matrix");
    m.row(i) = row.transpose();
  }
  return m;
}

/// A vector is complex when its elements are [re, im] pairs.
inline bool vector_is_complex(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v)
    if (e.is_array()) return true;
  return false;
}

inline bool matrix_is_complex(const Json& m) {
  if (!m.is_array()) return false;
  for (const auto& row : m)
    if (vector_is_complex(row)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Bases

template <ScalarType S>
Json basis_to_json(const OrthonormalBasis<S>& b) {
  Json vecs = Json::array();
  for (Eigen::Index j = 0; j < b.dim(); ++j) vecs.push_back(vector_to_json<S>(Vector<S>(b.matrix().col(j))));
  return Json{{"dim", b.dim()}, {"field", to_string(field_of<S>)}, {"label", b.label()}, {"vectors", vecs}};
}

template <ScalarType S>
OrthonormalBasis<S> basis_from_json(const Json& j) {
  try {
    const auto& vecs = j.at("vectors");
    const auto dim = j.contains("dim") ? j.at("dim").get<Eigen::Index>() : static_cast<Eigen::Index>(vecs.size());
    if (static_cast<Eigen::Index>(vecs.size()) != dim) throw Error(ErrorCode::Parse, "basis needs dim vectors");
    Matrix<S> m(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Vector<S> v = vector_from_json<S>(vecs[static_cast<std::size_t>(c)]);
      if (v.size() != dim) throw Error(ErrorCode::Parse, "basis vector has wrong length");
      m.col(c) = v;
    }
    // Stored vectors may carry rounding from text; renormalize columns.
    for (Eigen::Index c = 0; c < dim; ++c) m.col(c).normalize();
    return OrthonormalBasis<S>(std::move(m), j.value("label", std::string("ctx")));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("basis: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Frame functions

using AnyFrameFunction = std::variant<FrameFunction<Real>, FrameFunction<Complex>>;

template <ScalarType S>
FrameFunction<S> frame_function_from_json_as(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "born") {
    return FrameFunction<S>::born(DensityMatrix<S>(matrix_from_json<S>(j.at("rho"))));
  }
  if (kind == "tabulated") {
    const auto dim = j.at("dim").get<Eigen::Index>();
    std::vector<TabulatedEntry<S>> entries;
    for (const auto& e : j.at("entries")) {
      const Vector<S> v = vector_from_json<S>(e.at("v"));
      if (v.size() != dim) throw Error(ErrorCode::Parse, "tabulated entry has wrong dimension");
      entries.push_back(TabulatedEntry<S>{UnitVector<S>::normalized(v), e.at("f").get<double>()});
    }
    return FrameFunction<S>::tabulated(dim, std::move(entries));
  }
  if (kind == "general") {
    if constexpr (std::same_as<S, Real>) {
      Matrix<Real> axes(3, 3);
      const auto& a = j.at("axes");
      if (a.size() != 3) throw Error(ErrorCode::Parse, "general form needs three axes");
      for (Eigen::Index c = 0; c < 3; ++c) axes.col(c) = vector_from_json<Real>(a[static_cast<std::size_t>(c)]).normalized();
      return general_form_function(GeneralFrameParams{j.at("M").get<double>(), j.at("m").get<double>(),
                                                      OrthonormalBasis<Real>(std::move(axes), "pqr")});
    } else {
      throw Error(ErrorCode::Parse, "general form is defined on R^3 only");
    }
  }
  throw Error(ErrorCode::Parse, "unknown frame function kind '" + kind + "'");
}

inline AnyFrameFunction frame_function_from_json(const Json& j) {
  try {
    Field f = Field::Real;
    if (j.contains("field")) f = parse_field(j.at("field"));
    else if (j.contains("rho")) f = matrix_is_complex(j.at("rho")) ? Field::Complex : Field::Real;
    else if (j.contains("entries") && !j.at("entries").empty())
      f = vector_is_complex(j.at("entries")[0].at("v")) ? Field::Complex : Field::Real;
    if (f == Field::Real) return frame_function_from_json_as<Real>(j);
    return frame_function_from_json_as<Complex>(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("frame function: ") + e.what());
  }
}

/// Tabulated and Born functions only; closed forms have no data encoding.
template <ScalarType S>
Json frame_function_to_json(const FrameFunction<S>& f) {
  Json j{{"field", to_string(field_of<S>)}, {"dim", f.dim()}};
  switch (f.kind()) {
    case FrameKind::Born:
      j["kind"] = "born";
      j["rho"] = matrix_to_json<S>(f.rho()->matrix());
      return j;
    case FrameKind::Tabulated: {
      j["kind"] = "tabulated";
      Json entries = Json::array();
      for (const auto& e : f.entries()) entries.push_back(Json{{"v", vector_to_json<S>(e.direction.components())}, {"f", e.value}});
      j["entries"] = entries;
      return j;
    }
    case FrameKind::ClosedForm:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "closed-form frame functions cannot be serialized");
}

// ---------------------------------------------------------------------------
// Scalar candidates

inline scalar::ScalarCandidate candidate_from_json(const Json& j) {
  try {
    const long q = j.at("Q").get<long>();
    std::set<long> excluded;
    if (j.contains("excluded"))
      for (const auto& k : j.at("excluded")) excluded.insert(k.get<long>());
    std::vector<std::optional<double>> values(static_cast<std::size_t>(q + 1));
    for (const auto& [key, val] : j.at("values").items()) {
      std::size_t pos = 0;
      const long k = std::stol(key, &pos);
      if (pos != key.size() || k < 0 || k > q) throw Error(ErrorCode::Parse, "bad grid key '" + key + "'");
      values[static_cast<std::size_t>(k)] = val.get<double>();
    }
    return scalar::ScalarCandidate(q, std::move(values), std::move(excluded));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("scalar candidate: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::Parse, "scalar candidate: non-integer grid key");
  }
}

inline Json candidate_to_json(const scalar::ScalarCandidate& c) {
  Json values = Json::object();
  for (long k = 0; k <= c.denominator(); ++k)
    if (c.defined(k)) values[std::to_string(k)] = c[k];
  Json excluded = Json::array();
  for (long k : c.excluded()) excluded.push_back(k);
  return Json{{"Q", c.denominator()}, {"excluded", excluded}, {"values", values}};
}

// ---------------------------------------------------------------------------
// Chain plans

template <ScalarType S>
struct ChainPlan {
  pipeline::PreMeasurementModality<S> initial;
  std::vector<pipeline::ChainStep<S>> steps;
};

using AnyChainPlan = std::variant<ChainPlan<Real>, ChainPlan<Complex>>;

template <ScalarType S>
ChainPlan<S> chain_plan_from_json_as(const Json& j) {
  const auto& init = j.at("initial");
  const UnitVector<S> psi = UnitVector<S>::normalized(vector_from_json<S>(init.at("vector")));
  if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != psi.dim())
    throw Error(ErrorCode::DimensionMismatch, "initial vector does not match plan dim");
  pipeline::ContextStateLabel label{init.value("context", std::string("C0")), init.value("sector", Eigen::Index{0}),
                                    init.value("metadata", std::string())};
  ChainPlan<S> plan{pipeline::PreMeasurementModality<S>(Projector<S>::onto(psi), std::move(label)), {}};
  for (const auto& s : j.at("steps")) {
    pipeline::ChainStep<S> step{basis_from_json<S>(s.at("context")), std::nullopt};
    if (step.context.dim() != psi.dim()) throw Error(ErrorCode::DimensionMismatch, "step context dimension");
    if (s.contains("unitary") && !s.at("unitary").is_null()) step.unitary = matrix_from_json<S>(s.at("unitary"));
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

inline AnyChainPlan chain_plan_from_json(const Json& j) {
  try {
    const Field f = j.contains("field") ? parse_field(j.at("field"))
                                        : (vector_is_complex(j.at("initial").at("vector")) ? Field::Complex : Field::Real);
    if (f == Field::Real) return chain_plan_from_json_as<Real>(j);
    return chain_plan_from_json_as<Complex>(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("chain plan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

template <ScalarType S>
Json to_json(const FrameReport<S>& r) {
  Json j{{"schema", kSchema},
         {"max_deviation", r.max_deviation},
         {"n_bases", r.n_bases},
         {"worst_sum", r.worst_sum},
         {"used_stored_bases", r.used_stored_bases}};
  if (r.worst_basis) j["worst_basis"] = basis_to_json(*r.worst_basis);
  return j;
}

template <ScalarType S>
Json to_json(const RegularityReport<S>& r) {
  Json j{{"schema", kSchema},
         {"verdict", to_string(r.verdict)},
         {"max_residual", r.max_residual},
         {"n_samples", r.n_samples},
         {"frame_deviation", r.frame_deviation},
         {"field", to_string(field_of<S>)},
         {"fitted_rho", matrix_to_json<S>(r.fitted_rho.matrix())}};
  Json eig = Json::array();
  const Eigen::VectorXd ev = r.fitted_rho.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) eig.push_back(ev(i));
  j["eigenvalues"] = eig;
  if (r.verdict != Verdict::Regular) {
    if (r.residual_witness)
      j["residual_witness"] = Json{{"v", vector_to_json<S>(r.residual_witness->components())},
                                   {"f", r.witness_value},
                                   {"fit", r.witness_fit}};
    if (r.frame_witness) j["frame_witness"] = basis_to_json(*r.frame_witness);
  }
  return j;
}

inline Json to_json(const scalar::HypothesisResult& h) {
  return Json{{"passed", h.passed}, {"checked", h.checked}, {"worst_deviation", h.worst_deviation},
              {"witness", h.witness}, {"detail", h.detail}};
}

inline Json to_json(const scalar::LemmaReport& r) {
  Json deriv = Json::array();
  for (const auto& l : r.derivation) deriv.push_back(Json{{"link", l.description}, {"deviation", l.deviation}});
  Json j{{"schema", kSchema},
         {"Q", r.q},
         {"verdict", to_string(r.verdict)},
         {"hypotheses", Json{{"H1_g0", to_json(r.h1_g0)}, {"H2_monotone", to_json(r.h2_monotone)},
                             {"H3_triple_sum", to_json(r.h3_triple_sum)}}},
         {"derivation", deriv}};
  j["identity_deviation"] = std::isnan(r.identity_deviation) ? Json(nullptr) : Json(r.identity_deviation);
  if (r.identity_witness) j["identity_witness"] = *r.identity_witness;
  return j;
}

inline Json record_to_json(const csm::MeasurementRecord& rec) {
  Json a = Json::array();
  for (const auto& e : rec.entries) a.push_back(Json{{"context", e.context}, {"outcome", e.outcome}, {"t", e.timestamp}});
  return a;
}

inline Json matrix_to_json(const Eigen::MatrixXd& m) { return matrix_to_json<Real>(Matrix<Real>(m)); }

inline Json vector_to_json(const std::vector<double>& v) { return Json(v); }

inline Json to_json(const csm::Theorem1Report& r) {
  return Json{{"schema", kSchema},
              {"experiment", "theorem1"},
              {"relation", r.kind == csm::PairKind::Permutation ? "PERMUTATION" : "INCOMPATIBLE"},
              {"unmatched", r.unmatched},
              {"trials", r.trials},
              {"exact", matrix_to_json(r.exact)},
              {"empirical", matrix_to_json(r.empirical)},
              {"rows_normalized", r.rows_normalized},
              {"has_spread_row", r.has_spread_row},
              {"rows_deterministic", r.rows_deterministic},
              {"entries_within_band", r.entries_within_band},
              {"passed", r.passed}};
}

template <ScalarType S>
Json to_json(const csm::Fig1Report<S>& r) {
  const char* names[4] = {"u->v", "u->w", "x->v", "x->w"};
  Json paths = Json::array();
  for (std::size_t k = 0; k < 4; ++k)
    paths.push_back(Json{{"path", names[k]}, {"exact", r.exact[k]}, {"empirical", r.empirical[k]}});
  return Json{{"schema", kSchema},
              {"experiment", "theorem2-fig1"},
              {"trials", r.trials},
              {"born", r.born},
              {"paths", paths},
              {"two_step_x_via_u_to_v", Json{{"conditioned", r.two_step_empirical}, {"unconditioned", r.two_step_unconditioned}}},
              {"contexts", Json::array({basis_to_json(r.cu), basis_to_json(r.cx), basis_to_json(r.cv), basis_to_json(r.cw)})},
              {"bit_identical", r.bit_identical},
              {"pairwise_within_band", r.pairwise_within_band},
              {"born_within_band", r.born_within_band},
              {"passed", r.passed}};
}

inline Json to_json(const csm::RoundTripReport& r) {
  return Json{{"schema", kSchema},
              {"experiment", "roundtrip"},
              {"start", r.start},
              {"forward", r.forward},
              {"exact_return", r.exact_return},
              {"empirical_return", r.empirical_return},
              {"sigma", r.sigma},
              {"trials", r.trials},
              {"matches_oracle", r.matches_oracle},
              {"not_deterministic", r.not_deterministic},
              {"passed", r.passed}};
}

template <ScalarType S>
Json to_json(const csm::ClassicalReport<S>& r) {
  Json ctx = Json::array();
  for (const auto& c : r.contexts) ctx.push_back(basis_to_json(c));
  return Json{{"schema", kSchema},
              {"experiment", "classical"},
              {"n_contexts", r.contexts.size()},
              {"n_classes", r.n_classes},
              {"all_permutations", r.all_permutations},
              {"relation_consistent", r.relation_consistent},
              {"contexts", ctx},
              {"passed", r.passed}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace gleason::io
