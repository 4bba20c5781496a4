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


#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <vector>

#include "gleason/gleason.hpp"

using namespace gleason;
using Catch::Approx;

#ifndef GLEASON_FIXTURE_DIR
#define GLEASON_FIXTURE_DIR "fixtures"
#endif

namespace {

const double kS = 1 / std::sqrt(2.0);

csm::Context<Real> z_basis() { return OrthonormalBasis<Real>::standard(2, "Z"); }

csm::Context<Real> x_basis() {
  Matrix<Real> m(2, 2);
  m << kS, kS, kS, -kS;
  return csm::Context<Real>(m, "X");
}

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(GLEASON_FIXTURE_DIR) / name; }

}  // namespace

// ---------------------------------------------------------------------------
// csm-sim

TEST_CASE("measure", "[csm]") {
  SECTION("repeatability in the same context") {
    const auto c = random_basis<Complex>(3, 1, "C");
    for (Eigen::Index i = 0; i < 3; ++i)
      for (std::uint64_t s = 0; s < 20; ++s) REQUIRE(csm::measure(csm::modality_of(c, i), c, s).outcome == i);
  }
  SECTION("extravalence transfer is certain") {
    const auto v = random_unit_vector<Complex>(3, 5);
    const auto a = basis_containing(v, 1, "A"), b = basis_containing(v, 2, "B");
    for (std::uint64_t s = 0; s < 50; ++s) REQUIRE(csm::measure(csm::modality_of(a, 0), b, s).outcome == 0);
  }
  SECTION("z+ measured along x: 1/2 each") {
    const auto counts = csm::sample_transitions(z_basis().projector(0), x_basis(), 100000, 9);
    REQUIRE(csm::within_band(counts[0] / 1e5, 0.5, 100000, 3));
  }
  SECTION("repeated measurement returns the same outcome") {
    const auto a = random_basis<Complex>(4, 2, "A"), c = random_basis<Complex>(4, 3, "C");
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto first = csm::measure(csm::modality_of(a, 1), c, child_seed(s, 0));
      REQUIRE(csm::measure(first, c, child_seed(s, 1)).outcome == first.outcome);
    }
  }
  SECTION("zero-probability outcomes are never drawn") {
    const std::vector<double> p{0.0, 1.0, 0.0};
    for (std::uint64_t s = 0; s < 200; ++s) REQUIRE(csm::sample_outcome(p, s) == 1);
  }
  SECTION("dimension mismatch") {
    try {
      csm::measure(csm::modality_of(z_basis(), 0), random_basis<Real>(3, 1), 0);
      FAIL("expected DIMENSION_MISMATCH");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::DimensionMismatch);
    }
  }
}

TEST_CASE("sampling does not depend on the thread count", "[csm]") {
  const auto a = random_basis<Complex>(3, 4), b = random_basis<Complex>(3, 5);
  setenv("GLEASON_CSM_THREADS", "1", 1);
  const auto one = csm::sample_transitions(a.projector(0), b, 50000, 3);
  setenv("GLEASON_CSM_THREADS", "4", 1);
  const auto four = csm::sample_transitions(a.projector(0), b, 50000, 3);
  unsetenv("GLEASON_CSM_THREADS");
  REQUIRE(one == four);
}

TEST_CASE("classify_context_pair", "[csm]") {
  SECTION("reordered and rephased") {
    const auto a = random_basis<Complex>(3, 8, "A");
    Matrix<Complex> m(3, 3);
    m.col(0) = a.matrix().col(2) * std::polar(1.0, 0.3);
    m.col(1) = a.matrix().col(0) * std::polar(1.0, -1.1);
    m.col(2) = a.matrix().col(1);
    const auto rel = csm::classify_context_pair(a, csm::Context<Complex>(m, "B"));
    REQUIRE(rel.kind == csm::PairKind::Permutation);
    REQUIRE(rel.mapping[0] == 1);
  }
  SECTION("z and x") {
    const auto rel = csm::classify_context_pair(z_basis(), x_basis());
    REQUIRE(rel.kind == csm::PairKind::Incompatible);
    REQUIRE(rel.unmatched == 2);
  }
  SECTION("one shared vector in dim 3") {
    const auto v = random_unit_vector<Real>(3, 2);
    const auto rel = csm::classify_context_pair(basis_containing(v, 1), basis_containing(v, 2));
    REQUIRE(rel.kind == csm::PairKind::Incompatible);
    REQUIRE(rel.unmatched == 2);
  }
}

TEST_CASE("verify_theorem1", "[csm]") {
  SECTION("permutation pair is deterministic") {
    const auto a = random_basis<Real>(3, 1, "A");
    Matrix<Real> m = a.matrix();
    m.col(0).swap(m.col(1));
    const auto rep = csm::verify_theorem1(a, csm::Context<Real>(-m, "B"), 10000, 2);
    REQUIRE(rep.passed);
    REQUIRE(rep.rows_deterministic);
  }
  SECTION("z/x qubit rows near (1/2, 1/2)") {
    const auto rep = csm::verify_theorem1(z_basis(), x_basis(), 100000, 3);
    REQUIRE(rep.passed);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) REQUIRE(rep.empirical(i, j) == Approx(0.5).margin(0.01));
  }
  SECTION("random dim-4 pair") {
    const auto rep = csm::verify_theorem1(random_basis<Complex>(4, 5), random_basis<Complex>(4, 6), 100000, 4);
    REQUIRE(rep.passed);
    REQUIRE(rep.entries_within_band);
    REQUIRE(rep.exact.minCoeff() > 0.0);
    REQUIRE(rep.exact.maxCoeff() < 1.0);
  }
  REQUIRE_THROWS_AS(csm::verify_theorem1(z_basis(), x_basis(), 100, 1), Error);
}

TEST_CASE("verify_theorem2_fig1", "[csm]") {
  const csm::QuantumSystem sys(3, Field::Complex);
  SECTION("random u, v") {
    const auto rep = csm::verify_theorem2_fig1<Complex>(sys, 11, 100000);
    REQUIRE(rep.passed);
    REQUIRE(rep.bit_identical);
    REQUIRE(csm::classify_context_pair(rep.cu, rep.cx).kind == csm::PairKind::Incompatible);
  }
  SECTION("u = v") {
    const auto u = random_unit_vector<Complex>(3, 1);
    const auto rep = csm::verify_theorem2_fig1(sys, u, u, 10000, 2);
    for (double p : rep.exact) REQUIRE(p == Approx(1.0).margin(1e-12));
    for (double p : rep.empirical) REQUIRE(p == 1.0);
    REQUIRE(rep.passed);
  }
  SECTION("u orthogonal to v") {
    const auto b = random_basis<Complex>(3, 4);
    const auto rep = csm::verify_theorem2_fig1(sys, b.vector(0), b.vector(1), 10000, 2);
    for (double p : rep.exact) REQUIRE(p < 1e-12);
    for (double p : rep.empirical) REQUIRE(p == 0.0);
  }
}

TEST_CASE("refinement_contradiction_demo", "[csm]") {
  SECTION("qubit z -> x -> z") {
    const auto rep = csm::refinement_contradiction_demo(z_basis(), x_basis(), 0, 100000, 5);
    REQUIRE(rep.exact_return == Approx(0.5));
    REQUIRE(rep.passed);
    REQUIRE(std::abs(rep.empirical_return - 0.5) <= 3 * rep.sigma);
  }
  SECTION("C_v containing u0") {
    const auto v = random_unit_vector<Real>(3, 9);
    try {
      csm::refinement_contradiction_demo(basis_containing(v, 1), basis_containing(v, 2), 0, 1000, 1);
      FAIL("expected PRECONDITION_UNMET");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::PreconditionUnmet);
    }
  }
  SECTION("generic dim-3 pair matches the two-step oracle") {
    const auto cu = random_basis<Complex>(3, 21), cv = random_basis<Complex>(3, 22);
    const auto rep = csm::refinement_contradiction_demo(cu, cv, 0, 100000, 6);
    double oracle = 0.0;
    for (Eigen::Index j = 0; j < 3; ++j) oracle += std::pow(std::norm(cu.vector(0).inner(cv.vector(j))), 2);
    REQUIRE(rep.exact_return == Approx(oracle).margin(1e-12));
    REQUIRE(rep.passed);
  }
}

TEST_CASE("extravalence_partition", "[csm]") {
  SECTION("one vector in three contexts") {
    const auto v = random_unit_vector<Complex>(3, 1);
    std::vector<csm::Modality<Complex>> ms;
    for (std::uint64_t s = 0; s < 3; ++s) ms.push_back(csm::modality_of(basis_containing(v, s, "C" + std::to_string(s)), 0));
    const auto part = csm::extravalence_partition(ms);
    REQUIRE(part.classes.size() == 1);
    REQUIRE(part.classes[0].members.size() == 3);
    REQUIRE(part.relation_consistent);
  }
  SECTION("outcomes of one context are singletons") {
    const auto c = random_basis<Real>(4, 2);
    std::vector<csm::Modality<Real>> ms;
    for (Eigen::Index i = 0; i < 4; ++i) ms.push_back(csm::modality_of(c, i));
    REQUIRE(csm::extravalence_partition(ms).classes.size() == 4);
  }
  SECTION("50 modalities from 5 directions") {
    std::vector<UnitVector<Complex>> dirs;
    for (std::uint64_t s = 0; s < 5; ++s) dirs.push_back(random_unit_vector<Complex>(3, 100 + s));
    std::vector<csm::Modality<Complex>> ms;
    std::vector<std::size_t> truth;
    for (std::size_t m = 0; m < 50; ++m) {
      const std::size_t k = (m * 7) % 5;
      ms.push_back(csm::modality_of(basis_containing(dirs[k], m), 0));
      truth.push_back(k);
    }
    const auto part = csm::extravalence_partition(ms);
    REQUIRE(part.classes.size() == 5);
    REQUIRE(part.relation_consistent);
    for (std::size_t a = 0; a < 50; ++a)
      for (std::size_t b = 0; b < 50; ++b) REQUIRE((part.class_of[a] == part.class_of[b]) == (truth[a] == truth[b]));
  }
}

TEST_CASE("class-only dependence of transition probabilities", "[csm]") {
  const auto u = random_unit_vector<Complex>(4, 3), v = random_unit_vector<Complex>(4, 4);
  const auto target = basis_containing(v, 9, "T");
  double first = -1.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = csm::transition_probabilities(basis_containing(u, s).projector(0), target)[0];
    if (first < 0) first = p;
    REQUIRE(p == first);
  }
}

TEST_CASE("classical_family_demo", "[csm]") {
  const auto rep = csm::classical_family_demo<Complex>(csm::QuantumSystem(4, Field::Complex), 6, 3);
  REQUIRE(rep.passed);
  REQUIRE(rep.n_classes == 4);
}

// ---------------------------------------------------------------------------
// measurement-pipeline

using namespace gleason::pipeline;

namespace {

PreMeasurementModality<Real> z_plus() { return {z_basis().projector(0), {"Z", 0, ""}}; }

}  // namespace

TEST_CASE("pre_measure", "[pipeline]") {
  SECTION("extravalent context gives a single sector") {
    const auto v = random_unit_vector<Complex>(3, 2);
    const PreMeasurementModality<Complex> m(Projector<Complex>::onto(v), {"A", 0, ""});
    const auto s = pre_measure(m, basis_containing(v, 5, "B"));
    REQUIRE(s[0].probability == Approx(1.0).margin(1e-12));
    REQUIRE(s[1].probability < 1e-12);
    REQUIRE(s.size() == 3);
  }
  SECTION("z+ against x") {
    const auto s = pre_measure(z_plus(), x_basis());
    REQUIRE(s[0].probability == Approx(0.5));
    REQUIRE(s[1].probability == Approx(0.5));
    REQUIRE(s[0].context_state.context == "X");
    REQUIRE(s[1].context_state.sector == 1);
  }
  SECTION("sector projectors are the context's, mutually orthogonal") {
    const auto c = random_basis<Complex>(4, 7, "C");
    const PreMeasurementModality<Complex> m(Projector<Complex>::onto(random_unit_vector<Complex>(4, 8)), {"A", 0, ""});
    const auto s = pre_measure(m, c);
    REQUIRE(std::abs(s.total_probability() - 1.0) < 1e-10);
    for (std::size_t j = 0; j < 4; ++j) {
      REQUIRE(s[j].system_projector.matrix() == c.projector(static_cast<Eigen::Index>(j)).matrix());
      for (std::size_t k = j + 1; k < 4; ++k)
        REQUIRE(transition_probability(s[j].system_projector, s[k].system_projector) < 1e-10);
    }
  }
}

TEST_CASE("read_out", "[pipeline]") {
  const auto v = random_unit_vector<Real>(3, 2);
  const PreMeasurementModality<Real> m(Projector<Real>::onto(v), {"A", 0, ""});
  const auto s = pre_measure(m, basis_containing(v, 5, "B"));
  REQUIRE(projector_distance(read_out(s, 0).system_projector, m.system_projector) < 1e-12);
  try {
    read_out(s, 1);
    FAIL("expected ZERO_PROBABILITY_SECTOR");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::ZeroProbabilitySector);
  }
  const auto x = read_out(pre_measure(z_plus(), x_basis()), 0);
  REQUIRE(projector_distance(x.system_projector, x_basis().projector(0)) < 1e-15);
  REQUIRE(x.context_state.context == "X");
}

TEST_CASE("measurement is idempotent", "[pipeline]") {
  const auto c = random_basis<Complex>(3, 1, "C");
  const PreMeasurementModality<Complex> m(Projector<Complex>::onto(random_unit_vector<Complex>(3, 2)), {"A", 0, ""});
  for (std::size_t k = 0; k < 3; ++k) {
    const auto again = pre_measure(read_out(pre_measure(m, c), k), c);
    REQUIRE(again[k].probability == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("evolve", "[pipeline]") {
  const PreMeasurementModality<Complex> m(Projector<Complex>::onto(random_unit_vector<Complex>(3, 3)), {"A", 1, "meta"});
  SECTION("identity") {
    const auto e = evolve(m, UnitaryMatrix<Complex>::identity(3));
    REQUIRE(projector_distance(e.system_projector, m.system_projector) < 1e-15);
    REQUIRE(e.context_state.sector == 1);
  }
  SECTION("permutation endpoint permutes the projector") {
    const PreMeasurementModality<Complex> e0(OrthonormalBasis<Complex>::standard(3).projector(0), {"E", 0, ""});
    const auto e = evolve(e0, unitary_path_to_permutation({1, 2, 0}, 10).back());
    REQUIRE(projector_distance(e.system_projector, OrthonormalBasis<Complex>::standard(3).projector(1)) < 1e-12);
  }
  SECTION("U then U dagger") {
    const auto u = random_unitary<Complex>(3, 4);
    REQUIRE(projector_distance(evolve(evolve(m, u), u.adjoint()).system_projector, m.system_projector) < 1e-10);
  }
  SECTION("non-unitary input") {
    try {
      evolve(m, Matrix<Complex>(Matrix<Complex>::Identity(3, 3) * 1.01));
      FAIL("expected NOT_UNITARY");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::NotUnitary);
    }
  }
}

TEST_CASE("run_measurement_chain", "[pipeline]") {
  SECTION("the initial context is deterministic") {
    const auto c = random_basis<Complex>(3, 1, "C");
    const PreMeasurementModality<Complex> m(c.projector(2), {"C", 2, ""});
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto r = run_measurement_chain<Complex>(m, {{c, std::nullopt}}, s);
      REQUIRE(r.record.entries[0].outcome == 2);
    }
  }
  SECTION("z -> x -> z returns half the time") {
    const std::vector<ChainStep<Real>> plan{{x_basis(), std::nullopt}, {z_basis(), std::nullopt}};
    std::size_t back = 0;
    const std::size_t runs = 100000;
    for (std::size_t r = 0; r < runs; ++r) back += run_measurement_chain(z_plus(), plan, child_seed(7, r)).record.entries[1].outcome == 0;
    REQUIRE(csm::within_band(static_cast<double>(back) / runs, 0.5, runs, 3));
  }
  SECTION("U ... U dagger equals the bare chain in the rotated basis") {
    const auto u = random_unitary<Complex>(3, 5);
    const auto c = random_basis<Complex>(3, 6, "C");
    const PreMeasurementModality<Complex> m(Projector<Complex>::onto(random_unit_vector<Complex>(3, 7)), {"A", 0, ""});
    const std::vector<ChainStep<Complex>> conj{{c.rotated(u, "UC"), u.matrix()}};
    const std::vector<ChainStep<Complex>> bare{{c, std::nullopt}};
    const auto rotated = pre_measure(evolve(m, u), c.rotated(u, "UC")).probabilities();
    const auto plain = pre_measure(m, c).probabilities();
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(rotated[j] == Approx(plain[j]).margin(1e-12));
    for (std::uint64_t s = 0; s < 200; ++s)
      REQUIRE(run_measurement_chain(m, conj, s).record.entries[0].outcome ==
              run_measurement_chain(m, bare, s).record.entries[0].outcome);
  }
  SECTION("outcome-by-outcome agreement with sequential measure()") {
    const auto a = random_basis<Complex>(3, 10, "A"), b = random_basis<Complex>(3, 11, "B"), c = random_basis<Complex>(3, 12, "C");
    const std::vector<ChainStep<Complex>> plan{{b, std::nullopt}, {c, std::nullopt}, {a, std::nullopt}};
    const PreMeasurementModality<Complex> m(a.projector(0), {"A", 0, ""});
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto r = run_measurement_chain(m, plan, s);
      auto cur = csm::modality_of(a, 0);
      for (std::size_t k = 0; k < plan.size(); ++k) {
        cur = csm::measure(cur, plan[k].context, child_seed(s, k));
        REQUIRE(cur.outcome == r.record.entries[k].outcome);
      }
    }
  }
}

TEST_CASE("pipeline and csm share transition probabilities bit for bit", "[pipeline][csm]") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto v = random_unit_vector<Complex>(3, child_seed(s, 0));
    const auto c = random_basis<Complex>(3, child_seed(s, 1));
    const PreMeasurementModality<Complex> m(Projector<Complex>::onto(v), {"A", 0, ""});
    const auto sectors = pre_measure(m, c).probabilities();
    const auto direct = csm::transition_probabilities(Projector<Complex>::onto(v), c);
    REQUIRE(sectors == direct);
  }
}

TEST_CASE("SectorizedState validation", "[pipeline]") {
  const auto z = z_basis();
  std::vector<Sector<Real>> bad{{0.7, z.projector(0), {"Z", 0, ""}}, {0.2, z.projector(1), {"Z", 1, ""}}};
  REQUIRE_THROWS_AS(SectorizedState<Real>(bad), Error);
  std::vector<Sector<Real>> overlap{{0.5, z.projector(0), {"Z", 0, ""}}, {0.5, x_basis().projector(0), {"X", 0, ""}}};
  REQUIRE_THROWS_AS(SectorizedState<Real>(overlap), Error);
  REQUIRE_THROWS_AS(PreMeasurementModality<Real>(Projector<Real>(Matrix<Real>::Identity(2, 2)), {"Z", 0, ""}), Error);
}

// ---------------------------------------------------------------------------
// io

TEST_CASE("every shipped fixture round-trips", "[io]") {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(GLEASON_FIXTURE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const auto j = io::read_json_file(entry.path().string());
    INFO(entry.path().filename().string());
    if (j.contains("Q")) {
      const auto c = io::candidate_from_json(j);
      const auto back = io::candidate_from_json(io::candidate_to_json(c));
      REQUIRE(back.values() == c.values());
      REQUIRE(back.excluded() == c.excluded());
    } else if (j.contains("kind")) {
      if (j.at("kind") == "general") {
        REQUIRE_NOTHROW(io::frame_function_from_json(j));
        continue;
      }
      const auto f = io::frame_function_from_json(j);
      const auto back = io::frame_function_from_json(std::visit([](const auto& g) { return io::frame_function_to_json(g); }, f));
      REQUIRE(f.index() == back.index());
      std::visit(
          [&](const auto& a) {
            using F = std::decay_t<decltype(a)>;
            const auto& b = std::get<F>(back);
            REQUIRE(a.kind() == b.kind());
            REQUIRE(a.dim() == b.dim());
            if (a.rho()) REQUIRE(a.rho()->matrix() == b.rho()->matrix());
            REQUIRE(a.entries().size() == b.entries().size());
            for (std::size_t k = 0; k < a.entries().size(); ++k) {
              REQUIRE(a.entries()[k].value == b.entries()[k].value);
              REQUIRE((a.entries()[k].direction.components() - b.entries()[k].direction.components()).norm() < 1e-15);
            }
          },
          f);
    } else {
      const auto plan = io::chain_plan_from_json(j);
      std::visit(
          [&](const auto& p) {
            for (const auto& step : p.steps) {
              using S = typename std::decay_t<decltype(step.context.matrix())>::Scalar;
              const auto b = io::basis_from_json<S>(io::basis_to_json(step.context));
              REQUIRE((b.matrix() - step.context.matrix()).cwiseAbs().maxCoeff() < 1e-15);
              REQUIRE(b.label() == step.context.label());
            }
          },
          plan);
    }
  }
  REQUIRE(seen >= 10);
}

TEST_CASE("scalars and matrices serialize losslessly", "[io]") {
  const auto u = random_unitary<Complex>(3, 2).matrix();
  REQUIRE(io::matrix_from_json<Complex>(io::matrix_to_json<Complex>(u)) == u);
  const auto r = random_unitary<Real>(4, 2).matrix();
  REQUIRE(io::matrix_from_json<Real>(io::matrix_to_json<Real>(r)) == r);
  REQUIRE_FALSE(io::matrix_is_complex(io::matrix_to_json<Real>(r)));
  REQUIRE(io::matrix_is_complex(io::matrix_to_json<Complex>(u)));
}

TEST_CASE("malformed input raises PARSE", "[io]") {
  for (const char* text : {R"({"kind":"born","rho":"x"})", R"({"kind":"magic"})", R"({"Q":"a","values":{}})"}) {
    INFO(text);
    bool threw = false;
    try {
      const auto j = io::Json::parse(text);
      if (j.contains("Q")) io::candidate_from_json(j);
      else io::frame_function_from_json(j);
    } catch (const Error& e) {
      threw = true;
      REQUIRE(e.code() == ErrorCode::Parse);
    }
    REQUIRE(threw);
  }
  REQUIRE_THROWS_AS(io::read_json_file(fixture("does_not_exist.json").string()), Error);
}

TEST_CASE("reports are deterministic", "[io]") {
  const auto f = io::frame_function_from_json(io::read_json_file(fixture("born_rho.json").string()));
  const auto& born = std::get<FrameFunction<Complex>>(f);
  REQUIRE(io::dump(io::to_json(reconstruct_rho(born, 200, 7))) == io::dump(io::to_json(reconstruct_rho(born, 200, 7))));
  const csm::QuantumSystem sys(3, Field::Complex);
  REQUIRE(io::dump(io::to_json(csm::verify_theorem2_fig1<Complex>(sys, 1, 20000))) ==
          io::dump(io::to_json(csm::verify_theorem2_fig1<Complex>(sys, 1, 20000))));
}
