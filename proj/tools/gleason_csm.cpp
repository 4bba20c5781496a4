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

// gleason-csm: command-line front end for the library's experiments.
//
// Exit status: 0 on a passing verdict, 1 on a negative verdict (NOT_REGULAR,
// hypotheses failing, monotonicity violated, ...), 2 on usage or I/O errors.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gleason/gleason.hpp"

namespace {

using namespace gleason;
using io::Json;

constexpr int kPass = 0;
constexpr int kVerdictFail = 1;
constexpr int kToolError = 2;

struct RunConfig {
  std::string input;
  std::string output;
  std::string csv;
  Eigen::Index dim = 3;
  std::string field = "C";
  std::size_t trials = 100000;
  std::size_t samples = 200;
  std::size_t bases = 1000;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::string experiment;
  // piron-demo
  double hu = 0.8, hv = 0.3, dphi_deg = 90.0;
  std::size_t max_len = 200;
  // unitary-path
  std::string perm = "1,0";
  int steps = 100;
  bool full_path = false;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  out << text;
}

Field field_from(const std::string& s) {
  if (s == "R") return Field::Real;
  if (s == "C") return Field::Complex;
  throw Error(ErrorCode::InvalidArgument, "--field must be R or C");
}

Tolerances tolerances_for(const RunConfig& cfg) {
  Tolerances tol;
  if (cfg.tolerance) tol.regularity = *cfg.tolerance;
  return tol;
}

// ---------------------------------------------------------------------------

int cmd_gleason_fit(const RunConfig& cfg, bool dim_given) {
  const auto f = io::frame_function_from_json(io::read_json_file(cfg.input));
  return std::visit(
      [&](const auto& fn) {
        if (dim_given && fn.dim() != cfg.dim)
          throw Error(ErrorCode::DimensionMismatch, "--dim does not match the fixture");
        const auto rep = reconstruct_rho(fn, cfg.samples, cfg.seed, tolerances_for(cfg));
        emit(io::dump(io::to_json(rep)), cfg.output);
        return rep.verdict == Verdict::Regular ? kPass : kVerdictFail;
      },
      f);
}

int cmd_frame_check(const RunConfig& cfg) {
  const auto f = io::frame_function_from_json(io::read_json_file(cfg.input));
  const double tol = tolerances_for(cfg).regularity;
  return std::visit(
      [&](const auto& fn) {
        const auto rep = check_frame_condition(fn, cfg.bases, cfg.seed);
        Json j = io::to_json(rep);
        j["tolerance"] = tol;
        j["passed"] = rep.max_deviation <= tol;
        emit(io::dump(j), cfg.output);
        return rep.max_deviation <= tol ? kPass : kVerdictFail;
      },
      f);
}

int cmd_piron_demo(const RunConfig& cfg) {
  const sphere::Pole pole(UnitVector<Real>(Vector<Real>(Eigen::Vector3d(0.0, 0.0, 1.0))));
  std::optional<FrameFunction<Real>> f;
  if (!cfg.input.empty()) {
    auto any = io::frame_function_from_json(io::read_json_file(cfg.input));
    if (!std::holds_alternative<FrameFunction<Real>>(any))
      throw Error(ErrorCode::InvalidArgument, "piron-demo needs a real frame function on R^3");
    f = std::get<FrameFunction<Real>>(any);
    if (f->dim() != 3) throw Error(ErrorCode::DimensionMismatch, "piron-demo works on R^3");
  } else {
    f = FrameFunction<Real>::born(DensityMatrix<Real>::pure(pole.direction()));
  }
  auto at = [](double h, double phi) {
    const double s = std::sqrt(1.0 - h);
    return UnitVector<Real>::normalized(Vector<Real>(Eigen::Vector3d(s * std::cos(phi), s * std::sin(phi), std::sqrt(h))));
  };
  const auto u = at(cfg.hu, 0.0);
  const auto v = at(cfg.hv, cfg.dphi_deg * std::numbers::pi / 180.0);
  sphere::PironChain chain = [&] {
    try {
      return sphere::build_piron_chain(u, v, pole, cfg.max_len);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ChainTooLong) std::cerr << e.what() << "\n";
      throw;
    }
  }();
  const auto rep = sphere::monotonicity_profile(*f, chain, pole);
  std::ostringstream csv;
  csv.precision(17);
  csv << "step,x,y,z,h,f\n";
  for (std::size_t n = 0; n < chain.vectors().size(); ++n) {
    const auto& w = chain.vectors()[n].components();
    csv << n << ',' << w(0) << ',' << w(1) << ',' << w(2) << ',' << rep.latitudes[n] << ',' << rep.values[n] << '\n';
  }
  emit(csv.str(), cfg.output);
  if (!rep.passed) {
    std::cerr << "MONOTONICITY_VIOLATION at step " << *rep.violation_step << "\n";
    return kVerdictFail;
  }
  return kPass;
}

int cmd_magic_check(const RunConfig& cfg) {
  const auto cand = io::candidate_from_json(io::read_json_file(cfg.input));
  const auto rep = scalar::evaluate(cand);
  emit(io::dump(io::to_json(rep)), cfg.output);
  return rep.verdict == scalar::LemmaVerdict::Identity ? kPass : kVerdictFail;
}

template <ScalarType S>
int run_csm(const RunConfig& cfg) {
  const csm::QuantumSystem sys(cfg.dim, field_of<S>);
  Json report;
  bool passed = false;
  std::ostringstream csv;
  csv.precision(17);
  auto table_csv = [&](const Eigen::MatrixXd& exact, const Eigen::MatrixXd& empirical) {
    csv << "from,to,exact,empirical\n";
    for (Eigen::Index i = 0; i < exact.rows(); ++i)
      for (Eigen::Index j = 0; j < exact.cols(); ++j)
        csv << i << ',' << j << ',' << exact(i, j) << ',' << empirical(i, j) << '\n';
  };
  if (cfg.experiment == "theorem1") {
    const auto ca = random_basis<S>(cfg.dim, child_seed(cfg.seed, 100), "Ca");
    const auto cb = random_basis<S>(cfg.dim, child_seed(cfg.seed, 101), "Cb");
    const auto rep = csm::verify_theorem1(ca, cb, cfg.trials, cfg.seed);
    report = io::to_json(rep);
    passed = rep.passed;
    table_csv(rep.exact, rep.empirical);
  } else if (cfg.experiment == "theorem2-fig1") {
    const auto rep = csm::verify_theorem2_fig1<S>(sys, cfg.seed, cfg.trials);
    report = io::to_json(rep);
    passed = rep.passed;
    csv << "path,exact,empirical\n";
    const char* names[4] = {"u->v", "u->w", "x->v", "x->w"};
    for (std::size_t k = 0; k < 4; ++k) csv << names[k] << ',' << rep.exact[k] << ',' << rep.empirical[k] << '\n';
  } else if (cfg.experiment == "roundtrip") {
    const auto cu = random_basis<S>(cfg.dim, child_seed(cfg.seed, 100), "Cu");
    const auto cv = random_basis<S>(cfg.dim, child_seed(cfg.seed, 101), "Cv");
    const auto rep = csm::refinement_contradiction_demo(cu, cv, 0, cfg.trials, cfg.seed);
    report = io::to_json(rep);
    passed = rep.passed;
    csv << "intermediate,forward\n";
    for (std::size_t j = 0; j < rep.forward.size(); ++j) csv << j << ',' << rep.forward[j] << '\n';
  } else if (cfg.experiment == "classical") {
    const auto rep = csm::classical_family_demo<S>(sys, 5, cfg.seed);
    report = io::to_json(rep);
    passed = rep.passed;
    csv << "context,n_classes\n" << rep.contexts.size() << ',' << rep.n_classes << '\n';
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + cfg.experiment + "'");
  }
  report["dim"] = cfg.dim;
  report["field"] = to_string(field_of<S>);
  report["seed"] = cfg.seed;
  emit(io::dump(report), cfg.output);
  if (!cfg.csv.empty()) emit(csv.str(), cfg.csv);
  return passed ? kPass : kVerdictFail;
}

int cmd_csm_sim(const RunConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "--trials must be >= 1");
  return field_from(cfg.field) == Field::Real ? run_csm<Real>(cfg) : run_csm<Complex>(cfg);
}

template <ScalarType S>
int run_measure_demo(const io::ChainPlan<S>& plan, const RunConfig& cfg) {
  if (cfg.runs < 1) throw Error(ErrorCode::InvalidArgument, "--runs must be >= 1");
  const std::size_t n_steps = plan.steps.size();
  std::vector<std::vector<std::size_t>> counts(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) counts[k].assign(static_cast<std::size_t>(plan.steps[k].context.dim()), 0);
  std::optional<pipeline::ChainResult<S>> first;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    auto res = pipeline::run_measurement_chain(plan.initial, plan.steps, child_seed(cfg.seed, r));
    for (std::size_t k = 0; k < n_steps; ++k) ++counts[k][static_cast<std::size_t>(res.record.entries[k].outcome)];
    if (!first) first.emplace(std::move(res));
  }
  Json freq = Json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "step,context,outcome,count,frequency\n";
  for (std::size_t k = 0; k < n_steps; ++k) {
    Json row = Json::array();
    for (std::size_t j = 0; j < counts[k].size(); ++j) {
      const double fr = static_cast<double>(counts[k][j]) / static_cast<double>(cfg.runs);
      row.push_back(fr);
      csv << k << ',' << plan.steps[k].context.label() << ',' << j << ',' << counts[k][j] << ',' << fr << '\n';
    }
    freq.push_back(row);
  }
  Json j{{"schema", io::kSchema},
         {"field", to_string(field_of<S>)},
         {"runs", cfg.runs},
         {"seed", cfg.seed},
         {"record", io::record_to_json(first->record)},
         {"final", Json{{"context", first->final_modality.context_state.context},
                        {"sector", first->final_modality.context_state.sector},
                        {"projector", io::matrix_to_json<S>(first->final_modality.system_projector.matrix())}}},
         {"frequencies", freq}};
  emit(io::dump(j), cfg.output);
  if (!cfg.csv.empty()) emit(csv.str(), cfg.csv);
  return kPass;
}

int cmd_measure_demo(const RunConfig& cfg) {
  const auto plan = io::chain_plan_from_json(io::read_json_file(cfg.input));
  return std::visit([&](const auto& p) { return run_measure_demo(p, cfg); }, plan);
}

int cmd_unitary_path(const RunConfig& cfg) {
  std::vector<std::size_t> perm;
  std::stringstream ss(cfg.perm);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      perm.push_back(static_cast<std::size_t>(std::stoul(tok)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "--perm must be comma-separated indices");
    }
  }
  const auto path = unitary_path_to_permutation(perm, cfg.steps);
  const auto n = path.front().dim();
  double max_unitarity = 0.0, max_step = 0.0, max_imag = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& u = path[k].matrix();
    max_unitarity = std::max(max_unitarity, (u.adjoint() * u - Matrix<Complex>::Identity(n, n)).cwiseAbs().maxCoeff());
    if (k > 0) max_step = std::max(max_step, operator_norm(Matrix<Complex>(u - path[k - 1].matrix())));
    if (k > 0 && k + 1 < path.size()) max_imag = std::max(max_imag, u.imag().cwiseAbs().maxCoeff());
  }
  const Complex det = path.back().determinant();
  Json j{{"schema", io::kSchema},
         {"permutation", perm},
         {"steps", cfg.steps},
         {"endpoint_det", io::scalar_to_json<Complex>(det)},
         {"max_unitarity_error", max_unitarity},
         {"max_step_norm", max_step},
         {"max_imag_intermediate", max_imag}};
  if (cfg.full_path) {
    Json mats = Json::array();
    for (const auto& u : path) mats.push_back(io::matrix_to_json<Complex>(u.matrix()));
    j["path"] = mats;
  }
  emit(io::dump(j), cfg.output);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame functions, Born probabilities and contextual measurement experiments"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* fit = app.add_subcommand("gleason-fit", "Fit a density matrix to a frame function");
  fit->add_option("--input", cfg.input, "Frame function fixture (JSON)")->required();
  auto* fit_dim = fit->add_option("--dim", cfg.dim, "Expected dimension");
  fit->add_option("--samples", cfg.samples, "Fit/validation sample count")->check(CLI::PositiveNumber);
  fit->add_option("--seed", cfg.seed, "RNG seed")->required();
  fit->add_option("--tolerance", cfg.tolerance, "Regularity threshold (default 1e-6)");
  fit->add_option("--output", cfg.output, "Output path (default stdout)");

  auto* frame = app.add_subcommand("frame-check", "Check the frame condition on random bases");
  frame->add_option("--input", cfg.input, "Frame function fixture (JSON)")->required();
  frame->add_option("--bases", cfg.bases, "Number of random bases")->check(CLI::PositiveNumber);
  frame->add_option("--seed", cfg.seed, "RNG seed")->required();
  frame->add_option("--tolerance", cfg.tolerance, "Accepted max deviation (default 1e-6)");
  frame->add_option("--output", cfg.output, "Output path (default stdout)");

  auto* piron = app.add_subcommand("piron-demo", "Emit a chain of descents as CSV (step,x,y,z,h,f)");
  piron->add_option("--hu", cfg.hu, "Latitude h(u) of the start vector");
  piron->add_option("--hv", cfg.hv, "Latitude h(v) of the end vector");
  piron->add_option("--dphi", cfg.dphi_deg, "Longitude difference in degrees");
  piron->add_option("--max-len", cfg.max_len, "Maximum number of descent steps");
  piron->add_option("--input", cfg.input, "Real frame function on R^3 (default cos^2 to the z pole)");
  piron->add_option("--output", cfg.output, "Output path (default stdout)");

  auto* magic = app.add_subcommand("magic-check", "Check a grid candidate g against the scalar lemma");
  magic->add_option("--input", cfg.input, "Candidate fixture (JSON)")->required();
  magic->add_option("--output", cfg.output, "Output path (default stdout)");

  auto* sim = app.add_subcommand("csm-sim", "Contextual measurement Monte-Carlo experiments");
  sim->add_option("--experiment", cfg.experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem2-fig1", "roundtrip", "classical"}));
  sim->add_option("--dim", cfg.dim, "Number of modalities per context")->check(CLI::Range(2, 64));
  sim->add_option("--field", cfg.field, "Scalar field, R or C")->check(CLI::IsMember({"R", "C"}));
  sim->add_option("--trials", cfg.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  sim->add_option("--seed", cfg.seed, "RNG seed")->required();
  sim->add_option("--csv", cfg.csv, "Write the frequency table as CSV");
  sim->add_option("--output", cfg.output, "Output path (default stdout)");

  auto* meas = app.add_subcommand("measure-demo", "Run a measurement chain plan");
  meas->add_option("--input", cfg.input, "Chain plan (JSON)")->required();
  meas->add_option("--runs", cfg.runs, "Repetitions")->check(CLI::PositiveNumber);
  meas->add_option("--seed", cfg.seed, "RNG seed")->required();
  meas->add_option("--csv", cfg.csv, "Write aggregate frequencies as CSV");
  meas->add_option("--output", cfg.output, "Output path (default stdout)");

  auto* upath = app.add_subcommand("unitary-path", "Unitary path from the identity to a permutation");
  upath->add_option("--perm", cfg.perm, "Permutation as comma-separated images, e.g. 1,0");
  upath->add_option("--steps", cfg.steps, "Number of steps")->check(CLI::Range(2, 1000000));
  upath->add_flag("--full", cfg.full_path, "Include every path matrix");
  upath->add_option("--output", cfg.output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kToolError;
  }

  try {
    if (fit->parsed()) return cmd_gleason_fit(cfg, fit_dim->count() > 0);
    if (frame->parsed()) return cmd_frame_check(cfg);
    if (piron->parsed()) return cmd_piron_demo(cfg);
    if (magic->parsed()) return cmd_magic_check(cfg);
    if (sim->parsed()) return cmd_csm_sim(cfg);
    if (meas->parsed()) return cmd_measure_demo(cfg);
    if (upath->parsed()) return cmd_unitary_path(cfg);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ChainTooLong:
      case ErrorCode::MonotonicityViolation:
      case ErrorCode::HypothesesNotMet:
        return kVerdictFail;
      default:
        return kToolError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kToolError;
  }
  return kToolError;
}
