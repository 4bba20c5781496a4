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
/// Shared plumbing: error type, tolerance record, seed splitting and the
/// chunked parallel driver used by every Monte-Carlo routine.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gleason {

enum class ErrorCode {
  DegenerateInput,
  DimensionMismatch,
  EvaluationRange,
  InsufficientSamples,
  InvalidParams,
  InvalidArgument,
  AtPole,
  AtEquator,
  NotOnDescent,
  ChainTooLong,
  MonotonicityViolation,
  OffGrid,
  OffTable,
  HypothesesNotMet,
  PreconditionUnmet,
  ZeroProbabilitySector,
  NotUnitary,
  Parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DEGENERATE_INPUT";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::EvaluationRange: return "EVALUATION_RANGE";
    case ErrorCode::InsufficientSamples: return "INSUFFICIENT_SAMPLES";
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::AtPole: return "AT_POLE";
    case ErrorCode::AtEquator: return "AT_EQUATOR";
    case ErrorCode::NotOnDescent: return "NOT_ON_DESCENT";
    case ErrorCode::ChainTooLong: return "CHAIN_TOO_LONG";
    case ErrorCode::MonotonicityViolation: return "MONOTONICITY_VIOLATION";
    case ErrorCode::OffGrid: return "OFF_GRID";
    case ErrorCode::OffTable: return "OFF_TABLE";
    case ErrorCode::HypothesesNotMet: return "HYPOTHESES_NOT_MET";
    case ErrorCode::PreconditionUnmet: return "PRECONDITION_UNMET";
    case ErrorCode::ZeroProbabilitySector: return "ZERO_PROBABILITY_SECTOR";
    case ErrorCode::NotUnitary: return "NOT_UNITARY";
    case ErrorCode::Parse: return "PARSE";
  }
  return "UNKNOWN";
}

/// All library failures are reported through this exception; `code()` is the
/// machine-readable part.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Numerical thresholds used across the library. Every check reads from one of
/// these fields so a run can be reproduced by recording a single record.
struct Tolerances {
  double structural = 1e-12;   // hermiticity, normalization, exact identities
  double derived = 1e-10;      // orthogonality, idempotence, probability sums
  double sigmas = 3.0;         // statistical acceptance band
  double regularity = 1e-6;    // max validation residual for a regular frame function
  double tabulated_match = 1e-3;  // projector distance for tabulated lookup
  double unitary_input = 1e-8;    // NOT_UNITARY threshold on user-supplied matrices
  double chain_vertex = 1e-8;     // Piron chain vertices lying on the previous descent
  double monotone_slack = 1e-8;
  double min_latitude_gap = 1e-6;
  double gram_schmidt_sigma = 1e-8;  // smallest singular value accepted by gram_schmidt
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

// ---------------------------------------------------------------------------
// Seeds
//
// Child seeds are derived as splitmix64(seed ^ splitmix64(index + 1)). Work is
// cut into fixed-size chunks and each chunk draws from its own child seed, so
// results never depend on how many threads executed the chunks.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

/// Thread cap from GLEASON_CSM_THREADS, else hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GLEASON_CSM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return hw;
}

inline constexpr std::size_t kChunkSize = 4096;

/// Runs `body(chunk_index, begin, end, chunk_seed)` over [0, n) in chunks of
/// kChunkSize and returns the per-chunk results in chunk order.
template <class Result, class Body>
std::vector<Result> run_chunked(std::size_t n, std::uint64_t seed, Body&& body) {
  const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<Result> out(n_chunks);
  auto work = [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    out[c] = body(c, begin, end, child_seed(seed, c));
  };
  const unsigned threads = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n_chunks, 1));
  if (threads <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) work(c);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(threads);
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < n_chunks; c += threads) work(c);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

}  // namespace gleason
