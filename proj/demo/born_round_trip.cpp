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


// Draw a random qutrit density matrix, sample its frame function, and fit it back.

#include <gleason/gleason.hpp>

#include <cstdio>

int main() {
  using namespace gleason;
  auto rho = random_density_matrix<Complex>(3, 2, 7);
  auto f = FrameFunction<Complex>::born(rho);
  auto rep = reconstruct_rho(f, 200, 11);
  double err = (rep.fitted_rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff();
  std::printf("verdict %s, max residual %.3g, max entry error %.3g\n", to_string(rep.verdict), rep.max_residual, err);
  return rep.verdict == Verdict::Regular ? 0 : 1;
}
