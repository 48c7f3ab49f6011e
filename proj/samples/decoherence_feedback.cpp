// Copyright 2026 The qdev Authors
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


// Phase-kick decoherence on a qubit: decompose into random phase flips,
// record which flip happened, undo it.

#include <iostream>

#include "qdev/qdev.hpp"

int main() {
  using namespace qdev;
  Rng rng(7);
  for (double lambda : {0.1, 0.5, 1.0, 3.0}) {
    const auto xi = phase_kick(lambda);
    const auto dec = random_unitary_decomp(xi);
    const ComplexMatrix rho = rng.density(2, 2);
    const auto rep = invert_by_feedback(dec, rho);
    std::cout << "lambda " << lambda << ": bits " << rep.bits_used << " (h = " << phase_kick_info(lambda)
              << "), damage " << trace_distance(rep.decohered, rho) << ", after feedback "
              << trace_distance(rep.recovered, rho) << '\n';
  }
}
