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


// Run the 1 -> 2 qubit cloning network on a random state and compare each
// output site with the input.

#include <iostream>

#include "qdev/qdev.hpp"

int main() {
  using namespace qdev;
  Rng rng(2026);
  const auto net = cloning_unitary(2);
  const StateVector psi = rng.state(2);

  // sites 1 and 2 carry the clones, site 0 the conjugate (optimal NOT)
  const ComplexMatrix out = net.dilation.joint(psi * psi.adjoint());
  for (std::size_t site : {1, 2}) {
    const ComplexMatrix clone = partial_trace(out, SystemShape{2, 2, 2}, {site});
    std::cout << "clone " << site << " fidelity " << (psi.adjoint() * clone * psi)(0, 0).real() << '\n';
  }
  const ComplexMatrix anti = partial_trace(out, SystemShape{2, 2, 2}, {0});
  std::cout << "anticlone fidelity " << (psi.transpose() * anti * psi.conjugate())(0, 0).real() << '\n';
  std::cout << "optimal single-clone fidelity 5/6 = " << 5.0 / 6.0 << '\n';
  std::cout << "global fidelity d[1]/d[2] = " << uclone_fidelity({2, 1, 2}) << '\n';
}
