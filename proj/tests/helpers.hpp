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

#pragma once

#include <catch_amalgamated.hpp>

#include "qdev/qdev.hpp"

namespace qdev::test {

inline ComplexMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c) { return rng.ginibre(r, c); }

// Entrywise partial trace over the last factor of a two-factor space.
inline ComplexMatrix trace_second(const ComplexMatrix& m, std::size_t a, std::size_t b) {
  ComplexMatrix out = ComplexMatrix::Zero(idx(a), idx(a));
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j)
      for (std::size_t k = 0; k < b; ++k) out(idx(i), idx(j)) += m(idx(i * b + k), idx(j * b + k));
  return out;
}

inline ComplexMatrix trace_first(const ComplexMatrix& m, std::size_t a, std::size_t b) {
  ComplexMatrix out = ComplexMatrix::Zero(idx(b), idx(b));
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t k = 0; k < a; ++k) out(idx(i), idx(j)) += m(idx(k * b + i), idx(k * b + j));
  return out;
}

}  // namespace qdev::test
