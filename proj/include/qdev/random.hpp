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

// Seeded random generators for property suites and CLI diagnostics.

#include <random>

#include "qdev/tensor.hpp"

namespace qdev {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  Complex cnormal() { return {normal(), normal()}; }

  ComplexMatrix ginibre(std::size_t rows, std::size_t cols) {
    ComplexMatrix g(idx(rows), idx(cols));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cnormal();
    return g;
  }

  StateVector state(std::size_t d) {
    StateVector v = ginibre(d, 1).col(0);
    return v / v.norm();
  }

  // Haar unitary via QR with the phase fix on R's diagonal.
  ComplexMatrix unitary(std::size_t d) {
    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, d));
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
      Complex ph = r(k, k) / std::abs(r(k, k));
      q.col(k) *= ph;
    }
    return q;
  }

  // Hilbert-Schmidt random mixed state of the given rank.
  ComplexMatrix density(std::size_t d, std::size_t rank = 0) {
    if (rank == 0) rank = d;
    ComplexMatrix g = ginibre(d, rank);
    ComplexMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  ComplexMatrix hermitian(std::size_t d) {
    ComplexMatrix g = ginibre(d, d);
    return (g + g.adjoint()) / 2.0;
  }

  // Kraus operators of a random trace-preserving channel: slices of a Haar
  // isometry in -> out (x) anc.
  std::vector<ComplexMatrix> kraus(std::size_t in, std::size_t out, std::size_t count) {
    ComplexMatrix u = unitary(out * count);
    if (in > out * count) throw DomainError("random kraus: ancilla too small");
    ComplexMatrix v = u.leftCols(idx(in));
    std::vector<ComplexMatrix> ops(count, ComplexMatrix::Zero(idx(out), idx(in)));
    for (std::size_t a = 0; a < out; ++a)
      for (std::size_t i = 0; i < count; ++i) ops[i].row(idx(a)) = v.row(idx(a * count + i));
    return ops;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qdev
