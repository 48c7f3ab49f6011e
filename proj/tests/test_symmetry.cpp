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


#include "helpers.hpp"

using namespace qdev;
using Catch::Matchers::WithinAbs;

namespace {

// Number of multisets of size n from d symbols, by brute-force enumeration of
// sorted tuples.
std::size_t count_multisets(std::size_t d, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < checked_pow(d, n); ++i) {
    const auto dig = digits(i, d, n);
    if (std::is_sorted(dig.begin(), dig.end())) ++c;
  }
  return c;
}

SpinRep half(int twice) { return SpinRep::from_twice(twice); }

}  // namespace

TEST_CASE("symmetric subspace dimension", "[symmetry]") {
  CHECK(sym_dim(2, 2) == 3);
  CHECK(sym_dim(2, 1) == 2);
  CHECK(sym_dim(5, 1) == 5);
  for (std::size_t d = 1; d <= 4; ++d)
    for (std::size_t n = 1; n <= 5; ++n) CHECK(sym_dim(d, n) == count_multisets(d, n));
}

TEST_CASE("symmetric projector", "[symmetry]") {
  ComplexMatrix swap = permutation_matrix(2, {1, 0}, 2);
  CHECK(max_abs(sym_projector(2, 2) - (ComplexMatrix::Identity(4, 4) + swap) / 2.0) < 1e-15);
  for (std::size_t d = 2; d <= 4; ++d) CHECK_THAT(sym_projector(d, 2).trace().real(), WithinAbs(d * (d + 1) / 2.0, 1e-12));
  for (auto [d, n] : {std::pair<std::size_t, std::size_t>{2, 3}, {3, 3}, {2, 5}, {2, 9}, {3, 4}}) {
    ComplexMatrix p = sym_projector(d, n);
    CHECK(max_abs(p * p - p) < 1e-12);
    CHECK(max_abs(p - p.adjoint()) < 1e-14);
    CHECK_THAT(p.trace().real(), WithinAbs(double(sym_dim(d, n)), 1e-10));
    ComplexMatrix w = symmetric_isometry(d, n);
    CHECK(max_abs(w * w.adjoint() - p) < 1e-12);
  }
  CHECK_THROWS_AS(sym_projector(2, 13), SizeError);
}

TEST_CASE("occupation vectors", "[symmetry]") {
  CHECK(max_abs(occupation_vector(2, {{2, 0}}) - ket(4, 0)) < 1e-15);
  StateVector t = (ket(4, 1) + ket(4, 2)) / std::sqrt(2.0);
  CHECK(max_abs(occupation_vector(2, {{1, 1}}) - t) < 1e-15);
  const auto occs = enumerate_occupations(2, 3);
  REQUIRE(occs.size() == 4);
  CHECK(occs.front().counts == std::vector<std::size_t>{3, 0});
  ComplexMatrix g(4, 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      g(idx(a), idx(b)) = occupation_vector(2, occs[a]).dot(occupation_vector(2, occs[b]));
  CHECK(max_abs(g - ComplexMatrix::Identity(4, 4)) < 1e-14);
  CHECK(std::is_sorted(occs.begin(), occs.end()));
}

TEST_CASE("permutation matrices represent the symmetric group", "[symmetry]") {
  CHECK(max_abs(permutation_matrix(3, {0, 1, 2}, 2) - ComplexMatrix::Identity(8, 8)) == 0.0);
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  CHECK(max_abs(permutation_matrix(2, {1, 0}, 2) - swap) == 0.0);
  const auto perms = all_permutations(3);
  for (const auto& s : perms)
    for (const auto& t : perms) {
      std::vector<std::size_t> st(3);
      for (std::size_t k = 0; k < 3; ++k) st[k] = s[t[k]];
      CHECK(max_abs(permutation_matrix(3, s, 3) * permutation_matrix(3, t, 3) - permutation_matrix(3, st, 3)) == 0.0);
    }
  // a state on factor 0 moves to factor tau[0]
  ComplexMatrix a = ket(2, 1) * ket(2, 1).adjoint(), z = ket(2, 0) * ket(2, 0).adjoint();
  ComplexMatrix p = permutation_matrix(3, {2, 0, 1}, 2);
  CHECK(max_abs(p * tensor({a, z, z}) * p.transpose() - tensor({z, z, a})) == 0.0);
  CHECK_THROWS_AS(permutation_matrix(3, {0, 0, 1}, 2), DomainError);

  Rng rng(31);
  for (std::size_t n = 2; n <= 4; ++n) {
    ComplexMatrix rho = tensor_power(rng.density(2), n);
    for (const auto& tau : all_permutations(n)) {
      ComplexMatrix pt = permutation_matrix(n, tau, 2);
      CHECK(max_abs(pt * rho - rho * pt) < 1e-12);
    }
  }
}

TEST_CASE("group average commutes with the group", "[symmetry][property]") {
  Rng rng(32);
  for (std::size_t n = 2; n <= 3; ++n) {
    ComplexMatrix x = twirl_permutations(rng.ginibre(checked_pow(2, n), checked_pow(2, n)), 2, n);
    for (const auto& tau : all_permutations(n)) {
      ComplexMatrix p = permutation_matrix(n, tau, 2);
      CHECK(max_abs(p * x - x * p) < 1e-12);
    }
  }
}

TEST_CASE("Clebsch-Gordan multiplicities", "[symmetry]") {
  CHECK(cg_multiplicity(2, half(2)) == 1);
  CHECK(cg_multiplicity(2, half(0)) == 1);
  CHECK(cg_multiplicity(3, half(3)) == 1);
  CHECK(cg_multiplicity(3, half(1)) == 2);
  for (std::size_t n = 1; n <= 12; ++n) {
    std::uint64_t total = 0;
    for (auto j : spin_labels(n)) total += (j.dim()) * cg_multiplicity(n, j);
    CHECK(total == (std::uint64_t{1} << n));
  }
  CHECK_THROWS_AS(cg_multiplicity(3, half(2)), DomainError);
  CHECK_THROWS_AS(cg_multiplicity(3, half(5)), DomainError);
}

TEST_CASE("spin operators", "[symmetry]") {
  ComplexMatrix sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  CHECK(max_abs(spin_operator(half(1), Axis::z) - sz / 2.0) < 1e-15);
  CHECK(max_abs(spin_operator(half(1), Axis::x) - sx / 2.0) < 1e-15);
  ComplexMatrix jx1 = spin_operator(half(2), Axis::x);
  CHECK_THAT(jx1(0, 1).real(), WithinAbs(1 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(jx1(1, 2).real(), WithinAbs(1 / std::sqrt(2.0), 1e-15));
  for (int t = 0; t <= 10; ++t) {
    const SpinRep s = half(t);
    ComplexMatrix x = spin_operator(s, Axis::x), y = spin_operator(s, Axis::y), z = spin_operator(s, Axis::z);
    const auto n = idx(s.dim());
    CHECK(max_abs(x * x + y * y + z * z - s.l() * (s.l() + 1) * ComplexMatrix::Identity(n, n)) < 1e-12);
    CHECK(max_abs(x * y - y * x - kI * z) < 1e-12);
  }
}

TEST_CASE("Clebsch-Gordan projectors", "[symmetry]") {
  CHECK(max_abs(cg_projector(half(1), half(1), half(2)) - sym_projector(2, 2)) < 1e-14);
  ComplexMatrix singlet = cg_projector(half(1), half(1), half(0));
  CHECK_THAT(singlet.trace().real(), WithinAbs(1.0, 1e-14));
  CHECK_THAT(std::abs(singlet(1, 2) + 0.5), WithinAbs(0.0, 1e-14));
  for (int tj = 0; tj <= 4; ++tj)
    for (int tl = 0; tl <= 4; ++tl) {
      const std::size_t dj = std::size_t(tj) + 1, dl = std::size_t(tl) + 1;
      ComplexMatrix sum = ComplexMatrix::Zero(idx(dj * dl), idx(dj * dl));
      for (int tJ = std::abs(tj - tl); tJ <= tj + tl; tJ += 2) {
        ComplexMatrix p = cg_projector(half(tj), half(tl), half(tJ));
        CHECK(max_abs(p * p - p) < 1e-12);
        CHECK_THAT(p.trace().real(), WithinAbs(tJ + 1.0, 1e-10));
        const double f = (tJ + 1.0) / double(dl);
        CHECK(max_abs(partial_trace(p, SystemShape{dj, dl}, {1}) - f * ComplexMatrix::Identity(idx(dl), idx(dl))) < 1e-10);
        const double g = (tJ + 1.0) / double(dj);
        CHECK(max_abs(partial_trace(p, SystemShape{dj, dl}, {0}) - g * ComplexMatrix::Identity(idx(dj), idx(dj))) < 1e-10);
        sum += p;
      }
      CHECK(max_abs(sum - ComplexMatrix::Identity(idx(dj * dl), idx(dj * dl))) < 1e-10);
    }
  CHECK_THROWS_AS(cg_projector(half(1), half(1), half(4)), DomainError);
}

TEST_CASE("many-copies decomposition", "[symmetry]") {
  auto one = many_copies_decompose(0.4, 1);
  REQUIRE(one.blocks.size() == 1);
  CHECK_THAT(one.blocks[0].weights[0], WithinAbs(0.7, 1e-15));
  CHECK_THAT(one.blocks[0].weights[1], WithinAbs(0.3, 1e-15));
  for (auto& b : many_copies_decompose(0.0, 5).blocks)
    for (double w : b.weights) CHECK_THAT(w, WithinAbs(1.0 / 32, 1e-15));
  for (std::size_t n = 1; n <= 8; ++n)
    for (double r : {0.0, 0.3, 0.9, 1.0}) CHECK_THAT(many_copies_decompose(r, n).total(), WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(many_copies_decompose(1.2, 2), DomainError);

  for (std::size_t n = 1; n <= 4; ++n) {
    const auto basis = qubit_coupled_basis(n);
    CHECK(is_unitary(basis.unitary()));
    for (double r : {0.0, 0.35, 0.8, 1.0}) {
      ComplexMatrix rho(2, 2);
      rho << (1 + r) / 2, 0, 0, (1 - r) / 2;
      CHECK(max_abs(reconstruct_many_copies(many_copies_decompose(r, n), basis) - tensor_power(rho, n)) < 1e-10);
    }
  }
}

TEST_CASE("permutation-invariant operators have the Schur-Weyl block form", "[symmetry][property]") {
  Rng rng(33);
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto basis = qubit_coupled_basis(n);
    const ComplexMatrix u = basis.unitary();
    ComplexMatrix x = twirl_permutations(rng.ginibre(checked_pow(2, n), checked_pow(2, n)), 2, n);
    ComplexMatrix y = u.adjoint() * x * u;
    // rebuild from one block per spin label, identity on multiplicity
    ComplexMatrix rebuilt = ComplexMatrix::Zero(y.rows(), y.cols());
    Eigen::Index off = 0;
    for (const auto& b : basis.blocks) {
      const auto dim = idx(b.l.dim());
      const ComplexMatrix block = y.block(off, off, dim, dim);
      for (std::size_t c = 0; c < b.copies.size(); ++c) rebuilt.block(off + idx(c) * dim, off + idx(c) * dim, dim, dim) = block;
      off += dim * idx(b.copies.size());
    }
    CHECK(max_abs(rebuilt - y) < 1e-12);
  }
}
