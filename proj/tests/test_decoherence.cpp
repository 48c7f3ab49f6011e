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


#include <numbers>

#include "helpers.hpp"

using namespace qdev;
using Catch::Approx;

namespace {

// Normalized Gram matrix of `rank` random vectors in C^rank.
CorrelationMatrix random_xi(std::size_t d, Rng& rng, std::size_t rank = 0) {
  if (rank == 0) rank = d;
  const ComplexMatrix g = rng.ginibre(rank, d);
  ComplexMatrix xi = g.adjoint() * g;
  const RealVector s = xi.diagonal().real().cwiseSqrt().cwiseInverse();
  xi = s.cast<Complex>().asDiagonal() * xi * s.cast<Complex>().asDiagonal();
  for (Eigen::Index k = 0; k < xi.rows(); ++k) xi(k, k) = 1.0;
  return CorrelationMatrix(hermitian_part(xi));
}

CorrelationMatrix ones(std::size_t d) { return CorrelationMatrix(ComplexMatrix::Ones(idx(d), idx(d))); }
CorrelationMatrix eye(std::size_t d) { return CorrelationMatrix(ComplexMatrix::Identity(idx(d), idx(d))); }

// Sum_kl xi_kl |k><l| (x) |k><l|, out (x) in.
ChoiOperator schur_choi(const CorrelationMatrix& xi) {
  const std::size_t d = xi.dim();
  ComplexMatrix r = ComplexMatrix::Zero(idx(d * d), idx(d * d));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l) r(idx(k * d + k), idx(l * d + l)) = xi.xi()(idx(k), idx(l));
  return ChoiOperator(r, d, d);
}

}  // namespace

TEST_CASE("correlation matrix validation", "[decoherence]") {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 0) = 0.9;
  CHECK_THROWS_AS(CorrelationMatrix(m), InvariantError);
  m = ComplexMatrix::Ones(2, 2);
  m(0, 1) = 1.5;
  CHECK_THROWS_AS(CorrelationMatrix(m), InvariantError);
  m(1, 0) = 1.5;
  CHECK_THROWS_AS(CorrelationMatrix(m), InvariantError);
  // Hermitian, unit diagonal, bounded entries, but not PSD.
  ComplexMatrix x(3, 3);
  x << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  CHECK_THROWS_AS(CorrelationMatrix(x), InvariantError);
  CHECK_THROWS_AS(CorrelationMatrix(ComplexMatrix::Ones(2, 3)), ShapeError);
  CHECK_THROWS_AS(schur_apply(ones(2), ComplexMatrix::Identity(3, 3)), ShapeError);
}

TEST_CASE("Schur maps: limits and iteration", "[decoherence]") {
  Rng rng(1);
  const DensityMatrix rho(rng.density(3));
  CHECK(max_abs(schur_apply(ones(3), rho).mat() - rho.mat()) == 0.0);
  CHECK(max_abs(schur_apply(eye(3), rho).mat() - rho_infinity(rho).mat()) == 0.0);

  const CorrelationMatrix xi = random_xi(3, rng);
  ComplexMatrix cur = rho.mat();
  for (int n = 1; n <= 8; ++n) {
    cur = schur_apply(xi, cur);
    for (Eigen::Index k = 0; k < 3; ++k)
      for (Eigen::Index l = 0; l < 3; ++l) {
        const double expect = std::pow(std::abs(xi.xi()(k, l)), n) * std::abs(rho.mat()(k, l));
        CHECK(std::abs(cur(k, l)) == Approx(expect).epsilon(1e-12).margin(1e-300));
      }
  }
}

TEST_CASE("completely decohered state", "[decoherence]") {
  ComplexMatrix dg = ComplexMatrix::Zero(3, 3);
  dg(0, 0) = 0.2, dg(1, 1) = 0.5, dg(2, 2) = 0.3;
  CHECK(max_abs(rho_infinity(dg) - dg) == 0.0);
  StateVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(max_abs(rho_infinity(ComplexMatrix(plus * plus.adjoint())) - ComplexMatrix::Identity(2, 2) / 2.0) < 1e-15);
  Rng rng(2);
  const ComplexMatrix r = rng.density(4);
  CHECK(rho_infinity(r).trace().real() == Approx(1.0));
}

TEST_CASE("environment model reproduces the correlations", "[decoherence]") {
  Rng rng(3);
  const auto check_gram = [](const CorrelationMatrix& xi) {
    const auto env = environment_model(xi);
    for (std::size_t k = 0; k < xi.dim(); ++k) {
      CHECK(env.env_states[k].norm() == Approx(1.0).margin(1e-12));
      for (std::size_t l = 0; l < xi.dim(); ++l)
        CHECK(std::abs(env.env_states[l].dot(env.env_states[k]) - xi.xi()(idx(k), idx(l))) < 1e-10);
    }
    // U |k>|0> = |k>|e_k>.
    const std::size_t d = xi.dim();
    const ComplexMatrix v = env.dilation.isometry();
    for (std::size_t k = 0; k < d; ++k)
      CHECK((v.col(idx(k)) - tensor(ComplexMatrix(ket(d, k)), ComplexMatrix(env.env_states[k]))).norm() < 1e-10);
  };
  check_gram(eye(3));
  check_gram(ones(3));
  check_gram(phase_kick(0.7));
  CHECK(std::abs(environment_model(phase_kick(0.7)).env_states[0].dot(environment_model(phase_kick(0.7)).env_states[1])) ==
        Approx(std::exp(-0.7)));
  for (int t = 0; t < 10; ++t) check_gram(random_xi(2 + rng.index(3), rng, 1 + rng.index(2)));

  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng.index(4);
    const auto xi = random_xi(d, rng);
    const ComplexMatrix rho = rng.density(d);
    worst = std::max(worst, max_abs(environment_model(xi).apply(rho) - schur_apply(xi, rho)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("entropy exchange", "[decoherence]") {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + rng.index(3);
    const auto xi = random_xi(d, rng, 1 + rng.index(d));
    const ComplexMatrix rho = rng.density(d);
    CHECK(entropy_exchange(xi, rho) == Approx(entropy_bits(environment_model(xi).environment(rho))).margin(1e-8));
    const ComplexMatrix mixed = ComplexMatrix::Identity(idx(d), idx(d)) / double(d);
    CHECK(entropy_exchange(xi, mixed) == Approx(entropy_bits(xi.xi() / double(d))).margin(1e-12));
  }
  CHECK(entropy_exchange(ones(3), rng.density(3)) == Approx(0.0).margin(1e-10));
  for (std::size_t d = 2; d <= 4; ++d)
    CHECK(entropy_exchange(eye(d), ComplexMatrix::Identity(idx(d), idx(d)) / double(d)) == Approx(std::log2(double(d))));
  CHECK_THROWS_AS(entropy_exchange(eye(2), ComplexMatrix::Identity(3, 3)), ShapeError);
}

TEST_CASE("random-unitary decomposition", "[decoherence]") {
  const double lam = 0.8, c = std::exp(-lam);
  const auto pk = random_unitary_decomp(phase_kick(lam));
  REQUIRE(pk.weights.size() == 2);
  CHECK(pk.weights[0] == Approx((1 + c) / 2));
  CHECK(pk.weights[1] == Approx((1 - c) / 2));
  CHECK(std::abs(pk.phases[0](1)) < 1e-15);
  CHECK(std::abs(std::abs(pk.phases[1](1)) - std::numbers::pi) < 1e-12);
  CHECK(pk.entropy_bits() == Approx(phase_kick_info(lam)).margin(1e-12));

  for (std::size_t d = 2; d <= 3; ++d) {
    const auto one = random_unitary_decomp(ones(d));
    REQUIRE(one.weights.size() == 1);
    CHECK(one.weights[0] == Approx(1.0));
    CHECK(max_abs(one.unitary(0) - ComplexMatrix::Identity(idx(d), idx(d))) < 1e-12);
  }

  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 2 + std::size_t(t % 2);
    const auto xi = random_xi(d, rng, 1 + rng.index(d));
    const auto dec = random_unitary_decomp(xi);
    double sum = 0;
    for (double w : dec.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == Approx(1.0).margin(1e-9));
    CHECK(max_abs(dec.reconstruct() - xi.xi()) < 1e-9);
    for (std::size_t i = 0; i < dec.weights.size(); ++i) CHECK(is_unitary(dec.unitary(i)));
  }
  CHECK_THROWS_AS(random_unitary_decomp(eye(4)), OutOfScopeError);
  CHECK_THROWS_AS(random_unitary_decomp(ones(1)), DomainError);
}

TEST_CASE("feedback inversion", "[decoherence]") {
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + std::size_t(t % 2);
    const auto xi = random_xi(d, rng);
    const auto dec = random_unitary_decomp(xi);
    const ComplexMatrix rho = rng.density(d);
    const auto rep = invert_by_feedback(dec, rho);
    CHECK(max_abs(rep.decohered - schur_apply(xi, rho)) < 1e-9);
    CHECK(trace_distance(rep.recovered, rho) < 1e-12);
    CHECK(rep.bits_used == Approx(dec.entropy_bits()));
  }
  const auto triv = invert_by_feedback(random_unitary_decomp(ones(2)), rng.density(2));
  CHECK(triv.bits_used == 0.0);
  CHECK_THROWS_AS(invert_by_feedback(random_unitary_decomp(ones(2)), rng.density(3)), ShapeError);
}

TEST_CASE("no decomposition uses fewer bits than the entropy exchange", "[decoherence]") {
  Rng rng(7);
  int alternatives = 0;
  for (double lam : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double c = std::exp(-lam);
    const auto xi = phase_kick(lam);
    const double bound = entropy_exchange(xi, ComplexMatrix::Identity(2, 2) / 2.0);
    const auto minimal = random_unitary_decomp(xi);
    CHECK(minimal.entropy_bits() == Approx(bound).margin(1e-12));

    // Split each branch in two with a random ratio.
    RandomUnitaryDecomp split;
    for (std::size_t i = 0; i < minimal.weights.size(); ++i) {
      const double u = rng.uniform(0.1, 0.9);
      for (double f : {u, 1 - u}) {
        split.weights.push_back(f * minimal.weights[i]);
        split.phases.push_back(minimal.phases[i]);
      }
    }
    REQUIRE(max_abs(split.reconstruct() - xi.xi()) < 1e-12);
    CHECK(split.entropy_bits() >= bound - 1e-12);
    ++alternatives;

    // Phases 0, +-delta and pi: q cos(delta) - (1 - q) = c.
    for (int k = 0; k < 3; ++k) {
      const double delta = rng.uniform(0.0, std::acos(c));
      const double q = (1 + c) / (1 + std::cos(delta));
      RandomUnitaryDecomp alt;
      for (double ph : {delta, -delta}) {
        alt.weights.push_back(q / 2);
        alt.phases.push_back((RealVector(2) << 0.0, ph).finished());
      }
      alt.weights.push_back(1 - q);
      alt.phases.push_back((RealVector(2) << 0.0, std::numbers::pi).finished());
      REQUIRE(max_abs(alt.reconstruct() - xi.xi()) < 1e-12);
      CHECK(alt.entropy_bits() >= bound - 1e-12);
      const ComplexMatrix rho = rng.density(2);
      CHECK(trace_distance(invert_by_feedback(alt, rho).recovered, rho) < 1e-12);
      ++alternatives;
    }
  }
  CHECK(alternatives == 20);
}

TEST_CASE("phase kick model", "[decoherence]") {
  for (double lam : {0.0, 0.3, 1.0, 5.0}) {
    const RealVector ev = eigvalsh(phase_kick(lam).xi() / 2.0);
    CHECK(ev(0) == Approx((1 - std::exp(-lam)) / 2).margin(1e-12));
    CHECK(ev(1) == Approx((1 + std::exp(-lam)) / 2).margin(1e-12));
  }
  CHECK(phase_kick_info(0.0) == 0.0);
  CHECK(phase_kick_info(30.0) == Approx(1.0).margin(1e-6));
  const double p5 = (1 - std::exp(-5.0)) / 2;
  CHECK(phase_kick_info(5.0) == Approx(-p5 * std::log2(p5) - (1 - p5) * std::log2(1 - p5)).margin(1e-12));
  double prev = 0;
  for (double lam = 0.05; lam < 10; lam += 0.05) {
    const double v = phase_kick_info(lam);
    CHECK(v > prev);
    prev = v;
  }
  for (double lam : {2.0, 5.0, 10.0, 100.0}) CHECK(phase_kick_info(lam) < gaussian_kick_entropy(lam));
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK_THROWS_AS(phase_kick(-0.1), DomainError);
  CHECK_THROWS_AS(phase_kick_info(-1.0), DomainError);
}

TEST_CASE("algebraic properties of Schur maps", "[decoherence]") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + rng.index(3);
    const auto x1 = random_xi(d, rng), x2 = random_xi(d, rng, 1 + rng.index(d));
    const ComplexMatrix rho = rng.density(d);

    const CorrelationMatrix prod(ComplexMatrix(x1.xi().cwiseProduct(x2.xi())));
    CHECK(max_abs(schur_apply(x1, schur_apply(x2, rho)) - schur_apply(prod, rho)) < 1e-15);

    const double w = rng.uniform();
    const CorrelationMatrix mix(ComplexMatrix(w * x1.xi() + (1 - w) * x2.xi()));
    CHECK(max_abs(schur_apply(mix, rho) - (w * schur_apply(x1, rho) + (1 - w) * schur_apply(x2, rho))) < 1e-14);

    const ComplexMatrix dg = rho_infinity(rho);
    CHECK(max_abs(schur_apply(x1, dg) - dg) == 0.0);

    const auto choi = schur_choi(x1);
    const auto chk = channel_check(choi);
    CHECK(chk.cp);
    CHECK(chk.tp);
    CHECK(canonical_kraus(choi).size() <= d);
    CHECK(max_abs(apply_choi(choi, rho) - schur_apply(x1, rho)) < 1e-12);
    CHECK(is_psd(schur_apply(x1, DensityMatrix(rho)).mat()));
  }
}
