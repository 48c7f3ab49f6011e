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

// Qubit superbroadcasting: closed-form scaling factors for the optimal
// universal and phase-covariant N -> M broadcasters, the thresholds r*, and
// a Choi-level construction of the universal broadcaster used as an oracle.

#include <optional>

#include "qdev/channel.hpp"
#include "qdev/symmetry.hpp"

namespace qdev {

enum class Flavor { universal, phase };

inline std::string to_string(Flavor f) { return f == Flavor::universal ? "universal" : "phase"; }

// Number of receivers; `unbounded()` is the M = infinity limit, which has
// its own code path.
struct Receivers {
  std::size_t count = 0;
  bool infinite = false;

  static Receivers finite(std::size_t m) { return {m, false}; }
  static Receivers unbounded() { return {0, true}; }
  std::string str() const { return infinite ? "inf" : std::to_string(count); }
  bool operator==(const Receivers&) const = default;
};

struct ScalingResult {
  double p = 0.0;
  bool superbroadcasts = false;
};

inline ScalingResult make_scaling(double p) { return {p, p > 1.0 + 1e-12}; }

inline void check_broadcast_args(std::size_t n, Receivers m, double r) {
  if (n < 1) throw DomainError("broadcast: N must be >= 1");
  if (!m.infinite && m.count <= n) throw DomainError("broadcast: M must exceed N");
  if (!(r > 0.0)) throw DomainError("broadcast: r must be > 0 (use the r -> 0 diagnostic)");
  if (!(r <= 1.0)) throw DomainError("broadcast: r must be <= 1");
}

// p = -((M+2)/(M r)) ((1-r^2)/4)^{N/2} sum_l d_l/(l+1) sum_m m ((1-r)/(1+r))^m,
// prefactor -1/r for M = infinity. The weight is evaluated as
// ((1+r)/2)^{N/2-m} ((1-r)/2)^{N/2+m}, finite at r = 1.
inline ScalingResult universal_scaling(std::size_t n, Receivers m, double r) {
  check_broadcast_args(n, m, r);
  double acc = 0.0;
  for (SpinRep l : spin_labels(n)) {
    double inner = 0.0;
    for (std::size_t a = 0; a < l.dim(); ++a) {
      const double mm = l.m(a);
      inner += mm * many_copies_weight(n, r, -mm);
    }
    acc += cg_multiplicity_real(n, l) / (l.l() + 1.0) * inner;
  }
  const double pre = m.infinite ? -1.0 / r : -(double(m.count) + 2.0) / (double(m.count) * r);
  return make_scaling(pre * acc);
}

// Orthonormal eigenvectors of J_x^{(l)}; the eigenvalues are exactly
// -l, ..., l in ascending order, matching Eigen's ordering.
inline RealMatrix jx_eigenvectors(SpinRep l) {
  static MemoCache<int, RealMatrix> cache;
  return cache.get(l.twice(), [&] {
    auto sp = eigh(spin_operator(l, Axis::x));
    for (std::size_t i = 0; i < l.dim(); ++i) {
      if (std::abs(sp.values(idx(i)) - (-l.l() + double(i))) > 1e-8) {
        throw InvariantError("jx_eigenvectors: unexpected spectrum");
      }
    }
    return RealMatrix(sp.vectors.real());
  });
}

// ((1-r^2)/4)^{N/2} [exp(t J_x^{(l)})]_{a,a+1} with t = log((1+r)/(1-r)),
// for a = 0 .. 2l-1 (consecutive magnetic numbers).
inline std::vector<double> weighted_exp_jx_offdiag(std::size_t n, SpinRep l, double r) {
  const RealMatrix v = jx_eigenvectors(l);
  std::vector<double> w(l.dim());
  for (std::size_t i = 0; i < l.dim(); ++i) w[i] = many_copies_weight(n, r, -l.l() + double(i));
  std::vector<double> out(l.dim() > 0 ? l.dim() - 1 : 0, 0.0);
  for (std::size_t a = 0; a + 1 < l.dim(); ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.dim(); ++i) s += w[i] * v(idx(a), idx(i)) * v(idx(a + 1), idx(i));
    out[a] = s;
  }
  return out;
}

// <q+1| J_x^{(j)} |q> = sqrt(j(j+1) - q(q+1)) / 2.
inline double jx_element(double j, double q) { return 0.5 * std::sqrt(j * (j + 1) - q * (q + 1)); }

// p = (4/(M r)) ((1-r^2)/4)^{N/2} sum_l d_l sum_n [exp(t J_x^{(l)})]_{n,n+1} [J_x^{(M/2)}]_{q,q+1}
// with q = n for even M - N and q = n + 1/2 for odd M - N. For M = infinity
// the J_x factor times 4/(M r) tends to 1/r.
inline ScalingResult phase_scaling(std::size_t n, Receivers m, double r) {
  check_broadcast_args(n, m, r);
  const bool odd = !m.infinite && (m.count - n) % 2 == 1;
  const double j = m.infinite ? 0.0 : double(m.count) / 2.0;
  double acc = 0.0;
  for (SpinRep l : spin_labels(n)) {
    const auto e = weighted_exp_jx_offdiag(n, l, r);
    double inner = 0.0;
    for (std::size_t a = 0; a < e.size(); ++a) {
      // Index a pairs magnetic numbers (l - a, l - a - 1): n = l - a - 1.
      const double nm = l.l() - double(a) - 1.0;
      const double q = odd ? nm + 0.5 : nm;
      inner += e[a] * (m.infinite ? 1.0 : jx_element(j, q));
    }
    acc += cg_multiplicity_real(n, l) * inner;
  }
  const double pre = m.infinite ? 1.0 / r : 4.0 / (double(m.count) * r);
  return make_scaling(pre * acc);
}

inline ScalingResult scaling(Flavor f, std::size_t n, Receivers m, double r) {
  return f == Flavor::universal ? universal_scaling(n, m, r) : phase_scaling(n, m, r);
}

// The r -> 0 limit is a 0/0 form; reported numerically at r = 1e-6.
inline constexpr double kSmallR = 1e-6;

inline ScalingResult scaling_near_zero(Flavor f, std::size_t n, Receivers m) {
  return scaling(f, n, m, kSmallR);
}

// Scan grid for r*: uniform points plus points accumulating at r = 1, where
// the largest root sits for large N.
inline std::vector<double> rstar_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 400; ++i) g.push_back(kSmallR + (1.0 - kSmallR) * i / 400.0);
  for (int k = 40; k <= 200; ++k) g.push_back(1.0 - std::pow(10.0, -k / 20.0));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// Largest root of p(r) = 1 on (0, 1], or none when p <= 1 on the whole grid.
// The topmost sign change on the scan grid brackets it; bisection to 1e-10.
inline std::optional<double> r_star(std::size_t n, Receivers m, Flavor f, double tol = 1e-10) {
  check_broadcast_args(n, m, 0.5);
  auto g = [&](double r) { return scaling(f, n, m, r).p - 1.0; };
  const auto grid = rstar_grid();
  std::optional<std::size_t> hit;
  double above_prev = g(grid.back());
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    const double v = g(grid[i]);
    if (v > 0.0 && above_prev <= 0.0) {
      hit = i;
      break;
    }
    above_prev = v;
  }
  if (!hit) return std::nullopt;
  double lo = grid[*hit], hi = grid[*hit + 1];
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// -------------------------------------------------- universal Choi oracle

inline ComplexMatrix pauli_y() {
  ComplexMatrix y(2, 2);
  y << 0, -kI, kI, 0;
  return y;
}

// Optimal universal broadcaster on (C^2)^{(x)M} (x) (C^2)^{(x)N}:
// S_B = sum_l (2l+1)/(2J_l+1) P^{J_l}_{M/2,l} (x) I_{d_l}, J_l = M/2 - l,
// embedded with the symmetric output isometry and the coupled input basis,
// then conjugated by sigma_y^{(x)N} on the input.
inline ChoiOperator universal_superbro_choi(std::size_t n, std::size_t m) {
  if (n < 1 || m <= n) throw DomainError("universal_superbro_choi: need 1 <= N < M");
  checked_pow(2, m + n);
  const std::size_t dout = std::size_t{1} << m, din = std::size_t{1} << n;
  const ComplexMatrix wout = symmetric_isometry(2, m);
  const SpinRep jout = SpinRep::from_twice(int(m));
  const CoupledBasis basis = qubit_coupled_basis(n);
  ComplexMatrix r = ComplexMatrix::Zero(idx(dout * din), idx(dout * din));
  for (const auto& block : basis.blocks) {
    const SpinRep l = block.l;
    const SpinRep jl = SpinRep::from_twice(int(m) - l.twice());
    const ComplexMatrix p = cg_projector(jout, l, jl);
    const double c = double(l.dim()) / double(jl.dim());
    for (const auto& w : block.copies) {
      ComplexMatrix e = tensor(wout, w);
      r += c * e * p * e.adjoint();
    }
  }
  ComplexMatrix y = tensor(ComplexMatrix::Identity(idx(dout), idx(dout)), tensor_power(pauli_y(), n));
  return ChoiOperator(hermitian_part(y * r * y.adjoint()), dout, din);
}

// Global output for N copies of rho = (I + r sigma_z)/2.
inline ComplexMatrix broadcast_output(const ChoiOperator& choi, std::size_t n, double r) {
  ComplexMatrix rho(2, 2);
  rho << (1 + r) / 2, 0, 0, (1 - r) / 2;
  return apply_choi(choi, tensor_power(rho, n));
}

struct OracleComparison {
  double formula_p = 0, direct_p = 0, diff = 0;
};

inline OracleComparison oracle_compare(std::size_t n, std::size_t m, double r) {
  check_broadcast_args(n, Receivers::finite(m), r);
  const ChoiOperator choi = universal_superbro_choi(n, m);
  const ComplexMatrix out = broadcast_output(choi, n, r);
  const ComplexMatrix site = partial_trace(out, SystemShape::uniform(2, m), {0});
  OracleComparison oc;
  oc.direct_p = (site(0, 0) - site(1, 1)).real() / r;
  oc.formula_p = universal_scaling(n, Receivers::finite(m), r).p;
  oc.diff = std::abs(oc.direct_p - oc.formula_p);
  return oc;
}

}  // namespace qdev
