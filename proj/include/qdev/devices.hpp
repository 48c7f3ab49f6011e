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

// Optimal universal and phase-covariant cloners and NOT gates, with their
// isometric and unitary realizations.

#include <array>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include "qdev/channel.hpp"
#include "qdev/symmetry.hpp"

namespace qdev {

// Reduced fraction of 64-bit integers.
struct Rational {
  std::uint64_t num = 0, den = 1;
  static Rational make(std::uint64_t n, std::uint64_t d) {
    if (d == 0) throw DomainError("Rational: zero denominator");
    const auto g = std::gcd(n, d);
    return {n / g, d / g};
  }
  double value() const { return double(num) / double(den); }
  bool operator==(const Rational&) const = default;
  // Exact comparison by cross multiplication.
  bool operator<(const Rational& o) const { return u128(num) * o.den < u128(o.num) * den; }
};

struct CloneSpec {
  std::size_t d = 2, n = 1, m = 2;

  void validate() const {
    if (d < 2) throw DomainError("CloneSpec: d must be >= 2");
    if (n < 1) throw DomainError("CloneSpec: N must be >= 1");
    if (m <= n) throw DomainError("CloneSpec: M must exceed N");
  }
  // Phase-covariant cloning needs M = N + k d.
  std::size_t phase_k() const {
    validate();
    if ((m - n) % d != 0) {
      throw DomainError("phase-covariant cloning needs (M - N) mod d = 0, got M - N = " +
                        std::to_string(m - n) + ", d = " + std::to_string(d));
    }
    return (m - n) / d;
  }
};

// ------------------------------------------------------- universal cloning

inline Rational uclone_fidelity_exact(const CloneSpec& s) {
  s.validate();
  return Rational::make(sym_dim(s.d, s.n), sym_dim(s.d, s.m));
}

inline double uclone_fidelity(const CloneSpec& s) { return uclone_fidelity_exact(s).value(); }

// Choi operator on (C^d)^{(x)M} (x) (C^d)^{(x)N}:
// (d[N]/d[M]) (P_S (x) I)(I^{(x)M-N} (x) |I^{(x)N}>><<I^{(x)N}|)(P_S (x) I).
// Trace preserving on the symmetric input subspace only.
inline ChoiOperator uclone_choi(const CloneSpec& s) {
  s.validate();
  const std::size_t dout = checked_pow(s.d, s.m), din = checked_pow(s.d, s.n);
  checked_pow(s.d, s.m + s.n);
  const std::size_t rest = checked_pow(s.d, s.m - s.n);
  StateVector max_ent = vec(ComplexMatrix::Identity(idx(din), idx(din)));
  ComplexMatrix mid = tensor(ComplexMatrix::Identity(idx(rest), idx(rest)),
                             ComplexMatrix(max_ent * max_ent.adjoint()));
  ComplexMatrix ps = tensor(sym_projector(s.d, s.m), ComplexMatrix::Identity(idx(din), idx(din)));
  ComplexMatrix r = uclone_fidelity(s) * ps * mid * ps;
  return ChoiOperator(hermitian_part(r), dout, din);
}

// (d[N]/d[M]) P_S (I^{(x)M-N} (x) rho) P_S for rho on the symmetric input
// subspace; anything with support outside it is rejected.
inline DensityMatrix uclone_apply_density(const CloneSpec& s, const ComplexMatrix& rho) {
  s.validate();
  const std::size_t din = checked_pow(s.d, s.n);
  checked_pow(s.d, s.m);
  if (rho.rows() != idx(din) || rho.cols() != idx(din)) {
    throw ShapeError("uclone_apply: input must live on (C^d)^{(x)N}");
  }
  ComplexMatrix psn = sym_projector(s.d, s.n);
  if (max_abs(psn * rho * psn - rho) > kTol) {
    throw DomainError("uclone_apply: input has support outside the symmetric subspace");
  }
  const std::size_t rest = checked_pow(s.d, s.m - s.n);
  ComplexMatrix ps = sym_projector(s.d, s.m);
  ComplexMatrix out =
      uclone_fidelity(s) * ps * tensor(ComplexMatrix::Identity(idx(rest), idx(rest)), rho) * ps;
  return DensityMatrix(hermitian_part(out), SystemShape::uniform(s.d, s.m));
}

inline DensityMatrix uclone_apply(const CloneSpec& s, const StateVector& psi) {
  s.validate();
  if (psi.size() != idx(s.d)) throw ShapeError("uclone_apply: psi must be a single-copy state");
  require_normalized(psi, "uclone_apply");
  StateVector in = tensor_power(psi, s.n);
  return uclone_apply_density(s, in * in.adjoint());
}

// Tr[psi^{(x)M} out].
inline double global_fidelity(const StateVector& psi, const DensityMatrix& out, std::size_t m) {
  StateVector t = tensor_power(psi, m);
  return (t.adjoint() * out.mat() * t)(0, 0).real();
}

// ------------------------------------------------------------ universal NOT

inline Rational unot_fidelity_exact(std::size_t d) {
  if (d < 2) throw DomainError("unot: d must be >= 2");
  return Rational::make(2, d + 1);
}

inline ChoiOperator unot_choi(std::size_t d) {
  unot_fidelity_exact(d);
  ComplexMatrix r = (2.0 / double(d + 1)) * sym_projector(d, 2);
  return ChoiOperator(std::move(r), d, d);
}

// <psi*| T(psi) |psi*>.
inline double not_fidelity(const ChoiOperator& r, const StateVector& psi) {
  StateVector target = psi.conjugate();
  ComplexMatrix out = apply_choi(r, ComplexMatrix(psi * psi.adjoint()));
  return (target.adjoint() * out * target)(0, 0).real();
}

// ------------------------------------------------ triplet isometry, network

// V = sum_{m,n} M^S_{mn} (x) |m>|n>, M^S_{mn} = (|m><n| + |n><m|)/sqrt(2(d+1)),
// mapping C^d into factors (0, 1, 2) = (system, second, third).
inline IsometryMatrix triplet_isometry(std::size_t d) {
  if (d < 2) throw DomainError("triplet_isometry: d must be >= 2");
  checked_pow(d, 3);
  const double c = 1.0 / std::sqrt(2.0 * double(d + 1));
  ComplexMatrix v = ComplexMatrix::Zero(idx(d * d * d), idx(d));
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) {
      // (|m><n| + |n><m|) (x) |m n>
      v(idx(m * d * d + m * d + n), idx(n)) += c;
      v(idx(n * d * d + m * d + n), idx(m)) += c;
    }
  return IsometryMatrix(std::move(v), d, d * d);
}

// Reduced state on the zero-based factors `keep` of V psi V^dag.
inline DensityMatrix branch_trace(const IsometryMatrix& v, const StateVector& psi,
                                  std::vector<std::size_t> keep) {
  require_normalized(psi, "branch_trace");
  if (psi.size() != idx(v.in_dim())) throw ShapeError("branch_trace: dimension mismatch");
  const std::size_t d = v.in_dim();
  if (v.out_dim() != d || v.anc_dim() != d * d) throw ShapeError("branch_trace: not a triplet isometry");
  StateVector out = v.mat() * psi;
  std::sort(keep.begin(), keep.end());
  const SystemShape shape = SystemShape::uniform(d, 3);
  ComplexMatrix red = partial_trace(out * out.adjoint(), shape, keep);
  return DensityMatrix(hermitian_part(red), SystemShape::uniform(d, keep.size()));
}

struct CloningNetwork {
  UnitaryDilation dilation;  // on system (x) ancilla(2 sites), input slots I (x) |phi>
  StateVector ancilla;
};

inline std::size_t add_mod(std::size_t a, std::size_t b, std::size_t d) { return (a + b) % d; }

// Unitary on (C^d)^{(x)3} assembled from V_pp, V^S_pq, V^A_pq acting on the
// ancilla basis, plus the ancilla sqrt(2/(d+1)) P_S sum_r |0>|r>. Input
// ordering system (x) ancilla; the sum is mod d.
inline CloningNetwork cloning_unitary(std::size_t d) {
  if (d < 2) throw DomainError("cloning_unitary: d must be >= 2");
  const std::size_t d3 = checked_pow(d, 3), d2 = d * d;
  auto k3 = [&](std::size_t a, std::size_t b, std::size_t c) { return a * d2 + b * d + c; };
  ComplexMatrix u = ComplexMatrix::Zero(idx(d3), idx(d3));
  // Column index of |x> (x) |pq> is x*d^2 + p*d + q.
  for (std::size_t p = 0; p < d; ++p) {
    // V_pp = sum_k |k>|k+p>|k+p><k+p|, against <pp|.
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t x = add_mod(k, p, d);
      u(idx(k3(k, x, x)), idx(x * d2 + p * d + p)) += 1.0;
    }
    for (std::size_t q = p + 1; q < d; ++q) {
      // V^{S/A}_pq = (1/sqrt2) sum_k |k>(|k+p>|k+q> +- |k+q>|k+p>)<k+q|,
      // paired with (<pq| +- <qp|)/sqrt2.
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t kp = add_mod(k, p, d), kq = add_mod(k, q, d);
        const std::size_t x = kq;
        for (int sign : {+1, -1}) {
          const double s = double(sign);
          const std::size_t rows[2] = {k3(k, kp, kq), k3(k, kq, kp)};
          const double rv[2] = {1.0, s};
          const std::size_t cols[2] = {x * d2 + p * d + q, x * d2 + q * d + p};
          const double cv[2] = {1.0, s};
          // products of the two 1/sqrt2 factors taken as exactly 1/2
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) u(idx(rows[a]), idx(cols[b])) += 0.5 * rv[a] * cv[b];
        }
      }
    }
  }
  StateVector seed = StateVector::Zero(idx(d2));
  for (std::size_t r = 0; r < d; ++r) seed(idx(r)) = 1.0;
  StateVector anc = std::sqrt(2.0 / double(d + 1)) * (sym_projector(d, 2) * seed);
  ComplexMatrix emb = UnitaryDilation::product_embedding(d, anc);
  return {UnitaryDilation(std::move(u), std::move(emb), d, d2), anc};
}

// ------------------------------------------------- phase-covariant cloning

// Equatorial state d^{-1/2} sum_i e^{i phi_i}|i>; no phases gives the seed.
inline StateVector equatorial_state(std::size_t d, const std::vector<double>& phases = {}) {
  if (!phases.empty() && phases.size() != d) throw ShapeError("equatorial_state: need d phases");
  StateVector v(idx(d));
  for (std::size_t i = 0; i < d; ++i)
    v(idx(i)) = std::polar(1.0 / std::sqrt(double(d)), phases.empty() ? 0.0 : phases[i]);
  return v;
}

// V|{n_i}> = |{n_i + k}> between symmetric subspaces.
class PhaseCloner {
 public:
  explicit PhaseCloner(const CloneSpec& s) : spec_(s), k_(s.phase_k()) {
    const auto in = enumerate_occupations(s.d, s.n), out = enumerate_occupations(s.d, s.m);
    std::map<std::vector<std::size_t>, std::size_t> where;
    for (std::size_t c = 0; c < out.size(); ++c) where[out[c].counts] = c;
    map_ = ComplexMatrix::Zero(idx(out.size()), idx(in.size()));
    for (std::size_t c = 0; c < in.size(); ++c) {
      auto shifted = in[c].counts;
      for (auto& x : shifted) x += k_;
      map_(idx(where.at(shifted)), idx(c)) = 1.0;
    }
  }

  const CloneSpec& spec() const { return spec_; }
  std::size_t k() const { return k_; }

  // Isometry in occupation bases, d[M] x d[N].
  IsometryMatrix occupation_isometry() const { return IsometryMatrix(map_, std::size_t(map_.rows()), 1); }

  // The same map on the full tensor spaces: W_M V W_N^dag, d^M x d^N.
  ComplexMatrix embedded() const {
    return symmetric_isometry(spec_.d, spec_.m) * map_ *
           symmetric_isometry(spec_.d, spec_.n).adjoint();
  }

  // Rank-one Choi |V>><<V|.
  ChoiOperator choi() const {
    checked_pow(spec_.d, spec_.m + spec_.n);
    ComplexMatrix v = embedded();
    StateVector w = vec(v);
    return ChoiOperator(w * w.adjoint(), std::size_t(v.rows()), std::size_t(v.cols()));
  }

  DensityMatrix apply(const StateVector& psi) const {
    require_normalized(psi, "PhaseCloner::apply");
    if (psi.size() != idx(spec_.d)) throw ShapeError("PhaseCloner::apply: single-copy state expected");
    StateVector in = symmetric_isometry(spec_.d, spec_.n).adjoint() * tensor_power(psi, spec_.n);
    StateVector out = symmetric_isometry(spec_.d, spec_.m) * (map_ * in);
    return DensityMatrix(out * out.adjoint(), SystemShape::uniform(spec_.d, spec_.m));
  }

 private:
  CloneSpec spec_;
  std::size_t k_;
  ComplexMatrix map_;
};

inline PhaseCloner pclone_isometry(const CloneSpec& s) { return PhaseCloner(s); }

// Optimal single-site fidelity:
// 1/d + 1/(M d^{N+1}) sum_{sum n = N-1} sum_{i != j} N!/prod n!
//       * sqrt((n_i+k+1)(n_j+k+1) / ((n_i+1)(n_j+1))).
inline double pclone_fidelity(const CloneSpec& s) {
  const double k = double(s.phase_k());
  const std::size_t d = s.d;
  double acc = 0.0;
  for (const auto& occ : enumerate_occupations(d, s.n - 1)) {
    double mult = factorial(s.n);
    for (auto c : occ.counts) mult /= factorial(c);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (i == j) continue;
        const double ni = double(occ.counts[i]), nj = double(occ.counts[j]);
        acc += mult * std::sqrt((ni + k + 1) * (nj + k + 1) / ((ni + 1) * (nj + 1)));
      }
  }
  return 1.0 / double(d) + acc / (double(s.m) * std::pow(double(d), double(s.n + 1)));
}

// N = 1 closed form 1/d + (d-1)(M+d-1)/(M d^2).
inline Rational pclone_fidelity_n1_exact(const CloneSpec& s) {
  s.phase_k();
  if (s.n != 1) throw DomainError("closed form holds for N = 1 only");
  const std::uint64_t d = s.d, m = s.m;
  return Rational::make(m * d + (d - 1) * (m + d - 1), m * d * d);
}

// Single-site fidelity read off the first output factor of the cloner fed
// with the equatorial state of the given phases.
inline double pclone_fidelity_measured(const CloneSpec& s, const std::vector<double>& phases = {}) {
  PhaseCloner v(s);
  StateVector psi = equatorial_state(s.d, phases);
  DensityMatrix out = v.apply(psi);
  ComplexMatrix site = partial_trace(out.mat(), out.shape(), {0});
  return (psi.adjoint() * site * psi)(0, 0).real();
}

// ------------------------------------------------------------ NSB matrices

struct NsbValidation {
  bool ok = true;
  std::vector<std::string> failures;
};

inline NsbValidation nsb_validate(const RealMatrix& b, double tol = kTol) {
  NsbValidation v;
  auto fail = [&](std::string s) {
    v.ok = false;
    v.failures.push_back(std::move(s));
  };
  if (b.rows() != b.cols() || b.rows() < 2) {
    fail("shape: square matrix of size >= 2 required");
    return v;
  }
  if (!b.allFinite()) fail("finite: non-finite entry");
  if (b.minCoeff() < -tol) fail("nonnegative: negative entry");
  if (b.diagonal().cwiseAbs().maxCoeff() > tol) fail("null-diagonal: nonzero diagonal entry");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > tol) fail("symmetric: b differs from its transpose");
  if ((b.rowwise().sum().array() - 1.0).abs().maxCoeff() > tol) fail("bistochastic: a row does not sum to 1");
  return v;
}

class NsbMatrix {
 public:
  explicit NsbMatrix(RealMatrix b) : b_(std::move(b)) {
    auto v = nsb_validate(b_);
    if (!v.ok) {
      std::string msg = "invalid NSB matrix:";
      for (const auto& f : v.failures) msg += " [" + f + "]";
      throw DomainError(msg);
    }
  }
  const RealMatrix& b() const { return b_; }
  std::size_t d() const { return std::size_t(b_.rows()); }

 private:
  RealMatrix b_;
};

// The only NSB matrices for d = 2 and d = 3.
inline NsbMatrix nsb_forced(std::size_t d) {
  if (d != 2 && d != 3) throw DomainError("nsb_forced: the NSB set is a single point only for d = 2, 3");
  RealMatrix b = RealMatrix::Constant(idx(d), idx(d), 1.0 / double(d - 1));
  b.diagonal().setZero();
  return NsbMatrix(std::move(b));
}

inline NsbMatrix nsb_d4(double p1, double p2) {
  if (p1 < -kTol || p2 < -kTol || p1 + p2 > 1 + kTol) {
    throw DomainError("nsb_d4: need p1, p2 >= 0 and p1 + p2 <= 1");
  }
  const double p3 = 1 - p1 - p2;
  RealMatrix b(4, 4);
  b << 0, p1, p2, p3,  //
      p1, 0, p3, p2,   //
      p2, p3, 0, p1,   //
      p3, p2, p1, 0;
  return NsbMatrix(std::move(b));
}

inline std::array<double, 3> nsb_d4_decompose(const NsbMatrix& m) {
  if (m.d() != 4) throw DomainError("nsb_d4_decompose: d must be 4");
  const auto& b = m.b();
  std::array<double, 3> p{b(0, 1), b(0, 2), b(0, 3)};
  if (max_abs((nsb_d4(p[0], p[1]).b() - b).cast<Complex>()) > kTol) {
    throw DomainError("nsb_d4_decompose: matrix is not of the two-parameter d = 4 form");
  }
  return p;
}

// Pairs {i, j} of the perfect matching behind the k-th program unitary, in
// block order s = 0 .. d/2-1. Odd k: {2s, 2s + k} mod d. Even k: the
// reflection x <-> k - x, with its two fixed points k/2 and k/2 + d/2 paired;
// pairs sorted by their smaller element.
inline std::vector<std::pair<std::size_t, std::size_t>> phase_not_matching(std::size_t d, std::size_t k) {
  if (d < 4 || d % 2 != 0) {
    throw OutOfScopeError("phase-NOT unitaries are constructed for even d >= 4 only");
  }
  if (k < 1 || k >= d) throw DomainError("phase-NOT program index k must be in 1..d-1");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (k % 2 == 1) {
    for (std::size_t s = 0; s < d / 2; ++s) out.emplace_back(add_mod(2 * s, k, d), 2 * s);
    return out;
  }
  std::vector<bool> used(d, false);
  for (std::size_t x = 0; x < d; ++x) {
    if (used[x]) continue;
    std::size_t y = (k + d - x) % d;
    if (y == x) y = (x + d / 2) % d;
    used[x] = used[y] = true;
    out.emplace_back(std::max(x, y), std::min(x, y));
  }
  return out;
}

inline NsbMatrix nsb_extremal(std::size_t d, std::size_t k) {
  RealMatrix b = RealMatrix::Zero(idx(d), idx(d));
  for (auto [i, j] : phase_not_matching(d, k)) b(idx(i), idx(j)) = b(idx(j), idx(i)) = 1.0;
  return NsbMatrix(std::move(b));
}

// R = sum_{i>j} b_ij (|ij> + |ji>)(<ij| + <ji|).
inline ChoiOperator phase_not_choi(const NsbMatrix& m) {
  const std::size_t d = m.d();
  ComplexMatrix r = ComplexMatrix::Zero(idx(d * d), idx(d * d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      StateVector v = StateVector::Zero(idx(d * d));
      v(idx(i * d + j)) = 1.0;
      v(idx(j * d + i)) = 1.0;
      r += m.b()(idx(i), idx(j)) * v * v.adjoint();
    }
  return ChoiOperator(std::move(r), d, d);
}

inline Rational phase_not_fidelity_exact(std::size_t d) {
  if (d < 2) throw DomainError("phase NOT: d must be >= 2");
  return Rational::make(2, d);
}

// Single-copy multi-phase estimation value (2d - 1)/d^2.
inline Rational phase_estimation_fidelity_exact(std::size_t d) { return Rational::make(2 * d - 1, d * d); }

inline ComplexMatrix swap_pair(std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix t = ComplexMatrix::Zero(idx(d), idx(d));
  t(idx(i), idx(j)) = 1.0;
  t(idx(j), idx(i)) = 1.0;
  return t;
}

// U_k = sum_{i,j} T_{pair(i + j mod d/2)} (x) |i><j| on C^d (x) C^{d/2}, k = 1..d-1.
inline std::vector<UnitaryDilation> phase_not_unitaries(std::size_t d) {
  std::vector<UnitaryDilation> out;
  const std::size_t h = d / 2;
  for (std::size_t k = 1; k < d; ++k) {
    const auto pairs = phase_not_matching(d, k);
    ComplexMatrix u = ComplexMatrix::Zero(idx(d * h), idx(d * h));
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(idx(h), idx(h));
        e(idx(i), idx(j)) = 1.0;
        const auto [a, b] = pairs[(i + j) % h];
        u += tensor(swap_pair(d, a, b), e);
      }
    out.emplace_back(std::move(u), UnitaryDilation::product_embedding(d, ket(h, 0)), d, h);
  }
  return out;
}

inline ComplexMatrix phase_not_apply(std::size_t d, std::size_t k, const ComplexMatrix& rho) {
  phase_not_matching(d, k);
  return phase_not_unitaries(d).at(k - 1).apply(rho);
}

// Programmable version: U = sum_k U_k (x) |k><k| on C^d (x) C^{d/2} (x) C^{d-1};
// the program register is prepared in diag(weights).
inline ComplexMatrix phase_not_mix(std::size_t d, const std::vector<double>& weights, const ComplexMatrix& rho) {
  if (weights.size() != d - 1) throw ShapeError("phase_not_mix: need d-1 program weights");
  double tot = 0;
  for (auto w : weights) {
    if (w < -kTol) throw DomainError("phase_not_mix: negative weight");
    tot += w;
  }
  if (std::abs(tot - 1) > kTol) throw DomainError("phase_not_mix: weights must sum to 1");
  const auto us = phase_not_unitaries(d);
  const std::size_t h = d / 2, p = d - 1;
  ComplexMatrix u = ComplexMatrix::Zero(idx(d * h * p), idx(d * h * p));
  ComplexMatrix sigma = ComplexMatrix::Zero(idx(p), idx(p));
  for (std::size_t k = 0; k < p; ++k) {
    ComplexMatrix e = ComplexMatrix::Zero(idx(p), idx(p));
    e(idx(k), idx(k)) = 1.0;
    u += tensor(us[k].unitary(), e);
    sigma(idx(k), idx(k)) = weights[k];
  }
  ComplexMatrix anc0 = ComplexMatrix::Zero(idx(h), idx(h));
  anc0(0, 0) = 1.0;
  ComplexMatrix joint = u * tensor({rho, anc0, sigma}) * u.adjoint();
  return partial_trace(joint, SystemShape{d, h, p}, {0});
}

}  // namespace qdev
