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

// Decoherence maps rho -> xi o rho (entrywise) for correlation matrices xi:
// environment dilation, entropy exchange, random-unitary decompositions and
// inversion by reading the environment.

#include <algorithm>
#include <array>
#include <numbers>
#include <optional>

#include "qdev/channel.hpp"

namespace qdev {

// Hermitian, PSD, unit diagonal (within kTol).
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(ComplexMatrix xi) : xi_(std::move(xi)) {
    require_square(xi_, "CorrelationMatrix");
    if (xi_.rows() == 0) throw ShapeError("CorrelationMatrix: empty");
    if (!all_finite(xi_)) throw InvariantError("CorrelationMatrix: non-finite entry");
    if (!is_hermitian(xi_)) throw InvariantError("CorrelationMatrix: not Hermitian");
    for (Eigen::Index k = 0; k < xi_.rows(); ++k)
      if (std::abs(xi_(k, k) - Complex(1.0)) > kTol) throw InvariantError("CorrelationMatrix: diagonal entry differs from 1");
    if (xi_.cwiseAbs().maxCoeff() > 1.0 + kTol) throw InvariantError("CorrelationMatrix: |xi_kl| exceeds 1");
    if (min_eigenvalue(xi_) < -kTol) throw InvariantError("CorrelationMatrix: not positive semidefinite");
  }
  const ComplexMatrix& xi() const { return xi_; }
  std::size_t dim() const { return std::size_t(xi_.rows()); }

 private:
  ComplexMatrix xi_;
};

inline ComplexMatrix schur_apply(const CorrelationMatrix& xi, const ComplexMatrix& rho) {
  if (rho.rows() != idx(xi.dim()) || rho.cols() != idx(xi.dim())) throw ShapeError("schur_apply: dimension mismatch");
  return xi.xi().cwiseProduct(rho);
}

inline DensityMatrix schur_apply(const CorrelationMatrix& xi, const DensityMatrix& rho) {
  return DensityMatrix(schur_apply(xi, rho.mat()));
}

inline ComplexMatrix rho_infinity(const ComplexMatrix& rho) {
  require_square(rho, "rho_infinity");
  return ComplexMatrix(rho.diagonal().asDiagonal());
}

inline DensityMatrix rho_infinity(const DensityMatrix& rho) { return DensityMatrix(rho_infinity(rho.mat())); }

// Kraus operators E_j = sum_k <j|e_k> |k><k| come from the environment states.
struct EnvironmentModel {
  std::vector<StateVector> env_states;  // |e_k> in C^d
  UnitaryDilation dilation;             // U |k>|0> = |k>|e_k>

  ComplexMatrix apply(const ComplexMatrix& rho) const { return dilation.apply(rho); }
  // Environment state after the interaction: sum_k rho_kk |e_k><e_k|.
  ComplexMatrix environment(const ComplexMatrix& rho) const {
    return partial_trace(dilation.joint(rho), SystemShape{dilation.out_dim(), dilation.anc_dim()}, {1});
  }
};

// Pivoted Cholesky for a PSD matrix: returns L (d x rank) with A = L L^dag.
inline ComplexMatrix pivoted_cholesky(const ComplexMatrix& a, double tol = 1e-12) {
  const Eigen::Index d = a.rows();
  ComplexMatrix r = hermitian_part(a);
  ComplexMatrix l = ComplexMatrix::Zero(d, d);
  std::vector<bool> done(std::size_t(d), false);
  Eigen::Index rank = 0;
  for (; rank < d; ++rank) {
    Eigen::Index piv = -1;
    double best = tol;
    for (Eigen::Index k = 0; k < d; ++k)
      if (!done[std::size_t(k)] && r(k, k).real() > best) {
        best = r(k, k).real();
        piv = k;
      }
    if (piv < 0) break;
    done[std::size_t(piv)] = true;
    const double s = std::sqrt(r(piv, piv).real());
    StateVector col = r.col(piv) / s;
    for (Eigen::Index k = 0; k < d; ++k)
      if (done[std::size_t(k)] && k != piv) col(k) = 0.0;
    l.col(rank) = col;
    r -= col * col.adjoint();
  }
  return l.leftCols(rank);
}

// xi_kl = <e_l|e_k>. With L L^dag = conj(xi), the vectors e_k = conj(row k of L)
// satisfy <e_l|e_k> = sum_a L_la conj(L_ka) = conj(xi)_lk = xi_kl.
inline EnvironmentModel environment_model(const CorrelationMatrix& xi) {
  const std::size_t d = xi.dim();
  ComplexMatrix l = pivoted_cholesky(xi.xi().conjugate());
  if (max_abs(l * l.adjoint() - xi.xi().conjugate()) > 1e-9) {
    throw InvariantError("environment_model: Gram factorization failed");
  }
  std::vector<StateVector> env;
  ComplexMatrix v = ComplexMatrix::Zero(idx(d * d), idx(d));
  for (std::size_t k = 0; k < d; ++k) {
    StateVector e = StateVector::Zero(idx(d));
    e.head(l.cols()) = l.row(idx(k)).adjoint();
    e /= e.norm();
    env.push_back(e);
    for (std::size_t a = 0; a < d; ++a) v(idx(k * d + a), idx(k)) = e(idx(a));
  }
  return {env, unitary_dilation(IsometryMatrix(std::move(v), d, d))};
}

// S(sqrt(rho_inf) xi sqrt(rho_inf)) in bits.
inline double entropy_exchange(const CorrelationMatrix& xi, const ComplexMatrix& rho) {
  if (rho.rows() != idx(xi.dim())) throw ShapeError("entropy_exchange: dimension mismatch");
  ComplexMatrix s = rho.diagonal().real().cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal();
  return entropy_bits(s * xi.xi() * s);
}

// Branch i applies diag(exp(i phases_i)) with probability weights_i.
struct RandomUnitaryDecomp {
  std::vector<double> weights;
  std::vector<RealVector> phases;

  std::size_t dim() const { return phases.empty() ? 0 : std::size_t(phases.front().size()); }
  static StateVector phase_vector(const RealVector& ph) {
    StateVector v(ph.size());
    for (Eigen::Index k = 0; k < ph.size(); ++k) v(k) = std::polar(1.0, ph(k));
    return v;
  }
  ComplexMatrix unitary(std::size_t i) const { return phase_vector(phases.at(i)).asDiagonal(); }
  // sum_i p_i v_i v_i^dag
  ComplexMatrix reconstruct() const {
    ComplexMatrix x = ComplexMatrix::Zero(idx(dim()), idx(dim()));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      StateVector v = phase_vector(phases[i]);
      x += weights[i] * v * v.adjoint();
    }
    return x;
  }
  double entropy_bits() const {
    return shannon_bits(Eigen::Map<const RealVector>(weights.data(), idx(weights.size())));
  }
};

namespace detail {

inline RealVector phases_of(const StateVector& v) {
  RealVector ph(v.size());
  const Complex ref = std::abs(v(0)) > 1e-14 ? v(0) / std::abs(v(0)) : Complex(1.0);
  for (Eigen::Index k = 0; k < v.size(); ++k) ph(k) = std::arg(v(k) * std::conj(ref));
  ph(0) = 0;
  return ph;
}

// Unimodular v in the range of a rank-2 3x3 PSD matrix with kernel vector w:
// w^dag v = 0 asks for unit phasors weighted by |w_k| summing to zero, i.e. a
// triangle with sides |w_0|, |w_1|, |w_2|.
inline std::optional<StateVector> unimodular_in_range(const StateVector& w) {
  const double a = std::abs(w(0)), b = std::abs(w(1)), c = std::abs(w(2));
  if (a > b + c + 1e-12 || b > a + c + 1e-12 || c > a + b + 1e-12) return std::nullopt;
  // z0 = a, z1 = b e^{i alpha}, z2 = c e^{i beta}, z0 + z1 + z2 = 0.
  std::array<Complex, 3> z;
  const double big = std::max({a, b, c});
  if (big < 1e-14) return std::nullopt;
  if (a < 1e-12) {
    z = {Complex(0), Complex(b), Complex(-c)};
  } else {
    const double cos_alpha = std::clamp((c * c - a * a - b * b) / (2 * a * b + 1e-300), -1.0, 1.0);
    const double alpha = std::acos(cos_alpha);
    z[0] = a;
    z[1] = std::polar(b, alpha);
    z[2] = -(z[0] + z[1]);
  }
  StateVector v(3);
  for (int k = 0; k < 3; ++k) {
    const double mag = std::abs(w(k));
    // v_k = e^{i phi_k} with conj(w_k) v_k = z_k, so phi_k = arg z_k + arg w_k.
    const double phase = (std::abs(z[std::size_t(k)]) > 1e-14 ? std::arg(z[std::size_t(k)]) : 0.0) +
                         (mag > 1e-14 ? std::arg(w(k)) : 0.0);
    v(k) = std::polar(1.0, phase);
  }
  if (std::abs(w.dot(v)) > 1e-8) return std::nullopt;
  return v;
}

// Largest lambda with R - lambda v v^dag still PSD: 1 / (v^dag R^+ v) when v is
// in the range of R, else 0.
inline double peel_weight(const ComplexMatrix& r, const StateVector& v, double scale) {
  auto sp = eigh(r);
  double q = 0.0, outside = 0.0;
  for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
    const double ov = std::norm(sp.vectors.col(i).dot(v));
    if (sp.values(i) > 1e-10 * scale) q += ov / sp.values(i);
    else outside += ov;
  }
  if (outside > 1e-9 * v.squaredNorm() || q <= 0) return 0.0;
  return 1.0 / q;
}

}  // namespace detail

inline RandomUnitaryDecomp random_unitary_decomp(const CorrelationMatrix& xi) {
  const std::size_t d = xi.dim();
  if (d > 3) throw OutOfScopeError("random_unitary_decomp: only d = 2, 3 are covered");
  if (d < 2) throw DomainError("random_unitary_decomp: d must be 2 or 3");
  RandomUnitaryDecomp out;
  if (d == 2) {
    const Complex c = xi.xi()(0, 1);
    const double mag = std::min(std::abs(c), 1.0), th = std::arg(c);
    RealVector a(2), b(2);
    a << 0.0, -th;
    b << 0.0, -th + std::numbers::pi;
    out.weights = {(1 + mag) / 2, (1 - mag) / 2};
    out.phases = {a, b};
    if (out.weights[1] <= 1e-15) {
      out.weights.pop_back();
      out.phases.pop_back();
    }
  } else {
    // Peel rank-one correlation matrices v v^dag off the residual; every step
    // drops the residual's rank, so three branches suffice when it works.
    ComplexMatrix res = xi.xi();
    for (int step = 0; step < 50; ++step) {
      const double t = res(0, 0).real();
      if (t < 1e-12 || max_abs(res) < 1e-12) break;
      auto sp = eigh(res);
      const auto rank = (sp.values.array() > 1e-9 * t).count();
      StateVector v;
      double lam = 0.0;
      if (rank == 1) {
        v = RandomUnitaryDecomp::phase_vector(detail::phases_of(sp.vectors.col(2)));
        lam = t;
      } else if (rank == 2) {
        auto cand = detail::unimodular_in_range(sp.vectors.col(0));
        if (!cand) break;
        v = *cand;
        lam = detail::peel_weight(res, v, t);
      } else {
        v = RandomUnitaryDecomp::phase_vector(detail::phases_of(sp.vectors.col(2)));
        lam = detail::peel_weight(res, v, t);
      }
      if (lam <= 1e-14) break;
      lam = std::min(lam, t);
      out.weights.push_back(lam);
      out.phases.push_back(detail::phases_of(v));
      res -= lam * v * v.adjoint();
      res = hermitian_part(res);
    }
  }
  const double err = max_abs(out.reconstruct() - xi.xi());
  if (out.weights.empty() || err > 1e-9) {
    throw DecompositionError("random_unitary_decomp: reconstruction error " + std::to_string(err));
  }
  return out;
}

struct RecoveryReport {
  ComplexMatrix decohered;  // Tr_env of the joint state
  ComplexMatrix recovered;
  double bits_used = 0;
};

// V = sum_i sqrt(p_i) U_i (x) |i>; read the environment in {|i>}, undo U_i.
inline RecoveryReport invert_by_feedback(const RandomUnitaryDecomp& dec, const ComplexMatrix& rho) {
  const std::size_t d = dec.dim(), br = dec.weights.size();
  if (rho.rows() != idx(d)) throw ShapeError("invert_by_feedback: dimension mismatch");
  ComplexMatrix v = ComplexMatrix::Zero(idx(d * br), idx(d));
  for (std::size_t i = 0; i < br; ++i) {
    ComplexMatrix u = dec.unitary(i);
    for (std::size_t a = 0; a < d; ++a) v.row(idx(a * br + i)) = std::sqrt(dec.weights[i]) * u.row(idx(a));
  }
  const ComplexMatrix joint = v * rho * v.adjoint();
  RecoveryReport rep;
  rep.decohered = partial_trace(joint, SystemShape{d, br}, {0});
  rep.recovered = ComplexMatrix::Zero(idx(d), idx(d));
  for (std::size_t i = 0; i < br; ++i) {
    // (I (x) <i|) joint (I (x) |i>) = p_i U_i rho U_i^dag
    ComplexMatrix cond(idx(d), idx(d));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cond(idx(a), idx(b)) = joint(idx(a * br + i), idx(b * br + i));
    ComplexMatrix u = dec.unitary(i);
    rep.recovered += u.adjoint() * cond * u;
  }
  rep.bits_used = dec.entropy_bits();
  return rep;
}

inline CorrelationMatrix phase_kick(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("phase_kick: lambda must be >= 0");
  ComplexMatrix xi(2, 2);
  const double c = std::exp(-lambda);
  xi << 1.0, c, c, 1.0;
  return CorrelationMatrix(std::move(xi));
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

// h((1 - e^{-lambda})/2) bits.
inline double phase_kick_info(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("phase_kick_info: lambda must be >= 0");
  return binary_entropy((1.0 - std::exp(-lambda)) / 2.0);
}

// Differential entropy (1/2) log2(4 pi e lambda) of a Gaussian kick of
// variance 2 lambda.
inline double gaussian_kick_entropy(double lambda) {
  return 0.5 * std::log2(4.0 * std::numbers::pi * std::numbers::e * lambda);
}

}  // namespace qdev
