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

// Channel representations and the conversions among them.
//
//   KrausSet        E(rho) = sum_i E_i rho E_i^dag
//   ChoiOperator    R = sum_i |E_i>><<E_i| on out (x) in
//   IsometryMatrix  V = sum_i E_i (x) |i>, rows ordered out (x) anc
//   UnitaryDilation square U with U J = V for a fixed input embedding J

#include <string>
#include <vector>

#include "qdev/tensor.hpp"

namespace qdev {

class KrausSet {
 public:
  KrausSet(std::size_t in_dim, std::size_t out_dim, std::vector<ComplexMatrix> ops)
      : in_dim_(in_dim), out_dim_(out_dim), ops_(std::move(ops)) {
    if (in_dim_ == 0 || out_dim_ == 0) throw ShapeError("KrausSet: zero dimension");
    if (ops_.empty()) throw ShapeError("KrausSet: no operators");
    for (const auto& e : ops_) {
      if (e.rows() != idx(out_dim_) || e.cols() != idx(in_dim_)) {
        throw ShapeError("KrausSet: operator shape " + std::to_string(e.rows()) + "x" +
                         std::to_string(e.cols()) + " differs from " + std::to_string(out_dim_) +
                         "x" + std::to_string(in_dim_));
      }
      if (!all_finite(e)) throw InvariantError("KrausSet: non-finite entry");
    }
  }

  // Dimensions read from the first operator.
  static KrausSet from_operators(std::vector<ComplexMatrix> ops) {
    if (ops.empty()) throw ShapeError("KrausSet: no operators");
    const auto in = std::size_t(ops.front().cols()), out = std::size_t(ops.front().rows());
    return KrausSet(in, out, std::move(ops));
  }

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t size() const { return ops_.size(); }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  const ComplexMatrix& operator[](std::size_t i) const { return ops_.at(i); }

  ComplexMatrix completeness() const {
    ComplexMatrix s = ComplexMatrix::Zero(idx(in_dim_), idx(in_dim_));
    for (const auto& e : ops_) s += e.adjoint() * e;
    return s;
  }

  bool is_trace_preserving(double tol = kTol) const {
    return max_abs(completeness() - ComplexMatrix::Identity(idx(in_dim_), idx(in_dim_))) <= tol;
  }

  bool is_canonical(double tol = kTol) const {
    for (std::size_t i = 0; i < ops_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs((ops_[i].adjoint() * ops_[j]).trace()) > tol) return false;
    return true;
  }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != idx(in_dim_) || rho.cols() != idx(in_dim_)) {
      throw ShapeError("KrausSet::apply: input dimension mismatch");
    }
    ComplexMatrix out = ComplexMatrix::Zero(idx(out_dim_), idx(out_dim_));
    for (const auto& e : ops_) out += e * rho * e.adjoint();
    return out;
  }

 private:
  std::size_t in_dim_, out_dim_;
  std::vector<ComplexMatrix> ops_;
};

class ChoiOperator {
 public:
  ChoiOperator(ComplexMatrix mat, std::size_t out_dim, std::size_t in_dim)
      : mat_(std::move(mat)), out_dim_(out_dim), in_dim_(in_dim) {
    require_square(mat_, "ChoiOperator");
    if (out_dim_ == 0 || in_dim_ == 0 || mat_.rows() != idx(out_dim_ * in_dim_)) {
      throw ShapeError("ChoiOperator: matrix dimension " + std::to_string(mat_.rows()) +
                       " does not equal out*in = " + std::to_string(out_dim_ * in_dim_));
    }
    if (!all_finite(mat_)) throw InvariantError("ChoiOperator: non-finite entry");
    if (!is_hermitian(mat_)) throw InvariantError("ChoiOperator: not Hermitian");
  }

  const ComplexMatrix& mat() const { return mat_; }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t in_dim() const { return in_dim_; }
  SystemShape shape() const { return SystemShape{out_dim_, in_dim_}; }

 private:
  ComplexMatrix mat_;
  std::size_t out_dim_, in_dim_;
};

class IsometryMatrix {
 public:
  IsometryMatrix(ComplexMatrix mat, std::size_t out_dim, std::size_t anc_dim)
      : mat_(std::move(mat)), out_dim_(out_dim), anc_dim_(anc_dim) {
    if (mat_.rows() != idx(out_dim_ * anc_dim_) || mat_.cols() == 0) {
      throw ShapeError("IsometryMatrix: row count must be out*anc");
    }
    if (!is_isometry(mat_)) throw InvariantError("IsometryMatrix: V^dag V differs from I");
  }

  const ComplexMatrix& mat() const { return mat_; }
  std::size_t in_dim() const { return std::size_t(mat_.cols()); }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t anc_dim() const { return anc_dim_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != mat_.cols()) throw ShapeError("IsometryMatrix::apply: dimension mismatch");
    return partial_trace(mat_ * rho * mat_.adjoint(), SystemShape{out_dim_, anc_dim_}, {0});
  }

 private:
  ComplexMatrix mat_;
  std::size_t out_dim_, anc_dim_;
};

// Square unitary on out (x) anc together with the isometric embedding J of
// the input space. For in_dim == out_dim and a |0> ancilla, J = I (x) |0> and
// the input columns sit at slots k*anc_dim.
class UnitaryDilation {
 public:
  UnitaryDilation(ComplexMatrix u, ComplexMatrix embedding, std::size_t out_dim, std::size_t anc_dim)
      : u_(std::move(u)), j_(std::move(embedding)), out_dim_(out_dim), anc_dim_(anc_dim) {
    if (u_.rows() != idx(out_dim_ * anc_dim_)) throw ShapeError("UnitaryDilation: size mismatch");
    if (j_.rows() != u_.rows()) throw ShapeError("UnitaryDilation: embedding size mismatch");
    if (!is_unitary(u_)) throw InvariantError("UnitaryDilation: U is not unitary");
    if (!is_isometry(j_)) throw InvariantError("UnitaryDilation: embedding is not isometric");
  }

  // Embedding I (x) |a> for a system of dimension `sys` and ancilla state a.
  static ComplexMatrix product_embedding(std::size_t sys, const StateVector& ancilla) {
    return tensor(ComplexMatrix::Identity(idx(sys), idx(sys)), ComplexMatrix(ancilla));
  }

  const ComplexMatrix& unitary() const { return u_; }
  const ComplexMatrix& embedding() const { return j_; }
  std::size_t in_dim() const { return std::size_t(j_.cols()); }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t anc_dim() const { return anc_dim_; }
  ComplexMatrix isometry() const { return u_ * j_; }

  // Joint output U J rho J^dag U^dag on out (x) anc.
  ComplexMatrix joint(const ComplexMatrix& rho) const {
    if (rho.rows() != j_.cols()) throw ShapeError("UnitaryDilation: input dimension mismatch");
    return u_ * (j_ * rho * j_.adjoint()) * u_.adjoint();
  }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    return partial_trace(joint(rho), SystemShape{out_dim_, anc_dim_}, {0});
  }

 private:
  ComplexMatrix u_, j_;
  std::size_t out_dim_, anc_dim_;
};

inline ChoiOperator choi_from_kraus(const KrausSet& k) {
  const auto n = idx(k.out_dim() * k.in_dim());
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (const auto& e : k.operators()) {
    StateVector v = vec(e);
    r += v * v.adjoint();
  }
  return ChoiOperator(hermitian_part(r), k.out_dim(), k.in_dim());
}

// E(rho) = Tr_in[(I (x) rho^T) R].
inline ComplexMatrix apply_choi(const ChoiOperator& r, const ComplexMatrix& rho) {
  if (rho.rows() != idx(r.in_dim()) || rho.cols() != idx(r.in_dim())) {
    throw ShapeError("apply_choi: input dimension " + std::to_string(rho.rows()) +
                     " differs from in_dim " + std::to_string(r.in_dim()));
  }
  const auto dout = idx(r.out_dim()), din = idx(r.in_dim());
  const auto& m = r.mat();
  // sum_{b,c} rho^T_{cb} R_{(a,b),(a',c)} = sum_{b,c} rho_{bc} R_{(a,b),(a',c)}
  ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
  for (Eigen::Index a = 0; a < dout; ++a)
    for (Eigen::Index ap = 0; ap < dout; ++ap) {
      Complex acc = 0.0;
      for (Eigen::Index b = 0; b < din; ++b)
        for (Eigen::Index c = 0; c < din; ++c) acc += rho(b, c) * m(a * din + b, ap * din + c);
      out(a, ap) = acc;
    }
  return out;
}

inline DensityMatrix apply_choi(const ChoiOperator& r, const DensityMatrix& rho) {
  return DensityMatrix(hermitian_part(apply_choi(r, rho.mat())));
}

inline KrausSet canonical_kraus(const ChoiOperator& r) {
  auto sp = eigh(r.mat());
  const double lmin = sp.values.minCoeff();
  const double lmax = sp.values.maxCoeff();
  if (lmin < -1e-8) {
    throw NotCpError("canonical_kraus: Choi operator has eigenvalue " + std::to_string(lmin));
  }
  std::vector<ComplexMatrix> ops;
  const double cutoff = 1e-10 * std::max(lmax, 0.0);
  for (Eigen::Index i = sp.values.size(); i-- > 0;) {
    const double lam = sp.values(i);
    if (lam <= 0.0 || lam < cutoff) continue;
    ops.push_back(std::sqrt(lam) * unvec(sp.vectors.col(i), r.out_dim(), r.in_dim()));
  }
  if (ops.empty()) {
    ops.push_back(ComplexMatrix::Zero(idx(r.out_dim()), idx(r.in_dim())));
  }
  return KrausSet(r.in_dim(), r.out_dim(), std::move(ops));
}

struct ChannelCheck {
  bool cp = false;
  bool tp = false;
  double min_eig = 0.0;
  double tp_defect = 0.0;
};

inline ComplexMatrix trace_output(const ChoiOperator& r) {
  return partial_trace(r.mat(), r.shape(), {1});
}

inline ChannelCheck channel_check(const ChoiOperator& r) {
  ChannelCheck c;
  c.min_eig = min_eigenvalue(r.mat());
  const auto din = idx(r.in_dim());
  c.tp_defect = max_abs(trace_output(r) - ComplexMatrix::Identity(din, din));
  c.cp = c.min_eig >= -1e-8;
  c.tp = c.tp_defect <= 1e-8;
  return c;
}

// Heisenberg-picture dual: sum_i E_i^dag O E_i.
inline ComplexMatrix dual_apply(const KrausSet& k, const ComplexMatrix& o) {
  if (o.rows() != idx(k.out_dim()) || o.cols() != idx(k.out_dim())) {
    throw ShapeError("dual_apply: operator must act on the output space");
  }
  ComplexMatrix out = ComplexMatrix::Zero(idx(k.in_dim()), idx(k.in_dim()));
  for (const auto& e : k.operators()) out += e.adjoint() * o * e;
  return out;
}

inline IsometryMatrix stinespring(const KrausSet& k) {
  if (!k.is_trace_preserving()) {
    throw InvariantError("stinespring: Kraus set is not trace preserving");
  }
  const std::size_t anc = k.size();
  ComplexMatrix v = ComplexMatrix::Zero(idx(k.out_dim() * anc), idx(k.in_dim()));
  for (std::size_t i = 0; i < anc; ++i)
    for (std::size_t a = 0; a < k.out_dim(); ++a) v.row(idx(a * anc + i)) = k[i].row(idx(a));
  return IsometryMatrix(std::move(v), k.out_dim(), anc);
}

// Completes the columns of V to a unitary on out (x) anc by Gram-Schmidt
// against computational basis seeds taken in index order.
inline UnitaryDilation unitary_dilation(const IsometryMatrix& v) {
  const std::size_t dim = v.out_dim() * v.anc_dim();
  const std::size_t din = v.in_dim();
  if (din > dim) throw ShapeError("unitary_dilation: input larger than out*anc");

  ComplexMatrix basis(idx(dim), idx(dim));
  basis.leftCols(idx(din)) = v.mat();
  std::size_t filled = din;
  for (std::size_t seed = 0; seed < dim && filled < dim; ++seed) {
    StateVector c = ket(dim, seed);
    for (int pass = 0; pass < 2; ++pass) {
      c -= basis.leftCols(idx(filled)) * (basis.leftCols(idx(filled)).adjoint() * c);
    }
    const double nrm = c.norm();
    if (nrm < 1e-8) continue;
    basis.col(idx(filled++)) = c / nrm;
  }
  if (filled != dim) throw InvariantError("unitary_dilation: completion exhausted seeds");

  // Input slots: k*anc when the input space matches the output space (the
  // ancilla-|0> convention), otherwise the first din columns.
  std::vector<std::size_t> slots(din);
  for (std::size_t k = 0; k < din; ++k) slots[k] = din == v.out_dim() ? k * v.anc_dim() : k;
  std::vector<bool> used(dim, false);
  for (auto s : slots) used[s] = true;

  ComplexMatrix u(idx(dim), idx(dim));
  ComplexMatrix emb = ComplexMatrix::Zero(idx(dim), idx(din));
  for (std::size_t k = 0; k < din; ++k) {
    u.col(idx(slots[k])) = basis.col(idx(k));
    emb(idx(slots[k]), idx(k)) = 1.0;
  }
  std::size_t next = din;
  for (std::size_t c = 0; c < dim; ++c) {
    if (!used[c]) u.col(idx(c)) = basis.col(idx(next++));
  }
  return UnitaryDilation(std::move(u), std::move(emb), v.out_dim(), v.anc_dim());
}

}  // namespace qdev
