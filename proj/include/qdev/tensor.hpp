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

// Dense complex linear algebra on top of Eigen: tensor products, partial
// traces, the double-ket vectorization and Hermitian spectral helpers.
//
// Basis convention: computational basis, first tensor factor is the most
// significant index. vec(X) = sum_ij X_ij |i>|j>, so entry (i, j) of an
// r x c matrix lands at position i*c + j.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "qdev/error.hpp"

namespace qdev {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Absolute tolerance for hermiticity, positivity and normalization checks.
inline constexpr double kTol = 1e-10;

// Largest Hilbert-space dimension any dense construction may allocate.
inline constexpr std::size_t kDimCap = 4096;

inline Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

inline std::size_t checked_pow(std::size_t d, std::size_t n, std::size_t cap = kDimCap) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (d != 0 && out > cap / d) {
      throw SizeError("dimension " + std::to_string(d) + "^" + std::to_string(n) +
                      " exceeds the cap of " + std::to_string(cap));
    }
    out *= d;
  }
  if (out > cap) {
    throw SizeError("dimension " + std::to_string(out) + " exceeds the cap of " +
                    std::to_string(cap));
  }
  return out;
}

class SystemShape {
 public:
  SystemShape() = default;
  explicit SystemShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    for (auto d : dims_) {
      if (d == 0) throw ShapeError("subsystem dimension must be >= 1");
    }
  }
  SystemShape(std::initializer_list<std::size_t> dims)
      : SystemShape(std::vector<std::size_t>(dims)) {}

  static SystemShape uniform(std::size_t d, std::size_t copies) {
    return SystemShape(std::vector<std::size_t>(copies, d));
  }

  std::size_t size() const { return dims_.size(); }
  std::size_t operator[](std::size_t k) const { return dims_.at(k); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t total() const {
    std::size_t t = 1;
    for (auto d : dims_) t *= d;
    return t;
  }
  bool operator==(const SystemShape&) const = default;

 private:
  std::vector<std::size_t> dims_;
};

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline StateVector vec(const ComplexMatrix& x) {
  StateVector v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

inline ComplexMatrix unvec(const StateVector& v, std::size_t rows, std::size_t cols) {
  if (rows * cols != static_cast<std::size_t>(v.size())) {
    throw ShapeError("unvec: " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " does not match vector length " + std::to_string(v.size()));
  }
  ComplexMatrix x(idx(rows), idx(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) x(idx(i), idx(j)) = v(idx(i * cols + j));
  return x;
}

inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix tensor(std::initializer_list<ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

inline ComplexMatrix tensor_power(const ComplexMatrix& a, std::size_t n) {
  checked_pow(std::size_t(a.rows()), n);
  checked_pow(std::size_t(a.cols()), n);
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = tensor(out, a);
  return out;
}

inline StateVector tensor_power(const StateVector& v, std::size_t n) {
  ComplexMatrix m = tensor_power(ComplexMatrix(v), n);
  return m.col(0);
}

inline StateVector ket(std::size_t dim, std::size_t i) {
  if (i >= dim) throw ShapeError("ket index out of range");
  StateVector v = StateVector::Zero(idx(dim));
  v(idx(i)) = 1.0;
  return v;
}

// Reduced operator on the factors listed in `keep`. Output factors appear in
// ascending factor order regardless of the order given; an empty set gives
// the 1x1 full trace.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const SystemShape& shape,
                                   std::vector<std::size_t> keep) {
  require_square(m, "partial_trace");
  if (shape.total() != static_cast<std::size_t>(m.rows())) {
    throw ShapeError("partial_trace: shape product " + std::to_string(shape.total()) +
                     " does not match matrix dimension " + std::to_string(m.rows()));
  }
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw ShapeError("partial_trace: repeated factor in keep set");
  }
  if (!keep.empty() && keep.back() >= shape.size()) throw ShapeError("partial_trace: factor index out of range");

  const std::size_t n = shape.size();
  std::vector<std::size_t> stride(n);
  std::size_t s = 1;
  for (std::size_t k = n; k-- > 0;) {
    stride[k] = s;
    s *= shape[k];
  }
  std::vector<bool> kept(n, false);
  for (auto k : keep) kept[k] = true;

  // Offsets into the full index contributed by every kept (traced) multi-index.
  auto offsets = [&](bool want) {
    std::vector<std::size_t> offs{0};
    for (std::size_t k = 0; k < n; ++k) {
      if (kept[k] != want) continue;
      std::vector<std::size_t> next;
      next.reserve(offs.size() * shape[k]);
      for (auto o : offs)
        for (std::size_t a = 0; a < shape[k]; ++a) next.push_back(o + a * stride[k]);
      offs = std::move(next);
    }
    return offs;
  };
  const auto keep_off = offsets(true);
  const auto trace_off = offsets(false);

  const auto dk = keep_off.size();
  ComplexMatrix out = ComplexMatrix::Zero(idx(dk), idx(dk));
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (auto t : trace_off) acc += m(idx(keep_off[r] + t), idx(keep_off[c] + t));
      out(idx(r), idx(c)) = acc;
    }
  return out;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) / 2.0;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kTol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kTol) {
  return u.rows() == u.cols() &&
         max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

inline bool is_isometry(const ComplexMatrix& v, double tol = kTol) {
  return max_abs(v.adjoint() * v - ComplexMatrix::Identity(v.cols(), v.cols())) <= tol;
}

struct Spectrum {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

// Eigendecomposition of the Hermitian part of m. The only spectral routine
// the library relies on.
inline Spectrum eigh(const ComplexMatrix& m) {
  require_square(m, "eigh");
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) throw InvariantError("eigh: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline RealVector eigvalsh(const ComplexMatrix& m) {
  require_square(m, "eigvalsh");
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const ComplexMatrix& m) { return eigvalsh(m).minCoeff(); }
inline double max_eigenvalue(const ComplexMatrix& m) { return eigvalsh(m).maxCoeff(); }

inline bool is_psd(const ComplexMatrix& m, double tol = kTol) {
  return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol;
}

inline ComplexMatrix hermitian_function(const ComplexMatrix& m,
                                        const std::function<double(double)>& f) {
  auto sp = eigh(m);
  RealVector fv = sp.values.unaryExpr(f);
  return sp.vectors * fv.cast<Complex>().asDiagonal() * sp.vectors.adjoint();
}

inline ComplexMatrix sqrt_psd(const ComplexMatrix& m) {
  return hermitian_function(m, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

// Shannon entropy in bits; 0 log 0 = 0.
inline double shannon_bits(const RealVector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0) h -= p(i) * std::log2(p(i));
  return h;
}

// Von Neumann entropy in bits. Eigenvalues in (-1e-12, 0) are treated as 0;
// anything more negative means the input is not a state.
inline double entropy_bits(const ComplexMatrix& rho) {
  RealVector ev = eigvalsh(rho);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-12) throw InvariantError("entropy of a non-positive operator");
    if (ev(i) < 0) ev(i) = 0;
  }
  return shannon_bits(ev);
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return 0.5 * eigvalsh(a - b).cwiseAbs().sum();
}

// Hermitian, positive semidefinite, unit trace (all within kTol), annotated
// with a subsystem shape.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : DensityMatrix(m, SystemShape{std::size_t(m.rows())}) {}

  DensityMatrix(ComplexMatrix m, SystemShape shape) : mat_(std::move(m)), shape_(std::move(shape)) {
    require_square(mat_, "DensityMatrix");
    if (shape_.total() != static_cast<std::size_t>(mat_.rows())) {
      throw ShapeError("DensityMatrix: shape does not match dimension");
    }
    if (!all_finite(mat_)) throw InvariantError("DensityMatrix: non-finite entry");
    if (!is_hermitian(mat_)) throw InvariantError("DensityMatrix: not Hermitian");
    if (std::abs(mat_.trace() - Complex(1.0)) > kTol) {
      throw InvariantError("DensityMatrix: trace differs from 1");
    }
    if (mat_.rows() > 0 && min_eigenvalue(mat_) < -kTol) {
      throw InvariantError("DensityMatrix: negative eigenvalue");
    }
  }

  static DensityMatrix pure(const StateVector& psi) { return pure(psi, SystemShape{std::size_t(psi.size())}); }

  static DensityMatrix pure(const StateVector& psi, SystemShape shape) {
    if (std::abs(psi.norm() - 1.0) > kTol) throw DomainError("state vector is not normalized");
    return DensityMatrix(psi * psi.adjoint(), std::move(shape));
  }

  static DensityMatrix maximally_mixed(std::size_t d) {
    return DensityMatrix(ComplexMatrix::Identity(idx(d), idx(d)) / double(d));
  }

  const ComplexMatrix& mat() const { return mat_; }
  const SystemShape& shape() const { return shape_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

 private:
  ComplexMatrix mat_;
  SystemShape shape_;
};

inline void require_normalized(const StateVector& psi, const char* what) {
  if (std::abs(psi.norm() - 1.0) > kTol) {
    throw DomainError(std::string(what) + ": state vector is not normalized");
  }
}

}  // namespace qdev
