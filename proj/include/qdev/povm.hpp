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

// POVMs: validation, classical postprocessing and its reachability decision,
// cleanness predicates, sampled ranges, and a finite truncation of a
// nonorthogonal repeatable instrument.

#include <limits>
#include <optional>

#include "qdev/random.hpp"
#include "qdev/simplex.hpp"
#include "qdev/tensor.hpp"

namespace qdev {

class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> effects, std::vector<std::string> labels = {})
      : effects_(std::move(effects)), labels_(std::move(labels)) {
    if (effects_.empty()) throw ShapeError("Povm: no effects");
    const auto d = effects_.front().rows();
    for (const auto& e : effects_) {
      if (e.rows() != d || e.cols() != d || d == 0) throw ShapeError("Povm: effects must be d x d, same d");
      if (!all_finite(e)) throw InvariantError("Povm: non-finite entry");
    }
    if (labels_.empty())
      for (std::size_t i = 0; i < effects_.size(); ++i) labels_.push_back(std::to_string(i));
    if (labels_.size() != effects_.size()) throw ShapeError("Povm: label count differs from effect count");
  }

  std::size_t dim() const { return std::size_t(effects_.front().rows()); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  const ComplexMatrix& operator[](std::size_t i) const { return effects_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<ComplexMatrix> effects_;
  std::vector<std::string> labels_;
};

inline Povm basis_povm(std::size_t d) {
  std::vector<ComplexMatrix> e;
  for (std::size_t i = 0; i < d; ++i) e.push_back(ket(d, i) * ket(d, i).adjoint());
  return Povm(std::move(e));
}

// {|0><0|/2, |0><0|/2, |1><1|, ..., |d-1><d-1|}: rank-one with a doubled outcome.
inline Povm redundant_basis_povm(std::size_t d) {
  std::vector<ComplexMatrix> e;
  ComplexMatrix p0 = ket(d, 0) * ket(d, 0).adjoint();
  e.push_back(p0 / 2.0);
  e.push_back(p0 / 2.0);
  for (std::size_t i = 1; i < d; ++i) e.push_back(ket(d, i) * ket(d, i).adjoint());
  return Povm(std::move(e));
}

struct PovmDiagnostics {
  std::size_t dim = 0, outcomes = 0;
  std::vector<double> min_eigs;
  double hermiticity_defect = 0;
  double completeness_defect = 0;
  bool positive = false, complete = false, valid = false;
};

inline PovmDiagnostics povm_validate(const Povm& p) {
  PovmDiagnostics g;
  g.dim = p.dim();
  g.outcomes = p.size();
  ComplexMatrix sum = ComplexMatrix::Zero(idx(g.dim), idx(g.dim));
  g.positive = true;
  for (const auto& e : p.effects()) {
    g.hermiticity_defect = std::max(g.hermiticity_defect, max_abs(e - e.adjoint()));
    g.min_eigs.push_back(min_eigenvalue(e));
    if (g.min_eigs.back() < -kTol) g.positive = false;
    sum += e;
  }
  g.completeness_defect = max_abs(sum - ComplexMatrix::Identity(idx(g.dim), idx(g.dim)));
  g.complete = g.completeness_defect <= kTol;
  g.valid = g.positive && g.complete && g.hermiticity_defect <= kTol;
  return g;
}

inline void require_valid(const Povm& p, const char* what) {
  if (!povm_validate(p).valid) throw InvariantError(std::string(what) + ": not a valid POVM");
}

// Column-stochastic: p(i|j) >= 0 and sum_i p(i|j) = 1.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(RealMatrix p) : p_(std::move(p)) {
    if (p_.rows() == 0 || p_.cols() == 0) throw ShapeError("StochasticMatrix: empty");
    if (!p_.allFinite()) throw InvariantError("StochasticMatrix: non-finite entry");
    if (p_.minCoeff() < -kTol) throw InvariantError("StochasticMatrix: negative entry");
    if ((p_.colwise().sum().array() - 1.0).abs().maxCoeff() > kTol) {
      throw InvariantError("StochasticMatrix: a column does not sum to 1");
    }
  }
  static StochasticMatrix identity(std::size_t n) { return StochasticMatrix(RealMatrix::Identity(idx(n), idx(n))); }
  static StochasticMatrix random(std::size_t rows, std::size_t cols, Rng& rng) {
    RealMatrix p(idx(rows), idx(cols));
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = -std::log(rng.uniform(1e-12, 1.0));
    for (Eigen::Index j = 0; j < p.cols(); ++j) p.col(j) /= p.col(j).sum();
    return StochasticMatrix(std::move(p));
  }
  const RealMatrix& p() const { return p_; }
  std::size_t rows() const { return std::size_t(p_.rows()); }
  std::size_t cols() const { return std::size_t(p_.cols()); }
  StochasticMatrix operator*(const StochasticMatrix& o) const { return StochasticMatrix(p_ * o.p_); }

 private:
  RealMatrix p_;
};

// Q_i = sum_j p(i|j) P_j.
inline Povm postprocess(const Povm& p, const StochasticMatrix& s) {
  if (s.cols() != p.size()) throw ShapeError("postprocess: S must have one column per outcome of P");
  std::vector<ComplexMatrix> q;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(idx(p.dim()), idx(p.dim()));
    for (std::size_t j = 0; j < p.size(); ++j) e += s.p()(idx(i), idx(j)) * p[j];
    q.push_back(std::move(e));
  }
  return Povm(std::move(q));
}

struct ReachResult {
  bool reachable = false;
  std::optional<StochasticMatrix> witness;
  double residual = 0.0;  // max entry of |postprocess(P, witness) - Q|
  RealVector certificate;  // Farkas vector when unreachable
};

// Linear constraints in the unknowns s_{ij} (index i*m + j) for Q = S P:
// real and imaginary parts of the upper triangle of every Q_i, then the
// column sums of S.
struct ReachProblem {
  RealMatrix a;
  RealVector b;
};

inline ReachProblem reach_problem(const Povm& p, const Povm& q) {
  const std::size_t d = p.dim(), m = p.size(), n = q.size();
  const std::size_t per = d * d;  // d(d+1)/2 real parts + d(d-1)/2 imaginary parts
  ReachProblem pr{RealMatrix::Zero(idx(n * per + m), idx(n * m)), RealVector::Zero(idx(n * per + m))};
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row = i * per;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t c = a; c < d; ++c) {
        for (int part = 0; part < (a == c ? 1 : 2); ++part) {
          auto pick = [&](const Complex& z) { return part == 0 ? z.real() : z.imag(); };
          for (std::size_t j = 0; j < m; ++j) pr.a(idx(row), idx(i * m + j)) = pick(p[j](idx(a), idx(c)));
          pr.b(idx(row)) = pick(q[i](idx(a), idx(c)));
          ++row;
        }
      }
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) pr.a(idx(n * per + j), idx(i * m + j)) = 1.0;
    pr.b(idx(n * per + j)) = 1.0;
  }
  return pr;
}

inline double povm_distance(const Povm& a, const Povm& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, max_abs(a[i] - b[i]));
  return d;
}

// Is Q a classical postprocessing of P?
inline ReachResult postprocessing_reachable(const Povm& p, const Povm& q) {
  if (p.dim() != q.dim()) throw ShapeError("postprocessing_reachable: POVMs act on different spaces");
  const auto pr = reach_problem(p, q);
  const auto lp = solve_feasibility(pr.a, pr.b);
  ReachResult res;
  if (!lp.feasible) {
    res.certificate = lp.farkas;
    return res;
  }
  const std::size_t m = p.size(), n = q.size();
  RealMatrix s(idx(n), idx(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) s(idx(i), idx(j)) = lp.x(idx(i * m + j));
  for (Eigen::Index j = 0; j < s.cols(); ++j) s.col(j) /= s.col(j).sum();
  StochasticMatrix w(std::move(s));
  res.residual = povm_distance(postprocess(p, w), q);
  res.reachable = res.residual <= 1e-8;
  if (res.reachable) res.witness = std::move(w);
  return res;
}

// Rank with singular values below 1e-8 * sigma_max dropped.
inline std::size_t numerical_rank(const ComplexMatrix& e) {
  RealVector s = eigvalsh(e).cwiseAbs();
  const double smax = s.size() ? s.maxCoeff() : 0.0;
  if (smax == 0.0) return 0;
  return std::size_t((s.array() > 1e-8 * smax).count());
}

inline bool is_postprocessing_clean(const Povm& p) {
  require_valid(p, "is_postprocessing_clean");
  for (const auto& e : p.effects())
    if (numerical_rank(e) != 1) return false;
  return true;
}

// Two-outcome POVMs compared through the extreme eigenvalues of the first effect.
inline bool effects_equivalent(const Povm& p, const Povm& q) {
  if (p.size() != 2 || q.size() != 2) throw DomainError("effects_equivalent: two-outcome POVMs required");
  if (p.dim() != q.dim()) throw ShapeError("effects_equivalent: different dimensions");
  require_valid(p, "effects_equivalent");
  require_valid(q, "effects_equivalent");
  const RealVector a = eigvalsh(p[0]), b = eigvalsh(q[0]);
  return std::abs(a.maxCoeff() - b.maxCoeff()) <= kTol && std::abs(a.minCoeff() - b.minCoeff()) <= kTol;
}

inline Povm effect(const ComplexMatrix& e) {
  return Povm({e, ComplexMatrix::Identity(e.rows(), e.cols()) - e});
}

// Mutually orthogonal projectors: P_i P_j = delta_ij P_i.
inline bool is_observable(const Povm& p) {
  require_valid(p, "is_observable");
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      ComplexMatrix expect = i == j ? p[i] : ComplexMatrix::Zero(idx(p.dim()), idx(p.dim()));
      if (max_abs(p[i] * p[j] - expect) > kTol) return false;
    }
  return true;
}

// Preprocessing cleanness when |P| <= d: clean iff an observable.
inline bool preprocessing_clean_smalln(const Povm& p) {
  if (p.size() > p.dim()) {
    throw OutOfScopeError("preprocessing cleanness is decided here only for |P| <= d");
  }
  return is_observable(p);
}

// Rank-one POVMs are preprocessing clean for any outcome count; otherwise
// the small-n criterion applies; beyond both the question stays open.
inline std::optional<bool> is_preprocessing_clean(const Povm& p) {
  if (is_postprocessing_clean(p)) return true;
  if (p.size() <= p.dim()) return preprocessing_clean_smalln(p);
  return std::nullopt;
}

inline std::vector<RealVector> range_sample(const Povm& p, const std::vector<DensityMatrix>& states) {
  std::vector<RealVector> out;
  for (const auto& rho : states) {
    if (rho.dim() != p.dim()) throw ShapeError("range_sample: state dimension mismatch");
    RealVector v(idx(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) v(idx(i)) = (rho.mat() * p[i]).trace().real();
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------- truncated repeatable instrument

// D x D truncation of the shift instrument
//   M0 = sqrt(p)|1><0| + sum_j |2j+3><2j+1|,  M1 = sqrt(1-p)|2><0| + sum_j |2j+4><2j+2|,
//   P0 = p|0><0| + sum_j |2j+1><2j+1|,       P1 = (1-p)|0><0| + sum_j |2j+2><2j+2|.
// Each M_i raises the level by at most 2, so M_i^dag M_i = P_i holds on
// levels 0 .. D-3 (the safe subspace).
struct TruncatedRepeatable {
  std::size_t dim = 0;
  double p = 0;
  ComplexMatrix m0, m1, p0, p1;

  std::size_t safe_dim() const { return dim - 2; }
  const ComplexMatrix& m(std::size_t i) const { return i == 0 ? m0 : m1; }
  const ComplexMatrix& effect(std::size_t i) const { return i == 0 ? p0 : p1; }
};

inline TruncatedRepeatable truncated_repeatable(std::size_t dim, double p) {
  if (dim < 6 || dim % 2 != 0) throw DomainError("truncated_repeatable: D must be even and >= 6");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("truncated_repeatable: p must lie in [0, 1]");
  TruncatedRepeatable t;
  t.dim = dim;
  t.p = p;
  const auto n = idx(dim);
  t.m0 = t.m1 = t.p0 = t.p1 = ComplexMatrix::Zero(n, n);
  t.m0(1, 0) = std::sqrt(p);
  t.m1(2, 0) = std::sqrt(1 - p);
  t.p0(0, 0) = p;
  t.p1(0, 0) = 1 - p;
  for (std::size_t lvl = 1; lvl < dim; ++lvl) {
    ComplexMatrix& proj = lvl % 2 == 1 ? t.p0 : t.p1;
    ComplexMatrix& shift = lvl % 2 == 1 ? t.m0 : t.m1;
    proj(idx(lvl), idx(lvl)) = 1.0;
    if (lvl + 2 < dim) shift(idx(lvl + 2), idx(lvl)) = 1.0;
  }
  return t;
}

inline void require_safe(const TruncatedRepeatable& t, const StateVector& psi) {
  if (psi.size() != idx(t.dim)) throw ShapeError("repeatable instrument: state has wrong dimension");
  require_normalized(psi, "repeatable instrument");
  for (std::size_t lvl = t.safe_dim(); lvl < t.dim; ++lvl)
    if (std::abs(psi(idx(lvl))) > 1e-12) {
      throw DomainError("repeatable instrument: state has support on level " + std::to_string(lvl) +
                        " outside the safe subspace");
    }
}

struct RepeatabilityReport {
  RealVector first = RealVector::Zero(2);        // Tr[P_k psi]
  RealMatrix conditional = RealMatrix::Zero(2, 2);  // (j, k) -> p(j|k); NaN when p_k = 0
};

// p(j|k) = ||M_j M_k psi||^2 / ||M_k psi||^2, with ||M_j phi||^2 taken as
// <phi|P_j|phi>, the identity of the untruncated instrument. phi = M_k psi
// lies inside the truncation, so this is exact.
inline RepeatabilityReport repeatability_check(const TruncatedRepeatable& t, const StateVector& psi) {
  require_safe(t, psi);
  RepeatabilityReport rep;
  for (std::size_t k = 0; k < 2; ++k) {
    StateVector phi = t.m(k) * psi;
    double second[2];
    for (std::size_t j = 0; j < 2; ++j) second[j] = (phi.adjoint() * t.effect(j) * phi)(0, 0).real();
    const double norm2 = second[0] + second[1];
    rep.first(idx(k)) = (psi.adjoint() * t.effect(k) * psi)(0, 0).real();
    for (std::size_t j = 0; j < 2; ++j) {
      rep.conditional(idx(j), idx(k)) = norm2 > 0 ? second[j] / norm2 : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rep;
}

inline ComplexMatrix safe_block(const TruncatedRepeatable& t, std::size_t i) {
  const auto s = idx(t.safe_dim());
  return t.m(i).topLeftCorner(s, s);
}

// Whether M_i restricted to the safe block has an eigenvector with nonzero
// eigenvalue. The block is nilpotent iff it has none; kernel vectors give
// outcome i with probability zero and so are not fixed states.
inline bool admits_fixed_state(const TruncatedRepeatable& t, std::size_t i) {
  ComplexMatrix b = safe_block(t, i), pw = b;
  for (std::size_t k = 1; k < t.safe_dim(); ++k) pw = pw * b;
  return max_abs(pw) > 1e-12;
}

struct RepetitionStep {
  std::size_t outcome = 0;
  double prob[2] = {0, 0};
  double mean_level = 0;  // after the update
};

// Sequential measurement: sample outcomes with the instrument's probabilities
// and update the state. Stops with a domain error if the state would leave
// the safe subspace.
inline std::vector<RepetitionStep> simulate_repetitions(const TruncatedRepeatable& t, StateVector psi,
                                                        std::size_t reps, Rng& rng) {
  std::vector<RepetitionStep> out;
  for (std::size_t r = 0; r < reps; ++r) {
    require_safe(t, psi);
    RepetitionStep step;
    for (std::size_t k = 0; k < 2; ++k) step.prob[k] = (psi.adjoint() * t.effect(k) * psi)(0, 0).real();
    step.outcome = rng.uniform() < step.prob[0] ? 0 : 1;
    if (step.prob[step.outcome] <= 0) step.outcome = 1 - step.outcome;
    psi = t.m(step.outcome) * psi;
    psi /= psi.norm();
    for (Eigen::Index l = 0; l < psi.size(); ++l) step.mean_level += double(l) * std::norm(psi(l));
    out.push_back(step);
  }
  return out;
}

}  // namespace qdev
