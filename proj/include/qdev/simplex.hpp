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

// Dense phase-I simplex for feasibility of {x >= 0 : A x = b}. Bland's rule
// keeps it finite on degenerate problems. On infeasibility it returns a
// Farkas vector y with A^T y <= 0 and b^T y > 0.

#include "qdev/tensor.hpp"

namespace qdev {

struct LpFeasibility {
  bool feasible = false;
  RealVector x;       // a feasible point when feasible
  RealVector farkas;  // certificate y when infeasible
  double phase1_objective = 0.0;
  std::size_t pivots = 0;
};

inline LpFeasibility solve_feasibility(const RealMatrix& a_in, const RealVector& b_in, double tol = 1e-9) {
  if (a_in.rows() != b_in.size()) throw ShapeError("solve_feasibility: A and b disagree");
  const Eigen::Index m = a_in.rows(), n = a_in.cols();
  RealVector sign = RealVector::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i)
    if (b_in(i) < 0) sign(i) = -1.0;

  // Tableau [A' | I | b'] with the reduced-cost row appended at the bottom.
  RealMatrix t = RealMatrix::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = sign.asDiagonal() * a_in;
  t.block(0, n, m, m).setIdentity();
  t.topRightCorner(m, 1) = sign.cwiseProduct(b_in);
  for (Eigen::Index j = 0; j < n; ++j) t(m, j) = -t.col(j).head(m).sum();
  t(m, n + m) = -t.col(n + m).head(m).sum();  // minus the current objective
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[std::size_t(i)] = n + i;

  LpFeasibility res;
  const std::size_t max_pivots = 50000;
  while (res.pivots < max_pivots) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (t(m, j) < -tol) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= tol) continue;
      const double ratio = t(i, n + m) / t(i, enter);
      if (leave < 0 || ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 && basis[std::size_t(i)] < basis[std::size_t(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen for a phase-I objective bounded below
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[std::size_t(leave)] = enter;
    ++res.pivots;
  }
  if (res.pivots >= max_pivots) throw InvariantError("solve_feasibility: pivot limit reached");

  res.phase1_objective = -t(m, n + m);
  res.x = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[std::size_t(i)] < n) res.x(basis[std::size_t(i)]) = std::max(0.0, t(i, n + m));
  res.feasible = res.phase1_objective <= tol * std::max(1.0, b_in.cwiseAbs().maxCoeff());
  if (!res.feasible) {
    // Artificial reduced cost 1 - y_k, mapped back through the row signs.
    RealVector y(m);
    for (Eigen::Index k = 0; k < m; ++k) y(k) = (1.0 - t(m, n + k)) * sign(k);
    res.farkas = y;
  }
  return res;
}

}  // namespace qdev
