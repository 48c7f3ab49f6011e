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

// Symmetric subspaces, occupation-number bases, permutation representations,
// SU(2) spin operators, Clebsch-Gordan data and the many-copies block
// decomposition of qubit states.
//
// Spin basis ordering: magnetic numbers descending, index a <-> m = l - a.
// For l = 1/2 this is the qubit computational basis with |0> spin up, so
// J_z = sigma_z / 2 and J_x = sigma_x / 2.

#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <tuple>
#include <utility>

#include "qdev/tensor.hpp"

namespace qdev {

// ---------------------------------------------------------------- counting

using u128 = unsigned __int128;

inline u128 binomial_wide(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;  // exact: c * (n-k+i) is divisible by i here
  }
  return c;
}

inline std::uint64_t narrow_count(u128 c, const char* what) {
  if (c > u128(std::numeric_limits<std::uint64_t>::max())) {
    throw SizeError(std::string(what) + ": count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  return narrow_count(binomial_wide(n, k), "binomial");
}

inline double binomial_real(std::uint64_t n, std::uint64_t k) {
  if (n <= 120) return static_cast<double>(binomial_wide(n, k));
  return std::exp(std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                  std::lgamma(double(n - k) + 1));
}

// Dimension of the symmetric subspace of (C^d)^{(x)N}.
inline std::uint64_t sym_dim(std::uint64_t d, std::uint64_t n) {
  if (d == 0) throw DomainError("sym_dim: d must be >= 1");
  return binomial(d + n - 1, n);
}

inline double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= double(k);
  return f;
}

// ----------------------------------------------------------- occupations

struct OccupationIndex {
  std::vector<std::size_t> counts;

  std::size_t d() const { return counts.size(); }
  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

  // N! / prod n_i!
  double multinomial() const {
    double m = factorial(total());
    for (auto c : counts) m /= factorial(c);
    return m;
  }

  // Basis enumeration order: n_0 descending, then n_1 descending, ...
  // so that |0...0> comes first.
  auto operator<=>(const OccupationIndex& o) const { return o.counts <=> counts; }
  bool operator==(const OccupationIndex&) const = default;
};

inline std::vector<OccupationIndex> enumerate_occupations(std::size_t d, std::size_t n) {
  if (d == 0) throw DomainError("enumerate_occupations: d must be >= 1");
  std::vector<OccupationIndex> out;
  std::vector<std::size_t> cur(d, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos == d - 1) {
      cur[pos] = left;
      out.push_back({cur});
      return;
    }
    for (std::size_t a = left + 1; a-- > 0;) {
      cur[pos] = a;
      rec(pos + 1, left - a);
    }
  };
  rec(0, n);
  return out;
}

// Digits of a basis index of (C^d)^{(x)n}, factor 0 first.
inline std::vector<std::size_t> digits(std::size_t index, std::size_t d, std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t k = n; k-- > 0;) {
    out[k] = index % d;
    index /= d;
  }
  return out;
}

inline std::vector<std::size_t> occupation_of(std::size_t index, std::size_t d, std::size_t n) {
  std::vector<std::size_t> occ(d, 0);
  for (auto x : digits(index, d, n)) ++occ[x];
  return occ;
}

inline StateVector occupation_vector(std::size_t d, const OccupationIndex& occ) {
  if (occ.d() != d) throw DomainError("occupation_vector: index has wrong number of levels");
  const std::size_t n = occ.total();
  const std::size_t dim = checked_pow(d, n);
  StateVector v = StateVector::Zero(idx(dim));
  const double amp = 1.0 / std::sqrt(occ.multinomial());
  for (std::size_t i = 0; i < dim; ++i)
    if (occupation_of(i, d, n) == occ.counts) v(idx(i)) = amp;
  return v;
}

// Columns are the occupation vectors in enumeration order.
inline ComplexMatrix symmetric_isometry(std::size_t d, std::size_t n) {
  const auto occs = enumerate_occupations(d, n);
  const std::size_t dim = checked_pow(d, n);
  ComplexMatrix w = ComplexMatrix::Zero(idx(dim), idx(occs.size()));
  std::map<std::vector<std::size_t>, std::size_t> where;
  for (std::size_t c = 0; c < occs.size(); ++c) where[occs[c].counts] = c;
  for (std::size_t i = 0; i < dim; ++i) {
    const auto c = where.at(occupation_of(i, d, n));
    w(idx(i), idx(c)) = 1.0 / std::sqrt(occs[c].multinomial());
  }
  return w;
}

// ----------------------------------------------------------- permutations

// Pi_tau moves tensor factor k to position tau[k]; Pi_sigma Pi_tau = Pi_{sigma o tau}.
inline ComplexMatrix permutation_matrix(std::size_t n, const std::vector<std::size_t>& tau,
                                        std::size_t d) {
  if (tau.size() != n) throw DomainError("permutation_matrix: tau has wrong length");
  std::vector<bool> seen(n, false);
  for (auto t : tau) {
    if (t >= n || seen[t]) throw DomainError("permutation_matrix: tau is not a permutation");
    seen[t] = true;
  }
  const std::size_t dim = checked_pow(d, n);
  std::vector<std::size_t> stride(n);
  for (std::size_t k = n, s = 1; k-- > 0; s *= d) stride[k] = s;
  ComplexMatrix p = ComplexMatrix::Zero(idx(dim), idx(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const auto dig = digits(i, d, n);
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) j += dig[k] * stride[tau[k]];
    p(idx(j), idx(i)) = 1.0;
  }
  return p;
}

inline std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> tau(n);
  std::iota(tau.begin(), tau.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(tau);
  while (std::next_permutation(tau.begin(), tau.end()));
  return out;
}

// Group average (1/N!) sum_tau Pi_tau X Pi_tau^dag over S_N.
inline ComplexMatrix twirl_permutations(const ComplexMatrix& x, std::size_t d, std::size_t n) {
  ComplexMatrix acc = ComplexMatrix::Zero(x.rows(), x.cols());
  const auto perms = all_permutations(n);
  for (const auto& tau : perms) {
    ComplexMatrix p = permutation_matrix(n, tau, d);
    acc += p * x * p.transpose();
  }
  return acc / double(perms.size());
}

// P_S = (1/N!) sum_tau Pi_tau. Small N averages the permutation matrices
// explicitly; larger N uses the orbit count of that same average,
// #{tau : tau(b) = a} = prod_i n_i! when a rearranges b.
inline ComplexMatrix sym_projector(std::size_t d, std::size_t n) {
  const std::size_t dim = checked_pow(d, n);
  ComplexMatrix p = ComplexMatrix::Zero(idx(dim), idx(dim));
  if (n <= 8) {
    std::vector<std::size_t> stride(n);
    for (std::size_t k = n, s = 1; k-- > 0; s *= d) stride[k] = s;
    std::vector<std::vector<std::size_t>> dig(dim);
    for (std::size_t i = 0; i < dim; ++i) dig[i] = digits(i, d, n);
    const auto perms = all_permutations(n);
    const double w = 1.0 / double(perms.size());
    for (const auto& tau : perms)
      for (std::size_t i = 0; i < dim; ++i) {
        std::size_t j = 0;
        for (std::size_t k = 0; k < n; ++k) j += dig[i][k] * stride[tau[k]];
        p(idx(j), idx(i)) += w;
      }
    return p;
  }
  std::vector<std::vector<std::size_t>> occ(dim);
  for (std::size_t i = 0; i < dim; ++i) occ[i] = occupation_of(i, d, n);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      if (occ[a] != occ[b]) continue;
      double w = 1.0 / factorial(n);
      for (auto c : occ[a]) w *= factorial(c);
      p(idx(a), idx(b)) = w;
    }
  return p;
}

// ------------------------------------------------------------------ spins

class SpinRep {
 public:
  SpinRep() = default;
  static SpinRep from_twice(int twice_l) {
    if (twice_l < 0) throw DomainError("SpinRep: l must be >= 0");
    SpinRep s;
    s.twice_ = twice_l;
    return s;
  }
  static SpinRep from_double(double l) {
    const double t = 2.0 * l;
    if (std::abs(t - std::round(t)) > 1e-12) throw DomainError("SpinRep: 2l must be an integer");
    return from_twice(int(std::lround(t)));
  }

  int twice() const { return twice_; }
  double l() const { return twice_ / 2.0; }
  std::size_t dim() const { return std::size_t(twice_) + 1; }
  // Magnetic number at basis index a.
  double m(std::size_t a) const { return l() - double(a); }
  auto operator<=>(const SpinRep&) const = default;

 private:
  int twice_ = 0;
};

enum class Axis { x, y, z };

inline ComplexMatrix spin_raise(SpinRep s) {
  const auto n = idx(s.dim());
  ComplexMatrix jp = ComplexMatrix::Zero(n, n);
  const double l = s.l();
  // J_+ |m> = sqrt(l(l+1) - m(m+1)) |m+1>; index a-1 holds m+1.
  for (std::size_t a = 1; a < s.dim(); ++a) {
    const double m = s.m(a);
    jp(idx(a - 1), idx(a)) = std::sqrt(l * (l + 1) - m * (m + 1));
  }
  return jp;
}

inline ComplexMatrix spin_operator(SpinRep s, Axis axis) {
  ComplexMatrix jp = spin_raise(s);
  switch (axis) {
    case Axis::x:
      return (jp + jp.adjoint()) / 2.0;
    case Axis::y:
      return (jp - jp.adjoint()) / (2.0 * kI);
    case Axis::z: {
      ComplexMatrix jz = ComplexMatrix::Zero(idx(s.dim()), idx(s.dim()));
      for (std::size_t a = 0; a < s.dim(); ++a) jz(idx(a), idx(a)) = s.m(a);
      return jz;
    }
  }
  throw DomainError("spin_operator: bad axis");
}

// Spin labels l = N/2, N/2 - 1, ..., down to 0 or 1/2.
inline std::vector<SpinRep> spin_labels(std::size_t n) {
  std::vector<SpinRep> out;
  for (int t = int(n); t >= 0; t -= 2) out.push_back(SpinRep::from_twice(t));
  return out;
}

inline void require_spin_label(std::size_t n, SpinRep j) {
  if (n == 0) throw DomainError("cg_multiplicity: N must be >= 1");
  if (j.twice() > int(n) || (int(n) - j.twice()) % 2 != 0) {
    throw DomainError("cg_multiplicity: j = " + std::to_string(j.l()) +
                      " is not a spin label of " + std::to_string(n) + " qubits");
  }
}

// d_j = (2j+1)/(N/2+j+1) * C(N, N/2-j), the number of spin-j blocks in (C^2)^{(x)N}.
inline std::uint64_t cg_multiplicity(std::size_t n, SpinRep j) {
  require_spin_label(n, j);
  const std::uint64_t k = (n - std::size_t(j.twice())) / 2;  // N/2 - j
  const u128 num = binomial_wide(n, k) * u128(j.twice() + 1);
  const u128 den = u128(n - k + 1);  // N/2 + j + 1
  return narrow_count(num / den, "cg_multiplicity");
}

inline double cg_multiplicity_real(std::size_t n, SpinRep j) {
  require_spin_label(n, j);
  const std::uint64_t k = (n - std::size_t(j.twice())) / 2;
  if (n <= 120) {
    const u128 num = binomial_wide(n, k) * u128(j.twice() + 1);
    return static_cast<double>(num / u128(n - k + 1));
  }
  return binomial_real(n, k) * double(j.twice() + 1) / double(n - k + 1);
}

// ---------------------------------------------------------- memo caches

template <class Key, class Value>
class MemoCache {
 public:
  template <class Make>
  Value get(const Key& key, Make&& make) {
    {
      std::shared_lock lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    Value v = make();
    std::unique_lock lock(mu_);
    return map_.emplace(key, std::move(v)).first->second;
  }

 private:
  std::shared_mutex mu_;
  std::map<Key, Value> map_;
};

// ------------------------------------------------------- Clebsch-Gordan

// Columns |J, M> for M = J, J-1, ..., -J inside C^{2j+1} (x) C^{2l+1},
// built from the highest weight by J_- descent. Condon-Shortley phase:
// <j j; l J-j | J J> > 0.
inline ComplexMatrix cg_basis(SpinRep j, SpinRep l, SpinRep J) {
  if (J.twice() > j.twice() + l.twice() || J.twice() < std::abs(j.twice() - l.twice()) ||
      (j.twice() + l.twice() - J.twice()) % 2 != 0) {
    throw DomainError("cg_projector: (j, l, J) violates the triangle rule");
  }
  static MemoCache<std::tuple<int, int, int>, ComplexMatrix> cache;
  return cache.get({j.twice(), l.twice(), J.twice()}, [&] {
    const std::size_t dj = j.dim(), dl = l.dim();
    const auto dim = idx(dj * dl);
    ComplexMatrix ij = ComplexMatrix::Identity(idx(dj), idx(dj));
    ComplexMatrix il = ComplexMatrix::Identity(idx(dl), idx(dl));
    ComplexMatrix jp = tensor(spin_raise(j), il) + tensor(ij, spin_raise(l));
    ComplexMatrix jm = jp.adjoint();

    // Product states with total twice-m equal to 2J.
    std::vector<Eigen::Index> sector;
    for (std::size_t a = 0; a < dj; ++a)
      for (std::size_t b = 0; b < dl; ++b)
        if (std::lround(2 * (j.m(a) + l.m(b))) == J.twice()) sector.push_back(idx(a * dl + b));
    ComplexMatrix cols(dim, idx(sector.size()));
    for (std::size_t c = 0; c < sector.size(); ++c) cols.col(idx(c)) = jp.col(sector[c]);
    auto sp = eigh(cols.adjoint() * cols);
    StateVector hw = StateVector::Zero(dim);
    for (std::size_t c = 0; c < sector.size(); ++c) hw(sector[c]) = sp.vectors(idx(c), 0);
    if (sp.values(0) > 1e-9) throw InvariantError("cg_basis: no highest-weight vector");
    hw.normalize();
    // Condon-Shortley: component on |m1 = j, m2 = J - j> real positive.
    const auto ref = idx(std::size_t(std::lround(l.l() - (J.l() - j.l()))));
    const Complex c = hw(ref);
    if (std::abs(c) < 1e-12) throw InvariantError("cg_basis: vanishing reference coefficient");
    hw *= std::conj(c) / std::abs(c);

    ComplexMatrix out(dim, idx(J.dim()));
    out.col(0) = hw;
    for (std::size_t a = 1; a < J.dim(); ++a) {
      const double m = J.m(a - 1);
      const double norm = std::sqrt(J.l() * (J.l() + 1) - m * (m - 1));
      out.col(idx(a)) = jm * out.col(idx(a - 1)) / norm;
    }
    return out;
  });
}

inline ComplexMatrix cg_projector(SpinRep j, SpinRep l, SpinRep J) {
  ComplexMatrix b = cg_basis(j, l, J);
  return b * b.adjoint();
}

// --------------------------------------------- qubit coupled basis, N copies

// Single-site lowering on qubit k of n (|0> up, so J_- maps |0> to |1>),
// summed over sites: the collective J_- applied to a state vector.
inline StateVector collective_lower(const StateVector& v, std::size_t n) {
  StateVector out = StateVector::Zero(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) == Complex(0.0)) continue;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t bit = std::size_t{1} << (n - 1 - k);
      if ((std::size_t(i) & bit) == 0) out(idx(std::size_t(i) | bit)) += v(i);
    }
  }
  return out;
}

struct CoupledBlock {
  SpinRep l;
  // One 2^N x (2l+1) isometry per multiplicity copy; columns |l, m> with m
  // descending, related by the same J_- ladder in every copy.
  std::vector<ComplexMatrix> copies;
};

struct CoupledBasis {
  std::size_t n = 0;
  std::vector<CoupledBlock> blocks;  // l = N/2 first

  // Full change of basis, columns grouped by (l, copy, m).
  ComplexMatrix unitary() const {
    const auto dim = idx(std::size_t{1} << n);
    ComplexMatrix u(dim, dim);
    Eigen::Index c = 0;
    for (const auto& b : blocks)
      for (const auto& w : b.copies) {
        u.middleCols(c, w.cols()) = w;
        c += w.cols();
      }
    return u;
  }
};

// Coupled basis of (C^2)^{(x)N}: highest weights are the kernel of J_+ in
// each total-m sector, and the remaining vectors follow by J_- descent.
inline CoupledBasis qubit_coupled_basis(std::size_t n) {
  if (n == 0) throw DomainError("qubit_coupled_basis: N must be >= 1");
  const std::size_t dim = checked_pow(2, n);
  CoupledBasis basis;
  basis.n = n;
  for (SpinRep l : spin_labels(n)) {
    // Sector with m = l: strings with (N/2 - l) ones.
    const std::size_t ones = (n - std::size_t(l.twice())) / 2;
    std::vector<std::size_t> sector, above;
    for (std::size_t i = 0; i < dim; ++i) {
      const auto pc = std::size_t(std::popcount(i));
      if (pc == ones) sector.push_back(i);
      if (ones > 0 && pc == ones - 1) above.push_back(i);
    }
    const std::size_t mult = cg_multiplicity(n, l);
    ComplexMatrix kernel;
    if (above.empty()) {
      kernel = ComplexMatrix::Identity(idx(sector.size()), idx(sector.size()));
    } else {
      // J_+ restricted: sector -> above; J_+ flips a 1 to 0.
      std::map<std::size_t, std::size_t> pos;
      for (std::size_t r = 0; r < above.size(); ++r) pos[above[r]] = r;
      ComplexMatrix jp = ComplexMatrix::Zero(idx(above.size()), idx(sector.size()));
      for (std::size_t c = 0; c < sector.size(); ++c)
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t bit = std::size_t{1} << k;
          if (sector[c] & bit) jp(idx(pos.at(sector[c] & ~bit)), idx(c)) += 1.0;
        }
      auto sp = eigh(jp.adjoint() * jp);
      kernel = sp.vectors.leftCols(idx(mult));
      if (sp.values(idx(mult - 1)) > 1e-9 ||
          (std::size_t(sp.values.size()) > mult && sp.values(idx(mult)) < 1e-6)) {
        throw InvariantError("qubit_coupled_basis: kernel dimension mismatch");
      }
    }
    CoupledBlock block{l, {}};
    for (std::size_t a = 0; a < mult; ++a) {
      ComplexMatrix w(idx(dim), idx(l.dim()));
      StateVector hw = StateVector::Zero(idx(dim));
      for (std::size_t c = 0; c < sector.size(); ++c) hw(idx(sector[c])) = kernel(idx(c), idx(a));
      w.col(0) = hw.normalized();
      for (std::size_t b = 1; b < l.dim(); ++b) {
        const double m = l.m(b - 1);
        const double norm = std::sqrt(l.l() * (l.l() + 1) - m * (m - 1));
        w.col(idx(b)) = collective_lower(w.col(idx(b - 1)), n) / norm;
      }
      block.copies.push_back(std::move(w));
    }
    basis.blocks.push_back(std::move(block));
  }
  return basis;
}

// ------------------------------------------------- many-copies decomposition

struct BlockWeights {
  struct Block {
    SpinRep l;
    double multiplicity = 0;     // d_l
    std::vector<double> weights;  // w_{l,m} for m = l, l-1, ..., -l
  };
  std::size_t n = 0;
  double r = 0;
  std::vector<Block> blocks;

  double total() const {
    double t = 0;
    for (const auto& b : blocks)
      for (auto w : b.weights) t += b.multiplicity * w;
    return t;
  }
};

// Weight of the (l, m) sector of rho^{(x)N}, rho = (I + r sigma_z)/2:
// ((1-r^2)/4)^{N/2} ((1+r)/(1-r))^m, evaluated as
// ((1+r)/2)^{N/2+m} ((1-r)/2)^{N/2-m}, which is finite on all of [0, 1].
inline double many_copies_weight(std::size_t n, double r, double m) {
  const double up = std::round(n / 2.0 + m), down = std::round(n / 2.0 - m);
  return std::pow((1 + r) / 2, up) * std::pow((1 - r) / 2, down);
}

inline BlockWeights many_copies_decompose(double r, std::size_t n) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("many_copies_decompose: r outside [0, 1]");
  if (n == 0) throw DomainError("many_copies_decompose: N must be >= 1");
  BlockWeights bw;
  bw.n = n;
  bw.r = r;
  for (SpinRep l : spin_labels(n)) {
    BlockWeights::Block b{l, cg_multiplicity_real(n, l), {}};
    for (std::size_t a = 0; a < l.dim(); ++a) b.weights.push_back(many_copies_weight(n, r, l.m(a)));
    bw.blocks.push_back(std::move(b));
  }
  return bw;
}

// Rebuilds the operator sum_{l, copy, m} w_{l,m} |l, m><l, m| in the product
// basis.
inline ComplexMatrix reconstruct_many_copies(const BlockWeights& bw, const CoupledBasis& basis) {
  if (bw.n != basis.n || bw.blocks.size() != basis.blocks.size()) {
    throw ShapeError("reconstruct_many_copies: mismatched N");
  }
  const auto dim = idx(std::size_t{1} << bw.n);
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < bw.blocks.size(); ++k) {
    RealVector w = Eigen::Map<const RealVector>(bw.blocks[k].weights.data(),
                                                idx(bw.blocks[k].weights.size()));
    for (const auto& c : basis.blocks[k].copies) out += c * w.cast<Complex>().asDiagonal() * c.adjoint();
  }
  return out;
}

}  // namespace qdev
