// SPDX-License-Identifier: Apache-2.0
#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "core/report.hpp"

namespace gf {

void SparseOperator::canonicalize(double drop) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> merged;
  merged.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
      merged.back().val += t.val;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [drop](const Triplet& t) { return std::abs(t.val) <= drop; }),
               merged.end());
  triplets.swap(merged);
}

cplx SparseOperator::entry(std::uint64_t r, std::uint64_t c) const {
  auto it = std::lower_bound(triplets.begin(), triplets.end(), Triplet{r, c, 0.0}, [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  if (it != triplets.end() && it->row == r && it->col == c) return it->val;
  return 0.0;
}

bool SparseOperator::is_hermitian(double tol) const {
  SparseOperator c = *this;
  c.canonicalize();
  for (const auto& t : c.triplets)
    if (std::abs(t.val - std::conj(c.entry(t.col, t.row))) > tol) return false;
  return true;
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  if (dim > 16384) fail_budget("dense conversion beyond 16384");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : triplets) m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.val;
  return m;
}

std::string SparseOperator::to_csv() const {
  SparseOperator c = *this;
  c.canonicalize();
  std::string out = "row,col,re,im\n";
  for (const auto& t : c.triplets) {
    out += std::to_string(t.row) + "," + std::to_string(t.col) + "," + format_double(t.val.real()) + "," +
           format_double(t.val.imag()) + "\n";
  }
  return out;
}

void SparseOperator::shift(double c) {
  for (std::uint64_t i = 0; i < dim; ++i) add(i, i, c);
}

SparseOperator operator_from_dense(const Eigen::MatrixXcd& m, double drop) {
  SparseOperator op(static_cast<std::uint64_t>(m.rows()));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > drop) op.add(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c), m(r, c));
  return op;
}

Spectrum dense_spectrum(const Eigen::MatrixXcd& m, int k, bool want_vectors) {
  Spectrum s;
  if (m.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail_invariant("dense eigensolver failed");
  int n = std::min<int>(k, static_cast<int>(m.rows()));
  for (int i = 0; i < n; ++i) {
    s.values.push_back(es.eigenvalues()(i));
    if (want_vectors) s.vectors.push_back(es.eigenvectors().col(i));
  }
  return s;
}

namespace {

struct Csr {
  int n = 0;
  std::vector<int> ptr, idx;
  std::vector<cplx> val;
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    for (int r = 0; r < n; ++r) {
      cplx acc = 0.0;
      for (int p = ptr[r]; p < ptr[r + 1]; ++p) acc += val[p] * x(idx[p]);
      y(r) = acc;
    }
  }
};

void orthogonalize(Eigen::VectorXcd& v, const std::vector<Eigen::VectorXcd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= b * b.dot(v);
}

// Lowest k eigenpairs by restarted Lanczos, one locked vector at a time.
Spectrum lanczos(const Csr& a, int k, double tol, std::uint64_t seed) {
  Spectrum out;
  std::vector<Eigen::VectorXcd> locked;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const int n = a.n;
  k = std::min(k, n);
  const int m = std::min(n, 160);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), 0.0);
    orthogonalize(v, locked);
    double theta = 0.0, res = 1e300;
    Eigen::VectorXcd x;
    for (int restart = 0; restart < 400; ++restart) {
      v.normalize();
      std::vector<Eigen::VectorXcd> basis{v};
      std::vector<double> alpha, beta;
      Eigen::VectorXcd w(n);
      int steps = std::min(m, n - static_cast<int>(locked.size()));
      for (int it = 0; it < steps; ++it) {
        a.apply(basis.back(), w);
        double al = basis.back().dot(w).real();
        alpha.push_back(al);
        orthogonalize(w, locked);
        orthogonalize(w, basis);
        double b = w.norm();
        if (b < 1e-12 || it + 1 == steps) break;
        beta.push_back(b);
        basis.push_back(w / b);
      }
      int mm = static_cast<int>(alpha.size());
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(mm, mm);
      for (int i = 0; i < mm; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < mm) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      theta = es.eigenvalues()(0);
      x = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < mm; ++i) x += basis[i] * es.eigenvectors()(i, 0);
      orthogonalize(x, locked);
      x.normalize();
      a.apply(x, w);
      theta = x.dot(w).real();
      res = (w - theta * x).norm();
      if (res <= tol * std::max(1.0, std::abs(theta))) break;
      v = x;
    }
    if (res > tol * std::max(1.0, std::abs(theta)) * 10) {
      std::ostringstream ss;
      ss << "Lanczos did not converge: residual " << res;
      fail_invariant(ss.str());
    }
    out.max_residual = std::max(out.max_residual, res);
    locked.push_back(x);
    out.values.push_back(theta);
    out.vectors.push_back(x);
  }
  // Rayleigh-Ritz on the locked block to sort and clean up.
  int q = static_cast<int>(locked.size());
  Eigen::MatrixXcd proj(q, q);
  Eigen::VectorXcd w(n);
  for (int c = 0; c < q; ++c) {
    a.apply(locked[c], w);
    for (int r = 0; r < q; ++r) proj(r, c) = locked[r].dot(w);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(proj);
  Spectrum sorted;
  sorted.max_residual = out.max_residual;
  for (int i = 0; i < q; ++i) {
    sorted.values.push_back(es.eigenvalues()(i));
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
    for (int r = 0; r < q; ++r) y += locked[r] * es.eigenvectors()(r, i);
    sorted.vectors.push_back(y);
  }
  return sorted;
}

struct DisjointSet {
  std::vector<std::uint64_t> parent;
  explicit DisjointSet(std::uint64_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::uint64_t find(std::uint64_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint64_t a, std::uint64_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Spectrum low_spectrum(const SparseOperator& op_in, int k, double tol, bool want_vectors) {
  if (k <= 0) fail_invalid("low_spectrum: k must be positive");
  SparseOperator op = op_in;
  op.canonicalize();
  if (!op.is_hermitian(1e-10)) fail_invalid("low_spectrum: operator is not Hermitian");
  const std::uint64_t n = op.dim;
  DisjointSet ds(n);
  std::vector<char> touched(n, 0);
  for (const auto& t : op.triplets) {
    ds.unite(t.row, t.col);
    touched[t.row] = touched[t.col] = 1;
  }
  // Group members by root; isolated untouched indices have eigenvalue 0.
  std::vector<std::uint64_t> order;
  for (std::uint64_t i = 0; i < n; ++i)
    if (touched[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) { return ds.find(a) < ds.find(b); });

  struct Candidate {
    double value;
    Eigen::VectorXcd vec;  // local
    std::vector<std::uint64_t> support;
    int rank;
  };
  std::vector<Candidate> cands;
  std::vector<std::int64_t> local(n, -1);
  // Entries grouped per row for slicing.
  std::vector<std::size_t> row_start(n + 1, 0);
  for (const auto& t : op.triplets) row_start[t.row + 1]++;
  for (std::uint64_t i = 0; i < n; ++i) row_start[i + 1] += row_start[i];

  double max_res = 0.0;
  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos;
    std::uint64_t root = ds.find(order[pos]);
    while (end < order.size() && ds.find(order[end]) == root) ++end;
    std::vector<std::uint64_t> members(order.begin() + static_cast<long>(pos), order.begin() + static_cast<long>(end));
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<std::int64_t>(i);
    int sz = static_cast<int>(members.size());
    Spectrum s;
    if (members.size() <= kDenseLimit) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(sz, sz);
      for (int i = 0; i < sz; ++i)
        for (std::size_t p = row_start[members[i]]; p < row_start[members[i] + 1]; ++p)
          m(i, local[op.triplets[p].col]) += op.triplets[p].val;
      s = dense_spectrum(m, k, want_vectors);
    } else {
      Csr a;
      a.n = sz;
      a.ptr.push_back(0);
      for (int i = 0; i < sz; ++i) {
        for (std::size_t p = row_start[members[i]]; p < row_start[members[i] + 1]; ++p) {
          a.idx.push_back(static_cast<int>(local[op.triplets[p].col]));
          a.val.push_back(op.triplets[p].val);
        }
        a.ptr.push_back(static_cast<int>(a.idx.size()));
      }
      s = lanczos(a, k, tol * 0.1, 0x9e3779b97f4a7c15ULL ^ root);
      max_res = std::max(max_res, s.max_residual);
    }
    for (std::size_t i = 0; i < s.values.size(); ++i)
      cands.push_back({s.values[i], want_vectors ? s.vectors[i] : Eigen::VectorXcd(), members, static_cast<int>(i)});
    for (auto mi : members) local[mi] = -1;
    pos = end;
  }
  std::uint64_t isolated = n - order.size();
  for (std::uint64_t i = 0, added = 0; i < n && added < isolated && added < static_cast<std::uint64_t>(k); ++i) {
    if (touched[i]) continue;
    Eigen::VectorXcd v(1);
    v(0) = 1.0;
    cands.push_back({0.0, v, {i}, 0});
    ++added;
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  Spectrum out;
  out.max_residual = max_res;
  for (std::size_t i = 0; i < cands.size() && static_cast<int>(i) < k; ++i) {
    out.values.push_back(cands[i].value);
    if (want_vectors) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j < cands[i].support.size(); ++j) v(static_cast<Eigen::Index>(cands[i].support[j])) = cands[i].vec(j);
      out.vectors.push_back(v);
    }
  }
  return out;
}

double spectral_gap(const std::vector<double>& spec) {
  if (spec.size() < 2) fail_invalid("spectral_gap needs at least two eigenvalues");
  return spec[1] - spec[0];
}

int ground_multiplicity(const std::vector<double>& spec, double tol) {
  if (spec.empty()) return 0;
  int m = 0;
  for (double v : spec)
    if (std::abs(v - spec[0]) <= tol) ++m;
  return m;
}

}  // namespace gf
