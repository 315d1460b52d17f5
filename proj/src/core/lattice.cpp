// SPDX-License-Identifier: Apache-2.0
#include "core/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string_view>
#include <unordered_map>

namespace gf {

Lattice build_lattice(int L, int H) {
  if (L < 1 || H < 1) fail_invalid("build_lattice: dimensions must be positive");
  Lattice lat;
  lat.L = L;
  lat.H = H;
  lat.num_sites = L * (H + 1) + H * (L + 1);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < L; ++x)
      lat.plaquettes.push_back({lat.horizontal(x, y), lat.vertical(x + 1, y), lat.horizontal(x, y + 1), lat.vertical(x, y)});
  return lat;
}

json Lattice::to_json() const {
  json sites = json::array();
  for (int y = 0; y <= H; ++y) {
    for (int x = 0; x < L; ++x) sites.push_back({{"index", horizontal(x, y)}, {"kind", "h"}, {"x", x}, {"y", y}});
    if (y < H)
      for (int x = 0; x <= L; ++x) sites.push_back({{"index", vertical(x, y)}, {"kind", "v"}, {"x", x}, {"y", y}});
  }
  json pl = json::array();
  for (const auto& p : plaquettes) pl.push_back({p[0], p[1], p[2], p[3]});
  return {{"L", L}, {"H", H}, {"num_sites", num_sites}, {"sites", sites}, {"plaquettes", pl}};
}

std::vector<int> lattice_rotation(const Lattice& lat) {
  if (lat.L != lat.H) fail_invalid("lattice_rotation: lattice must be square");
  const int L = lat.L;
  std::vector<int> perm(static_cast<std::size_t>(lat.num_sites));
  for (int y = 0; y <= L; ++y)
    for (int x = 0; x < L; ++x) perm[lat.horizontal(x, y)] = lat.vertical(L - y, x);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x <= L; ++x) perm[lat.vertical(x, y)] = lat.horizontal(L - 1 - y, x);
  return perm;
}

LocalTerm::LocalTerm(int arity, std::size_t site_dim, std::string tag)
    : arity_(arity), site_dim_(site_dim), dim_(ipow(site_dim, static_cast<unsigned>(arity))), tag_(std::move(tag)) {
  if (arity < 1) fail_invalid("LocalTerm: arity must be positive");
  if (site_dim < 1) fail_invalid("LocalTerm: site dimension must be positive");
}

namespace {

class DenseTerm final : public LocalTerm {
 public:
  DenseTerm(int arity, std::size_t d, const Eigen::MatrixXcd& m, const std::string& tag) : LocalTerm(arity, d, tag), m_(m) {
    if (static_cast<std::uint64_t>(m.rows()) != dim() || m.rows() != m.cols())
      fail_invalid("dense_term: matrix shape does not match site dimension");
  }
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    for (Eigen::Index r = 0; r < m_.rows(); ++r)
      if (m_(r, static_cast<Eigen::Index>(col)) != cplx(0.0)) out.push_back({static_cast<std::uint64_t>(r), m_(r, static_cast<Eigen::Index>(col))});
  }

 private:
  Eigen::MatrixXcd m_;
};

class DiagonalTerm final : public LocalTerm {
 public:
  DiagonalTerm(int arity, std::size_t d, std::vector<double> diag, const std::string& tag)
      : LocalTerm(arity, d, tag), diag_(std::move(diag)) {
    if (diag_.size() != dim()) fail_invalid("diagonal_term: length does not match site dimension");
  }
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    if (diag_[col] != 0.0) out.push_back({col, diag_[col]});
  }
  bool is_diagonal() const override { return true; }

 private:
  std::vector<double> diag_;
};

class ScaledIdentity final : public LocalTerm {
 public:
  ScaledIdentity(int arity, std::size_t d, double c, const std::string& tag) : LocalTerm(arity, d, tag), c_(c) {}
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    if (c_ != 0.0) out.push_back({col, c_});
  }
  bool is_diagonal() const override { return true; }

 private:
  double c_;
};

class SumTerm final : public LocalTerm {
 public:
  SumTerm(const std::vector<std::pair<double, TermPtr>>& parts, const std::string& tag)
      : LocalTerm(parts.at(0).second->arity(), parts.at(0).second->site_dim(), tag), parts_(parts) {
    for (const auto& p : parts_)
      if (p.second->arity() != arity() || p.second->site_dim() != site_dim()) fail_invalid("sum_terms: shape mismatch");
  }
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    std::size_t start = out.size();
    for (const auto& [c, t] : parts_) {
      std::size_t s = out.size();
      t->column(col, out);
      for (std::size_t i = s; i < out.size(); ++i) out[i].val *= c;
    }
    (void)start;
  }
  bool is_diagonal() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const auto& p) { return p.second->is_diagonal(); });
  }

 private:
  std::vector<std::pair<double, TermPtr>> parts_;
};

class RotatedTerm final : public LocalTerm {
 public:
  explicit RotatedTerm(TermPtr base) : LocalTerm(4, base->site_dim(), base->tag() + "@rot"), base_(std::move(base)) {}
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    std::size_t s = out.size();
    base_->column(rotate_index_inv(col, site_dim()), out);
    for (std::size_t i = s; i < out.size(); ++i) out[i].row = rotate_index(out[i].row, site_dim());
  }
  bool is_diagonal() const override { return base_->is_diagonal(); }

 private:
  TermPtr base_;
};

class SwappedTerm final : public LocalTerm {
 public:
  explicit SwappedTerm(TermPtr base) : LocalTerm(2, base->site_dim(), base->tag() + "@swap"), base_(std::move(base)) {}
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    std::size_t s = out.size();
    base_->column(swap(col), out);
    for (std::size_t i = s; i < out.size(); ++i) out[i].row = swap(out[i].row);
  }
  bool is_diagonal() const override { return base_->is_diagonal(); }

 private:
  std::uint64_t swap(std::uint64_t i) const { return (i % site_dim()) * site_dim() + i / site_dim(); }
  TermPtr base_;
};

}  // namespace

TermPtr dense_term(int arity, std::size_t site_dim, const Eigen::MatrixXcd& m, const std::string& tag) {
  return std::make_shared<DenseTerm>(arity, site_dim, m, tag);
}

TermPtr diagonal_term(int arity, std::size_t site_dim, std::vector<double> diag, const std::string& tag) {
  return std::make_shared<DiagonalTerm>(arity, site_dim, std::move(diag), tag);
}

TermPtr zero_term(int arity, std::size_t site_dim, const std::string& tag) {
  return std::make_shared<ScaledIdentity>(arity, site_dim, 0.0, tag);
}

TermPtr identity_term(int arity, std::size_t site_dim, double c, const std::string& tag) {
  return std::make_shared<ScaledIdentity>(arity, site_dim, c, tag);
}

TermPtr sum_terms(const std::vector<std::pair<double, TermPtr>>& parts, const std::string& tag) {
  if (parts.empty()) fail_invalid("sum_terms: no parts");
  return std::make_shared<SumTerm>(parts, tag);
}

std::vector<Entry> canonical_column(const LocalTerm& t, std::uint64_t col) {
  std::vector<Entry> c;
  t.column(col, c);
  std::sort(c.begin(), c.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
  std::vector<Entry> m;
  for (const auto& e : c) {
    if (!m.empty() && m.back().row == e.row)
      m.back().val += e.val;
    else
      m.push_back(e);
  }
  return m;
}

Eigen::MatrixXcd to_dense(const LocalTerm& t) {
  if (t.dim() > 8192) fail_budget("to_dense: term dimension beyond 8192");
  auto n = static_cast<Eigen::Index>(t.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Entry> col;
  for (std::uint64_t c = 0; c < t.dim(); ++c) {
    col.clear();
    t.column(c, col);
    for (const auto& e : col) m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(c)) += e.val;
  }
  return m;
}

bool is_hermitian(const LocalTerm& t, double tol) {
  if (t.is_diagonal()) {
    std::vector<Entry> col;
    for (std::uint64_t c = 0; c < t.dim(); ++c) {
      col.clear();
      t.column(c, col);
      for (const auto& e : col)
        if (e.row != c || std::abs(e.val.imag()) > tol) return false;
    }
    return true;
  }
  if (t.dim() <= 8192) {
    Eigen::MatrixXcd m = to_dense(t);
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }
  // Column-wise: compare each entry with its transposed partner.
  for (std::uint64_t c = 0; c < t.dim(); ++c) {
    for (const auto& e : canonical_column(t, c)) {
      auto partner = canonical_column(t, e.row);
      cplx v = 0.0;
      for (const auto& p : partner)
        if (p.row == c) v = p.val;
      if (std::abs(e.val - std::conj(v)) > tol) return false;
    }
  }
  return true;
}

std::uint64_t rotate_index(std::uint64_t idx, std::size_t d) {
  // (s0 s1 s2 s3) -> (s3 s0 s1 s2)
  std::uint64_t s3 = idx % d;
  return s3 * d * d * d + idx / d;
}

std::uint64_t rotate_index_inv(std::uint64_t idx, std::size_t d) {
  // (s0 s1 s2 s3) -> (s1 s2 s3 s0)
  std::uint64_t d3 = static_cast<std::uint64_t>(d) * d * d;
  std::uint64_t s0 = idx / d3;
  return (idx % d3) * d + s0;
}

TermPtr rotate_plaquette_term(const TermPtr& t) {
  if (t->arity() != 4) fail_invalid("rotate_plaquette_term: arity must be 4");
  auto r = std::make_shared<RotatedTerm>(t);
  if (r->dim() <= 4096) return dense_term(4, t->site_dim(), to_dense(*r), r->tag());
  return r;
}

double rotation_defect(const LocalTerm& t) {
  if (t.arity() != 4) fail_invalid("check_rotational_invariance: arity must be 4");
  const std::size_t d = t.site_dim();
  unsigned workers = thread_count();
  std::vector<double> worst(workers, 0.0);
  auto by_row = [](const Entry& x, const Entry& y) { return x.row < y.row; };
  auto sort_small = [&](std::vector<Entry>& v) {
    if (v.size() > 16) {
      std::sort(v.begin(), v.end(), by_row);
      return;
    }
    for (std::size_t i = 1; i < v.size(); ++i)
      for (std::size_t j = i; j > 0 && v[j].row < v[j - 1].row; --j) std::swap(v[j], v[j - 1]);
  };
  auto merge = [&](std::vector<Entry>& v) {
    if (v.size() < 2) return;
    sort_small(v);
    std::size_t k = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (k && v[k - 1].row == v[i].row)
        v[k - 1].val += v[i].val;
      else
        v[k++] = v[i];
    }
    v.resize(k);
  };
  const std::uint64_t d1 = d, d2 = d1 * d1, d3 = d2 * d1;
  // Columns are visited once per rotation orbit, led by its smallest member. Digits (x,y,w,z) of a
  // leader satisfy x = min; blocks run over the leading pair (x, y).
  parallel_blocks(d2, [&](std::uint64_t b, std::uint64_t e, unsigned w) {
    std::array<std::vector<Entry>, 4> col;
    std::array<std::uint64_t, 4> orb{};
    std::vector<Entry> r;
    for (std::uint64_t xy = b; xy < e; ++xy) {
      const std::uint64_t x = xy / d1, y = xy % d1;
      if (y < x) continue;
      for (std::uint64_t wz = x * d1 + x; wz < d2; ++wz) {
        const std::uint64_t z = wz % d1;
        if (z < x || wz / d1 < x) continue;
        const std::uint64_t c = xy * d2 + wz;
        orb[0] = c;
        bool lead = true;
        for (std::size_t j = 1; j < 4 && lead; ++j) {
          orb[j] = (orb[j - 1] % d1) * d3 + orb[j - 1] / d1;
          lead = orb[j] >= c;
        }
        if (!lead) continue;
        for (std::size_t j = 0; j < 4; ++j) {
          col[j].clear();
          t.column(orb[j], col[j]);
          merge(col[j]);
        }
        bool diagonal = true;
        for (std::size_t j = 0; j < 4; ++j) diagonal = diagonal && col[j].size() <= 1 && (col[j].empty() || col[j][0].row == orb[j]);
        if (diagonal) {
          auto v = [&](std::size_t j) { return col[j].empty() ? cplx(0.0) : col[j][0].val; };
          for (std::size_t j = 0; j < 4; ++j) worst[w] = std::max(worst[w], std::abs(v(j) - v((j + 3) % 4)));
          continue;
        }
        for (std::size_t j = 0; j < 4; ++j) {
          // (U t U^dagger)|x_j> = U t|x_{j-1}>.
          r = col[(j + 3) % 4];
          for (auto& en : r) en.row = (en.row % d1) * d3 + en.row / d1;
          sort_small(r);
          const auto& a = col[j];
          double acc = 0.0;
          std::size_t i = 0, k = 0;
          while (i < a.size() || k < r.size()) {
            if (k == r.size() || (i < a.size() && a[i].row < r[k].row))
              acc += std::abs(a[i++].val);
            else if (i == a.size() || r[k].row < a[i].row)
              acc += std::abs(r[k++].val);
            else
              acc += std::abs(a[i++].val - r[k++].val);
          }
          worst[w] = std::max(worst[w], acc);
        }
      }
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

bool check_rotational_invariance(const LocalTerm& t, double tol) { return rotation_defect(t) <= tol; }

TermPtr reflect_pair_term(const TermPtr& t) {
  if (t->arity() != 2) fail_invalid("reflect_pair_term: arity must be 2");
  auto r = std::make_shared<SwappedTerm>(t);
  if (r->dim() <= 4096) return dense_term(2, t->site_dim(), to_dense(*r), r->tag());
  return r;
}

std::vector<Config> full_basis(const Lattice& lat, std::size_t site_dim, std::uint64_t budget) {
  std::uint64_t n = ipow(site_dim, static_cast<unsigned>(lat.num_sites));
  if (n > budget) fail_budget("full basis of dimension " + std::to_string(n) + " exceeds budget");
  std::vector<Config> basis;
  basis.reserve(n);
  Config c(static_cast<std::size_t>(lat.num_sites), 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    basis.push_back(c);
    for (int s = lat.num_sites - 1; s >= 0; --s) {
      if (++c[static_cast<std::size_t>(s)] < site_dim) break;
      c[static_cast<std::size_t>(s)] = 0;
    }
  }
  return basis;
}

SparseOperator assemble_hamiltonian(const Lattice& lat, const TermPtr& one_site, const TermPtr& plaquette,
                                    const std::vector<Config>* subspace) {
  if (!plaquette && !one_site) fail_invalid("assemble_hamiltonian: no terms");
  const std::size_t d = plaquette ? plaquette->site_dim() : one_site->site_dim();
  if (plaquette && plaquette->arity() != 4) fail_invalid("assemble_hamiltonian: plaquette term must have arity 4");
  if (one_site && (one_site->arity() != 1 || one_site->site_dim() != d))
    fail_invalid("assemble_hamiltonian: one-site term dimension mismatch");
  std::vector<Config> owned;
  if (!subspace) {
    owned = full_basis(lat, d);
    subspace = &owned;
  }
  if (subspace->empty()) fail_invalid("assemble_hamiltonian: empty subspace");
  for (const auto& c : *subspace) {
    if (c.size() != static_cast<std::size_t>(lat.num_sites)) fail_invalid("assemble_hamiltonian: configuration length mismatch");
    for (auto s : c)
      if (s >= d) fail_invalid("assemble_hamiltonian: local state out of range");
  }
  auto key = [](const Config& c) { return std::string(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(std::uint16_t)); };
  std::unordered_map<std::string, std::uint64_t> index;
  index.reserve(subspace->size() * 2);
  for (std::uint64_t i = 0; i < subspace->size(); ++i)
    if (!index.emplace(key((*subspace)[i]), i).second) fail_invalid("assemble_hamiltonian: duplicate subspace state");

  SparseOperator op(subspace->size());
  std::mutex mu;
  parallel_blocks(subspace->size(), [&](std::uint64_t b, std::uint64_t e, unsigned) {
    std::vector<Triplet> local;
    std::vector<Entry> col;
    for (std::uint64_t i = b; i < e; ++i) {
      const Config& s = (*subspace)[i];
      Config out = s;
      if (one_site) {
        for (int site = 0; site < lat.num_sites; ++site) {
          col.clear();
          one_site->column(s[static_cast<std::size_t>(site)], col);
          for (const auto& en : col) {
            out[static_cast<std::size_t>(site)] = static_cast<std::uint16_t>(en.row);
            auto it = index.find(key(out));
            if (it != index.end()) local.push_back({it->second, i, en.val});
          }
          out[static_cast<std::size_t>(site)] = s[static_cast<std::size_t>(site)];
        }
      }
      if (plaquette) {
        for (const auto& p : lat.plaquettes) {
          std::uint64_t li = 0;
          for (int k = 0; k < 4; ++k) li = li * d + s[static_cast<std::size_t>(p[k])];
          col.clear();
          plaquette->column(li, col);
          for (const auto& en : col) {
            std::uint64_t r = en.row;
            for (int k = 3; k >= 0; --k) {
              out[static_cast<std::size_t>(p[k])] = static_cast<std::uint16_t>(r % d);
              r /= d;
            }
            auto it = index.find(key(out));
            if (it != index.end()) local.push_back({it->second, i, en.val});
          }
          for (int k = 0; k < 4; ++k) out[static_cast<std::size_t>(p[k])] = s[static_cast<std::size_t>(p[k])];
        }
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    op.triplets.insert(op.triplets.end(), local.begin(), local.end());
  });
  op.canonicalize();
  return op;
}

}  // namespace gf
