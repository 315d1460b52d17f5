// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "core/linalg.hpp"
#include "core/report.hpp"

namespace gf {

// Sites sit on edge midpoints of an L x H grid of unit cells.
// Band y (0..H) holds the L horizontal edges at height y, followed (for y < H)
// by the L+1 vertical edges of cell row y.
struct Lattice {
  int L = 0;
  int H = 0;
  int num_sites = 0;
  std::vector<std::array<int, 4>> plaquettes;  // (top, right, bottom, left), cell row-major

  int horizontal(int x, int y) const { return y * (2 * L + 1) + x; }
  int vertical(int x, int y) const { return y * (2 * L + 1) + L + x; }
  const std::array<int, 4>& plaquette(int x, int y) const { return plaquettes[static_cast<std::size_t>(y * L + x)]; }
  json to_json() const;
};

Lattice build_lattice(int L, int H);

// Site permutation of a square lattice under a clockwise quarter turn.
std::vector<int> lattice_rotation(const Lattice& lat);

struct Entry {
  std::uint64_t row;
  cplx val;
};

// Hermitian operator on `arity` sites of dimension `site_dim`, accessed by columns.
class LocalTerm {
 public:
  LocalTerm(int arity, std::size_t site_dim, std::string tag);
  virtual ~LocalTerm() = default;

  int arity() const { return arity_; }
  std::size_t site_dim() const { return site_dim_; }
  std::uint64_t dim() const { return dim_; }
  const std::string& tag() const { return tag_; }

  // Appends the nonzero entries of column `col`; rows may repeat.
  virtual void column(std::uint64_t col, std::vector<Entry>& out) const = 0;
  virtual bool is_diagonal() const { return false; }

 private:
  int arity_;
  std::size_t site_dim_;
  std::uint64_t dim_;
  std::string tag_;
};

using TermPtr = std::shared_ptr<const LocalTerm>;

TermPtr dense_term(int arity, std::size_t site_dim, const Eigen::MatrixXcd& m, const std::string& tag);
TermPtr diagonal_term(int arity, std::size_t site_dim, std::vector<double> diag, const std::string& tag);
TermPtr zero_term(int arity, std::size_t site_dim, const std::string& tag = "zero");
TermPtr identity_term(int arity, std::size_t site_dim, double c = 1.0, const std::string& tag = "identity");
// Lazy linear combination of terms with equal shape.
TermPtr sum_terms(const std::vector<std::pair<double, TermPtr>>& parts, const std::string& tag);

Eigen::MatrixXcd to_dense(const LocalTerm& t);
// Sorted, merged column.
std::vector<Entry> canonical_column(const LocalTerm& t, std::uint64_t col);
bool is_hermitian(const LocalTerm& t, double tol = 1e-12);

// U t U^dagger with U|x y w z> = |z x y w>.
TermPtr rotate_plaquette_term(const TermPtr& t);
// Largest absolute row sum of t - rotate(t), computed column by column.
double rotation_defect(const LocalTerm& t);
bool check_rotational_invariance(const LocalTerm& t, double tol = 1e-12);

// Conjugation by the swap of two sites.
TermPtr reflect_pair_term(const TermPtr& t);

// Index helpers for product basis states on `arity` sites, first site most significant.
std::uint64_t rotate_index(std::uint64_t idx, std::size_t d);      // |xywz> -> |zxyw>
std::uint64_t rotate_index_inv(std::uint64_t idx, std::size_t d);  // inverse

using Config = std::vector<std::uint16_t>;  // one local state per site

// Sum of one-site terms on every site and the plaquette term on every plaquette.
// With a subspace, returns P H P expressed in the subspace basis (in list order).
SparseOperator assemble_hamiltonian(const Lattice& lat, const TermPtr& one_site, const TermPtr& plaquette,
                                    const std::vector<Config>* subspace = nullptr);

// All product configurations of the lattice (budget-checked).
std::vector<Config> full_basis(const Lattice& lat, std::size_t site_dim, std::uint64_t budget = 1u << 22);

}  // namespace gf
