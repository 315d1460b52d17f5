// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace gf {

struct Triplet {
  std::uint64_t row;
  std::uint64_t col;
  cplx val;
};

// Hermitian operator stored as a triplet list.
struct SparseOperator {
  std::uint64_t dim = 0;
  std::vector<Triplet> triplets;

  SparseOperator() = default;
  explicit SparseOperator(std::uint64_t d) : dim(d) {}

  void add(std::uint64_t r, std::uint64_t c, cplx v) { triplets.push_back({r, c, v}); }
  // Sort by (row, col), merge duplicates, drop entries with |v| <= drop.
  void canonicalize(double drop = 0.0);
  bool is_hermitian(double tol = 1e-12) const;
  cplx entry(std::uint64_t r, std::uint64_t c) const;  // requires canonical form
  Eigen::MatrixXcd to_dense() const;
  std::string to_csv() const;
  void shift(double c);  // += c * identity
};

SparseOperator operator_from_dense(const Eigen::MatrixXcd& m, double drop = 0.0);

struct Spectrum {
  std::vector<double> values;             // ascending
  std::vector<Eigen::VectorXcd> vectors;  // filled when requested, full dimension
  double max_residual = 0.0;
};

constexpr std::size_t kDenseLimit = 2048;

// k smallest eigenvalues. The operator is split into connected components of
// its sparsity graph; components up to kDenseLimit are solved densely, larger
// ones by Lanczos with full reorthogonalization and locking.
Spectrum low_spectrum(const SparseOperator& op, int k, double tol = 1e-9, bool want_vectors = false);

// Smallest eigenpairs of a dense Hermitian matrix.
Spectrum dense_spectrum(const Eigen::MatrixXcd& m, int k, bool want_vectors);

double spectral_gap(const std::vector<double>& spec);

// Number of values within tol of the first one.
int ground_multiplicity(const std::vector<double>& spec, double tol = 1e-9);

}  // namespace gf
