#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hcdg/mesh.hpp"

namespace hcdg {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix with an optional element-block index.
class SparseOperator {
 public:
  enum class Symmetry { None, Symmetric };

  static constexpr double kDropTolerance = 1e-14;

  SparseOperator() = default;
  SparseOperator(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Sums duplicates, sorts columns and drops entries below
  /// drop_tol * (max |entry| of the row).
  static SparseOperator from_triplets(Index rows, Index cols, std::vector<Triplet> triplets,
                                      double drop_tol = kDropTolerance);
  static SparseOperator from_dense(const Eigen::MatrixXd& a, double drop_tol = kDropTolerance);
  static SparseOperator identity(Index n);
  static SparseOperator diagonal(const Eigen::VectorXd& d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(col_idx_.size()); }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Element e covers rows/cols [block_offsets[e], block_offsets[e+1]).
  const std::vector<Index>& block_offsets() const { return block_offsets_; }
  void set_block_offsets(std::vector<Index> offsets);
  Index num_blocks() const { return block_offsets_.empty() ? 0 : static_cast<Index>(block_offsets_.size()) - 1; }
  Index block_of(Index row) const;

  Symmetry symmetry() const { return symmetry_; }
  void set_symmetry(Symmetry s) { symmetry_ = s; }

  double coeff(Index i, Index j) const;
  bool has_entry(Index i, Index j) const;

  void multiply(const double* x, double* y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  SparseOperator transpose() const;
  SparseOperator scaled(double a) const;
  /// Scales row i by d(i).
  SparseOperator row_scaled(const Eigen::VectorXd& d) const;
  /// Copy without the element-diagonal blocks.
  SparseOperator off_diagonal_blocks() const;
  SparseOperator submatrix(const std::vector<Index>& rows, const std::vector<Index>& cols) const;
  /// Dense copy of the block rows(rows) x cols(cols).
  Eigen::MatrixXd dense_block(Index r0, Index nr, Index c0, Index nc) const;
  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double, Eigen::RowMajor> to_eigen() const;

  /// max |a_ij|
  double max_abs() const;
  /// FNV-1a over dimensions, row offsets and column ids.
  std::uint64_t pattern_hash() const;
  bool same_pattern(const SparseOperator& other) const;
  /// Every stored entry of this matrix is stored in `other`.
  bool pattern_subset_of(const SparseOperator& other) const;

  std::string to_matrix_market() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
  std::vector<Index> block_offsets_;
  Symmetry symmetry_ = Symmetry::None;
};

/// alpha A + beta B
SparseOperator add(const SparseOperator& a, const SparseOperator& b, double alpha = 1.0, double beta = 1.0);
/// A B by row-wise accumulation.
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

std::string hex64(std::uint64_t v);

}  // namespace hcdg
