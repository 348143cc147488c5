#include "hcdg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hcdg/error.hpp"
#include "hcdg/kernels.hpp"

namespace hcdg {

SparseOperator SparseOperator::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets, double drop_tol) {
  for (const Triplet& t : triplets)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw Error(ErrorCode::InvalidArgument, "triplet outside the matrix");
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseOperator out(rows, cols);
  std::vector<std::pair<Index, double>> row;
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    row.clear();
    while (k < triplets.size() && triplets[k].row == i) {
      if (!row.empty() && row.back().first == triplets[k].col)
        row.back().second += triplets[k].value;
      else
        row.emplace_back(triplets[k].col, triplets[k].value);
      ++k;
    }
    double rowmax = 0.0;
    for (const auto& [c, v] : row) rowmax = std::max(rowmax, std::abs(v));
    for (const auto& [c, v] : row)
      if (v != 0.0 && std::abs(v) >= drop_tol * rowmax) {
        out.col_idx_.push_back(c);
        out.values_.push_back(v);
      }
    out.row_ptr_[i + 1] = static_cast<Index>(out.col_idx_.size());
  }
  return out;
}

SparseOperator SparseOperator::from_dense(const Eigen::MatrixXd& a, double drop_tol) {
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) t.push_back({i, j, a(i, j)});
  return from_triplets(static_cast<Index>(a.rows()), static_cast<Index>(a.cols()), std::move(t), drop_tol);
}

SparseOperator SparseOperator::identity(Index n) { return diagonal(Eigen::VectorXd::Ones(n)); }

SparseOperator SparseOperator::diagonal(const Eigen::VectorXd& d) {
  std::vector<Triplet> t;
  for (Index i = 0; i < d.size(); ++i) t.push_back({i, i, d(i)});
  SparseOperator out = from_triplets(static_cast<Index>(d.size()), static_cast<Index>(d.size()), std::move(t), 0.0);
  out.symmetry_ = Symmetry::Symmetric;
  return out;
}

void SparseOperator::set_block_offsets(std::vector<Index> offsets) {
  if (!offsets.empty() && (offsets.front() != 0 || offsets.back() != rows_))
    throw Error(ErrorCode::InvalidArgument, "block offsets must cover all rows");
  block_offsets_ = std::move(offsets);
}

Index SparseOperator::block_of(Index row) const {
  const auto it = std::upper_bound(block_offsets_.begin(), block_offsets_.end(), row);
  return static_cast<Index>(it - block_offsets_.begin()) - 1;
}

double SparseOperator::coeff(Index i, Index j) const {
  const auto b = col_idx_.begin() + row_ptr_[i], e = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return it != e && *it == j ? values_[it - col_idx_.begin()] : 0.0;
}

bool SparseOperator::has_entry(Index i, Index j) const {
  const auto b = col_idx_.begin() + row_ptr_[i], e = col_idx_.begin() + row_ptr_[i + 1];
  return std::binary_search(b, e, j);
}

void SparseOperator::multiply(const double* x, double* y) const {
  kernels::active().spmv(rows_, row_ptr_.data(), col_idx_.data(), values_.data(), x, y);
}

Eigen::VectorXd SparseOperator::operator*(const Eigen::VectorXd& x) const {
  if (x.size() != cols_) throw Error(ErrorCode::InvalidArgument, "dimension mismatch in SpMV");
  Eigen::VectorXd y(rows_);
  multiply(x.data(), y.data());
  return y;
}

SparseOperator SparseOperator::transpose() const {
  SparseOperator t(cols_, rows_);
  std::vector<Index> count(cols_ + 1, 0);
  for (Index c : col_idx_) ++count[c + 1];
  for (Index j = 0; j < cols_; ++j) count[j + 1] += count[j];
  t.row_ptr_ = count;
  t.col_idx_.resize(col_idx_.size());
  t.values_.resize(values_.size());
  std::vector<Index> next(count.begin(), count.end() - 1);
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Index dst = next[col_idx_[k]]++;
      t.col_idx_[dst] = i;
      t.values_[dst] = values_[k];
    }
  if (rows_ == cols_) t.block_offsets_ = block_offsets_;
  t.symmetry_ = symmetry_;
  return t;
}

SparseOperator SparseOperator::scaled(double a) const {
  SparseOperator out = *this;
  for (double& v : out.values_) v *= a;
  return out;
}

SparseOperator SparseOperator::row_scaled(const Eigen::VectorXd& d) const {
  SparseOperator out = *this;
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out.values_[k] *= d(i);
  out.symmetry_ = Symmetry::None;
  return out;
}

SparseOperator SparseOperator::off_diagonal_blocks() const {
  if (block_offsets_.empty()) throw Error(ErrorCode::InvalidArgument, "operator has no block index");
  SparseOperator out(rows_, cols_);
  for (Index i = 0; i < rows_; ++i) {
    const Index bi = block_of(i);
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (block_of(col_idx_[k]) == bi) continue;
      out.col_idx_.push_back(col_idx_[k]);
      out.values_.push_back(values_[k]);
    }
    out.row_ptr_[i + 1] = static_cast<Index>(out.col_idx_.size());
  }
  out.block_offsets_ = block_offsets_;
  return out;
}

SparseOperator SparseOperator::submatrix(const std::vector<Index>& rows, const std::vector<Index>& cols) const {
  std::vector<Index> col_map(cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<Index>(j);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index k = row_ptr_[rows[i]]; k < row_ptr_[rows[i] + 1]; ++k)
      if (col_map[col_idx_[k]] >= 0) t.push_back({static_cast<Index>(i), col_map[col_idx_[k]], values_[k]});
  return from_triplets(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()), std::move(t), 0.0);
}

Eigen::MatrixXd SparseOperator::dense_block(Index r0, Index nr, Index c0, Index nc) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nr, nc);
  for (Index i = 0; i < nr; ++i)
    for (Index k = row_ptr_[r0 + i]; k < row_ptr_[r0 + i + 1]; ++k) {
      const Index c = col_idx_[k] - c0;
      if (c >= 0 && c < nc) out(i, c) = values_[k];
    }
  return out;
}

Eigen::MatrixXd SparseOperator::to_dense() const { return dense_block(0, rows_, 0, cols_); }

Eigen::SparseMatrix<double, Eigen::RowMajor> SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(values_.size());
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.emplace_back(i, col_idx_[k], values_[k]);
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows_, cols_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::uint64_t SparseOperator::pattern_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](Index v) {
    auto u = static_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  mix(rows_);
  mix(cols_);
  for (Index v : row_ptr_) mix(v);
  for (Index v : col_idx_) mix(v);
  return h;
}

bool SparseOperator::same_pattern(const SparseOperator& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

bool SparseOperator::pattern_subset_of(const SparseOperator& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (!other.has_entry(i, col_idx_[k])) return false;
  return true;
}

std::string SparseOperator::to_matrix_market() const {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
  char buf[64];
  for (Index i = 0; i < rows_; ++i)
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", values_[k]);
      out << i + 1 << ' ' << col_idx_[k] + 1 << ' ' << buf << '\n';
    }
  return out.str();
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::InvalidArgument, "add: shape mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (const auto* m : {&a, &b}) {
    const double s = m == &a ? alpha : beta;
    for (Index i = 0; i < m->rows(); ++i)
      for (Index k = m->row_ptr()[i]; k < m->row_ptr()[i + 1]; ++k)
        t.push_back({i, m->col_idx()[k], s * m->values()[k]});
  }
  SparseOperator out = SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
  out.set_block_offsets(a.block_offsets());
  return out;
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::InvalidArgument, "multiply: shape mismatch");
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<char> used(b.cols(), 0);
  std::vector<Index> touched;
  std::vector<Triplet> t;
  for (Index i = 0; i < a.rows(); ++i) {
    touched.clear();
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const Index r = a.col_idx()[k];
      const double av = a.values()[k];
      for (Index m = b.row_ptr()[r]; m < b.row_ptr()[r + 1]; ++m) {
        const Index c = b.col_idx()[m];
        if (!used[c]) {
          used[c] = 1;
          touched.push_back(c);
        }
        acc[c] += av * b.values()[m];
      }
    }
    for (Index c : touched) {
      t.push_back({i, c, acc[c]});
      acc[c] = 0.0;
      used[c] = 0;
    }
  }
  return SparseOperator::from_triplets(a.rows(), b.cols(), std::move(t));
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hcdg
