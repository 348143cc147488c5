#include <doctest.h>

#include <cmath>
#include <random>

#include "hcdg/kernels.hpp"
#include "hcdg/sparse.hpp"

using namespace hcdg;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

SparseOperator random_csr(Index rows, Index cols, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), pick(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (pick(rng) < density) t.push_back({i, j, u(rng)});
  return SparseOperator::from_triplets(rows, cols, t);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("avx2 variant matches the scalar reference") {
  const kernels::KernelTable& ref = kernels::scalar_table();
  const kernels::KernelTable* simd = kernels::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 unavailable; only the scalar table is exercised");
    return;
  }
  std::mt19937_64 rng(17);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 1000u}) {
    const auto x = random_vec(n, rng), y = random_vec(n, rng);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
    CHECK(std::abs(ref.dot(n, x.data(), y.data()) - simd->dot(n, x.data(), y.data())) <= 1e-15 * (scale + 1));

    auto y1 = y, y2 = y;
    ref.axpy(n, 0.37, x.data(), y1.data());
    simd->axpy(n, 0.37, x.data(), y2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 2e-16 * (std::abs(y1[i]) + 1));

    std::vector<double> z1(n), z2(n);
    ref.scaled_add(n, x.data(), -1.5, y.data(), z1.data());
    simd->scaled_add(n, x.data(), -1.5, y.data(), z2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(z1[i] - z2[i]) <= 4e-16 * (std::abs(z1[i]) + 1));
    // In place.
    auto w1 = x, w2 = x;
    ref.scaled_add(n, w1.data(), 2.0, y.data(), w1.data());
    simd->scaled_add(n, w2.data(), 2.0, y.data(), w2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(w1[i] - w2[i]) <= 4e-16 * (std::abs(w1[i]) + 1));
  }
  for (Index rows : {1, 5, 33, 200}) {
    for (double density : {0.05, 0.3, 1.0}) {
      const SparseOperator a = random_csr(rows, rows + 3, density, rng);
      const auto x = random_vec(a.cols(), rng);
      std::vector<double> y1(rows), y2(rows);
      ref.spmv(rows, a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(), y1.data());
      simd->spmv(rows, a.row_ptr().data(), a.col_idx().data(), a.values().data(), x.data(), y2.data());
      for (Index i = 0; i < rows; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (a.cols() + 1));
    }
  }
}

TEST_CASE("runtime selection") {
  const kernels::Isa before = kernels::active().isa;
  CHECK(kernels::select(kernels::Isa::Scalar));
  CHECK(kernels::active().isa == kernels::Isa::Scalar);
  if (kernels::avx2_table() != nullptr) {
    CHECK(kernels::select(kernels::Isa::Avx2));
    CHECK(kernels::active().isa == kernels::Isa::Avx2);
  } else {
    CHECK_FALSE(kernels::select(kernels::Isa::Avx2));
  }
  kernels::select(before);
}

}

TEST_SUITE("sparse") {

TEST_CASE("triplet assembly merges and drops") {
  const SparseOperator a = SparseOperator::from_triplets(
      3, 3, {{2, 1, 1.0}, {0, 0, 2.0}, {0, 0, 3.0}, {1, 2, 1e-20}, {1, 1, 4.0}, {2, 0, 1.0}, {2, 0, -1.0}});
  CHECK(a.nnz() == 3);
  CHECK(a.coeff(0, 0) == 5.0);
  CHECK(a.coeff(1, 2) == 0.0);
  CHECK_FALSE(a.has_entry(2, 0));
  for (Index i = 0; i < 3; ++i)
    for (Index k = a.row_ptr()[i] + 1; k < a.row_ptr()[i + 1]; ++k) CHECK(a.col_idx()[k] > a.col_idx()[k - 1]);
}

TEST_CASE("products, transpose and patterns") {
  std::mt19937_64 rng(3);
  const SparseOperator a = random_csr(12, 9, 0.3, rng);
  const SparseOperator b = random_csr(9, 7, 0.3, rng);
  const Eigen::MatrixXd ab = a.to_dense() * b.to_dense();
  CHECK((multiply(a, b).to_dense() - ab).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.transpose().to_dense() - a.to_dense().transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.transpose().transpose().same_pattern(a));
  const SparseOperator c = random_csr(12, 9, 0.3, rng);
  CHECK((add(a, c, 2.0, -1.0).to_dense() - (2.0 * a.to_dense() - c.to_dense())).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(a.pattern_subset_of(add(a, c)));
  CHECK(a.pattern_hash() == SparseOperator::from_dense(a.to_dense()).pattern_hash());
  CHECK(a.pattern_hash() != a.transpose().pattern_hash());

  Eigen::VectorXd x = Eigen::VectorXd::Random(9);
  CHECK((a * x - a.to_dense() * x).cwiseAbs().maxCoeff() < 1e-14);

  const SparseOperator sub = a.submatrix({1, 4, 7}, {0, 2, 8});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(sub.coeff(i, j) == a.coeff(std::vector{1, 4, 7}[i], std::vector{0, 2, 8}[j]));
}

TEST_CASE("matrix market export") {
  const SparseOperator a = SparseOperator::from_triplets(2, 3, {{0, 2, 1.5}, {1, 0, -2.0}});
  CHECK(a.to_matrix_market() == "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 3 1.5\n2 1 -2\n");
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("block index") {
  SparseOperator a = SparseOperator::identity(6);
  a.set_block_offsets({0, 2, 4, 6});
  CHECK(a.num_blocks() == 3);
  CHECK(a.block_of(3) == 1);
  CHECK_THROWS(a.set_block_offsets({0, 2}));
}

}
