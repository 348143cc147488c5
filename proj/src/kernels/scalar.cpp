#include "kernels_internal.hpp"

namespace hcdg::kernels {

namespace {

void spmv(std::int32_t rows, const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
          const double* x, double* y) {
  for (std::int32_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[i] = acc;
  }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void scaled_add(std::size_t n, const double* x, double a, const double* y, double* z) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + a * y[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar, spmv, axpy, dot, scaled_add};
  return table;
}

}  // namespace hcdg::kernels
