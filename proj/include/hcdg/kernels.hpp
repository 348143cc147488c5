#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace hcdg::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  /// y = A x for a CSR matrix.
  void (*spmv)(std::int32_t rows, const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
               const double* x, double* y);
  /// y += a x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  double (*dot)(std::size_t n, const double* x, const double* y);
  /// z = x + a y (z may alias x or y)
  void (*scaled_add)(std::size_t n, const double* x, double a, const double* y, double* z);
};

const KernelTable& scalar_table();
/// Null when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table picked at first use: HCDG_SIMD=scalar|avx2 overrides detection.
const KernelTable& active();
/// Overrides the active table; returns false if the ISA is unavailable.
bool select(Isa isa);

}  // namespace hcdg::kernels
