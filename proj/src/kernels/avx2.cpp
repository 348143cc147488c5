#include "kernels_internal.hpp"

#if HCDG_HAVE_AVX2_KERNELS

#include <immintrin.h>

#define HCDG_AVX2 __attribute__((target("avx2,fma")))

namespace hcdg::kernels {

namespace {

HCDG_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

HCDG_AVX2 void spmv(std::int32_t rows, const std::int32_t* row_ptr, const std::int32_t* cols, const double* vals,
                    const double* x, double* y) {
  for (std::int32_t i = 0; i < rows; ++i) {
    std::int32_t k = row_ptr[i];
    const std::int32_t end = row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
    }
    double tail = 0.0;
    for (; k < end; ++k) tail += vals[k] * x[cols[k]];
    y[i] = hsum(acc) + tail;
  }
}

HCDG_AVX2 void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

HCDG_AVX2 double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

HCDG_AVX2 void scaled_add(std::size_t n, const double* x, double a, const double* y, double* z) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(z + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) z[i] = x[i] + a * y[i];
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{Isa::Avx2, spmv, axpy, dot, scaled_add};
  return table;
}

}  // namespace hcdg::kernels

#endif
