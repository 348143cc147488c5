#pragma once

#include "hcdg/kernels.hpp"

namespace hcdg::kernels {

#if defined(__x86_64__) || defined(__i386__)
#define HCDG_HAVE_AVX2_KERNELS 1
const KernelTable& avx2_table_unchecked();
#else
#define HCDG_HAVE_AVX2_KERNELS 0
#endif

}  // namespace hcdg::kernels
