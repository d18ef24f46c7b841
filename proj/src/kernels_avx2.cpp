// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; the dispatcher only installs these on CPUs reporting both.

#if defined(__x86_64__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace memsx::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yi = _mm256_loadu_pd(y + i);
    yi = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yi);
    _mm256_storeu_pd(y + i, yi);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yi = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
    yi = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yi);
    _mm256_storeu_pd(y + i, yi);
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void hadamard(const double* x, const double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

double max_abs(const double* x, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i)));
  __m128d lo = _mm256_castpd256_pd128(m);
  __m128d hi = _mm256_extractf128_pd(m, 1);
  lo = _mm_max_pd(lo, hi);
  double r = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) r = std::max(r, std::fabs(x[i]));
  return r;
}

void spmv_csr(const int* rowptr, const int* colind, const double* vals, const double* x,
              double* y, std::size_t nrows) {
  for (std::size_t i = 0; i < nrows; ++i) {
    int k = rowptr[i];
    const int end = rowptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      __m256d xv = _mm256_set_pd(x[colind[k + 3]], x[colind[k + 2]], x[colind[k + 1]],
                                 x[colind[k]]);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += vals[k] * x[colind[k]];
    y[i] = s;
  }
}

}  // namespace memsx::kernels::avx2

#endif  // __x86_64__
