#include "bsel/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace bsel::kernels {

namespace {

inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double acc = hsum256(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum256(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double sse_avx2(const double* y, const double* mu, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(mu + i));
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) {
    const double r = y[i] - mu[i];
    s += r * r;
  }
  return s;
}

double weighted_sse_avx2(const double* y, const double* mu, const double* w,
                         std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(mu + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r), r, acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) {
    const double r = y[i] - mu[i];
    s += w[i] * r * r;
  }
  return s;
}

std::size_t count_ge_avx2(const double* a, std::size_t n, double tau) {
  const __m256d vt = _mm256_set1_pd(tau);
  std::size_t c = 0, i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d cmp = _mm256_cmp_pd(_mm256_loadu_pd(a + i), vt, _CMP_GE_OQ);
    c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(cmp)));
  }
  for (; i < n; ++i) c += (a[i] >= tau) ? 1 : 0;
  return c;
}

const Ops kAvx2 = {dot_avx2, sum_avx2, sse_avx2, weighted_sse_avx2,
                   count_ge_avx2, "avx2"};

}  // namespace

const Ops& avx2_ops() { return kAvx2; }

}  // namespace bsel::kernels

#else

namespace bsel::kernels {
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace bsel::kernels

#endif
