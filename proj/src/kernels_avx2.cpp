// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never calls these unless the CPU reports both features.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace eleanor::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sumsq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, v);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(m + r * cols, x, cols);
}

// Rows are scanned sequentially so tie-breaking matches the scalar kernel
// exactly; only the per-row dot differs in summation order.
double max_abs_residual(const double* rows, const double* b, std::size_t nrows,
                        std::size_t dim, const double* theta,
                        std::size_t* argmax) {
  double best = -1.0;
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < nrows; ++j) {
    const double r = std::fabs(dot(rows + j * dim, theta, dim) - b[j]);
    if (r > best) {
      best = r;
      best_j = j;
    }
  }
  if (argmax) *argmax = best_j;
  return best < 0.0 ? 0.0 : best;
}

}  // namespace eleanor::kernels::avx2

#endif  // x86-64
