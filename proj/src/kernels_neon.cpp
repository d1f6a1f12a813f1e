// NEON kernel variants for aarch64 builds.

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

namespace eleanor::kernels::neon {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sumsq(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(m + r * cols, x, cols);
}

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

}  // namespace eleanor::kernels::neon

#endif  // aarch64
