#include "eleanor/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace eleanor::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sumsq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
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

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define ELEANOR_X86 1
#else
#define ELEANOR_X86 0
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
#define ELEANOR_ARM64 1
#else
#define ELEANOR_ARM64 0
#endif

#if ELEANOR_X86
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out);
double max_abs_residual(const double* rows, const double* b, std::size_t nrows,
                        std::size_t dim, const double* theta,
                        std::size_t* argmax);
}  // namespace avx2
#endif

#if ELEANOR_ARM64
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out);
double max_abs_residual(const double* rows, const double* b, std::size_t nrows,
                        std::size_t dim, const double* theta,
                        std::size_t* argmax);
}  // namespace neon
#endif

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*matvec)(const double*, std::size_t, std::size_t, const double*,
                 double*);
  double (*max_abs_residual)(const double*, const double*, std::size_t,
                             std::size_t, const double*, std::size_t*);
};

constexpr Table kScalarTable = {scalar::dot, scalar::sumsq, scalar::axpy,
                                scalar::matvec, scalar::max_abs_residual};

#if ELEANOR_X86
constexpr Table kAvx2Table = {avx2::dot, avx2::sumsq, avx2::axpy, avx2::matvec,
                              avx2::max_abs_residual};
#endif
#if ELEANOR_ARM64
constexpr Table kNeonTable = {neon::dot, neon::sumsq, neon::axpy, neon::matvec,
                              neon::max_abs_residual};
#endif

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if ELEANOR_X86
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
      return ELEANOR_ARM64 != 0;
  }
  return false;
}

const Table* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalarTable;
#if ELEANOR_X86
    case Backend::Avx2:
      return &kAvx2Table;
#endif
#if ELEANOR_ARM64
    case Backend::Neon:
      return &kNeonTable;
#endif
    default:
      return &kScalarTable;
  }
}

struct Dispatch {
  Backend backend = Backend::Scalar;
  const Table* table = &kScalarTable;

  Dispatch() {
    Backend pick = Backend::Scalar;
    if (backend_supported(Backend::Avx2)) pick = Backend::Avx2;
    if (backend_supported(Backend::Neon)) pick = Backend::Neon;
    if (const char* env = std::getenv("ELEANOR_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) pick = Backend::Scalar;
      if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::Avx2))
        pick = Backend::Avx2;
      if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::Neon))
        pick = Backend::Neon;
    }
    backend = pick;
    table = table_for(pick);
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

const char* name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "?";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (backend_supported(Backend::Avx2)) out.push_back(Backend::Avx2);
  if (backend_supported(Backend::Neon)) out.push_back(Backend::Neon);
  return out;
}

Backend active_backend() { return dispatch().backend; }

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  dispatch().backend = b;
  dispatch().table = table_for(b);
  return true;
}

double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().table->dot(x, y, n);
}
double sumsq(const double* x, std::size_t n) {
  return dispatch().table->sumsq(x, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(a, x, y, n);
}
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out) {
  dispatch().table->matvec(m, rows, cols, x, out);
}
double max_abs_residual(const double* rows, const double* b, std::size_t nrows,
                        std::size_t dim, const double* theta,
                        std::size_t* argmax) {
  return dispatch().table->max_abs_residual(rows, b, nrows, dim, theta, argmax);
}

}  // namespace eleanor::kernels
