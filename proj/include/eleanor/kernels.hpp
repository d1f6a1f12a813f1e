#pragma once
// Dense inner-loop kernels with runtime-dispatched SIMD variants.
//
// Every kernel has a scalar reference implementation and, where the build
// target supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active
// backend is chosen once at startup (best available) and can be pinned with
// set_backend() or the ELEANOR_KERNELS environment variable ("scalar",
// "avx2", "neon"). Variants are equivalence-tested against the scalar
// reference; they may differ from it only by floating-point summation order.

#include <cstddef>
#include <string>
#include <vector>

namespace eleanor::kernels {

enum class Backend { Scalar, Avx2, Neon };

const char* name(Backend b);
std::vector<Backend> available_backends();
Backend active_backend();
// Returns false (and leaves the dispatch table unchanged) if `b` is not
// available on this machine.
bool set_backend(Backend b);

// x . y
double dot(const double* x, const double* y, std::size_t n);
// sum x_i^2
double sumsq(const double* x, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// out = M x, M row-major (rows x cols)
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out);
// max_j |rows_j . theta - b_j| over nrows rows of length dim; lowest index
// wins ties. Returns the max and stores the argmax in *argmax.
double max_abs_residual(const double* rows, const double* b, std::size_t nrows,
                        std::size_t dim, const double* theta,
                        std::size_t* argmax);

// Scalar reference implementations, always available (used by the
// equivalence tests and as the dispatch fallback).
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* out);
double max_abs_residual(const double* rows, const double* b, std::size_t nrows,
                        std::size_t dim, const double* theta,
                        std::size_t* argmax);
}  // namespace scalar

}  // namespace eleanor::kernels
