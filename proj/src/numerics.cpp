#include "eleanor/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eleanor/kernels.hpp"

namespace eleanor {

namespace {

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(expected) + ", got " +
                         std::to_string(got));
  }
}

}  // namespace

SpdMatrix SpdMatrix::from_flat(std::span<const double> entries,
                               std::size_t dim) {
  if (entries.size() != dim * dim) {
    throw DimensionError("spd_from: entries do not form a square matrix");
  }
  double scale = 0.0;
  for (const double v : entries) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      if (std::fabs(entries[i * dim + j] - entries[j * dim + i]) > tol) {
        throw NotSymmetricError("spd_from: matrix is not symmetric at (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ")");
      }
    }
  }
  SpdMatrix m;
  m.dim_ = dim;
  m.a_.assign(entries.begin(), entries.end());
  // Symmetrize before factoring.
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double s = 0.5 * (m.a_[i * dim + j] + m.a_[j * dim + i]);
      m.a_[i * dim + j] = s;
      m.a_[j * dim + i] = s;
    }
  }
  m.factor();
  return m;
}

SpdMatrix SpdMatrix::from_rows(const std::vector<Vec>& rows) {
  const std::size_t d = rows.size();
  std::vector<double> flat;
  flat.reserve(d * d);
  for (const auto& row : rows) {
    check_dim(d, row.size(), "spd_from row");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_flat(flat, d);
}

SpdMatrix SpdMatrix::identity(std::size_t dim) {
  return scaled_identity(dim, 1.0);
}

SpdMatrix SpdMatrix::scaled_identity(std::size_t dim, double lambda) {
  SpdMatrix m;
  m.dim_ = dim;
  m.a_.assign(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) m.a_[i * dim + i] = lambda;
  m.factor();
  return m;
}

void SpdMatrix::factor() {
  const std::size_t d = dim_;
  l_.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = kernels::dot(&l_[i * d], &l_[j * d], j);
      if (i == j) {
        const double diag = a_[i * d + i] - s;
        if (!(diag > 0.0)) {
          throw NotPositiveDefiniteError(
              "cholesky: nonpositive pivot at index " + std::to_string(i));
        }
        l_[i * d + i] = std::sqrt(diag);
      } else {
        l_[i * d + j] = (a_[i * d + j] - s) / l_[j * d + j];
      }
    }
  }
}

SpdMatrix SpdMatrix::rank1_updated(std::span<const double> v) const {
  check_dim(dim_, v.size(), "rank1_update");
  SpdMatrix out;
  out.dim_ = dim_;
  out.a_ = a_;
  for (std::size_t i = 0; i < dim_; ++i) {
    kernels::axpy(v[i], v.data(), &out.a_[i * dim_], dim_);
  }
  out.factor();
  return out;
}

Vec SpdMatrix::solve_lower(std::span<const double> v) const {
  check_dim(dim_, v.size(), "solve_lower");
  Vec x(v.begin(), v.end());
  for (std::size_t i = 0; i < dim_; ++i) {
    x[i] = (x[i] - kernels::dot(&l_[i * dim_], x.data(), i)) / l_[i * dim_ + i];
  }
  return x;
}

Vec SpdMatrix::solve_upper(std::span<const double> v) const {
  check_dim(dim_, v.size(), "solve_upper");
  Vec x(v.begin(), v.end());
  for (std::size_t ii = dim_; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < dim_; ++j) s -= l_[j * dim_ + ii] * x[j];
    x[ii] = s / l_[ii * dim_ + ii];
  }
  return x;
}

Vec SpdMatrix::solve(std::span<const double> b) const {
  check_dim(dim_, b.size(), "solve");
  Vec x = solve_upper(solve_lower(b));
  // One step of iterative refinement keeps the residual well inside the
  // 1e-9*(1+||b||_inf) contract even for poorly scaled Gram matrices.
  Vec residual(dim_);
  kernels::matvec(a_.data(), dim_, dim_, x.data(), residual.data());
  for (std::size_t i = 0; i < dim_; ++i) residual[i] = b[i] - residual[i];
  const Vec corr = solve_upper(solve_lower(residual));
  for (std::size_t i = 0; i < dim_; ++i) x[i] += corr[i];
  return x;
}

double SpdMatrix::maha_norm(std::span<const double> v) const {
  check_dim(dim_, v.size(), "maha_norm");
  Vec av(dim_);
  kernels::matvec(a_.data(), dim_, dim_, v.data(), av.data());
  const double q = kernels::dot(v.data(), av.data(), dim_);
  return std::sqrt(std::max(q, 0.0));
}

double SpdMatrix::inv_maha_norm(std::span<const double> v) const {
  check_dim(dim_, v.size(), "inv_maha_norm");
  const Vec w = solve_lower(v);
  return std::sqrt(kernels::sumsq(w.data(), dim_));
}

SpdMatrix spd_from(const std::vector<Vec>& rows) {
  return SpdMatrix::from_rows(rows);
}
SpdMatrix rank1_update(const SpdMatrix& m, std::span<const double> v) {
  return m.rank1_updated(v);
}
Vec solve(const SpdMatrix& m, std::span<const double> b) { return m.solve(b); }
double maha_norm(const SpdMatrix& m, std::span<const double> v) {
  return m.maha_norm(v);
}
double inv_maha_norm(const SpdMatrix& m, std::span<const double> v) {
  return m.inv_maha_norm(v);
}

}  // namespace eleanor
