#pragma once
// Dense small-matrix linear algebra: SPD matrices with a maintained Cholesky
// factor, rank-1 updates, solves, and the two Mahalanobis norms. Everything
// is value-semantic and deterministic; matrices re-factor on update rather
// than patching the factor incrementally.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace eleanor {

using Vec = std::vector<double>;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotSymmetricError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SpdMatrix {
 public:
  // Symmetry is required to 1e-12 relative; the input is symmetrized before
  // factorization. Throws NotSymmetricError / NotPositiveDefiniteError.
  static SpdMatrix from_rows(const std::vector<Vec>& rows);
  static SpdMatrix from_flat(std::span<const double> entries, std::size_t dim);
  static SpdMatrix identity(std::size_t dim);
  // lambda * I
  static SpdMatrix scaled_identity(std::size_t dim, double lambda);

  std::size_t dim() const { return dim_; }
  // Row-major d*d entries.
  const std::vector<double>& entries() const { return a_; }
  // Lower-triangular Cholesky factor L with A = L L^T, row-major d*d.
  const std::vector<double>& chol() const { return l_; }
  double at(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

  // this + v v^T, refactored.
  SpdMatrix rank1_updated(std::span<const double> v) const;

  // Solves A x = b via the factor plus one step of iterative refinement.
  Vec solve(std::span<const double> b) const;
  // sqrt(v^T A v)
  double maha_norm(std::span<const double> v) const;
  // sqrt(v^T A^{-1} v), via a forward substitution (no explicit inverse).
  double inv_maha_norm(std::span<const double> v) const;

  // Solves L^T x = v (the factor's transpose). Maps the unit ball onto the
  // ellipsoid {x : ||x||_A <= 1}.
  Vec solve_upper(std::span<const double> v) const;
  // Solves L x = v.
  Vec solve_lower(std::span<const double> v) const;

 private:
  SpdMatrix() = default;
  void factor();

  std::size_t dim_ = 0;
  std::vector<double> a_;
  std::vector<double> l_;
};

// Free-function spellings used throughout the project.
SpdMatrix spd_from(const std::vector<Vec>& rows);
SpdMatrix rank1_update(const SpdMatrix& m, std::span<const double> v);
Vec solve(const SpdMatrix& m, std::span<const double> b);
double maha_norm(const SpdMatrix& m, std::span<const double> v);
double inv_maha_norm(const SpdMatrix& m, std::span<const double> v);

}  // namespace eleanor
