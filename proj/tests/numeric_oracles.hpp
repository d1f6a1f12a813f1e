#pragma once
// Test-only numeric oracles, independent of the library code paths they
// check: a dense Gaussian-elimination solver, an exact Euclidean projection
// onto an ellipsoid, and a projected-gradient maximizer of a linear
// functional over an ellipsoid.

#include <algorithm>
#include <cmath>
#include <vector>

#include "eleanor/kernels.hpp"
#include "eleanor/numerics.hpp"
#include "eleanor/rng.hpp"

namespace eleanor::testing {

inline SpdMatrix random_spd(RngStream& rng, std::size_t d,
                            double diag_boost = 1.0) {
  std::vector<Vec> a(d, Vec(d));
  for (auto& row : a)
    for (auto& v : row) v = rng.uniform(-1.0, 1.0);
  std::vector<Vec> m(d, Vec(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[i][k] * a[j][k];
      m[i][j] = s;
    }
    m[i][i] += diag_boost;
  }
  return spd_from(m);
}

inline Vec random_vec(RngStream& rng, std::size_t d, double scale = 1.0) {
  Vec v(d);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

// Gaussian elimination with partial pivoting.
inline Vec dense_solve(std::vector<Vec> m, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    std::swap(m[piv], m[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t c = ii + 1; c < n; ++c) s -= m[ii][c] * x[c];
    x[ii] = s / m[ii][ii];
  }
  return x;
}

// Euclidean projection onto {x : x^T M x <= r^2} via bisection on the
// multiplier in (I + lam M)^{-1} y.
inline Vec project_ellipsoid(const SpdMatrix& m, const Vec& y, double r) {
  const std::size_t d = y.size();
  auto maha = [&](const Vec& x) {
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q += x[i] * m.at(i, j) * x[j];
    return std::sqrt(std::max(q, 0.0));
  };
  if (maha(y) <= r) return y;
  auto shrink = [&](double lam) {
    std::vector<Vec> sys(d, Vec(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        sys[i][j] = (i == j ? 1.0 : 0.0) + lam * m.at(i, j);
    return dense_solve(std::move(sys), y);
  };
  double lo = 0.0, hi = 1.0;
  while (maha(shrink(hi)) > r) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (maha(shrink(mid)) > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return shrink(hi);
}

// max <phi, xi> s.t. ||xi||_M <= r, by projected gradient ascent.
inline double pg_ellipsoid_max(const SpdMatrix& m, const Vec& phi, double r) {
  Vec xi(phi.size(), 0.0);
  double best = 0.0;
  double step = 1.0;
  for (int it = 0; it < 3000; ++it) {
    Vec trial = xi;
    for (std::size_t i = 0; i < phi.size(); ++i) trial[i] += step * phi[i];
    trial = project_ellipsoid(m, trial, r);
    const double val = kernels::dot(phi.data(), trial.data(), phi.size());
    if (val > best + 1e-15) {
      best = val;
      xi = std::move(trial);
      step = std::min(step * 1.5, 1e3);
    } else {
      step *= 0.5;
      if (step < 1e-12) break;
    }
  }
  return best;
}

}  // namespace eleanor::testing
