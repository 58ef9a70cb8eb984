#pragma once

// Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts),
// templated on the scalar so the same code runs in double, long double and
// boost::multiprecision types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "pst/errors.hpp"

namespace pst {

template <typename Real>
struct TridiagonalEigen {
  std::vector<Real> values;   // ascending
  std::vector<Real> vectors;  // row-major n x n, column k belongs to values[k]; empty if not requested
  std::size_t n = 0;

  const Real& vector_entry(std::size_t row, std::size_t col) const { return vectors[row * n + col]; }
};

namespace detail {

template <typename Real>
Real pythag(const Real& a, const Real& b) {
  using std::abs;
  using std::sqrt;
  const Real aa = abs(a);
  const Real ab = abs(b);
  if (aa > ab) {
    const Real r = ab / aa;
    return aa * sqrt(Real(1) + r * r);
  }
  if (ab == Real(0)) return Real(0);
  const Real r = aa / ab;
  return ab * sqrt(Real(1) + r * r);
}

}  // namespace detail

// diagonal has n entries, off_diagonal n-1 (sub/super diagonal, symmetric).
template <typename Real>
TridiagonalEigen<Real> tridiagonal_eigen(std::vector<Real> d, const std::vector<Real>& off_diagonal,
                                         bool want_vectors = true) {
  using std::abs;
  const std::size_t n = d.size();
  if (n == 0) return {};
  if (off_diagonal.size() + 1 != n)
    throw invalid_argument("tridiagonal matrix needs n-1 off-diagonal entries", "E_SOLVER");

  std::vector<Real> e(n, Real(0));
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = off_diagonal[i];

  std::vector<Real> V;
  if (want_vectors) {
    V.assign(n * n, Real(0));
    for (std::size_t i = 0; i < n; ++i) V[i * n + i] = Real(1);
  }

  const Real eps = std::numeric_limits<Real>::epsilon();
  constexpr int max_iterations = 100;
  Real f = 0;
  Real tst1 = 0;

  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max<Real>(tst1, abs(d[l]) + abs(e[l]));
    std::size_t m = l;
    while (m < n - 1) {
      if (abs(e[m]) <= eps * tst1) break;
      ++m;
    }

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations)
          throw numerical_instability("tridiagonal QL iteration did not converge at index " + std::to_string(l));

        Real g = d[l];
        Real p = (d[l + 1] - g) / (Real(2) * e[l]);
        Real r = detail::pythag(p, Real(1));
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const Real dl1 = d[l + 1];
        Real h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        Real c = 1, c2 = 1, c3 = 1;
        const Real el1 = e[l + 1];
        Real s = 0, s2 = 0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = detail::pythag(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (want_vectors) {
            for (std::size_t k = 0; k < n; ++k) {
              Real& vi = V[k * n + ii];
              Real& vi1 = V[k * n + ii + 1];
              const Real tmp = vi1;
              vi1 = s * vi + c * tmp;
              vi = c * vi - s * tmp;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  TridiagonalEigen<Real> out;
  out.n = n;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = d[order[k]];
  if (want_vectors) {
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t row = 0; row < n; ++row) out.vectors[row * n + k] = V[row * n + order[k]];
  }
  return out;
}

template <typename Real>
std::vector<Real> tridiagonal_eigenvalues(std::vector<Real> diagonal, const std::vector<Real>& off_diagonal) {
  return tridiagonal_eigen<Real>(std::move(diagonal), off_diagonal, false).values;
}

}  // namespace pst
