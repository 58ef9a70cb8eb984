#pragma once

// Reconstruction of the zero-diagonal persymmetric Jacobi matrix (the chain
// couplings) from a prescribed spectrum.
//
// A Jacobi matrix is fixed by its eigenvalues together with the squared first
// components of its normalized eigenvectors (the spectral measure seen from
// site 1). For a persymmetric matrix those weights are forced to
//
//     w_k  proportional to  1 / prod_{j != k} |lambda_k - lambda_j|,
//
// and the matrix is recovered by running the Stieltjes/Lanczos recurrence on
// diag(lambda) starting from sqrt(w), with full reorthogonalization.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pst/errors.hpp"
#include "pst/spectra.hpp"
#include "pst/tridiagonal.hpp"

namespace pst {

// Working precision of the reconstruction. quad is a 113-bit software float.
enum class Precision { standard, extended, quad };

using quad_float = boost::multiprecision::cpp_bin_float_quad;

inline Precision parse_precision(const std::string& name) {
  if (name == "standard" || name == "double") return Precision::standard;
  if (name == "extended" || name == "long-double") return Precision::extended;
  if (name == "quad") return Precision::quad;
  throw invalid_argument("unknown precision '" + name + "' (expected standard, extended or quad)");
}

inline const char* to_string(Precision p) {
  switch (p) {
    case Precision::standard: return "standard";
    case Precision::extended: return "extended";
    case Precision::quad: return "quad";
  }
  return "?";
}

template <typename Real>
struct SpectralMeasure {
  std::vector<Real> nodes;    // strictly increasing
  std::vector<Real> weights;  // positive, sum to one

  std::size_t size() const noexcept { return nodes.size(); }

  void validate() const {
    using std::abs;
    if (nodes.empty() || nodes.size() != weights.size())
      throw invalid_argument("spectral measure needs matching, non-empty nodes and weights", "E_SOLVER");
    Real total = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k > 0 && !(nodes[k] > nodes[k - 1]))
        throw degenerate_spectrum("spectral measure nodes must be strictly increasing");
      if (!(weights[k] > 0)) throw invalid_argument("spectral weights must be positive", "E_SOLVER");
      total += weights[k];
    }
    if (abs(total - Real(1)) > Real(1e-12)) throw invalid_argument("spectral weights must sum to 1", "E_SOLVER");
  }
};

template <typename Real>
struct JacobiMatrix {
  std::vector<Real> diagonal;
  std::vector<Real> off_diagonal;

  std::size_t size() const noexcept { return diagonal.size(); }
};

// Weights that make the reconstructed Jacobi matrix persymmetric.
// Products are accumulated as sums of logarithms.
template <typename Real>
SpectralMeasure<Real> persymmetric_weights(std::vector<Real> nodes) {
  using std::abs;
  using std::exp;
  using std::log;
  const std::size_t n = nodes.size();
  if (n == 0) throw invalid_argument("spectral measure needs at least one node", "E_SOLVER");
  for (std::size_t k = 1; k < n; ++k) {
    if (nodes[k] == nodes[k - 1]) throw degenerate_spectrum("duplicate node in spectrum at index " + std::to_string(k));
    if (nodes[k] < nodes[k - 1]) throw invalid_argument("nodes must be sorted ascending", "E_SOLVER");
  }

  // differences are taken on nodes scaled to unit radius, so the weights of
  // c*nodes and nodes agree exactly whenever the scaling itself is exact
  Real radius = 0;
  for (const auto& v : nodes) radius = std::max<Real>(radius, abs(v));
  if (radius == Real(0)) radius = 1;
  std::vector<Real> unit(n);
  for (std::size_t k = 0; k < n; ++k) unit[k] = nodes[k] / radius;

  std::vector<Real> logw(n, Real(0));
  for (std::size_t k = 0; k < n; ++k) {
    Real acc = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) acc -= log(abs(unit[k] - unit[j]));
    logw[k] = acc;
  }
  const Real top = *std::max_element(logw.begin(), logw.end());
  std::vector<Real> w(n);
  Real total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = exp(logw[k] - top);
    total += w[k];
  }
  for (auto& x : w) x /= total;
  return SpectralMeasure<Real>{std::move(nodes), std::move(w)};
}

template <typename Real>
SpectralMeasure<Real> persymmetric_weights(const PstSpectrum& spec) {
  return persymmetric_weights<Real>(spec.values<Real>());
}

// Stieltjes procedure on the discrete measure; returns the Jacobi matrix whose
// spectral measure at the first coordinate reproduces `measure`.
template <typename Real>
JacobiMatrix<Real> jacobi_from_measure(const SpectralMeasure<Real>& measure) {
  using std::abs;
  using std::sqrt;
  measure.validate();
  const std::size_t n = measure.size();

  // run the recurrence on unit-radius nodes and rescale the coefficients
  Real radius = 0;
  for (const auto& v : measure.nodes) radius = std::max<Real>(radius, abs(v));
  if (radius == Real(0)) radius = 1;
  std::vector<Real> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = measure.nodes[i] / radius;

  JacobiMatrix<Real> out;
  out.diagonal.assign(n, Real(0));
  out.off_diagonal.assign(n > 0 ? n - 1 : 0, Real(0));

  std::vector<Real> Q(n * n, Real(0));  // row k holds the k-th Lanczos vector
  auto row = [&](std::size_t k) { return Q.begin() + static_cast<std::ptrdiff_t>(k * n); };
  auto dot = [n](auto a, auto b) {
    Real s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };

  for (std::size_t i = 0; i < n; ++i) Q[i] = sqrt(measure.weights[i]);
  {
    // renormalize against rounding in the weights
    const Real nrm = sqrt(dot(row(0), row(0)));
    for (std::size_t i = 0; i < n; ++i) Q[i] /= nrm;
  }

  // a coefficient at rounding level of the spectral radius carries no information
  const Real breakdown = std::numeric_limits<Real>::epsilon();

  std::vector<Real> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto qk = row(k);
    for (std::size_t i = 0; i < n; ++i) r[i] = x[i] * qk[i];
    if (k > 0) {
      auto qp = row(k - 1);
      for (std::size_t i = 0; i < n; ++i) r[i] -= out.off_diagonal[k - 1] * qp[i];
    }
    const Real alpha = dot(qk, r.begin());
    out.diagonal[k] = alpha;
    if (k + 1 == n) break;
    for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * qk[i];

    // classical Gram-Schmidt against every previous vector, applied twice
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j <= k; ++j) {
        auto qj = row(j);
        const Real c = dot(qj, r.begin());
        for (std::size_t i = 0; i < n; ++i) r[i] -= c * qj[i];
      }
    }

    const Real beta = sqrt(dot(r.begin(), r.begin()));
    if (!(beta > breakdown))
      throw reconstruction_failure("recurrence coefficient at index " + std::to_string(k + 1) + " vanished; measure is numerically degenerate", k + 1);
    out.off_diagonal[k] = beta;
    auto qn = row(k + 1);
    for (std::size_t i = 0; i < n; ++i) qn[i] = r[i] / beta;
  }
  for (auto& a : out.diagonal) a *= radius;
  for (auto& b : out.off_diagonal) b *= radius;
  return out;
}

namespace detail {

template <typename Real>
CouplingProfile couplings_from_spectrum_impl(const PstSpectrum& spec, double tolerance) {
  using std::abs;
  if (spec.size() < 2) throw invalid_argument("a chain needs at least two sites", "E_SOLVER");
  if (!spec.antisymmetric())
    throw invalid_argument("coupling reconstruction requires a spectrum symmetric about zero", "E_SOLVER");

  const JacobiMatrix<Real> jm = jacobi_from_measure(persymmetric_weights<Real>(spec));
  const std::size_t m = jm.off_diagonal.size();
  const Real jmax = *std::max_element(jm.off_diagonal.begin(), jm.off_diagonal.end());
  const Real tol = Real(tolerance) * jmax;

  for (std::size_t k = 0; k < jm.size(); ++k) {
    if (abs(jm.diagonal[k]) > tol)
      throw numerical_instability("reconstructed diagonal entry " + std::to_string(k + 1) +
                                  " is not zero within tolerance; try a higher --precision");
  }
  std::vector<double> J(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Real a = jm.off_diagonal[i];
    const Real b = jm.off_diagonal[m - 1 - i];
    if (abs(a - b) > tol)
      throw numerical_instability("reconstructed couplings J_" + std::to_string(i + 1) + " and J_" +
                                  std::to_string(m - i) +
                                  " differ beyond tolerance; try a higher --precision");
    J[i] = static_cast<double>((a + b) / Real(2));
  }
  return CouplingProfile(std::move(J));
}

template <typename Real>
double roundtrip_error_impl(const PstSpectrum& spec, const CouplingProfile& profile) {
  using std::abs;
  std::vector<Real> off(profile.couplings().begin(), profile.couplings().end());
  const std::vector<Real> got = tridiagonal_eigenvalues<Real>(std::vector<Real>(spec.size(), Real(0)), off);
  const std::vector<Real> want = spec.values<Real>();
  Real scale = 0;
  for (const auto& v : want) scale = std::max<Real>(scale, abs(v));
  if (scale == Real(0)) scale = 1;
  Real worst = 0;
  for (std::size_t k = 0; k < want.size(); ++k) worst = std::max<Real>(worst, abs(got[k] - want[k]));
  return static_cast<double>(worst / scale);
}

}  // namespace detail

// Reconstructed couplings are symmetrized (J_i and J_{n-i} averaged) once both
// the zero-diagonal and persymmetry checks pass at `tolerance` relative to max J.
inline CouplingProfile couplings_from_spectrum(const PstSpectrum& spec, Precision precision = Precision::standard,
                                               double tolerance = 1e-8) {
  switch (precision) {
    case Precision::standard: return detail::couplings_from_spectrum_impl<double>(spec, tolerance);
    case Precision::extended: return detail::couplings_from_spectrum_impl<long double>(spec, tolerance);
    case Precision::quad: return detail::couplings_from_spectrum_impl<quad_float>(spec, tolerance);
  }
  throw invalid_argument("unknown precision");
}

// max_k |lambda_recovered - lambda_target| / max |lambda_target|, with the
// forward eigenvalues of the returned profile computed at the same precision.
inline double roundtrip_error(const PstSpectrum& spec, const CouplingProfile& profile,
                              Precision precision = Precision::standard) {
  switch (precision) {
    case Precision::standard: return detail::roundtrip_error_impl<double>(spec, profile);
    case Precision::extended: return detail::roundtrip_error_impl<long double>(spec, profile);
    case Precision::quad: return detail::roundtrip_error_impl<quad_float>(spec, profile);
  }
  throw invalid_argument("unknown precision");
}

inline double roundtrip_error(const PstSpectrum& spec, Precision precision = Precision::standard) {
  return roundtrip_error(spec, couplings_from_spectrum(spec, precision), precision);
}

// Default precision for front ends; PST_PRECISION overrides the built-in default.
inline Precision default_precision() {
  if (const char* env = std::getenv("PST_PRECISION"); env && *env) return parse_precision(env);
  return Precision::standard;
}

}  // namespace pst
