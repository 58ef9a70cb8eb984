#pragma once

// Prescribed single-particle spectra for perfect-state-transfer chains.
//
// Energies are kept as exact integers over a small common denominator
// (1 for integer ladders, 2 for the half-integer ladders of even chains),
// because PST validity is a parity property of the integer gaps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pst/errors.hpp"

namespace pst {

class PstSpectrum {
 public:
  PstSpectrum() = default;

  // energies = numerators / denominator, strictly increasing.
  PstSpectrum(std::vector<long long> numerators, long long denominator = 1)
      : numerators_(std::move(numerators)), denominator_(denominator) {
    if (denominator_ <= 0) throw invalid_argument("spectrum denominator must be positive", "E_SPECTRUM");
    if (numerators_.empty()) throw invalid_argument("spectrum must contain at least one level", "E_SPECTRUM");
    for (std::size_t k = 1; k < numerators_.size(); ++k) {
      if (numerators_[k] <= numerators_[k - 1]) {
        throw degenerate_spectrum("spectrum levels must be strictly increasing (levels " +
                                  std::to_string(k - 1) + " and " + std::to_string(k) + ")");
      }
    }
    reduce();
  }

  std::size_t size() const noexcept { return numerators_.size(); }
  const std::vector<long long>& numerators() const noexcept { return numerators_; }
  long long denominator() const noexcept { return denominator_; }

  template <typename Real = double>
  Real value(std::size_t k) const {
    return Real(numerators_[k]) / Real(denominator_);
  }

  template <typename Real = double>
  std::vector<Real> values() const {
    std::vector<Real> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = value<Real>(k);
    return out;
  }

  // Level label nu = k - (n-1)/2 (half-integer for even n).
  double nu(std::size_t k) const {
    return double(k) - 0.5 * double(size() - 1);
  }

  bool antisymmetric() const noexcept {
    const std::size_t n = size();
    for (std::size_t k = 0; k < n; ++k)
      if (numerators_[k] != -numerators_[n - 1 - k]) return false;
    return true;
  }

  bool operator==(const PstSpectrum& o) const {
    return numerators_ == o.numerators_ && denominator_ == o.denominator_;
  }

 private:
  void reduce() {
    long long g = denominator_;
    for (long long v : numerators_) g = std::gcd(g, v);
    if (g > 1) {
      for (auto& v : numerators_) v /= g;
      denominator_ /= g;
    }
  }

  std::vector<long long> numerators_;
  long long denominator_ = 1;
};

// Positive nearest-neighbour couplings J_1..J_{n-1} of a mirror-symmetric chain.
class CouplingProfile {
 public:
  static constexpr double persymmetry_tolerance = 1e-10;

  CouplingProfile() = default;

  explicit CouplingProfile(std::vector<double> couplings) : couplings_(std::move(couplings)) {
    double jmax = 0.0;
    for (std::size_t i = 0; i < couplings_.size(); ++i) {
      if (!(couplings_[i] > 0.0) || !std::isfinite(couplings_[i]))
        throw invalid_argument("coupling J_" + std::to_string(i + 1) + " must be positive and finite");
      jmax = std::max(jmax, couplings_[i]);
    }
    const std::size_t m = couplings_.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(couplings_[i] - couplings_[m - 1 - i]) > persymmetry_tolerance * jmax)
        throw invalid_argument("coupling profile is not persymmetric at J_" + std::to_string(i + 1));
    }
  }

  // Number of sites.
  std::size_t sites() const noexcept { return couplings_.size() + 1; }
  const std::vector<double>& couplings() const noexcept { return couplings_; }
  double operator[](std::size_t i) const { return couplings_[i]; }

  double max_coupling() const {
    return couplings_.empty() ? 0.0 : *std::max_element(couplings_.begin(), couplings_.end());
  }

 private:
  std::vector<double> couplings_;
};

// Shift every level outside the central `protected_count` block toward zero by `amount`.
struct ContractionStep {
  long long amount = 0;
  std::size_t protected_count = 1;
};

struct PstDiagnostics {
  bool integral = true;          // every level is an integer multiple of the base unit
  bool antisymmetric = false;
  bool odd_gaps = false;         // every gap / gcd is odd
  long long gap_gcd_units = 0;   // gcd of gaps in units of 1/denominator
  double gap_gcd = 0.0;          // gcd of gaps in energy units
  double transfer_time = 0.0;    // pi / gap_gcd
  bool valid() const noexcept { return integral && odd_gaps; }
};

inline PstSpectrum inverted_quadratic_spectrum(long long n) {
  if (n < 3 || n % 2 == 0)
    throw invalid_argument("inverted quadratic spectrum needs odd n >= 3, got " + std::to_string(n),
                           "E_SPECTRUM");
  const long long half = (n - 1) / 2;
  std::vector<long long> eps;
  eps.reserve(static_cast<std::size_t>(n));
  for (long long nu = -half; nu <= half; ++nu) eps.push_back(nu * (n - 1 - std::abs(nu)));
  return PstSpectrum(std::move(eps));
}

// Symmetric ladder with uniform spacing `gap`; half-integer multiples of gap for even n.
inline PstSpectrum equidistant_spectrum(long long n, long long gap) {
  if (n < 2) throw invalid_argument("equidistant spectrum needs n >= 2", "E_SPECTRUM");
  if (gap <= 0) throw invalid_argument("equidistant spectrum needs a positive gap", "E_SPECTRUM");
  std::vector<long long> twice;
  twice.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) twice.push_back((2 * k - (n - 1)) * gap);
  return PstSpectrum(std::move(twice), 2);
}

inline PstSpectrum contract(const PstSpectrum& spec, const ContractionStep& step) {
  const std::size_t n = spec.size();
  if (step.amount < 0 || step.amount % 2 != 0)
    throw invalid_argument("contraction amount must be even and non-negative, got " +
                               std::to_string(step.amount),
                           "E_SPECTRUM");
  if (step.protected_count % 2 == 0 || step.protected_count > n)
    throw invalid_argument("protected level count must be odd and at most n", "E_SPECTRUM");
  if (n % 2 == 0) throw invalid_argument("contraction requires an odd number of levels", "E_SPECTRUM");
  if (!spec.antisymmetric())
    throw invalid_argument("contraction requires a spectrum symmetric about zero", "E_SPECTRUM");
  if (step.amount == 0 || step.protected_count == n) return spec;

  // amount is in energy units; work on numerators.
  const long long shift = step.amount * spec.denominator();
  const auto& v = spec.numerators();
  const std::size_t centre = n / 2;
  const std::size_t half_block = step.protected_count / 2;
  const std::size_t lo = centre - half_block;  // first protected index
  const std::size_t hi = centre + half_block;  // last protected index

  const long long inner = std::abs(v[hi]);
  const long long outer = std::abs(v[hi + 1]);
  if (!(shift < outer - inner)) {
    throw contraction_error("contraction by " + std::to_string(step.amount) + " collides level " +
                                std::to_string(v[hi + 1]) + " with protected level " + std::to_string(v[hi]) +
                                " (numerators over " + std::to_string(spec.denominator()) + ")",
                            v[hi], v[hi + 1]);
  }

  std::vector<long long> out(v);
  for (std::size_t k = 0; k < n; ++k) {
    if (k >= lo && k <= hi) continue;
    const long long sgn = (v[k] > 0) - (v[k] < 0);
    out[k] = v[k] - shift * sgn;
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (out[k] <= out[k - 1])
      throw contraction_error("contraction breaks level ordering between levels " + std::to_string(k - 1) +
                                  " and " + std::to_string(k),
                              v[k - 1], v[k]);
  }
  return PstSpectrum(std::move(out), spec.denominator());
}

// Contraction pipeline: step k (k = 1..m) shifts by n-(2k+1) and protects the
// central 2k-1 levels, leaving the unit-spaced multiplet {0, +-1, ..., +-m};
// a final shift by final_delta then protects that multiplet.
inline PstSpectrum multiplet_spectrum(long long n, long long multiplet_order, long long final_delta) {
  if (n < 3 || n % 2 == 0)
    throw invalid_argument("multiplet pipeline needs odd n >= 3, got " + std::to_string(n), "E_SPECTRUM");
  if (multiplet_order < 1) throw invalid_argument("multiplet order must be >= 1", "E_SPECTRUM");
  if (2 * multiplet_order + 1 > n)
    throw invalid_argument("multiplet of order " + std::to_string(multiplet_order) + " does not fit in n=" +
                               std::to_string(n),
                           "E_SPECTRUM");
  if (final_delta < 0 || final_delta % 2 != 0)
    throw invalid_argument("final contraction must be even and non-negative", "E_SPECTRUM");

  PstSpectrum spec = inverted_quadratic_spectrum(n);
  for (long long k = 1; k <= multiplet_order; ++k) {
    spec = contract(spec, ContractionStep{n - (2 * k + 1), static_cast<std::size_t>(2 * k - 1)});
  }
  return contract(spec, ContractionStep{final_delta, static_cast<std::size_t>(2 * multiplet_order + 1)});
}

inline PstDiagnostics validate_pst(const PstSpectrum& spec) {
  constexpr double pi = 3.141592653589793238462643383279502884;
  PstDiagnostics d;
  d.antisymmetric = spec.antisymmetric();
  const auto& v = spec.numerators();
  if (v.size() < 2) {
    // a single level transfers trivially at any time
    d.odd_gaps = true;
    return d;
  }
  long long g = 0;
  for (std::size_t k = 1; k < v.size(); ++k) g = std::gcd(g, v[k] - v[k - 1]);
  d.gap_gcd_units = g;
  d.gap_gcd = double(g) / double(spec.denominator());
  d.transfer_time = pi / d.gap_gcd;
  d.odd_gaps = true;
  for (std::size_t k = 1; k < v.size(); ++k) d.odd_gaps = d.odd_gaps && ((v[k] - v[k - 1]) / g) % 2 != 0;
  return d;
}

// J_1 = J_{n-1} = alpha*j, all other couplings j.
inline CouplingProfile boundary_coupling_profile(std::size_t n, double alpha, double j = 1.0) {
  if (n < 3) throw invalid_argument("boundary coupling profile needs n >= 3");
  if (!(alpha > 0.0) || alpha > 1.0) throw invalid_argument("alpha must lie in (0, 1]");
  if (!(j > 0.0)) throw invalid_argument("base coupling must be positive");
  std::vector<double> c(n - 1, j);
  c.front() = alpha * j;
  c.back() = alpha * j;
  return CouplingProfile(std::move(c));
}

}  // namespace pst
