#pragma once

// Free-fermion dynamics of the XX chain in the zero-, one- and two-particle
// sectors. Everything is driven by the single-particle eigensystem of the
// tridiagonal hopping matrix h (couplings off the diagonal, optional uniform
// field b on the diagonal); many-particle amplitudes are determinants of
// entries of U(t) = exp(-i h t).
//
// Site numbers in this API are 1-based (1..n); eigenstate indices are 0-based
// in ascending energy order.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pst/errors.hpp"
#include "pst/spectra.hpp"
#include "pst/tridiagonal.hpp"

namespace pst {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

struct Eigensystem {
  std::size_t n = 0;
  double field = 0.0;
  Eigen::VectorXd values;       // ascending, including the field
  Eigen::VectorXd bare_values;  // ascending, zero field
  Eigen::MatrixXd vectors;      // column k is the eigenvector of values(k), first component >= 0

  // U_{row,col}(t) for 1-based sites, O(n). The hopping graph is bipartite, so
  // at zero field U_ij is real for i+j even and imaginary for i+j odd; only the
  // surviving sum is formed.
  cplx propagator_entry(std::size_t row, std::size_t col, double t) const {
    const bool real = (row + col) % 2 == 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = bare_values(Eigen::Index(k)) * t;
      acc += vectors(Eigen::Index(row - 1), Eigen::Index(k)) * vectors(Eigen::Index(col - 1), Eigen::Index(k)) *
             (real ? std::cos(x) : std::sin(x));
    }
    const cplx bare = real ? cplx(acc, 0.0) : cplx(0.0, -acc);
    return field == 0.0 ? bare : bare * std::polar(1.0, -field * t);
  }
};

inline Eigensystem diagonalize(const CouplingProfile& profile, double field = 0.0) {
  const std::size_t n = profile.sites();
  auto te = tridiagonal_eigen<double>(std::vector<double>(n, 0.0), profile.couplings(), true);

  Eigensystem es;
  es.n = n;
  es.field = field;
  es.values.resize(Eigen::Index(n));
  es.bare_values.resize(Eigen::Index(n));
  es.vectors.resize(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t k = 0; k < n; ++k) {
    // the field only shifts the spectrum; solving at zero field keeps the vectors identical
    es.bare_values(Eigen::Index(k)) = te.values[k];
    es.values(Eigen::Index(k)) = te.values[k] + field;
    const double sign = te.vector_entry(0, k) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) es.vectors(Eigen::Index(i), Eigen::Index(k)) = sign * te.vector_entry(i, k);
  }
  return es;
}

struct Propagator {
  std::size_t n = 0;
  double time = 0.0;
  Eigen::MatrixXcd U;

  // 1-based sites
  cplx operator()(std::size_t row, std::size_t col) const { return U(Eigen::Index(row - 1), Eigen::Index(col - 1)); }
};

inline Propagator propagator(const Eigensystem& es, double t) {
  Eigen::VectorXcd phases(es.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -es.values(k) * t);
  const Eigen::MatrixXcd V = es.vectors.cast<cplx>();
  return Propagator{es.n, t, V * phases.asDiagonal() * V.transpose()};
}

struct SitePair {
  std::size_t first = 0;   // 1-based, first < second
  std::size_t second = 0;
};

// <k,l| e^{-iHt} |i,j> for two fermions: U_ki U_lj - U_kj U_li.
inline cplx two_particle_amplitude(const Propagator& U, SitePair from, SitePair to) {
  auto check = [&](SitePair p) {
    if (p.first < 1 || p.second > U.n || !(p.first < p.second))
      throw invalid_argument("site pair must satisfy 1 <= i < j <= n");
  };
  check(from);
  check(to);
  return U(to.first, from.first) * U(to.second, from.second) - U(to.first, from.second) * U(to.second, from.first);
}

enum class BellState { psi1_plus, psi1_minus, psi2_plus, psi2_minus };

inline const char* to_string(BellState s) {
  switch (s) {
    case BellState::psi1_plus: return "psi1+";
    case BellState::psi1_minus: return "psi1-";
    case BellState::psi2_plus: return "psi2+";
    case BellState::psi2_minus: return "psi2-";
  }
  return "?";
}

inline BellState parse_bell_state(const std::string& s) {
  if (s == "psi1+") return BellState::psi1_plus;
  if (s == "psi1-") return BellState::psi1_minus;
  if (s == "psi2+") return BellState::psi2_plus;
  if (s == "psi2-") return BellState::psi2_minus;
  throw invalid_argument("unknown Bell state '" + s + "' (expected psi1+, psi1-, psi2+ or psi2-)");
}

inline constexpr std::array<BellState, 4> all_bell_states{BellState::psi1_plus, BellState::psi1_minus,
                                                          BellState::psi2_plus, BellState::psi2_minus};

// f(t) = <phi_f| e^{-iHt} |phi_i>, with phi_i the Bell pair on sites (1,2) and
// phi_f its mirror image on (n, n-1). The vacuum part of psi2 does not evolve.
inline cplx bell_fidelity(const Eigensystem& es, BellState state, double t) {
  const std::size_t n = es.n;
  if (n < 5) throw invalid_argument("Bell-state transfer needs n >= 5 so that both ends are disjoint");
  const cplx un1 = es.propagator_entry(n, 1, t);
  const cplx un2 = es.propagator_entry(n, 2, t);
  const cplx um1 = es.propagator_entry(n - 1, 1, t);
  const cplx um2 = es.propagator_entry(n - 1, 2, t);
  switch (state) {
    case BellState::psi1_plus: return 0.5 * (un1 + un2 + um1 + um2);
    case BellState::psi1_minus: return 0.5 * (un1 - un2 - um1 + um2);
    case BellState::psi2_plus:
    case BellState::psi2_minus: {
      const cplx pair = um1 * un2 - um2 * un1;  // (1,2) -> (n-1,n)
      return 0.5 * (pair + cplx(1.0, 0.0));
    }
  }
  return 0.0;
}

// Modulus of the two-fermion part of the psi2 transfer alone, |<n-1,n| e^{-iHt} |1,2>|.
inline double pair_transfer_modulus(const Eigensystem& es, double t) {
  const std::size_t n = es.n;
  const cplx un1 = es.propagator_entry(n, 1, t);
  const cplx un2 = es.propagator_entry(n, 2, t);
  const cplx um1 = es.propagator_entry(n - 1, 1, t);
  const cplx um2 = es.propagator_entry(n - 1, 2, t);
  return std::abs(um1 * un2 - um2 * un1);
}

struct FidelityTrace {
  std::vector<double> times;
  std::vector<cplx> amplitudes;

  std::size_t size() const noexcept { return times.size(); }
  double modulus(std::size_t k) const { return std::abs(amplitudes[k]); }
  std::vector<double> moduli() const {
    std::vector<double> m(size());
    for (std::size_t k = 0; k < size(); ++k) m[k] = modulus(k);
    return m;
  }
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < size(); ++k)
      if (modulus(k) > modulus(best)) best = k;
    return best;
  }
};

// Uniform grid including both endpoints.
inline std::vector<double> uniform_grid(double t_min, double t_max, std::size_t samples) {
  if (!(t_min < t_max)) throw invalid_argument("time grid needs t_min < t_max", "E_GRID");
  if (samples < 2) throw invalid_argument("time grid needs at least two samples", "E_GRID");
  std::vector<double> t(samples);
  const double step = (t_max - t_min) / double(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) t[k] = t_min + step * double(k);
  t.back() = t_max;
  return t;
}

inline FidelityTrace fidelity_trace(const Eigensystem& es, BellState state, double t_min, double t_max,
                                    std::size_t samples) {
  FidelityTrace tr;
  tr.times = uniform_grid(t_min, t_max, samples);
  tr.amplitudes.reserve(samples);
  for (double t : tr.times) tr.amplitudes.push_back(bell_fidelity(es, state, t));
  return tr;
}

// Contiguous time window around `centre` (a grid time) where |f| >= threshold.
// Returns 0 if |f(centre)| itself is below threshold.
inline double window_width(const FidelityTrace& tr, std::size_t centre, double threshold) {
  if (tr.modulus(centre) < threshold) return 0.0;
  std::size_t lo = centre, hi = centre;
  while (lo > 0 && tr.modulus(lo - 1) >= threshold) --lo;
  while (hi + 1 < tr.size() && tr.modulus(hi + 1) >= threshold) ++hi;
  return tr.times[hi] - tr.times[lo];
}

struct Peak {
  double time = 0.0;
  double modulus = 0.0;
};

// Golden-section search for the local maximum of |f| in [t_guess - half_width, t_guess + half_width].
inline Peak peak_refine(const Eigensystem& es, BellState state, double t_guess, double half_width = 0.1,
                        double tolerance = 1e-10) {
  if (!(t_guess > 0.0)) throw invalid_argument("peak search needs t_guess > 0", "E_GRID");
  if (!(half_width > 0.0)) throw invalid_argument("peak search needs a positive bracket", "E_GRID");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double t) { return std::abs(bell_fidelity(es, state, t)); };
  const double lo0 = std::max(0.0, t_guess - half_width);
  const double hi0 = t_guess + half_width;
  double a = lo0, b = hi0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  const double edge = 1e3 * tolerance;
  if (t - lo0 < edge || hi0 - t < edge)
    throw bracket_failure("no interior maximum of |f| in [" + std::to_string(lo0) + ", " + std::to_string(hi0) + "]");
  return Peak{t, f(t)};
}

// Sum of squared eigenvector components over the given 1-based sites.
inline double boundary_weight(const Eigensystem& es, std::size_t state_index, std::span<const std::size_t> sites) {
  if (state_index >= es.n) throw invalid_argument("eigenstate index out of range");
  double w = 0.0;
  for (std::size_t s : sites) {
    if (s < 1 || s > es.n) throw invalid_argument("site " + std::to_string(s) + " out of range");
    const double c = es.vectors(Eigen::Index(s - 1), Eigen::Index(state_index));
    w += c * c;
  }
  return w;
}

// {1..depth} together with their mirror images {n-depth+1..n}.
inline std::vector<std::size_t> boundary_sites(std::size_t n, std::size_t depth = 2) {
  if (2 * depth > n) throw invalid_argument("boundary depth too large for chain length");
  std::vector<std::size_t> s;
  for (std::size_t i = 1; i <= depth; ++i) s.push_back(i);
  for (std::size_t i = n - depth + 1; i <= n; ++i) s.push_back(i);
  return s;
}

struct Localization {
  std::vector<double> weights;         // per eigenstate, ascending energy
  std::vector<std::size_t> dominated;  // boundary-dominated eigenstate indices, ascending
  double separation = 0.0;             // min dominated weight / max other weight
};

// Eigenstates are flagged when their boundary weight exceeds every unflagged
// state's by at least `factor`. Among all prefixes of the weights sorted in
// descending order that clear `factor`, the one with the largest separation
// ratio is taken; prefixes whose weakest member holds less than `floor` of its
// norm on the boundary are never considered.
inline Localization localize(const Eigensystem& es, std::span<const std::size_t> sites, double factor = 5.0,
                             double floor = 0.01) {
  Localization loc;
  loc.weights.resize(es.n);
  for (std::size_t k = 0; k < es.n; ++k) loc.weights[k] = boundary_weight(es, k, sites);

  std::vector<std::size_t> order(es.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return loc.weights[a] > loc.weights[b]; });

  std::size_t best = 0;
  double best_ratio = 0.0;
  for (std::size_t k = 1; k < es.n; ++k) {
    const double inside = loc.weights[order[k - 1]];
    const double outside = loc.weights[order[k]];
    if (inside < floor) break;
    const double ratio = outside > 0.0 ? inside / outside : INFINITY;
    if (ratio >= factor && ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  loc.dominated.assign(order.begin(), order.begin() + std::ptrdiff_t(best));
  std::sort(loc.dominated.begin(), loc.dominated.end());
  loc.separation = best_ratio;
  return loc;
}

}  // namespace pst
