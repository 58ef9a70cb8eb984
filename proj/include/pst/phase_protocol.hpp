#pragma once

// Mirror phases of perfect transfer and the parity-encoding protocol for
// two-qubit payloads.
//
// SectorState amplitudes are spin-basis amplitudes: the single-particle state
// |i> has one up spin at site i, the pair state (i,j), i<j, has up spins at i
// and j. With the Jordan-Wigner string taken as prod_{k<i} (1 - 2 n_k) these
// coincide with |i> = c_i^+ |0> and |i,j> = c_i^+ c_j^+ |0>.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "pst/dynamics.hpp"
#include "pst/errors.hpp"

namespace pst {

// Wrap to (-pi, pi].
inline double wrap_phase(double phi) {
  double r = std::remainder(phi, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

// Angular distance on the circle, in [0, pi].
inline double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

struct MirrorPhase {
  double phi = 0.0;  // wrapped to (-pi, pi]
  double tau = 0.0;
  double site_independence_residual = 0.0;
  double min_modulus = 0.0;  // min_i |U_{n+1-i,i}(tau)|
};

// phi = arg U_{n,1}(tau) and the largest deviation of arg U_{n+1-i,i}(tau) from it.
inline MirrorPhase mirror_phase(const Eigensystem& es, double tau, double modulus_tolerance = 1e-6) {
  const std::size_t n = es.n;
  const cplx u = es.propagator_entry(n, 1, tau);
  if (std::abs(u) < 1.0 - modulus_tolerance)
    throw not_pst_configuration("|U_{n,1}(tau)| = " + std::to_string(std::abs(u)) +
                                " at tau = " + std::to_string(tau) + "; chain does not mirror at this time");
  MirrorPhase mp;
  mp.phi = std::arg(u);
  mp.tau = tau;
  mp.min_modulus = std::abs(u);
  for (std::size_t i = 1; i <= n; ++i) {
    const cplx ui = es.propagator_entry(n + 1 - i, i, tau);
    mp.min_modulus = std::min(mp.min_modulus, std::abs(ui));
    mp.site_independence_residual = std::max(mp.site_independence_residual, phase_distance(std::arg(ui), mp.phi));
  }
  return mp;
}

// Mirror phase expected at zero field from the spectrum alone:
// -(pi/2)(n-1) for odd n, and -(pi/2)(n-1) - pi*l for even n where +-(l + 1/2)
// are the smallest levels in units of the gap gcd.
inline double predicted_mirror_phase(const PstSpectrum& spec) {
  const auto diag = validate_pst(spec);
  if (!diag.valid()) throw not_pst_configuration("spectrum is not PST-valid");
  const double n = double(spec.size());
  double phi = -0.5 * pi * (n - 1.0);
  if (spec.size() % 2 == 0) {
    const auto& v = spec.numerators();
    // smallest positive level, rescaled so gaps are odd integers
    const long long smallest = v[spec.size() / 2];
    const long long doubled = 2 * smallest / diag.gap_gcd_units;  // = 2l + 1
    const long long l = (doubled - 1) / 2;
    phi -= pi * double(l);
  }
  return wrap_phase(phi);
}

// Phase picked up by an n-fermion state under mirroring: n*phi + n(n-1)*pi/2.
inline double n_particle_phase(double phi, long long count) {
  const double n = double(count);
  return wrap_phase(n * phi + 0.5 * n * (n - 1.0) * pi);
}

// Uniform field b moving the single-particle mirror phase from phi_current to
// phi_target; each fermion gains energy b and hence phase -b*tau. The phase
// difference is taken on (-pi, pi] so the smallest such field is returned.
inline double field_for_phase(double phi_current, double phi_target, double tau) {
  if (!(tau > 0.0)) throw invalid_argument("transfer time must be positive", "E_PHASE");
  return wrap_phase(phi_current - phi_target) / tau;
}

// ---------------------------------------------------------------------------

class SectorState {
 public:
  SectorState() = default;
  explicit SectorState(std::size_t n) : n_(n), a1_(n, 0.0), a2_(n * (n - 1) / 2, 0.0) {}

  std::size_t sites() const noexcept { return n_; }

  cplx& vacuum() { return a0_; }
  cplx vacuum() const { return a0_; }

  // 1-based site
  cplx& single(std::size_t i) { return a1_[i - 1]; }
  cplx single(std::size_t i) const { return a1_[i - 1]; }

  // 1-based sites, i < j
  cplx& pair(std::size_t i, std::size_t j) { return a2_[pair_index(i, j)]; }
  cplx pair(std::size_t i, std::size_t j) const { return a2_[pair_index(i, j)]; }

  const std::vector<cplx>& singles() const noexcept { return a1_; }
  std::vector<cplx>& singles() noexcept { return a1_; }
  const std::vector<cplx>& pairs() const noexcept { return a2_; }
  std::vector<cplx>& pairs() noexcept { return a2_; }

  double norm_squared() const {
    double s = std::norm(a0_);
    for (const auto& a : a1_) s += std::norm(a);
    for (const auto& a : a2_) s += std::norm(a);
    return s;
  }

  // Lexicographic index of the ordered pair (i, j), i < j.
  std::size_t pair_index(std::size_t i, std::size_t j) const {
    if (i < 1 || j > n_ || !(i < j)) throw invalid_argument("pair (i, j) needs 1 <= i < j <= n");
    const std::size_t a = i - 1, b = j - 1;
    return a * n_ - a * (a + 1) / 2 + (b - a - 1);
  }

  // Antisymmetric matrix A with A_ij = pair(i,j) for i < j.
  Eigen::MatrixXcd pair_matrix() const {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(Eigen::Index(n_), Eigen::Index(n_));
    for (std::size_t i = 1; i <= n_; ++i)
      for (std::size_t j = i + 1; j <= n_; ++j) {
        const cplx v = pair(i, j);
        A(Eigen::Index(i - 1), Eigen::Index(j - 1)) = v;
        A(Eigen::Index(j - 1), Eigen::Index(i - 1)) = -v;
      }
    return A;
  }

 private:
  std::size_t n_ = 0;
  cplx a0_ = 0.0;
  std::vector<cplx> a1_;
  std::vector<cplx> a2_;
};

// Two-qubit payload on {dd, du, ud, uu}; the first arrow is the first qubit.
using TwoQubitAmplitudes = std::array<cplx, 4>;

inline TwoQubitAmplitudes bell_amplitudes(BellState s) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (s) {
    case BellState::psi1_plus: return {0.0, r, r, 0.0};
    case BellState::psi1_minus: return {0.0, -r, r, 0.0};
    case BellState::psi2_plus: return {r, 0.0, 0.0, r};
    case BellState::psi2_minus: return {-r, 0.0, 0.0, r};
  }
  return {};
}

inline double norm_squared(const TwoQubitAmplitudes& a) {
  return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]);
}

// Seeded normalized random payload (complex Gaussian components).
inline TwoQubitAmplitudes random_two_qubit_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TwoQubitAmplitudes a;
  for (auto& c : a) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    c = cplx(re, im);
  }
  const double nrm = std::sqrt(norm_squared(a));
  for (auto& c : a) c /= nrm;
  return a;
}

struct CxResult {
  SectorState state;
  double dropped_weight = 0.0;  // weight pushed into the three-particle sector
};

namespace detail {

// Applies a spin-basis permutation given as a map on sorted sets of up sites.
// Images with more than two up spins leave the sector and are dropped.
template <typename Map>
CxResult permute_sector(const SectorState& in, Map&& map) {
  const std::size_t n = in.sites();
  CxResult r{SectorState(n), 0.0};
  SectorState& out = r.state;
  auto place = [&](std::vector<std::size_t> up, cplx a) {
    if (a == cplx(0.0)) return;
    up = map(std::move(up));
    std::sort(up.begin(), up.end());
    if (up.empty())
      out.vacuum() += a;
    else if (up.size() == 1)
      out.single(up[0]) += a;
    else if (up.size() == 2)
      out.pair(up[0], up[1]) += a;
    else
      r.dropped_weight += std::norm(a);
  };
  place({}, in.vacuum());
  for (std::size_t i = 1; i <= n; ++i) place({i}, in.single(i));
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) place({i, j}, in.pair(i, j));
  return r;
}

inline std::vector<std::size_t> toggle(std::vector<std::size_t> up, std::size_t site) {
  const auto it = std::find(up.begin(), up.end(), site);
  if (it == up.end())
    up.push_back(site);
  else
    up.erase(it);
  return up;
}

inline bool contains(const std::vector<std::size_t>& up, std::size_t site) {
  return std::find(up.begin(), up.end(), site) != up.end();
}

}  // namespace detail

// Controlled-X on 1-based sites: flips `target` where `control` is up.
inline CxResult apply_cx(const SectorState& in, std::size_t control, std::size_t target) {
  const std::size_t n = in.sites();
  if (control < 1 || control > n || target < 1 || target > n || control == target)
    throw invalid_argument("controlled-X needs distinct sites within the chain");
  return detail::permute_sector(in, [&](std::vector<std::size_t> up) {
    return detail::contains(up, control) ? detail::toggle(std::move(up), target) : up;
  });
}

// CX(a, target) followed by CX(b, target), i.e. target ^= a xor b. Applied as
// one permutation, so a three-spin intermediate such as |a b target> does not
// lose the amplitude of |a b>.
inline CxResult apply_parity_cx(const SectorState& in, std::size_t a, std::size_t b, std::size_t target) {
  const std::size_t n = in.sites();
  for (std::size_t s : {a, b, target})
    if (s < 1 || s > n) throw invalid_argument("controlled-X needs sites within the chain");
  if (a == b || a == target || b == target) throw invalid_argument("parity gate needs three distinct sites");
  return detail::permute_sector(in, [&](std::vector<std::size_t> up) {
    return detail::contains(up, a) != detail::contains(up, b) ? detail::toggle(std::move(up), target) : up;
  });
}

// Product state with the payload on sites (1, 2) and every other spin down.
inline SectorState payload_state(const TwoQubitAmplitudes& amps, std::size_t n) {
  if (n < 3) throw invalid_argument("payload needs at least three sites");
  SectorState s(n);
  s.vacuum() = amps[0];
  s.single(2) = amps[1];
  s.single(1) = amps[2];
  s.pair(1, 2) = amps[3];
  return s;
}

// CX(1,3) then CX(2,3): site 3 ends up holding the payload parity, so only
// even particle numbers remain.
inline SectorState encode_cx(const TwoQubitAmplitudes& amps, std::size_t n) {
  if (std::abs(norm_squared(amps) - 1.0) > 1e-12)
    throw invalid_argument("two-qubit amplitudes must be normalized", "E_PROTOCOL");
  return apply_parity_cx(payload_state(amps, n), 1, 2, 3).state;
}

// e^{-iHt} on the <=2-particle sector: a1 -> U a1, A -> U A U^T.
inline SectorState evolve_sector(const SectorState& state, const Eigensystem& es, double t) {
  const std::size_t n = state.sites();
  if (n != es.n) throw invalid_argument("state and eigensystem sizes differ");
  const Propagator P = propagator(es, t);
  SectorState out(n);
  out.vacuum() = state.vacuum();

  Eigen::VectorXcd a1(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) a1(Eigen::Index(i)) = state.singles()[i];
  const Eigen::VectorXcd b1 = P.U * a1;
  for (std::size_t i = 0; i < n; ++i) out.singles()[i] = b1(Eigen::Index(i));

  const Eigen::MatrixXcd B = P.U * state.pair_matrix() * P.U.transpose();
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) out.pair(i, j) = B(Eigen::Index(i - 1), Eigen::Index(j - 1));
  return out;
}

enum class QubitOrder {
  mirrored,  // qubit 1 read from site n, qubit 2 from site n-1
  sites      // first arrow is site n-1, second is site n
};

struct TransferResult {
  TwoQubitAmplitudes decoded{};
  double fidelity = 0.0;      // |<payload|decoded>| in mirrored order
  double global_phase = 0.0;  // arg <payload|decoded>
  double leakage = 0.0;       // weight outside the decoded subspace
  bool leakage_warning = false;
};

inline constexpr double leakage_warning_threshold = 1e-3;

// Encode with CX(1,3) CX(2,3), evolve for tau, decode with CX(n,n-2) CX(n-1,n-2)
// and read the payload off sites (n, n-1) with every other spin down.
inline TransferResult transfer_two_qubit(const TwoQubitAmplitudes& amps, const Eigensystem& es, double tau,
                                         QubitOrder order = QubitOrder::mirrored) {
  const std::size_t n = es.n;
  if (n < 5) throw invalid_argument("two-qubit transfer needs n >= 5", "E_PROTOCOL");
  const SectorState moved = evolve_sector(encode_cx(amps, n), es, tau);
  const CxResult decoded = apply_parity_cx(moved, n, n - 1, n - 2);
  const SectorState& s = decoded.state;

  TransferResult r;
  const cplx dd = s.vacuum();
  const cplx q1 = s.single(n);          // qubit 1 up only
  const cplx q2 = s.single(n - 1);      // qubit 2 up only
  const cplx both = s.pair(n - 1, n);
  const TwoQubitAmplitudes mirrored{dd, q2, q1, both};
  cplx overlap = 0.0;
  for (std::size_t k = 0; k < 4; ++k) overlap += std::conj(amps[k]) * mirrored[k];
  r.fidelity = std::abs(overlap);
  r.global_phase = std::arg(overlap);
  r.leakage = std::max(0.0, 1.0 - norm_squared(mirrored));
  r.leakage_warning = r.leakage > leakage_warning_threshold;
  r.decoded = order == QubitOrder::mirrored ? mirrored : TwoQubitAmplitudes{dd, q1, q2, both};
  return r;
}

inline TransferResult transfer_two_qubit(const TwoQubitAmplitudes& amps, const CouplingProfile& profile,
                                         double field, double tau, QubitOrder order = QubitOrder::mirrored) {
  return transfer_two_qubit(amps, diagonalize(profile, field), tau, order);
}

// Field that brings the single-particle mirror phase of `profile` to phi_target at tau.
inline double tuned_field(const CouplingProfile& profile, double tau, double phi_target = pi / 2) {
  const MirrorPhase mp = mirror_phase(diagonalize(profile, 0.0), tau);
  return field_for_phase(mp.phi, phi_target, tau);
}

}  // namespace pst
