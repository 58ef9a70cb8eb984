#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pst/inverse_solver.hpp"
#include "support/oracles.hpp"

using namespace pst;

namespace {

std::vector<double> sqrt_ladder_couplings(int n, double scale = 1.0) {
  std::vector<double> J;
  for (int i = 1; i < n; ++i) J.push_back(scale * std::sqrt(double(i) * double(n - i)));
  return J;
}

// Squared first components of the dense eigenvectors.
std::vector<double> first_component_weights(const std::vector<double>& couplings) {
  const auto d = oracle::dense_eigen(couplings);
  std::vector<double> w;
  for (Eigen::Index k = 0; k < d.vectors.cols(); ++k) w.push_back(d.vectors(0, k) * d.vectors(0, k));
  return w;
}

// Random symmetric spectrum with odd integer gaps.
PstSpectrum random_pst_spectrum(std::mt19937& rng, long long max_n) {
  const long long n = std::uniform_int_distribution<long long>(2, max_n)(rng);
  std::uniform_int_distribution<long long> half_gap(0, 6);
  std::vector<long long> upper;
  long long level = (n % 2 == 1) ? 0 : 1;  // half-integer ladder for even n, in units of 1/2
  if (n % 2 == 1) {
    for (long long k = 0; k < n / 2; ++k) {
      level += 2 * half_gap(rng) + 1;
      upper.push_back(level);
    }
  } else {
    upper.push_back(level);
    for (long long k = 1; k < n / 2; ++k) {
      level += 2 * (2 * half_gap(rng) + 1);
      upper.push_back(level);
    }
  }
  std::vector<long long> all;
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) all.push_back(-*it);
  if (n % 2 == 1) all.push_back(0);
  all.insert(all.end(), upper.begin(), upper.end());
  return n % 2 == 1 ? PstSpectrum(all) : PstSpectrum(all, 2);
}

}  // namespace

TEST(Tridiagonal, MatchesDenseSolverAndReconstructs) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + std::size_t(trial) * 3;
    std::vector<double> off(n - 1), diag(n);
    for (auto& x : off) x = u(rng);
    for (auto& x : diag) x = u(rng) - 1.5;
    const auto te = tridiagonal_eigen<double>(diag, off);
    Eigen::MatrixXd h = oracle::hopping_matrix(off);
    for (std::size_t i = 0; i < n; ++i) h(Eigen::Index(i), Eigen::Index(i)) = diag[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(h);
    const auto N = Eigen::Index(n);
    Eigen::MatrixXd V(N, N);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) V(Eigen::Index(i), Eigen::Index(k)) = te.vector_entry(i, k);
    Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(te.values.data(), N);
    EXPECT_LT((lam - dense.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((V.transpose() * V - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((V * lam.asDiagonal() * V.transpose() - h).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Tridiagonal, ExtendedPrecisionEigenvalues) {
  const auto J = sqrt_ladder_couplings(41);
  std::vector<quad_float> off(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) off[i] = sqrt(quad_float(i + 1) * quad_float(41 - int(i) - 1));
  const auto ev = tridiagonal_eigenvalues<quad_float>(std::vector<quad_float>(41, quad_float(0)), off);
  for (std::size_t k = 0; k < 41; ++k) {
    const quad_float want = 2 * (quad_float(int(k)) - 20);
    EXPECT_LT(static_cast<double>(abs(ev[k] - want)), 1e-28);
  }
}

TEST(PersymmetricWeights, ThreeSiteHandCase) {
  const double r2 = std::sqrt(2.0);
  const auto m = persymmetric_weights<double>({-r2, 0.0, r2});
  const auto oracle_w = first_component_weights({1.0, 1.0});
  const std::vector<double> expect{0.25, 0.5, 0.25};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(m.weights[k], expect[k], 1e-15);
    EXPECT_NEAR(oracle_w[k], expect[k], 1e-15);
  }
}

TEST(PersymmetricWeights, TwoSites) {
  const auto m = persymmetric_weights<double>({-1.0, 1.0});
  EXPECT_DOUBLE_EQ(m.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(m.weights[1], 0.5);
}

TEST(PersymmetricWeights, FiveSiteLadderMatchesForwardEigenvectors) {
  const auto m = persymmetric_weights<double>(PstSpectrum({-2, -1, 0, 1, 2}));
  const auto w = first_component_weights(sqrt_ladder_couplings(5, 0.5));
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(m.weights[k], w[k], 1e-12);
}

TEST(PersymmetricWeights, DuplicateNodes) {
  EXPECT_THROW(persymmetric_weights<double>({-1.0, 0.0, 0.0, 1.0}), degenerate_spectrum);
}

TEST(PersymmetricWeights, LogSpaceAvoidsOverflow) {
  // direct products would overflow a double here
  const auto m = persymmetric_weights<double>(multiplet_spectrum(321, 4, 0));
  double total = 0.0;
  for (double w : m.weights) {
    ASSERT_GT(w, 0.0);
    total += w;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(JacobiFromMeasure, ThreeSites) {
  const auto jm = jacobi_from_measure(SpectralMeasure<double>{{-2.0, 0.0, 2.0}, {0.25, 0.5, 0.25}});
  ASSERT_EQ(jm.off_diagonal.size(), 2u);
  EXPECT_NEAR(jm.off_diagonal[0], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(jm.off_diagonal[1], std::sqrt(2.0), 1e-14);
  for (double a : jm.diagonal) EXPECT_NEAR(a, 0.0, 1e-14);
}

TEST(JacobiFromMeasure, EquidistantFiveSites) {
  const auto jm = jacobi_from_measure(persymmetric_weights<double>(equidistant_spectrum(5, 2)));
  const std::vector<double> want{2.0, std::sqrt(6.0), std::sqrt(6.0), 2.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(jm.off_diagonal[i], want[i], 1e-10);
}

TEST(JacobiFromMeasure, SingleNode) {
  const auto jm = jacobi_from_measure(SpectralMeasure<double>{{0.0}, {1.0}});
  EXPECT_TRUE(jm.off_diagonal.empty());
  ASSERT_EQ(jm.diagonal.size(), 1u);
  EXPECT_EQ(jm.diagonal[0], 0.0);
}

TEST(JacobiFromMeasure, ReproducesArbitraryMeasure) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + std::size_t(trial);
    SpectralMeasure<double> m;
    double x = -1.0, total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      x += u(rng);
      m.nodes.push_back(x);
      m.weights.push_back(u(rng));
      total += m.weights.back();
    }
    for (auto& w : m.weights) w /= total;
    const auto jm = jacobi_from_measure(m);
    Eigen::MatrixXd T = oracle::hopping_matrix(jm.off_diagonal);
    for (std::size_t i = 0; i < n; ++i) T(Eigen::Index(i), Eigen::Index(i)) = jm.diagonal[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> d(T);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(d.eigenvalues()(Eigen::Index(k)), m.nodes[k], 1e-12);
      EXPECT_NEAR(d.eigenvectors()(0, Eigen::Index(k)) * d.eigenvectors()(0, Eigen::Index(k)), m.weights[k], 1e-12);
    }
    for (double b : jm.off_diagonal) EXPECT_GT(b, 0.0);
  }
}

TEST(JacobiFromMeasure, InvalidMeasures) {
  EXPECT_THROW(jacobi_from_measure(SpectralMeasure<double>{{0.0, 1.0}, {0.5, 0.6}}), invalid_argument);
  EXPECT_THROW(jacobi_from_measure(SpectralMeasure<double>{{1.0, 0.0}, {0.5, 0.5}}), degenerate_spectrum);
  EXPECT_THROW(jacobi_from_measure(SpectralMeasure<double>{{0.0, 1.0}, {1.0, 0.0}}), invalid_argument);
  // nodes one ulp apart cannot be resolved by the recurrence
  try {
    jacobi_from_measure(SpectralMeasure<double>{{1.0, std::nextafter(1.0, 2.0)}, {0.5, 0.5}});
    FAIL() << "expected reconstruction_failure";
  } catch (const reconstruction_failure& e) {
    EXPECT_EQ(e.index, 1u);
    EXPECT_EQ(e.code(), "E_SOLVER");
  }
}

TEST(CouplingsFromSpectrum, EquidistantClosedForm) {
  const auto p = couplings_from_spectrum(equidistant_spectrum(21, 2));
  const auto want = sqrt_ladder_couplings(21);
  ASSERT_EQ(p.couplings().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(p[i] / want[i], 1.0, 1e-9);
}

TEST(CouplingsFromSpectrum, InvertedQuadraticOscillatesTowardTheEnds) {
  const auto p = couplings_from_spectrum(inverted_quadratic_spectrum(31));
  const auto& J = p.couplings();
  auto ratio = [&](std::initializer_list<std::size_t> idx) {
    double lo = 1e300, hi = 0.0;
    for (std::size_t i : idx) {
      lo = std::min(lo, J[i - 1]);
      hi = std::max(hi, J[i - 1]);
    }
    return hi / lo;
  };
  // measured: middle third 1.003541, outer sixth 3.934116
  const double middle = ratio({11, 12, 13, 14, 15, 16, 17, 18, 19, 20});
  const double outer = ratio({1, 2, 3, 4, 5});
  EXPECT_NEAR(middle, 1.003541, 1e-5);
  EXPECT_NEAR(outer, 3.934116, 1e-5);
  EXPECT_LT(middle, 1.01);
  EXPECT_GT(outer, 3.0);
}

TEST(CouplingsFromSpectrum, MultipletN71RoundTripAgainstDenseSolver) {
  const auto spec = multiplet_spectrum(71, 2, 60);
  const auto p = couplings_from_spectrum(spec);
  const auto d = oracle::dense_eigen(p.couplings());
  double worst = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) worst = std::max(worst, std::abs(d.values(Eigen::Index(k)) - spec.value(k)));
  EXPECT_EQ(spec.value(70), 35.0 * 35.0 - 68 - 66 - 60);
  EXPECT_LT(worst / spec.value(70), 1e-8);
}

TEST(CouplingsFromSpectrum, RejectsAsymmetricSpectra) {
  EXPECT_THROW(couplings_from_spectrum(PstSpectrum({-3, 0, 2})), invalid_argument);
  EXPECT_THROW(couplings_from_spectrum(PstSpectrum({0})), invalid_argument);
}

TEST(CouplingsFromSpectrum, InstabilityReportedAtTightTolerance) {
  // with a zero tolerance the rounding-level asymmetry must be reported
  EXPECT_THROW(couplings_from_spectrum(inverted_quadratic_spectrum(101), Precision::standard, 0.0),
               numerical_instability);
}

TEST(RoundtripError, Examples) {
  EXPECT_LE(roundtrip_error(equidistant_spectrum(9, 2)), 1e-12);
  EXPECT_LE(roundtrip_error(inverted_quadratic_spectrum(31)), 1e-8);
}

TEST(RoundtripError, N321ExtendedPrecision) {
  const auto spec = multiplet_spectrum(321, 4, 0);
  EXPECT_LE(roundtrip_error(spec, Precision::extended), 1e-6);
}

TEST(RoundtripError, PrecisionLadderAgrees) {
  const auto spec = multiplet_spectrum(71, 2, 60);
  const auto a = couplings_from_spectrum(spec, Precision::standard);
  const auto b = couplings_from_spectrum(spec, Precision::extended);
  const auto c = couplings_from_spectrum(spec, Precision::quad);
  for (std::size_t i = 0; i < a.couplings().size(); ++i) {
    EXPECT_NEAR(a[i] / c[i], 1.0, 1e-12);
    EXPECT_NEAR(b[i] / c[i], 1.0, 1e-15);
  }
}

// ---- invariants on randomized spectra --------------------------------------

TEST(InverseSolverProperties, PersymmetryZeroDiagonalAndWeights) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto spec = random_pst_spectrum(rng, 101);
    const auto measure = persymmetric_weights<double>(spec);
    const auto jm = jacobi_from_measure(measure);
    const std::size_t m = jm.off_diagonal.size();
    const double jmax = *std::max_element(jm.off_diagonal.begin(), jm.off_diagonal.end());
    for (std::size_t i = 0; i < m; ++i)
      ASSERT_LE(std::abs(jm.off_diagonal[i] - jm.off_diagonal[m - 1 - i]), 1e-10 * jmax) << "n=" << spec.size();
    for (double a : jm.diagonal) ASSERT_LE(std::abs(a), 1e-10 * jmax);

    const auto w = first_component_weights(jm.off_diagonal);
    for (std::size_t k = 0; k < spec.size(); ++k) ASSERT_NEAR(w[k], measure.weights[k], 1e-10);

    ASSERT_LE(roundtrip_error(spec), 1e-10);
  }
}

TEST(InverseSolverProperties, ScalingCovariance) {
  for (long long n : {5, 11, 31, 71}) {
    const auto spec = multiplet_spectrum(n, 2 < (n - 1) / 2 ? 2 : 1, 0);
    const auto base = jacobi_from_measure(persymmetric_weights<double>(spec));
    std::vector<long long> twice;
    for (long long v : spec.numerators()) twice.push_back(2 * v);
    const auto doubled = jacobi_from_measure(persymmetric_weights<double>(PstSpectrum(twice, 1)));
    std::vector<long long> triple;
    for (long long v : spec.numerators()) triple.push_back(3 * v);
    const auto tripled = jacobi_from_measure(persymmetric_weights<double>(PstSpectrum(triple, 1)));
    for (std::size_t i = 0; i < base.off_diagonal.size(); ++i) {
      // powers of two scale exactly in binary floating point
      EXPECT_EQ(doubled.off_diagonal[i], 2.0 * base.off_diagonal[i]);
      EXPECT_NEAR(tripled.off_diagonal[i] / base.off_diagonal[i], 3.0, 1e-15);
    }
  }
}

TEST(Precision, Parsing) {
  EXPECT_EQ(parse_precision("standard"), Precision::standard);
  EXPECT_EQ(parse_precision("extended"), Precision::extended);
  EXPECT_EQ(parse_precision("quad"), Precision::quad);
  EXPECT_THROW(parse_precision("single"), invalid_argument);
}
