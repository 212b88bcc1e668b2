#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pbsim/observables.hpp"
#include "pbsim/solvers.hpp"

using namespace pbsim;

TEST(Correlations, FockOneIsAntibunched) {
  const auto rho = fock_state(6, 1, "phonon");
  EXPECT_EQ(g_n(rho, 0, 2), 0.0);
  EXPECT_EQ(g_n(rho, 0, 3), 0.0);
  EXPECT_NEAR(mean_occupation(rho, 0), 1.0, 1e-15);
}

TEST(Correlations, CoherentIsPoissonian) {
  for (double a : {0.1, 0.7, 1.5}) {
    const auto rho = coherent_state(40, std::polar(a, 1.1), "phonon");
    for (int n = 2; n <= 4; ++n) EXPECT_NEAR(g_n(rho, 0, n), 1.0, 1e-10) << "a=" << a << " n=" << n;
  }
}

TEST(Correlations, ThermalFollowsFactorialLaw) {
  const auto rho = thermal_state(60, 0.3, "phonon");
  EXPECT_NEAR(g_n(rho, 0, 2), 2.0, 1e-9);
  EXPECT_NEAR(g_n(rho, 0, 3), 6.0, 1e-9);
  EXPECT_NEAR(g_n(rho, 0, 4), 24.0, 1e-9);
}

TEST(Correlations, TwoLevelSupportHasNoPairs) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double p1 = u(rng);
    Matrix m = Matrix::Zero(5, 5);
    m(0, 0) = 1 - p1 * 0.99;
    m(1, 1) = p1 * 0.99;
    EXPECT_EQ(g_n(DensityMatrix(HilbertSpace(5), m), 0, 2), 0.0);
  }
}

TEST(Correlations, InvariantUnderPhaseRotation) {
  OneCavityParams p;
  p.n_trunc = 8;
  p.delta = 0.05;
  const auto rho = steady_state(build_liouvillian(build_one_cavity_hamiltonian(p), one_cavity_channels(p)));
  const auto n_op = embed(number(8), rho.space(), 1).matrix();
  for (double theta : {0.3, 1.9, 4.0}) {
    const Matrix u = (Complex(0, theta) * n_op.diagonal()).array().exp().matrix().asDiagonal();
    const DensityMatrix rotated(rho.space(), u * rho.matrix() * u.adjoint());
    for (int n = 2; n <= 4; ++n) EXPECT_NEAR(g_n(rotated, 1, n) / g_n(rho, 1, n), 1.0, 1e-10);
  }
}

TEST(Correlations, Errors) {
  const auto vacuum = fock_state(4, 0);
  EXPECT_THROW(g_n(vacuum, 0, 2), UndefinedCorrelation);
  EXPECT_THROW(g_n(fock_state(4, 1), 0, 5), InvalidParameter);
  EXPECT_THROW(g_n(fock_state(4, 1), 1, 2), InvalidDimension);

  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1 - 1e-13;
  m(1, 1) = 1e-13;
  EXPECT_THROW(g_n(DensityMatrix(HilbertSpace(4), m), 0, 2), UndefinedCorrelation);
  EXPECT_NO_THROW(g_n(DensityMatrix(HilbertSpace(4), m), 0, 2, 1e-14));
}

TEST(SupermodeG2, SameAsGnOnMechanicalSlot) {
  TwoCavityParams p;
  p.n_trunc = 8;
  const auto rho =
      steady_state(build_liouvillian(build_two_cavity_hamiltonian_reduced(p), two_cavity_channels(p)));
  EXPECT_EQ(supermode_g2(rho), g_n(rho, 1, 2));
  EXPECT_THROW(supermode_g2(fock_state(3, 1, "phonon")), InvalidDimension);
}

TEST(SupermodeG2, WeakDriveAmplitudeOracle) {
  // Leading order in the drive: amplitudes of |g0>,|g1>,|e0>,|g2>,|e1> under the
  // non-hermitian H - i(kappa/2) s+s- - i(Gamma/2) b^dag b with C_g0 = 1.
  TwoCavityParams p;
  p.n_trunc = 6;
  p.eps = 1e-5;  // next order is ~eps^2 relative, enhanced near the G' = 0.5 cancellation
  for (double gp : {0.2, 0.3, 0.5, 0.8}) {
    p.n_plus = n_plus_for_coupling(p, gp);
    const double E = p.eps / std::numbers::sqrt2;
    const Complex i(0, 1);
    const double k = p.kappa, g = p.gamma_m;

    // One excitation: [-i g/2, -G'; -G', -i k/2] (C_g1, C_e0) = (-E, 0).
    Eigen::Matrix2cd a1;
    a1 << -i * g / 2.0, -gp, -gp, -i * k / 2.0;
    const Eigen::Vector2cd c1 = a1.partialPivLu().solve(Eigen::Vector2cd(-E, 0));
    const Complex c_g1 = c1(0), c_e0 = c1(1);

    // Two excitations: [-i g, -sqrt2 G'; -sqrt2 G', -i (k + g)/2] (C_g2, C_e1) = (-sqrt2 E C_g1, -E C_e0).
    Eigen::Matrix2cd a2;
    a2 << -i * g, -std::numbers::sqrt2 * gp, -std::numbers::sqrt2 * gp, -i * (k + g) / 2.0;
    const Eigen::Vector2cd c2 = a2.partialPivLu().solve(Eigen::Vector2cd(-std::numbers::sqrt2 * E * c_g1, -E * c_e0));
    const double oracle = 2.0 * std::norm(c2(0)) / std::pow(std::norm(c_g1), 2);

    const auto rho =
        steady_state(build_liouvillian(build_two_cavity_hamiltonian_reduced(p), two_cavity_channels(p)));
    EXPECT_NEAR(supermode_g2(rho) / oracle, 1.0, 1e-3) << "G'=" << gp;
    EXPECT_NEAR(mean_occupation(rho, 1) / std::norm(c_g1), 1.0, 1e-3) << "G'=" << gp;
  }
}

TEST(Classify, TableExamples) {
  auto a = classify(0.5, 0.1, 0.3);
  EXPECT_EQ(a.region, Region::standard_pb);
  EXPECT_EQ(a.ordering, "1>g2>g4>g3");
  EXPECT_EQ(table_region(a.ordering), 'A');

  auto c = classify(0.9, 0.2, 1.5);
  EXPECT_EQ(c.region, Region::non_standard_pb);
  EXPECT_EQ(c.ordering, "g4>1>g2>g3");
  EXPECT_EQ(table_region(c.ordering), 'C');

  auto f = classify(2, 3, 4);
  EXPECT_EQ(f.region, Region::phonon_induced_tunneling);
  EXPECT_EQ(f.ordering, "g4>g3>g2>1");
  EXPECT_EQ(table_region(f.ordering), 'F');
}

TEST(Classify, WeakTunnelingFlagAndUnclassified) {
  EXPECT_EQ(classify(2, 3, 2.5).region, Region::unclassified);
  EXPECT_EQ(classify(2, 3, 2.5, true).region, Region::phonon_induced_tunneling);
  EXPECT_EQ(classify(3, 2, 4).region, Region::unclassified);
  EXPECT_EQ(classify(1, 1, 1).ordering, "1=g2=g3=g4");
  EXPECT_THROW(classify(-0.1, 1, 1), InvalidParameter);
  EXPECT_FALSE(table_region("g2>1>g3>g4").has_value());
}

TEST(Classify, TotalAndConsistentWithPredicates) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 5000; ++k) {
    const double g2 = u(rng), g3 = u(rng), g4 = u(rng);
    const auto c = classify(g2, g3, g4);
    const bool standard = g2 < 1 && g3 < 1 && g4 < 1;
    const bool non_standard = g2 < 1 && (g3 > 1 || g4 > 1);
    const bool tunneling = g4 > g3 && g3 > g2 && g2 > 1;
    ASSERT_LE(int(standard) + int(non_standard) + int(tunneling), 1);
    const Region expected = standard       ? Region::standard_pb
                            : non_standard ? Region::non_standard_pb
                            : tunneling    ? Region::phonon_induced_tunneling
                                           : Region::unclassified;
    EXPECT_EQ(c.region, expected);
    EXPECT_EQ(c.ordering.size(), std::string("1>g2>g3>g4").size());
  }
}

TEST(Classify, LabelsRoundTrip) {
  for (auto r : {Region::standard_pb, Region::non_standard_pb, Region::phonon_induced_tunneling, Region::unclassified})
    EXPECT_EQ(region_from_string(to_string(r)), r);
  EXPECT_FALSE(region_from_string("error").has_value());
}

TEST(CorrelationReport, FieldsAgree) {
  OneCavityParams p;
  p.n_trunc = 10;
  p.omega_drive = 46.7;
  p.delta = 0.2;
  const auto rho = steady_state(build_liouvillian(build_one_cavity_hamiltonian(p), one_cavity_channels(p)));
  const auto r = correlation_report(rho, 1);
  EXPECT_EQ(r.g2, g_n(rho, 1, 2));
  EXPECT_EQ(r.g4, g_n(rho, 1, 4));
  EXPECT_EQ(r.ordering, classify(r.g2, r.g3, r.g4).ordering);
  EXPECT_GE(r.mean_phonon, 0.0);
}
