#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include "pbsim/hilbert.hpp"

using namespace pbsim;

namespace {

Matrix random_matrix(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

DensityMatrix random_state(const HilbertSpace& space, std::mt19937& rng) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  const Matrix a = random_matrix(n, rng);
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return {space, rho};
}

std::vector<double> sorted_real_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(HilbertSpace, RejectsBadShapes) {
  EXPECT_THROW(HilbertSpace({2, 1}, {"a", "b"}), InvalidDimension);
  EXPECT_THROW(HilbertSpace({2, 3}, {"a"}), InvalidDimension);
  EXPECT_THROW(HilbertSpace({2, 3}, {"a", "a"}), InvalidDimension);
  EXPECT_THROW(HilbertSpace(std::vector<std::size_t>{}, std::vector<std::string>{}), InvalidDimension);
}

TEST(HilbertSpace, TotalDimensionAndLookup) {
  HilbertSpace s({2, 5, 3}, {"atom", "phonon", "extra"});
  EXPECT_EQ(s.total_dim(), 30u);
  EXPECT_EQ(s.index_of("phonon"), 1u);
  EXPECT_THROW(s.index_of("cavity"), InvalidDimension);
}

TEST(Annihilation, SmallCases) {
  const Matrix a2 = annihilation(2).matrix();
  EXPECT_EQ(a2, (Matrix(2, 2) << 0, 1, 0, 0).finished());

  const Matrix a3 = annihilation(3).matrix();
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 1) = 1.0;
  expected(1, 2) = std::sqrt(2.0);
  EXPECT_EQ(a3, expected);

  EXPECT_THROW(annihilation(1), InvalidDimension);
}

TEST(Annihilation, NumberOperatorIsDiagonal) {
  for (std::size_t n : {2u, 5u, 15u}) {
    const Matrix num = (creation(n) * annihilation(n)).matrix();
    Matrix expected = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) expected(k, k) = static_cast<double>(k);
    EXPECT_LT(max_abs(num - expected), 1e-14) << "N=" << n;
    EXPECT_LT(max_abs(number(n).matrix() - expected), 1e-14);
  }
}

TEST(Annihilation, AdjointIsCreation) {
  for (std::size_t n = 2; n <= 20; ++n) EXPECT_EQ(annihilation(n).adjoint().matrix(), creation(n).matrix());
}

TEST(Pauli, AlgebraOnGroundExcitedBasis) {
  const auto [sp, sm, sz] = pauli_ops();
  EXPECT_EQ(sp.matrix()(1, 0), Complex(1.0));
  EXPECT_EQ(max_abs((sp * sm + sm * sp).matrix() - Matrix::Identity(2, 2)), 0.0);
  EXPECT_EQ(max_abs(commutator(sp, sm).matrix() - sz.matrix()), 0.0);

  Vector e(2), g(2);
  e << 0, 1;
  g << 1, 0;
  EXPECT_EQ(sm.matrix() * e, g);
  EXPECT_EQ(sz.matrix()(0, 0), Complex(-1.0));
  EXPECT_EQ(sz.matrix()(1, 1), Complex(1.0));
}

TEST(Embed, IdentityAndTrace) {
  const HilbertSpace s25({2, 5}, {"atom", "phonon"});
  EXPECT_EQ(embed(identity(2, "atom"), s25, 0).matrix(), Matrix::Identity(10, 10));

  const HilbertSpace s23({2, 3}, {"atom", "phonon"});
  EXPECT_EQ(embed(pauli_ops().sigma_z, s23, 0).matrix().trace(), Complex(0.0));
}

TEST(Embed, DisjointSlotsCommute) {
  const HilbertSpace s({2, 4}, {"atom", "phonon"});
  const auto b = embed(annihilation(4), s, 1);
  const auto sm = embed(pauli_ops().sigma_minus, s, 0);
  EXPECT_LT(max_abs(commutator(b, sm).matrix()), 1e-13);
  EXPECT_LT(max_abs(commutator(b.adjoint(), sm).matrix()), 1e-13);
}

TEST(Embed, AtomIsSlowestIndex) {
  // |e, n> sits at index 1 * N + n.
  const std::size_t N = 4;
  const HilbertSpace s({2, N}, {"atom", "phonon"});
  const auto sp = embed(pauli_ops().sigma_plus, s, 0);
  const auto bd = embed(creation(N), s, 1);
  for (std::size_t n = 0; n < N; ++n) EXPECT_EQ(sp.matrix()(N + n, n), Complex(1.0));
  EXPECT_EQ(bd.matrix()(1, 0), Complex(1.0));
  EXPECT_EQ(bd.matrix()(N + 1, N), Complex(1.0));
}

TEST(Embed, MismatchThrows) {
  const HilbertSpace s({2, 4}, {"atom", "phonon"});
  EXPECT_THROW(embed(annihilation(3), s, 1), InvalidEmbedding);
  EXPECT_THROW(embed(annihilation(4), s, 2), InvalidEmbedding);
}

TEST(Embed, PreservesSpectrumWithMultiplicity) {
  std::mt19937 rng(7);
  const HilbertSpace s({3, 4, 2}, {"a", "b", "c"});
  for (std::size_t pos = 0; pos < 3; ++pos) {
    const auto n = static_cast<Eigen::Index>(s.dim(pos));
    Matrix a = random_matrix(n, rng);
    a = (a + a.adjoint()).eval();
    const auto local = sorted_real_eigenvalues(a);
    const auto full = sorted_real_eigenvalues(embed(Operator(HilbertSpace(s.dim(pos)), a), s, pos).matrix());
    const std::size_t mult = s.total_dim() / s.dim(pos);
    ASSERT_EQ(full.size(), local.size() * mult);
    for (std::size_t k = 0; k < full.size(); ++k) EXPECT_NEAR(full[k], local[k / mult], 1e-12);
  }
}

TEST(Expectation, Examples) {
  std::mt19937 rng(3);
  const HilbertSpace s({2, 6}, {"atom", "phonon"});
  const auto rho = random_state(s, rng);
  EXPECT_NEAR(std::abs(expectation(identity(s), rho) - 1.0), 0.0, 1e-12);

  const auto fock2 = fock_state(6, 2);
  EXPECT_NEAR(expectation(number(6), fock2).real(), 2.0, 1e-14);

  EXPECT_THROW(expectation(number(5), fock2), InvalidDimension);
}

TEST(Expectation, CoherentStateOccupation) {
  // With N >= |alpha|^2 + 8|alpha| the dropped Poisson tail is below 1e-9.
  for (double a : {0.3, 1.0, 2.0}) {
    const Complex alpha = std::polar(a, 0.7);
    const auto N = static_cast<std::size_t>(std::ceil(a * a + 8 * a)) + 4;
    const auto rho = coherent_state(N, alpha);
    EXPECT_NEAR(expectation(number(N), rho).real(), a * a, 1e-8 * a * a) << "alpha=" << a;
    EXPECT_LT(std::abs(expectation(number(N), rho).imag()), 1e-9);
  }
}

TEST(Expectation, LinearInBothArguments) {
  std::mt19937 rng(11);
  const HilbertSpace s({2, 3}, {"atom", "phonon"});
  const Operator a(s, random_matrix(6, rng));
  const Operator b(s, random_matrix(6, rng));
  const auto r1 = random_state(s, rng);
  const auto r2 = random_state(s, rng);
  const Complex c(0.3, -1.2);
  EXPECT_LT(std::abs(expectation(a + c * b, r1) - (expectation(a, r1) + c * expectation(b, r1))), 1e-12);
  const DensityMatrix mix(s, 0.25 * r1.matrix() + 0.75 * r2.matrix());
  EXPECT_LT(std::abs(expectation(a, mix) - (0.25 * expectation(a, r1) + 0.75 * expectation(a, r2))), 1e-12);
}

TEST(DensityMatrix, Validation) {
  const HilbertSpace s(3);
  Matrix m = Matrix::Identity(3, 3) / 3.0;
  EXPECT_NO_THROW(DensityMatrix(s, m));

  Matrix not_herm = m;
  not_herm(0, 1) = Complex(0.0, 1e-6);
  EXPECT_THROW(DensityMatrix(s, not_herm), InvalidState);

  EXPECT_THROW(DensityMatrix(s, Matrix(2.0 * m)), InvalidState);

  Matrix negative = Matrix::Zero(3, 3);
  negative(0, 0) = 1.1;
  negative(1, 1) = -0.1;
  EXPECT_THROW(DensityMatrix(s, negative), InvalidState);

  EXPECT_THROW(DensityMatrix(s, Matrix::Identity(4, 4) / 4.0), InvalidDimension);
}

TEST(DensityMatrix, BasisStateIndexing) {
  const HilbertSpace s({2, 5}, {"atom", "phonon"});
  const auto rho = DensityMatrix::basis_state(s, {1, 3});
  EXPECT_EQ(rho.matrix()(8, 8), Complex(1.0));
  EXPECT_THROW(DensityMatrix::basis_state(s, {2, 0}), InvalidDimension);
}

TEST(DensityMatrix, TensorMatchesKronecker) {
  const auto a = DensityMatrix::basis_state(HilbertSpace(2, "atom"), {1});
  const auto b = thermal_state(4, 0.5, "phonon");
  const auto ab = tensor(a, b);
  EXPECT_EQ(ab.space().labels(), (std::vector<std::string>{"atom", "phonon"}));
  EXPECT_LT(max_abs(ab.matrix() - Matrix(Eigen::kroneckerProduct(a.matrix(), b.matrix()))), 1e-15);
}

TEST(TimeDependentOperator, EvaluatesTerms) {
  const HilbertSpace s(2, "atom");
  const auto [sp, sm, sz] = pauli_ops();
  TimeDependentOperator h{sz};
  h.terms.push_back({sp, [](double t) { return Complex(t, 0.0); }});
  EXPECT_FALSE(h.is_static());
  EXPECT_EQ(h.at(2.0).matrix()(1, 0), Complex(2.0));
  EXPECT_EQ(h.at(2.0).matrix()(1, 1), Complex(1.0));
}
