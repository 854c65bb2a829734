#include "qtnn/entanglement.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qtnn;

namespace {

Amplitudes random_pure(std::mt19937_64& rng) {
  std::normal_distribution<real> g;
  return normalize({cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
}

// Ginibre ensemble: G G^+ / Tr with G of the given column count.
DensityMatrix random_mixed(std::mt19937_64& rng, int rank = 4) {
  std::normal_distribution<real> g;
  Eigen::Matrix<cplx, 4, Eigen::Dynamic> a(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = cplx(g(rng), g(rng));
  Mat4 m = a * a.adjoint();
  m /= m.trace().real();
  return DensityMatrix::from_matrix(hermitian_part(m));
}

Mat2 random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<real> g;
  Mat2 m;
  m << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
  return Eigen::HouseholderQR<Mat2>(m).householderQ();
}

// Largest squared Schmidt coefficient from the singular values of the 2x2
// amplitude matrix.
real schmidt_max_weight(const Amplitudes& psi) {
  Mat2 m;
  m << psi[0], psi[1], psi[2], psi[3];
  const real s = Eigen::JacobiSVD<Mat2>(m).singularValues()(0);
  return s * s;
}

real pure_concurrence(const Amplitudes& psi) { return 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]); }

DensityMatrix ket(std::array<cplx, 4> v) { return density_from_pure(normalize(v)); }

}  // namespace

TEST(Concurrence, CatalogValues) {
  EXPECT_NEAR(concurrence(catalog("bell")), 1.0, 1e-9);
  EXPECT_NEAR(concurrence(catalog("epr")), 1.0, 1e-9);
  EXPECT_NEAR(concurrence(catalog("flat")), 0.0, 1e-9);
  EXPECT_NEAR(concurrence(catalog("C")), 0.0, 1e-9);
  EXPECT_NEAR(concurrence(catalog("P")), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(concurrence(catalog("M")), 0.0, 1e-9);
}

TEST(Concurrence, MatchesPureStateClosedForm) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const Amplitudes a = random_pure(rng);
    EXPECT_NEAR(concurrence(density_from_pure(a)), pure_concurrence(a), 1e-9);
  }
}

TEST(Concurrence, ProductStatesAreZero) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<real> u(0, PI);
  for (int k = 0; k < 50; ++k) {
    const ProductStateParams p{u(rng), 2 * u(rng), u(rng), 2 * u(rng)};
    EXPECT_NEAR(concurrence(p.density()), 0.0, 1e-9);
  }
}

TEST(Concurrence, WernerStateThreshold) {
  // p |Bell><Bell| + (1 - p) I/4 has C = max(0, (3p - 1)/2)
  for (real p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const Mat4 m = p * catalog("bell").matrix() + (1 - p) * 0.25 * Mat4::Identity();
    EXPECT_NEAR(concurrence(DensityMatrix::from_matrix(m)), std::max(0.0, (3 * p - 1) / 2), 1e-9) << p;
  }
}

TEST(Concurrence, LocalUnitaryInvariance) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix rho = k % 2 ? random_mixed(rng, 2) : density_from_pure(random_pure(rng));
    const Mat4 u = kron(random_unitary(rng), random_unitary(rng));
    const DensityMatrix moved = DensityMatrix::from_matrix(hermitian_part(u * rho.matrix() * u.adjoint()));
    EXPECT_NEAR(concurrence(rho), concurrence(moved), 1e-10);
  }
}

TEST(Entropy, BellFamilyIsOneBit) {
  for (real d : {0.0, 0.3, PI / 2, 2.0})
    EXPECT_NEAR(entanglement_entropy(*catalog_entry("bell", {0.5, d}).pure), 1.0, 1e-12);
}

TEST(Entropy, ProductStatesAreZero) {
  EXPECT_NEAR(entanglement_entropy(*catalog_entry("flat").pure), 0.0, 1e-12);
  for (real g : {0.1, 0.5, 3.0}) EXPECT_NEAR(entanglement_entropy(*catalog_entry("C", {g, 0}).pure), 0.0, 1e-12);
}

TEST(Entropy, PClosedForm) {
  const real l1 = (1 + std::sqrt(5.0) / 3) / 2, l2 = (1 - std::sqrt(5.0) / 3) / 2;
  const real expected = -l1 * std::log2(l1) - l2 * std::log2(l2);
  EXPECT_NEAR(entanglement_entropy(*catalog_entry("P").pure), expected, 1e-12);
  EXPECT_NEAR(expected, 0.5500, 1e-4);
  EXPECT_NEAR(entanglement_entropy(*catalog_entry("P").pure, LogBase::Nats), expected * std::log(2.0), 1e-12);
}

TEST(Entropy, MixedInputRejectedAtExtraction) {
  EXPECT_THROW(entanglement_entropy(catalog("M")), InvalidState);
  EXPECT_NEAR(entanglement_entropy(catalog("bell")), 1.0, 1e-12);
}

TEST(Entropy, BothReductionsAgreeForPureStates) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const Amplitudes a = random_pure(rng);
    const Mat4 rho = a.vec() * a.vec().adjoint();
    const auto ea = Eigen::SelfAdjointEigenSolver<Mat2>(reduced_a(rho)).eigenvalues();
    const auto eb = Eigen::SelfAdjointEigenSolver<Mat2>(reduced_b(rho)).eigenvalues();
    EXPECT_NEAR(ea(0), eb(0), 1e-12);
    EXPECT_NEAR(max_schmidt_weight(a), schmidt_max_weight(a), 1e-12);
  }
}

TEST(VonNeumann, KnownSpectra) {
  EXPECT_NEAR(von_neumann_entropy(catalog("bell")), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(catalog("M")), 1.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::from_matrix(0.25 * Mat4::Identity())), 2.0, 1e-12);
}

TEST(RelativeEntropy, ClosedForms) {
  const DensityMatrix bell = catalog("bell");
  EXPECT_NEAR(relative_entropy(bell, bell), 0.0, 1e-12);
  EXPECT_NEAR(relative_entropy(bell, DensityMatrix::from_matrix(0.25 * Mat4::Identity())), 2.0, 1e-12);
  EXPECT_NEAR(relative_entropy(bell, catalog("M")), 1.0, 1e-9);
  EXPECT_NEAR(relative_entropy(bell, catalog("M"), LogBase::Nats), std::log(2.0), 1e-9);
}

TEST(RelativeEntropy, SupportMismatchIsInfinite) {
  EXPECT_TRUE(std::isinf(relative_entropy(catalog("bell"), catalog("ket00"))));
  EXPECT_TRUE(std::isinf(relative_entropy(catalog("M"), catalog("ket00"))));
  // the reverse direction is finite: |00> lies inside the support of M
  EXPECT_NEAR(relative_entropy(catalog("ket00"), catalog("M")), 1.0, 1e-12);
}

TEST(RelativeEntropy, PositiveOnRandomPairs) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const DensityMatrix a = random_mixed(rng), b = random_mixed(rng);
    EXPECT_GT(relative_entropy(a, b), 1e-6);
    EXPECT_NEAR(relative_entropy(a, a), 0.0, 1e-10);
  }
}

TEST(Bures, ClosedForms) {
  const DensityMatrix bell = catalog("bell");
  EXPECT_NEAR(bures_distance(bell, bell), 0.0, 1e-7);
  EXPECT_NEAR(bures_distance(bell, catalog("flat")), 2.0 - std::sqrt(2.0), 1e-7);  // overlap 1/2
  EXPECT_NEAR(bures_distance(bell, catalog("ket00")), 2.0 - std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(bures_distance(bell, catalog("epr")), 2.0, 1e-7);  // orthogonal
}

TEST(Bures, PurePairsUseOverlap) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const Amplitudes a = random_pure(rng), b = random_pure(rng);
    const real overlap = std::abs(a.vec().dot(b.vec()));
    EXPECT_NEAR(bures_distance(density_from_pure(a), density_from_pure(b)), 2.0 - 2.0 * overlap, 1e-7);
  }
}

TEST(Fidelity, Symmetric) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix a = random_mixed(rng, 1 + k % 4), b = random_mixed(rng);
    EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-10);
    EXPECT_LE(fidelity(a, b), 1.0);
  }
}

TEST(PartialTranspose, BellHasNegativeHalf) {
  EXPECT_NEAR(partial_transpose_min_eigenvalue(catalog("bell")), -0.5, 1e-12);
  EXPECT_FALSE(ppt_separable(catalog("bell")));
  EXPECT_FALSE(ppt_separable(catalog("P")));
  EXPECT_TRUE(ppt_separable(catalog("M")));
  EXPECT_TRUE(ppt_separable(catalog("flat")));
}

TEST(PartialTranspose, IsAnInvolution) {
  std::mt19937_64 rng(8);
  const Mat4 m = random_mixed(rng).matrix();
  EXPECT_EQ(partial_transpose_b(partial_transpose_b(m)), m);
}

TEST(PartialTranspose, AgreesWithConcurrence) {
  std::mt19937_64 rng(9);
  for (const auto& n : catalog_names()) {
    const DensityMatrix rho = catalog(n);
    EXPECT_EQ(ppt_separable(rho), concurrence(rho) < 1e-9) << n;
  }
  int entangled = 0;
  for (int k = 0; k < 300; ++k) {
    const DensityMatrix rho = random_mixed(rng, 1 + k % 4);
    const real c = concurrence(rho);
    // skip samples sitting on the separability boundary
    if ((c > 0.0 && c < 1e-6) || std::abs(partial_transpose_min_eigenvalue(rho)) < 1e-8) continue;
    if (c > 0.0) ++entangled;
    EXPECT_EQ(ppt_separable(rho), c == 0.0) << "sample " << k << " C=" << c;
  }
  EXPECT_GT(entangled, 10);
}

TEST(NearestProduct, CatalogBures) {
  const OracleResult bell = nearest_product(catalog("bell"), Metric::Bures);
  EXPECT_NEAR(bell.value, 2.0 - std::sqrt(2.0), 1e-7);
  const OracleResult flat = nearest_product(catalog("flat"), Metric::Bures);
  EXPECT_NEAR(flat.value, 0.0, 1e-7);
  ASSERT_TRUE(flat.witness);
  EXPECT_NEAR(flat.witness->theta_a, PI / 2, 1e-6);
  EXPECT_NEAR(flat.witness->phi_a, 0.0, 1e-6);
  const OracleResult p = nearest_product(catalog("P"), Metric::Bures);
  const real lmax = (1 + std::sqrt(5.0) / 3) / 2;
  EXPECT_NEAR(lmax, 0.87268, 1e-5);
  EXPECT_NEAR(p.value, 2.0 - 2.0 * std::sqrt(lmax), 1e-7);
  EXPECT_NEAR(p.value, 0.1316, 1e-4);
}

TEST(NearestProduct, SeparableCatalogStatesSitOnTheSet) {
  for (const auto& n : catalog_names()) {
    const DensityMatrix rho = catalog(n);
    const real d = nearest_product(rho, Metric::Bures).value;
    if (n == "flat" || n == "C" || n == "ket00") EXPECT_LE(d, 1e-7) << n;
    if (n == "bell" || n == "epr" || n == "P") EXPECT_GT(d, 0.1) << n;
  }
}

TEST(NearestProduct, MatchesSchmidtClosedFormOnRandomPureStates) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    const Amplitudes a = random_pure(rng);
    const real expected = 2.0 - 2.0 * std::sqrt(schmidt_max_weight(a));
    EXPECT_NEAR(nearest_product(density_from_pure(a), Metric::Bures).value, expected, 1e-7) << "sample " << k;
  }
}

TEST(NearestProduct, WitnessAchievesTheValue) {
  const DensityMatrix rho = ket({0.3, cplx(0.2, 0.5), 0.7, -0.1});
  const OracleResult r = nearest_product(rho, Metric::Bures);
  EXPECT_NEAR(bures_distance(rho, r.witness->density()), r.value, 1e-12);
}

TEST(NearestProduct, RelativeEntropyFlagsInfinityWithSmoothedDiagnostic) {
  const OracleResult r = nearest_product(catalog("bell"), Metric::RelativeEntropyBits);
  EXPECT_TRUE(r.infinite);
  ASSERT_TRUE(r.smoothed);
  EXPECT_TRUE(std::isfinite(*r.smoothed));
  // a product input is its own witness, so the divergence disappears
  const OracleResult flat = nearest_product(catalog("flat"), Metric::RelativeEntropyBits);
  EXPECT_FALSE(flat.infinite);
  EXPECT_NEAR(flat.value, 0.0, 1e-6);
}

TEST(NearestProduct, RejectsUnsupportedMetricsAndIsDeterministic) {
  EXPECT_THROW(nearest_product(catalog("bell"), Metric::Concurrence), std::invalid_argument);
  NearestProductOptions none;
  none.starts = 0;
  EXPECT_THROW(nearest_product(catalog("bell"), Metric::Bures, none), std::invalid_argument);
  const OracleResult a = nearest_product(catalog("P"), Metric::Bures), b = nearest_product(catalog("P"), Metric::Bures);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.witness->theta_a, b.witness->theta_a);
}

TEST(ProductParams, AnglesRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<real> th(0.05, PI - 0.05), ph(0.0, 2 * PI);
  for (int k = 0; k < 50; ++k) {
    const real t = th(rng), p = ph(rng);
    const Vec2 v = ProductStateParams::qubit(t, p) * std::polar(1.0, 0.9);  // extra global phase
    const auto [t2, p2] = ProductStateParams::angles_of(v);
    EXPECT_NEAR(t2, t, 1e-12);
    EXPECT_NEAR(std::remainder(p2 - p, 2 * PI), 0.0, 1e-12);
  }
}
