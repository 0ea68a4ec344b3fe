#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "z2edge/operator_core.hpp"

using namespace z2edge;

namespace {

Matrix random_hermitian(int n, std::mt19937_64& rng) {
  const Matrix m = oracle::random_matrix(n, n, rng);
  return 0.5 * (m + m.adjoint());
}

// Odd antiunitary T conj with T = Q J Q^T for a random unitary Q; then
// T conj(T) = Q J J Q^dag = -1.
AntiUnitary random_odd(int pairs, std::mt19937_64& rng) {
  const Matrix q = oracle::random_unitary(2 * pairs, rng);
  return AntiUnitary(q * oracle::odd_form(pairs) * q.transpose());
}

}  // namespace

TEST_CASE("operator wrappers reject inputs that break their contract") {
  Matrix m(2, 2);
  m << 1, 2, 0, 1;
  CHECK_THROWS_AS(HermitianOperator{m}, InvalidArgument);
  CHECK_THROWS_AS(UnitaryOperator{m}, InvalidArgument);
  CHECK_THROWS_AS(ProjectionOperator{m}, InvalidArgument);
  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = 1.0;
  p(2, 2) = 1.0;
  CHECK(ProjectionOperator(p).rank() == 2);
}

TEST_CASE("standard odd form squares to minus one under conjugation") {
  const Matrix j = standard_odd_form(3);
  CHECK(frobenius(j - oracle::odd_form(3)) == 0.0);
  const AntiUnitary theta(j);
  CHECK(theta.parity() == -1);
  CHECK(AntiUnitary(Matrix::Identity(4, 4)).parity() == 1);
}

TEST_CASE("antiunitary application is antilinear and conjugation matches") {
  std::mt19937_64 rng(7);
  const AntiUnitary theta = random_odd(3, rng);
  const Vector v = oracle::random_matrix(6, 1, rng).col(0);
  const cplx i(0.0, 1.0);
  CHECK((theta.apply(i * v) + i * theta.apply(v)).norm() < 1e-12);
  CHECK((theta.apply(theta.apply(v)) + v).norm() < 1e-12);

  // theta M theta^{-1} w with theta^{-1} w = conj(T^dag w).
  const Matrix m = oracle::random_matrix(6, 6, rng);
  const Vector w = oracle::random_matrix(6, 1, rng).col(0);
  const Vector inv = (theta.unitary_part().adjoint() * w).conjugate();
  const Vector direct = theta.apply(m * inv);
  CHECK((conjugate_by_antiunitary(theta, m) * w - direct).norm() < 1e-12);
}

TEST_CASE("functional calculus reproduces polynomials") {
  std::mt19937_64 rng(3);
  const Matrix h = random_hermitian(8, rng);
  const SpectralDecomposition s = spectral_decomposition(h);
  CHECK(frobenius(s.reconstruct() - h) < 1e-11);
  const Matrix sq = functional_calculus(s, [](double x) { return cplx(x * x); });
  CHECK(frobenius(sq - h * h) < 1e-10);
  const Matrix u = functional_calculus(s, [](double x) { return std::polar(1.0, x); });
  CHECK(frobenius(u * u.adjoint() - Matrix::Identity(8, 8)) < 1e-11);
  CHECK_THROWS_AS(functional_calculus(s, [](double) { return cplx(NAN, 0.0); }),
                  NumericalError);
}

TEST_CASE("kramers basis pairs theta-invariant subspaces") {
  std::mt19937_64 rng(11);
  const AntiUnitary theta = random_odd(10, rng);
  for (int k : {1, 3, 6}) {
    Matrix seed = oracle::random_matrix(20, k, rng);
    Matrix span(20, 2 * k);
    span << seed, theta.apply_columns(seed);
    const Matrix b = kramers_basis(theta, span);
    CHECK(b.cols() == 2 * k);
    CHECK(frobenius(b.adjoint() * b - Matrix::Identity(2 * k, 2 * k)) < 1e-10);
    for (int p = 0; p < k; ++p) {
      CHECK((theta.apply(b.col(2 * p)) - b.col(2 * p + 1)).norm() < 1e-9);
    }
    CHECK(subspace_distance(b, orthonormalize(span)) < 1e-9);
  }
  CHECK_THROWS_AS(kramers_basis(theta, oracle::random_matrix(20, 3, rng)),
                  InvalidArgument);
  CHECK_THROWS_AS(kramers_basis(AntiUnitary(Matrix::Identity(20, 20)),
                                oracle::random_matrix(20, 2, rng)),
                  InvalidArgument);
}

TEST_CASE("unitary part of a normal operator with a kernel") {
  std::mt19937_64 rng(5);
  const Matrix q = oracle::random_unitary(6, rng);
  Vector d(6);
  d << cplx(2.0, 1.0), cplx(-1.0, 0.5), cplx(0.0, 3.0), 0.0, 0.0, cplx(0.3, -0.4);
  const Matrix x = q * d.asDiagonal() * q.adjoint();
  const UnitaryPart up = unitary_part(x, 1e-6);
  CHECK(up.kernel_basis.cols() == 2);
  CHECK(up.range_basis.cols() == 4);
  Vector phase(6);
  for (int i = 0; i < 6; ++i) phase(i) = std::abs(d(i)) > 0 ? d(i) / std::abs(d(i)) : 0.0;
  CHECK(frobenius(up.unitary - q * phase.asDiagonal() * q.adjoint()) < 1e-10);
  // Tolerance inside the singular value cluster is rejected.
  CHECK_THROWS(unitary_part(x, 0.4));
}

TEST_CASE("schatten norms match brute-force singular values") {
  std::mt19937_64 rng(9);
  const Matrix m = oracle::random_matrix(7, 7, rng);
  const Eigen::VectorXd s = oracle::singular_values(m);
  CHECK(schatten_norm(m, 1.0) == doctest::Approx(s.sum()).epsilon(1e-10));
  CHECK(schatten_norm(m, 2.0) == doctest::Approx(frobenius(m)).epsilon(1e-10));
  CHECK(operator_norm(m) == doctest::Approx(s.maxCoeff()).epsilon(1e-10));
}

TEST_CASE("phase relation on the circle |z - 1/2| = 1/2 shifted to lambda") {
  // lambda = z - 1 with z on the circle; mu = z / |z| - 1. Near lambda = 0
  // the moduli agree to third order.
  double worst = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double t = 0.002 * i;
    const cplx z = 0.5 + 0.5 * std::polar(1.0, t);
    const cplx lambda = z - 1.0;
    const cplx mu = mu_from_lambda(lambda);
    worst = std::max(worst, std::abs(std::abs(mu) - std::abs(lambda)) /
                                std::pow(std::abs(lambda), 2));
  }
  CHECK(worst < 0.1);
  CHECK_THROWS_AS(mu_from_lambda(cplx(-1.0, 0.0)), InvalidArgument);
}

TEST_CASE("eigen clusters and orthonormalization") {
  RealVector v(5);
  v << -1.0, 0.0, 1e-9, 0.5, 1.0;
  CHECK(eigen_cluster(v, 0.0, 1e-6) == std::vector<Index>{1, 2});
  Matrix m(3, 3);
  m << 1, 2, 3, 0, 0, 0, 1, 2, 3;
  CHECK(orthonormalize(m).cols() == 1);
}
