#pragma once

// Dense complex operator substrate: checked operator wrappers, antiunitary
// algebra, Hermitian spectral decomposition and functional calculus, Kramers
// bases, unitary parts of normal operators and Schatten norms.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace z2edge {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical identity that should hold fails beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Default tolerances. Every routine that checks an invariant takes an
// override.
struct Tolerances {
  double hermitian = 1e-12;  // relative
  double unitary = 1e-10;
  double normal = 1e-9;      // relative to ||X||^2
  double projection = 1e-8;
  double parity = 1e-10;
};

// Residual norms below are Frobenius norms. They bound the operator norm from
// above, so a passing check is never weaker than the operator-norm version.
double frobenius(const Matrix& m);
double operator_norm(const Matrix& m);

class HermitianOperator {
 public:
  HermitianOperator(Matrix matrix, std::string label = {},
                    double tol = Tolerances{}.hermitian);

  const Matrix& matrix() const { return matrix_; }
  Index dimension() const { return matrix_.rows(); }
  const std::string& label() const { return label_; }

 private:
  Matrix matrix_;
  std::string label_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(Matrix matrix, double tol = Tolerances{}.unitary);

  const Matrix& matrix() const { return matrix_; }
  Index dimension() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
};

class ProjectionOperator {
 public:
  explicit ProjectionOperator(Matrix matrix,
                              double tol = Tolerances{}.projection);

  const Matrix& matrix() const { return matrix_; }
  Index dimension() const { return matrix_.rows(); }
  Index rank() const { return rank_; }

 private:
  Matrix matrix_;
  Index rank_ = 0;
};

// theta(v) = T conj(v), with conjugation in the standard coordinate basis.
// A change of basis B transforms the unitary part as T -> B^dag T conj(B).
class AntiUnitary {
 public:
  explicit AntiUnitary(Matrix unitary_part,
                       double tol = Tolerances{}.unitary);

  const Matrix& unitary_part() const { return unitary_part_; }
  Index dimension() const { return unitary_part_.rows(); }

  // +1 or -1 when T conj(T) is that multiple of the identity, 0 otherwise.
  int parity(double tol = Tolerances{}.parity) const;
  bool is_odd(double tol = Tolerances{}.parity) const {
    return parity(tol) == -1;
  }

  Vector apply(const Vector& v) const;
  // Applies theta to every column.
  Matrix apply_columns(const Matrix& columns) const;

  // The antiunitary U o theta, unitary part U T.
  AntiUnitary after(const Matrix& unitary) const;
  // Representation in the orthonormal basis given by the columns of B.
  AntiUnitary in_basis(const Matrix& basis) const;

 private:
  Matrix unitary_part_;
};

// Returns theta M theta^* = T conj(M) T^dag.
Matrix conjugate_by_antiunitary(const AntiUnitary& theta, const Matrix& m);

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns

  Index dimension() const { return eigenvalues.size(); }
  Matrix reconstruct() const;
  // Orthonormal basis of the eigenvectors with indices in `which`.
  Matrix columns(const std::vector<Index>& which) const;
};

// Diagonalizes the Hermitian part (M + M^dag)/2. Degenerate clusters are
// returned with orthonormal columns.
SpectralDecomposition spectral_decomposition(const Matrix& hermitian);
SpectralDecomposition spectral_decomposition(const HermitianOperator& h);

using ScalarFunction = std::function<cplx(double)>;

// V f(Lambda) V^dag. Throws NumericalError when f is not finite on an
// eigenvalue.
Matrix functional_calculus(const SpectralDecomposition& spectrum,
                           const ScalarFunction& f);
Matrix functional_calculus(const HermitianOperator& h, const ScalarFunction& f);

// Orthonormal basis (phi_1, theta phi_1, phi_2, theta phi_2, ...) of the
// column span of `subspace`, built by the greedy Kramers-pair construction.
// Throws InvalidArgument when theta is not odd, the subspace is odd
// dimensional, or theta does not leave it invariant.
Matrix kramers_basis(const AntiUnitary& theta, const Matrix& subspace,
                     double tol = 1e-9);

struct UnitaryPart {
  Matrix unitary;          // (X^* X)^{-1/2} X on ker(X)^perp, zero on ker X
  Matrix range_basis;      // orthonormal basis of ker(X)^perp
  Matrix kernel_basis;     // orthonormal basis of ker X
  RealVector singular_values;  // ascending
};

// Phase of a normal operator on the complement of its kernel. Singular values
// below kernel_tol form the kernel; any singular value within half a decade
// of kernel_tol means the tolerance does not sit in a gap and is rejected.
UnitaryPart unitary_part(const Matrix& x, double kernel_tol,
                         double normal_tol = Tolerances{}.normal);

// (sum sigma_i^p)^{1/p} over singular values.
double schatten_norm(const Matrix& m, double p);
RealVector singular_values(const Matrix& m);

// Eigenvalue of V - 1 corresponding to eigenvalue lambda of X - 1.
cplx mu_from_lambda(cplx lambda);

// Indices i with |values_i - target| < tol, ascending.
std::vector<Index> eigen_cluster(const RealVector& values, double target,
                                 double tol);

// Largest principal-angle sine between the column spans of two orthonormal
// bases (0 when they agree).
double subspace_distance(const Matrix& a, const Matrix& b);

// Orthonormal basis of the column span of m, dropping directions with
// singular value below tol relative to the largest.
Matrix orthonormalize(const Matrix& m, double tol = 1e-10);

// The standard odd 2x2 form [[0,-1],[1,0]] repeated along the diagonal.
Matrix standard_odd_form(Index pairs);

}  // namespace z2edge
