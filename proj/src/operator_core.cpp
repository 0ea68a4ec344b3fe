#include "z2edge/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace z2edge {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x"
       << m.cols();
    throw InvalidArgument(os.str());
  }
}

}  // namespace

double frobenius(const Matrix& m) { return m.norm(); }

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  RealVector s = singular_values(m);
  return s.size() ? s.maxCoeff() : 0.0;
}

HermitianOperator::HermitianOperator(Matrix matrix, std::string label,
                                     double tol)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  require_square(matrix_, "HermitianOperator");
  const double scale = std::max(frobenius(matrix_), 1.0);
  const double residual = frobenius(matrix_ - matrix_.adjoint());
  if (residual > tol * scale) {
    std::ostringstream os;
    os << "HermitianOperator '" << label_ << "': ||M - M^dag|| = " << residual;
    throw InvalidArgument(os.str());
  }
  // Symmetrize so downstream eigensolvers see an exactly Hermitian matrix.
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
}

UnitaryOperator::UnitaryOperator(Matrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  require_square(matrix_, "UnitaryOperator");
  const Index n = matrix_.rows();
  const double residual =
      frobenius(matrix_ * matrix_.adjoint() - Matrix::Identity(n, n));
  if (residual > tol * std::sqrt(std::max<double>(n, 1))) {
    std::ostringstream os;
    os << "UnitaryOperator: ||U U^dag - 1|| = " << residual;
    throw InvalidArgument(os.str());
  }
}

ProjectionOperator::ProjectionOperator(Matrix matrix, double tol)
    : matrix_(std::move(matrix)) {
  require_square(matrix_, "ProjectionOperator");
  const double herm = frobenius(matrix_ - matrix_.adjoint());
  const double idem = frobenius(matrix_ * matrix_ - matrix_);
  if (herm > tol || idem > tol) {
    std::ostringstream os;
    os << "ProjectionOperator: ||P - P^dag|| = " << herm
       << ", ||P^2 - P|| = " << idem;
    throw InvalidArgument(os.str());
  }
  const double trace = matrix_.trace().real();
  rank_ = static_cast<Index>(std::llround(trace));
  if (std::abs(trace - static_cast<double>(rank_)) > tol) {
    throw InvalidArgument("ProjectionOperator: trace is not an integer");
  }
}

AntiUnitary::AntiUnitary(Matrix unitary_part, double tol)
    : unitary_part_(std::move(unitary_part)) {
  UnitaryOperator check(unitary_part_, tol);
  (void)check;
}

int AntiUnitary::parity(double tol) const {
  const Index n = dimension();
  const Matrix square = unitary_part_ * unitary_part_.conjugate();
  const Matrix id = Matrix::Identity(n, n);
  const double scale = std::sqrt(std::max<double>(n, 1));
  if (frobenius(square - id) <= tol * scale) return 1;
  if (frobenius(square + id) <= tol * scale) return -1;
  return 0;
}

Vector AntiUnitary::apply(const Vector& v) const {
  if (v.size() != dimension()) {
    throw InvalidArgument("AntiUnitary::apply: dimension mismatch");
  }
  return unitary_part_ * v.conjugate();
}

Matrix AntiUnitary::apply_columns(const Matrix& columns) const {
  if (columns.rows() != dimension()) {
    throw InvalidArgument("AntiUnitary::apply_columns: dimension mismatch");
  }
  return unitary_part_ * columns.conjugate();
}

AntiUnitary AntiUnitary::after(const Matrix& unitary) const {
  if (unitary.rows() != dimension() || unitary.cols() != dimension()) {
    throw InvalidArgument("AntiUnitary::after: dimension mismatch");
  }
  return AntiUnitary(unitary * unitary_part_);
}

AntiUnitary AntiUnitary::in_basis(const Matrix& basis) const {
  if (basis.rows() != dimension()) {
    throw InvalidArgument("AntiUnitary::in_basis: dimension mismatch");
  }
  return AntiUnitary(basis.adjoint() * unitary_part_ * basis.conjugate());
}

Matrix conjugate_by_antiunitary(const AntiUnitary& theta, const Matrix& m) {
  if (m.rows() != theta.dimension() || m.cols() != theta.dimension()) {
    std::ostringstream os;
    os << "conjugate_by_antiunitary: antiunitary of dimension "
       << theta.dimension() << " cannot act on a " << m.rows() << "x"
       << m.cols() << " matrix";
    throw InvalidArgument(os.str());
  }
  const Matrix& t = theta.unitary_part();
  return t * m.conjugate() * t.adjoint();
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() *
         eigenvectors.adjoint();
}

Matrix SpectralDecomposition::columns(const std::vector<Index>& which) const {
  Matrix out(eigenvectors.rows(), static_cast<Index>(which.size()));
  for (Index j = 0; j < out.cols(); ++j) {
    out.col(j) = eigenvectors.col(which[static_cast<std::size_t>(j)]);
  }
  return out;
}

SpectralDecomposition spectral_decomposition(const Matrix& hermitian) {
  require_square(hermitian, "spectral_decomposition");
  const Matrix h = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_decomposition: eigensolver failed");
  }
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};

  // Re-orthonormalize degenerate clusters.
  const Index n = out.dimension();
  const double scale =
      n ? std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff()) : 1.0;
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n &&
           out.eigenvalues(end) - out.eigenvalues(end - 1) < 1e-10 * scale) {
      ++end;
    }
    if (end - start > 1) {
      Eigen::HouseholderQR<Matrix> qr(out.eigenvectors.middleCols(start, end - start));
      Matrix q = qr.householderQ() * Matrix::Identity(n, end - start);
      // Keep the solver's column orientation.
      for (Index j = 0; j < q.cols(); ++j) {
        const cplx overlap = q.col(j).dot(out.eigenvectors.col(start + j));
        if (std::abs(overlap) > 0) q.col(j) *= overlap / std::abs(overlap);
      }
      out.eigenvectors.middleCols(start, end - start) = q;
    }
    start = end;
  }
  return out;
}

SpectralDecomposition spectral_decomposition(const HermitianOperator& h) {
  return spectral_decomposition(h.matrix());
}

Matrix functional_calculus(const SpectralDecomposition& spectrum,
                           const ScalarFunction& f) {
  const Index n = spectrum.dimension();
  Vector values(n);
  for (Index i = 0; i < n; ++i) {
    const cplx v = f(spectrum.eigenvalues(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "functional_calculus: f is undefined at eigenvalue "
         << spectrum.eigenvalues(i);
      throw NumericalError(os.str());
    }
    values(i) = v;
  }
  return spectrum.eigenvectors * values.asDiagonal() *
         spectrum.eigenvectors.adjoint();
}

Matrix functional_calculus(const HermitianOperator& h,
                           const ScalarFunction& f) {
  return functional_calculus(spectral_decomposition(h), f);
}

Matrix orthonormalize(const Matrix& m, double tol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  const double cut = tol * std::max(s.size() ? s(0) : 0.0, 1e-300);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix kramers_basis(const AntiUnitary& theta, const Matrix& subspace,
                     double tol) {
  if (!theta.is_odd()) {
    throw InvalidArgument("kramers_basis: antiunitary is not odd");
  }
  if (subspace.rows() != theta.dimension()) {
    throw InvalidArgument("kramers_basis: dimension mismatch");
  }
  const Matrix v = orthonormalize(subspace);
  const Index d = v.cols();
  if (d % 2 != 0) {
    std::ostringstream os;
    os << "kramers_basis: subspace has odd dimension " << d
       << " (broken odd symmetry)";
    throw InvalidArgument(os.str());
  }
  const Matrix image = theta.apply_columns(v);
  const double leak = frobenius(image - v * (v.adjoint() * image));
  if (leak > tol * std::sqrt(std::max<double>(d, 1))) {
    std::ostringstream os;
    os << "kramers_basis: antiunitary does not preserve the subspace (leak "
       << leak << ")";
    throw InvalidArgument(os.str());
  }

  Matrix basis(v.rows(), d);
  Index filled = 0;
  auto project_out = [&](Vector x) {
    for (int pass = 0; pass < 2; ++pass) {
      x -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * x);
    }
    return x;
  };
  while (filled < d) {
    // Any vector of the complement works; the column with the largest
    // residual keeps the choice deterministic and well conditioned.
    Index best = 0;
    double best_norm = -1.0;
    Matrix residual = v - basis.leftCols(filled) *
                              (basis.leftCols(filled).adjoint() * v);
    for (Index j = 0; j < d; ++j) {
      const double nrm = residual.col(j).norm();
      if (nrm > best_norm + 1e-14) {
        best_norm = nrm;
        best = j;
      }
    }
    Vector phi = project_out(residual.col(best));
    phi.normalize();
    basis.col(filled++) = phi;
    Vector partner = project_out(theta.apply(phi));
    const double pn = partner.norm();
    if (pn < 0.5) {
      throw NumericalError("kramers_basis: partner vector collapsed");
    }
    basis.col(filled++) = partner / pn;
  }
  return basis;
}

RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

UnitaryPart unitary_part(const Matrix& x, double kernel_tol,
                         double normal_tol) {
  require_square(x, "unitary_part");
  const Index n = x.rows();
  UnitaryPart out;
  if (n == 0) {
    out.unitary = Matrix(0, 0);
    out.range_basis = Matrix(0, 0);
    out.kernel_basis = Matrix(0, 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();  // descending
  const double norm2 = s(0) * s(0);
  const double normality =
      frobenius(x * x.adjoint() - x.adjoint() * x);
  if (normality > normal_tol * std::max(norm2, 1e-300) * std::sqrt(double(n))) {
    std::ostringstream os;
    os << "unitary_part: operator is not normal (||XX* - X*X|| = "
       << normality << ")";
    throw InvalidArgument(os.str());
  }
  const double band = std::sqrt(10.0);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > kernel_tol / band && s(i) < kernel_tol * band) {
      std::ostringstream os;
      os << "unitary_part: singular value " << s(i)
         << " lies within half a decade of kernel_tol " << kernel_tol;
      throw InvalidArgument(os.str());
    }
  }
  Index r = 0;
  while (r < s.size() && s(r) >= kernel_tol) ++r;
  const Matrix& u = svd.matrixU();
  const Matrix& w = svd.matrixV();
  out.unitary = u.leftCols(r) * w.leftCols(r).adjoint();
  out.range_basis = w.leftCols(r);
  out.kernel_basis = w.rightCols(n - r);
  out.singular_values = s.reverse();
  return out;
}

double schatten_norm(const Matrix& m, double p) {
  if (!(p >= 1.0)) {
    throw InvalidArgument("schatten_norm: p must be >= 1");
  }
  const RealVector s = singular_values(m);
  if (s.size() == 0) return 0.0;
  const double top = s.maxCoeff();
  if (top == 0.0) return 0.0;
  double sum = 0.0;
  for (Index i = 0; i < s.size(); ++i) sum += std::pow(s(i) / top, p);
  return top * std::pow(sum, 1.0 / p);
}

cplx mu_from_lambda(cplx lambda) {
  const cplx shifted = lambda + 1.0;
  if (std::abs(shifted) == 0.0) {
    throw InvalidArgument("mu_from_lambda: lambda = -1 has no phase");
  }
  return shifted / std::abs(shifted) - 1.0;
}

std::vector<Index> eigen_cluster(const RealVector& values, double target,
                                 double tol) {
  std::vector<Index> out;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i) - target) < tol) out.push_back(i);
  }
  return out;
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 1.0;
  if (a.cols() == 0) return 0.0;
  const Matrix ra = a - b * (b.adjoint() * a);
  const Matrix rb = b - a * (a.adjoint() * b);
  return std::max(operator_norm(ra), operator_norm(rb));
}

Matrix standard_odd_form(Index pairs) {
  Matrix t = Matrix::Zero(2 * pairs, 2 * pairs);
  for (Index i = 0; i < pairs; ++i) {
    t(2 * i, 2 * i + 1) = -1.0;
    t(2 * i + 1, 2 * i) = 1.0;
  }
  return t;
}

}  // namespace z2edge
