#include "z2edge/bulk_index.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace z2edge {

Eigen::Vector2d default_flux_center(const LatticeGeometry& geometry) {
  return {geometry.lx() / 2 - 0.5, geometry.ly() / 2 - 0.5};
}

FluxUnitary flux_unitary(const LatticeGeometry& geometry,
                         const Eigen::Vector2d& center) {
  FluxUnitary out;
  out.center = center;
  out.angles.resize(geometry.sites());
  out.phases.resize(geometry.dimension());
  for (int x2 = 0; x2 < geometry.ly(); ++x2) {
    for (int x1 = 0; x1 < geometry.lx(); ++x1) {
      const double dx = x1 - center.x();
      const double dy = x2 - center.y();
      if (std::hypot(dx, dy) < 1e-12) {
        std::ostringstream os;
        os << "flux_unitary: center (" << center.x() << ", " << center.y()
           << ") coincides with a lattice site";
        throw InvalidArgument(os.str());
      }
      double angle = std::atan2(dy, dx);
      if (angle < 0) angle += 2.0 * std::numbers::pi;
      const Index s = geometry.site_index(x1, x2);
      out.angles(s) = angle;
      const cplx phase = std::polar(1.0, angle);
      for (int o = 0; o < geometry.orbitals(); ++o) {
        out.phases(s * geometry.orbitals() + o) = phase;
      }
    }
  }
  return out;
}

ProjectionOperator fermi_projection(const SpectralDecomposition& h, double mu) {
  Index filled = 0;
  for (Index i = 0; i < h.dimension(); ++i) {
    if (std::abs(h.eigenvalues(i) - mu) < 1e-9) {
      std::ostringstream os;
      os << "fermi_projection: mu = " << mu << " is within 1e-9 of eigenvalue "
         << h.eigenvalues(i);
      throw InvalidArgument(os.str());
    }
    if (h.eigenvalues(i) <= mu) ++filled;
  }
  const auto occupied = h.eigenvectors.leftCols(filled);
  return ProjectionOperator(occupied * occupied.adjoint());
}

ProjectionOperator fermi_projection(const HermitianOperator& h, double mu) {
  return fermi_projection(spectral_decomposition(h), mu);
}

SpectralDecomposition bulk_kernel_spectrum(const Matrix& u, const Matrix& p) {
  if (u.rows() != p.rows() || u.cols() != p.cols()) {
    throw InvalidArgument("bulk_kernel_spectrum: dimension mismatch");
  }
  return spectral_decomposition(u * p * u.adjoint() - p);
}

SpectralDecomposition bulk_kernel_spectrum(const Vector& diagonal_u,
                                           const Matrix& p) {
  if (diagonal_u.size() != p.rows()) {
    throw InvalidArgument("bulk_kernel_spectrum: dimension mismatch");
  }
  const Index n = p.rows();
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j) {
    const cplx uj = std::conj(diagonal_u(j));
    for (Index i = 0; i < n; ++i) {
      a(i, j) = (diagonal_u(i) * uj - 1.0) * p(i, j);
    }
  }
  return spectral_decomposition(a);
}

IndexReport bulk_index(const HermitianOperator& h, const AntiUnitary& tau,
                       const LatticeGeometry& geometry, double mu,
                       const IndexSettings& settings,
                       std::optional<Eigen::Vector2d> center) {
  if (geometry.boundary_x() != Boundary::periodic ||
      geometry.boundary_y() != Boundary::periodic) {
    throw InvalidArgument("bulk_index: geometry must be a torus");
  }
  if (h.dimension() != geometry.dimension() ||
      tau.dimension() != geometry.dimension()) {
    throw InvalidArgument("bulk_index: dimension mismatch");
  }
  const TrsCheck trs = verify_trs(h.matrix(), tau);
  if (!trs.pass) {
    std::ostringstream os;
    os << "bulk_index: Hamiltonian is not time-reversal symmetric (residual "
       << trs.residual << ")";
    throw InvalidArgument(os.str());
  }
  const SpectralDecomposition spectrum = spectral_decomposition(h);
  const auto gap = spectral_gap(spectrum.eigenvalues, mu);
  if (!gap) {
    throw InvalidArgument("bulk_index: mu is not inside a spectral gap");
  }
  const ProjectionOperator p = fermi_projection(spectrum, mu);
  const FluxUnitary flux =
      flux_unitary(geometry, center.value_or(default_flux_center(geometry)));

  const Matrix u = flux.matrix();
  const double tau_u =
      frobenius(conjugate_by_antiunitary(tau, u) - u.adjoint());
  const double tau_p =
      frobenius(conjugate_by_antiunitary(tau, p.matrix()) - p.matrix());

  const SpectralDecomposition a = bulk_kernel_spectrum(flux.phases, p.matrix());
  const double radius = settings.filter_radius > 0
                            ? settings.filter_radius
                            : std::min(geometry.lx(), geometry.ly()) / 4.0;
  LocalizationFilter filter{geometry, flux.center, radius,
                            settings.localization_threshold};
  IndexReport report = localized_count(a, filter, settings);
  report.checks["trs_residual"] = trs.residual;
  report.checks["tau_flux_residual"] = tau_u;
  report.checks["tau_projection_residual"] = tau_p;
  report.checks["fermi_rank"] = static_cast<double>(p.rank());
  report.checks["gap_lower"] = gap->lower;
  report.checks["gap_upper"] = gap->upper;
  return report;
}

double bott_index(const Matrix& projection, const RealVector& x1,
                  const RealVector& x2, int lx, int ly) {
  const Index n = projection.rows();
  if (x1.size() != n || x2.size() != n) {
    throw InvalidArgument("bott_index: coordinate length mismatch");
  }
  Vector ux(n), uy(n);
  for (Index i = 0; i < n; ++i) {
    ux(i) = std::polar(1.0, 2.0 * std::numbers::pi * x1(i) / lx);
    uy(i) = std::polar(1.0, 2.0 * std::numbers::pi * x2(i) / ly);
  }
  const Matrix& p = projection;
  const Matrix pux = p * ux.asDiagonal() * p;
  const Matrix puy = p * uy.asDiagonal() * p;
  const Matrix m = puy * pux * puy.adjoint() * pux.adjoint() +
                   (Matrix::Identity(n, n) - p);
  Eigen::ComplexEigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("bott_index: eigensolver failed");
  }
  double total = 0.0;
  for (Index i = 0; i < n; ++i) total += std::arg(solver.eigenvalues()(i));
  return total / (2.0 * std::numbers::pi);
}

BlockBott chern_block_oracle(const ModelSpec& spec, double mu) {
  if (spec.lambda_r != 0.0) {
    throw InvalidArgument("chern_block_oracle: needs lambda_R = 0");
  }
  const HermitianOperator h = build_bulk_hamiltonian(spec);
  const LatticeGeometry& g = spec.geometry;
  const Index n = h.dimension();
  // Flat index parity is the spin label (layout 2*orbital + spin).
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if ((i % 2) != (j % 2) && h.matrix()(i, j) != cplx(0.0)) {
        throw InvalidArgument("chern_block_oracle: spin blocks are coupled");
      }
    }
  }
  const RealVector px = position_operator(g, 1);
  const RealVector py = position_operator(g, 2);
  auto block_bott = [&](Index spin) {
    const Index m = n / 2;
    Matrix hb(m, m);
    RealVector bx(m), by(m);
    for (Index a = 0; a < m; ++a) {
      bx(a) = px(2 * a + spin);
      by(a) = py(2 * a + spin);
      for (Index b = 0; b < m; ++b) hb(a, b) = h.matrix()(2 * a + spin, 2 * b + spin);
    }
    const ProjectionOperator p = fermi_projection(spectral_decomposition(hb), mu);
    return bott_index(p.matrix(), bx, by, g.lx(), g.ly());
  };
  BlockBott out;
  out.up_raw = block_bott(0);
  out.down_raw = block_bott(1);
  out.up = static_cast<int>(std::lround(out.up_raw));
  out.down = static_cast<int>(std::lround(out.down_raw));
  return out;
}

}  // namespace z2edge
