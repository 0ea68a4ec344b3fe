#pragma once

// Flux insertion, Fermi projection and the bulk Z2 index
// dim ker(U P_F U^* - P_F - 1) mod 2, with defect-localized counting on the
// torus. Also the independent per-spin-block Bott index oracle.

#include <Eigen/Dense>

#include "z2edge/index_common.hpp"
#include "z2edge/lattice_models.hpp"
#include "z2edge/operator_core.hpp"

namespace z2edge {

struct FluxUnitary {
  Eigen::Vector2d center;
  RealVector angles;   // per site, in [0, 2 pi)
  Vector phases;       // per flat index, exp(i angle) of its site

  Matrix matrix() const { return phases.asDiagonal(); }
};

// Midpoint of the torus, offset by (1/2, 1/2) from a lattice site.
Eigen::Vector2d default_flux_center(const LatticeGeometry& geometry);

// Phase = full planar angle of (site - center), measured with atan2 and
// mapped to [0, 2 pi). Throws if the center sits on a site.
FluxUnitary flux_unitary(const LatticeGeometry& geometry,
                         const Eigen::Vector2d& center);

// Spectral projection onto eigenvalues <= mu. Throws InvalidArgument when mu
// is within 1e-9 of an eigenvalue.
ProjectionOperator fermi_projection(const SpectralDecomposition& h, double mu);
ProjectionOperator fermi_projection(const HermitianOperator& h, double mu);

// Spectrum of A = U P U^* - P.
SpectralDecomposition bulk_kernel_spectrum(const Matrix& u, const Matrix& p);
// Same for diagonal U, without forming the product.
SpectralDecomposition bulk_kernel_spectrum(const Vector& diagonal_u,
                                           const Matrix& p);

// Bulk index on a torus. Throws InvalidArgument when the geometry is not a
// torus, H is not time-reversal symmetric, or mu is not in a gap.
IndexReport bulk_index(const HermitianOperator& h, const AntiUnitary& tau,
                       const LatticeGeometry& geometry, double mu,
                       const IndexSettings& settings,
                       std::optional<Eigen::Vector2d> center = std::nullopt);

struct BlockBott {
  double up_raw = 0.0;
  double down_raw = 0.0;
  int up = 0;
  int down = 0;
};

// Real-space Bott index of each spin block's Fermi projection. Needs
// lambda_R = 0 on a torus.
BlockBott chern_block_oracle(const ModelSpec& spec, double mu = 0.0);

// Bott index (1/2 pi) Im tr log(V U V^* U^*) of a projection on an Lx x Ly
// torus, with U = exp(2 pi i X1 / Lx) and V = exp(2 pi i X2 / Ly) built from
// the coordinates of each basis vector.
double bott_index(const Matrix& projection, const RealVector& x1,
                  const RealVector& x2, int lx, int ly);

}  // namespace z2edge
