#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "z2edge/bulk_index.hpp"

using namespace z2edge;

namespace {

ModelSpec torus_spec(int l, double m, double lr = 0.0, double w = 0.0) {
  ModelSpec s;
  s.mass = m;
  s.lambda_r = lr;
  s.disorder = w;
  s.geometry = LatticeGeometry::torus(l, l);
  return s;
}

}  // namespace

TEST_CASE("flux unitary winds once around the center") {
  const LatticeGeometry g = LatticeGeometry::torus(8, 8);
  const Eigen::Vector2d c = default_flux_center(g);
  const FluxUnitary f = flux_unitary(g, c);
  for (Index i = 0; i < f.phases.size(); ++i) {
    CHECK(std::abs(std::abs(f.phases(i)) - 1.0) < 1e-14);
  }
  const Site s = g.site_of(g.flat_index(5, 3, 0));
  const double expected = std::atan2(s.x2 - c.y(), s.x1 - c.x());
  CHECK(std::abs(std::arg(f.phases(g.flat_index(5, 3, 0))) - expected) < 1e-12);
  CHECK_THROWS_AS(flux_unitary(g, Eigen::Vector2d(2.0, 3.0)), InvalidArgument);
}

TEST_CASE("Fermi projection at half filling") {
  const HermitianOperator h = build_bulk_hamiltonian(torus_spec(6, 1.0));
  const ProjectionOperator p = fermi_projection(h, 0.0);
  CHECK(p.rank() == h.dimension() / 2);
}

TEST_CASE("spin-block Bott oracle matches the lattice Chern number") {
  for (double m : {0.5, 1.0, 1.5, 2.5, 3.0}) {
    const BlockBott b = chern_block_oracle(torus_spec(8, m));
    const int chern = oracle::fukui_chern(m);
    CHECK(std::abs(b.up) == std::abs(chern));
    CHECK(b.up == -b.down);
  }
}

TEST_CASE("A = U P U^* - P has a symmetric spectrum and even exact kernel") {
  for (double m : {1.0, 3.0}) {
    const ModelSpec s = torus_spec(8, m, 0.3, 0.5);
    const HermitianOperator h = build_bulk_hamiltonian(s);
    const ProjectionOperator p = fermi_projection(h, 0.0);
    const FluxUnitary f = flux_unitary(s.geometry, default_flux_center(s.geometry));
    const SpectralDecomposition a = bulk_kernel_spectrum(f.phases, p.matrix());
    const SpectralDecomposition direct = bulk_kernel_spectrum(f.matrix(), p.matrix());
    CHECK((a.eigenvalues - direct.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
    Index kernel = 0;
    for (Index i = 0; i < a.dimension(); ++i) {
      if (std::abs(a.eigenvalues(i) - 1.0) < 1e-10) ++kernel;
    }
    CHECK(kernel % 2 == 0);
  }
}

TEST_CASE("bulk index recovers the clean parity at L = 12") {
  IndexSettings settings;
  for (double m : {1.0, 3.0}) {
    const ModelSpec s = torus_spec(12, m);
    const IndexReport r = bulk_index(build_bulk_hamiltonian(s),
                                     build_time_reversal(s.geometry), s.geometry, 0.0,
                                     settings);
    const Z2Value expected = oracle::clean_z2(m) ? Z2Value::one : Z2Value::zero;
    CHECK(r.z2 == expected);
    CHECK(r.pairing_residual < 1e-9);
    CHECK(r.sweep.size() == settings.tol_sweep.size());
    REQUIRE(r.guard);
  }
}

TEST_CASE("bulk index rejects a cylinder and a gapless mu") {
  ModelSpec s = torus_spec(6, 1.0);
  const HermitianOperator h = build_bulk_hamiltonian(s);
  const LatticeGeometry cyl = LatticeGeometry::cylinder(6, 6);
  CHECK_THROWS_AS(bulk_index(h, build_time_reversal(cyl), cyl, 0.0, {}), InvalidArgument);
  const RealVector e = spectral_decomposition(h).eigenvalues;
  CHECK_THROWS_AS(
      bulk_index(h, build_time_reversal(s.geometry), s.geometry, e(e.size() - 1), {}),
      InvalidArgument);
}

TEST_CASE("plateau rule: anchored at the widest tol and guarded above it") {
  IndexReport r;
  r.sweep = {{1e-1, 1}, {1e-2, 1}, {1e-3, 1}, {1e-4, 0}};
  resolve_plateau(r, 1.0);
  CHECK(r.z2 == Z2Value::one);

  r.sweep = {{1e-1, 1}, {1e-2, 0}, {1e-3, 0}, {1e-4, 0}};
  resolve_plateau(r, 1.0);
  CHECK(r.z2 == Z2Value::undetermined);

  r.sweep = {{1e-1, 0}, {1e-2, 0}};
  r.guard = SweepRow{0.316, 1};
  resolve_plateau(r, 1.0);
  CHECK(r.z2 == Z2Value::undetermined);
  r.guard = SweepRow{0.316, 2};
  resolve_plateau(r, 1.0);
  CHECK(r.z2 == Z2Value::zero);

  SweepRow unresolved{1e-1, 1, 0.6, false};
  r.sweep = {unresolved, {1e-2, 1}};
  r.guard.reset();
  resolve_plateau(r, 1.0);
  CHECK(r.z2 == Z2Value::undetermined);
}

TEST_CASE("trace rule counts the weight of a degenerate subspace") {
  // Two orthonormal vectors each half on the masked sites: threshold counting
  // finds nothing at 0.9, the trace rule finds one direction.
  Matrix v = Matrix::Zero(4, 2);
  v(0, 0) = v(2, 0) = std::sqrt(0.5);
  v(1, 1) = v(3, 1) = std::sqrt(0.5);
  RealVector d(2);
  d << 1e-8, 1e-8;
  RealVector mask(4);
  mask << 1, 1, 0, 0;
  const auto t = localized_sweep(v, d, mask, 0.9, CountRule::threshold, {1e-1});
  const auto s = localized_sweep(v, d, mask, 0.25, CountRule::trace, {1e-1});
  CHECK(t[0].count == 0);
  CHECK(s[0].count == 1);
  CHECK(s[0].resolved);
  CHECK(s[0].trace == doctest::Approx(1.0));
}
