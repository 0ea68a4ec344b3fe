#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "z2edge/edge_index.hpp"
#include "z2edge/wold_engine.hpp"

using namespace z2edge;

namespace {

ModelSpec cylinder_spec(int l, double m, double lr = 0.0, double w = 0.0) {
  ModelSpec s;
  s.mass = m;
  s.lambda_r = lr;
  s.disorder = w;
  s.geometry = LatticeGeometry::cylinder(l, l);
  return s;
}

}  // namespace

TEST_CASE("gap function ramps from one to zero across Delta") {
  const GapFunction g(-0.5, 0.5);
  CHECK(g(-1.0) == 1.0);
  CHECK(g(1.0) == 0.0);
  CHECK(g(0.0) == doctest::Approx(0.5));
  CHECK(g.phase(-2.0) == cplx(1.0, 0.0));
  CHECK(g.phase(2.0) == cplx(1.0, 0.0));
  CHECK(std::abs(g.phase(0.0) + 1.0) < 1e-15);
  const double h = 1e-6;
  CHECK(g.derivative(0.2) == doctest::Approx((g(0.2 + h) - g(0.2 - h)) / (2 * h)).epsilon(1e-6));
  CHECK_THROWS_AS(GapFunction(0.5, 0.5), InvalidArgument);
}

TEST_CASE("gap window is a fraction of the gap around mu") {
  const Interval d = gap_window(Interval{-1.0, 2.0}, 0.0, 0.5);
  CHECK(d.lower == doctest::Approx(-0.5));
  CHECK(d.upper == doctest::Approx(1.0));
}

TEST_CASE("edge unitary is the identity away from Delta") {
  const ModelSpec s = cylinder_spec(8, 1.0, 0.3);
  const HermitianOperator h = build_half_space_hamiltonian(s);
  const SpectralDecomposition sp = spectral_decomposition(h);
  const GapFunction g(-0.6, 0.6);
  const UnitaryOperator u = edge_unitary(sp, g);
  for (Index i = 0; i < sp.dimension(); ++i) {
    const double e = sp.eigenvalues(i);
    if (e <= g.lower() || e >= g.upper()) {
      CHECK((u.matrix() * sp.eigenvectors.col(i) - sp.eigenvectors.col(i)).norm() < 1e-9);
    }
  }
  const AntiUnitary tau = build_time_reversal(s.geometry);
  CHECK(frobenius(conjugate_by_antiunitary(tau, u.matrix()) - u.matrix().adjoint()) < 1e-9);
}

TEST_CASE("half-ring projection and its commutator with U_E") {
  const ModelSpec s = cylinder_spec(8, 1.0);
  const ProjectionOperator pi = quadrant_projection(s.geometry);
  CHECK(pi.rank() == s.geometry.dimension() / 2);
  CHECK(default_cut_column(s.geometry) == 4);
  const Eigen::Vector2d c = default_corner(s.geometry, 4);
  CHECK(c.x() == doctest::Approx(3.5));
  CHECK(c.y() == doctest::Approx(0.0));

  const HermitianOperator h = build_half_space_hamiltonian(s);
  const UnitaryOperator u = edge_unitary(h, GapFunction(-0.8, 0.8));
  const CommutatorReport r = commutator_decay_report(u.matrix(), pi.matrix(), s.geometry);
  CHECK(r.identity_residual < 1e-9);
  CHECK(r.hilbert_schmidt <= r.trace_norm + 1e-12);
  CHECK(r.from_cut.max_norm.size() == r.from_cut.distance.size());
}

TEST_CASE("edge index: clean topological and trivial cylinders at L = 16") {
  IndexSettings settings;
  for (double m : {1.0, 3.0}) {
    ModelSpec torus = cylinder_spec(16, m);
    torus.geometry = LatticeGeometry::torus(16, 16);
    const auto gap = spectral_gap(build_bulk_hamiltonian(torus), 0.0);
    REQUIRE(gap);
    const ModelSpec s = cylinder_spec(16, m);
    const HermitianOperator h = build_half_space_hamiltonian(s);
    const IndexReport r =
        edge_index(h, build_time_reversal(s.geometry), s.geometry,
                   make_gap_function(gap_window(*gap, 0.0, 0.8)), settings);
    CHECK(r.z2 == (oracle::clean_z2(m) ? Z2Value::one : Z2Value::zero));
    CHECK(r.rule == CountRule::trace);
    CHECK(r.exact_kernel_dim % 2 == 0);
  }
}

TEST_CASE("edge index rejects a torus") {
  ModelSpec s = cylinder_spec(6, 1.0);
  s.geometry = LatticeGeometry::torus(6, 6);
  const HermitianOperator h = build_bulk_hamiltonian(s);
  CHECK_THROWS_AS(edge_index(h, build_time_reversal(s.geometry), s.geometry,
                             GapFunction(-0.5, 0.5), {}),
                  InvalidArgument);
}

TEST_CASE("Fredholm count of the ring shift matches the kernel of A") {
  // S shifts spin up right and spin down left; P S P + P^perp loses one
  // state per arc end, and A = S P S^* - P has two +1 eigenvectors.
  const SymmetricPair pair = ring_shift_pair(12, 5);
  IndexSettings settings;
  const FredholmReport f = fredholm_cross_check(pair.u(), pair.p(), std::nullopt, settings);
  CHECK(f.correspondence_holds);
  CHECK(f.sweep.front().count == 2);
  CHECK(f.z2 == Z2Value::zero);
  Index small = 0;
  for (Index i = 0; i < f.singular_values.size(); ++i) {
    if (f.singular_values(i) < 1e-10) ++small;
  }
  CHECK(small == 2);
}

TEST_CASE("bulk-edge row for a gapless spec is inconclusive, not an error") {
  ModelSpec s;
  s.mass = 2.0;  // Dirac point at (pi, 0)
  s.geometry = LatticeGeometry::torus(8, 8);
  const BulkEdgeRow row = bulk_edge_check(s, 0.0, {});
  CHECK(row.status == CompareStatus::inconclusive);
  CHECK(row.reason == "no bulk gap at mu");
}
