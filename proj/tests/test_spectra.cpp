#include <doctest.h>

#include <algorithm>
#include <string>

#include "oracles.hpp"
#include "z2edge/edge_index.hpp"
#include "z2edge/spectra_diagnostics.hpp"

using namespace z2edge;

namespace {

ModelSpec cylinder_spec(int lx, int ly, double m, double lr = 0.0, double w = 0.0) {
  ModelSpec s;
  s.mass = m;
  s.lambda_r = lr;
  s.disorder = w;
  s.geometry = LatticeGeometry::cylinder(lx, ly);
  return s;
}

}  // namespace

TEST_CASE("cylinder fibers reassemble the real-space cylinder spectrum") {
  const ModelSpec s = cylinder_spec(6, 4, 1.2, 0.3);
  Eigen::SelfAdjointEigenSolver<Matrix> full(build_half_space_hamiltonian(s).matrix(),
                                             Eigen::EigenvaluesOnly);
  std::vector<double> fibers;
  for (int j = 0; j < 6; ++j) {
    Eigen::SelfAdjointEigenSolver<Matrix> f(cylinder_fiber(s, 2 * oracle::pi * j / 6),
                                            Eigen::EigenvaluesOnly);
    fibers.insert(fibers.end(), f.eigenvalues().data(),
                  f.eigenvalues().data() + f.eigenvalues().size());
  }
  std::sort(fibers.begin(), fibers.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    worst = std::max(worst, std::abs(fibers[i] - full.eigenvalues()(Index(i))));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Bloch gap agrees with the closed-form oracle") {
  for (double m : {0.5, 1.0, 3.0}) {
    ModelSpec s;
    s.mass = m;
    const auto gap = bloch_gap(s, 0.0, 128);
    REQUIRE(gap);
    const double half = oracle::bloch_half_gap(m, 128);
    CHECK(gap->upper == doctest::Approx(half).epsilon(1e-9));
    CHECK(gap->lower == doctest::Approx(-half).epsilon(1e-9));
  }
}

TEST_CASE("cylinder bands: Kramers pairs at k = 0, pi and reflection symmetry") {
  const BandStructure b = cylinder_bands(cylinder_spec(8, 16, 1.0, 0.3), 64);
  CHECK(b.kramers_residual < 1e-8);
  CHECK(b.reflection_residual < 1e-9);
  CHECK(b.energies.cols() == 64);
  CHECK_THROWS_AS(cylinder_bands(cylinder_spec(8, 8, 1.0, 0.0, 0.5), 64), InvalidArgument);
  CHECK_THROWS_AS(cylinder_bands(cylinder_spec(8, 8, 1.0), 63), InvalidArgument);
}

TEST_CASE("edge branches cover Delta in the topological phase only") {
  for (double m : {1.0, 3.0}) {
    const ModelSpec s = cylinder_spec(8, 32, m);
    const auto gap = bloch_gap(s, 0.0);
    REQUIRE(gap);
    const Interval delta = gap_window(*gap, 0.0, 0.8);
    const CoverageReport c = branch_coverage(cylinder_bands(s, 256), delta);
    if (m == 1.0) {
      CHECK(c.fraction == 1.0);
      CHECK(c.max_edge_velocity > 0.5);
    } else {
      CHECK(c.eigenvalues_in_delta == 0);
      CHECK(c.fraction == 0.0);
    }
  }
}

TEST_CASE("gap filling fraction counts occupied bins") {
  const Interval d{-1.0, 1.0};
  RealVector e(3);
  e << -0.95, 0.05, 5.0;
  CHECK(gap_filling_fraction(e, d, 0.5) == doctest::Approx(0.5));
  RealVector dense = RealVector::LinSpaced(400, -0.999, 0.999);
  CHECK(gap_filling_fraction(dense, d, 0.04) == 1.0);
  RealVector far(2);
  far << -3.0, 3.0;
  CHECK(gap_filling_fraction(far, d, 0.04) == 0.0);
}

TEST_CASE("transport conserves norm and energy and is tau-covariant") {
  const ModelSpec s = cylinder_spec(12, 8, 1.0);
  const auto gap = bloch_gap(s, 0.0);
  const Interval delta = gap_window(*gap, 0.0, 0.8);
  const HermitianOperator h = build_half_space_hamiltonian(s);
  const SpectralDecomposition sp = spectral_decomposition(h);
  const TransportTrace t = ballistic_transport(h, sp, s.geometry,
                                               build_time_reversal(s.geometry), delta, 1.0, {});
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    CHECK(t.norm_error[i] <= 1e-9);
    CHECK(t.energy_error[i] <= 1e-9);
    CHECK(t.spread[i] >= 0.0);
  }
  CHECK(t.trs_residual <= 1e-6);
  CHECK(t.wrap_time == doctest::Approx(6.0));
  CHECK(t.fit_points >= 2);
}

TEST_CASE("transport in the trivial phase has no gap states") {
  const ModelSpec s = cylinder_spec(12, 8, 3.0);
  const auto gap = bloch_gap(s, 0.0);
  const Interval delta = gap_window(*gap, 0.0, 0.8);
  const HermitianOperator h = build_half_space_hamiltonian(s);
  const SpectralDecomposition sp = spectral_decomposition(h);
  try {
    (void)ballistic_transport(h, sp, s.geometry, build_time_reversal(s.geometry), delta,
                              1.0, {});
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("no gap states") != std::string::npos);
  }
}
