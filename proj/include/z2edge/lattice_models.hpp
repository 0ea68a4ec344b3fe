#pragma once

// Finite-volume tight-binding models with an exact on-site odd time-reversal
// symmetry.
//
// The model is the spin-doubled Chern insulator. On each site the fiber is
// C^4 with flat layout 2*orbital + spin: the orbital index carries the Pauli
// matrices of the two-band Bloch Hamiltonian
//
//   h(k) = sin k1 s1 + sin k2 s2 + (m + cos k1 + cos k2) s3,
//
// spin up sees h and spin down sees its complex conjugate. An optional
// nearest-neighbour Rashba-type term lambda_R (sx sin k2 - sy sin k1) mixes
// the spins, and scalar on-site disorder uniform in [-w, w] is drawn per site.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "z2edge/operator_core.hpp"

namespace z2edge {

enum class Boundary { periodic, open };

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct Site {
  int x1 = 0;
  int x2 = 0;
};

class LatticeGeometry {
 public:
  LatticeGeometry(int lx, int ly, Boundary bx, Boundary by,
                  int orbitals_per_site = 4);

  static LatticeGeometry torus(int lx, int ly, int orbitals = 4) {
    return {lx, ly, Boundary::periodic, Boundary::periodic, orbitals};
  }
  static LatticeGeometry cylinder(int lx, int ly, int orbitals = 4) {
    return {lx, ly, Boundary::periodic, Boundary::open, orbitals};
  }

  int lx() const { return lx_; }
  int ly() const { return ly_; }
  Boundary boundary_x() const { return bx_; }
  Boundary boundary_y() const { return by_; }
  int orbitals() const { return orbitals_; }

  Index sites() const { return Index(lx_) * ly_; }
  Index dimension() const { return sites() * orbitals_; }

  Index site_index(int x1, int x2) const { return Index(x2) * lx_ + x1; }
  Index flat_index(int x1, int x2, int orbital) const {
    return site_index(x1, x2) * orbitals_ + orbital;
  }
  Site site_of(Index flat) const;

  // Euclidean distance between a site and a point, using the minimal image
  // along periodic directions.
  double distance(const Site& s, const Eigen::Vector2d& point) const;
  double distance(const Site& a, const Site& b) const;

 private:
  int lx_, ly_;
  Boundary bx_, by_;
  int orbitals_;
};

struct ModelSpec {
  double mass = 1.0;
  double lambda_r = 0.0;
  double disorder = 0.0;
  std::uint64_t seed = 1;
  LatticeGeometry geometry = LatticeGeometry::torus(8, 8);
};

// Fiber blocks of the clean model: onsite, and the amplitudes
// <x + e_j| H |x> for hops along e_1 and e_2.
struct HoppingTerms {
  Matrix onsite;
  Matrix hop_x;
  Matrix hop_y;
};

HoppingTerms clean_terms(const ModelSpec& spec);

// On-site potentials in site order. Generated from a 64-bit Mersenne twister
// seeded with spec.seed; each draw u = (r >> 11) * 2^-53 maps to w (2u - 1).
std::vector<double> disorder_potential(const ModelSpec& spec);

// Assembles the model on spec.geometry with whatever boundaries it carries.
HermitianOperator assemble_hamiltonian(const ModelSpec& spec);

HermitianOperator build_bulk_hamiltonian(const ModelSpec& spec);
HermitianOperator build_half_space_hamiltonian(const ModelSpec& spec);

AntiUnitary build_time_reversal(const LatticeGeometry& geometry);

// Diagonal of the position operator along axis 1 or 2.
RealVector position_operator(const LatticeGeometry& geometry, int axis);

struct TrsCheck {
  bool pass = false;
  double residual = 0.0;
};

TrsCheck verify_trs(const Matrix& h, const AntiUnitary& tau,
                    double tol = 1e-10);

struct LocalityCertificate {
  double prefactor = 0.0;    // C
  double decay_length = 0.0; // xi; 0 when finite_range
  double residual = 0.0;     // rms of the log-linear fit
  bool finite_range = false;
  double range = 0.0;        // largest distance with a nonzero block
  Index pairs_sampled = 0;
};

// Fits ||P_x H P_y|| <= C exp(-|x - y| / xi) over the sampled site pairs (all
// pairs when empty). Blocks use the operator norm on the fiber.
LocalityCertificate verify_locality(
    const Matrix& h, const LatticeGeometry& geometry,
    const std::vector<std::pair<Index, Index>>& sample_pairs = {});

struct Interval {
  double lower;
  double upper;
  double width() const { return upper - lower; }
  bool contains(double x) const { return x > lower && x < upper; }
};

// Largest open interval around mu free of eigenvalues, or nullopt when mu is
// within 1e-9 of an eigenvalue.
std::optional<Interval> spectral_gap(const RealVector& eigenvalues, double mu);
std::optional<Interval> spectral_gap(const HermitianOperator& h, double mu);

}  // namespace z2edge
