#pragma once

// Finite-size proxies for edge spectrum filling the bulk gap: cylinder band
// structure with edge tagging and Kramers checks, gap-filling statistics,
// and wave-packet spreading along the edge. None of these decide absolute
// continuity; every output is a proxy.

#include <optional>
#include <string>
#include <vector>

#include "z2edge/lattice_models.hpp"
#include "z2edge/operator_core.hpp"

namespace z2edge {

// Bloch fiber of the clean model on the 2D torus Brillouin zone. Only used
// to locate the bulk gap; requires w = 0.
Matrix bloch_fiber(const ModelSpec& spec, double k1, double k2);

// Bulk gap around mu of the clean model sampled on an nk x nk momentum grid.
std::optional<Interval> bloch_gap(const ModelSpec& spec, double mu, int nk = 64);

struct BandStructure {
  std::vector<double> k;            // 2 pi j / Nk
  Eigen::MatrixXd energies;         // row per k, ascending
  Eigen::MatrixXd edge_weight;      // probability within 2 rows of an edge
  double edge_tag_threshold = 0.5;
  double kramers_residual = 0.0;    // level pairing at k = 0 and k = pi
  double reflection_residual = 0.0; // spectrum at k vs at 2 pi - k
  int ly = 0;

  bool edge_tagged(Index ik, Index band) const {
    return edge_weight(ik, band) >= edge_tag_threshold;
  }
};

// Fiber (Ly n)-dimensional Hamiltonian of the clean cylinder at momentum k.
Matrix cylinder_fiber(const ModelSpec& spec, double k);

// Throws InvalidArgument for w != 0 or an odd or non-positive k count.
BandStructure cylinder_bands(const ModelSpec& spec, int k_points,
                             double edge_tag_threshold = 0.5);

struct CoverageReport {
  std::vector<double> probes;
  std::vector<bool> covered;        // an edge-tagged branch crosses the probe
  double fraction = 0.0;
  Index eigenvalues_in_delta = 0;   // over all k
  double max_edge_velocity = 0.0;   // |dE/dk| of edge branches inside Delta
};

// Probes `probes` evenly spaced energies strictly inside Delta.
CoverageReport branch_coverage(const BandStructure& bands, const Interval& delta,
                               int probes = 101);

// Fraction of the bins of width `resolution` covering Delta that contain at
// least one of `eigenvalues`.
double gap_filling_fraction(const RealVector& eigenvalues, const Interval& delta,
                            double resolution);

struct TransportTrace {
  std::vector<double> times;
  std::vector<double> spread;       // <(X1 - <X1>)^2>, minimal image
  std::vector<double> mean;         // <X1> relative to the start column
  std::vector<double> norm_error;
  std::vector<double> energy_error;
  double initial_norm = 0.0;        // ||P_Delta e|| before renormalizing
  double wrap_time = 0.0;           // Lx / (2 v_max)
  double v_max = 0.0;
  Index fit_points = 0;
  double alpha = 0.0;               // log-log slope of spread - spread(0)
  double alpha_stderr = 0.0;
  double alpha_low = 0.0;           // alpha - 2 stderr
  double alpha_high = 0.0;
  double trs_residual = 0.0;        // tau psi0 at t vs psi0 at -t
};

struct TransportSettings {
  int x1 = -1;                      // start column, -1 = Lx / 2
  int x2 = 0;                       // start row
  std::vector<double> times;        // empty = 48 times up to 2 wrap times
  double min_norm = 0.1;
};

// Evolves P_Delta applied to the start-site vector of largest P_Delta
// weight. `v_max` (> 0) sets the fit window. Throws InvalidArgument
// "no gap states to propagate" when the filtered norm is below min_norm, and
// "empty wrap window" when fewer than two times precede the wrap time.
// `spectrum` must be the decomposition of `h_hat`.
TransportTrace ballistic_transport(const HermitianOperator& h_hat,
                                   const SpectralDecomposition& spectrum,
                                   const LatticeGeometry& geometry,
                                   const AntiUnitary& tau, const Interval& delta,
                                   double v_max,
                                   const TransportSettings& settings);

}  // namespace z2edge
