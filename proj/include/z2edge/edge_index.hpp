#pragma once

// Edge unitary U_E = W_g(H_hat) on the cylinder, the half-ring projection,
// commutator locality diagnostics, the edge Z2 index, the Fredholm
// cross-check F = P U P + P^perp, and the bulk-edge comparison.

#include <optional>
#include <string>
#include <vector>

#include "z2edge/index_common.hpp"
#include "z2edge/lattice_models.hpp"
#include "z2edge/operator_core.hpp"

namespace z2edge {

// Cosine ramp: 1 below a, 0 above b, (1 + cos(pi (x - a) / (b - a))) / 2 in
// between.
class GapFunction {
 public:
  GapFunction(double a, double b);

  double lower() const { return a_; }
  double upper() const { return b_; }

  double operator()(double x) const;
  double derivative(double x) const;
  // W_g(x) = exp(2 pi i g(x)).
  cplx phase(double x) const;

 private:
  double a_, b_;
};

GapFunction make_gap_function(const Interval& delta);

UnitaryOperator edge_unitary(const SpectralDecomposition& h_hat,
                             const GapFunction& g);
UnitaryOperator edge_unitary(const HermitianOperator& h_hat,
                             const GapFunction& g);

// Diagonal projection onto sites with x1 in [cut_column, Lx). A negative
// cut_column selects Lx / 2.
ProjectionOperator quadrant_projection(const LatticeGeometry& geometry,
                                       int cut_column = -1);

int default_cut_column(const LatticeGeometry& geometry);

// Corner where the cut column meets the open edge x2 = 0.
Eigen::Vector2d default_corner(const LatticeGeometry& geometry, int cut_column);

struct DecayProfile {
  std::vector<double> distance;
  std::vector<double> max_norm;   // max site-row norm at that distance
  double decay_length = 0.0;      // exponential fit, inf if no decay
  double prefactor = 0.0;
};

struct CommutatorReport {
  DecayProfile from_cut;          // distance of x1 from the nearest cut
  DecayProfile from_edge;         // distance of x2 from the nearest open edge
  double trace_norm = 0.0;        // Schatten-1 of [U_E, Pi]
  double hilbert_schmidt = 0.0;
  double identity_residual = 0.0; // ||A_E - [U_E, Pi] U_E^*||
};

CommutatorReport commutator_decay_report(const Matrix& u_e,
                                         const Matrix& projection,
                                         const LatticeGeometry& geometry,
                                         int cut_column = -1);

// Edge index. Throws InvalidArgument when the geometry is not a cylinder or
// H_hat is not time-reversal symmetric, NumericalError when the derived
// symmetry tau U_E tau^* = U_E^* fails beyond 1e-9.
IndexReport edge_index(const HermitianOperator& h_hat, const AntiUnitary& tau,
                       const LatticeGeometry& geometry, const GapFunction& g,
                       const IndexSettings& settings, int cut_column = -1);

struct FredholmReport {
  RealVector singular_values;       // ascending singular values of F
  std::vector<SweepRow> sweep;
  std::optional<SweepRow> guard;
  Z2Value z2 = Z2Value::undetermined;
  Index kernel_candidates = 0;      // kept vectors within the guard tol
  double max_correspondence_residual = 0.0;  // max ||(A-1) U psi|| - sigma
  bool correspondence_holds = true;
};

// Counts singular values sigma of F = P U P + P^perp with
// 1 - sqrt(1 - sigma^2) < tol, i.e. on the same scale as the distance of the
// matching eigenvalue of A = U P U^* - P from 1. For every kept vector psi,
// checks ||(A - 1) U psi|| <= sigma + 1e-6.
FredholmReport fredholm_cross_check(
    const Matrix& u, const Matrix& p,
    const std::optional<LocalizationFilter>& filter,
    const IndexSettings& settings);

enum class CompareStatus { agree, disagree, inconclusive };
const char* to_string(CompareStatus s);

struct BulkEdgeRow {
  ModelSpec spec;
  Z2Value bulk = Z2Value::undetermined;
  Z2Value edge = Z2Value::undetermined;
  Z2Value fredholm = Z2Value::undetermined;
  CompareStatus status = CompareStatus::inconclusive;
  std::string reason;
  std::optional<Interval> gap;
  std::optional<Interval> delta;
  Index bulk_exact_kernel = 0;
  Index edge_exact_kernel = 0;
};

struct CompareSettings {
  IndexSettings index;
  double gap_fraction = 0.8;  // Delta spans this fraction of the bulk gap
};

// Runs both indices for spec.geometry's Lx, Ly: the torus for the bulk, the
// cylinder for the edge. Science failures (no gap, no plateau) become an
// inconclusive row, never an exception.
BulkEdgeRow bulk_edge_check(const ModelSpec& spec, double mu,
                            const CompareSettings& settings);

// Delta = mu +- gap_fraction * (distance to each gap edge).
Interval gap_window(const Interval& gap, double mu, double gap_fraction);

}  // namespace z2edge
