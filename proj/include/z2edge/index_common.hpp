#pragma once

// Shared machinery for the bulk and edge Z2 indices: defect-localized
// counting of near +1 eigenvalues and the tolerance-sweep plateau rule.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "z2edge/lattice_models.hpp"
#include "z2edge/operator_core.hpp"

namespace z2edge {

enum class Z2Value { zero, one, undetermined };

const char* to_string(Z2Value z);

struct IndexSettings {
  std::vector<double> tol_sweep = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double plateau_decades = 1.0;
  // Guard row at guard_factor times the widest tol; its parity must match
  // the top sweep row. Catches a defect mode pushed just past the widest tol
  // by hybridizing with a partner elsewhere, which would otherwise read as a
  // confident zero. Values <= 1 disable the guard.
  double guard_factor = 3.1622776601683795;
  // <= 0 selects a quarter of the linear system size.
  double filter_radius = 0.0;
  double localization_threshold = 0.9;
  // The edge index counts by trace: at desk sizes the corner modes spread
  // along the Lx / 2 sites between the two cut columns, so no single mode
  // passes a weight threshold, while the total weight the near +1 subspace
  // puts on the corner stays close to an integer. A trace farther than this
  // margin from an integer leaves the sweep row unresolved.
  double edge_trace_margin = 0.25;
  double exact_kernel_tol = 1e-10;
};

// threshold: count localization eigenvalues >= threshold.
// trace: round the total localization weight of the subspace.
enum class CountRule { threshold, trace };

const char* to_string(CountRule r);

// Weight of a vector on the sites within `radius` of `center`. For the trace
// rule `threshold` is the margin around an integer.
struct LocalizationFilter {
  LatticeGeometry geometry;
  Eigen::Vector2d center;
  double radius;
  double threshold;
  CountRule rule = CountRule::threshold;

  double weight(const Vector& v) const;
  // 1 on flat indices whose site lies within the radius, else 0.
  RealVector mask() const;
  // Smallest distance from the center within which v has `fraction` of its
  // weight.
  double radius_holding(const Vector& v, double fraction) const;
  bool keeps(const Vector& v) const {
    return weight(v) >= (rule == CountRule::trace ? 0.5 : threshold);
  }
};

struct ModeRecord {
  Index index = 0;          // dominant eigenvector in the ascending spectrum
  double eigenvalue = 0.0;
  double distance_to_one = 0.0;
  double weight = 0.0;      // localization weight near the defect
  double radius90 = 0.0;    // smallest radius around the defect holding 90%
  bool localized = false;
};

struct SweepRow {
  double tol = 0.0;
  // Localized directions in the spectral subspace |lambda - 1| < tol.
  Index count = 0;
  double trace = 0.0;       // total localization weight of that subspace
  bool resolved = true;     // false when the trace rule finds no integer
};

struct IndexReport {
  RealVector spectrum;               // full ascending spectrum of A
  // Localization eigenvectors of the candidate subspace up to the guard.
  std::vector<ModeRecord> modes;
  std::vector<SweepRow> sweep;       // ordered by descending tol
  std::optional<SweepRow> guard;     // above the widest tol
  Z2Value z2 = Z2Value::undetermined;
  std::optional<std::pair<std::size_t, std::size_t>> plateau;  // sweep rows
  Eigen::Vector2d center{0.0, 0.0};
  double filter_radius = 0.0;
  double localization_threshold = 0.0;
  CountRule rule = CountRule::threshold;
  Index exact_kernel_dim = 0;        // unfiltered, at exact_kernel_tol
  double pairing_residual = 0.0;     // max |lambda_i + lambda_{n-1-i}|
  std::map<std::string, double> checks;
};

// The plateau is the maximal run of rows with equal count parity starting at
// the largest tol, all of them resolved; it must span at least `decades` decades, otherwise z2 is
// undetermined. Finite-volume corrections push genuine +1 modes off by a
// small amount, so the smallest tolerances may lose them; a parity change
// right below the largest tol, or between the guard row and the largest tol,
// instead means a mode sits at an unresolved distance from 1.
void resolve_plateau(IndexReport& report, double decades);

// For each tol, compresses the localization mask onto the columns of
// `vectors` (orthonormal) whose distance is below tol and counts by the
// filter rule. The count does not depend on how (near-)degenerate vectors
// were resolved.
std::vector<SweepRow> localized_sweep(const Matrix& vectors,
                                      const RealVector& distances,
                                      const RealVector& mask, double threshold,
                                      CountRule rule,
                                      const std::vector<double>& tols);

// Fills modes, sweep, plateau and z2 from the spectrum of A.
IndexReport localized_count(const SpectralDecomposition& a,
                            const LocalizationFilter& filter,
                            const IndexSettings& settings);

// max_i |lambda_i + lambda_{n-1-i}| over an ascending spectrum. Zero for an
// exactly symmetric spectrum.
double pairing_residual(const RealVector& ascending);

// Sorted, descending copy of the sweep tolerances; rejects non-positive ones.
std::vector<double> normalized_sweep(const std::vector<double>& tols);

}  // namespace z2edge
