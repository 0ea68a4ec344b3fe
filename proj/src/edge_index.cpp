#include "z2edge/edge_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "z2edge/bulk_index.hpp"

namespace z2edge {

namespace {

void require_cylinder(const LatticeGeometry& g, const char* who) {
  if (g.boundary_x() != Boundary::periodic || g.boundary_y() != Boundary::open) {
    std::ostringstream os;
    os << who << ": geometry must be a cylinder (periodic x1, open x2)";
    throw InvalidArgument(os.str());
  }
}

// Least-squares fit of log(norm) = log(C) - d / xi over positive entries.
void fit_decay(DecayProfile& profile) {
  double n = 0, sd = 0, sl = 0, sdd = 0, sdl = 0;
  for (std::size_t i = 0; i < profile.distance.size(); ++i) {
    if (profile.max_norm[i] <= 1e-300) continue;
    const double d = profile.distance[i];
    const double l = std::log(profile.max_norm[i]);
    n += 1;
    sd += d;
    sl += l;
    sdd += d * d;
    sdl += d * l;
  }
  if (n < 2 || n * sdd - sd * sd == 0.0) {
    profile.decay_length = std::numeric_limits<double>::infinity();
    profile.prefactor = 0.0;
    return;
  }
  const double slope = (n * sdl - sd * sl) / (n * sdd - sd * sd);
  const double intercept = (sl - slope * sd) / n;
  profile.decay_length =
      slope < 0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  profile.prefactor = std::exp(intercept);
}

DecayProfile tabulate(const std::map<double, double>& table) {
  DecayProfile p;
  for (const auto& [d, v] : table) {
    p.distance.push_back(d);
    p.max_norm.push_back(v);
  }
  fit_decay(p);
  return p;
}

}  // namespace

GapFunction::GapFunction(double a, double b) : a_(a), b_(b) {
  if (!(a < b)) {
    throw InvalidArgument("GapFunction: empty interval (need a < b)");
  }
}

double GapFunction::operator()(double x) const {
  if (x <= a_) return 1.0;
  if (x >= b_) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (x - a_) / (b_ - a_)));
}

double GapFunction::derivative(double x) const {
  if (x <= a_ || x >= b_) return 0.0;
  const double w = b_ - a_;
  return -0.5 * std::numbers::pi / w * std::sin(std::numbers::pi * (x - a_) / w);
}

cplx GapFunction::phase(double x) const {
  const double g = (*this)(x);
  // g in {0, 1} must give exactly 1.
  if (g == 0.0 || g == 1.0) return 1.0;
  return std::polar(1.0, 2.0 * std::numbers::pi * g);
}

GapFunction make_gap_function(const Interval& delta) {
  return GapFunction(delta.lower, delta.upper);
}

UnitaryOperator edge_unitary(const SpectralDecomposition& h_hat,
                             const GapFunction& g) {
  return UnitaryOperator(
      functional_calculus(h_hat, [&g](double x) { return g.phase(x); }), 1e-9);
}

UnitaryOperator edge_unitary(const HermitianOperator& h_hat,
                             const GapFunction& g) {
  return edge_unitary(spectral_decomposition(h_hat), g);
}

int default_cut_column(const LatticeGeometry& geometry) {
  return geometry.lx() / 2;
}

Eigen::Vector2d default_corner(const LatticeGeometry& geometry,
                               int cut_column) {
  (void)geometry;
  return {cut_column - 0.5, 0.0};
}

ProjectionOperator quadrant_projection(const LatticeGeometry& geometry,
                                       int cut_column) {
  const int cut = cut_column < 0 ? default_cut_column(geometry) : cut_column;
  if (cut > geometry.lx()) {
    throw InvalidArgument("quadrant_projection: cut column outside the lattice");
  }
  RealVector d(geometry.dimension());
  for (Index i = 0; i < d.size(); ++i) {
    d(i) = geometry.site_of(i).x1 >= cut ? 1.0 : 0.0;
  }
  return ProjectionOperator(d.cast<cplx>().asDiagonal().toDenseMatrix());
}

CommutatorReport commutator_decay_report(const Matrix& u_e,
                                         const Matrix& projection,
                                         const LatticeGeometry& geometry,
                                         int cut_column) {
  const int cut = cut_column < 0 ? default_cut_column(geometry) : cut_column;
  const Matrix c = u_e * projection - projection * u_e;
  CommutatorReport report;
  const Matrix a = u_e * projection * u_e.adjoint() - projection;
  report.identity_residual = frobenius(a - c * u_e.adjoint());
  report.hilbert_schmidt = frobenius(c);
  report.trace_norm = schatten_norm(c, 1.0);

  const int n = geometry.orbitals();
  std::map<double, double> by_cut, by_edge;
  for (Index s = 0; s < geometry.sites(); ++s) {
    const Site site = geometry.site_of(s * n);
    const double row = c.middleRows(s * n, n).norm();
    // Cut lines sit at x1 = cut - 1/2 and x1 = -1/2 (wrapping).
    auto ring = [&](double line) {
      double d = std::abs(site.x1 - line);
      return std::min(d, geometry.lx() - d);
    };
    const double dc = std::min(ring(cut - 0.5), ring(-0.5));
    const double de = std::min(site.x2, geometry.ly() - 1 - site.x2);
    by_cut[dc] = std::max(by_cut[dc], row);
    by_edge[de] = std::max(by_edge[de], row);
  }
  report.from_cut = tabulate(by_cut);
  report.from_edge = tabulate(by_edge);
  return report;
}

namespace {

struct EdgeRun {
  IndexReport report;
  Matrix u_e;
};

EdgeRun edge_run(const HermitianOperator& h_hat, const AntiUnitary& tau,
                 const LatticeGeometry& geometry, const GapFunction& g,
                 const IndexSettings& settings, int cut_column) {
  require_cylinder(geometry, "edge_index");
  if (h_hat.dimension() != geometry.dimension() ||
      tau.dimension() != geometry.dimension()) {
    throw InvalidArgument("edge_index: dimension mismatch");
  }
  const TrsCheck trs = verify_trs(h_hat.matrix(), tau);
  if (!trs.pass) {
    std::ostringstream os;
    os << "edge_index: half-space Hamiltonian is not time-reversal symmetric "
          "(residual "
       << trs.residual << ")";
    throw InvalidArgument(os.str());
  }
  const int cut = cut_column < 0 ? default_cut_column(geometry) : cut_column;
  const SpectralDecomposition spectrum = spectral_decomposition(h_hat);
  const UnitaryOperator u_e = edge_unitary(spectrum, g);
  const Matrix& u = u_e.matrix();

  const double covariance =
      frobenius(conjugate_by_antiunitary(tau, u) - u.adjoint());
  if (covariance > 1e-9 * std::sqrt(double(u.rows()))) {
    std::ostringstream os;
    os << "edge_index: tau U_E tau^* != U_E^* (residual " << covariance << ")";
    throw NumericalError(os.str());
  }

  // U_E - 1 vanishes off the Delta eigenspace.
  std::vector<Index> outside;
  for (Index i = 0; i < spectrum.dimension(); ++i) {
    const double e = spectrum.eigenvalues(i);
    if (e <= g.lower() || e >= g.upper()) outside.push_back(i);
  }
  const Matrix off = spectrum.columns(outside);
  const double off_gap = frobenius((u - Matrix::Identity(u.rows(), u.cols())) * off);

  const ProjectionOperator pi = quadrant_projection(geometry, cut);
  const Matrix a = u * pi.matrix() * u.adjoint() - pi.matrix();
  const SpectralDecomposition a_spec = spectral_decomposition(a);

  const double radius = settings.filter_radius > 0
                            ? settings.filter_radius
                            : std::min(geometry.lx(), geometry.ly()) / 4.0;
  LocalizationFilter filter{geometry, default_corner(geometry, cut), radius,
                            settings.edge_trace_margin, CountRule::trace};
  IndexReport report = localized_count(a_spec, filter, settings);
  report.checks["trs_residual"] = trs.residual;
  report.checks["tau_covariance_residual"] = covariance;
  report.checks["identity_off_gap_residual"] = off_gap;
  report.checks["cut_column"] = cut;
  report.checks["delta_lower"] = g.lower();
  report.checks["delta_upper"] = g.upper();
  Index in_gap = spectrum.dimension() - static_cast<Index>(outside.size());
  report.checks["states_in_delta"] = static_cast<double>(in_gap);
  return {std::move(report), u};
}

}  // namespace

IndexReport edge_index(const HermitianOperator& h_hat, const AntiUnitary& tau,
                       const LatticeGeometry& geometry, const GapFunction& g,
                       const IndexSettings& settings, int cut_column) {
  return edge_run(h_hat, tau, geometry, g, settings, cut_column).report;
}

FredholmReport fredholm_cross_check(
    const Matrix& u, const Matrix& p,
    const std::optional<LocalizationFilter>& filter,
    const IndexSettings& settings) {
  if (u.rows() != p.rows() || u.cols() != p.cols() || u.rows() != u.cols()) {
    throw InvalidArgument("fredholm_cross_check: dimension mismatch");
  }
  const Index n = u.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix f = p * u * p + (id - p);
  const SpectralDecomposition gram = spectral_decomposition(f.adjoint() * f);

  FredholmReport report;
  report.singular_values = gram.eigenvalues.cwiseMax(0.0).cwiseSqrt();

  const std::vector<double> tols = normalized_sweep(settings.tol_sweep);
  const RealVector mask = filter ? filter->mask() : RealVector::Ones(n);
  const double threshold = filter ? filter->threshold : 0.0;
  const CountRule rule = filter ? filter->rule : CountRule::threshold;

  const bool guarded = settings.guard_factor > 1.0;
  const double widest = tols.front() * (guarded ? settings.guard_factor : 1.0);
  std::vector<Index> candidates;
  for (Index i = 0; i < n; ++i) {
    const double s = std::min(report.singular_values(i), 1.0);
    if (1.0 - std::sqrt(1.0 - s * s) < widest) candidates.push_back(i);
  }
  const Matrix c = gram.columns(candidates);
  RealVector distances(static_cast<Index>(candidates.size()));
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    const double s = std::min(report.singular_values(candidates[q]), 1.0);
    distances(Index(q)) = 1.0 - std::sqrt(1.0 - s * s);
    if (distances(Index(q)) >= tols.front()) continue;
    const Vector& psi = c.col(Index(q));
    const Vector up = u * psi;
    const Vector defect = u * (p * psi) - p * up - up;
    const double excess = defect.norm() - s;
    report.max_correspondence_residual =
        std::max(report.max_correspondence_residual, excess);
    if (excess > 1e-6) report.correspondence_holds = false;
  }
  report.kernel_candidates = static_cast<Index>(candidates.size());
  // Localize the image U psi, the matching vector of A.
  IndexReport plateau;
  const Matrix images = u * c;
  plateau.sweep = localized_sweep(images, distances, mask, threshold, rule, tols);
  if (guarded) {
    plateau.guard =
        localized_sweep(images, distances, mask, threshold, rule, {widest}).front();
  }
  resolve_plateau(plateau, settings.plateau_decades);
  report.sweep = plateau.sweep;
  report.guard = plateau.guard;
  report.z2 = plateau.z2;
  return report;
}

const char* to_string(CompareStatus s) {
  switch (s) {
    case CompareStatus::agree:
      return "agree";
    case CompareStatus::disagree:
      return "disagree";
    case CompareStatus::inconclusive:
      break;
  }
  return "inconclusive";
}

Interval gap_window(const Interval& gap, double mu, double gap_fraction) {
  return {mu - gap_fraction * (mu - gap.lower),
          mu + gap_fraction * (gap.upper - mu)};
}

BulkEdgeRow bulk_edge_check(const ModelSpec& spec, double mu,
                            const CompareSettings& settings) {
  BulkEdgeRow row;
  row.spec = spec;
  const int lx = spec.geometry.lx();
  const int ly = spec.geometry.ly();
  const int n = spec.geometry.orbitals();

  ModelSpec bulk_spec = spec;
  bulk_spec.geometry = LatticeGeometry::torus(lx, ly, n);
  const HermitianOperator h = build_bulk_hamiltonian(bulk_spec);
  const AntiUnitary tau_bulk = build_time_reversal(bulk_spec.geometry);

  row.gap = spectral_gap(h, mu);
  if (!row.gap || !std::isfinite(row.gap->lower) ||
      !std::isfinite(row.gap->upper)) {
    row.reason = "no bulk gap at mu";
    return row;
  }
  row.delta = gap_window(*row.gap, mu, settings.gap_fraction);

  const IndexReport bulk =
      bulk_index(h, tau_bulk, bulk_spec.geometry, mu, settings.index);
  row.bulk = bulk.z2;
  row.bulk_exact_kernel = bulk.exact_kernel_dim;

  ModelSpec edge_spec = spec;
  edge_spec.geometry = LatticeGeometry::cylinder(lx, ly, n);
  const HermitianOperator h_hat = build_half_space_hamiltonian(edge_spec);
  const AntiUnitary tau_edge = build_time_reversal(edge_spec.geometry);
  const GapFunction g = make_gap_function(*row.delta);
  const EdgeRun edge =
      edge_run(h_hat, tau_edge, edge_spec.geometry, g, settings.index, -1);
  row.edge = edge.report.z2;
  row.edge_exact_kernel = edge.report.exact_kernel_dim;

  const ProjectionOperator pi = quadrant_projection(edge_spec.geometry);
  const LocalizationFilter filter{edge_spec.geometry, edge.report.center,
                                  edge.report.filter_radius,
                                  edge.report.localization_threshold,
                                  edge.report.rule};
  row.fredholm =
      fredholm_cross_check(edge.u_e, pi.matrix(), filter, settings.index).z2;

  if (row.bulk == Z2Value::undetermined || row.edge == Z2Value::undetermined) {
    row.status = CompareStatus::inconclusive;
    row.reason = "no stable plateau";
  } else {
    row.status = row.bulk == row.edge ? CompareStatus::agree
                                      : CompareStatus::disagree;
  }
  return row;
}

}  // namespace z2edge
