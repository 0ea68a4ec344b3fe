#include "z2edge/index_common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

namespace z2edge {

const char* to_string(Z2Value z) {
  switch (z) {
    case Z2Value::zero:
      return "0";
    case Z2Value::one:
      return "1";
    case Z2Value::undetermined:
      break;
  }
  return "undetermined";
}

const char* to_string(CountRule r) {
  return r == CountRule::trace ? "trace" : "threshold";
}

double LocalizationFilter::weight(const Vector& v) const {
  const double total = v.squaredNorm();
  if (total == 0.0) return 0.0;
  double inside = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (geometry.distance(geometry.site_of(i), center) <= radius) {
      inside += std::norm(v(i));
    }
  }
  return inside / total;
}

RealVector LocalizationFilter::mask() const {
  RealVector m(geometry.dimension());
  for (Index i = 0; i < m.size(); ++i) {
    m(i) = geometry.distance(geometry.site_of(i), center) <= radius ? 1.0 : 0.0;
  }
  return m;
}

double LocalizationFilter::radius_holding(const Vector& v,
                                          double fraction) const {
  std::vector<std::pair<double, double>> by_distance;
  const double total = v.squaredNorm();
  if (total == 0.0) return 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    by_distance.emplace_back(geometry.distance(geometry.site_of(i), center),
                             std::norm(v(i)) / total);
  }
  std::sort(by_distance.begin(), by_distance.end());
  double acc = 0.0;
  for (const auto& [d, w] : by_distance) {
    acc += w;
    if (acc >= fraction) return d;
  }
  return by_distance.back().first;
}

std::vector<double> normalized_sweep(const std::vector<double>& tols) {
  if (tols.empty()) throw InvalidArgument("tolerance sweep is empty");
  std::vector<double> out = tols;
  for (double t : out) {
    if (!(t > 0.0)) throw InvalidArgument("sweep tolerances must be positive");
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void resolve_plateau(IndexReport& report, double decades) {
  report.plateau.reset();
  report.z2 = Z2Value::undetermined;
  const auto& rows = report.sweep;
  if (rows.empty()) return;
  std::size_t end = 0;
  if (!rows[0].resolved) return;
  if (report.guard && (!report.guard->resolved ||
                       report.guard->count % 2 != rows[0].count % 2)) {
    return;
  }
  while (end + 1 < rows.size() && rows[end + 1].resolved &&
         rows[end + 1].count % 2 == rows[0].count % 2) {
    ++end;
  }
  const double span = std::log10(rows[0].tol / rows[end].tol);
  if (span >= decades - 1e-9) {
    report.plateau = std::make_pair(std::size_t{0}, end);
    report.z2 = rows[0].count % 2 ? Z2Value::one : Z2Value::zero;
  }
}

double pairing_residual(const RealVector& ascending) {
  const Index n = ascending.size();
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(ascending(i) + ascending(n - 1 - i)));
  }
  return worst;
}

std::vector<SweepRow> localized_sweep(const Matrix& vectors,
                                     const RealVector& distances,
                                     const RealVector& mask, double threshold,
                                     CountRule rule,
                                     const std::vector<double>& tols) {
  const Matrix local =
      vectors.adjoint() * mask.cast<cplx>().asDiagonal() * vectors;
  std::vector<SweepRow> rows;
  for (double t : tols) {
    std::vector<Index> inside;
    for (Index q = 0; q < distances.size(); ++q) {
      if (distances(q) < t) inside.push_back(q);
    }
    SweepRow row{t, 0};
    if (!inside.empty()) {
      const Index k = static_cast<Index>(inside.size());
      Matrix sub(k, k);
      for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) sub(i, j) = local(inside[i], inside[j]);
      }
      Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sub + sub.adjoint()),
                                                   Eigen::EigenvaluesOnly);
      row.trace = solver.eigenvalues().sum();
      if (rule == CountRule::trace) {
        const double nearest = std::round(row.trace);
        row.count = static_cast<Index>(nearest);
        row.resolved = std::abs(row.trace - nearest) <= threshold;
      } else {
        for (Index i = 0; i < k; ++i) {
          if (solver.eigenvalues()(i) >= threshold) ++row.count;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

IndexReport localized_count(const SpectralDecomposition& a,
                            const LocalizationFilter& filter,
                            const IndexSettings& settings) {
  IndexReport report;
  report.spectrum = a.eigenvalues;
  report.center = filter.center;
  report.filter_radius = filter.radius;
  report.localization_threshold = filter.threshold;
  report.rule = filter.rule;
  report.pairing_residual = pairing_residual(a.eigenvalues);

  const std::vector<double> tols = normalized_sweep(settings.tol_sweep);
  const bool guarded = settings.guard_factor > 1.0;
  const double widest = tols.front() * (guarded ? settings.guard_factor : 1.0);
  std::vector<Index> candidates;
  for (Index i = 0; i < a.dimension(); ++i) {
    const double d = std::abs(a.eigenvalues(i) - 1.0);
    if (d < settings.exact_kernel_tol) ++report.exact_kernel_dim;
    if (d < widest) candidates.push_back(i);
  }

  const RealVector mask = filter.mask();
  const Matrix c = a.columns(candidates);
  RealVector distances(static_cast<Index>(candidates.size()));
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    distances(Index(q)) = std::abs(a.eigenvalues(candidates[q]) - 1.0);
  }
  report.sweep = localized_sweep(c, distances, mask, filter.threshold,
                                 filter.rule, tols);
  if (guarded) {
    report.guard = localized_sweep(c, distances, mask, filter.threshold,
                                   filter.rule, {widest})
                       .front();
  }
  const Matrix local = c.adjoint() * mask.cast<cplx>().asDiagonal() * c;

  // Mode table: localization eigenvectors of the guard subspace,
  // most localized first, with their Rayleigh quotient for A.
  if (!candidates.empty()) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (local + local.adjoint()));
    for (Index k = static_cast<Index>(candidates.size()) - 1; k >= 0; --k) {
      const Vector y = solver.eigenvectors().col(k);
      double value = 0.0;
      Index dominant = 0;
      double top = -1.0;
      for (std::size_t q = 0; q < candidates.size(); ++q) {
        const double w = std::norm(y(static_cast<Index>(q)));
        value += w * a.eigenvalues(candidates[q]);
        if (w > top) {
          top = w;
          dominant = candidates[q];
        }
      }
      ModeRecord mode;
      mode.index = dominant;
      mode.eigenvalue = value;
      mode.distance_to_one = std::abs(value - 1.0);
      mode.weight = std::clamp(solver.eigenvalues()(k), 0.0, 1.0);
      mode.radius90 = filter.radius_holding(c * y, 0.9);
      mode.localized = mode.weight >= (filter.rule == CountRule::trace
                                           ? 0.5
                                           : filter.threshold);
      report.modes.push_back(mode);
    }
  }
  resolve_plateau(report, settings.plateau_decades);
  return report;
}

}  // namespace z2edge
