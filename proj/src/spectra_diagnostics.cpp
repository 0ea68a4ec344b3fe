#include "z2edge/spectra_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "z2edge/wold_engine.hpp"

namespace z2edge {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_clean(const ModelSpec& spec, const char* who) {
  if (spec.disorder != 0.0) {
    throw InvalidArgument(std::string(who) +
                          ": disordered spec breaks translation invariance");
  }
}

RealVector fiber_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Displacement from `origin` along a periodic axis of length l, in
// [-l/2, l/2).
double wrapped(double x, double origin, int l) {
  double d = std::fmod(x - origin, double(l));
  if (d < -0.5 * l) d += l;
  if (d >= 0.5 * l) d -= l;
  return d;
}

struct Moments {
  double mean = 0.0;
  double spread = 0.0;
};

Moments column_moments(const Vector& psi, const std::vector<double>& offset) {
  Moments m;
  double total = 0.0;
  for (Index i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi(i));
    total += p;
    m.mean += p * offset[std::size_t(i)];
  }
  m.mean /= total;
  for (Index i = 0; i < psi.size(); ++i) {
    const double d = offset[std::size_t(i)] - m.mean;
    m.spread += std::norm(psi(i)) * d * d;
  }
  m.spread /= total;
  return m;
}

}  // namespace

Matrix bloch_fiber(const ModelSpec& spec, double k1, double k2) {
  require_clean(spec, "bloch_fiber");
  const HoppingTerms t = clean_terms(spec);
  const cplx e1 = std::polar(1.0, -k1);
  const cplx e2 = std::polar(1.0, -k2);
  Matrix h = t.onsite + e1 * t.hop_x + e2 * t.hop_y;
  h += (e1 * t.hop_x + e2 * t.hop_y).adjoint();
  return h;
}

std::optional<Interval> bloch_gap(const ModelSpec& spec, double mu, int nk) {
  if (nk <= 0) throw InvalidArgument("bloch_gap: nk must be positive");
  std::vector<double> all;
  for (int a = 0; a < nk; ++a) {
    for (int b = 0; b < nk; ++b) {
      const RealVector e =
          fiber_eigenvalues(bloch_fiber(spec, two_pi * a / nk, two_pi * b / nk));
      all.insert(all.end(), e.data(), e.data() + e.size());
    }
  }
  std::sort(all.begin(), all.end());
  return spectral_gap(Eigen::Map<RealVector>(all.data(), Index(all.size())), mu);
}

Matrix cylinder_fiber(const ModelSpec& spec, double k) {
  require_clean(spec, "cylinder_fiber");
  const HoppingTerms t = clean_terms(spec);
  const int ly = spec.geometry.ly();
  const Index n = t.onsite.rows();
  const cplx e = std::polar(1.0, -k);
  const Matrix diag = t.onsite + e * t.hop_x + (e * t.hop_x).adjoint();
  Matrix h = Matrix::Zero(ly * n, ly * n);
  for (int y = 0; y < ly; ++y) {
    h.block(y * n, y * n, n, n) = diag;
    if (y + 1 < ly) {
      h.block((y + 1) * n, y * n, n, n) = t.hop_y;
      h.block(y * n, (y + 1) * n, n, n) = t.hop_y.adjoint();
    }
  }
  return h;
}

BandStructure cylinder_bands(const ModelSpec& spec, int k_points,
                             double edge_tag_threshold) {
  require_clean(spec, "cylinder_bands");
  if (k_points <= 0 || k_points % 2 != 0) {
    throw InvalidArgument("cylinder_bands: k_points must be positive and even");
  }
  const int ly = spec.geometry.ly();
  const Index n = clean_terms(spec).onsite.rows();
  const Index dim = ly * n;
  BandStructure bands;
  bands.ly = ly;
  bands.edge_tag_threshold = edge_tag_threshold;
  bands.energies.resize(k_points, dim);
  bands.edge_weight.resize(k_points, dim);
  for (int j = 0; j < k_points; ++j) {
    const double k = two_pi * j / k_points;
    bands.k.push_back(k);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cylinder_fiber(spec, k));
    bands.energies.row(j) = solver.eigenvalues().transpose();
    for (Index b = 0; b < dim; ++b) {
      double w = 0.0;
      for (Index i = 0; i < dim; ++i) {
        const int y = int(i / n);
        if (y < 2 || y >= ly - 2) w += std::norm(solver.eigenvectors()(i, b));
      }
      bands.edge_weight(j, b) = w;
    }
  }
  for (int j : {0, k_points / 2}) {
    for (Index b = 0; b + 1 < dim; b += 2) {
      if (bands.edge_tagged(j, b) || bands.edge_tagged(j, b + 1)) {
        bands.kramers_residual =
            std::max(bands.kramers_residual,
                     std::abs(bands.energies(j, b + 1) - bands.energies(j, b)));
      }
    }
  }
  for (int j = 1; j < k_points; ++j) {
    const double r =
        (bands.energies.row(j) - bands.energies.row(k_points - j)).cwiseAbs().maxCoeff();
    bands.reflection_residual = std::max(bands.reflection_residual, r);
  }
  return bands;
}

CoverageReport branch_coverage(const BandStructure& bands, const Interval& delta,
                               int probes) {
  if (probes <= 0) throw InvalidArgument("branch_coverage: probes must be positive");
  CoverageReport report;
  const Index nk = bands.energies.rows();
  const Index nb = bands.energies.cols();
  for (Index j = 0; j < nk; ++j) {
    for (Index b = 0; b < nb; ++b) {
      if (delta.contains(bands.energies(j, b))) ++report.eigenvalues_in_delta;
    }
  }
  const double dk = two_pi / double(nk);
  for (Index j = 0; j < nk; ++j) {
    const Index next = (j + 1) % nk;
    for (Index b = 0; b < nb; ++b) {
      const double e0 = bands.energies(j, b);
      const double e1 = bands.energies(next, b);
      if (bands.edge_tagged(j, b) && bands.edge_tagged(next, b) &&
          delta.contains(e0) && delta.contains(e1)) {
        report.max_edge_velocity =
            std::max(report.max_edge_velocity, std::abs(e1 - e0) / dk);
      }
    }
  }
  // Branches touch at Kramers points, where rounding can open a gap of a few
  // ulps between the sorted bands.
  constexpr double touch = 1e-9;
  int covered = 0;
  for (int p = 0; p < probes; ++p) {
    const double e = delta.lower + delta.width() * (p + 0.5) / probes;
    bool hit = false;
    for (Index j = 0; j < nk && !hit; ++j) {
      const Index next = (j + 1) % nk;
      for (Index b = 0; b < nb && !hit; ++b) {
        const double lo = std::min(bands.energies(j, b), bands.energies(next, b));
        const double hi = std::max(bands.energies(j, b), bands.energies(next, b));
        hit = lo - touch <= e && e <= hi + touch &&
              (bands.edge_tagged(j, b) || bands.edge_tagged(next, b));
      }
    }
    report.probes.push_back(e);
    report.covered.push_back(hit);
    covered += hit ? 1 : 0;
  }
  report.fraction = double(covered) / probes;
  return report;
}

double gap_filling_fraction(const RealVector& eigenvalues, const Interval& delta,
                            double resolution) {
  if (!(resolution > 0.0) || !(delta.width() > 0.0)) {
    throw InvalidArgument("gap_filling_fraction: empty window or resolution");
  }
  const auto bins = std::max<Index>(1, Index(std::llround(delta.width() / resolution)));
  const double width = delta.width() / double(bins);
  std::vector<bool> hit(std::size_t(bins), false);
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double e = eigenvalues(i);
    if (e < delta.lower || e > delta.upper) continue;
    const auto b = std::min<Index>(bins - 1, Index((e - delta.lower) / width));
    hit[std::size_t(b)] = true;
  }
  return double(std::count(hit.begin(), hit.end(), true)) / double(bins);
}

TransportTrace ballistic_transport(const HermitianOperator& h_hat,
                                   const SpectralDecomposition& spectrum,
                                   const LatticeGeometry& geometry,
                                   const AntiUnitary& tau, const Interval& delta,
                                   double v_max,
                                   const TransportSettings& settings) {
  const Index n = h_hat.dimension();
  if (spectrum.dimension() != n || geometry.dimension() != n ||
      tau.dimension() != n) {
    throw InvalidArgument("ballistic_transport: dimension mismatch");
  }
  if (!(v_max > 0.0)) throw InvalidArgument("ballistic_transport: v_max must be positive");
  const int x1 = settings.x1 < 0 ? geometry.lx() / 2 : settings.x1;
  if (x1 >= geometry.lx() || settings.x2 < 0 || settings.x2 >= geometry.ly()) {
    throw InvalidArgument("ballistic_transport: start site outside the lattice");
  }

  TransportTrace trace;
  trace.v_max = v_max;
  trace.wrap_time = geometry.lx() / (2.0 * v_max);

  // Start from the site vector with the largest weight in P_Delta. The
  // compressed projection is Kramers degenerate, so the top pair is fixed by
  // its canonical basis.
  const Matrix& v = spectrum.eigenvectors;
  const int orbitals = geometry.orbitals();
  std::vector<Index> in_delta;
  for (Index i = 0; i < n; ++i) {
    if (delta.contains(spectrum.eigenvalues(i))) in_delta.push_back(i);
  }
  Matrix rows(orbitals, Index(in_delta.size()));
  for (int o = 0; o < orbitals; ++o) {
    for (std::size_t j = 0; j < in_delta.size(); ++j) {
      rows(o, Index(j)) = v(geometry.flat_index(x1, settings.x2, o), in_delta[j]);
    }
  }
  Vector start = Vector::Zero(n);
  if (!in_delta.empty()) {
    Eigen::SelfAdjointEigenSolver<Matrix> local(rows * rows.adjoint());
    const Index top = std::min<Index>(2, orbitals);
    const Vector local_state =
        canonical_basis(local.eigenvectors().rightCols(top)).col(0);
    for (int o = 0; o < orbitals; ++o) {
      start(geometry.flat_index(x1, settings.x2, o)) = local_state(o);
    }
  }
  Vector c = v.adjoint() * start;
  for (Index i = 0; i < n; ++i) {
    if (!delta.contains(spectrum.eigenvalues(i))) c(i) = 0.0;
  }
  trace.initial_norm = c.norm();
  if (trace.initial_norm < settings.min_norm) {
    throw InvalidArgument("no gap states to propagate: filtered norm " +
                          std::to_string(trace.initial_norm));
  }
  c /= trace.initial_norm;
  const Vector psi0 = v * c;
  const Vector c_bar = v.adjoint() * tau.apply(psi0);

  std::vector<double> offset(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    offset[std::size_t(i)] = wrapped(geometry.site_of(i).x1, x1, geometry.lx());
  }

  trace.times = settings.times;
  if (trace.times.empty()) {
    for (int i = 1; i <= 48; ++i) trace.times.push_back(2.0 * trace.wrap_time * i / 48.0);
  }
  const Matrix& h = h_hat.matrix();
  const double e0 = psi0.dot(h * psi0).real();
  const Moments m0 = column_moments(psi0, offset);
  auto evolve = [&](const Vector& coeff, double t) {
    Vector phased(n);
    for (Index i = 0; i < n; ++i) {
      phased(i) = coeff(i) * std::polar(1.0, -spectrum.eigenvalues(i) * t);
    }
    return Vector(v * phased);
  };

  std::vector<double> log_t, log_s;
  for (double t : trace.times) {
    const Vector psi = evolve(c, t);
    const Moments m = column_moments(psi, offset);
    trace.spread.push_back(m.spread);
    trace.mean.push_back(m.mean);
    trace.norm_error.push_back(std::abs(psi.norm() - 1.0));
    trace.energy_error.push_back(std::abs(psi.dot(h * psi).real() - e0));

    const Moments back = column_moments(evolve(c, -t), offset);
    const Moments mirror = column_moments(evolve(c_bar, t), offset);
    trace.trs_residual = std::max({trace.trs_residual,
                                   std::abs(back.mean - mirror.mean),
                                   std::abs(back.spread - mirror.spread)});

    const double excess = m.spread - m0.spread;
    if (t > 0.0 && t <= trace.wrap_time && excess > 0.0) {
      log_t.push_back(std::log(t));
      log_s.push_back(std::log(excess));
    }
  }
  trace.fit_points = Index(log_t.size());
  if (log_t.size() < 2) {
    throw InvalidArgument("empty wrap window: fewer than two times before " +
                          std::to_string(trace.wrap_time));
  }

  // Least-squares slope with its standard error.
  const double k = double(log_t.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_t.size(); ++i) {
    mx += log_t[i];
    my += log_s[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_t.size(); ++i) {
    sxx += (log_t[i] - mx) * (log_t[i] - mx);
    sxy += (log_t[i] - mx) * (log_s[i] - my);
  }
  if (sxx <= 0.0) throw InvalidArgument("empty wrap window: all fit times coincide");
  trace.alpha = sxy / sxx;
  if (log_t.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < log_t.size(); ++i) {
      const double r = log_s[i] - (my + trace.alpha * (log_t[i] - mx));
      rss += r * r;
    }
    trace.alpha_stderr = std::sqrt(rss / (k - 2.0) / sxx);
  }
  trace.alpha_low = trace.alpha - 2.0 * trace.alpha_stderr;
  trace.alpha_high = trace.alpha + 2.0 * trace.alpha_stderr;
  return trace;
}

}  // namespace z2edge
