#include "z2edge/lattice_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace z2edge {

namespace {

constexpr int kModelOrbitals = 4;

// Fiber layout is 2*orbital + spin. Builds (spin block) x (orbital block).
Matrix spin_orbital(const Eigen::Matrix2cd& spin, const Eigen::Matrix2cd& orb) {
  Matrix out = Matrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          out(2 * a + s, 2 * b + t) = orb(a, b) * spin(s, t);
  return out;
}

// Places h on spin up and conj(h) on spin down.
Matrix spin_doubled(const Eigen::Matrix2cd& h) {
  Eigen::Matrix2cd up = Eigen::Matrix2cd::Zero();
  up(0, 0) = 1.0;
  Eigen::Matrix2cd down = Eigen::Matrix2cd::Zero();
  down(1, 1) = 1.0;
  return spin_orbital(up, h) + spin_orbital(down, h.conjugate());
}

// Fiber-level symmetrization (T + tau T tau^*) / 2 with the on-site tau.
Matrix tr_symmetrize(const Matrix& t) {
  const Matrix odd = standard_odd_form(t.rows() / 2);
  return 0.5 * (t + odd * t.conjugate() * odd.adjoint());
}

void require_model_fiber(const LatticeGeometry& g) {
  if (g.orbitals() != kModelOrbitals) {
    std::ostringstream os;
    os << "spin-doubled model needs " << kModelOrbitals
       << " orbitals per site, geometry has " << g.orbitals();
    throw InvalidArgument(os.str());
  }
}

double wrapped(double d, int period) {
  d = std::fmod(d, double(period));
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

}  // namespace

const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw InvalidArgument("unknown boundary '" + s +
                        "' (expected periodic or open)");
}

LatticeGeometry::LatticeGeometry(int lx, int ly, Boundary bx, Boundary by,
                                 int orbitals_per_site)
    : lx_(lx), ly_(ly), bx_(bx), by_(by), orbitals_(orbitals_per_site) {
  if (lx <= 0 || ly <= 0) {
    throw InvalidArgument("LatticeGeometry: Lx and Ly must be positive");
  }
  if (orbitals_per_site <= 0 || orbitals_per_site % 2 != 0) {
    throw InvalidArgument(
        "LatticeGeometry: orbitals per site must be positive and even "
        "(an odd time reversal needs an even fiber)");
  }
}

Site LatticeGeometry::site_of(Index flat) const {
  const Index s = flat / orbitals_;
  return {static_cast<int>(s % lx_), static_cast<int>(s / lx_)};
}

double LatticeGeometry::distance(const Site& s,
                                 const Eigen::Vector2d& point) const {
  double dx = s.x1 - point.x();
  double dy = s.x2 - point.y();
  if (bx_ == Boundary::periodic) dx = wrapped(dx, lx_);
  if (by_ == Boundary::periodic) dy = wrapped(dy, ly_);
  return std::hypot(dx, dy);
}

double LatticeGeometry::distance(const Site& a, const Site& b) const {
  return distance(a, Eigen::Vector2d(b.x1, b.x2));
}

HoppingTerms clean_terms(const ModelSpec& spec) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd s1, s2, s3, id;
  s1 << 0, 1, 1, 0;
  s2 << 0, -i, i, 0;
  s3 << 1, 0, 0, -1;
  id.setIdentity();

  // h(k) = T e^{-ik} + T^dag e^{ik} with T = (s3 + i s_j) / 2 gives
  // cos k s3 + sin k s_j.
  HoppingTerms t;
  t.onsite = spin_doubled(spec.mass * s3);
  t.hop_x = spin_doubled(0.5 * (s3 + i * s1));
  t.hop_y = spin_doubled(0.5 * (s3 + i * s2));

  if (spec.lambda_r != 0.0) {
    // T = i a / 2 contributes a sin k, so these give
    // lambda_R (sx sin k2 - sy sin k1) on the spin index.
    t.hop_x += spin_orbital(-0.5 * i * spec.lambda_r * s2, id);
    t.hop_y += spin_orbital(0.5 * i * spec.lambda_r * s1, id);
  }
  t.onsite = tr_symmetrize(t.onsite);
  t.hop_x = tr_symmetrize(t.hop_x);
  t.hop_y = tr_symmetrize(t.hop_y);
  return t;
}

std::vector<double> disorder_potential(const ModelSpec& spec) {
  const Index n = spec.geometry.sites();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  if (spec.disorder == 0.0) return v;
  if (spec.disorder < 0.0) {
    throw InvalidArgument("disorder strength must be non-negative");
  }
  std::mt19937_64 rng(spec.seed);
  for (auto& x : v) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = spec.disorder * (2.0 * u - 1.0);
  }
  return v;
}

HermitianOperator assemble_hamiltonian(const ModelSpec& spec) {
  const LatticeGeometry& g = spec.geometry;
  require_model_fiber(g);
  const HoppingTerms terms = clean_terms(spec);
  const std::vector<double> potential = disorder_potential(spec);
  const int n = g.orbitals();
  Matrix h = Matrix::Zero(g.dimension(), g.dimension());

  auto add_hop = [&](int x1, int x2, int y1, int y2, const Matrix& t) {
    const Index from = g.site_index(x1, x2) * n;
    const Index to = g.site_index(y1, y2) * n;
    h.block(to, from, n, n) += t;
    h.block(from, to, n, n) += t.adjoint();
  };

  for (int x2 = 0; x2 < g.ly(); ++x2) {
    for (int x1 = 0; x1 < g.lx(); ++x1) {
      const Index s = g.site_index(x1, x2);
      h.block(s * n, s * n, n, n) +=
          terms.onsite +
          potential[static_cast<std::size_t>(s)] * Matrix::Identity(n, n);
      if (x1 + 1 < g.lx()) {
        add_hop(x1, x2, x1 + 1, x2, terms.hop_x);
      } else if (g.boundary_x() == Boundary::periodic) {
        add_hop(x1, x2, 0, x2, terms.hop_x);
      }
      if (x2 + 1 < g.ly()) {
        add_hop(x1, x2, x1, x2 + 1, terms.hop_y);
      } else if (g.boundary_y() == Boundary::periodic) {
        add_hop(x1, x2, x1, 0, terms.hop_y);
      }
    }
  }
  std::ostringstream label;
  label << "spin-doubled Chern m=" << spec.mass << " lambda_r=" << spec.lambda_r
        << " w=" << spec.disorder << " " << g.lx() << "x" << g.ly() << " "
        << to_string(g.boundary_x()) << "/" << to_string(g.boundary_y());
  return HermitianOperator(std::move(h), label.str());
}

HermitianOperator build_bulk_hamiltonian(const ModelSpec& spec) {
  const LatticeGeometry& g = spec.geometry;
  if (g.boundary_x() != Boundary::periodic ||
      g.boundary_y() != Boundary::periodic) {
    throw InvalidArgument("bulk Hamiltonian needs a periodic (torus) geometry");
  }
  return assemble_hamiltonian(spec);
}

HermitianOperator build_half_space_hamiltonian(const ModelSpec& spec) {
  const LatticeGeometry& g = spec.geometry;
  if (g.boundary_x() != Boundary::periodic ||
      g.boundary_y() != Boundary::open) {
    throw InvalidArgument(
        "half-space Hamiltonian needs a cylinder (periodic x1, open x2)");
  }
  return assemble_hamiltonian(spec);
}

AntiUnitary build_time_reversal(const LatticeGeometry& geometry) {
  return AntiUnitary(standard_odd_form(geometry.dimension() / 2));
}

RealVector position_operator(const LatticeGeometry& geometry, int axis) {
  if (axis != 1 && axis != 2) {
    throw InvalidArgument("position_operator: axis must be 1 or 2");
  }
  RealVector x(geometry.dimension());
  for (Index i = 0; i < x.size(); ++i) {
    const Site s = geometry.site_of(i);
    x(i) = axis == 1 ? s.x1 : s.x2;
  }
  return x;
}

TrsCheck verify_trs(const Matrix& h, const AntiUnitary& tau, double tol) {
  TrsCheck out;
  out.residual = frobenius(conjugate_by_antiunitary(tau, h) - h);
  out.pass = out.residual <= tol * frobenius(h);
  return out;
}

LocalityCertificate verify_locality(
    const Matrix& h, const LatticeGeometry& geometry,
    const std::vector<std::pair<Index, Index>>& sample_pairs) {
  if (h.rows() != geometry.dimension() || h.cols() != geometry.dimension()) {
    throw InvalidArgument("verify_locality: dimension mismatch");
  }
  const int n = geometry.orbitals();
  std::vector<std::pair<Index, Index>> pairs = sample_pairs;
  if (pairs.empty()) {
    for (Index a = 0; a < geometry.sites(); ++a)
      for (Index b = 0; b < geometry.sites(); ++b) pairs.emplace_back(a, b);
  }

  std::vector<double> dist, norms;
  dist.reserve(pairs.size());
  norms.reserve(pairs.size());
  double top = 0.0;
  for (auto [a, b] : pairs) {
    const Site sa = geometry.site_of(a * n);
    const Site sb = geometry.site_of(b * n);
    const Matrix block = h.block(a * n, b * n, n, n);
    Eigen::JacobiSVD<Matrix> svd(block);
    const double nrm = svd.singularValues()(0);
    dist.push_back(geometry.distance(sa, sb));
    norms.push_back(nrm);
    top = std::max(top, nrm);
  }

  LocalityCertificate cert;
  cert.pairs_sampled = static_cast<Index>(pairs.size());
  if (top == 0.0) {
    cert.finite_range = true;
    return cert;
  }
  const double zero = 1e-14 * top;
  std::vector<double> fd, fl;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (norms[i] > zero) {
      fd.push_back(dist[i]);
      fl.push_back(std::log(norms[i]));
      cert.range = std::max(cert.range, dist[i]);
    }
  }
  std::vector<double> distinct = fd;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](double x, double y) {
                               return std::abs(x - y) < 1e-9;
                             }),
                 distinct.end());

  if (distinct.size() < 3) {
    // Nothing beyond nearest neighbours: the bound holds for any xi -> 0.
    cert.finite_range = true;
    cert.prefactor = top;
    cert.decay_length = 0.0;
    return cert;
  }

  const double m = static_cast<double>(fd.size());
  double sd = 0, sl = 0, sdd = 0, sdl = 0;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    sd += fd[i];
    sl += fl[i];
    sdd += fd[i] * fd[i];
    sdl += fd[i] * fl[i];
  }
  const double slope = (m * sdl - sd * sl) / (m * sdd - sd * sd);
  const double intercept = (sl - slope * sd) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    const double r = fl[i] - (intercept + slope * fd[i]);
    rss += r * r;
  }
  cert.residual = std::sqrt(rss / m);
  cert.decay_length =
      slope < 0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  // Raise C until the bound covers every sampled pair.
  double c = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double bound_arg =
        std::isfinite(cert.decay_length) ? dist[i] / cert.decay_length : 0.0;
    c = std::max(c, norms[i] * std::exp(bound_arg));
  }
  cert.prefactor = c;
  return cert;
}

std::optional<Interval> spectral_gap(const RealVector& eigenvalues, double mu) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double e = eigenvalues(i);
    if (std::abs(e - mu) < 1e-9) return std::nullopt;
    if (e < mu) lo = std::max(lo, e);
    if (e > mu) hi = std::min(hi, e);
  }
  return Interval{lo, hi};
}

std::optional<Interval> spectral_gap(const HermitianOperator& h, double mu) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_gap: eigensolver failed");
  }
  return spectral_gap(solver.eigenvalues(), mu);
}

}  // namespace z2edge
