#include "z2edge/wold_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace z2edge {

namespace {

Matrix identity(Index n) { return Matrix::Identity(n, n); }

void require(bool ok, const std::string& what, double residual, double tol) {
  if (!ok) {
    std::ostringstream os;
    os << what << " (residual " << residual << ", tol " << tol << ")";
    throw NumericalError(os.str());
  }
}

double max_of(std::initializer_list<double> xs) {
  return *std::max_element(xs.begin(), xs.end());
}

std::vector<Index> indices_where(const RealVector& values,
                                 const std::function<bool(double)>& pred) {
  std::vector<Index> out;
  for (Index i = 0; i < values.size(); ++i) {
    if (pred(values(i))) out.push_back(i);
  }
  return out;
}

Index count_near(const RealVector& values, double target, double tol) {
  return static_cast<Index>(eigen_cluster(values, target, tol).size());
}

// ||Pi_a - Pi_b|| in Frobenius norm for unit vectors a, b.
double rank_one_distance(const Vector& a, const Vector& b) {
  const double overlap = std::norm(a.dot(b));
  return std::sqrt(2.0 * std::max(0.0, 1.0 - overlap));
}

}  // namespace

SymmetricPair::SymmetricPair(Matrix u, Matrix p, AntiUnitary tau, double tol)
    : u_(std::move(u)), p_(std::move(p)), tau_(std::move(tau)) {
  if (u_.rows() != u_.cols() || p_.rows() != u_.rows() ||
      p_.cols() != u_.cols() || tau_.dimension() != u_.rows()) {
    throw InvalidArgument("SymmetricPair: dimension mismatch");
  }
  if (!tau_.is_odd()) {
    throw InvalidArgument("SymmetricPair: tau must be odd (tau^2 = -1)");
  }
  UnitaryOperator check_u(u_, tol);
  ProjectionOperator check_p(p_, tol);
  u_residual_ = frobenius(conjugate_by_antiunitary(tau_, u_) - u_.adjoint());
  p_residual_ = frobenius(conjugate_by_antiunitary(tau_, p_) - p_);
  if (u_residual_ > tol) {
    std::ostringstream os;
    os << "SymmetricPair: tau U tau^* != U^* (residual " << u_residual_ << ")";
    throw InvalidArgument(os.str());
  }
  if (p_residual_ > tol) {
    std::ostringstream os;
    os << "SymmetricPair: tau P tau^* != P (residual " << p_residual_ << ")";
    throw InvalidArgument(os.str());
  }
}

DefectOperators defect_operators(const SymmetricPair& pair, double tol) {
  const Matrix& u = pair.u();
  const Matrix& p = pair.p();
  const Index n = pair.dimension();
  DefectOperators d;
  d.q = u * p * u.adjoint();
  d.a = d.q - p;
  d.b = identity(n) - p - d.q;
  d.square_residual = frobenius(d.a * d.a + d.b * d.b - identity(n));
  d.anticommutator_residual = frobenius(d.a * d.b + d.b * d.a);
  require(d.square_residual <= tol, "defect_operators: A^2 + B^2 != 1",
          d.square_residual, tol);
  require(d.anticommutator_residual <= tol, "defect_operators: AB + BA != 0",
          d.anticommutator_residual, tol);
  d.spectrum = spectral_decomposition(d.a);
  return d;
}

std::vector<EigenCluster> eigen_clusters(const RealVector& ascending,
                                         double tol) {
  std::vector<EigenCluster> out;
  Index i = 0;
  while (i < ascending.size()) {
    EigenCluster c;
    c.indices.push_back(i);
    Index j = i + 1;
    while (j < ascending.size() && ascending(j) - ascending(j - 1) < tol) {
      c.indices.push_back(j);
      ++j;
    }
    double sum = 0.0;
    for (Index k : c.indices) sum += ascending(k);
    c.value = sum / static_cast<double>(c.indices.size());
    out.push_back(std::move(c));
    i = j;
  }
  return out;
}

namespace {

// The cluster whose value is closest to `target`, if within `tol`.
const EigenCluster* partner(const std::vector<EigenCluster>& clusters,
                            double target, double tol) {
  const EigenCluster* best = nullptr;
  double best_d = tol;
  for (const auto& c : clusters) {
    const double d = std::abs(c.value - target);
    if (d <= best_d) {
      best = &c;
      best_d = d;
    }
  }
  return best;
}

bool excluded(double value, double cluster_tol) {
  return std::abs(value - 1.0) < cluster_tol ||
         std::abs(value + 1.0) < cluster_tol || std::abs(value) < cluster_tol;
}

}  // namespace

TildeTau tilde_tau(const SymmetricPair& pair, const DefectOperators& defects,
                   double cluster_tol, double tol) {
  TildeTau t{pair.tau().after(pair.u())};
  const Matrix& p = pair.p();
  t.p_to_q = frobenius(conjugate_by_antiunitary(t.op, p) - defects.q);
  t.q_to_p = frobenius(conjugate_by_antiunitary(t.op, defects.q) - p);
  t.b_residual = frobenius(conjugate_by_antiunitary(t.op, defects.b) - defects.b);
  t.a_residual = frobenius(conjugate_by_antiunitary(t.op, defects.a) + defects.a);
  require(t.op.is_odd(1e-9), "tilde_tau: U tau is not odd", 0.0, tol);
  require(t.p_to_q <= tol, "tilde_tau: tau~ P tau~^* != Q", t.p_to_q, tol);
  require(t.q_to_p <= tol, "tilde_tau: tau~ Q tau~^* != P", t.q_to_p, tol);
  require(t.b_residual <= tol, "tilde_tau: tau~ B tau~^* != B", t.b_residual, tol);
  require(t.a_residual <= tol, "tilde_tau: tau~ A tau~^* != -A", t.a_residual, tol);

  const auto clusters = eigen_clusters(defects.spectrum.eigenvalues, cluster_tol);
  for (const auto& c : clusters) {
    const EigenCluster* other = partner(clusters, -c.value, 10 * cluster_tol);
    if (other == nullptr) {
      std::ostringstream os;
      os << "tilde_tau: eigenvalue " << c.value << " of A has no partner at "
         << -c.value;
      throw NumericalError(os.str());
    }
    const Matrix image = t.op.apply_columns(defects.spectrum.columns(c.indices));
    const Matrix target = defects.spectrum.columns(other->indices);
    if (image.cols() != target.cols()) {
      std::ostringstream os;
      os << "tilde_tau: dim E_" << c.value << " = " << image.cols()
         << " but dim E_" << other->value << " = " << target.cols();
      throw NumericalError(os.str());
    }
    t.max_cluster_angle =
        std::max(t.max_cluster_angle, subspace_distance(image, target));
  }
  require(t.max_cluster_angle <= 1e-8,
          "tilde_tau: tau~ E_lambda is not E_{-lambda}", t.max_cluster_angle,
          1e-8);
  return t;
}

SpectralSymmetryReport spectral_symmetry_check(const DefectOperators& defects,
                                               double cluster_tol) {
  SpectralSymmetryReport r;
  const auto clusters = eigen_clusters(defects.spectrum.eigenvalues, cluster_tol);
  for (const auto& c : clusters) {
    if (excluded(c.value, cluster_tol)) continue;
    const EigenCluster* other = partner(clusters, -c.value, 10 * cluster_tol);
    if (other == nullptr || other->indices.size() != c.indices.size()) {
      std::ostringstream os;
      os << "spectral_symmetry_check: dim E_" << c.value << " = "
         << c.indices.size() << " differs from dim E_" << -c.value << " = "
         << (other ? other->indices.size() : 0)
         << "; the cluster tolerance splits a degenerate eigenvalue";
      throw NumericalError(os.str());
    }
    const Matrix basis = defects.spectrum.columns(c.indices);
    const Matrix image = defects.b * basis;
    const Matrix target = defects.spectrum.columns(other->indices);
    r.max_angle = std::max(r.max_angle,
                           subspace_distance(orthonormalize(image), target));
    const Matrix b2 = defects.b * image;
    r.max_square_residual =
        std::max(r.max_square_residual,
                 frobenius(b2 - (1.0 - c.value * c.value) * basis));
    const Index dim = static_cast<Index>(c.indices.size());
    r.mid_dimensions.push_back(dim);
    if (dim % 2 != 0) r.even_dimensions = false;
    ++r.clusters_checked;
  }
  r.pass = r.even_dimensions && r.max_angle <= 1e-8 &&
           r.max_square_residual <= 1e-8;
  return r;
}

KramersTheta kramers_theta(const DefectOperators& defects,
                           const AntiUnitary& tilde, const EigenCluster& cluster,
                           double cluster_tol) {
  if (excluded(cluster.value, cluster_tol)) {
    std::ostringstream os;
    os << "kramers_theta: eigenvalue " << cluster.value
       << " lies in {-1, 0, 1}";
    throw InvalidArgument(os.str());
  }
  const Matrix basis = defects.spectrum.columns(cluster.indices);
  const Matrix& t = tilde.unitary_part();
  const Matrix& b = defects.b;
  // B tau~ as an antiunitary has unitary part B T; on E_lambda, B^* B is
  // (1 - lambda^2) times the identity.
  const Matrix bt = b * t;
  Matrix local = basis.adjoint() * bt * basis.conjugate();
  const Matrix gram = local.adjoint() * local;
  const SpectralDecomposition g = spectral_decomposition(gram);
  const Matrix inv_sqrt = functional_calculus(
      g, [](double x) { return cplx(1.0 / std::sqrt(x)); });
  local = local * inv_sqrt;
  // (B^*B)^{-1/2} acts on the image side; B^*B is scalar on E_lambda so the
  // side does not matter beyond rounding.
  KramersTheta out{basis, AntiUnitary(local, 1e-8), 0.0, 0.0, Matrix()};
  out.square_residual = frobenius(local * local.conjugate() +
                                  identity(local.rows()));
  out.commutation_residual = frobenius(b * t - t * b.conjugate());
  out.kramers = kramers_basis(out.theta, identity(local.rows()), 1e-8);
  return out;
}

XReport build_X(const DefectOperators& defects, double kernel_tol) {
  const Index n = defects.a.rows();
  const Matrix& q = defects.q;
  const Matrix p = q - defects.a;
  const Matrix one = identity(n);
  XReport r;
  r.x = defects.b * (one - 2.0 * q);
  const Matrix x2 = (one - 2.0 * p) * defects.b;
  const Matrix x3 = one - p - q + 2.0 * p * q;
  r.expression_residual = std::max(frobenius(r.x - x2), frobenius(r.x - x3));
  const Matrix pq = p * q;
  r.intertwining_residual =
      std::max(frobenius(p * r.x - pq), frobenius(r.x * q - pq));
  const Matrix xxs = r.x * r.x.adjoint();
  const Matrix xsx = r.x.adjoint() * r.x;
  const Matrix b2 = defects.b * defects.b;
  r.normality_residual =
      max_of({frobenius(xxs - xsx), frobenius(xxs - 0.5 * (r.x + r.x.adjoint())),
              frobenius(xxs - b2)});
  Eigen::ComplexEigenSolver<Matrix> solver(r.x, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("build_X: eigensolver failed");
  }
  r.eigenvalues = solver.eigenvalues();
  for (Index i = 0; i < n; ++i) {
    const cplx z = r.eigenvalues(i);
    r.circle_residual =
        std::max(r.circle_residual, std::abs(std::norm(z - 0.5) - 0.25));
  }
  const RealVector s = singular_values(r.x);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) < kernel_tol) ++r.kernel_dimension;
  }
  return r;
}

OffDefectDecoupler decoupler_offdefect(const Matrix& x, const Matrix& perp_basis,
                                       const DefectOperators& defects,
                                       const AntiUnitary& tilde,
                                       double cluster_tol) {
  OffDefectDecoupler out;
  out.basis = perp_basis;
  const Index n = x.rows();
  out.v_tilde = Matrix::Zero(n, n);
  out.leakage_floor = std::sqrt(1.0 - (1.0 - cluster_tol) * (1.0 - cluster_tol));
  if (perp_basis.cols() == 0) return out;

  const Matrix local = perp_basis.adjoint() * x * perp_basis;
  const UnitaryPart part = unitary_part(local, out.leakage_floor / 10.0);
  out.min_singular_value = part.singular_values(0);
  if (part.kernel_basis.cols() > 0 ||
      out.min_singular_value < out.leakage_floor * (1.0 - 1e-6)) {
    std::ostringstream os;
    os << "decoupler_offdefect: kernel leakage, singular value "
       << out.min_singular_value << " of X on E^perp is below the floor "
       << out.leakage_floor;
    throw NumericalError(os.str());
  }
  const Matrix& vl = part.unitary;
  out.unitarity_residual =
      frobenius(vl.adjoint() * vl - identity(vl.rows()));
  out.v_tilde = perp_basis * vl * perp_basis.adjoint();
  const Matrix p = defects.q - defects.a;
  const Matrix pl = perp_basis.adjoint() * p * perp_basis;
  const Matrix ql = perp_basis.adjoint() * defects.q * perp_basis;
  out.intertwining_residual = frobenius(pl * vl - vl * ql);
  out.symmetry_residual = frobenius(
      conjugate_by_antiunitary(tilde, out.v_tilde) - out.v_tilde.adjoint());
  return out;
}

Matrix canonical_basis(const Matrix& subspace) {
  const Index n = subspace.rows();
  const Index d = subspace.cols();
  Matrix proj = subspace * subspace.adjoint();
  Matrix out(n, d);
  for (Index k = 0; k < d; ++k) {
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < n; ++i) {
      const double w = proj(i, i).real();
      // Strict comparison with a relative margin keeps ties at the lower index.
      if (w > best * (1.0 + 1e-12) + 1e-14) {
        best = w;
        pivot = i;
      }
    }
    if (best <= 1e-12) {
      throw NumericalError("canonical_basis: subspace rank deficient");
    }
    Vector v = proj.col(pivot);
    v.normalize();
    // Fix the phase: pivot component real positive.
    const cplx c = v(pivot);
    v *= std::conj(c) / std::abs(c);
    out.col(k) = v;
    proj -= v * v.adjoint();
  }
  return out;
}

DefectDecoupler decoupler_defect(const Matrix& e_plus, const Matrix& e_minus,
                                 const AntiUnitary& tilde) {
  if (e_plus.cols() != e_minus.cols()) {
    std::ostringstream os;
    os << "decoupler_defect: dim E_{+1} = " << e_plus.cols()
       << " != dim E_{-1} = " << e_minus.cols();
    throw NumericalError(os.str());
  }
  const Index n = tilde.dimension();
  const Index d = e_plus.cols();
  DefectDecoupler out;
  out.v = Matrix::Zero(n, n);
  out.m = d / 2;
  out.odd = d % 2 == 1;
  if (d == 0) return out;

  out.plus_basis = canonical_basis(e_plus);
  out.minus_basis = tilde.apply_columns(out.plus_basis);
  const double angle = subspace_distance(out.minus_basis, e_minus);
  require(angle <= 1e-8, "decoupler_defect: tau~ E_{+1} is not E_{-1}", angle,
          1e-8);

  const Index m2 = 2 * out.m;
  if (m2 > 0) {
    Matrix f(n, 2 * m2);
    f << out.plus_basis.leftCols(m2), out.minus_basis.leftCols(m2);
    const Matrix j = standard_odd_form(out.m);
    Matrix local = Matrix::Zero(2 * m2, 2 * m2);
    local.topRightCorner(m2, m2) = j;
    local.bottomLeftCorner(m2, m2) = j;
    out.v += f * local * f.adjoint();
  }
  if (out.odd) {
    out.rest_plus = out.plus_basis.col(d - 1);
    out.rest_minus = out.minus_basis.col(d - 1);
    out.v += *out.rest_plus * out.rest_plus->adjoint() +
             *out.rest_minus * out.rest_minus->adjoint();
  }
  out.symmetry_residual =
      frobenius(conjugate_by_antiunitary(tilde, out.v) - out.v.adjoint());
  return out;
}

const char* to_string(Classification c) {
  return c == Classification::even ? "even" : "odd-residual";
}

DecouplingResult decouple(const SymmetricPair& pair, double cluster_tol) {
  if (!(cluster_tol > 0.0 && cluster_tol < 0.1)) {
    throw InvalidArgument("decouple: cluster_tol must lie in (0, 0.1)");
  }
  const Index n = pair.dimension();
  const DefectOperators defects = defect_operators(pair);
  const TildeTau tilde = tilde_tau(pair, defects, cluster_tol);
  const RealVector& lambda = defects.spectrum.eigenvalues;

  DecouplingResult r;
  for (double t : {cluster_tol / 10.0, cluster_tol, cluster_tol * 10.0}) {
    r.stability[t] = count_near(lambda, 1.0, t);
  }
  const Index reference = r.stability[cluster_tol];
  for (const auto& [t, count] : r.stability) {
    if (count != reference || count_near(lambda, -1.0, t) != reference) {
      std::ostringstream os;
      os << "decouple: E_{+1} clustering unstable, dimension " << count
         << " at tol " << t << " vs " << reference << " at tol " << cluster_tol;
      throw NumericalError(os.str());
    }
  }
  const auto plus_idx = eigen_cluster(lambda, 1.0, cluster_tol);
  const auto minus_idx = eigen_cluster(lambda, -1.0, cluster_tol);
  const auto perp_idx = indices_where(
      lambda, [&](double x) { return std::abs(x) < 1.0 - cluster_tol; });
  r.e_plus_dimension = static_cast<Index>(plus_idx.size());
  r.e_minus_dimension = static_cast<Index>(minus_idx.size());

  const XReport x = build_X(defects);
  const OffDefectDecoupler off =
      decoupler_offdefect(x.x, defects.spectrum.columns(perp_idx), defects,
                          tilde.op, cluster_tol);
  const DefectDecoupler on =
      decoupler_defect(defects.spectrum.columns(plus_idx),
                       defects.spectrum.columns(minus_idx), tilde.op);

  r.v = on.v + off.v_tilde;
  r.w = r.v * pair.u();
  r.classification = on.odd ? Classification::odd_residual : Classification::even;

  const Matrix& p = pair.p();
  const Matrix& u = pair.u();
  const Matrix one = identity(n);
  r.checks["v_unitarity"] = frobenius(r.v.adjoint() * r.v - one);
  r.checks["w_symmetry"] =
      frobenius(conjugate_by_antiunitary(pair.tau(), r.w) - r.w.adjoint());
  r.checks["v_symmetry"] =
      frobenius(conjugate_by_antiunitary(tilde.op, r.v) - r.v.adjoint());
  r.checks["off_defect_intertwining"] = off.intertwining_residual;
  r.checks["off_defect_symmetry"] = off.symmetry_residual;
  r.checks["off_defect_min_singular_value"] = off.min_singular_value;
  r.checks["leakage_floor"] = off.leakage_floor;
  r.checks["defect_symmetry"] = on.symmetry_residual;
  r.checks["x_circle"] = x.circle_residual;
  r.checks["x_kernel_dimension"] = static_cast<double>(x.kernel_dimension);

  Matrix contract = r.w * p * r.w.adjoint() - p;
  if (on.odd) {
    r.pi_plus = on.rest_plus;
    r.pi_minus = on.rest_minus;
    contract -= *on.rest_plus * on.rest_plus->adjoint() -
                *on.rest_minus * on.rest_minus->adjoint();
    r.checks["pi_plus_in_p_perp"] = (p * *on.rest_plus).norm();
    r.checks["pi_minus_in_p"] = ((one - p) * *on.rest_minus).norm();
  }
  r.checks["contract_residual"] = frobenius(contract);
  r.checks["wp_commutator"] = frobenius(r.w * p - p * r.w);

  const double tol = 1e-8;
  require(r.checks["v_unitarity"] <= tol, "decouple: V is not unitary",
          r.checks["v_unitarity"], tol);
  require(r.checks["w_symmetry"] <= tol, "decouple: tau W tau^* != W^*",
          r.checks["w_symmetry"], tol);
  require(r.checks["contract_residual"] <= tol,
          "decouple: W P W^* - P does not match the classification",
          r.checks["contract_residual"], tol);

  for (double pp : {1.0, 2.0}) {
    SchattenRow row;
    row.p = pp;
    row.commutator_up = schatten_norm(u * p - p * u, pp);
    row.u_minus_w = schatten_norm(u - r.w, pp);
    row.commutator_wp = schatten_norm(r.w * p - p * r.w, pp);
    const Matrix d = r.w - u;
    row.bound = schatten_norm(d * p - p * d, pp) + row.commutator_up;
    r.schatten.push_back(row);
  }
  return r;
}

ChainReport chain_projections(const Matrix& w, const Matrix& p,
                              const AntiUnitary& tau, const Vector& pi_plus,
                              const Vector& pi_minus, int depth, double tol) {
  if (depth < 0) throw InvalidArgument("chain_projections: depth < 0");
  const Index n = w.rows();
  if (pi_plus.size() != n || pi_minus.size() != n || p.rows() != n) {
    throw InvalidArgument("chain_projections: dimension mismatch");
  }
  ChainReport r;
  r.depth = depth;
  const int count = 2 * depth + 2;
  r.plus.resize(std::size_t(count));
  r.minus.resize(std::size_t(count));
  const Vector a = pi_plus.normalized();
  const Vector b = pi_minus.normalized();
  // plus^(k) = W^{k-1} a: plus^(1) = a.
  r.plus[std::size_t(1 + depth)] = a;
  for (int k = 2; k <= depth + 1; ++k) {
    r.plus[std::size_t(k + depth)] = w * r.plus[std::size_t(k - 1 + depth)];
  }
  for (int k = 0; k >= -depth; --k) {
    r.plus[std::size_t(k + depth)] = w.adjoint() * r.plus[std::size_t(k + 1 + depth)];
  }
  // minus^(k) = W^{*k} b: minus^(0) = b.
  r.minus[std::size_t(depth)] = b;
  for (int k = 1; k <= depth + 1; ++k) {
    r.minus[std::size_t(k + depth)] = w.adjoint() * r.minus[std::size_t(k - 1 + depth)];
  }
  for (int k = -1; k >= -depth; --k) {
    r.minus[std::size_t(k + depth)] = w * r.minus[std::size_t(k + 1 + depth)];
  }

  const Matrix a_op = w * p * w.adjoint() - p;
  r.base_residual = (a_op * a - a).norm() + (a_op * b + b).norm();

  // Per-level worst residual; level of index k is max(|k|, |k - 1|) - style
  // depth needed to include it.
  auto level = [](int k) { return k >= 1 ? k - 1 : -k; };
  std::vector<double> worst(std::size_t(depth + 1), 0.0);
  auto note = [&](int k, int l, double v) {
    const int lv = std::max(level(k), level(l));
    worst[std::size_t(lv)] = std::max(worst[std::size_t(lv)], v);
  };
  const Matrix one = Matrix::Identity(n, n);
  const Matrix p_perp = one - p;
  for (int k = -depth; k <= depth + 1; ++k) {
    const Vector& pk = r.plus_at(k);
    const Vector& mk = r.minus_at(k);
    for (int l = -depth; l <= depth + 1; ++l) {
      const Vector& pl = r.plus_at(l);
      const Vector& ml = r.minus_at(l);
      double v = std::abs(pk.dot(ml));
      if (l != k) v = max_of({v, std::abs(pk.dot(pl)), std::abs(mk.dot(ml))});
      r.orthogonality_residual = std::max(r.orthogonality_residual, v);
      note(k, l, v);
    }
    const Matrix& outside = k <= 0 ? p_perp : p;
    const double inc = std::max((outside * pk).norm(), (outside * mk).norm());
    r.inclusion_residual = std::max(r.inclusion_residual, inc);
    note(k, k, inc);
    const double kr = rank_one_distance(tau.apply(pk), mk);
    r.kramers_residual = std::max(r.kramers_residual, kr);
    note(k, k, kr);
  }
  r.clean_depth = -1;
  double running = r.base_residual;
  for (int lv = 0; lv <= depth; ++lv) {
    running = std::max(running, worst[std::size_t(lv)]);
    if (running > tol) break;
    r.clean_depth = lv;
  }
  r.pass = r.clean_depth == depth;
  return r;
}

ShiftReport shift_extraction(const Matrix& w, const Matrix& p,
                             const AntiUnitary& tau, const Vector& pi_plus,
                             int depth, double tol) {
  if (depth < 0) throw InvalidArgument("shift_extraction: depth < 0");
  const Index n = w.rows();
  ShiftReport r;
  r.depth = depth;
  const int count = 2 * depth + 2;
  r.phi.resize(std::size_t(count));
  r.phi_bar.resize(std::size_t(count));
  auto at = [depth](int k) { return std::size_t(k + depth); };
  r.phi[at(1)] = pi_plus.normalized();
  for (int k = 2; k <= depth + 1; ++k) r.phi[at(k)] = w * r.phi[at(k - 1)];
  for (int k = 0; k >= -depth; --k) r.phi[at(k)] = w.adjoint() * r.phi[at(k + 1)];
  for (int k = -depth; k <= depth + 1; ++k) r.phi_bar[at(k)] = tau.apply(r.phi[at(k)]);

  std::vector<double> worst(std::size_t(depth + 1), 0.0);
  auto level = [](int k) { return k >= 1 ? k - 1 : -k; };
  for (int k = -depth; k <= depth; ++k) {
    const double f = (w * r.phi[at(k)] - r.phi[at(k + 1)]).norm();
    r.forward_residual = std::max(r.forward_residual, f);
    const int lv = std::max(level(k), level(k + 1));
    if (lv <= depth) worst[std::size_t(lv)] = std::max(worst[std::size_t(lv)], f);
  }
  for (int k = -depth + 1; k <= depth + 1; ++k) {
    const double b = (w * r.phi_bar[at(k)] - r.phi_bar[at(k - 1)]).norm();
    r.backward_residual = std::max(r.backward_residual, b);
    const int lv = std::max(level(k), level(k - 1));
    if (lv <= depth) worst[std::size_t(lv)] = std::max(worst[std::size_t(lv)], b);
  }
  for (int k = -depth; k <= depth + 1; ++k) {
    for (int l = -depth; l <= depth + 1; ++l) {
      const double o = std::abs(r.phi[at(k)].dot(r.phi_bar[at(l)]));
      r.cross_overlap = std::max(r.cross_overlap, o);
      const int lv = std::max(level(k), level(l));
      worst[std::size_t(lv)] = std::max(worst[std::size_t(lv)], o);
    }
  }
  r.clean_depth = -1;
  double running = 0.0;
  for (int lv = 0; lv <= depth; ++lv) {
    running = std::max(running, worst[std::size_t(lv)]);
    if (running > tol) break;
    r.clean_depth = lv;
  }

  // Chain block: columns phi_k, phi_bar_k in the order |k,+>, |k,->.
  Matrix chains(n, 2 * count);
  for (int k = -depth; k <= depth + 1; ++k) {
    chains.col(2 * Index(at(k))) = r.phi[at(k)];
    chains.col(2 * Index(at(k)) + 1) = r.phi_bar[at(k)];
  }
  r.chain_basis = orthonormalize(chains);
  const Index span = r.chain_basis.cols();
  const Matrix proj = r.chain_basis * r.chain_basis.adjoint();
  const Matrix one = Matrix::Identity(n, n);
  r.invariance_residual = frobenius((one - proj) * w * proj);

  // Window of S: <k+1,+| S |k,+> = 1 and <k-1,-| S |k,-> = 1.
  if (span == chains.cols()) {
    const Matrix block = chains.adjoint() * w * chains;
    Matrix s = Matrix::Zero(2 * count, 2 * count);
    for (int i = 0; i + 1 < count; ++i) {
      s(2 * (i + 1), 2 * i) = 1.0;
      s(2 * i + 1, 2 * (i + 1) + 1) = 1.0;
    }
    // The two window ends leave the span; compare inside the window only.
    Matrix diff = block - s;
    for (Index j = 0; j < diff.cols(); ++j) {
      const bool plus_end = j == 2 * (count - 1);
      const bool minus_end = j == 1;
      if (plus_end || minus_end) diff.col(j).setZero();
    }
    r.equivalence_residual = frobenius(diff);
  } else {
    r.equivalence_residual = std::numeric_limits<double>::infinity();
  }

  // H'' = complement of the chain span.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(one - proj);
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i) {
    if (solver.eigenvalues()(i) > 0.5) keep.push_back(i);
  }
  r.complement_basis = Matrix(n, Index(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    r.complement_basis.col(Index(i)) = solver.eigenvectors().col(keep[i]);
  }
  r.w_rest = r.complement_basis.adjoint() * w * r.complement_basis;
  const Matrix p_rest = r.complement_basis.adjoint() * p * r.complement_basis;
  r.rest_commutator = frobenius(r.w_rest * p_rest - p_rest * r.w_rest);
  return r;
}

SymmetricPair random_symmetric_pair(Index n, std::uint64_t seed) {
  if (n <= 0 || n % 2 != 0) {
    throw InvalidArgument("random_symmetric_pair: N must be positive and even");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const AntiUnitary tau(standard_odd_form(n / 2));
  auto symmetric_hermitian = [&]() {
    Matrix g(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(i, j) = cplx(re, im);
      }
    }
    Matrix h = 0.5 * (g + g.adjoint()) / std::sqrt(double(n));
    h = 0.5 * (h + conjugate_by_antiunitary(tau, h));
    return Matrix(0.5 * (h + h.adjoint()));
  };
  const Matrix m = symmetric_hermitian();
  const Matrix u = functional_calculus(
      spectral_decomposition(m), [](double x) { return std::polar(1.0, x); });
  const Matrix h = symmetric_hermitian();
  const SpectralDecomposition hs = spectral_decomposition(h);
  const Index rank = 2 * (n / 4);
  const Matrix occupied = hs.eigenvectors.leftCols(rank);
  Matrix p = occupied * occupied.adjoint();
  p = 0.5 * (p + conjugate_by_antiunitary(tau, p));
  return SymmetricPair(u, 0.5 * (p + p.adjoint()), tau, 1e-10);
}

Matrix ring_shift(int sites) {
  if (sites < 2) throw InvalidArgument("ring_shift: need at least two sites");
  const Index n = 2 * Index(sites);
  Matrix s = Matrix::Zero(n, n);
  for (int x = 0; x < sites; ++x) {
    s(2 * ((x + 1) % sites), 2 * x) = 1.0;
    s(2 * ((x - 1 + sites) % sites) + 1, 2 * x + 1) = 1.0;
  }
  return s;
}

Matrix ring_projection(int sites, const std::vector<int>& arc) {
  const Index n = 2 * Index(sites);
  Matrix p = Matrix::Zero(n, n);
  for (int x : arc) {
    const int y = ((x % sites) + sites) % sites;
    p(2 * y, 2 * y) = 1.0;
    p(2 * y + 1, 2 * y + 1) = 1.0;
  }
  return p;
}

AntiUnitary ring_time_reversal(int sites) {
  return AntiUnitary(standard_odd_form(sites));
}

SymmetricPair ring_shift_pair(int sites, int arc_end) {
  if (arc_end < 0 || arc_end + 2 >= sites) {
    throw InvalidArgument("ring_shift_pair: arc must leave a gap on the ring");
  }
  std::vector<int> arc;
  for (int x = 0; x <= arc_end; ++x) arc.push_back(x);
  return SymmetricPair(ring_shift(sites), ring_projection(sites, arc),
                       ring_time_reversal(sites));
}

SyntheticShift synthetic_bilateral_shift(int sites) {
  if (sites < 4 || sites % 2 != 0) {
    throw InvalidArgument("synthetic_bilateral_shift: need an even ring >= 4");
  }
  std::vector<int> arc;
  for (int x = -(sites / 2 - 1); x <= 0; ++x) arc.push_back(x);
  const Index n = 2 * Index(sites);
  Vector plus = Vector::Zero(n), minus = Vector::Zero(n);
  plus(2 * 1) = 1.0;
  minus(2 * 0 + 1) = 1.0;
  return {ring_shift(sites), ring_projection(sites, arc),
          ring_time_reversal(sites), plus, minus};
}

}  // namespace z2edge
