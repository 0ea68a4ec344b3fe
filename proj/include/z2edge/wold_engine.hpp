#pragma once

// Time-reversal symmetric Wold machinery for a pair (U, P) with
// tau U tau^* = U^* and tau P tau^* = P: defect operators A = UPU^* - P,
// B = 1 - P - Q, the decoupler V with W = VU, and the Kramers chains that
// carry a residual shift.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "z2edge/operator_core.hpp"

namespace z2edge {

class SymmetricPair {
 public:
  // Verifies tau odd, U unitary, P a projection, tau U tau^* = U^* and
  // tau P tau^* = P, each to `tol`.
  SymmetricPair(Matrix u, Matrix p, AntiUnitary tau, double tol = 1e-9);

  const Matrix& u() const { return u_; }
  const Matrix& p() const { return p_; }
  const AntiUnitary& tau() const { return tau_; }
  Index dimension() const { return u_.rows(); }
  double u_residual() const { return u_residual_; }
  double p_residual() const { return p_residual_; }

 private:
  Matrix u_, p_;
  AntiUnitary tau_;
  double u_residual_ = 0.0;
  double p_residual_ = 0.0;
};

struct DefectOperators {
  Matrix a, b, q;
  SpectralDecomposition spectrum;   // of A
  double square_residual = 0.0;     // ||A^2 + B^2 - 1||
  double anticommutator_residual = 0.0;  // ||AB + BA||
};

// Throws NumericalError when either identity misses `tol`.
DefectOperators defect_operators(const SymmetricPair& pair, double tol = 1e-8);

// Consecutive eigenvalues closer than tol are grouped.
struct EigenCluster {
  double value = 0.0;               // mean
  std::vector<Index> indices;
};
std::vector<EigenCluster> eigen_clusters(const RealVector& ascending,
                                         double tol);

struct TildeTau {
  AntiUnitary op;                   // U tau
  double p_to_q = 0.0;              // ||tau~ P tau~^* - Q||
  double q_to_p = 0.0;
  double b_residual = 0.0;          // ||tau~ B tau~^* - B||
  double a_residual = 0.0;          // ||tau~ A tau~^* + A||
  double max_cluster_angle = 0.0;   // tau~ E_lambda vs E_{-lambda}
};

// Throws NumericalError when any residual exceeds tol, or the angle exceeds
// 1e-8.
TildeTau tilde_tau(const SymmetricPair& pair, const DefectOperators& defects,
                   double cluster_tol = 1e-7, double tol = 1e-9);

struct SpectralSymmetryReport {
  Index clusters_checked = 0;
  std::vector<Index> mid_dimensions;  // dim E_lambda per checked cluster
  double max_angle = 0.0;             // B E_lambda vs E_{-lambda}
  double max_square_residual = 0.0;   // ||B^2 - (1 - lambda^2)|| on E_lambda
  bool even_dimensions = true;
  bool pass = true;
};

// Checks the B-pairing of E_lambda and E_{-lambda} for lambda away from
// {-1, 0, 1}. Throws NumericalError on a dimension mismatch, which means the
// clustering tolerance splits a degenerate eigenvalue.
SpectralSymmetryReport spectral_symmetry_check(const DefectOperators& defects,
                                               double cluster_tol = 1e-7);

struct KramersTheta {
  Matrix basis;                     // orthonormal basis of E_lambda
  AntiUnitary theta;                // (B^*B)^{-1/2} B tau~ in that basis
  double square_residual = 0.0;     // ||theta^2 + 1||
  double commutation_residual = 0.0;  // ||B tau~ - tau~ B||
  Matrix kramers;                   // Kramers-pair basis, in `basis` coords
};

// Throws InvalidArgument when the cluster sits at -1, 0 or 1.
KramersTheta kramers_theta(const DefectOperators& defects,
                           const AntiUnitary& tilde, const EigenCluster& cluster,
                           double cluster_tol = 1e-7);

struct XReport {
  Matrix x;                         // B (1 - 2Q)
  double expression_residual = 0.0; // max over the three forms
  double intertwining_residual = 0.0;  // PX = XQ = PQ
  double normality_residual = 0.0;  // XX^* = X^*X = (X + X^*)/2 = B^2
  double circle_residual = 0.0;     // max ||z - 1/2|^2 - 1/4|
  Vector eigenvalues;
  Index kernel_dimension = 0;       // singular values below kernel_tol
};

XReport build_X(const DefectOperators& defects, double kernel_tol = 1e-6);

struct OffDefectDecoupler {
  Matrix v_tilde;                   // on the full space, zero on E
  Matrix basis;                     // orthonormal basis of E^perp
  double min_singular_value = 0.0;  // of X on E^perp
  double leakage_floor = 0.0;       // sqrt(1 - (1 - cluster_tol)^2)
  double unitarity_residual = 0.0;  // on E^perp
  double intertwining_residual = 0.0;  // P V~ - V~ Q on E^perp
  double symmetry_residual = 0.0;   // tau~ V~ tau~^* - V~^*
};

OffDefectDecoupler decoupler_offdefect(const Matrix& x, const Matrix& perp_basis,
                                       const DefectOperators& defects,
                                       const AntiUnitary& tilde,
                                       double cluster_tol);

struct DefectDecoupler {
  Matrix v;                         // on the full space, zero on E^perp
  Matrix plus_basis;                // phi_1 .. phi_{2m+k}
  Matrix minus_basis;               // tau~ phi_i
  Index m = 0;
  bool odd = false;
  std::optional<Vector> rest_plus;  // phi_{2m+1}
  std::optional<Vector> rest_minus; // tau~ phi_{2m+1}
  double symmetry_residual = 0.0;   // tau~ v tau~^* - v^*
};

// Deterministic basis of a subspace: repeatedly take the coordinate with the
// largest remaining projector weight (ties to the lower index) and the
// normalized projector column there, whose pivot entry is real positive.
Matrix canonical_basis(const Matrix& subspace);

DefectDecoupler decoupler_defect(const Matrix& e_plus, const Matrix& e_minus,
                                 const AntiUnitary& tilde);

enum class Classification { even, odd_residual };
const char* to_string(Classification c);

struct SchattenRow {
  double p = 0.0;
  double commutator_up = 0.0;       // ||[U, P]||_p
  double u_minus_w = 0.0;           // ||U - W||_p
  double commutator_wp = 0.0;       // ||[W, P]||_p
  double bound = 0.0;               // ||[W - U, P]||_p + ||[U, P]||_p
};

struct DecouplingResult {
  Matrix w, v;
  Classification classification = Classification::even;
  Index e_plus_dimension = 0;
  Index e_minus_dimension = 0;
  std::map<double, Index> stability;  // cluster tol -> dim E_{+1}
  std::optional<Vector> pi_plus, pi_minus;
  std::vector<SchattenRow> schatten;
  std::map<std::string, double> checks;
};

// Throws NumericalError when dim E_{+1} changes between cluster_tol / 10 and
// cluster_tol * 10, or a contract identity fails.
DecouplingResult decouple(const SymmetricPair& pair, double cluster_tol = 1e-7);

struct ChainReport {
  int depth = 0;                    // K
  std::vector<Vector> plus;         // k = -K .. K + 1
  std::vector<Vector> minus;
  double orthogonality_residual = 0.0;
  double inclusion_residual = 0.0;
  double kramers_residual = 0.0;
  double base_residual = 0.0;       // (WPW^* - P) psi_pm = +- psi_pm
  int clean_depth = 0;              // largest depth whose checks pass
  bool pass = false;

  const Vector& plus_at(int k) const { return plus[std::size_t(k + depth)]; }
  const Vector& minus_at(int k) const { return minus[std::size_t(k + depth)]; }
};

// Pi_+^(k) = W^{k-1} Pi_+ W^{*(k-1)}, Pi_-^(k) = W^{*k} Pi_- W^k, given unit
// vectors spanning Pi_+ and Pi_-.
ChainReport chain_projections(const Matrix& w, const Matrix& p,
                              const AntiUnitary& tau, const Vector& pi_plus,
                              const Vector& pi_minus, int depth,
                              double tol = 1e-8);

struct ShiftReport {
  int depth = 0;
  std::vector<Vector> phi;          // k = -K .. K + 1
  std::vector<Vector> phi_bar;      // tau phi_k
  double forward_residual = 0.0;    // W phi_k - phi_{k+1}
  double backward_residual = 0.0;   // W phi_bar_k - phi_bar_{k-1}
  double cross_overlap = 0.0;       // max |<phi_k, phi_bar_l>|
  double equivalence_residual = 0.0;  // chain block of W vs window of S
  Matrix chain_basis;               // H'
  Matrix complement_basis;          // H''
  Matrix w_rest;                    // W'' on H''
  double invariance_residual = 0.0; // ||(1 - Pi_H') W Pi_H'||
  double rest_commutator = 0.0;     // ||[W'', P'']||
  int clean_depth = 0;
};

ShiftReport shift_extraction(const Matrix& w, const Matrix& p,
                             const AntiUnitary& tau, const Vector& pi_plus,
                             int depth, double tol = 1e-8);

// Generic pair: U = exp(iM) with M a tau-symmetrized Gaussian Hermitian
// matrix and P the spectral projection of an independent one onto its lowest
// 2 floor(N/4) states. Throws InvalidArgument for odd N.
SymmetricPair random_symmetric_pair(Index n, std::uint64_t seed);

// Ring of `sites` sites with spin: S shifts spin up right and spin down left
// (periodic); flat index 2 x + spin. P covers sites in `arc` (both spins);
// tau is the per-site standard odd form.
Matrix ring_shift(int sites);
Matrix ring_projection(int sites, const std::vector<int>& arc);
AntiUnitary ring_time_reversal(int sites);

// U = S, P = sites 0..arc_end.
SymmetricPair ring_shift_pair(int sites, int arc_end);

// Synthetic odd-branch input: W = S on the ring, P on sites -(L/2 - 1) .. 0
// (mod L), Pi_+ = |1 up>, Pi_- = |0 down>. Near this seam
// WPW^* - P = Pi_+ - Pi_-; the second seam sits half a ring away.
struct SyntheticShift {
  Matrix w, p;
  AntiUnitary tau;
  Vector pi_plus, pi_minus;
};
SyntheticShift synthetic_bilateral_shift(int sites);

}  // namespace z2edge
