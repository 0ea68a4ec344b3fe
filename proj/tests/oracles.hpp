#pragma once

// Test-only reference computations. They use closed forms and brute force
// and share no code with the library beyond the Eigen types.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// Two-band Bloch Hamiltonian d(k) . sigma of the spin-up block.
inline Eigen::Matrix2cd qwz(double m, double k1, double k2) {
  const double d1 = std::sin(k1), d2 = std::sin(k2);
  const double d3 = m + std::cos(k1) + std::cos(k2);
  Eigen::Matrix2cd h;
  h << d3, cplx(d1, -d2), cplx(d1, d2), -d3;
  return h;
}

// Half-width of the clean bulk gap at mu = 0: min over a grid of |d(k)|.
inline double bloch_half_gap(double m, int nk = 256) {
  double best = 1e300;
  for (int a = 0; a < nk; ++a) {
    for (int b = 0; b < nk; ++b) {
      const double k1 = 2 * pi * a / nk, k2 = 2 * pi * b / nk;
      const double d3 = m + std::cos(k1) + std::cos(k2);
      best = std::min(best, std::sqrt(std::sin(k1) * std::sin(k1) +
                                      std::sin(k2) * std::sin(k2) + d3 * d3));
    }
  }
  return best;
}

// Lattice Chern number of the lower band of the spin-up block on an nk x nk
// grid from products of normalized overlaps around each plaquette.
inline int fukui_chern(double m, int nk = 64) {
  std::vector<Eigen::Vector2cd> u(std::size_t(nk) * nk);
  for (int a = 0; a < nk; ++a) {
    for (int b = 0; b < nk; ++b) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> s(
          qwz(m, 2 * pi * a / nk, 2 * pi * b / nk));
      u[std::size_t(a) * nk + b] = s.eigenvectors().col(0);
    }
  }
  auto at = [&](int a, int b) -> const Eigen::Vector2cd& {
    return u[std::size_t((a + nk) % nk) * nk + std::size_t((b + nk) % nk)];
  };
  auto link = [](const Eigen::Vector2cd& x, const Eigen::Vector2cd& y) {
    const cplx z = x.dot(y);
    return z / std::abs(z);
  };
  double total = 0.0;
  for (int a = 0; a < nk; ++a) {
    for (int b = 0; b < nk; ++b) {
      const cplx loop = link(at(a, b), at(a + 1, b)) * link(at(a + 1, b), at(a + 1, b + 1)) *
                        link(at(a + 1, b + 1), at(a, b + 1)) * link(at(a, b + 1), at(a, b));
      total += std::arg(loop);
    }
  }
  return int(std::lround(total / (2 * pi)));
}

inline int clean_z2(double m) { return std::abs(fukui_chern(m)) % 2; }

// Singular values by brute force: square roots of the eigenvalues of M^* M.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(m.adjoint() * m,
                                                    Eigen::EigenvaluesOnly);
  return s.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

inline Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
  }
  return m;
}

inline Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(n, n, rng));
  return qr.householderQ();
}

// [[0, -1], [1, 0]] repeated, built independently of the library.
inline Eigen::MatrixXcd odd_form(int pairs) {
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(2 * pairs, 2 * pairs);
  for (int p = 0; p < pairs; ++p) {
    j(2 * p, 2 * p + 1) = -1.0;
    j(2 * p + 1, 2 * p) = 1.0;
  }
  return j;
}

}  // namespace oracle
