#pragma once

// Generators and independent oracles for the test suite. Nothing in here calls
// the library's eigensolver or enclosure code.

#include "fsa/core.hpp"
#include "fsa/mat_path.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace fsa::testing {

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(n);
  Matrix h(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    h(i, i) = scale * g(rng);
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const Complex z(scale * g(rng), scale * g(rng));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

inline Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(n);
  Matrix z(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  return qr.householderQ() * Matrix::Identity(N, N);
}

/// Random path with independent Gaussian nodes, scaled by `scale`.
inline MatPath random_node_path(std::size_t n, std::size_t m, std::mt19937_64& rng, double scale = 0.3) {
  std::vector<Matrix> nodes;
  for (std::size_t j = 0; j <= m; ++j) nodes.push_back(random_hermitian(n, rng, scale));
  return make_path(n, m, nodes);
}

/// Ascending eigenvalues from Eigen's Householder/QR solver.
inline RealVector oracle_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline double oracle_norm(const Matrix& h) { return oracle_eigenvalues(h).cwiseAbs().maxCoeff(); }

/// Roots of the characteristic polynomial of a Hermitian matrix, n <= 3,
/// in closed form (quadratic formula / trigonometric cubic).
inline std::vector<double> charpoly_roots(const Matrix& h) {
  const auto n = h.rows();
  if (n == 1) return {h(0, 0).real()};
  if (n == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h(0, 1)));
    return {0.5 * (a + d) - disc, 0.5 * (a + d) + disc};
  }
  // lambda^3 - c2 lambda^2 + c1 lambda - c0 with c2 = tr, c1 = sum of 2x2
  // principal minors, c0 = det.
  const double c2 = h.trace().real();
  double c1 = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) c1 += (h(i, i) * h(j, j) - h(i, j) * h(j, i)).real();
  }
  const double c0 = h.determinant().real();
  // Depressed cubic via lambda = mu + c2/3.
  const double shift = c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
  std::vector<double> roots;
  if (std::abs(p) < 1e-300) {
    roots = {shift, shift, shift};
  } else {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(shift + r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Dense oversampling: eigenvalues of x at `factor` points per segment.
struct Sample {
  std::size_t segment;
  double s;
  RealVector values;
};

inline std::vector<Sample> oversample(const MatPath& x, std::size_t factor) {
  std::vector<Sample> out;
  const double m = static_cast<double>(x.segments());
  for (std::size_t j = 0; j < x.segments(); ++j) {
    for (std::size_t r = 0; r <= factor; ++r) {
      const double u = static_cast<double>(r) / static_cast<double>(factor);
      const Matrix h = (1.0 - u) * x.node(j) + u * x.node(j + 1);
      out.push_back({j, (static_cast<double>(j) + u) / m, oracle_eigenvalues(0.5 * (h + h.adjoint()))});
    }
  }
  return out;
}

inline double dense_sup_norm(const MatPath& x, std::size_t factor) {
  double worst = 0.0;
  for (const auto& s : oversample(x, factor)) worst = std::max(worst, s.values.cwiseAbs().maxCoeff());
  return worst;
}

/// Dense distance from level t to the spectrum of x.
inline double dense_level_distance(const MatPath& x, double t, std::size_t factor) {
  double best = kInf;
  for (const auto& s : oversample(x, factor)) best = std::min(best, (s.values.array() - t).abs().minCoeff());
  return best;
}

inline double max_abs_entry(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace fsa::testing
