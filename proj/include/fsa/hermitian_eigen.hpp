#pragma once

// Cyclic complex Jacobi eigensolver for small Hermitian matrices, plus the
// operator-norm helpers the rest of the library builds on.

#include "fsa/core.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace fsa {

struct EigSettings {
  /// Stop once the off-diagonal Frobenius mass is at most relTol * ||H||_F.
  double relTol = 1e-14;
  int maxSweeps = 100;
};

/// x = vectors * diag(values) * vectors^*, values ascending.
struct EigenDecomposition {
  RealVector values;
  Matrix vectors;
  int sweeps = 0;
};

/// Largest singular value.
inline double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// ||H - H^*|| in operator norm.
inline double hermitian_defect(const Matrix& h) {
  const Matrix diff = h - h.adjoint();
  return operator_norm(diff);
}

namespace detail {

inline double off_diagonal_mass(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += std::norm(a(i, j));
    }
  }
  return std::sqrt(sum);
}

// Annihilates a(p, q) with the unitary V = diag(1, conj(e)) * R(c, s), where
// e is the phase of a(p, q) and R the real Jacobi rotation.
inline void jacobi_rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double g = std::abs(apq);
  if (g == 0.0) return;
  const Complex e = apq / g;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * g);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
  const double c = 1.0 / std::hypot(1.0, t);
  const double s = t * c;
  const Complex ce = std::conj(e);
  const Eigen::Index n = a.rows();

  for (Eigen::Index r = 0; r < n; ++r) {
    const Complex arp = a(r, p);
    const Complex arq = a(r, q);
    a(r, p) = c * arp - s * ce * arq;
    a(r, q) = s * arp + c * ce * arq;
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    const Complex apc = a(p, col);
    const Complex aqc = a(q, col);
    a(p, col) = c * apc - s * e * aqc;
    a(q, col) = s * apc + c * e * aqc;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const Complex vrp = v(r, p);
    const Complex vrq = v(r, q);
    v(r, p) = c * vrp - s * ce * vrq;
    v(r, q) = s * vrp + c * ce * vrq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
/// Output is a deterministic function of the input bits. Throws
/// NotHermitianError when ||H - H^*|| > 1e-12 (1 + ||H||).
inline EigenDecomposition eig_hermitian(const Matrix& h, const EigSettings& settings = {}) {
  if (h.rows() != h.cols()) throw DimensionError("eig_hermitian: matrix is not square");
  const Eigen::Index n = h.rows();
  if (n == 0) throw DimensionError("eig_hermitian: empty matrix");
  const double defect = hermitian_defect(h);
  if (defect > 1e-12 * (1.0 + operator_norm(h))) {
    throw NotHermitianError("eig_hermitian: input is not Hermitian (defect " +
                            std::to_string(defect) + ")");
  }

  Matrix a = 0.5 * (h + h.adjoint());
  Matrix v = Matrix::Identity(n, n);
  const double target = settings.relTol * a.norm();

  int sweeps = 0;
  while (sweeps < settings.maxSweeps) {
    const double off = detail::off_diagonal_mass(a);
    if (off == 0.0 || off <= target) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
    }
    ++sweeps;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweeps;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src).real();
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

/// Operator norm of a Hermitian matrix, max |lambda|.
inline double hermitian_norm(const Matrix& h, const EigSettings& settings = {}) {
  if (h.size() == 0) return 0.0;
  const RealVector values = eig_hermitian(h, settings).values;
  return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
}

/// (H + H^*) / 2 with the lower triangle set to the exact conjugate of the upper.
inline Matrix symmetrize(const Matrix& h) {
  const Eigen::Index n = h.rows();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = Complex(h(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex value = 0.5 * (h(i, j) + std::conj(h(j, i)));
      out(i, j) = value;
      out(j, i) = std::conj(value);
    }
  }
  return out;
}

/// U diag(values) U^*, symmetrized.
inline Matrix compose_spectral(const Matrix& frame, const RealVector& values) {
  const Matrix scaled = frame * values.cast<Complex>().asDiagonal();
  return symmetrize(scaled * frame.adjoint());
}

}  // namespace fsa
