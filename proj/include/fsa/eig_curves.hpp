#pragma once

#include "fsa/core.hpp"
#include "fsa/hermitian_eigen.hpp"
#include "fsa/mat_path.hpp"
#include "fsa/parallel.hpp"

#include <cmath>
#include <vector>

namespace fsa {

/// Sorted eigenvalue curves of a self-adjoint path. Curve k is the k-th
/// smallest eigenvalue at every node (0-based here).
struct EigCurves {
  RealMatrix lambda;            // (m+1) x n
  std::vector<Matrix> frames;   // x(s_j) = U_j diag(lambda_j) U_j^*
  std::vector<double> segVar;   // L_j = ||x(s_{j+1}) - x(s_j)||

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(lambda.cols()); }
  [[nodiscard]] std::size_t segments() const { return segVar.size(); }
  [[nodiscard]] std::size_t node_count() const { return static_cast<std::size_t>(lambda.rows()); }
  [[nodiscard]] double value(std::size_t j, std::size_t k) const {
    return lambda(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }
  [[nodiscard]] RealVector node_values(std::size_t j) const {
    return lambda.row(static_cast<Eigen::Index>(j)).transpose();
  }
};

inline EigCurves eig_curves(const MatPath& x, const EigSettings& settings = {}) {
  if (!x.self_adjoint()) throw NotHermitianError("eig_curves: path is not self-adjoint");
  const std::size_t nodes = x.node_count();
  const auto n = static_cast<Eigen::Index>(x.dim());

  EigCurves curves;
  curves.lambda.resize(static_cast<Eigen::Index>(nodes), n);
  curves.frames.resize(nodes);
  curves.segVar.assign(x.segments(), 0.0);

  std::vector<EigenDecomposition> decomps(nodes);
  parallel_for(nodes, [&](std::size_t j) { decomps[j] = eig_hermitian(x.node(j), settings); }, 8);
  parallel_for(x.segments(), [&](std::size_t j) {
    curves.segVar[j] = hermitian_norm(x.node(j + 1) - x.node(j), settings);
  }, 8);

  for (std::size_t j = 0; j < nodes; ++j) {
    curves.lambda.row(static_cast<Eigen::Index>(j)) = decomps[j].values.transpose();
    curves.frames[j] = std::move(decomps[j].vectors);
  }
  return curves;
}

/// Interval containing lambda_k(x(s)) for every s in [s_j, s_{j+1}].
///
/// By Weyl, lambda_k moves at most L_j * |u - u'| between parameters u, u' of
/// the segment, so the curve lies in the intersection of the two cones opened
/// at the endpoint values. That intersection is the endpoint hull widened by
/// r = max(0, (L_j - |delta lambda|) / 2) on both sides.
inline Interval segment_enclosure(const EigCurves& curves, std::size_t j, std::size_t k) {
  const double a = curves.value(j, k);
  const double b = curves.value(j + 1, k);
  const double r = std::max(0.0, 0.5 * (curves.segVar.at(j) - std::abs(b - a)));
  return {std::min(a, b) - r, std::max(a, b) + r};
}

/// [I_k, S_k]: hull of all segment enclosures of curve k.
inline Interval curve_range(const EigCurves& curves, std::size_t k) {
  Interval range = segment_enclosure(curves, 0, k);
  for (std::size_t j = 1; j < curves.segments(); ++j) range = hull(range, segment_enclosure(curves, j, k));
  return range;
}

/// Node-value hull of curve k (no inflation).
inline Interval curve_node_range(const EigCurves& curves, std::size_t k) {
  const auto col = curves.lambda.col(static_cast<Eigen::Index>(k));
  return {col.minCoeff(), col.maxCoeff()};
}

}  // namespace fsa
