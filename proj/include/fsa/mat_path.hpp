#pragma once

// Elements of C([0,1], M_n(C)) represented by their values on the uniform
// grid s_j = j/m, affine between nodes.

#include "fsa/core.hpp"
#include "fsa/hermitian_eigen.hpp"
#include "fsa/parallel.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace fsa {

class MatPath {
 public:
  /// Nodes are stored as given; use make_path for validated, symmetrized input.
  MatPath(std::vector<Matrix> nodes, bool selfAdjoint)
      : nodes_(std::move(nodes)), selfAdjoint_(selfAdjoint) {
    if (nodes_.size() < 2) throw DimensionError("MatPath: need at least two nodes (m >= 1)");
    const auto n = nodes_.front().rows();
    if (n < 1) throw DimensionError("MatPath: matrix dimension must be positive");
    for (const auto& h : nodes_) {
      if (h.rows() != n || h.cols() != n) {
        throw DimensionError("MatPath: node matrices must all be n x n");
      }
    }
  }

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(nodes_.front().rows()); }
  [[nodiscard]] std::size_t segments() const { return nodes_.size() - 1; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] bool self_adjoint() const { return selfAdjoint_; }

  [[nodiscard]] const Matrix& node(std::size_t j) const { return nodes_.at(j); }
  [[nodiscard]] const std::vector<Matrix>& nodes() const { return nodes_; }

  [[nodiscard]] double grid(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(segments());
  }

  /// Value of the affine interpolant at s in [0, 1].
  [[nodiscard]] Matrix at(double s) const {
    const double m = static_cast<double>(segments());
    const double scaled = std::clamp(s, 0.0, 1.0) * m;
    const auto j = std::min(static_cast<std::size_t>(scaled), segments() - 1);
    const double u = scaled - static_cast<double>(j);
    Matrix value = (1.0 - u) * nodes_[j] + u * nodes_[j + 1];
    return selfAdjoint_ ? symmetrize(value) : value;
  }

 private:
  std::vector<Matrix> nodes_;
  bool selfAdjoint_;
};

/// Builds a self-adjoint path; every node is replaced by (H + H^*)/2.
inline MatPath make_path(std::size_t n, std::size_t m, const std::vector<Matrix>& nodeMatrices) {
  if (n == 0) throw DimensionError("make_path: n must be positive");
  if (m == 0) throw DimensionError("make_path: m must be positive");
  if (nodeMatrices.size() != m + 1) {
    throw DimensionError("make_path: expected " + std::to_string(m + 1) + " node matrices, got " +
                         std::to_string(nodeMatrices.size()));
  }
  std::vector<Matrix> nodes;
  nodes.reserve(nodeMatrices.size());
  for (const auto& h : nodeMatrices) {
    if (h.rows() != static_cast<Eigen::Index>(n) || h.cols() != static_cast<Eigen::Index>(n)) {
      throw DimensionError("make_path: node is not " + std::to_string(n) + " x " + std::to_string(n));
    }
    nodes.push_back(symmetrize(h));
  }
  return MatPath(std::move(nodes), true);
}

/// Path without the self-adjointness requirement.
inline MatPath make_general_path(std::size_t n, std::size_t m, std::vector<Matrix> nodeMatrices) {
  if (nodeMatrices.size() != m + 1) throw DimensionError("make_general_path: wrong node count");
  for (const auto& h : nodeMatrices) {
    if (h.rows() != static_cast<Eigen::Index>(n) || h.cols() != static_cast<Eigen::Index>(n)) {
      throw DimensionError("make_general_path: node shape mismatch");
    }
  }
  return MatPath(std::move(nodeMatrices), false);
}

/// Scalar function s -> f(s) sampled on the grid, as a 1 x 1 path.
template <typename Fn>
MatPath scalar_path(std::size_t m, Fn&& f) {
  std::vector<Matrix> nodes;
  for (std::size_t j = 0; j <= m; ++j) {
    Matrix h(1, 1);
    h(0, 0) = f(static_cast<double>(j) / static_cast<double>(m));
    nodes.push_back(h);
  }
  return make_path(1, m, nodes);
}

/// Constant path with the given node matrix.
inline MatPath constant_path(const Matrix& h, std::size_t m) {
  return make_path(static_cast<std::size_t>(h.rows()), m, std::vector<Matrix>(m + 1, h));
}

namespace detail {
inline void require_same_shape(const MatPath& x, const MatPath& y, const char* op) {
  if (x.dim() != y.dim() || x.segments() != y.segments()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

template <typename Fn>
std::vector<Matrix> map_nodes(const MatPath& x, Fn&& fn) {
  std::vector<Matrix> out;
  out.reserve(x.node_count());
  for (std::size_t j = 0; j < x.node_count(); ++j) out.push_back(fn(j));
  return out;
}
}  // namespace detail

inline MatPath add(const MatPath& x, const MatPath& y) {
  detail::require_same_shape(x, y, "add");
  return MatPath(detail::map_nodes(x, [&](std::size_t j) -> Matrix { return x.node(j) + y.node(j); }),
                 x.self_adjoint() && y.self_adjoint());
}

inline MatPath subtract(const MatPath& x, const MatPath& y) {
  detail::require_same_shape(x, y, "subtract");
  return MatPath(detail::map_nodes(x, [&](std::size_t j) -> Matrix { return x.node(j) - y.node(j); }),
                 x.self_adjoint() && y.self_adjoint());
}

inline MatPath scalar_mul(Complex c, const MatPath& x) {
  return MatPath(detail::map_nodes(x, [&](std::size_t j) -> Matrix { return c * x.node(j); }),
                 x.self_adjoint() && c.imag() == 0.0);
}

inline MatPath mul(const MatPath& x, const MatPath& y) {
  detail::require_same_shape(x, y, "mul");
  return MatPath(detail::map_nodes(x, [&](std::size_t j) -> Matrix { return x.node(j) * y.node(j); }),
                 false);
}

inline MatPath adjoint(const MatPath& x) {
  return MatPath(detail::map_nodes(x, [&](std::size_t j) -> Matrix { return x.node(j).adjoint(); }),
                 x.self_adjoint());
}

/// x - t * 1.
inline MatPath shift(const MatPath& x, double t) {
  return MatPath(detail::map_nodes(x,
                                   [&](std::size_t j) -> Matrix {
                                     Matrix h = x.node(j);
                                     for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) -= t;
                                     return h;
                                   }),
                 x.self_adjoint());
}

/// Rigorous upper bound on sup_{s in [0,1]} ||x(s)||.
struct CertifiedBound {
  double value = 0.0;
  double nodeMax = 0.0;
  double inflation = 0.0;
};

/// Operator norm of node j (max |lambda| for self-adjoint paths).
inline double node_norm(const MatPath& x, std::size_t j, const EigSettings& settings = {}) {
  return x.self_adjoint() ? hermitian_norm(x.node(j), settings) : operator_norm(x.node(j));
}

/// The operator norm is convex and x is affine on every segment, so the sup
/// over each segment is attained at one of its endpoints: inflation is zero.
inline CertifiedBound sup_norm(const MatPath& x, const EigSettings& settings = {}) {
  std::vector<double> norms(x.node_count(), 0.0);
  parallel_for(x.node_count(), [&](std::size_t j) { norms[j] = node_norm(x, j, settings); });
  CertifiedBound bound;
  for (double v : norms) bound.nodeMax = std::max(bound.nodeMax, v);
  bound.value = bound.nodeMax;
  return bound;
}

/// Certified sup_s ||x(s) - y(s)||.
inline double sup_distance(const MatPath& x, const MatPath& y, const EigSettings& settings = {}) {
  return sup_norm(subtract(x, y), settings).value;
}

}  // namespace fsa
