#pragma once

#include "fsa/core.hpp"
#include "fsa/eig_curves.hpp"
#include "fsa/hermitian_eigen.hpp"
#include "fsa/mat_path.hpp"
#include "fsa/spectrum.hpp"

#include <span>
#include <string>
#include <vector>

namespace fsa {

/// Affine piece slope * lambda + intercept on a closed interval.
struct Piece {
  Interval domain;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Real function given by disjoint closed pieces, zero outside all of them.
/// Every finite piece endpoint is treated as a possible discontinuity and must
/// keep a positive certified distance from the spectrum.
class PiecewiseFn {
 public:
  PiecewiseFn() = default;
  explicit PiecewiseFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    for (const auto& p : pieces_) {
      if (!(p.domain.lo <= p.domain.hi)) throw PreconditionError("PiecewiseFn: empty piece domain");
    }
  }

  static PiecewiseFn indicator(Interval f) { return PiecewiseFn({Piece{f, 0.0, 1.0}}); }
  static PiecewiseFn identity() { return PiecewiseFn({Piece{{-kInf, kInf}, 1.0, 0.0}}); }
  static PiecewiseFn constant(double c) { return PiecewiseFn({Piece{{-kInf, kInf}, 0.0, c}}); }

  [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }

  [[nodiscard]] std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (const auto& p : pieces_) {
      if (std::isfinite(p.domain.lo)) out.push_back(p.domain.lo);
      if (std::isfinite(p.domain.hi)) out.push_back(p.domain.hi);
    }
    return out;
  }

  /// Strict membership: evaluating exactly at a breakpoint is a domain error,
  /// never a tie to be broken.
  [[nodiscard]] double operator()(double lambda) const {
    for (const auto& p : pieces_) {
      if (lambda == p.domain.lo || lambda == p.domain.hi) {
        throw DomainViolation("PiecewiseFn evaluated at breakpoint " + std::to_string(lambda));
      }
      if (p.domain.lo < lambda && lambda < p.domain.hi) return p.slope * lambda + p.intercept;
    }
    return 0.0;
  }

  /// Pointwise product, assuming both functions are piecewise constant.
  [[nodiscard]] PiecewiseFn times_constant_pieces(const PiecewiseFn& other) const {
    std::vector<Piece> out;
    for (const auto& a : pieces_) {
      for (const auto& b : other.pieces_) {
        const Interval overlap{std::max(a.domain.lo, b.domain.lo), std::min(a.domain.hi, b.domain.hi)};
        if (overlap.lo <= overlap.hi) out.push_back({overlap, 0.0, a.intercept * b.intercept});
      }
    }
    return PiecewiseFn(std::move(out));
  }

 private:
  std::vector<Piece> pieces_;
};

/// Minimum distance from any breakpoint of f to any segment enclosure of the
/// curves; +inf when f has no finite breakpoints.
inline double domain_guard(const EigCurves& curves, const PiecewiseFn& f) {
  double guard = kInf;
  for (double c : f.breakpoints()) {
    for (std::size_t j = 0; j < curves.segments(); ++j) {
      for (std::size_t k = 0; k < curves.dim(); ++k) {
        guard = std::min(guard, segment_enclosure(curves, j, k).distance(c));
      }
    }
  }
  return guard;
}

namespace detail {
inline void require_guard(double guard, double minGuard) {
  if (!(guard > 0.0) || guard < minGuard) {
    throw DomainViolation("discontinuity of f at certified distance " + std::to_string(guard) +
                          " from the spectrum (need > 0 and >= " + std::to_string(minGuard) + ")");
  }
}
}  // namespace detail

/// f(y) nodewise as U_j diag(f(lambda_j)) U_j^*.
inline MatPath apply_fn(const MatPath& y, const EigCurves& curves, const PiecewiseFn& f,
                        double minGuard = 0.0) {
  detail::require_guard(domain_guard(curves, f), minGuard);
  std::vector<Matrix> nodes(y.node_count());
  parallel_for(y.node_count(), [&](std::size_t j) {
    RealVector values = curves.node_values(j);
    for (Eigen::Index k = 0; k < values.size(); ++k) values(k) = f(values(k));
    nodes[j] = compose_spectral(curves.frames[j], values);
  });
  return MatPath(std::move(nodes), true);
}

inline MatPath apply_fn(const MatPath& y, const PiecewiseFn& f, double minGuard = 0.0,
                        const EigSettings& settings = {}) {
  return apply_fn(y, eig_curves(y, settings), f, minGuard);
}

struct SpectralProjection {
  MatPath p;
  Interval interval;
  /// Certified distance from the interval's endpoints to the spectrum.
  double guard = 0.0;
  /// max_j ||p(s_{j+1}) - p(s_j)||, a refine-grid diagnostic.
  double gridJump = 0.0;
  /// max_j L_j / guard.
  double jumpBound = 0.0;
};

/// chi_F(y); F's endpoints must be at certified distance >= minGuard > 0 from
/// every enclosure of y.
inline SpectralProjection spectral_projection(const MatPath& y, const EigCurves& curves, Interval interval,
                                              double minGuard = 0.0) {
  const PiecewiseFn chi = PiecewiseFn::indicator(interval);
  SpectralProjection out{apply_fn(y, curves, chi, minGuard), interval, domain_guard(curves, chi), 0.0, 0.0};
  for (std::size_t j = 0; j < y.segments(); ++j) {
    out.gridJump = std::max(out.gridJump, operator_norm(out.p.node(j + 1) - out.p.node(j)));
    out.jumpBound = std::max(out.jumpBound, curves.segVar[j] / out.guard);
  }
  return out;
}

inline SpectralProjection spectral_projection(const MatPath& y, Interval interval, double minGuard = 0.0,
                                              const EigSettings& settings = {}) {
  return spectral_projection(y, eig_curves(y, settings), interval, minGuard);
}

/// Worst-case (over nodes) violations of the projection and resolution identities.
struct ResolutionReport {
  double idempotency = 0.0;     // max ||p_i^2 - p_i||
  double selfAdjointness = 0.0; // max ||p_i - p_i^*||
  double orthogonality = 0.0;   // max_{i != j} ||p_i p_j||
  double completeness = 0.0;    // max ||sum p_i - I||

  [[nodiscard]] double worst() const {
    return std::max({idempotency, selfAdjointness, orthogonality, completeness});
  }
};

inline ResolutionReport resolution_check(std::span<const MatPath> projections) {
  ResolutionReport report;
  if (projections.empty()) {
    report.completeness = 1.0;
    return report;
  }
  const MatPath& first = projections.front();
  for (const auto& p : projections) detail::require_same_shape(first, p, "resolution_check");
  const auto n = static_cast<Eigen::Index>(first.dim());
  for (std::size_t j = 0; j < first.node_count(); ++j) {
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t a = 0; a < projections.size(); ++a) {
      const Matrix& pa = projections[a].node(j);
      sum += pa;
      report.idempotency = std::max(report.idempotency, operator_norm(pa * pa - pa));
      report.selfAdjointness = std::max(report.selfAdjointness, operator_norm(pa - pa.adjoint()));
      for (std::size_t b = 0; b < projections.size(); ++b) {
        if (a == b) continue;
        report.orthogonality = std::max(report.orthogonality, operator_norm(pa * projections[b].node(j)));
      }
    }
    report.completeness = std::max(report.completeness, operator_norm(sum - Matrix::Identity(n, n)));
  }
  return report;
}

}  // namespace fsa
