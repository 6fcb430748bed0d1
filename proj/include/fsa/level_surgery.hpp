#pragma once

// Constructive level removal: push every sorted eigenvalue curve off a level
// inside the path's own nodewise eigenframes, then certify the new gap.

#include "fsa/core.hpp"
#include "fsa/eig_curves.hpp"
#include "fsa/mat_path.hpp"
#include "fsa/spectrum.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fsa {

enum class Direction { Down, Up };

struct SurgeryPlan {
  double level = 0.0;
  double budget = 0.0;
  /// Curves [0, downCount) are pushed below level - eta, the rest above level + eta.
  std::size_t downCount = 0;
  std::vector<Direction> directions;
  double eta = 0.0;
  /// Per-curve max |mu_k - lambda_k| over nodes.
  std::vector<double> excursions;

  [[nodiscard]] double max_excursion() const {
    double e = 0.0;
    for (double v : excursions) e = std::max(e, v);
    return e;
  }
};

struct Obstruction {
  ObstructionCert cert;
};

struct InconclusiveGrid {
  double level = 0.0;
  double budget = 0.0;
  std::size_t curve = 0;
};

struct CertificationFailed {
  std::string reason;
};

using PlanResult = std::variant<SurgeryPlan, Obstruction, InconclusiveGrid>;

namespace detail {

inline double clipped_value(double lambda, Direction dir, double level, double eta) {
  return dir == Direction::Down ? std::min(lambda, level - eta) : std::max(lambda, level + eta);
}

inline SurgeryPlan plan_for_split(const EigCurves& curves, const std::vector<CurveFeasibility>& feas,
                                  double t, double budget, std::size_t downCount) {
  SurgeryPlan plan;
  plan.level = t;
  plan.budget = budget;
  plan.downCount = downCount;
  double slack = kInf;
  for (std::size_t k = 0; k < curves.dim(); ++k) {
    const bool down = k < downCount;
    plan.directions.push_back(down ? Direction::Down : Direction::Up);
    slack = std::min(slack, down ? t + budget - feas[k].range.hi : feas[k].range.lo - (t - budget));
  }
  plan.eta = std::min(0.5 * slack, 0.25 * budget);
  plan.excursions.assign(curves.dim(), 0.0);
  for (std::size_t j = 0; j < curves.node_count(); ++j) {
    for (std::size_t k = 0; k < curves.dim(); ++k) {
      const double lambda = curves.value(j, k);
      const double mu = clipped_value(lambda, plan.directions[k], t, plan.eta);
      plan.excursions[k] = std::max(plan.excursions[k], std::abs(mu - lambda));
    }
  }
  return plan;
}

}  // namespace detail

/// Chooses which curves go down and which go up, and the clip margin eta.
///
/// Feasible splits form a contiguous range of downCount values (feasibility is
/// monotone in the sorted index). Among them the split with the smallest
/// maximal excursion is taken, ties going to the larger downCount.
inline PlanResult plan_surgery(const EigCurves& curves, double t, double budget) {
  if (!(budget > 0.0)) throw PreconditionError("plan_surgery: budget must be positive");
  const auto feas = check_removability(curves, t, budget);
  for (const auto& f : feas) {
    if (f.status == Removability::Obstructed) return Obstruction{*f.witness};
  }
  const std::size_t n = curves.dim();
  std::size_t downPrefix = 0;  // curves [0, downPrefix) are all down-feasible
  while (downPrefix < n && feas[downPrefix].down()) ++downPrefix;
  std::size_t upSuffix = n;  // curves [upSuffix, n) are all up-feasible
  while (upSuffix > 0 && feas[upSuffix - 1].up()) --upSuffix;
  if (upSuffix > downPrefix) return InconclusiveGrid{t, budget, downPrefix};

  std::optional<SurgeryPlan> best;
  for (std::size_t split = upSuffix; split <= downPrefix; ++split) {
    SurgeryPlan candidate = detail::plan_for_split(curves, feas, t, budget, split);
    if (!best || candidate.max_excursion() <= best->max_excursion()) best = std::move(candidate);
  }
  return *best;
}

/// Clipped curve values mu, (m+1) x n. Ascending order is preserved.
inline RealMatrix clip_curves(const EigCurves& curves, const SurgeryPlan& plan) {
  if (plan.directions.size() != curves.dim()) throw DimensionError("clip_curves: plan/curve mismatch");
  RealMatrix mu = curves.lambda;
  for (Eigen::Index j = 0; j < mu.rows(); ++j) {
    for (Eigen::Index k = 0; k < mu.cols(); ++k) {
      mu(j, k) = detail::clipped_value(mu(j, k), plan.directions[static_cast<std::size_t>(k)], plan.level,
                                       plan.eta);
    }
  }
  return mu;
}

/// y(s_j) = x(s_j) + U_j diag(mu_j - lambda_j) U_j^*. Nodes with mu = lambda
/// are copied from x unchanged.
inline MatPath reassemble(const MatPath& x, const EigCurves& curves, const RealMatrix& mu) {
  if (mu.rows() != curves.lambda.rows() || mu.cols() != curves.lambda.cols() ||
      curves.node_count() != x.node_count()) {
    throw DimensionError("reassemble: shape mismatch");
  }
  std::vector<Matrix> nodes(x.node_count());
  parallel_for(x.node_count(), [&](std::size_t j) {
    const auto row = static_cast<Eigen::Index>(j);
    const RealVector shiftBy = (mu.row(row) - curves.lambda.row(row)).transpose();
    if (shiftBy.isZero(0.0)) {
      nodes[j] = x.node(j);
    } else {
      nodes[j] = symmetrize(x.node(j) + compose_spectral(curves.frames[j], shiftBy));
    }
  });
  return MatPath(std::move(nodes), true);
}

struct LevelRemoval {
  MatPath y;
  EigCurves curves;  // of y
  GapCert gap;
  SurgeryPlan plan;
  /// Certified sup ||y - x||.
  double distance = 0.0;
};

using RemovalResult = std::variant<LevelRemoval, Obstruction, InconclusiveGrid, CertificationFailed>;

/// plan -> clip -> reassemble, then certify ||y - x|| < budget and a gap at t
/// recomputed from y's own enclosures. A certified radius below gapTarget is
/// reported as CertificationFailed.
inline RemovalResult remove_level(const MatPath& x, const EigCurves& curves, double t, double budget,
                                  double gapTarget = 0.0, const EigSettings& settings = {}) {
  PlanResult planned = plan_surgery(curves, t, budget);
  if (auto* obstruction = std::get_if<Obstruction>(&planned)) return *obstruction;
  if (auto* inconclusive = std::get_if<InconclusiveGrid>(&planned)) return *inconclusive;
  SurgeryPlan plan = std::get<SurgeryPlan>(std::move(planned));

  const RealMatrix mu = clip_curves(curves, plan);
  if (mu == curves.lambda) {
    const LevelResult gap = level_gap(curves, t);
    if (const auto* cert = std::get_if<GapCert>(&gap); cert && cert->radius >= gapTarget) {
      return LevelRemoval{x, curves, *cert, std::move(plan), 0.0};
    }
  }
  MatPath y = reassemble(x, curves, mu);
  const double distance = sup_distance(y, x, settings);
  if (!(distance < budget)) {
    return CertificationFailed{"perturbation norm " + std::to_string(distance) + " is not below budget " +
                               std::to_string(budget)};
  }
  EigCurves yCurves = eig_curves(y, settings);
  const LevelResult gap = level_gap(yCurves, t);
  if (const auto* hit = std::get_if<Hit>(&gap)) {
    return CertificationFailed{"level " + std::to_string(t) + " still meets the enclosure of curve " +
                               std::to_string(hit->curve + 1) + " on segment " + std::to_string(hit->segment) +
                               "; refine the grid"};
  }
  const GapCert cert = std::get<GapCert>(gap);
  if (cert.radius < gapTarget) {
    return CertificationFailed{"certified gap " + std::to_string(cert.radius) + " below target " +
                               std::to_string(gapTarget)};
  }
  return LevelRemoval{std::move(y), std::move(yCurves), cert, std::move(plan), distance};
}

inline RemovalResult remove_level(const MatPath& x, double t, double budget, double gapTarget = 0.0,
                                  const EigSettings& settings = {}) {
  return remove_level(x, eig_curves(x, settings), t, budget, gapTarget, settings);
}

}  // namespace fsa
