#pragma once

// Finite-spectrum approximation driver: remove every partition level in
// turn, then replace the perturbed path by a real combination of spectral
// projections and certify the whole error chain.

#include "fsa/core.hpp"
#include "fsa/eig_curves.hpp"
#include "fsa/functional_calculus.hpp"
#include "fsa/level_surgery.hpp"
#include "fsa/mat_path.hpp"
#include "fsa/serialization.hpp"
#include "fsa/spectrum.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fsa {

/// Multiplicative guard applied to strict inequalities certified in floating point.
inline constexpr double kStrictGuard = 1e-6;
/// Eigenvalues of the approximant closer than this count as one value.
inline constexpr double kClusterTol = 1e-6;

class NormTooLarge : public PreconditionError {
 public:
  explicit NormTooLarge(double norm)
      : PreconditionError("sup norm " + std::to_string(norm) + " is not below 1"), norm_(norm) {}
  [[nodiscard]] double norm() const { return norm_; }

 private:
  double norm_;
};

/// Uniform partition -1 = t_1 < ... < t_n = 1 with mesh 2/(n-1) < eps/2, n minimal.
inline std::vector<double> make_partition(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("make_partition: eps must be positive");
  std::size_t n = 2;
  if (!(2.0 < eps / 2.0)) n = static_cast<std::size_t>(std::floor(4.0 / eps)) + 1;
  while (!(2.0 / static_cast<double>(n - 1) < eps / 2.0)) ++n;
  while (n > 2 && 2.0 / static_cast<double>(n - 2) < eps / 2.0) --n;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  t.front() = -1.0;
  t.back() = 1.0;
  return t;
}

inline double partition_mesh(std::size_t n) { return 2.0 / static_cast<double>(n - 1); }

/// Budget for the i-th level (1-based): eps/4 first, then
/// min(eps / 2^(i+1), half the smallest gap radius certified so far).
inline double budget_schedule(double eps, std::size_t i, const std::vector<double>& currentGaps) {
  if (i < 1) throw PreconditionError("budget_schedule: index is 1-based");
  if (i == 1) return eps / 4.0;
  double budget = std::ldexp(eps, -static_cast<int>(i + 1));
  for (double g : currentGaps) budget = std::min(budget, 0.5 * g);
  return budget;
}

/// Applies the Weyl update to the gaps maintained for already-removed levels
/// after a step of certified size stepDistance, and keeps the better of that
/// and the certificate recomputed from the new path's enclosures.
inline void update_maintained_gaps(std::vector<double>& gaps, const std::vector<double>& levels,
                                   const EigCurves& newCurves, double stepDistance) {
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    gaps[j] = std::max(gaps[j] - stepDistance, gap_radius(newCurves, levels[j]));
  }
}

/// Distinct eigenvalue clusters of a self-adjoint path over all nodes.
inline std::vector<double> spectrum_clusters(const MatPath& b, const EigSettings& settings = {},
                                             double tol = kClusterTol) {
  std::vector<double> values;
  for (const auto& h : b.nodes()) {
    const RealVector ev = eig_hermitian(h, settings).values;
    values.insert(values.end(), ev.data(), ev.data() + ev.size());
  }
  std::sort(values.begin(), values.end());
  std::vector<double> clusters;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] - values[start] > tol) {
      double sum = 0.0;
      for (std::size_t k = start; k < i; ++k) sum += values[k];
      clusters.push_back(sum / static_cast<double>(i - start));
      start = i;
    }
  }
  return clusters;
}

/// Sum of budgets < eps/2. The budgets are dyadic fractions of eps, so the
/// only error is the rounding of the running sum (at most count ulps).
inline bool budget_sum_below(double sum, std::size_t count, double eps) {
  return sum * (1.0 + static_cast<double>(count + 1) * 0x1p-52) < eps / 2.0;
}

struct LevelRecord {
  double level = 0.0;
  double budget = 0.0;
  /// Smallest maintained gap radius before this level (+inf for the first).
  double gapFloor = kInf;
  /// Gap radius at this level certified on the path right after removal.
  double gapAtRemoval = 0.0;
  /// Certified sup ||y^i - y^(i-1)||.
  double stepDistance = 0.0;
  bool unchanged = false;
  std::optional<MatPath> path;  // y^i, absent when unchanged or elided
  std::string pathDigest;
};

struct ErrorChain {
  double sumBudgets = 0.0;
  double xToY = 0.0;          // sup ||x - y^n||
  double yToBBound = 0.0;     // mesh - d/2
  double yToBMeasured = 0.0;  // sup ||y^n - b||
  double totalBound = 0.0;    // sumBudgets + yToBBound
  double xToB = 0.0;          // sup ||x - b||
};

struct ProjectionEntry {
  std::size_t interval = 0;  // index into intervals
  MatPath p;
};

struct ApproximantReport {
  std::string inputDigest;
  double epsilon = 0.0;
  std::vector<double> partition;
  double mesh = 0.0;
  std::vector<LevelRecord> levels;
  std::vector<GapCert> finalGaps;
  double d = 0.0;
  /// F_i = [t_i + d/2, t_{i+1} - d/2], assigned value t_i.
  std::vector<Interval> intervals;
  std::vector<ProjectionEntry> projections;  // nonzero ones only
  std::optional<MatPath> yN;
  std::optional<MatPath> b;
  std::string yDigest;
  std::string bDigest;
  ErrorChain chain;
  std::vector<double> spectrumValues;
  std::size_t spectrumSize = 0;
  ResolutionReport resolution;
  std::vector<Interval> inputBands;
};

struct ObstructionReport {
  std::string inputDigest;
  double epsilon = 0.0;
  std::vector<double> partition;
  std::vector<LevelRecord> levels;  // levels removed before the obstruction
  std::size_t levelIndex = 0;       // 0-based index of the obstructed level
  double gapFloor = kInf;
  ObstructionCert cert;
  /// Sup distance from x to the obstructed path.
  double priorDistance = 0.0;
};

struct CertificationFailure {
  std::string inputDigest;
  double epsilon = 0.0;
  std::size_t levelIndex = 0;
  std::string reason;
};

using ApproxOutcome = std::variant<ApproximantReport, ObstructionReport, CertificationFailure>;

struct PipelineConfig {
  EigSettings eig;
  double mergeTol = kDefaultMergeTol;
};

/// The obstructed path of an obstruction report: last recorded y^i, or x.
inline const MatPath& obstructed_path(const MatPath& x, const std::vector<LevelRecord>& levels) {
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (it->path) return *it->path;
  }
  return x;
}

inline ApproxOutcome finite_spectrum_approximate(const MatPath& x, double eps, const PipelineConfig& cfg = {}) {
  if (!x.self_adjoint()) throw NotHermitianError("finite_spectrum_approximate: x is not self-adjoint");
  if (!(eps > 0.0)) throw PreconditionError("finite_spectrum_approximate: eps must be positive");
  const CertifiedBound norm = sup_norm(x, cfg.eig);
  if (!(norm.value < 1.0)) throw NormTooLarge(norm.value);

  const std::string digest = path_digest(x);
  const std::vector<double> t = make_partition(eps);
  const std::size_t n = t.size();

  auto fail = [&](std::size_t level, std::string reason) -> ApproxOutcome {
    return CertificationFailure{digest, eps, level, std::move(reason)};
  };

  EigCurves curves = eig_curves(x, cfg.eig);
  const std::vector<Interval> inputBands = merged_enclosures(curves, cfg.mergeTol);
  MatPath current = x;
  std::vector<LevelRecord> levels;
  std::vector<double> gaps;

  for (std::size_t i = 0; i < n; ++i) {
    LevelRecord record;
    record.level = t[i];
    record.budget = budget_schedule(eps, i + 1, gaps);
    for (double g : gaps) record.gapFloor = std::min(record.gapFloor, g);

    RemovalResult removal = remove_level(current, curves, t[i], record.budget, 0.0, cfg.eig);
    if (auto* obstruction = std::get_if<Obstruction>(&removal)) {
      ObstructionReport report;
      report.inputDigest = digest;
      report.epsilon = eps;
      report.partition = t;
      report.levelIndex = i;
      report.gapFloor = record.gapFloor;
      report.cert = obstruction->cert;
      report.priorDistance = sup_distance(x, current, cfg.eig);
      report.levels = std::move(levels);
      return report;
    }
    if (auto* inconclusive = std::get_if<InconclusiveGrid>(&removal)) {
      return fail(i, "level " + std::to_string(t[i]) + ": curve " + std::to_string(inconclusive->curve + 1) +
                         " is neither removable nor node-obstructed within budget " +
                         std::to_string(record.budget) + "; refine the grid");
    }
    if (auto* failed = std::get_if<CertificationFailed>(&removal)) return fail(i, failed->reason);

    auto& done = std::get<LevelRemoval>(removal);
    record.gapAtRemoval = done.gap.radius;
    record.stepDistance = done.distance;
    record.unchanged = done.distance == 0.0;
    update_maintained_gaps(gaps, t, done.curves, done.distance);
    gaps.push_back(done.gap.radius);
    curves = std::move(done.curves);
    if (!record.unchanged) {
      current = std::move(done.y);
      record.path = current;
    }
    record.pathDigest = path_digest(current);
    levels.push_back(std::move(record));
  }
  const MatPath& yN = current;

  ApproximantReport report;
  report.inputDigest = digest;
  report.epsilon = eps;
  report.partition = t;
  report.mesh = partition_mesh(n);
  report.inputBands = inputBands;

  double minGap = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const LevelResult gap = level_gap(curves, t[i]);
    if (std::holds_alternative<Hit>(gap)) {
      return fail(i, "final path: level " + std::to_string(t[i]) + " is not certified outside the spectrum");
    }
    report.finalGaps.push_back(std::get<GapCert>(gap));
    minGap = std::min(minGap, report.finalGaps.back().radius);
  }
  report.d = std::min(eps / 4.0 * (1.0 - kStrictGuard), 0.5 * minGap);
  const double d = report.d;

  for (std::size_t i = 0; i + 1 < n; ++i) report.intervals.push_back({t[i] + d / 2.0, t[i + 1] - d / 2.0});

  // Every node eigenvalue of y^n must be assigned to some interval.
  for (std::size_t j = 0; j < curves.node_count(); ++j) {
    for (std::size_t k = 0; k < curves.dim(); ++k) {
      const double lambda = curves.value(j, k);
      const bool covered = std::any_of(report.intervals.begin(), report.intervals.end(),
                                       [&](const Interval& f) { return f.contains(lambda); });
      if (!covered) {
        return fail(n, "eigenvalue " + std::to_string(lambda) + " of the final path lies outside every interval");
      }
    }
  }

  const auto dim = static_cast<Eigen::Index>(x.dim());
  std::vector<Matrix> bNodes(x.node_count(), Matrix::Zero(dim, dim));
  std::vector<MatPath> nonzero;
  for (std::size_t i = 0; i < report.intervals.size(); ++i) {
    const Interval f = report.intervals[i];
    bool occupied = false;
    for (Eigen::Index j = 0; j < curves.lambda.rows() && !occupied; ++j) {
      for (Eigen::Index k = 0; k < curves.lambda.cols(); ++k) {
        if (f.contains(curves.lambda(j, k))) {
          occupied = true;
          break;
        }
      }
    }
    SpectralProjection proj = spectral_projection(yN, curves, f, d / 2.0);
    if (!occupied) continue;
    for (std::size_t j = 0; j < x.node_count(); ++j) bNodes[j] += t[i] * proj.p.node(j);
    nonzero.push_back(proj.p);
    report.projections.push_back({i, std::move(proj.p)});
  }
  for (auto& h : bNodes) h = symmetrize(h);
  const MatPath b(std::move(bNodes), true);

  report.resolution = resolution_check(nonzero);
  report.spectrumValues = spectrum_clusters(b, cfg.eig);
  report.spectrumSize = report.spectrumValues.size();

  ErrorChain& chain = report.chain;
  for (const auto& record : levels) chain.sumBudgets += record.budget;
  chain.xToY = sup_distance(x, yN, cfg.eig);
  chain.yToBBound = report.mesh - d / 2.0;
  chain.yToBMeasured = sup_distance(yN, b, cfg.eig);
  chain.totalBound = chain.sumBudgets + chain.yToBBound;
  chain.xToB = sup_distance(x, b, cfg.eig);

  const double strict = 1.0 - kStrictGuard;
  if (!budget_sum_below(chain.sumBudgets, levels.size(), eps)) return fail(n, "sum of budgets is not below eps/2");
  if (!(chain.xToY <= chain.sumBudgets)) return fail(n, "||x - y^n|| exceeds the sum of budgets");
  if (!(chain.yToBMeasured <= chain.yToBBound)) return fail(n, "||y^n - b|| exceeds mesh - d/2");
  if (!(chain.yToBBound < eps / 2.0 * strict)) return fail(n, "mesh - d/2 is not below eps/2");
  if (!(chain.totalBound < eps * strict)) return fail(n, "certified total is not below eps");
  if (!(chain.xToB < eps * strict)) return fail(n, "recomputed ||x - b|| is not below eps");

  report.levels = std::move(levels);
  report.yDigest = path_digest(yN);
  report.bDigest = path_digest(b);
  report.yN = yN;
  report.b = b;
  return report;
}

}  // namespace fsa
