#pragma once

// Independent re-derivation of every certified quantity in a report from the
// input element and the matrices embedded in the report. Nothing computed by
// the pipeline is trusted; each recorded number is recomputed from scratch
// with the eigen/enclosure primitives and compared.

#include "fsa/approximant.hpp"
#include "fsa/functional_calculus.hpp"
#include "fsa/report_io.hpp"
#include "fsa/serialization.hpp"
#include "fsa/spectrum.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fsa {

class DigestMismatch : public Error {
 public:
  using Error::Error;
};

struct VerifyResult {
  std::vector<std::string> violations;
  [[nodiscard]] bool passed() const { return violations.empty(); }
};

namespace detail {

class Checker {
 public:
  explicit Checker(VerifyResult& out) : out_(out) {}

  void require(bool ok, const std::string& name) {
    if (!ok) out_.violations.push_back(name);
  }

  /// recorded must reproduce the recomputed value.
  void same(const std::string& name, double recorded, double recomputed) {
    const double scale = std::max(std::abs(recorded), std::abs(recomputed));
    if (!(std::abs(recorded - recomputed) <= 1e-9 * scale + 1e-15)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << name << ": recorded " << recorded << " but recomputed " << recomputed;
      out_.violations.push_back(msg.str());
    }
  }

  void same(const std::string& name, const json& recorded, double recomputed) {
    if (!recorded.is_number()) {
      if (recorded.is_null() && !std::isfinite(recomputed)) return;
      out_.violations.push_back(name + ": missing or not a number");
      return;
    }
    same(name, recorded.get<double>(), recomputed);
  }

 private:
  VerifyResult& out_;
};

inline double number(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number()) throw Error(std::string("report: missing number ") + key);
  return doc.at(key).get<double>();
}

/// A recorded index must be a non-negative integer; anything else is named.
inline std::optional<std::size_t> index_field(const json& j, const std::string& name, Checker& check) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::size_t>(j.get<long long>());
  check.require(false, name + ": not a non-negative integer");
  return std::nullopt;
}

inline std::string idx(const char* base, std::size_t i) { return std::string(base) + "[" + std::to_string(i) + "]"; }

inline double max_node_difference(const MatPath& a, const MatPath& b) {
  if (a.dim() != b.dim() || a.segments() != b.segments()) return kInf;
  double worst = 0.0;
  for (std::size_t j = 0; j < a.node_count(); ++j) {
    worst = std::max(worst, (a.node(j) - b.node(j)).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct Replay {
  MatPath path;
  EigCurves curves;
  std::vector<double> gaps;
  double sumBudgets = 0.0;
  bool complete = true;
};

/// Replays the recorded level removals, re-deriving budgets, step sizes and
/// gap certificates.
inline Replay replay_levels(const MatPath& x, const json& report, const std::vector<double>& t,
                            const EigSettings& settings, Checker& check) {
  const double eps = number(report, "epsilon");
  Replay state{x, eig_curves(x, settings), {}, 0.0, true};
  const json& levels = report.at("levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const json& rec = levels[i];
    const std::string name = idx("levels", i);
    if (i >= t.size()) {
      check.require(false, name + ": more levels than partition points");
      break;
    }
    const auto recordedIndex = index_field(rec.value("index", json()), name + ".index", check);
    check.require(!recordedIndex || *recordedIndex == i, name + ".index");
    check.same(name + ".level", rec.at("level"), t[i]);
    double floor = kInf;
    for (double g : state.gaps) floor = std::min(floor, g);
    check.same(name + ".gapFloor", rec.at("gapFloor"), floor);
    const double budget = budget_schedule(eps, i + 1, state.gaps);
    check.same(name + (i == 0 ? ".budget = epsilon/4" : ".budget = min(epsilon/2^(i+1), gapFloor/2)"),
               rec.at("budget"), budget);
    const double recordedBudget = rec.at("budget").is_number() ? rec.at("budget").get<double>() : budget;
    state.sumBudgets += recordedBudget;

    const bool unchanged = rec.value("unchanged", false);
    MatPath current = state.path;
    if (!unchanged) {
      if (!rec.contains("path")) {
        check.require(false, name + ".path: matrices elided, report is not verifiable");
        state.complete = false;
        return state;
      }
      current = element_from_json(rec.at("path")).path;
    }
    check.require(rec.value("pathDigest", "") == path_digest(current), name + ".pathDigest");
    const double step = sup_distance(current, state.path, settings);
    check.same(name + ".stepDistance", rec.at("stepDistance"), step);
    check.require(step < budget, name + ".stepDistance < budget");
    check.require(!unchanged || step == 0.0, name + ".unchanged");

    EigCurves curves = eig_curves(current, settings);
    const LevelResult gap = level_gap(curves, t[i]);
    if (const auto* cert = std::get_if<GapCert>(&gap)) {
      check.same(name + ".gapAtRemoval", rec.at("gapAtRemoval"), cert->radius);
    } else {
      check.require(false, name + ".gapAtRemoval: level meets an enclosure of the removed path");
    }
    update_maintained_gaps(state.gaps, t, curves, step);
    state.gaps.push_back(gap_radius(curves, t[i]));
    state.path = std::move(current);
    state.curves = std::move(curves);
  }
  return state;
}

inline void verify_approximant(const MatPath& x, const json& report, const EigSettings& settings,
                               VerifyResult& result) {
  Checker check(result);
  const double eps = number(report, "epsilon");
  const std::vector<double> t = make_partition(eps);
  const std::size_t n = t.size();
  const auto& recordedPartition = report.at("partition");
  check.require(recordedPartition.size() == n, "partition vs epsilon: size");
  for (std::size_t i = 0; i < std::min(n, recordedPartition.size()); ++i) {
    check.same(idx("partition", i) + " vs epsilon", recordedPartition[i], t[i]);
  }
  const double mesh = partition_mesh(n);
  check.same("mesh", report.at("mesh"), mesh);

  const double mergeTol = report.value("mergeTol", kDefaultMergeTol);
  const auto bands = merged_enclosures(eig_curves(x, settings), mergeTol);
  const json& recordedBands = report.at("inputBands");
  check.require(recordedBands.size() == bands.size(), "inputBands: count");
  for (std::size_t i = 0; i < std::min(bands.size(), recordedBands.size()); ++i) {
    check.same(idx("inputBands", i) + ".lo", recordedBands[i][0], bands[i].lo);
    check.same(idx("inputBands", i) + ".hi", recordedBands[i][1], bands[i].hi);
  }

  Replay state = replay_levels(x, report, t, settings, check);
  if (!state.complete) return;
  check.require(report.at("levels").size() == n, "levels: every partition point must be removed");

  if (!report.contains("y") || !report.contains("b")) {
    check.require(false, "y/b: matrices elided, report is not verifiable");
    return;
  }
  const MatPath y = element_from_json(report.at("y")).path;
  check.require(report.value("yDigest", "") == path_digest(y), "yDigest");
  check.require(path_digest(y) == path_digest(state.path), "y equals the last removal path");
  const EigCurves yCurves = eig_curves(y, settings);

  double minGap = kInf;
  const json& finalGaps = report.at("finalGaps");
  check.require(finalGaps.size() == n, "finalGaps: count");
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = gap_radius(yCurves, t[i]);
    check.require(radius > 0.0, idx("finalGaps", i) + ".radius > 0");
    minGap = std::min(minGap, radius);
    if (i < finalGaps.size()) {
      check.same(idx("finalGaps", i) + ".level", finalGaps[i].at("level"), t[i]);
      check.same(idx("finalGaps", i) + ".radius", finalGaps[i].at("radius"), radius);
    }
  }
  const double d = std::min(eps / 4.0 * (1.0 - kStrictGuard), 0.5 * minGap);
  check.same("d = min(epsilon/4, min gap radius/2)", report.at("d"), d);
  check.require(d > 0.0 && d < eps / 4.0, "0 < d < epsilon/4");

  const json& intervals = report.at("intervals");
  check.require(intervals.size() == n - 1, "intervals: count");
  std::vector<Interval> f;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    f.push_back({t[i] + d / 2.0, t[i + 1] - d / 2.0});
    if (i < intervals.size()) {
      check.same(idx("intervals", i) + ".lo", intervals[i].at("lo"), f.back().lo);
      check.same(idx("intervals", i) + ".hi", intervals[i].at("hi"), f.back().hi);
      check.same(idx("intervals", i) + ".value", intervals[i].at("value"), t[i]);
    }
  }

  // Fresh spectral projections of y on every interval.
  std::vector<std::optional<MatPath>> fresh(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool occupied = false;
    for (Eigen::Index j = 0; j < yCurves.lambda.rows() && !occupied; ++j) {
      for (Eigen::Index k = 0; k < yCurves.lambda.cols(); ++k) occupied = occupied || f[i].contains(yCurves.lambda(j, k));
    }
    try {
      SpectralProjection p = spectral_projection(y, yCurves, f[i], d / 2.0);
      if (occupied) fresh[i] = std::move(p.p);
    } catch (const DomainViolation& e) {
      check.require(false, idx("intervals", i) + ": endpoint guard d/2 violated (" + e.what() + ")");
    }
  }

  const json& projections = report.at("projections");
  std::vector<MatPath> recorded;
  std::vector<bool> seen(f.size(), false);
  const auto dim = static_cast<Eigen::Index>(x.dim());
  std::vector<Matrix> sum(x.node_count(), Matrix::Zero(dim, dim));
  for (std::size_t k = 0; k < projections.size(); ++k) {
    const std::string name = idx("projections", k);
    const auto interval = index_field(projections[k].value("interval", json()), name + ".interval", check);
    if (!interval) continue;
    const std::size_t i = *interval;
    if (i >= f.size() || !fresh[i] || seen[i]) {
      check.require(false, name + ".interval: not an occupied interval");
      continue;
    }
    seen[i] = true;
    if (!projections[k].contains("path")) {
      check.require(false, name + ".path: matrices elided");
      continue;
    }
    MatPath p = element_from_json(projections[k].at("path")).path;
    check.require(max_node_difference(p, *fresh[i]) <= 1e-9, name + ".path = chi_F(y)");
    for (std::size_t j = 0; j < p.node_count(); ++j) sum[j] += t[i] * p.node(j);
    recorded.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    check.require(!fresh[i] || seen[i], idx("intervals", i) + ": occupied interval has no projection");
  }
  const ResolutionReport resolution = resolution_check(recorded);
  check.require(resolution.idempotency <= 1e-8, "resolution.idempotency <= 1e-8");
  check.require(resolution.selfAdjointness <= 1e-8, "resolution.selfAdjointness <= 1e-8");
  check.require(resolution.orthogonality <= 1e-8, "resolution.orthogonality <= 1e-8");
  check.require(resolution.completeness <= 1e-8, "resolution.completeness <= 1e-8");

  const MatPath b = element_from_json(report.at("b")).path;
  check.require(report.value("bDigest", "") == path_digest(b), "bDigest");
  double bMismatch = 0.0;
  for (std::size_t j = 0; j < b.node_count() && j < sum.size(); ++j) {
    bMismatch = std::max(bMismatch, (b.node(j) - sum[j]).cwiseAbs().maxCoeff());
  }
  check.require(b.node_count() == x.node_count() && bMismatch <= 1e-12, "b = sum t_i p_i");

  const std::vector<double> clusters = spectrum_clusters(b, settings);
  check.same("spectrumSize", report.at("spectrumSize"), static_cast<double>(clusters.size()));
  check.require(clusters.size() <= n, "spectrumSize <= partition size");
  const json& values = report.at("spectrumValues");
  check.require(values.size() == clusters.size(), "spectrumValues: count");
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (i < values.size()) check.same(idx("spectrumValues", i), values[i], clusters[i]);
    const bool inPartition =
        std::any_of(t.begin(), t.end(), [&](double ti) { return std::abs(ti - clusters[i]) <= kClusterTol; });
    check.require(inPartition, idx("spectrumValues", i) + " lies in the partition");
  }

  const json& chain = report.at("errorChain");
  const double sumBudgets = state.sumBudgets;
  check.same("errorChain.sumBudgets", chain.at("sumBudgets"), sumBudgets);
  check.require(budget_sum_below(sumBudgets, n, eps), "errorChain.sumBudgets < epsilon/2");
  const double xToY = sup_distance(x, y, settings);
  check.same("errorChain.xToY", chain.at("xToY"), xToY);
  check.require(xToY <= sumBudgets, "errorChain.xToY <= sumBudgets");
  const double yToBBound = mesh - d / 2.0;
  check.same("errorChain.yToBBound = mesh - d/2", chain.at("yToBBound"), yToBBound);
  check.require(yToBBound < eps / 2.0 * (1.0 - kStrictGuard), "errorChain.yToBBound < epsilon/2");
  const double yToB = sup_distance(y, b, settings);
  check.same("errorChain.yToBMeasured", chain.at("yToBMeasured"), yToB);
  check.require(yToB <= yToBBound, "errorChain.yToBMeasured <= yToBBound");
  const double total = sumBudgets + yToBBound;
  check.same("errorChain.totalBound", chain.at("totalBound"), total);
  check.require(total < eps * (1.0 - kStrictGuard), "errorChain.totalBound < epsilon");
  const double xToB = sup_distance(x, b, settings);
  check.same("errorChain.xToB", chain.at("xToB"), xToB);
  check.require(xToB < eps * (1.0 - kStrictGuard), "errorChain.xToB < epsilon");
  check.require(xToB <= xToY + yToB + 1e-12, "errorChain.xToB <= xToY + yToBMeasured");
}

inline void verify_obstruction(const MatPath& x, const json& report, const EigSettings& settings,
                               VerifyResult& result) {
  Checker check(result);
  const double eps = number(report, "epsilon");
  const std::vector<double> t = make_partition(eps);
  const auto& recordedPartition = report.at("partition");
  check.require(recordedPartition.size() == t.size(), "partition vs epsilon: size");
  for (std::size_t i = 0; i < std::min(t.size(), recordedPartition.size()); ++i) {
    check.same(idx("partition", i) + " vs epsilon", recordedPartition[i], t[i]);
  }
  Replay state = replay_levels(x, report, t, settings, check);
  if (!state.complete) return;

  const json& ob = report.at("obstructed");
  const std::size_t i = report.at("levels").size();
  check.same("obstructed.levelIndex", ob.at("levelIndex"), static_cast<double>(i));
  if (i >= t.size()) {
    check.require(false, "obstructed.levelIndex: beyond the partition");
    return;
  }
  check.same("obstructed.level", ob.at("level"), t[i]);
  double floor = kInf;
  for (double g : state.gaps) floor = std::min(floor, g);
  check.same("obstructed.gapFloor", ob.at("gapFloor"), floor);
  const double budget = budget_schedule(eps, i + 1, state.gaps);
  check.same("obstructed.budget", ob.at("budget"), budget);

  if (!ob.contains("path")) {
    check.require(false, "obstructed.path: matrices elided, report is not verifiable");
    return;
  }
  const MatPath path = element_from_json(ob.at("path")).path;
  check.require(ob.value("pathDigest", "") == path_digest(path), "obstructed.pathDigest");
  check.require(path_digest(path) == path_digest(state.path), "obstructed.path equals the last removal path");
  check.same("obstructed.priorDistance", ob.at("priorDistance"), sup_distance(x, path, settings));

  const EigCurves curves = eig_curves(path, settings);
  const auto curveField = index_field(ob.value("curve", json()), "obstructed.curve", check);
  const auto minusField = index_field(ob.value("nodeMinus", json()), "obstructed.nodeMinus", check);
  const auto plusField = index_field(ob.value("nodePlus", json()), "obstructed.nodePlus", check);
  if (!curveField || !minusField || !plusField) return;
  const std::size_t curve1 = *curveField;
  const std::size_t nodeMinus = *minusField;
  const std::size_t nodePlus = *plusField;
  if (curve1 < 1 || curve1 > curves.dim() || nodeMinus >= curves.node_count() || nodePlus >= curves.node_count()) {
    check.require(false, "obstructed: witness indices out of range");
    return;
  }
  const double m = static_cast<double>(path.segments());
  check.same("obstructed.sMinus", ob.at("sMinus"), static_cast<double>(nodeMinus) / m);
  check.same("obstructed.sPlus", ob.at("sPlus"), static_cast<double>(nodePlus) / m);
  const double lambdaMinus = curves.value(nodeMinus, curve1 - 1);
  const double lambdaPlus = curves.value(nodePlus, curve1 - 1);
  check.same("obstructed.lambdaMinus", ob.at("lambdaMinus"), lambdaMinus);
  check.same("obstructed.lambdaPlus", ob.at("lambdaPlus"), lambdaPlus);
  check.require(lambdaMinus <= t[i] - budget, "obstructed: lambda(sMinus) <= level - budget");
  check.require(lambdaPlus >= t[i] + budget, "obstructed: lambda(sPlus) >= level + budget");
}

}  // namespace detail

/// Throws DigestMismatch when the report was produced for a different element.
inline VerifyResult verify_report(const MatPath& x, const json& report, const EigSettings& settings = {}) {
  VerifyResult result;
  if (report.value("inputDigest", "") != path_digest(x)) {
    throw DigestMismatch("report digest does not match the element");
  }
  const std::string schema = report.value("schema", "");
  try {
    if (schema == kReportSchema) {
      detail::verify_approximant(x, report, settings, result);
    } else if (schema == kObstructionSchema) {
      detail::verify_obstruction(x, report, settings, result);
    } else if (schema == kFailureSchema) {
      result.violations.push_back("schema: a certification-failure report carries no certificate");
    } else {
      result.violations.push_back("schema: unknown report schema '" + schema + "'");
    }
  } catch (const json::exception& e) {
    result.violations.push_back(std::string("report structure: ") + e.what());
  } catch (const Error& e) {
    result.violations.push_back(std::string("report structure: ") + e.what());
  }
  return result;
}

}  // namespace fsa
