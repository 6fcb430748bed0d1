#pragma once

// JSON forms of pipeline outcomes. Schemas: "fsa-report/1" (approximant),
// "fsa-obstruction/1", "fsa-failure/1". The "timestamp" field is metadata
// only and never enters a digest or a check.

#include "fsa/approximant.hpp"
#include "fsa/serialization.hpp"
#include "fsa/spectrum.hpp"

#include <string>

namespace fsa {

inline constexpr const char* kReportSchema = "fsa-report/1";
inline constexpr const char* kObstructionSchema = "fsa-obstruction/1";
inline constexpr const char* kFailureSchema = "fsa-failure/1";

struct ReportOptions {
  bool includeMatrices = true;
  std::string timestamp;
  double mergeTol = kDefaultMergeTol;
};

namespace detail {

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json levels_to_json(const std::vector<LevelRecord>& levels, bool includeMatrices) {
  json out = json::array();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& r = levels[i];
    json entry{{"index", i},
               {"level", r.level},
               {"budget", r.budget},
               {"gapFloor", finite_or_null(r.gapFloor)},
               {"gapAtRemoval", r.gapAtRemoval},
               {"stepDistance", r.stepDistance},
               {"unchanged", r.unchanged},
               {"pathDigest", r.pathDigest}};
    if (includeMatrices && r.path) entry["path"] = element_to_json(*r.path);
    out.push_back(std::move(entry));
  }
  return out;
}

inline json level_result_to_json(const LevelResult& result) {
  if (const auto* gap = std::get_if<GapCert>(&result)) return json{{"level", gap->level}, {"radius", gap->radius}};
  const auto& hit = std::get<Hit>(result);
  return json{{"level", hit.level},
              {"hit", {{"segment", hit.segment}, {"curve", hit.curve + 1}, {"enclosure", {hit.enclosure.lo, hit.enclosure.hi}}}}};
}

}  // namespace detail

inline json spectrum_report_to_json(const SpectrumReport& report) {
  json bands = json::array();
  for (const auto& b : report.bands) bands.push_back({b.lo, b.hi});
  json perLevel = json::array();
  for (const auto& [level, result] : report.perLevel) perLevel.push_back(detail::level_result_to_json(result));
  return json{{"bands", std::move(bands)}, {"perLevel", std::move(perLevel)}};
}

inline json to_json(const ApproximantReport& r, const ReportOptions& opts = {}) {
  json gaps = json::array();
  for (const auto& g : r.finalGaps) gaps.push_back({{"level", g.level}, {"radius", g.radius}});
  json intervals = json::array();
  for (std::size_t i = 0; i < r.intervals.size(); ++i) {
    intervals.push_back({{"lo", r.intervals[i].lo}, {"hi", r.intervals[i].hi}, {"value", r.partition[i]}});
  }
  json bands = json::array();
  for (const auto& b : r.inputBands) bands.push_back({b.lo, b.hi});

  json doc{{"schema", kReportSchema},
           {"kind", "approximant"},
           {"timestamp", opts.timestamp},
           {"inputDigest", r.inputDigest},
           {"epsilon", r.epsilon},
           {"mergeTol", opts.mergeTol},
           {"partition", r.partition},
           {"mesh", r.mesh},
           {"levels", detail::levels_to_json(r.levels, opts.includeMatrices)},
           {"finalGaps", std::move(gaps)},
           {"d", r.d},
           {"intervals", std::move(intervals)},
           {"yDigest", r.yDigest},
           {"bDigest", r.bDigest},
           {"errorChain",
            {{"sumBudgets", r.chain.sumBudgets},
             {"xToY", r.chain.xToY},
             {"yToBBound", r.chain.yToBBound},
             {"yToBMeasured", r.chain.yToBMeasured},
             {"totalBound", r.chain.totalBound},
             {"xToB", r.chain.xToB}}},
           {"spectrumValues", r.spectrumValues},
           {"spectrumSize", r.spectrumSize},
           {"resolution",
            {{"idempotency", r.resolution.idempotency},
             {"selfAdjointness", r.resolution.selfAdjointness},
             {"orthogonality", r.resolution.orthogonality},
             {"completeness", r.resolution.completeness}}},
           {"inputBands", std::move(bands)},
           {"matricesIncluded", opts.includeMatrices}};
  json projections = json::array();
  for (const auto& p : r.projections) {
    json entry{{"interval", p.interval}};
    if (opts.includeMatrices) entry["path"] = element_to_json(p.p);
    projections.push_back(std::move(entry));
  }
  doc["projections"] = std::move(projections);
  if (opts.includeMatrices) {
    if (r.yN) doc["y"] = element_to_json(*r.yN);
    if (r.b) doc["b"] = element_to_json(*r.b);
  }
  return doc;
}

inline json to_json(const ObstructionReport& r, const MatPath& obstructedPath, const ReportOptions& opts = {}) {
  const auto& c = r.cert;
  json doc{{"schema", kObstructionSchema},
           {"kind", "obstruction"},
           {"timestamp", opts.timestamp},
           {"inputDigest", r.inputDigest},
           {"epsilon", r.epsilon},
           {"partition", r.partition},
           {"levels", detail::levels_to_json(r.levels, opts.includeMatrices)},
           {"obstructed",
            {{"levelIndex", r.levelIndex},
             {"level", c.level},
             {"budget", c.budget},
             {"gapFloor", detail::finite_or_null(r.gapFloor)},
             {"curve", c.curve + 1},
             {"nodeMinus", c.nodeMinus},
             {"nodePlus", c.nodePlus},
             {"sMinus", c.sMinus},
             {"sPlus", c.sPlus},
             {"lambdaMinus", c.lambdaMinus},
             {"lambdaPlus", c.lambdaPlus},
             {"priorDistance", r.priorDistance},
             {"pathDigest", path_digest(obstructedPath)}}},
           {"matricesIncluded", opts.includeMatrices}};
  if (opts.includeMatrices) doc["obstructed"]["path"] = element_to_json(obstructedPath);
  return doc;
}

inline json to_json(const CertificationFailure& r, const ReportOptions& opts = {}) {
  return json{{"schema", kFailureSchema},    {"kind", "certification-failed"}, {"timestamp", opts.timestamp},
              {"inputDigest", r.inputDigest}, {"epsilon", r.epsilon},           {"levelIndex", r.levelIndex},
              {"reason", r.reason}};
}

}  // namespace fsa
