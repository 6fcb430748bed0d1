#pragma once

// Approximate spectrum as a union of certified bands, gap certificates
// around levels, and node-witnessed obstructions to removing a level.

#include "fsa/core.hpp"
#include "fsa/eig_curves.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace fsa {

inline constexpr double kDefaultMergeTol = 1e-9;

/// (level - radius, level + radius) meets no segment enclosure.
struct GapCert {
  double level = 0.0;
  double radius = 0.0;
};

/// The level lies inside the enclosure of curve `curve` on segment `segment`.
struct Hit {
  double level = 0.0;
  std::size_t segment = 0;
  std::size_t curve = 0;
  Interval enclosure;
};

using LevelResult = std::variant<GapCert, Hit>;

struct SpectrumReport {
  std::vector<Interval> bands;
  std::map<double, LevelResult> perLevel;
};

/// Every sorted curve k with lambda_k(s_minus) <= level - budget and
/// lambda_k(s_plus) >= level + budget at grid nodes. Any self-adjoint y with
/// ||y - x|| < budget then has level in its spectrum.
struct ObstructionCert {
  double level = 0.0;
  double budget = 0.0;
  std::size_t curve = 0;
  std::size_t nodeMinus = 0;
  std::size_t nodePlus = 0;
  double sMinus = 0.0;
  double sPlus = 0.0;
  double lambdaMinus = 0.0;
  double lambdaPlus = 0.0;
};

enum class Removability { Down, Up, Both, Obstructed, Inconclusive };

inline std::string_view to_string(Removability r) {
  switch (r) {
    case Removability::Down: return "down";
    case Removability::Up: return "up";
    case Removability::Both: return "both";
    case Removability::Obstructed: return "obstructed";
    case Removability::Inconclusive: return "inconclusive: refine grid";
  }
  return "?";
}

struct CurveFeasibility {
  std::size_t curve = 0;
  Removability status = Removability::Inconclusive;
  Interval range;  // [I_k, S_k] over enclosures
  std::optional<ObstructionCert> witness;

  [[nodiscard]] bool down() const {
    return status == Removability::Down || status == Removability::Both;
  }
  [[nodiscard]] bool up() const { return status == Removability::Up || status == Removability::Both; }
};

/// All segment enclosures, merged when closer than mergeTol.
inline std::vector<Interval> merged_enclosures(const EigCurves& curves, double mergeTol) {
  std::vector<Interval> all;
  all.reserve(curves.segments() * curves.dim());
  for (std::size_t j = 0; j < curves.segments(); ++j) {
    for (std::size_t k = 0; k < curves.dim(); ++k) all.push_back(segment_enclosure(curves, j, k));
  }
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<Interval> bands;
  for (const auto& iv : all) {
    if (!bands.empty() && iv.lo - bands.back().hi <= mergeTol) {
      bands.back().hi = std::max(bands.back().hi, iv.hi);
    } else {
      bands.push_back(iv);
    }
  }
  return bands;
}

inline LevelResult level_gap(const EigCurves& curves, double t) {
  double radius = kInf;
  for (std::size_t j = 0; j < curves.segments(); ++j) {
    for (std::size_t k = 0; k < curves.dim(); ++k) {
      const Interval enc = segment_enclosure(curves, j, k);
      const double dist = enc.distance(t);
      if (dist <= 0.0) return Hit{t, j, k, enc};
      radius = std::min(radius, dist);
    }
  }
  return GapCert{t, radius};
}

inline LevelResult level_gap(const MatPath& x, double t, const EigSettings& settings = {}) {
  return level_gap(eig_curves(x, settings), t);
}

/// Radius of the gap certificate at t, or 0 on a hit.
inline double gap_radius(const EigCurves& curves, double t) {
  const LevelResult result = level_gap(curves, t);
  if (const auto* gap = std::get_if<GapCert>(&result)) return gap->radius;
  return 0.0;
}

inline SpectrumReport spectrum_bands(const EigCurves& curves, double mergeTol = kDefaultMergeTol,
                                     const std::vector<double>& levels = {}) {
  SpectrumReport report;
  report.bands = merged_enclosures(curves, mergeTol);
  for (double t : levels) report.perLevel.emplace(t, level_gap(curves, t));
  return report;
}

inline SpectrumReport spectrum_bands(const MatPath& x, double mergeTol = kDefaultMergeTol,
                                     const std::vector<double>& levels = {},
                                     const EigSettings& settings = {}) {
  return spectrum_bands(eig_curves(x, settings), mergeTol, levels);
}

/// Per-curve feasibility of pushing curve k below (down) or above (up) the
/// level within the budget. Feasibility uses enclosures; obstruction
/// witnesses use exact node values.
inline std::vector<CurveFeasibility> check_removability(const EigCurves& curves, double t, double budget) {
  if (!(budget >= 0.0)) throw PreconditionError("check_removability: budget must be nonnegative");
  std::vector<CurveFeasibility> out;
  out.reserve(curves.dim());
  for (std::size_t k = 0; k < curves.dim(); ++k) {
    CurveFeasibility f;
    f.curve = k;
    f.range = curve_range(curves, k);
    const bool down = f.range.hi < t + budget;
    const bool up = f.range.lo > t - budget;
    if (down && up) {
      f.status = Removability::Both;
    } else if (down) {
      f.status = Removability::Down;
    } else if (up) {
      f.status = Removability::Up;
    } else {
      const auto col = curves.lambda.col(static_cast<Eigen::Index>(k));
      Eigen::Index lowNode = 0;
      Eigen::Index highNode = 0;
      const double low = col.minCoeff(&lowNode);
      const double high = col.maxCoeff(&highNode);
      if (low <= t - budget && high >= t + budget) {
        f.status = Removability::Obstructed;
        const double m = static_cast<double>(curves.segments());
        f.witness = ObstructionCert{t,
                                    budget,
                                    k,
                                    static_cast<std::size_t>(lowNode),
                                    static_cast<std::size_t>(highNode),
                                    static_cast<double>(lowNode) / m,
                                    static_cast<double>(highNode) / m,
                                    low,
                                    high};
      } else {
        f.status = Removability::Inconclusive;
      }
    }
    out.push_back(f);
  }
  return out;
}

/// Re-checks an obstruction certificate against node values.
inline bool witness_holds(const EigCurves& curves, const ObstructionCert& cert) {
  if (cert.curve >= curves.dim() || cert.nodeMinus >= curves.node_count() ||
      cert.nodePlus >= curves.node_count()) {
    return false;
  }
  return curves.value(cert.nodeMinus, cert.curve) <= cert.level - cert.budget &&
         curves.value(cert.nodePlus, cert.curve) >= cert.level + cert.budget;
}

}  // namespace fsa
