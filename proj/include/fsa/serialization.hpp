#pragma once

// Element JSON files: {"n": int, "m": int, "nodes": [node][row][col] = [re, im]}.

#include "fsa/core.hpp"
#include "fsa/mat_path.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace fsa {

using json = nlohmann::json;

/// Asymmetry above this (relative to 1 + ||H||) is reported when loading files.
inline constexpr double kHermitianWarnTol = 1e-6;

inline json matrix_to_json(const Matrix& h) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < h.cols(); ++j) row.push_back({h(i, j).real(), h(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& rows, std::size_t n) {
  if (!rows.is_array() || rows.size() != n) throw DimensionError("matrix JSON: expected " + std::to_string(n) + " rows");
  Matrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != n) throw DimensionError("matrix JSON: row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      const json& entry = row[j];
      if (!entry.is_array() || entry.size() != 2) throw DimensionError("matrix JSON: entries must be [re, im]");
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return h;
}

inline json element_to_json(const MatPath& x) {
  json nodes = json::array();
  for (const auto& h : x.nodes()) nodes.push_back(matrix_to_json(h));
  return json{{"n", x.dim()}, {"m", x.segments()}, {"nodes", std::move(nodes)}};
}

struct LoadedElement {
  MatPath path;
  /// max_j ||H_j - H_j^*|| / (1 + ||H_j||) before symmetrization.
  double asymmetry = 0.0;
};

inline LoadedElement element_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("m") || !doc.contains("nodes")) {
    throw DimensionError("element JSON: missing n, m or nodes");
  }
  const auto n = doc.at("n").get<std::size_t>();
  const auto m = doc.at("m").get<std::size_t>();
  const json& nodesJson = doc.at("nodes");
  if (!nodesJson.is_array()) throw DimensionError("element JSON: nodes must be an array");
  std::vector<Matrix> nodes;
  double asymmetry = 0.0;
  for (const auto& node : nodesJson) {
    nodes.push_back(matrix_from_json(node, n));
    const Matrix& h = nodes.back();
    asymmetry = std::max(asymmetry, hermitian_defect(h) / (1.0 + operator_norm(h)));
  }
  return {make_path(n, m, nodes), asymmetry};
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return out.str();
}

/// Digest of the canonical JSON serialization of a path.
inline std::string path_digest(const MatPath& x) { return sha256_hex(element_to_json(x).dump()); }

inline json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  return json::parse(in);
}

inline void write_text_atomic(const std::filesystem::path& file, const std::string& text) {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

inline void write_json_file(const std::filesystem::path& file, const json& doc) {
  write_text_atomic(file, doc.dump(1) + "\n");
}

}  // namespace fsa
