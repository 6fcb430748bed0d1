#pragma once

// Instance registry used by `fsa gen`: named closed-form paths and seeded
// random trigonometric-polynomial Hermitian paths.

#include "fsa/core.hpp"
#include "fsa/mat_path.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace fsa {

class UnknownInstance : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// 0.99 (2s - 1), the commutative counterexample.
inline MatPath scalar_line(std::size_t m) {
  return scalar_path(m, [](double s) { return 0.99 * (2.0 * s - 1.0); });
}

/// scale * [[2s-1, gamma], [gamma, 1-2s]].
inline MatPath avoided_crossing(double gamma, std::size_t m, double scale = 0.9) {
  std::vector<Matrix> nodes;
  for (std::size_t j = 0; j <= m; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(m);
    Matrix h(2, 2);
    h << 2.0 * s - 1.0, gamma, gamma, 1.0 - 2.0 * s;
    nodes.push_back(scale * h);
  }
  return make_path(2, m, nodes);
}

inline MatPath constant_diag(const std::vector<double>& diagonal, std::size_t m) {
  if (diagonal.empty()) throw UnknownInstance("constant-diag needs at least one value");
  RealVector d(static_cast<Eigen::Index>(diagonal.size()));
  for (std::size_t i = 0; i < diagonal.size(); ++i) d(static_cast<Eigen::Index>(i)) = diagonal[i];
  return constant_path(d.cast<Complex>().asDiagonal().toDenseMatrix(), m);
}

struct RandomPathSpec {
  std::size_t n = 2;
  std::size_t m = 64;
  std::size_t q = 2;
  std::uint64_t seed = 0;
  /// Scales the s-dependent harmonics (q >= 1) before normalization.
  double wiggle = 1.0;
  double targetNorm = 0.9;
};

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    h(i, i) = unit(rng);
    for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
      const double re = unit(rng);
      const double im = unit(rng);
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

/// H(s) = sum_{q <= Q} A_q cos(2 pi q s) + B_q sin(2 pi q s), rescaled so the
/// certified sup norm equals targetNorm. Deterministic per seed.
inline MatPath random_path(const RandomPathSpec& spec) {
  if (spec.n == 0 || spec.m == 0) throw PreconditionError("random_path: n and m must be positive");
  std::mt19937_64 rng(spec.seed);
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (std::size_t q = 0; q <= spec.q; ++q) {
    a.push_back(random_hermitian(spec.n, rng));
    b.push_back(random_hermitian(spec.n, rng));
  }
  std::vector<Matrix> nodes;
  for (std::size_t j = 0; j <= spec.m; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(spec.m);
    Matrix h = a[0];
    for (std::size_t q = 1; q <= spec.q; ++q) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(q) * s;
      h += spec.wiggle * (std::cos(phase) * a[q] + std::sin(phase) * b[q]);
    }
    nodes.push_back(h);
  }
  MatPath raw = make_path(spec.n, spec.m, nodes);
  const double norm = sup_norm(raw).value;
  if (norm == 0.0) return raw;
  return make_path(spec.n, spec.m, scalar_mul(spec.targetNorm / norm, raw).nodes());
}

namespace detail {
inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UnknownInstance("bad number '" + item + "' in instance arguments");
    }
  }
  return out;
}
}  // namespace detail

/// Resolves "scalar-line", "avoided-crossing(g)", "constant-diag(v1,...)" or "random".
inline MatPath make_instance(const std::string& name, const RandomPathSpec& spec) {
  static const std::regex call(R"(^\s*([a-z-]+)\s*(?:\((.*)\))?\s*$)");
  std::smatch match;
  if (!std::regex_match(name, match, call)) throw UnknownInstance("unknown instance '" + name + "'");
  const std::string head = match[1];
  const std::string args = match[2];
  if (head == "scalar-line" && args.empty()) return scalar_line(spec.m);
  if (head == "avoided-crossing") {
    const auto values = args.empty() ? std::vector<double>{0.3} : detail::parse_number_list(args);
    if (values.size() != 1) throw UnknownInstance("avoided-crossing takes one argument");
    return avoided_crossing(values.front(), spec.m);
  }
  if (head == "constant-diag") return constant_diag(detail::parse_number_list(args), spec.m);
  if (head == "random" && args.empty()) return random_path(spec);
  throw UnknownInstance("unknown instance '" + name + "'");
}

}  // namespace fsa
