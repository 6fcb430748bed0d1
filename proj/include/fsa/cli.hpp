#pragma once

// `fsa gen | approx | verify | bands`.
//
// Exit codes: 0 ok, 1 other (I/O, parse, usage), 2 precondition,
// 3 obstruction, 4 certification failed, 5 verification failed,
// 6 digest mismatch.

#include "fsa/approximant.hpp"
#include "fsa/instances.hpp"
#include "fsa/parallel.hpp"
#include "fsa/report_io.hpp"
#include "fsa/serialization.hpp"
#include "fsa/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fsa::cli {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kPrecondition = 2,
  kObstruction = 3,
  kCertificationFailed = 4,
  kVerifyFailed = 5,
  kDigestMismatch = 6,
};

struct RunConfig {
  std::string instance;
  std::string elementFile;
  std::string reportFile;
  std::string out;
  std::size_t n = 2;
  std::size_t m = 64;
  std::size_t q = 2;
  std::uint64_t seed = 0;
  double wiggle = 1.0;
  double eps = 0.5;
  bool noMatrices = false;
  double tolEig = EigSettings{}.relTol;
  double mergeTol = kDefaultMergeTol;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

namespace detail {

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_text_atomic(cfg.out, text);
  }
}

inline MatPath load_element(const std::string& file, std::ostream& err) {
  LoadedElement loaded = element_from_json(read_json_file(file));
  if (loaded.asymmetry > kHermitianWarnTol) {
    err << "warning: " << file << " is not Hermitian (relative defect " << loaded.asymmetry
        << "); nodes were symmetrized\n";
  }
  return std::move(loaded.path);
}

}  // namespace detail

inline int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  RandomPathSpec spec{cfg.n, cfg.m, cfg.q, cfg.seed, cfg.wiggle};
  try {
    const MatPath x = make_instance(cfg.instance, spec);
    detail::emit(cfg, element_to_json(x).dump() + "\n", out);
  } catch (const PreconditionError& e) {
    err << "gen: " << e.what() << "\n";
    return kPrecondition;
  }
  return kOk;
}

inline int cmd_approx(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.eps > 0.0 && cfg.eps < 2.0)) {
    err << "approx: --eps must lie in (0, 2)\n";
    return kPrecondition;
  }
  const MatPath x = detail::load_element(cfg.elementFile, err);
  PipelineConfig pipeline;
  pipeline.eig.relTol = cfg.tolEig;
  pipeline.mergeTol = cfg.mergeTol;
  ReportOptions opts{!cfg.noMatrices, utc_timestamp(), cfg.mergeTol};

  ApproxOutcome outcome;
  try {
    outcome = finite_spectrum_approximate(x, cfg.eps, pipeline);
  } catch (const NormTooLarge& e) {
    err << "approx: " << e.what() << "\n";
    return kPrecondition;
  }

  if (const auto* report = std::get_if<ApproximantReport>(&outcome)) {
    detail::emit(cfg, to_json(*report, opts).dump(1) + "\n", out);
    err << "approx: success, ||x - b|| <= " << report->chain.xToB << " < " << cfg.eps << ", "
        << report->spectrumSize << " distinct values\n";
    return kOk;
  }
  if (const auto* obstruction = std::get_if<ObstructionReport>(&outcome)) {
    const MatPath& path = obstructed_path(x, obstruction->levels);
    detail::emit(cfg, to_json(*obstruction, path, opts).dump(1) + "\n", out);
    const auto& c = obstruction->cert;
    err << "approx: obstruction at level t=" << c.level << " (budget " << c.budget << "): curve " << c.curve + 1
        << " has lambda(" << c.sMinus << ")=" << c.lambdaMinus << " and lambda(" << c.sPlus
        << ")=" << c.lambdaPlus << "\n";
    return kObstruction;
  }
  const auto& failure = std::get<CertificationFailure>(outcome);
  detail::emit(cfg, to_json(failure, opts).dump(1) + "\n", out);
  err << "approx: certification failed: " << failure.reason << "\n";
  return kCertificationFailed;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MatPath x = detail::load_element(cfg.elementFile, err);
  const json report = read_json_file(cfg.reportFile);
  EigSettings settings;
  settings.relTol = cfg.tolEig;
  VerifyResult result;
  try {
    result = verify_report(x, report, settings);
  } catch (const DigestMismatch& e) {
    err << "verify: " << e.what() << "\n";
    return kDigestMismatch;
  }
  if (result.passed()) {
    out << "verify: pass\n";
    return kOk;
  }
  for (const auto& v : result.violations) err << "verify: violated " << v << "\n";
  return kVerifyFailed;
}

/// CSV "s,lambda_1,...,lambda_n", one row per node, 17 significant digits.
inline std::string bands_csv(const MatPath& x, const EigSettings& settings = {}) {
  const EigCurves curves = eig_curves(x, settings);
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "s";
  for (std::size_t k = 0; k < curves.dim(); ++k) csv << ",lambda_" << k + 1;
  csv << "\n";
  for (std::size_t j = 0; j < curves.node_count(); ++j) {
    csv << x.grid(j);
    for (std::size_t k = 0; k < curves.dim(); ++k) csv << "," << curves.value(j, k);
    csv << "\n";
  }
  return csv.str();
}

inline int cmd_bands(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MatPath x = detail::load_element(cfg.elementFile, err);
  EigSettings settings;
  settings.relTol = cfg.tolEig;
  detail::emit(cfg, bands_csv(x, settings), out);
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Certified finite-spectrum approximation of self-adjoint matrix paths", "fsa"};
  app.require_subcommand(1);
  RunConfig cfg;
  int threads = -1;
  app.add_option("--threads", threads, "cap on worker threads (0 = auto; default FSA_THREADS)");

  auto* gen = app.add_subcommand("gen", "write an element JSON file");
  gen->add_option("instance", cfg.instance,
                  "scalar-line | avoided-crossing(g) | constant-diag(v1,...) | random")
      ->required();
  gen->add_option("--n", cfg.n, "matrix dimension (random)");
  gen->add_option("--m", cfg.m, "grid segments")->check(CLI::PositiveNumber);
  gen->add_option("--q", cfg.q, "harmonics (random)");
  gen->add_option("--seed", cfg.seed, "seed (random)");
  gen->add_option("--wiggle", cfg.wiggle, "scale of the s-dependent harmonics (random)");
  gen->add_option("--out", cfg.out, "output file (default stdout)");

  auto* approx = app.add_subcommand("approx", "run the finite-spectrum approximation");
  approx->add_option("element", cfg.elementFile, "element JSON file")->required();
  approx->add_option("--eps", cfg.eps, "tolerance in (0, 2)")->required();
  approx->add_option("--out", cfg.out, "report file (default stdout)");
  approx->add_flag("--no-matrices", cfg.noMatrices, "omit matrices from the report");
  approx->add_option("--tol-eig", cfg.tolEig, "eigensolver relative off-diagonal tolerance");
  approx->add_option("--merge-tol", cfg.mergeTol, "band merge tolerance");

  auto* verify = app.add_subcommand("verify", "independently re-check a report");
  verify->add_option("element", cfg.elementFile, "element JSON file")->required();
  verify->add_option("report", cfg.reportFile, "report JSON file")->required();
  verify->add_option("--tol-eig", cfg.tolEig, "eigensolver relative off-diagonal tolerance");

  auto* bands = app.add_subcommand("bands", "export eigenvalue curves as CSV");
  bands->add_option("element", cfg.elementFile, "element JSON file")->required();
  bands->add_option("--out", cfg.out, "output file (default stdout)");
  bands->add_option("--tol-eig", cfg.tolEig, "eigensolver relative off-diagonal tolerance");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kOther;
  }
  if (threads >= 0) set_thread_cap(threads);

  try {
    if (gen->parsed()) return cmd_gen(cfg, out, err);
    if (approx->parsed()) return cmd_approx(cfg, out, err);
    if (verify->parsed()) return cmd_verify(cfg, out, err);
    if (bands->parsed()) return cmd_bands(cfg, out, err);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}

}  // namespace fsa::cli
