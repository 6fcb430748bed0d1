#include "fsa/approximant.hpp"
#include "fsa/instances.hpp"
#include "fsa/report_io.hpp"
#include "fsa/verify.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

namespace fsa {
namespace {

Matrix diag2(double a, double b) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = a;
  h(1, 1) = b;
  return h;
}

bool has_violation(const VerifyResult& r, const std::string& needle) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

RandomPathSpec smooth_spec(std::size_t n, std::uint64_t seed, double wiggle) {
  RandomPathSpec spec;
  spec.n = n;
  spec.m = 64;
  spec.q = 1;
  spec.seed = seed;
  spec.wiggle = wiggle;
  return spec;
}

TEST(Partition, Examples) {
  const auto t = make_partition(0.5);
  EXPECT_EQ(t.size(), 10u);
  EXPECT_EQ(t.front(), -1.0);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_NEAR(partition_mesh(t.size()), 2.0 / 9.0, 1e-16);
  EXPECT_EQ(make_partition(2.0).size(), 4u);
  EXPECT_THROW(make_partition(0.0), PreconditionError);
  EXPECT_THROW(make_partition(-1.0), PreconditionError);
}

// Minimality: one fewer point would violate the mesh bound.
TEST(Partition, MinimalMesh) {
  for (double eps = 0.01; eps < 2.0; eps += 0.0137) {
    const std::size_t n = make_partition(eps).size();
    EXPECT_LT(2.0 / static_cast<double>(n - 1), eps / 2.0) << eps;
    if (n > 2) EXPECT_GE(2.0 / static_cast<double>(n - 2), eps / 2.0) << eps;
  }
}

TEST(BudgetSchedule, Examples) {
  EXPECT_DOUBLE_EQ(budget_schedule(0.4, 1, {}), 0.1);
  EXPECT_DOUBLE_EQ(budget_schedule(0.4, 2, {0.03}), 0.015);
  EXPECT_DOUBLE_EQ(budget_schedule(0.4, 3, {0.03, 0.04}), 0.015);
  EXPECT_DOUBLE_EQ(budget_schedule(0.4, 3, {0.3, 0.4}), 0.025);
  EXPECT_THROW(budget_schedule(0.4, 0, {}), PreconditionError);
}

TEST(Pipeline, ConstantDiagonalSucceeds) {
  const MatPath x = constant_path(diag2(-0.4, 0.3), 16);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  ASSERT_TRUE(std::holds_alternative<ApproximantReport>(outcome));
  const auto& r = std::get<ApproximantReport>(outcome);
  EXPECT_LE(r.spectrumSize, 2u);
  for (double v : r.spectrumValues) {
    EXPECT_TRUE(std::any_of(r.partition.begin(), r.partition.end(), [&](double t) { return std::abs(t - v) <= 1e-12; }));
  }
  for (const auto& h : r.b->nodes()) {
    EXPECT_LE(testing::max_abs_entry(h - Matrix(h.diagonal().asDiagonal())), 1e-15);
  }
  EXPECT_LT(r.chain.xToB, 0.5);
  EXPECT_LT(testing::dense_sup_norm(subtract(x, *r.b), 10), 0.5);
}

TEST(Pipeline, ScalarLineObstructedAtFirstInteriorLevel) {
  const MatPath x = scalar_line(64);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  ASSERT_TRUE(std::holds_alternative<ObstructionReport>(outcome));
  const auto& r = std::get<ObstructionReport>(outcome);
  EXPECT_EQ(r.levelIndex, 1u);
  const auto& c = r.cert;
  EXPECT_DOUBLE_EQ(c.level, r.partition[1]);
  EXPECT_GT(c.level, -0.99 + c.budget);
  EXPECT_LT(c.level, 0.99 - c.budget);
  EXPECT_LE(c.lambdaMinus, c.level - c.budget);
  EXPECT_GE(c.lambdaPlus, c.level + c.budget);
  const MatPath& path = obstructed_path(x, r.levels);
  EXPECT_EQ(path.node(c.nodeMinus)(0, 0).real(), c.lambdaMinus);
  EXPECT_EQ(path.node(c.nodePlus)(0, 0).real(), c.lambdaPlus);
}

// With gamma = 0.3 the lower band of 0.9 [[2s-1, g], [g, 1-2s]] spans
// [-0.9 sqrt(1.09), -0.27], which contains t_2 = -7/9 well inside. After
// level t_1 the budget is at most eps/8, so the curve cannot be moved off
// t_2 and the run ends in an obstruction.
TEST(Pipeline, AvoidedCrossingIsObstructedAtSecondLevel) {
  const MatPath x = avoided_crossing(0.3, 64);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  ASSERT_TRUE(std::holds_alternative<ObstructionReport>(outcome));
  const auto& r = std::get<ObstructionReport>(outcome);
  EXPECT_EQ(r.levelIndex, 1u);
  EXPECT_NEAR(r.cert.level, -7.0 / 9.0, 1e-15);
  EXPECT_LE(r.cert.budget, 0.5 / 8.0);
  EXPECT_EQ(r.cert.curve, 0u);

  // Oracle: node eigenvalues of the obstructed path from Eigen's solver.
  const MatPath& path = obstructed_path(x, r.levels);
  const double low = testing::oracle_eigenvalues(path.node(r.cert.nodeMinus))(0);
  const double high = testing::oracle_eigenvalues(path.node(r.cert.nodePlus))(0);
  EXPECT_LE(low, r.cert.level - r.cert.budget);
  EXPECT_GE(high, r.cert.level + r.cert.budget);
  EXPECT_LE(r.priorDistance, 0.125);
}

TEST(Pipeline, NormTooLarge) {
  const MatPath x = constant_path(diag2(1.2, 0.0), 4);
  EXPECT_THROW(finite_spectrum_approximate(x, 0.5), NormTooLarge);
  EXPECT_THROW(finite_spectrum_approximate(constant_path(diag2(1.0, 0.0), 4), 0.5), NormTooLarge);
}

// Error chain, finite spectrum and resolution identities on successes.
TEST(Pipeline, ErrorChainOnConstantEnsemble) {
  std::size_t successes = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    for (double eps : {0.5, 0.25}) {
      RandomPathSpec spec = smooth_spec(2 + seed % 3, seed, 0.0);
      spec.m = 16;
      const MatPath x = random_path(spec);
      const auto outcome = finite_spectrum_approximate(x, eps);
      const auto* r = std::get_if<ApproximantReport>(&outcome);
      if (!r) continue;
      ++successes;
      EXPECT_LT(r->chain.sumBudgets, eps / 2);
      EXPECT_LT(r->chain.yToBBound, eps / 2);
      EXPECT_LE(r->chain.yToBMeasured, r->chain.yToBBound);
      EXPECT_LT(r->chain.xToB, eps);
      EXPECT_LT(testing::dense_sup_norm(subtract(x, *r->b), 10), eps);
      EXPECT_LE(r->spectrumSize, r->partition.size());
      EXPECT_LE(r->resolution.worst(), 1e-8);
    }
  }
  EXPECT_GE(successes, 12u);
}

// After removing level t_i, the gaps certified at earlier levels survive with
// at least half their radius.
TEST(Pipeline, LevelPreservation) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MatPath x = random_path(smooth_spec(2 + seed % 2, 500 + seed, 0.01));
    const auto outcome = finite_spectrum_approximate(x, 0.5);
    const auto* r = std::get_if<ApproximantReport>(&outcome);
    if (!r) continue;
    const MatPath* current = &x;
    std::vector<double> radii;
    for (const auto& rec : r->levels) {
      if (rec.path) current = &*rec.path;
      const EigCurves c = eig_curves(*current);
      for (std::size_t k = 0; k < radii.size(); ++k) {
        EXPECT_GE(gap_radius(c, r->partition[k]), 0.5 * radii[k]) << "seed " << seed << " level " << k;
      }
      radii.push_back(rec.gapAtRemoval);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(Pipeline, MonotoneRefinement) {
  std::size_t pairs = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    RandomPathSpec spec = smooth_spec(2, 900 + seed, 0.0);
    spec.m = 8;
    const MatPath x = random_path(spec);
    const auto coarse = finite_spectrum_approximate(x, 0.5);
    const auto fine = finite_spectrum_approximate(x, 0.25);
    const auto* a = std::get_if<ApproximantReport>(&coarse);
    const auto* b = std::get_if<ApproximantReport>(&fine);
    if (!a || !b) continue;
    ++pairs;
    EXPECT_LE(b->chain.totalBound, a->chain.totalBound) << "seed " << seed;
  }
  EXPECT_GT(pairs, 5u);
}

// An obstruction at (level, budget) excludes a successful removal there, and
// a successful run never passes an obstructed level.
TEST(Pipeline, ObstructionExclusivity) {
  std::size_t obstructions = 0;
  std::size_t successes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MatPath x = random_path(smooth_spec(1 + seed % 3, 700 + seed, seed % 2 == 0 ? 1.0 : 0.01));
    const auto outcome = finite_spectrum_approximate(x, 0.5);
    if (const auto* ob = std::get_if<ObstructionReport>(&outcome)) {
      ++obstructions;
      const MatPath& path = obstructed_path(x, ob->levels);
      const auto again = remove_level(path, ob->cert.level, ob->cert.budget);
      EXPECT_FALSE(std::holds_alternative<LevelRemoval>(again));
      EXPECT_TRUE(witness_holds(eig_curves(path), ob->cert));
    }
    if (const auto* r = std::get_if<ApproximantReport>(&outcome)) {
      ++successes;
      const MatPath* current = &x;
      for (const auto& rec : r->levels) {
        for (const auto& f : check_removability(eig_curves(*current), rec.level, rec.budget)) {
          EXPECT_NE(f.status, Removability::Obstructed);
        }
        if (rec.path) current = &*rec.path;
      }
    }
  }
  EXPECT_GT(obstructions, 0u);
  EXPECT_GT(successes, 0u);
}

TEST(Verify, EmittedReportsPass) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MatPath x = random_path(smooth_spec(2 + seed % 2, 300 + seed, seed < 3 ? 0.0 : 1.0));
    const auto outcome = finite_spectrum_approximate(x, 0.5);
    json doc;
    if (const auto* r = std::get_if<ApproximantReport>(&outcome)) doc = to_json(*r);
    if (const auto* o = std::get_if<ObstructionReport>(&outcome)) doc = to_json(*o, obstructed_path(x, o->levels));
    if (doc.is_null()) continue;
    const auto result = verify_report(x, json::parse(doc.dump()));
    EXPECT_TRUE(result.passed()) << "seed " << seed << ": " << (result.violations.empty() ? "" : result.violations[0]);
  }
}

TEST(Verify, ZeroApproximantFailsErrorBound) {
  const MatPath x = constant_path(diag2(-0.9, 0.6), 8);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  ASSERT_TRUE(std::holds_alternative<ApproximantReport>(outcome));
  json doc = to_json(std::get<ApproximantReport>(outcome));
  doc["b"] = element_to_json(constant_path(Matrix::Zero(2, 2), 8));
  const auto result = verify_report(x, doc);
  EXPECT_TRUE(has_violation(result, "errorChain.xToB < epsilon"));
}

TEST(Verify, ForgedGapRadiusFails) {
  const MatPath x = constant_path(diag2(-0.4, 0.3), 8);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  ASSERT_TRUE(std::holds_alternative<ApproximantReport>(outcome));
  json doc = to_json(std::get<ApproximantReport>(outcome));
  doc["finalGaps"][3]["radius"] = 10.0 * doc["finalGaps"][3]["radius"].get<double>();
  const auto result = verify_report(x, doc);
  EXPECT_TRUE(has_violation(result, "finalGaps[3].radius"));
}

TEST(Verify, WrongElementIsDigestMismatch) {
  const MatPath x = constant_path(diag2(-0.4, 0.3), 8);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  const json doc = to_json(std::get<ApproximantReport>(outcome));
  EXPECT_THROW(verify_report(constant_path(diag2(-0.4, 0.31), 8), doc), DigestMismatch);
}

TEST(Verify, ElidedMatricesAreNotVerifiable) {
  const MatPath x = constant_path(diag2(-0.4, 0.3), 8);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  ReportOptions opts;
  opts.includeMatrices = false;
  const auto result = verify_report(x, to_json(std::get<ApproximantReport>(outcome), opts));
  EXPECT_FALSE(result.passed());
  EXPECT_TRUE(has_violation(result, "elided"));
}

TEST(Verify, ForgedObstructionWitnessFails) {
  const MatPath x = scalar_line(64);
  const auto outcome = finite_spectrum_approximate(x, 0.5);
  const auto& o = std::get<ObstructionReport>(outcome);
  json doc = to_json(o, obstructed_path(x, o.levels));
  ASSERT_TRUE(verify_report(x, doc).passed());
  doc["obstructed"]["nodePlus"] = doc["obstructed"]["nodeMinus"];
  const auto result = verify_report(x, doc);
  EXPECT_TRUE(has_violation(result, "obstructed: lambda(sPlus) >= level + budget"));
}

TEST(Pipeline, DeterministicReports) {
  const MatPath x = random_path(smooth_spec(3, 42, 0.0));
  const auto a = finite_spectrum_approximate(x, 0.25);
  const auto b = finite_spectrum_approximate(x, 0.25);
  ASSERT_EQ(a.index(), b.index());
  if (const auto* r = std::get_if<ApproximantReport>(&a)) {
    EXPECT_EQ(to_json(*r).dump(), to_json(std::get<ApproximantReport>(b)).dump());
  }
}

}  // namespace
}  // namespace fsa
