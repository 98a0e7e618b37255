#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lexsum/planner.hpp"
#include "support/oracles.hpp"

using namespace lexsum;

namespace {

void expect_ratios(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << i;
}

}  // namespace

TEST(Fixed, WorkedExample) {
  const auto p = plan_fixed(10240, 1024, 0.4);
  EXPECT_EQ(p.n_steps, 3);
  expect_ratios(p.step_ratios, {0.4, 0.4, 0.4});
}

TEST(Fixed, NoExtractionWhenDocumentFits) {
  EXPECT_EQ(plan_fixed(1024, 1024, 0.4).n_steps, 0);
  EXPECT_TRUE(plan_fixed(1024, 1024, 0.4).step_ratios.empty());
}

TEST(Fixed, ExactBoundaryNeedsOneStep) {
  EXPECT_EQ(plan_fixed(2560, 1024, 0.4).n_steps, 1);
}

TEST(Fixed, RejectsBadInputs) {
  EXPECT_THROW(plan_fixed(100, 10, 0.0), Error);
  EXPECT_THROW(plan_fixed(100, 10, 1.0), Error);
  EXPECT_THROW(plan_fixed(100, 0, 0.5), Error);
  EXPECT_THROW(plan_fixed(-1, 10, 0.5), Error);
}

TEST(Dependent, Examples) {
  const auto p = plan_dependent(5000, 1024);
  EXPECT_EQ(p.n_steps, 1);
  expect_ratios(p.step_ratios, {0.2048});
  EXPECT_EQ(plan_dependent(1000, 1024).n_steps, 0);
  EXPECT_EQ(plan_dependent(16384, 16384).n_steps, 0);
}

TEST(Hybrid, WorkedExample) {
  const auto p = plan_hybrid(10240, 1024, 0.4);
  EXPECT_EQ(p.n_steps, 3);
  expect_ratios(p.step_ratios, {0.4, 0.4, 0.625});
  EXPECT_FALSE(p.degenerated_to_dependent);
}

TEST(Hybrid, SingleStepDegeneratesToDependent) {
  const auto p = plan_hybrid(2000, 1024, 0.4);
  EXPECT_EQ(p.n_steps, 1);
  expect_ratios(p.step_ratios, {0.512});
  EXPECT_TRUE(p.degenerated_to_dependent);
  EXPECT_EQ(plan_hybrid(1024, 2048, 0.4).n_steps, 0);
}

TEST(Cascade, DirectMultiplication) {
  const auto l = simulate_cascade(10240, {0.4, 0.4, 0.4});
  ASSERT_EQ(l.size(), 3u);
  EXPECT_DOUBLE_EQ(l[0], 4096);
  EXPECT_DOUBLE_EQ(l[1], 10240 * 0.4 * 0.4);
  EXPECT_DOUBLE_EQ(l[2], 10240 * 0.4 * 0.4 * 0.4);
  EXPECT_NEAR(l[2], 655.36, 1e-9);
  EXPECT_TRUE(simulate_cascade(5, {}).empty());
  EXPECT_EQ(simulate_cascade(100, {1.0}), std::vector<double>{100});
}

TEST(Plan, JsonRoundTrip) {
  for (auto kind : {RatioKind::fixed, RatioKind::dependent, RatioKind::hybrid}) {
    const auto p = make_plan({kind, 0.3}, 77777, 1024);
    const auto j = plan_to_json(p);
    EXPECT_EQ(j.at("K"), 1024);
    EXPECT_EQ(j.at("doc_tokens"), 77777);
    EXPECT_EQ(j.at("predicted_lengths").size(), static_cast<std::size_t>(p.n_steps));
    EXPECT_EQ(plan_from_json(j), p);
  }
}

TEST(Plan, KindNames) {
  EXPECT_EQ(parse_ratio_kind("hybrid"), RatioKind::hybrid);
  EXPECT_FALSE(parse_ratio_kind("adaptive").has_value());
  EXPECT_EQ(to_string(RatioKind::dependent), "dependent");
}

// ----------------------------------------------------------------- properties

TEST(PlannerProperty, FixedMatchesCascadeOracleOnWideGrid) {
  // A sparser version of the acceptance grid that extends to 10^6.
  for (std::int64_t k : {512, 1024, 4096, 8192, 16384})
    for (int i = 1; i <= 9; ++i) {
      const double r = i / 10.0;
      for (std::int64_t d = k + 1; d <= 1'000'000; d += 997) {
        const auto p = plan_fixed(d, k, r);
        ASSERT_EQ(p.n_steps, oracle::cascade_min_steps(double(d), double(k), r))
            << d << " " << k << " " << r;
      }
    }
}

TEST(PlannerProperty, Monotonicity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t k = 100 + static_cast<std::int64_t>(rng() % 20000);
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 1'000'000);
    const double r = 0.05 + (rng() % 90) / 100.0;
    const int n = plan_fixed(d, k, r).n_steps;
    EXPECT_LE(plan_fixed(d, k + 1 + static_cast<std::int64_t>(rng() % 1000), r).n_steps, n);
    // A larger ratio keeps more per step, so it never needs fewer steps.
    EXPECT_GE(plan_fixed(d, k, std::min(0.99, r + 0.01)).n_steps, n);
    EXPECT_GE(plan_fixed(d + 1 + static_cast<std::int64_t>(rng() % 1000), k, r).n_steps, n);
  }
}

TEST(PlannerProperty, DependentAndHybridShapes) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 20000);
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 2'000'000);
    const double r = 0.1 * (1 + static_cast<int>(rng() % 9));
    const auto dep = plan_dependent(d, k);
    EXPECT_LE(dep.n_steps, 1);
    if (d > k) {
      EXPECT_NEAR(simulate_cascade(double(d), dep.step_ratios).back(), double(k), 1e-9 * k);
    }
    const auto hyb = plan_hybrid(d, k, r);
    EXPECT_EQ(hyb.n_steps, plan_fixed(d, k, r).n_steps);
    if (hyb.n_steps > 0) {
      const double last = simulate_cascade(double(d), hyb.step_ratios).back();
      EXPECT_NEAR(last, double(k), 1e-9 * k);
      for (double x : hyb.step_ratios) {
        EXPECT_GT(x, 0.0);
        EXPECT_LE(x, 1.0);
      }
    }
  }
}
