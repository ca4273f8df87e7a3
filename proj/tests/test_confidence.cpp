#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "gradsat/confidence.hpp"
#include "oracles.hpp"

using namespace gradsat;

TEST(ComputeK, Rule) {
  EXPECT_EQ(compute_k(1'000'000), 100u);
  EXPECT_EQ(compute_k(10'000), 20u);
  EXPECT_EQ(compute_k(200'001), 21u);
  EXPECT_EQ(compute_k(150), 20u);
  EXPECT_EQ(compute_k(7), 7u);
  EXPECT_EQ(compute_k(0), 0u);
}

namespace {

GradSnapshot hand_snapshot() {
  // 3 variables, 2 columns.
  GradSnapshot s;
  s.variable_grad.resize(3, 2);
  s.variable_grad << 0.5, -0.1,
                     -0.2, 0.3,
                     0.2, 0.0;
  s.theta_grad = -s.variable_grad;
  s.theta_grad(0, 0) = 0.0;
  s.assignment.resize(6, 2);
  s.assignment << 1, 0,
                  0, 1,
                  0, 1,
                  1, 0,
                  1, 1,
                  0, 0;
  s.sat_counts = {4, 5};
  s.num_clauses = 5;
  return s;
}

}  // namespace

TEST(Extract, OrdersColumnsAndVariables) {
  const GradSnapshot s = hand_snapshot();
  const auto partials = extract(s, s.assignment, 5);
  ASSERT_EQ(partials.size(), 2u);  // only two columns exist
  // Column 1 has more satisfied clauses.
  EXPECT_EQ(partials[0].source_column, 1u);
  EXPECT_EQ(partials[0].satisfied_count, 5u);
  ASSERT_EQ(partials[0].literals.size(), 3u);  // k capped at V
  // |g| in column 1: x1 0.1, x2 0.3, x3 0.0
  EXPECT_EQ(partials[0].literals[0], Literal(2, true));
  EXPECT_EQ(partials[0].literals[1], Literal(0, false));
  EXPECT_EQ(partials[0].literals[2], Literal(1, true));
  EXPECT_DOUBLE_EQ(partials[0].confidences[0], 0.0);
  // Column 0: |g| = 0.5, 0.2, 0.2; the tie goes to the lower variable.
  EXPECT_EQ(partials[1].literals[0], Literal(1, false));
  EXPECT_EQ(partials[1].literals[1], Literal(2, true));
  EXPECT_EQ(partials[1].literals[2], Literal(0, true));
}

TEST(Extract, TruncatesAndBreaksColumnTies) {
  GradSnapshot s = hand_snapshot();
  s.sat_counts = {5, 5};
  const auto partials = extract(s, s.assignment, 1);
  ASSERT_EQ(partials.size(), 1u);
  EXPECT_EQ(partials[0].source_column, 0u);
  EXPECT_TRUE(extract(s, s.assignment, 0).empty());
}

TEST(Extract, ThetaSignal) {
  const GradSnapshot s = hand_snapshot();
  const auto partials = extract(s, s.assignment, 2, ConfidenceSignal::ThetaGradient);
  EXPECT_EQ(partials[1].source_column, 0u);
  EXPECT_EQ(partials[1].literals[0], Literal(0, true));
}

TEST(Extract, ShapeChecks) {
  GradSnapshot s = hand_snapshot();
  EXPECT_THROW(extract(s, BinaryMatrix::Zero(4, 2), 1), std::invalid_argument);
  s.sat_counts.clear();
  EXPECT_THROW(extract(s, s.assignment, 1), std::invalid_argument);
}

TEST(Extract, LiteralsFollowColumnValues) {
  std::mt19937_64 rng(1);
  const CnfFormula f = oracle::random_formula(rng, 40, 170, 3);
  OptimizerConfig cfg;
  cfg.candidates = 12;
  cfg.max_iterations = 100;
  const GradSnapshot snap = run_gradient_phase(ProblemMatrix(f), cfg);
  const auto partials = extract(snap, snap.assignment, 12);
  ASSERT_EQ(partials.size(), 12u);
  for (std::size_t i = 1; i < partials.size(); ++i)
    EXPECT_GE(partials[i - 1].satisfied_count, partials[i].satisfied_count);
  for (const auto& p : partials) {
    ASSERT_EQ(p.literals.size(), 20u);
    const Model m = decode_model(snap.assignment, p.source_column);
    for (std::size_t j = 0; j < p.literals.size(); ++j) {
      EXPECT_TRUE(m.satisfies(p.literals[j]));
      EXPECT_DOUBLE_EQ(p.confidences[j],
                       std::abs(snap.variable_grad(p.literals[j].var(), p.source_column)));
      if (j > 0) {
        EXPECT_LE(p.confidences[j - 1], p.confidences[j]);
      }
    }
  }
}

TEST(Extract, Json) {
  const GradSnapshot s = hand_snapshot();
  const auto j = to_json(extract(s, s.assignment, 1)[0]);
  EXPECT_EQ(j["column"], 1);
  EXPECT_EQ(j["sat_count"], 5);
  EXPECT_EQ(j["vars"][0][0], 3);
  EXPECT_EQ(j["vars"][0][1], true);
  EXPECT_EQ(j["vars"][1][0], 1);
  EXPECT_EQ(j["vars"][1][1], false);
}
