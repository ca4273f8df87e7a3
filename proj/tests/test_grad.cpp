#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "gradsat/grad_engine.hpp"
#include "oracles.hpp"

using namespace gradsat;

namespace {

// L = -sum_i smooth_min(column i) evaluated with the high-precision oracle.
double oracle_loss(const RealMatrix& r, double tau) {
  oracle::HighPrecision total = 0;
  for (Eigen::Index i = 0; i < r.cols(); ++i) {
    std::vector<double> col(r.rows());
    for (Eigen::Index c = 0; c < r.rows(); ++c) col[c] = r(c, i);
    total -= oracle::smooth_min_hp(col, tau);
  }
  return static_cast<double>(total);
}

RealMatrix random_real(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

}  // namespace

TEST(SmoothMin, MatchesHighPrecision) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  for (double tau : {0.1, 0.5, 1.0, 5.0, 20.0}) {
    for (int t = 0; t < 50; ++t) {
      std::vector<double> r(1 + t % 30);
      for (double& x : r) x = value(rng);
      const double expected = static_cast<double>(oracle::smooth_min_hp(r, tau));
      EXPECT_NEAR(smooth_min(r, tau), expected, 1e-12 * std::abs(expected));
    }
  }
}

TEST(SmoothMin, BoundedByMinAndMean) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> r(1 + t % 20);
    double sum = 0.0;
    for (double& x : r) sum += (x = value(rng));
    const double s = smooth_min(r, 0.5 + t % 7);
    const double lo = *std::min_element(r.begin(), r.end());
    EXPECT_GE(s, lo - 1e-12);
    EXPECT_LE(s, sum / static_cast<double>(r.size()) + 1e-12);
  }
}

TEST(SmoothMin, NoOverflowAtLargeTemperature) {
  const std::vector<double> r{1000.0, 3.0, 999.0, 500.0};
  const double s = smooth_min(r, 1e4);
  EXPECT_TRUE(std::isfinite(s));
  EXPECT_EQ(s, 3.0);
  RealMatrix m(4, 1);
  m << 1000.0, 3.0, 999.0, 500.0;
  RealMatrix g;
  EXPECT_EQ(loss_and_gradient(m, 1e4, g), -3.0);
  EXPECT_TRUE(g.allFinite());
}

TEST(SmoothMin, ConstantColumn) {
  EXPECT_DOUBLE_EQ(smooth_min(std::vector<double>{2.0, 2.0, 2.0}, 3.0), 2.0);
  EXPECT_THROW(smooth_min(std::span<const double>{}, 1.0), std::invalid_argument);
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> count(0, 4);
  for (double tau : {0.5, 1.0, 5.0}) {
    for (int t = 0; t < 30; ++t) {
      const Eigen::Index rows = 1 + t % 12, cols = 1 + t % 4;
      RealMatrix r(rows, cols);
      for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = count(rng);
      RealMatrix grad;
      const double l = loss_and_gradient(r, tau, grad);
      EXPECT_NEAR(l, oracle_loss(r, tau), 1e-12 * std::max(1.0, std::abs(l)));
      const auto fd = oracle::central_difference(
          [&](const std::vector<double>& x) { return oracle_loss(oracle::unflatten(x, rows, cols), tau); },
          oracle::flatten(r), 1e-5);
      EXPECT_LT(oracle::relative_error(oracle::flatten(grad), fd), 1e-4);
    }
  }
}

TEST(Loss, IntegerPathMatchesRealPath) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> count(0, 7);
  for (double tau : {0.5, 1.0, 5.0, 50.0}) {
    for (int t = 0; t < 40; ++t) {
      CountMatrix r(1 + t % 25, 1 + t % 9);
      for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = count(rng);
      RealMatrix g_int, g_real;
      const double l_int = loss_and_gradient(r, tau, g_int);
      const double l_real = loss_and_gradient(RealMatrix(r.cast<double>()), tau, g_real);
      EXPECT_NEAR(l_int, l_real, 1e-12 * std::max(1.0, std::abs(l_real)));
      EXPECT_LT((g_int - g_real).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Loss, EmptyRows) {
  RealMatrix g;
  EXPECT_EQ(loss_and_gradient(RealMatrix(0, 3), 1.0, g), 0.0);
  EXPECT_EQ(g.rows(), 0);
}

TEST(Backward, AssignmentGradientMatchesFiniteDifferences) {
  // phi(y) = L(P [y; 1 - y]) for real y; its gradient is the folded P^T G.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::uint32_t n = 1 + t % 8;
    const CnfFormula f = oracle::random_formula(rng, n, 1 + t % 12, 3);
    const ProblemMatrix p(f);
    const RealMatrix dense = p.to_dense().cast<double>();
    const Eigen::Index cols = 1 + t % 4;
    const double tau = t % 2 ? 1.0 : 5.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RealMatrix y(n, cols);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = unit(rng);

    auto lift = [&](const RealMatrix& yy) {
      RealMatrix a(2 * n, cols);
      for (Eigen::Index v = 0; v < n; ++v) {
        a.row(2 * v) = yy.row(v);
        a.row(2 * v + 1) = (1.0 - yy.row(v).array()).matrix();
      }
      return a;
    };
    RealMatrix grad_r;
    loss_and_gradient(RealMatrix(dense * lift(y)), tau, grad_r);
    const RealMatrix analytic = fold_literal_gradient(spmm_transpose(p, grad_r));
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& x) {
          return oracle_loss(RealMatrix(dense * lift(oracle::unflatten(x, n, cols))), tau);
        },
        oracle::flatten(y), 1e-5);
    EXPECT_LT(oracle::relative_error(oracle::flatten(analytic), fd), 1e-4);
  }
}

TEST(Normalize, RowMeansBecomeOne) {
  std::mt19937_64 rng(6);
  const RealMatrix theta = random_real(rng, 10, 16);
  const RealMatrix z = normalize_rows(theta);
  for (Eigen::Index r = 0; r < z.rows(); ++r) EXPECT_NEAR(z.row(r).mean(), 1.0, 1e-9);
}

TEST(Normalize, NegativeMeanFlipsSigns) {
  RealMatrix theta(1, 2);
  theta << -3.0, 1.0;  // mean -1
  const RealMatrix z = normalize_rows(theta);
  EXPECT_DOUBLE_EQ(z(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(z(0, 1), -1.0);
}

TEST(Normalize, GuardAtZeroMean) {
  RealMatrix theta(1, 2);
  theta << 1.0, -1.0;
  const RealMatrix z = normalize_rows(theta, 1e-8);
  EXPECT_DOUBLE_EQ(z(0, 0), 1e8);
  EXPECT_DOUBLE_EQ(z(0, 1), -1e8);
  RealMatrix g(1, 2);
  g << 2.0, 4.0;
  const RealMatrix back = normalize_rows_backward(theta, g, 1e-8);
  EXPECT_DOUBLE_EQ(back(0, 0), 2e8);
  EXPECT_DOUBLE_EQ(back(0, 1), 4e8);
}

TEST(Normalize, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index rows = 1 + t % 6, cols = 2 + t % 5;
    RealMatrix theta = random_real(rng, rows, cols);
    theta.array() += 1.5;  // keep row means well away from the guard band
    const RealMatrix g = random_real(rng, rows, cols);
    const RealMatrix analytic = normalize_rows_backward(theta, g);
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& x) {
          const RealMatrix th = oracle::unflatten(x, rows, cols);
          double acc = 0.0;
          for (Eigen::Index r = 0; r < rows; ++r) {
            const double mu = th.row(r).mean();
            for (Eigen::Index c = 0; c < cols; ++c) acc += g(r, c) * th(r, c) / mu;
          }
          return acc;
        },
        oracle::flatten(theta), 1e-5);
    EXPECT_LT(oracle::relative_error(oracle::flatten(analytic), fd), 1e-4);
  }
}

TEST(Binarize, ThresholdAndComplement) {
  RealMatrix z(2, 3);
  z << 0.5, 0.0, -0.5, -1e-300, 1e-300, 2.0;
  const BinaryMatrix a = binarize(z);
  ASSERT_EQ(a.rows(), 4);
  const int expected[2][3] = {{1, 0, 0}, {0, 1, 1}};
  for (int v = 0; v < 2; ++v)
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(a(2 * v, i), expected[v][i]);
      EXPECT_EQ(a(2 * v + 1, i), 1 - expected[v][i]);
    }
}

TEST(Backward, StraightThroughSurrogate) {
  // Around theta0 the STE gradient is the exact gradient of
  // phi(theta) = L(P [B(z0) + (z - z0); 1 - B(z0) - (z - z0)]), z = normalize(theta).
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const std::uint32_t n = 1 + t % 8;
    const CnfFormula f = oracle::random_formula(rng, n, 1 + t % 12, 3);
    const ProblemMatrix p(f);
    const RealMatrix dense = p.to_dense().cast<double>();
    const Eigen::Index cols = 2 + t % 3;
    const double tau = (t % 3 == 0) ? 0.5 : (t % 3 == 1 ? 1.0 : 5.0);
    RealMatrix theta0 = random_real(rng, n, cols);
    theta0.array() += 0.7;
    // Near-zero row means blow up the normalization and drown the difference
    // quotient in roundoff.
    for (Eigen::Index v = 0; v < theta0.rows(); ++v)
      while (std::abs(theta0.row(v).mean()) < 0.3) theta0.row(v) = random_real(rng, 1, cols);
    const RealMatrix z0 = normalize_rows(theta0);
    const RealMatrix b0 = binarize(z0).cast<double>();

    auto phi = [&](const std::vector<double>& x) {
      const RealMatrix z = normalize_rows(oracle::unflatten(x, n, cols));
      RealMatrix a(2 * n, cols);
      for (Eigen::Index v = 0; v < n; ++v) {
        a.row(2 * v) = b0.row(2 * v) + (z.row(v) - z0.row(v));
        a.row(2 * v + 1) = b0.row(2 * v + 1) - (z.row(v) - z0.row(v));
      }
      return oracle_loss(RealMatrix(dense * a), tau);
    };
    const BackwardPass pass = backward(p, theta0, tau);
    EXPECT_EQ(pass.result, oracle::dense_product(f, binarize(z0)));
    const auto fd = oracle::central_difference(phi, oracle::flatten(theta0), 1e-5);
    // Saturated columns give an exactly zero gradient. The floor sits above
    // the difference-quotient roundoff, about eps * |L| / h.
    EXPECT_LT(oracle::relative_error(oracle::flatten(pass.theta_grad), fd, 1e-5), 1e-4);
  }
}

TEST(Init, StandardNormalAndSeeded) {
  const AssignmentTensor t = init_assignments(200, 256, 42);
  const double mean = t.theta.mean();
  const double var = (t.theta.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_EQ(t.m.cwiseAbs().sum(), 0.0);
  EXPECT_EQ(t.step, 0u);
  EXPECT_EQ(init_assignments(200, 256, 42).theta, t.theta);
  EXPECT_NE(init_assignments(200, 256, 43).theta, t.theta);
}

TEST(AdamW, FirstStepMovesByLearningRate) {
  AssignmentTensor t;
  t.theta = RealMatrix::Zero(1, 3);
  t.m = t.v = RealMatrix::Zero(1, 3);
  RealMatrix g(1, 3);
  g << 2.0, -0.5, 0.0;
  adamw_step(t, g, 0.1);
  // Bias-corrected moments equal g and g^2 after one step.
  EXPECT_NEAR(t.theta(0, 0), -0.1 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_NEAR(t.theta(0, 1), 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(t.theta(0, 2), 0.0);
  EXPECT_NEAR(t.m(0, 0), 0.2, 1e-15);
  EXPECT_NEAR(t.v(0, 0), 0.004, 1e-15);
  EXPECT_EQ(t.step, 1u);
  EXPECT_EQ(t.moment_step, 1u);
}

TEST(AdamW, SecondStepByHand) {
  AssignmentTensor t;
  t.theta = RealMatrix::Constant(1, 1, 1.0);
  t.m = t.v = RealMatrix::Zero(1, 1);
  const RealMatrix g1 = RealMatrix::Constant(1, 1, 1.0);
  const RealMatrix g2 = RealMatrix::Constant(1, 1, 3.0);
  adamw_step(t, g1, 0.01);
  adamw_step(t, g2, 0.01);
  const double m = 0.9 * 0.1 + 0.1 * 3.0;
  const double v = 0.999 * 0.001 + 0.001 * 9.0;
  const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
  const double expected = 1.0 - 0.01 * 1.0 / (1.0 + 1e-8) - 0.01 * mhat / (std::sqrt(vhat) + 1e-8);
  EXPECT_NEAR(t.theta(0, 0), expected, 1e-14);
}

TEST(AdamW, WeightDecayIsDecoupled) {
  AssignmentTensor t;
  t.theta = RealMatrix::Constant(1, 1, 2.0);
  t.m = t.v = RealMatrix::Zero(1, 1);
  AdamWParams params;
  params.weight_decay = 0.5;
  adamw_step(t, RealMatrix::Zero(1, 1), 0.1, params);
  EXPECT_NEAR(t.theta(0, 0), 2.0 * (1 - 0.05), 1e-15);
}

TEST(AdamW, ShapeMismatchThrows) {
  AssignmentTensor t = init_assignments(2, 2, 0);
  EXPECT_THROW(adamw_step(t, RealMatrix::Zero(2, 3), 0.1), std::invalid_argument);
}

TEST(Schedule, StepwiseDecayAndRestart) {
  const OptimizerConfig cfg;
  EXPECT_EQ(lr_at(0, cfg), 0.1);
  EXPECT_EQ(lr_at(29, cfg), 0.1);
  EXPECT_EQ(lr_at(30, cfg), 0.01);
  EXPECT_EQ(lr_at(359, cfg), lr_at(330, cfg));
  EXPECT_EQ(lr_at(360, cfg), 0.1);
  EXPECT_EQ(lr_at(3599, cfg), lr_at(359, cfg));
}

TEST(Schedule, FloorBinds) {
  OptimizerConfig cfg;
  cfg.restart_every = 100000;
  EXPECT_EQ(lr_at(30 * 20, cfg), 1e-15);
  EXPECT_GT(lr_at(30 * 13, cfg), 1e-15);
}

TEST(Config, Validation) {
  auto bad = [](auto mutate) {
    OptimizerConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
  };
  bad([](OptimizerConfig& c) { c.candidates = 0; });
  bad([](OptimizerConfig& c) { c.tau = 0.0; });
  bad([](OptimizerConfig& c) { c.lr_final = 1.0; });
  bad([](OptimizerConfig& c) { c.decay_every = 0; });
  bad([](OptimizerConfig& c) { c.convergence_fraction = 1.5; });
  bad([](OptimizerConfig& c) { c.check_stride = 0; });
  OptimizerConfig odd;
  odd.restart_every = 100;
  std::vector<std::string> warnings;
  odd.validate(&warnings);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(HardEvaluate, MatchesModelCounts) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const std::uint32_t n = 1 + t % 10;
    const CnfFormula f = oracle::random_formula(rng, n, 1 + t % 20, 4);
    const BinaryMatrix a = oracle::random_assignment(rng, n, 6);
    const HardEvaluation eval = hard_evaluate(ProblemMatrix(f), a);
    for (std::size_t i = 0; i < 6; ++i) {
      const Model m = decode_model(a, i);
      EXPECT_EQ(eval.satisfied[i], count_satisfied_clauses(f, m));
      EXPECT_EQ(eval.is_sat[i] != 0, verify_model(f, m));
    }
  }
}

TEST(GradientPhase, SolvesFourVariableExample) {
  OptimizerConfig cfg;
  cfg.candidates = 8;
  const GradSnapshot snap = run_gradient_phase(ProblemMatrix(fixtures::four_var()), cfg);
  EXPECT_EQ(snap.stop_reason, StopReason::Satisfied);
  ASSERT_TRUE(snap.satisfying_column);
  EXPECT_TRUE(verify_model(fixtures::four_var(), decode_model(snap.assignment, *snap.satisfying_column)));
  EXPECT_EQ(snap.best_fraction(), 1.0);
  EXPECT_EQ(snap.variable_grad.rows(), 4);
  EXPECT_EQ(snap.loss_history.size(), snap.iterations);
}

TEST(GradientPhase, ContradictionRunsToMaxIterations) {
  OptimizerConfig cfg;
  cfg.candidates = 4;
  const CnfFormula f = parse_dimacs_string("p cnf 1 2\n1 0\n-1 0\n");
  const GradSnapshot snap = run_gradient_phase(ProblemMatrix(f), cfg);
  EXPECT_EQ(snap.stop_reason, StopReason::MaxIterations);
  EXPECT_EQ(snap.iterations, 3600u);
  EXPECT_EQ(snap.best_fraction(), 0.5);
  EXPECT_FALSE(snap.satisfying_column);
  EXPECT_EQ(snap.trace.size(), 3600u);
}

TEST(GradientPhase, ConvergedStopsEarly) {
  std::vector<std::vector<Literal>> clauses{{Literal(0, true)}, {Literal(0, false)}};
  for (int i = 0; i < 198; ++i) clauses.push_back({Literal(1, true), Literal(2, true)});
  OptimizerConfig cfg;
  cfg.candidates = 16;
  const GradSnapshot snap = run_gradient_phase(ProblemMatrix(CnfFormula(3, clauses)), cfg);
  EXPECT_EQ(snap.stop_reason, StopReason::Converged);
  EXPECT_EQ(snap.iterations, 1u);
  EXPECT_EQ(snap.sat_counts[snap.best_column], 199u);
}

TEST(GradientPhase, Deterministic) {
  std::mt19937_64 rng(10);
  const CnfFormula f = oracle::random_formula(rng, 30, 130, 3);
  OptimizerConfig cfg;
  cfg.candidates = 16;
  cfg.max_iterations = 400;
  cfg.rng_seed = 99;
  const ProblemMatrix p(f);
  const GradSnapshot a = run_gradient_phase(p, cfg);
  const GradSnapshot b = run_gradient_phase(p, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.variable_grad, b.variable_grad);
}

TEST(GradientPhase, CancelledBeforeStart) {
  std::atomic<bool> cancel{true};
  GradPhaseControl control;
  control.cancel = &cancel;
  OptimizerConfig cfg;
  cfg.candidates = 4;
  const CnfFormula f = parse_dimacs_string("p cnf 1 2\n1 0\n-1 0\n");
  const GradSnapshot snap = run_gradient_phase(ProblemMatrix(f), cfg, control);
  EXPECT_EQ(snap.stop_reason, StopReason::Interrupted);
  EXPECT_EQ(snap.iterations, 1u);
  EXPECT_EQ(snap.assignment.rows(), 2);
  EXPECT_EQ(snap.sat_counts.size(), 4u);
}

TEST(GradientPhase, UnnormalizedSingleCandidate) {
  OptimizerConfig cfg;
  cfg.candidates = 1;
  cfg.normalize = false;
  cfg.max_iterations = 50;
  const CnfFormula f = parse_dimacs_string("p cnf 1 1\n-1 0\n");
  const GradSnapshot snap = run_gradient_phase(ProblemMatrix(f), cfg);
  EXPECT_EQ(snap.stop_reason, StopReason::Satisfied);
}

TEST(Trace, CsvHeader) {
  std::ostringstream out;
  const TraceRow rows[] = {{0, 0.1, -3.5, 0.5}};
  write_trace_csv(out, rows);
  EXPECT_EQ(out.str(), "iteration,lr,loss,best_fraction\n0,0.10000000000000001,-3.5,0.5\n");
}
