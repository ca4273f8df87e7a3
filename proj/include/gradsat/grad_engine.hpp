#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradsat/cnf.hpp"
#include "gradsat/matrix_encoding.hpp"

namespace gradsat {

struct AdamWParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

struct OptimizerConfig {
  std::size_t candidates = 256;  // N, columns of the assignment matrix
  double lr_initial = 1e-1;
  double lr_final = 1e-15;
  double decay_factor = 10.0;
  std::uint32_t decay_every = 30;
  std::uint32_t restart_every = 360;
  double tau = 1.0;
  std::uint32_t max_iterations = 3600;
  double convergence_fraction = 0.99;
  std::uint32_t check_stride = 10;
  std::uint64_t rng_seed = 0;
  bool normalize = true;
  double normalize_epsilon = 1e-8;
  // Zero the Adam moments whenever the learning rate restarts.
  bool reset_moments_on_restart = true;
  AdamWParams adamw;

  // Throws std::invalid_argument on violated invariants. Soft issues (restart
  // period not a multiple of the decay period) go to `warnings`.
  void validate(std::vector<std::string>* warnings = nullptr) const;
};

// Real-valued parameters, one per variable per candidate, plus AdamW state.
// `moment_step` drives bias correction and restarts with the moments.
struct AssignmentTensor {
  RealMatrix theta;
  RealMatrix m;
  RealMatrix v;
  std::uint64_t step = 0;
  std::uint64_t moment_step = 0;
};

AssignmentTensor init_assignments(std::size_t num_vars, std::size_t num_candidates,
                                  std::uint64_t seed);

// Divides each row by its mean, guarded as sign(mu) * max(|mu|, eps) with
// sign(0) = +1.
RealMatrix normalize_rows(const RealMatrix& theta, double eps = 1e-8);

// Vector-Jacobian product of normalize_rows at `theta`.
RealMatrix normalize_rows_backward(const RealMatrix& theta, const RealMatrix& grad_normalized,
                                   double eps = 1e-8);

// Positive-literal row of v is 1 iff value > 0; negative-literal row is its
// complement. Output has 2V rows.
BinaryMatrix binarize(const RealMatrix& theta_norm);

// Softmin-weighted mean of `values`, shifted by the minimum for stability.
double smooth_min(std::span<const double> values, double tau);

// L = -sum_i smooth_min(column i of r).
double loss(const RealMatrix& r, double tau);

// Returns L and writes dL/dR into `grad` (same shape as r).
double loss_and_gradient(const RealMatrix& r, double tau, RealMatrix& grad);

// Same quantity for integer counts. Shifted counts are small non-negative
// integers, so the weights come from a table of exp(-tau * k).
double loss_and_gradient(const CountMatrix& r, double tau, RealMatrix& grad);

// Collapses a 2V x N literal gradient to V x N as grad_pos - grad_neg, the
// chain rule for a negative row defined as 1 - positive row.
RealMatrix fold_literal_gradient(const RealMatrix& literal_grad);

struct BackwardPass {
  double loss = 0.0;
  CountMatrix result;         // R = P * B(normalize(theta))
  RealMatrix variable_grad;   // folded dL/dA, V x N, before the normalization Jacobian
  RealMatrix theta_grad;      // dL/dtheta with the straight-through estimator
};

BackwardPass backward(const ProblemMatrix& p, const RealMatrix& theta, double tau,
                      bool normalize = true, double eps = 1e-8);

void adamw_step(AssignmentTensor& tensor, const RealMatrix& grad, double lr,
                const AdamWParams& params = {});

double lr_at(std::uint64_t iteration, const OptimizerConfig& config);

struct HardEvaluation {
  std::vector<std::uint32_t> satisfied;  // per column
  std::vector<std::uint8_t> is_sat;      // per column
};

HardEvaluation hard_evaluate(const CountMatrix& r);
HardEvaluation hard_evaluate(const ProblemMatrix& p, const BinaryMatrix& a);

// Model held by candidate `column` of a literal-major binary matrix.
Model decode_model(const BinaryMatrix& a, std::size_t column);

enum class StopReason { Satisfied, Converged, MaxIterations, Interrupted };

std::string_view to_string(StopReason reason);

struct TraceRow {
  std::uint32_t iteration = 0;
  double lr = 0.0;
  double loss = 0.0;
  double best_fraction = 0.0;  // most recent hard check
};

struct GradSnapshot {
  RealMatrix variable_grad;
  RealMatrix theta_grad;
  BinaryMatrix assignment;                  // 2V x N, the A the gradients belong to
  std::vector<std::uint32_t> sat_counts;    // per column
  std::size_t best_column = 0;
  std::optional<std::size_t> satisfying_column;
  std::vector<double> loss_history;
  std::vector<TraceRow> trace;
  std::uint32_t iterations = 0;
  StopReason stop_reason = StopReason::MaxIterations;
  std::size_t num_clauses = 0;

  double best_fraction() const;
};

struct GradPhaseControl {
  const std::atomic<bool>* cancel = nullptr;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Normalize -> binarize -> forward -> (periodic) hard check -> loss ->
// backward -> AdamW, with the stepwise-decay/restart learning rate schedule.
GradSnapshot run_gradient_phase(const ProblemMatrix& p, const OptimizerConfig& config,
                                const GradPhaseControl& control = {});

// CSV with header `iteration,lr,loss,best_fraction`.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

}  // namespace gradsat
