#include "gradsat/grad_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gradsat {

void OptimizerConfig::validate(std::vector<std::string>* warnings) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (candidates < 1) fail("candidates must be >= 1");
  if (!(lr_final > 0.0) || !(lr_initial > lr_final)) fail("need lr_initial > lr_final > 0");
  if (!(decay_factor > 0.0)) fail("decay_factor must be positive");
  if (decay_every == 0 || restart_every == 0 || max_iterations == 0)
    fail("decay_every, restart_every and max_iterations must be positive");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (!(convergence_fraction > 0.0 && convergence_fraction <= 1.0))
    fail("convergence_fraction must be in (0, 1]");
  if (check_stride == 0) fail("check_stride must be positive");
  if (!(normalize_epsilon > 0.0)) fail("normalize_epsilon must be positive");
  if (warnings && restart_every % decay_every != 0)
    warnings->push_back("restart_every is not a multiple of decay_every");
}

AssignmentTensor init_assignments(std::size_t num_vars, std::size_t num_candidates,
                                  std::uint64_t seed) {
  const auto rows = static_cast<Eigen::Index>(num_vars);
  const auto cols = static_cast<Eigen::Index>(num_candidates);
  AssignmentTensor t;
  t.theta.resize(rows, cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < t.theta.size(); ++i) t.theta.data()[i] = normal(rng);
  t.m = RealMatrix::Zero(rows, cols);
  t.v = RealMatrix::Zero(rows, cols);
  return t;
}

namespace {

double guarded_denominator(double mean, double eps) {
  const double mag = std::max(std::abs(mean), eps);
  return mean < 0.0 ? -mag : mag;
}

void normalize_rows_into(const RealMatrix& theta, double eps, RealMatrix& out) {
  out.resize(theta.rows(), theta.cols());
  for (Eigen::Index r = 0; r < theta.rows(); ++r)
    out.row(r) = theta.row(r) / guarded_denominator(theta.row(r).mean(), eps);
}

void normalize_rows_backward_into(const RealMatrix& theta, const RealMatrix& grad_normalized,
                                  double eps, RealMatrix& out) {
  const double n = static_cast<double>(theta.cols());
  out.resize(theta.rows(), theta.cols());
  for (Eigen::Index r = 0; r < theta.rows(); ++r) {
    const double mean = theta.row(r).mean();
    const double d = guarded_denominator(mean, eps);
    out.row(r) = grad_normalized.row(r) / d;
    // Inside the guard band the denominator is constant.
    if (std::abs(mean) > eps) {
      const double coupling = grad_normalized.row(r).dot(theta.row(r)) / (n * d * d);
      out.row(r).array() -= coupling;
    }
  }
}

void binarize_into(const RealMatrix& theta_norm, BinaryMatrix& a) {
  a.resize(2 * theta_norm.rows(), theta_norm.cols());
  const Eigen::Index n = theta_norm.cols();
  for (Eigen::Index v = 0; v < theta_norm.rows(); ++v) {
    const double* src = theta_norm.row(v).data();
    std::uint8_t* pos = a.row(2 * v).data();
    std::uint8_t* neg = a.row(2 * v + 1).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint8_t bit = src[i] > 0.0 ? 1 : 0;
      pos[i] = bit;
      neg[i] = 1 - bit;
    }
  }
}

void fold_into(const RealMatrix& literal_grad, RealMatrix& out) {
  const Eigen::Index vars = literal_grad.rows() / 2;
  out.resize(vars, literal_grad.cols());
  for (Eigen::Index v = 0; v < vars; ++v)
    out.row(v) = literal_grad.row(2 * v) - literal_grad.row(2 * v + 1);
}

}  // namespace

RealMatrix normalize_rows(const RealMatrix& theta, double eps) {
  RealMatrix out;
  normalize_rows_into(theta, eps, out);
  return out;
}

RealMatrix normalize_rows_backward(const RealMatrix& theta, const RealMatrix& grad_normalized,
                                   double eps) {
  RealMatrix out;
  normalize_rows_backward_into(theta, grad_normalized, eps, out);
  return out;
}

BinaryMatrix binarize(const RealMatrix& theta_norm) {
  BinaryMatrix a;
  binarize_into(theta_norm, a);
  return a;
}

double smooth_min(std::span<const double> values, double tau) {
  if (values.empty()) throw std::invalid_argument("smooth_min of an empty column");
  const double lo = *std::min_element(values.begin(), values.end());
  double num = 0.0;
  double den = 0.0;
  for (double r : values) {
    const double w = std::exp(-tau * (r - lo));
    num += r * w;
    den += w;
  }
  return num / den;
}

double loss_and_gradient(const RealMatrix& r, double tau, RealMatrix& grad) {
  grad.resize(r.rows(), r.cols());
  if (r.rows() == 0) return 0.0;
  using RowArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::RowVectorXd lo = r.colwise().minCoeff();
  RowArray weights = (-tau * (r.rowwise() - lo).array()).exp();
  const Eigen::RowVectorXd z = weights.colwise().sum().matrix();
  weights.rowwise() /= z.array();
  const Eigen::RowVectorXd s = (weights * r.array()).colwise().sum().matrix();
  // dS_i/dR_ci = w_ci * (1 - tau * (R_ci - S_i)); L = -sum_i S_i.
  grad = -(weights * (1.0 - tau * (r.rowwise() - s).array())).matrix();
  return -s.sum();
}

double loss_and_gradient(const CountMatrix& r, double tau, RealMatrix& grad) {
  const Eigen::Index rows = r.rows();
  const Eigen::Index n = r.cols();
  grad.resize(rows, n);
  if (rows == 0) return 0.0;

  std::vector<std::int32_t> lo(r.row(0).data(), r.row(0).data() + n);
  std::int32_t hi = 0;
  for (Eigen::Index c = 0; c < rows; ++c) {
    const std::int32_t* row = r.row(c).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], row[i]);
      hi = std::max(hi, row[i]);
    }
  }
  std::vector<double> table(static_cast<std::size_t>(hi) + 1);
  for (std::size_t k = 0; k < table.size(); ++k)
    table[k] = std::exp(-tau * static_cast<double>(k));

  // First pass: partition function and weighted sum per column; grad holds
  // the raw weights until the second pass.
  std::vector<double> z(n, 0.0), num(n, 0.0);
  for (Eigen::Index c = 0; c < rows; ++c) {
    const std::int32_t* row = r.row(c).data();
    double* w = grad.row(c).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      w[i] = table[static_cast<std::size_t>(row[i] - lo[i])];
      z[i] += w[i];
      num[i] += w[i] * row[i];
    }
  }
  std::vector<double> s(n), inv_z(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s[i] = num[i] / z[i];
    inv_z[i] = 1.0 / z[i];
    total += s[i];
  }
  for (Eigen::Index c = 0; c < rows; ++c) {
    const std::int32_t* row = r.row(c).data();
    double* g = grad.row(c).data();
    for (Eigen::Index i = 0; i < n; ++i)
      g[i] = -(g[i] * inv_z[i]) * (1.0 - tau * (row[i] - s[i]));
  }
  return -total;
}

double loss(const RealMatrix& r, double tau) {
  RealMatrix unused;
  return loss_and_gradient(r, tau, unused);
}

RealMatrix fold_literal_gradient(const RealMatrix& literal_grad) {
  RealMatrix out;
  fold_into(literal_grad, out);
  return out;
}

namespace {

// Buffers reused across iterations of the gradient loop.
struct Workspace {
  RealMatrix normalized;
  BinaryMatrix assignment;
  CountMatrix result;
  RealMatrix grad_r;
  RealMatrix literal_grad;
  RealMatrix variable_grad;
  RealMatrix theta_grad;
};

double backward_from_result(const ProblemMatrix& p, const RealMatrix& theta, double tau,
                            bool normalize, double eps, Workspace& ws) {
  const double l = loss_and_gradient(ws.result, tau, ws.grad_r);
  // Straight-through: dL/dA passes the binarization unchanged.
  spmm_transpose(p, ws.grad_r, ws.literal_grad);
  fold_into(ws.literal_grad, ws.variable_grad);
  if (normalize) normalize_rows_backward_into(theta, ws.variable_grad, eps, ws.theta_grad);
  else ws.theta_grad = ws.variable_grad;
  return l;
}

void forward(const ProblemMatrix& p, const RealMatrix& theta, bool normalize, double eps,
             Workspace& ws) {
  if (normalize) {
    normalize_rows_into(theta, eps, ws.normalized);
    binarize_into(ws.normalized, ws.assignment);
  } else {
    binarize_into(theta, ws.assignment);
  }
  spmm_forward(p, ws.assignment, ws.result);
}

}  // namespace

BackwardPass backward(const ProblemMatrix& p, const RealMatrix& theta, double tau, bool normalize,
                      double eps) {
  if (static_cast<std::size_t>(theta.rows()) != p.num_vars())
    throw std::invalid_argument("theta rows do not match variable count");
  Workspace ws;
  forward(p, theta, normalize, eps, ws);
  BackwardPass out;
  out.loss = backward_from_result(p, theta, tau, normalize, eps, ws);
  out.result = std::move(ws.result);
  out.variable_grad = std::move(ws.variable_grad);
  out.theta_grad = std::move(ws.theta_grad);
  return out;
}

void adamw_step(AssignmentTensor& t, const RealMatrix& grad, double lr, const AdamWParams& params) {
  if (grad.rows() != t.theta.rows() || grad.cols() != t.theta.cols())
    throw std::invalid_argument("gradient shape does not match parameters");
  ++t.step;
  ++t.moment_step;
  if (params.weight_decay != 0.0) t.theta *= (1.0 - lr * params.weight_decay);
  t.m = params.beta1 * t.m + (1.0 - params.beta1) * grad;
  t.v = params.beta2 * t.v + (1.0 - params.beta2) * grad.cwiseProduct(grad);
  const double k = static_cast<double>(t.moment_step);
  const double c1 = 1.0 - std::pow(params.beta1, k);
  const double c2 = 1.0 - std::pow(params.beta2, k);
  t.theta.array() -=
      lr * (t.m.array() / c1) / ((t.v.array() / c2).sqrt() + params.epsilon);
}

double lr_at(std::uint64_t iteration, const OptimizerConfig& config) {
  const std::uint64_t in_cycle = iteration % config.restart_every;
  const double exponent = static_cast<double>(in_cycle / config.decay_every);
  return std::max(config.lr_initial / std::pow(config.decay_factor, exponent), config.lr_final);
}

HardEvaluation hard_evaluate(const CountMatrix& r) {
  HardEvaluation eval;
  const auto n = static_cast<std::size_t>(r.cols());
  eval.satisfied.assign(n, 0);
  for (Eigen::Index c = 0; c < r.rows(); ++c) {
    const std::int32_t* row = r.row(c).data();
    for (std::size_t i = 0; i < n; ++i) eval.satisfied[i] += row[i] >= 1 ? 1u : 0u;
  }
  eval.is_sat.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    eval.is_sat[i] = eval.satisfied[i] == static_cast<std::uint32_t>(r.rows()) ? 1 : 0;
  return eval;
}

HardEvaluation hard_evaluate(const ProblemMatrix& p, const BinaryMatrix& a) {
  return hard_evaluate(spmm_forward(p, a));
}

Model decode_model(const BinaryMatrix& a, std::size_t column) {
  const auto vars = static_cast<std::size_t>(a.rows() / 2);
  Model model(vars);
  for (std::size_t v = 0; v < vars; ++v)
    model.set(static_cast<Var>(v),
              a(static_cast<Eigen::Index>(2 * v), static_cast<Eigen::Index>(column)) != 0);
  return model;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Satisfied: return "satisfied";
    case StopReason::Converged: return "converged";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::Interrupted: return "interrupted";
  }
  return "unknown";
}

double GradSnapshot::best_fraction() const {
  if (sat_counts.empty()) return 0.0;
  if (num_clauses == 0) return 1.0;
  return static_cast<double>(sat_counts[best_column]) / static_cast<double>(num_clauses);
}

GradSnapshot run_gradient_phase(const ProblemMatrix& p, const OptimizerConfig& config,
                                const GradPhaseControl& control) {
  config.validate();
  const std::size_t clauses = p.num_clauses();
  const double tau = config.tau;
  AssignmentTensor tensor = init_assignments(p.num_vars(), config.candidates, config.rng_seed);

  GradSnapshot snap;
  snap.num_clauses = clauses;
  snap.loss_history.reserve(config.max_iterations);
  double best_fraction = 0.0;
  Workspace ws;

  for (std::uint32_t iter = 0; iter < config.max_iterations; ++iter) {
    const bool interrupted =
        (control.cancel && control.cancel->load(std::memory_order_relaxed)) ||
        (control.deadline && std::chrono::steady_clock::now() >= *control.deadline);
    if (iter > 0 && iter % config.restart_every == 0 && config.reset_moments_on_restart) {
      tensor.m.setZero();
      tensor.v.setZero();
      tensor.moment_step = 0;
    }
    const double lr = lr_at(iter, config);

    forward(p, tensor.theta, config.normalize, config.normalize_epsilon, ws);

    const bool last = iter + 1 == config.max_iterations || interrupted;
    std::optional<StopReason> stop;
    if (iter % config.check_stride == 0 || last) {
      HardEvaluation eval = hard_evaluate(ws.result);
      auto best = std::max_element(eval.satisfied.begin(), eval.satisfied.end());
      snap.best_column = static_cast<std::size_t>(best - eval.satisfied.begin());
      best_fraction = clauses == 0 ? 1.0 : static_cast<double>(*best) / static_cast<double>(clauses);
      snap.sat_counts = std::move(eval.satisfied);
      if (*best == clauses) {
        snap.satisfying_column = snap.best_column;
        stop = StopReason::Satisfied;
      } else if (best_fraction > config.convergence_fraction) {
        stop = StopReason::Converged;
      } else if (last) {
        stop = interrupted ? StopReason::Interrupted : StopReason::MaxIterations;
      }
    }

    const double l = backward_from_result(p, tensor.theta, tau, config.normalize,
                                          config.normalize_epsilon, ws);
    snap.loss_history.push_back(l);
    snap.trace.push_back({iter, lr, l, best_fraction});
    snap.iterations = iter + 1;

    if (stop) {
      snap.stop_reason = *stop;
      snap.variable_grad = std::move(ws.variable_grad);
      snap.theta_grad = std::move(ws.theta_grad);
      snap.assignment = std::move(ws.assignment);
      break;
    }
    adamw_step(tensor, ws.theta_grad, lr, config.adamw);
  }
  return snap;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "iteration,lr,loss,best_fraction\n";
  const auto old = out.precision(17);
  for (const auto& row : trace)
    out << row.iteration << ',' << row.lr << ',' << row.loss << ',' << row.best_fraction << '\n';
  out.precision(old);
}

}  // namespace gradsat
