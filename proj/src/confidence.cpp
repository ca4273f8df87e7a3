#include "gradsat/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gradsat {

std::size_t compute_k(std::size_t num_vars) {
  const std::size_t fraction = (num_vars + 9999) / 10000;
  return std::min(std::max<std::size_t>(fraction, 20), num_vars);
}

std::vector<PartialAssignment> extract(const GradSnapshot& snapshot, const BinaryMatrix& a,
                                       std::size_t num_requested, ConfidenceSignal signal) {
  const RealMatrix& grad =
      signal == ConfidenceSignal::VariableGradient ? snapshot.variable_grad : snapshot.theta_grad;
  const auto vars = static_cast<std::size_t>(grad.rows());
  const auto cols = static_cast<std::size_t>(grad.cols());
  if (static_cast<std::size_t>(a.rows()) != 2 * vars || static_cast<std::size_t>(a.cols()) != cols)
    throw std::invalid_argument("assignment matrix does not match gradient shape");
  if (snapshot.sat_counts.size() != cols)
    throw std::invalid_argument("snapshot has no per-column satisfied counts");

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return snapshot.sat_counts[x] > snapshot.sat_counts[y];
  });
  order.resize(std::min(num_requested, cols));

  const std::size_t k = compute_k(vars);
  std::vector<PartialAssignment> out;
  out.reserve(order.size());
  std::vector<Var> ranked(vars);
  for (std::size_t col : order) {
    const auto c = static_cast<Eigen::Index>(col);
    std::iota(ranked.begin(), ranked.end(), Var{0});
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                      [&](Var x, Var y) {
                        const double gx = std::abs(grad(x, c));
                        const double gy = std::abs(grad(y, c));
                        return gx < gy || (gx == gy && x < y);
                      });
    PartialAssignment partial;
    partial.source_column = col;
    partial.satisfied_count = snapshot.sat_counts[col];
    partial.literals.reserve(k);
    partial.confidences.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const Var v = ranked[j];
      partial.literals.emplace_back(v, a(static_cast<Eigen::Index>(2 * v), c) != 0);
      partial.confidences.push_back(std::abs(grad(v, c)));
    }
    out.push_back(std::move(partial));
  }
  return out;
}

nlohmann::json to_json(const PartialAssignment& partial) {
  nlohmann::json vars = nlohmann::json::array();
  for (Literal l : partial.literals)
    vars.push_back(nlohmann::json::array({static_cast<int>(l.var()) + 1, l.positive()}));
  return {{"column", partial.source_column}, {"sat_count", partial.satisfied_count}, {"vars", vars}};
}

}  // namespace gradsat
