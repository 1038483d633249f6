#include "qineq/isotonic.hpp"

#include "qineq/errors.hpp"

namespace qineq {

IsotonicFit pava(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw ContractError("pava: values/weights length mismatch");
  if (values.empty()) throw ContractError("pava: empty input");
  for (double w : weights)
    if (!(w > 0.0)) throw ContractError("pava: weights must be positive");

  // Stack of pooled blocks: weighted sum, total weight, span.
  struct Pool {
    double wsum;
    double weight;
    int start;
    int end;
    double mean() const { return wsum / weight; }
  };
  std::vector<Pool> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    Pool cur{weights[i] * values[i], weights[i], static_cast<int>(i), static_cast<int>(i)};
    while (!stack.empty() && stack.back().mean() > cur.mean()) {
      const Pool& prev = stack.back();
      cur = Pool{prev.wsum + cur.wsum, prev.weight + cur.weight, prev.start, cur.end};
      stack.pop_back();
    }
    stack.push_back(cur);
  }

  IsotonicFit out;
  out.values.resize(values.size());
  out.blocks.reserve(stack.size());
  for (const Pool& b : stack) {
    const double v = b.start == b.end ? values[static_cast<std::size_t>(b.start)] : b.mean();
    out.blocks.push_back(IsotonicBlock{b.start, b.end, v});
    for (int k = b.start; k <= b.end; ++k) out.values[static_cast<std::size_t>(k)] = v;
  }
  return out;
}

IsotonicFit pava(std::span<const double> values) {
  const std::vector<double> ones(values.size(), 1.0);
  return pava(values, ones);
}

BetaSurface isotonize_surface(const BetaSurface& surface, std::span<const double> weights) {
  const Eigen::MatrixXd& c = surface.coeffs();
  const auto rows = static_cast<std::size_t>(c.rows());
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(rows, 1.0);
  if (w.size() != rows) throw ContractError("isotonize_surface: weight count must equal knot count");

  Eigen::MatrixXd out(c.rows(), c.cols());
  std::vector<double> col(rows);
  for (Eigen::Index i = 0; i < c.cols(); ++i) {
    for (std::size_t j = 0; j < rows; ++j) col[j] = c(static_cast<Eigen::Index>(j), i);
    const IsotonicFit fit = pava(col, w);
    for (std::size_t j = 0; j < rows; ++j) out(static_cast<Eigen::Index>(j), i) = fit.values[j];
  }
  return BetaSurface(surface.grid(), std::move(out));
}

}  // namespace qineq
