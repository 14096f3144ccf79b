#include "aim/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace aim::kernels::serial {

ComparabilityGraph comparability_graph(const Dataset& d, const ComparabilityConfig& cfg) {
  const auto n = d.size();
  std::vector<std::vector<std::size_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (is_comparable(d, i, j, cfg)) {
        rows[i].push_back(j);
        rows[j].push_back(i);
      }
    }
  }
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> neighbors;
  for (const auto& r : rows) {
    neighbors.insert(neighbors.end(), r.begin(), r.end());
    offsets.push_back(neighbors.size());
  }
  return ComparabilityGraph(std::move(offsets), std::move(neighbors));
}

FixedPointStats rwr_fixed_point(const SparseRowMatrix& w, double damping, double tolerance,
                                int max_iterations, RealMatrix& q) {
  const auto n = w.rows();
  q.resize(n, n);
  FixedPointStats stats;
  std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    std::fill(x.begin(), x.end(), 0.0);
    x[static_cast<std::size_t>(c)] = 1.0 - damping;
    double step = 0.0;
    int it = 0;
    for (; it < max_iterations; ++it) {
      step = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (SparseRowMatrix::InnerIterator e(w, i); e; ++e) acc += e.value() * x[static_cast<std::size_t>(e.col())];
        const double v = (i == c ? 1.0 - damping : 0.0) + damping * acc;
        step = std::max(step, std::abs(v - x[static_cast<std::size_t>(i)]));
        y[static_cast<std::size_t>(i)] = v;
      }
      x.swap(y);
      if (step <= tolerance) break;
    }
    if (step > tolerance) {
      stats.converged = false;
      stats.worst_step = std::max(stats.worst_step, step);
    }
    stats.max_iterations_used = std::max(stats.max_iterations_used, std::min(it + 1, max_iterations));
    for (Eigen::Index i = 0; i < n; ++i) q(i, c) = x[static_cast<std::size_t>(i)];
  }
  return stats;
}

RatioSums credibility_sums(std::span<const Label> labels, std::span<const Group> groups,
                           const SimilarityMatrix& q) {
  const auto n = labels.size();
  RatioSums out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (groups[j] != groups[i]) continue;
      den += row[j];
      if (labels[j] == labels[i]) num += row[j];
    }
    out.numerator[i] = num;
    out.denominator[i] = den;
  }
  return out;
}

RatioSums bias_sums(std::span<const Label> labels, std::span<const Group> groups,
                    std::span<const double> credibility_weight, const SimilarityMatrix& q) {
  const auto n = labels.size();
  RatioSums out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (groups[j] == groups[i]) continue;
      const double wgt = credibility_weight[j] * row[j];
      den += wgt;
      if (labels[j] != labels[i]) num += wgt;
    }
    out.numerator[i] = num;
    out.denominator[i] = den;
  }
  return out;
}

}  // namespace aim::kernels::serial
