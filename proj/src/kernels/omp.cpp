#include "aim/kernels/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aim::kernels::omp {
namespace {

ComparabilityGraph assemble(std::vector<std::vector<std::size_t>>& rows) {
  std::vector<std::size_t> offsets(rows.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) offsets[i + 1] = offsets[i] + rows[i].size();
  std::vector<std::size_t> neighbors(offsets.back());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    std::copy(r.begin(), r.end(), neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[static_cast<std::size_t>(i)]));
  }
  return ComparabilityGraph(std::move(offsets), std::move(neighbors));
}

}  // namespace

ComparabilityGraph comparability_graph(const Dataset& d, const ComparabilityConfig& cfg, bool prefilter) {
  const auto n = d.size();
  std::vector<std::vector<std::size_t>> rows(n);
  const auto count = static_cast<std::ptrdiff_t>(n);

  if (!prefilter || d.num_numerical() == 0) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && is_comparable(d, i, j, cfg)) rows[i].push_back(j);
      }
    }
    return assemble(rows);
  }

  // Window scan over samples sorted on the first numerical feature. Within the
  // sorted order the key gap grows monotonically, so the scan can stop at the
  // first gap above the threshold.
  const auto& x = d.numericals();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x(static_cast<Eigen::Index>(a), 0) < x(static_cast<Eigen::Index>(b), 0);
  });
  const double t = cfg.numerical_threshold;

#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t aa = 0; aa < count; ++aa) {
    const auto a = static_cast<std::size_t>(aa);
    const auto i = order[a];
    const double key = x(static_cast<Eigen::Index>(i), 0);
    auto& row = rows[i];
    for (std::size_t b = a; b-- > 0;) {
      const auto j = order[b];
      if (std::abs(key - x(static_cast<Eigen::Index>(j), 0)) > t) break;
      if (is_comparable(d, i, j, cfg)) row.push_back(j);
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto j = order[b];
      if (std::abs(key - x(static_cast<Eigen::Index>(j), 0)) > t) break;
      if (is_comparable(d, i, j, cfg)) row.push_back(j);
    }
    std::sort(row.begin(), row.end());
  }
  return assemble(rows);
}

FixedPointStats rwr_fixed_point(const SparseRowMatrix& w, double damping, double tolerance,
                                int max_iterations, RealMatrix& q) {
  const auto n = w.rows();
  q.resize(n, n);
  int worst_iterations = 0;
  double worst_step = 0.0;
  bool all_converged = true;

#pragma omp parallel
  {
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    int local_iterations = 0;
    double local_step = 0.0;
    bool local_converged = true;

#pragma omp for schedule(dynamic, 8)
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
        local_converged = false;
        local_step = std::max(local_step, step);
      }
      local_iterations = std::max(local_iterations, std::min(it + 1, max_iterations));
      for (Eigen::Index i = 0; i < n; ++i) q(i, c) = x[static_cast<std::size_t>(i)];
    }

#pragma omp critical
    {
      worst_iterations = std::max(worst_iterations, local_iterations);
      worst_step = std::max(worst_step, local_step);
      all_converged = all_converged && local_converged;
    }
  }
  return {worst_iterations, all_converged, worst_step};
}

RatioSums credibility_sums(std::span<const Label> labels, std::span<const Group> groups,
                           const SimilarityMatrix& q) {
  const auto n = labels.size();
  RatioSums out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
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
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
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

}  // namespace aim::kernels::omp
