#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// straightforward reference and `omp` the OpenMP version. Both must produce
// bitwise-identical output; tests/unit/test_kernels.cpp holds them to that.

#include <cstddef>
#include <span>
#include <vector>

#include "aim/comparability.hpp"
#include "aim/dataset.hpp"
#include "aim/similarity.hpp"

namespace aim::kernels {

// Per-row numerator/denominator of a weighted label-agreement estimate.
struct RatioSums {
  std::vector<double> numerator;
  std::vector<double> denominator;
};

struct FixedPointStats {
  int max_iterations_used = 0;
  bool converged = true;
  double worst_step = 0.0;
};

namespace serial {

// All i<j pairs tested directly.
ComparabilityGraph comparability_graph(const Dataset& d, const ComparabilityConfig& cfg);

// Column-by-column fixed point q <- (1-p) e_c + p W q, written into `q`.
FixedPointStats rwr_fixed_point(const SparseRowMatrix& w, double damping, double tolerance,
                                int max_iterations, RealMatrix& q);

// sum_j [s_j = s_i][y_j = y_i] Q[i,j]  over  sum_j [s_j = s_i] Q[i,j]
RatioSums credibility_sums(std::span<const Label> labels, std::span<const Group> groups,
                           const SimilarityMatrix& q);

// sum_j [s_j != s_i][y_j != y_i] c_j Q[i,j]  over  sum_j [s_j != s_i] c_j Q[i,j]
RatioSums bias_sums(std::span<const Label> labels, std::span<const Group> groups,
                    std::span<const double> credibility_weight, const SimilarityMatrix& q);

}  // namespace serial

namespace omp {

ComparabilityGraph comparability_graph(const Dataset& d, const ComparabilityConfig& cfg, bool prefilter);

FixedPointStats rwr_fixed_point(const SparseRowMatrix& w, double damping, double tolerance,
                                int max_iterations, RealMatrix& q);

RatioSums credibility_sums(std::span<const Label> labels, std::span<const Group> groups,
                           const SimilarityMatrix& q);

RatioSums bias_sums(std::span<const Label> labels, std::span<const Group> groups,
                    std::span<const double> credibility_weight, const SimilarityMatrix& q);

}  // namespace omp

}  // namespace aim::kernels
