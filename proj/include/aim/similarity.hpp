#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "aim/comparability.hpp"
#include "aim/dataset.hpp"
#include "aim/execution.hpp"

namespace aim {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// D^{-1/2} A D^{-1/2}; rows and columns of isolated vertices are zero.
struct NormalizedAdjacency {
  SparseRowMatrix weights;
  std::vector<std::size_t> degree;

  std::size_t size() const { return degree.size(); }
};

NormalizedAdjacency symmetric_normalize(const ComparabilityGraph& g);

// Dense, row-indexed proximity matrix Q: entry (i, j) weights sample j's
// evidence when estimating sample i.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(RealMatrix values, double damping);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * size(), size()}; }
  const RealMatrix& values() const { return values_; }
  double damping() const { return damping_; }

 private:
  RealMatrix values_;
  double damping_ = 0.0;
};

enum class RwrSolver { dense, iterative };

struct RwrOptions {
  RwrSolver solver = RwrSolver::dense;
  double tolerance = 1e-10;      // max-norm step size for the fixed point
  int max_iterations = 10'000;
  Execution execution = Execution::parallel;
};

// Q = (1-p)(I - p W)^{-1}. Throws ConvergenceError if the iterative backend
// exceeds max_iterations.
SimilarityMatrix rwr_proximity(const NormalizedAdjacency& w, double damping, const RwrOptions& options = {});

// Row-normalized comparability (A[i,j] / deg_i) used in place of RWR on large data.
SimilarityMatrix adjacency_similarity(const ComparabilityGraph& g);

// max |(I - pW) Q - (1-p) I|
double rwr_residual(const NormalizedAdjacency& w, const SimilarityMatrix& q);

}  // namespace aim
