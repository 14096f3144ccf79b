#include "aim/similarity.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "aim/errors.hpp"
#include "aim/kernels/kernels.hpp"

namespace aim {

NormalizedAdjacency symmetric_normalize(const ComparabilityGraph& g) {
  const auto n = g.size();
  NormalizedAdjacency out;
  out.degree = g.degrees();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.adjacency().size());
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : g.neighbors(i)) {
      const double w = 1.0 / std::sqrt(static_cast<double>(out.degree[i]) * static_cast<double>(out.degree[j]));
      entries.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
    }
  }
  out.weights.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.weights.setFromTriplets(entries.begin(), entries.end());
  out.weights.makeCompressed();
  return out;
}

SimilarityMatrix::SimilarityMatrix(RealMatrix values, double damping)
    : values_(std::move(values)), damping_(damping) {
  if (values_.rows() != values_.cols()) throw std::invalid_argument("similarity matrix must be square");
}

SimilarityMatrix rwr_proximity(const NormalizedAdjacency& w, double damping, const RwrOptions& options) {
  if (!(damping >= 0.0 && damping < 1.0)) {
    throw std::invalid_argument(fmt::format("damping must lie in [0, 1) (got {})", damping));
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  RealMatrix q;
  if (options.solver == RwrSolver::dense) {
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - damping * Eigen::MatrixXd(w.weights);
    // I - pW is symmetric positive definite because the spectrum of W lies in [-1, 1].
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) throw Error("dense RWR factorization failed");
    q = (1.0 - damping) * llt.solve(Eigen::MatrixXd::Identity(n, n));
    // Exact entries are non-negative; clear round-off below zero.
    q = q.cwiseMax(0.0);
  } else {
    const auto stats = options.execution == Execution::serial
                           ? kernels::serial::rwr_fixed_point(w.weights, damping, options.tolerance,
                                                              options.max_iterations, q)
                           : kernels::omp::rwr_fixed_point(w.weights, damping, options.tolerance,
                                                           options.max_iterations, q);
    if (!stats.converged) {
      throw ConvergenceError(options.max_iterations, rwr_residual(w, SimilarityMatrix(q, damping)));
    }
  }
  return SimilarityMatrix(std::move(q), damping);
}

SimilarityMatrix adjacency_similarity(const ComparabilityGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  RealMatrix q = RealMatrix::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto deg = static_cast<double>(g.degree(i));
    for (auto j : g.neighbors(i)) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 / deg;
  }
  return SimilarityMatrix(std::move(q), 0.0);
}

double rwr_residual(const NormalizedAdjacency& w, const SimilarityMatrix& q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd qd = q.values();
  Eigen::MatrixXd r = qd - q.damping() * (w.weights * qd) - (1.0 - q.damping()) * Eigen::MatrixXd::Identity(n, n);
  return n == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

}  // namespace aim
