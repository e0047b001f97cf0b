#pragma once

#include <functional>

#include <Eigen/SparseCore>

#include "linkpred/solver.hpp"

namespace linkpred::detail {

/// Position of off-diagonal (i, j) in the n(n-1) directed parameter vector.
inline Index directed_index(Index n, Index i, Index j) {
  return i * (n - 1) + (j > i ? j - 1 : j);
}

/// Position of (i, j), i < j, in the n(n-1)/2 undirected parameter vector.
inline Index undirected_index(Index n, Index i, Index j) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// Solves the symmetric positive definite system H x = b.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& h,
                          const Eigen::VectorXd& b);

/// Row-block coordinate descent state for the directed criterion.
class DirectedBcd {
 public:
  DirectedBcd(const AdjacencyMatrix& a, const SimilarityMatrix& w,
              const LossWeights& loss, double lambda, double ridge, double tol);

  /// One ascending Gauss-Seidel pass; returns max |change|.
  double sweep(Matrix& f);

 private:
  const AdjacencyMatrix& a_;
  const LossWeights& loss_;
  Matrix w_;
  Matrix k_;  // K_ij = sum_{i' != j'} W_ii' W_jj'
  double lambda_;
  double ridge_;
  double tol_;
};

}  // namespace linkpred::detail
