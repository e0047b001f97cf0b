#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "linkpred/net.hpp"

namespace linkpred {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric node similarity W with entries in [0, 1] and unit diagonal.
/// Stored densely or as a row-major sparse matrix; every accessor works on
/// either representation.
class SimilarityMatrix {
 public:
  struct Entry {
    Index col;
    double value;
  };

  SimilarityMatrix() = default;
  /// Validates symmetry, range and the unit diagonal.
  explicit SimilarityMatrix(Matrix dense);
  explicit SimilarityMatrix(SparseMatrix sparse);

  static SimilarityMatrix identity(Index n);

  Index size() const noexcept { return n_; }
  bool is_sparse() const noexcept { return sparse_.has_value(); }
  double operator()(Index i, Index j) const;

  /// Dense copy (or reference to the dense storage).
  Matrix to_dense() const;
  /// Nonzero entries of row i in ascending column order (diagonal included).
  std::vector<Entry> row_nonzeros(Index i) const;
  /// Number of nonzero off-diagonal entries (ordered pairs).
  std::size_t offdiag_nonzeros() const;

  /// Re-stores sparsely when at most `max_density` of the off-diagonal
  /// entries are nonzero; dense otherwise.
  SimilarityMatrix with_auto_storage(double max_density = 0.2) const;

 private:
  void validate() const;

  Index n_ = 0;
  std::optional<Matrix> dense_;
  std::optional<SparseMatrix> sparse_;
};

/// Exponential decay kernel exp(-||X_i - X_i'||^2 / sigma^2).
/// A missing sigma selects a quarter of the median pairwise distance over
/// unordered pairs i < i'.
SimilarityMatrix covariate_kernel(const CovariateTable& x,
                                  std::optional<double> sigma = std::nullopt);
double median_pairwise_distance(const CovariateTable& x);

/// Fraction of nodes k on which rows i and i' agree. Directed graphs
/// average the row (out) and column (in) agreement.
SimilarityMatrix fraction_match(const AdjacencyMatrix& a);

/// Jaccard index of neighborhoods. Directed graphs average the out- and
/// in-neighborhood indices. Two empty neighborhoods contribute 0.
SimilarityMatrix jaccard(const AdjacencyMatrix& a);

/// Zeroes entries below `threshold` (entries equal to it survive). The
/// diagonal is kept and storage switches to sparse when density allows.
SimilarityMatrix truncate(const SimilarityMatrix& w, double threshold);

/// Entrywise q-th power.
SimilarityMatrix power(const SimilarityMatrix& w, int q);

/// Oracle similarity for block models: W_ij = 1 iff labels match.
SimilarityMatrix block_indicator(const std::vector<int>& labels);

/// ".csv" paths hold a dense matrix; anything else holds "i j w" triplets
/// (one per unordered nonzero off-diagonal pair, diagonal implied 1).
SimilarityMatrix read_similarity(const std::filesystem::path& path, Index n);
void write_similarity(const SimilarityMatrix& w, const std::filesystem::path& path);

}  // namespace linkpred
