#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace linkpred {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;

/// An (i, j) node pair.
struct NodePair {
  Index i = 0;
  Index j = 0;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Observed (or true) binary network. Diagonal is always zero and the
/// matrix is symmetric when undirected.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  /// Empty network on n nodes.
  AdjacencyMatrix(Index n, bool directed);
  /// Validates entries: binary, zero diagonal, symmetric when undirected.
  AdjacencyMatrix(Matrix entries, bool directed);

  Index size() const noexcept { return entries_.rows(); }
  bool directed() const noexcept { return directed_; }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  bool has_edge(Index i, Index j) const { return entries_(i, j) != 0.0; }

  /// Sets A_ij (and A_ji when undirected). Self-loops are rejected.
  void set_edge(Index i, Index j, bool present = true);

  /// Number of edges: ordered pairs when directed, unordered otherwise.
  std::size_t edge_count() const;
  std::vector<NodePair> edges() const;

  friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
    return a.directed_ == b.directed_ && a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
  bool directed_ = false;
};

/// E_ij = 1 marks entries whose observed value is known to be correct.
class ObservationMask {
 public:
  ObservationMask() = default;
  /// Mask on n nodes with every entry set to `value` (diagonal included).
  ObservationMask(Index n, bool value);
  explicit ObservationMask(Matrix entries);

  Index size() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  bool known(Index i, Index j) const { return entries_(i, j) != 0.0; }
  void set(Index i, Index j, bool value) { entries_(i, j) = value ? 1.0 : 0.0; }
  bool symmetric() const { return entries_ == entries_.transpose(); }

  /// Sum of off-diagonal entries (ordered pairs when directed, i<j otherwise).
  double count_known(bool directed) const;

 private:
  Matrix entries_;
};

/// n x p node covariates, one row per node.
class CovariateTable {
 public:
  CovariateTable() = default;
  explicit CovariateTable(Matrix values);

  Index size() const noexcept { return values_.rows(); }
  Index dimension() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  auto row(Index i) const { return values_.row(i); }

 private:
  Matrix values_;
};

struct EdgeListRead {
  AdjacencyMatrix adjacency;
  std::size_t self_loops_skipped = 0;
};

/// Reads whitespace separated "i j" lines; '#' starts a comment.
/// Throws IoError when unreadable, InputError on bad lines or indices.
EdgeListRead read_edge_list(const std::filesystem::path& path, Index n,
                            bool directed);

/// Largest node index mentioned in an edge list plus one (0 if empty).
Index infer_node_count(const std::filesystem::path& path);

/// Writes one "i j" line per edge (i<j only when undirected).
void write_edge_list(const AdjacencyMatrix& a, const std::filesystem::path& path);

/// Mask file: same format as an edge list, listing pairs with E_ij = 1.
/// Symmetrized when `symmetric` is set.
ObservationMask read_mask(const std::filesystem::path& path, Index n,
                          bool symmetric);
void write_mask(const ObservationMask& mask, bool directed,
                const std::filesystem::path& path);

/// CSV of n rows and p numeric columns.
CovariateTable read_covariates(const std::filesystem::path& path,
                               bool skip_header = false);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace linkpred
