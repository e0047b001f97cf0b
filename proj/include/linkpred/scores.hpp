#pragma once

#include <filesystem>

#include "linkpred/net.hpp"

namespace linkpred {

/// Estimated observed-edge probabilities. The diagonal is not a parameter
/// and always reads 0; undirected scores are symmetric.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(Matrix entries, bool directed);

  Index size() const noexcept { return entries_.rows(); }
  bool directed() const noexcept { return directed_; }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
  bool directed_ = true;
};

/// CSV "i,j,score" sorted by descending score, ties by (i, j). Only pairs
/// with mask entry 1 are written when a mask is given; undirected scores
/// list i < j only.
void write_scores(const ScoreMatrix& scores, const ObservationMask* mask,
                  const std::filesystem::path& path);

/// Reads a score CSV (header optional). Unlisted pairs are NaN.
ScoreMatrix read_scores(const std::filesystem::path& path, Index n, bool directed);

}  // namespace linkpred
