#pragma once

#include <cstdint>
#include <vector>

#include "linkpred/net.hpp"
#include "linkpred/similarity.hpp"
#include "linkpred/solver.hpp"

namespace linkpred {

enum class CvScore { sse, auc };

struct CvPlan {
  int folds = 5;
  /// Ascending, nonnegative.
  std::vector<double> lambda_grid;
  CvScore score = CvScore::sse;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CvRow {
  double lambda = 0.0;
  /// Mean held-out squared error (sse) or mean held-out AUC (auc).
  double mean_score = 0.0;
  std::vector<double> fold_scores;
};

struct CvResult {
  double best_lambda = 0.0;
  std::vector<CvRow> table;
};

/// Ten values spaced logarithmically from 1e-3 n^2 to 1e3 n^2.
std::vector<double> default_lambda_grid(Index n);

/// Entries eligible for held-out scoring: every off-diagonal pair (i < j
/// when undirected), restricted to E_ij = 1 when a mask is given.
std::vector<NodePair> eligible_entries(const AdjacencyMatrix& a,
                                       const ObservationMask* mask);

/// Random partition of the eligible entries into `folds` groups.
std::vector<std::vector<NodePair>> assign_folds(const AdjacencyMatrix& a,
                                                const ObservationMask* mask,
                                                int folds, std::uint64_t seed);

/// K-fold cross-validation of lambda. Each fit drops the held-out entries
/// from the loss; the best mean score wins, ties going to the larger lambda.
CvResult cross_validate(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                        const ObservationMask* mask, const CvPlan& plan,
                        const SolverConfig& config);

}  // namespace linkpred
