#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "linkpred/net.hpp"
#include "linkpred/scores.hpp"

namespace linkpred {

struct RankedPair {
  Index i = 0;
  Index j = 0;
  double score = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// ROC curve starting at (0, 0) plus its trapezoidal area.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Test pairs (E_ij = 0, off-diagonal, i < j when undirected) sorted by
/// descending score, ties by (i, j). Throws DomainError when empty.
std::vector<RankedPair> rank_test_set(const ScoreMatrix& scores,
                                      const ObservationMask& observed);

/// TPR/FPR sweep over the ranking. One point is emitted per cutoff k at
/// which the ranking is unambiguous, i.e. after every run of tied scores,
/// so a tie group contributes a diagonal segment and the area counts tied
/// positive/negative pairs as one half.
RocCurve roc(std::span<const RankedPair> ranked, const AdjacencyMatrix& truth);

/// Evenly spaced FPR grid on [0, 1].
std::vector<double> fpr_grid(std::size_t points = 1001);

/// TPR interpolated at `fpr` (the upper TPR on vertical segments).
double interpolate_tpr(const RocCurve& curve, double fpr);

/// Pointwise mean of TPR on a common FPR grid; AUC is the mean member AUC.
RocCurve average_curves(std::span<const RocCurve> curves,
                        std::span<const double> grid);

/// CSV "fpr,tpr" followed by "# auc=<value>".
void write_roc(const RocCurve& curve, const std::filesystem::path& path);

}  // namespace linkpred
