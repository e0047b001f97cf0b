#include "linkpred/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <tuple>

#include "linkpred/error.hpp"

namespace linkpred {

std::vector<RankedPair> rank_test_set(const ScoreMatrix& scores,
                                      const ObservationMask& observed) {
  const Index n = scores.size();
  if (observed.size() != n) {
    throw DomainError("score matrix has " + std::to_string(n) +
                      " nodes but the mask has " + std::to_string(observed.size()));
  }
  std::vector<RankedPair> ranked;
  for (Index i = 0; i < n; ++i) {
    for (Index j = scores.directed() ? 0 : i + 1; j < n; ++j) {
      if (i == j || observed.known(i, j)) continue;
      if (!std::isfinite(scores(i, j))) {
        throw DomainError("missing or non-finite score for test pair (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      ranked.push_back({i, j, scores(i, j)});
    }
  }
  if (ranked.empty()) throw DomainError("test set is empty (every entry is observed)");
  std::sort(ranked.begin(), ranked.end(), [](const RankedPair& a, const RankedPair& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  return ranked;
}

RocCurve roc(std::span<const RankedPair> ranked, const AdjacencyMatrix& truth) {
  double positives = 0.0;
  for (const auto& r : ranked) {
    if (r.i >= truth.size() || r.j >= truth.size()) {
      throw DomainError("ranked pair outside the truth network");
    }
    positives += truth(r.i, r.j);
  }
  const double negatives = static_cast<double>(ranked.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw DomainError("ROC undefined: test set has no true " +
                      std::string(positives == 0.0 ? "positives" : "negatives"));
  }
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (truth.has_edge(ranked[k].i, ranked[k].j)) {
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    const bool group_end =
        k + 1 == ranked.size() || ranked[k + 1].score != ranked[k].score;
    if (group_end) curve.points.push_back({fp / negatives, tp / positives});
  }
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return curve;
}

std::vector<double> fpr_grid(std::size_t points) {
  if (points < 2) throw DomainError("FPR grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

double interpolate_tpr(const RocCurve& curve, double fpr) {
  const auto& pts = curve.points;
  if (pts.empty()) throw DomainError("empty ROC curve");
  const auto upper = std::upper_bound(
      pts.begin(), pts.end(), fpr,
      [](double x, const RocPoint& p) { return x < p.fpr; });
  if (upper == pts.begin()) return pts.front().tpr;
  const auto& left = *(upper - 1);
  if (upper == pts.end() || left.fpr == fpr) return left.tpr;
  const auto& right = *upper;
  const double t = (fpr - left.fpr) / (right.fpr - left.fpr);
  return left.tpr + t * (right.tpr - left.tpr);
}

RocCurve average_curves(std::span<const RocCurve> curves,
                        std::span<const double> grid) {
  if (curves.empty()) throw DomainError("cannot average an empty list of curves");
  RocCurve mean;
  const double count = static_cast<double>(curves.size());
  for (const double x : grid) {
    double tpr = 0.0;
    for (const auto& c : curves) tpr += interpolate_tpr(c, x);
    mean.points.push_back({x, tpr / count});
  }
  for (const auto& c : curves) mean.auc += c.auc;
  mean.auc /= count;
  return mean;
}

void write_roc(const RocCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) {
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  }
  out << "# auc=" << format_double(curve.auc) << '\n';
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace linkpred
