#include "linkpred/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <tuple>

#include "linkpred/error.hpp"
#include "linkpred/eval.hpp"

namespace linkpred {

void CvPlan::validate() const {
  if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
  if (lambda_grid.empty()) throw DomainError("lambda grid is empty");
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] >= 0.0) || !std::isfinite(lambda_grid[k])) {
      throw DomainError("lambda grid values must be finite and nonnegative");
    }
    if (k > 0 && lambda_grid[k] < lambda_grid[k - 1]) {
      throw DomainError("lambda grid must be sorted ascending");
    }
  }
}

std::vector<double> default_lambda_grid(Index n) {
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) {
    grid.push_back(n2 * std::pow(10.0, -3.0 + 6.0 * k / 9.0));
  }
  return grid;
}

std::vector<NodePair> eligible_entries(const AdjacencyMatrix& a,
                                       const ObservationMask* mask) {
  const Index n = a.size();
  std::vector<NodePair> out;
  for (Index i = 0; i < n; ++i) {
    for (Index j = a.directed() ? 0 : i + 1; j < n; ++j) {
      if (i == j || (mask && !mask->known(i, j))) continue;
      out.push_back({i, j});
    }
  }
  return out;
}

std::vector<std::vector<NodePair>> assign_folds(const AdjacencyMatrix& a,
                                                const ObservationMask* mask,
                                                int folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
  auto entries = eligible_entries(a, mask);
  if (entries.size() < static_cast<std::size_t>(folds)) {
    throw DomainError("only " + std::to_string(entries.size()) +
                      " eligible entries for " + std::to_string(folds) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(entries.begin(), entries.end(), rng);
  std::vector<std::vector<NodePair>> out(static_cast<std::size_t>(folds));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    out[k % out.size()].push_back(entries[k]);
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

namespace {

LossWeights training_loss(const AdjacencyMatrix& a, const ObservationMask* mask,
                          const std::vector<NodePair>& held_out) {
  const Index n = a.size();
  LossWeights loss = LossWeights::from_mask(n, mask, a.directed());
  for (const auto& e : held_out) {
    loss.weights(e.i, e.j) = 0.0;
    if (!a.directed()) loss.weights(e.j, e.i) = 0.0;
  }
  if (mask) {
    const double known = ObservationMask(loss.weights).count_known(a.directed());
    if (known <= 0.0) throw DomainError("training fold has no observed entries");
    loss.scale = 1.0 / known;
  }
  return loss;
}

std::optional<double> held_out_score(const ScoreMatrix& f, const AdjacencyMatrix& a,
                                     const std::vector<NodePair>& held_out,
                                     CvScore score) {
  if (score == CvScore::sse) {
    double total = 0.0;
    for (const auto& e : held_out) {
      const double r = a(e.i, e.j) - f(e.i, e.j);
      total += r * r;
    }
    return total / static_cast<double>(held_out.size());
  }
  std::vector<RankedPair> ranked;
  double positives = 0.0;
  for (const auto& e : held_out) {
    ranked.push_back({e.i, e.j, f(e.i, e.j)});
    positives += a(e.i, e.j);
  }
  if (positives == 0.0 || positives == static_cast<double>(ranked.size())) {
    return std::nullopt;
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedPair& x, const RankedPair& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  return roc(ranked, a).auc;
}

}  // namespace

CvResult cross_validate(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                        const ObservationMask* mask, const CvPlan& plan,
                        const SolverConfig& config) {
  plan.validate();
  const auto folds = assign_folds(a, mask, plan.folds, plan.seed);
  const std::size_t grid_size = plan.lambda_grid.size();

  CvResult result;
  result.table.resize(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) result.table[g].lambda = plan.lambda_grid[g];

  for (const auto& held_out : folds) {
    const LossWeights loss = training_loss(a, mask, held_out);
    std::optional<ScoreMatrix> previous;
    std::optional<double> previous_score;
    for (std::size_t g = 0; g < grid_size; ++g) {
      std::optional<double> s;
      if (g > 0 && plan.lambda_grid[g] == plan.lambda_grid[g - 1]) {
        s = previous_score;
      } else {
        SolverConfig cfg = config;
        cfg.lambda = plan.lambda_grid[g];
        // Ascending grid: warm start BCD from the previous fit.
        auto fit = solve(a, w, loss, cfg, previous ? &*previous : nullptr);
        s = held_out_score(fit.scores, a, held_out, plan.score);
        previous = std::move(fit.scores);
      }
      previous_score = s;
      if (s) result.table[g].fold_scores.push_back(*s);
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid_size; ++g) {
    auto& row = result.table[g];
    if (row.fold_scores.empty()) {
      row.mean_score = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (const double s : row.fold_scores) sum += s;
    row.mean_score = sum / static_cast<double>(row.fold_scores.size());
    const bool better =
        !best || (plan.score == CvScore::sse
                      ? row.mean_score <= result.table[*best].mean_score
                      : row.mean_score >= result.table[*best].mean_score);
    if (better) best = g;
  }
  if (!best) {
    throw DomainError("AUC cross-validation undefined: no fold has both classes");
  }
  result.best_lambda = result.table[*best].lambda;
  return result;
}

}  // namespace linkpred
