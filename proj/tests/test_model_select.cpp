#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "linkpred/error.hpp"
#include "linkpred/model_select.hpp"
#include "linkpred/simgen.hpp"
#include "oracles.hpp"

using namespace linkpred;

namespace {

SolverConfig direct_config() {
  SolverConfig c;
  c.method = SolveMethod::direct;
  return c;
}

}  // namespace

TEST(LambdaGrid, DefaultSpansSixDecades) {
  const auto g = default_lambda_grid(20);
  ASSERT_EQ(g.size(), 10u);
  EXPECT_NEAR(g.front(), 0.4, 1e-12);
  EXPECT_NEAR(g.back(), 4e5, 1e-6);
  for (std::size_t k = 1; k < g.size(); ++k) {
    EXPECT_NEAR(std::log10(g[k] / g[k - 1]), 6.0 / 9.0, 1e-12);
  }
}

TEST(CvPlan, Validation) {
  CvPlan p;
  p.lambda_grid = {0.0, 1.0};
  EXPECT_NO_THROW(p.validate());
  p.folds = 1;
  EXPECT_THROW(p.validate(), DomainError);
  p.folds = 5;
  p.lambda_grid = {};
  EXPECT_THROW(p.validate(), DomainError);
  p.lambda_grid = {2.0, 1.0};
  EXPECT_THROW(p.validate(), DomainError);
  p.lambda_grid = {-1.0};
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(Folds, PartitionEligibleEntries) {
  std::mt19937_64 rng(1);
  for (bool directed : {true, false}) {
    const AdjacencyMatrix a(oracle::random_adjacency(9, directed, 0.3, rng), directed);
    const ObservationMask e(oracle::random_mask(9, !directed, 0.7, rng));
    for (const ObservationMask* mask : {static_cast<const ObservationMask*>(nullptr), &e}) {
      const auto eligible = eligible_entries(a, mask);
      const auto folds = assign_folds(a, mask, 4, 7);
      ASSERT_EQ(folds.size(), 4u);
      std::set<NodePair> seen;
      std::size_t total = 0, smallest = eligible.size(), largest = 0;
      for (const auto& f : folds) {
        total += f.size();
        smallest = std::min(smallest, f.size());
        largest = std::max(largest, f.size());
        for (const auto& p : f) {
          EXPECT_TRUE(seen.insert(p).second);
          if (!directed) EXPECT_LT(p.i, p.j);
          if (mask) EXPECT_TRUE(mask->known(p.i, p.j));
        }
      }
      EXPECT_EQ(total, eligible.size());
      EXPECT_EQ(seen, std::set<NodePair>(eligible.begin(), eligible.end()));
      EXPECT_LE(largest - smallest, 1u);
      EXPECT_EQ(assign_folds(a, mask, 4, 7), folds);
    }
  }
}

TEST(Folds, TooFewEntries) {
  const AdjacencyMatrix a(2, false);
  EXPECT_THROW(assign_folds(a, nullptr, 5, 0), DomainError);
}

TEST(CrossValidate, SingleZeroCandidateMatchesRefit) {
  std::mt19937_64 rng(2);
  const AdjacencyMatrix a(oracle::random_adjacency(6, true, 0.4, rng), true);
  const SimilarityMatrix w(oracle::random_similarity(6, rng));
  const ObservationMask e(oracle::random_mask(6, false, 0.8, rng));
  CvPlan plan;
  plan.folds = 3;
  plan.lambda_grid = {0.0};
  plan.seed = 4;
  const auto cv = cross_validate(a, w, &e, plan, direct_config());
  EXPECT_EQ(cv.best_lambda, 0.0);
  ASSERT_EQ(cv.table.size(), 1u);

  const auto folds = assign_folds(a, &e, 3, 4);
  double mean = 0.0;
  for (const auto& held : folds) {
    Matrix v = e.entries();
    for (const auto& p : held) v(p.i, p.j) = 0.0;
    double known = 0.0;
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j)
        if (i != j) known += v(i, j);
    const Matrix f = oracle::directed_minimizer(a.entries(), w.to_dense(), v, 1.0 / known, 0.0,
                                                direct_config().ridge);
    double sse = 0.0;
    for (const auto& p : held) sse += std::pow(a(p.i, p.j) - f(p.i, p.j), 2);
    mean += sse / static_cast<double>(held.size()) / 3.0;
  }
  EXPECT_NEAR(cv.table[0].mean_score, mean, 1e-9);
  EXPECT_EQ(cv.table[0].fold_scores.size(), 3u);
}

TEST(CrossValidate, DuplicateGridValuesScoreIdentically) {
  std::mt19937_64 rng(3);
  const AdjacencyMatrix a(oracle::random_adjacency(7, false, 0.4, rng), false);
  const SimilarityMatrix w(oracle::random_similarity(7, rng));
  CvPlan plan;
  plan.lambda_grid = {4.9, 49.0, 49.0, 490.0};
  const auto cv = cross_validate(a, w, nullptr, plan, direct_config());
  EXPECT_EQ(cv.table[1].mean_score, cv.table[2].mean_score);
  EXPECT_EQ(cv.table[1].fold_scores, cv.table[2].fold_scores);
}

TEST(CrossValidate, TiesPreferLargerLambda) {
  // With W = I the penalty only couples a pair with itself, so every
  // lambda gives the same fit and the same score.
  std::mt19937_64 rng(4);
  const AdjacencyMatrix a(oracle::random_adjacency(6, true, 0.4, rng), true);
  CvPlan plan;
  plan.lambda_grid = {1.0, 10.0, 100.0};
  const auto cv = cross_validate(a, SimilarityMatrix::identity(6), nullptr, plan,
                                 direct_config());
  EXPECT_EQ(cv.table[0].mean_score, cv.table[2].mean_score);
  EXPECT_EQ(cv.best_lambda, 100.0);
}

TEST(CrossValidate, SelectedLambdaBeatsEndpointsOnSbm) {
  SimModel m;
  m.family = Family::sbm;
  m.n = 30;
  m.seed = 12;
  m.sbm = make_sbm(30, 2, 0.5, 0.1);
  const auto truth = generate_true(m);
  const auto w = block_indicator(m.sbm->labels);
  CvPlan plan;
  plan.lambda_grid = default_lambda_grid(30);
  plan.lambda_grid.insert(plan.lambda_grid.begin(), 0.0);
  plan.seed = 5;
  const auto cv = cross_validate(truth.a_true, w, nullptr, plan, direct_config());
  double best = 0.0;
  for (const auto& row : cv.table)
    if (row.lambda == cv.best_lambda) best = row.mean_score;
  EXPECT_LE(best, cv.table.front().mean_score);
  EXPECT_LE(best, cv.table.back().mean_score);
  // The block model is informative, so smoothing helps.
  EXPECT_GT(cv.best_lambda, 0.0);

  const auto again = cross_validate(truth.a_true, w, nullptr, plan, direct_config());
  EXPECT_EQ(again.best_lambda, cv.best_lambda);
}

TEST(CrossValidate, AucScore) {
  SimModel m;
  m.family = Family::sbm;
  m.n = 24;
  m.seed = 6;
  m.sbm = make_sbm(24, 2, 0.6, 0.05);
  const auto truth = generate_true(m);
  CvPlan plan;
  plan.score = CvScore::auc;
  plan.lambda_grid = {0.0, 576.0, 57600.0};
  const auto cv = cross_validate(truth.a_true, block_indicator(m.sbm->labels), nullptr, plan,
                                 direct_config());
  for (const auto& row : cv.table) {
    EXPECT_GE(row.mean_score, 0.0);
    EXPECT_LE(row.mean_score, 1.0);
  }
  EXPECT_GT(cv.best_lambda, 0.0);
}
