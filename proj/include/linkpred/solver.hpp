#pragma once

#include <optional>

#include "linkpred/net.hpp"
#include "linkpred/scores.hpp"
#include "linkpred/similarity.hpp"

namespace linkpred {

enum class SolveMethod { direct, bcd };

struct SolverConfig {
  double lambda = 0.0;
  /// Exponent of the max-approximation used by the undirected BCD path.
  int q = 10;
  SolveMethod method = SolveMethod::direct;
  double tol = 1e-6;
  int max_sweeps = 500;
  /// Weight of ridge * ||f||^2 / n^2, added for a unique minimizer.
  double ridge = 1e-10;

  void validate() const;
};

struct SolveReport {
  int sweeps_used = 0;
  double final_change = 0.0;
  /// Criterion value at the returned scores, ridge term excluded.
  double objective = 0.0;
  bool converged = true;
};

struct SolveResult {
  ScoreMatrix scores;
  SolveReport report;
};

/// Loss term scale * sum V_ij (A_ij - f_ij)^2 over off-diagonal entries
/// (i < j for undirected criteria). `weights` must be symmetric for
/// undirected criteria.
struct LossWeights {
  Matrix weights;
  double scale = 1.0;

  /// Every entry counted, scaled by 1/n^2.
  static LossWeights full_sum(Index n);
  /// Entries with E_ij = 1, scaled by 1/sum E (off-diagonal, i < j when
  /// undirected). Throws DomainError when nothing is observed.
  static LossWeights partial_sum(const ObservationMask& mask, bool directed);
  static LossWeights from_mask(Index n, const ObservationMask* mask, bool directed);
};

// ---------------------------------------------------------------------------
// Directed criteria

/// Directed penalized least-squares criterion
///   scale * sum V (A - f)^2 + lambda/n^4 * sum W_ii' W_jj' (f_ij - f_i'j')^2
/// over i != j, i' != j'. `ridge` adds ridge * ||f||^2 / n^2.
double objective_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                          const SimilarityMatrix& w, const LossWeights& loss,
                          double lambda, double ridge = 0.0);
double objective_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                          const SimilarityMatrix& w, const ObservationMask* mask,
                          double lambda);

/// Analytic gradient of objective_directed with respect to the
/// off-diagonal entries (diagonal reported as 0).
Matrix gradient_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                         const SimilarityMatrix& w, const LossWeights& loss,
                         double lambda, double ridge = 0.0);

/// One Gauss-Seidel sweep of exact row-block minimization, rows in
/// ascending order, each row solved as a linear system.
ScoreMatrix bcd_sweep_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                               const SimilarityMatrix& w, const LossWeights& loss,
                               double lambda, double ridge = 1e-10);

/// Minimizes the directed criterion; mask present selects the partial sum.
SolveResult solve_directed(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                           const ObservationMask* mask, const SolverConfig& config);
SolveResult solve_directed(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                           const LossWeights& loss, const SolverConfig& config,
                           const ScoreMatrix* warm_start = nullptr);

// ---------------------------------------------------------------------------
// Undirected criteria

enum class PairSimilarity { s1, s2 };

/// Similarity of unordered pairs {i, j} and {i', j'}:
/// S1 = W_ii'W_jj' + W_ij'W_ji', S2 = max(W_ii'W_jj', W_ij'W_ji').
double pair_similarity_undirected(const SimilarityMatrix& w, Index i, Index j,
                                  Index ip, Index jp, PairSimilarity variant);

/// Exact undirected criterion with pair similarity S over i<j, i'<j'.
double objective_undirected(const ScoreMatrix& f, const AdjacencyMatrix& a,
                            const SimilarityMatrix& w, const LossWeights& loss,
                            double lambda, PairSimilarity variant = PairSimilarity::s2);

/// Approximate undirected criterion: the max in S2 replaced by the sum of
/// q-th powers of both products.
double objective_undirected_approx(const ScoreMatrix& f, const AdjacencyMatrix& a,
                                   const SimilarityMatrix& w, const LossWeights& loss,
                                   double lambda, int q);

/// direct: exact S2 criterion via a sparse linear solve over i<j pairs.
/// bcd: the q-power approximation, directed block updates on W^q with a
/// symmetrization after every sweep.
SolveResult solve_undirected(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                             const ObservationMask* mask, const SolverConfig& config);
SolveResult solve_undirected(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                             const LossWeights& loss, const SolverConfig& config,
                             const ScoreMatrix* warm_start = nullptr);

/// Dispatches on a.directed().
SolveResult solve(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                  const LossWeights& loss, const SolverConfig& config,
                  const ScoreMatrix* warm_start = nullptr);

/// (x^q + y^q) - max(x, y)^q, the error of replacing a max by a power sum.
double max_power_approx_error(double x, double y, int q);

/// Upper bound on stored pair weights for the undirected direct solve.
inline constexpr std::size_t kMaxPairWeights = 10'000'000;

}  // namespace linkpred
