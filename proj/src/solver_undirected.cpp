#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "linkpred/error.hpp"
#include "linkpred/solver.hpp"
#include "solver_internal.hpp"

namespace linkpred {

double pair_similarity_undirected(const SimilarityMatrix& w, Index i, Index j,
                                  Index ip, Index jp, PairSimilarity variant) {
  if (i == j || ip == jp) {
    throw DomainError("pair similarity needs distinct endpoints within each pair");
  }
  const double straight = w(i, ip) * w(j, jp);
  const double crossed = w(i, jp) * w(j, ip);
  return variant == PairSimilarity::s1 ? straight + crossed
                                       : std::max(straight, crossed);
}

namespace {

void check_undirected_inputs(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                             const LossWeights& loss) {
  const Index n = a.size();
  if (w.size() != n || loss.weights.rows() != n || loss.weights.cols() != n) {
    throw DomainError("dimension mismatch: adjacency " + std::to_string(n) +
                      ", similarity " + std::to_string(w.size()) +
                      ", loss weights " + std::to_string(loss.weights.rows()));
  }
  if (a.directed()) throw DomainError("undirected criterion needs an undirected network");
  if (loss.weights != loss.weights.transpose()) {
    throw DomainError("undirected loss weights must be symmetric");
  }
}

// Calls visit(p, q, weight) for every pair of unordered pairs p != q with a
// nonzero pair similarity. Each q appears once per p, in ascending q order
// within a row. Throws when the number of weights exceeds `limit`.
template <typename Visit>
void for_each_pair_weight(const SimilarityMatrix& w, PairSimilarity variant,
                          std::size_t limit, Visit&& visit) {
  const Index n = w.size();
  const Index m = n * (n - 1) / 2;
  std::vector<std::vector<SimilarityMatrix::Entry>> nbrs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) nbrs[i] = w.row_nonzeros(i);

  std::vector<double> acc(static_cast<std::size_t>(m), 0.0);
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  std::vector<Index> touched;
  std::size_t emitted = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Index p = detail::undirected_index(n, i, j);
      for (const auto& wi : nbrs[i]) {
        for (const auto& wj : nbrs[j]) {
          if (wi.col == wj.col) continue;
          // (i', j') = (wi.col, wj.col) in either orientation.
          const Index lo = std::min(wi.col, wj.col);
          const Index hi = std::max(wi.col, wj.col);
          const Index q = detail::undirected_index(n, lo, hi);
          if (q == p) continue;
          const double prod = wi.value * wj.value;
          double& slot = acc[q];
          if (!seen[q]) {
            seen[q] = 1;
            touched.push_back(q);
          }
          slot = variant == PairSimilarity::s1 ? slot + prod : std::max(slot, prod);
        }
      }
      std::sort(touched.begin(), touched.end());
      emitted += touched.size();
      if (emitted > limit) {
        throw DomainError("undirected direct solve needs more than " +
                          std::to_string(limit) +
                          " pair weights; truncate W or use --method bcd");
      }
      for (const Index q : touched) {
        if (acc[q] > 0.0) visit(p, q, acc[q]);
        acc[q] = 0.0;
        seen[q] = 0;
      }
      touched.clear();
    }
  }
}

Eigen::VectorXd pack_upper(const Matrix& f) {
  const Index n = f.rows();
  Eigen::VectorXd x(n * (n - 1) / 2);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) x(detail::undirected_index(n, i, j)) = f(i, j);
  }
  return x;
}

double undirected_loss(const ScoreMatrix& f, const AdjacencyMatrix& a,
                       const LossWeights& loss) {
  const Index n = f.size();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double r = a(i, j) - f(i, j);
      total += loss.weights(i, j) * r * r;
    }
  }
  return loss.scale * total;
}

}  // namespace

double objective_undirected(const ScoreMatrix& f, const AdjacencyMatrix& a,
                            const SimilarityMatrix& w, const LossWeights& loss,
                            double lambda, PairSimilarity variant) {
  check_undirected_inputs(a, w, loss);
  if (f.size() != a.size()) throw DomainError("score matrix has the wrong size");
  const Index n = f.size();
  const double nn = static_cast<double>(n);
  double penalty = 0.0;
  if (lambda != 0.0) {
    const Eigen::VectorXd x = pack_upper(f.entries());
    for_each_pair_weight(w, variant, static_cast<std::size_t>(-1),
                         [&](Index p, Index q, double weight) {
                           const double d = x(p) - x(q);
                           penalty += weight * d * d;
                         });
  }
  return undirected_loss(f, a, loss) + lambda / (nn * nn * nn * nn) * penalty;
}

double objective_undirected_approx(const ScoreMatrix& f, const AdjacencyMatrix& a,
                                   const SimilarityMatrix& w, const LossWeights& loss,
                                   double lambda, int q) {
  check_undirected_inputs(a, w, loss);
  // Over symmetric f the i<j sums are half the ordered sums.
  const Matrix sym = 0.5 * (f.entries() + f.entries().transpose());
  return 0.5 * objective_directed(ScoreMatrix(sym, true), a, power(w, q), loss, lambda);
}

namespace {

SolveResult solve_undirected_direct(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                                    const LossWeights& loss, const SolverConfig& config) {
  const Index n = a.size();
  const double nn = static_cast<double>(n);
  const double n4 = nn * nn * nn * nn;
  const Index dim = n * (n - 1) / 2;

  Eigen::VectorXd diag(dim);
  Eigen::VectorXd b(dim);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Index p = detail::undirected_index(n, i, j);
      const double vw = n4 * loss.scale * loss.weights(i, j);
      diag(p) = vw + config.ridge * nn * nn;
      b(p) = vw * a(i, j);
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  if (config.lambda != 0.0) {
    for_each_pair_weight(w, PairSimilarity::s2, kMaxPairWeights,
                         [&](Index p, Index q, double weight) {
                           const double h = 2.0 * config.lambda * weight;
                           diag(p) += h;
                           triplets.emplace_back(p, q, -h);
                         });
  }
  for (Index p = 0; p < dim; ++p) triplets.emplace_back(p, p, diag(p));
  Eigen::SparseMatrix<double> h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  triplets = {};
  const Eigen::VectorXd x = detail::solve_spd(h, b);

  Matrix f = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      f(i, j) = f(j, i) = x(detail::undirected_index(n, i, j));
    }
  }
  SolveResult result{ScoreMatrix(std::move(f), false), {}};
  result.report.objective =
      objective_undirected(result.scores, a, w, loss, config.lambda);
  return result;
}

}  // namespace

SolveResult solve_undirected(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                             const LossWeights& loss, const SolverConfig& config,
                             const ScoreMatrix* warm_start) {
  config.validate();
  check_undirected_inputs(a, w, loss);
  const Index n = a.size();
  if (n < 2) throw DomainError("need at least two nodes");
  if (config.method == SolveMethod::direct) {
    return solve_undirected_direct(a, w, loss, config);
  }

  const SimilarityMatrix wq = power(w, config.q);
  Matrix f = warm_start ? warm_start->entries() : a.entries();
  if (f.rows() != n) throw DomainError("warm start has the wrong size");
  f = 0.5 * (f + f.transpose()).eval();
  detail::DirectedBcd bcd(a, wq, loss, config.lambda, config.ridge, config.tol);
  SolveReport report;
  report.converged = false;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const Matrix before = f;
    bcd.sweep(f);
    f = 0.5 * (f + f.transpose()).eval();
    report.final_change = (f - before).cwiseAbs().maxCoeff();
    report.sweeps_used = sweep;
    if (report.final_change < config.tol) {
      report.converged = true;
      break;
    }
  }
  SolveResult result{ScoreMatrix(std::move(f), false), report};
  result.report.objective =
      objective_undirected_approx(result.scores, a, w, loss, config.lambda, config.q);
  return result;
}

SolveResult solve_undirected(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                             const ObservationMask* mask, const SolverConfig& config) {
  if (a.directed()) throw DomainError("solve_undirected expects an undirected network");
  if (mask && !mask->symmetric()) {
    throw DomainError("undirected observation mask must be symmetric");
  }
  return solve_undirected(a, w, LossWeights::from_mask(a.size(), mask, false), config);
}

}  // namespace linkpred
