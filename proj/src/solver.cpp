#include "linkpred/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "linkpred/error.hpp"
#include "solver_internal.hpp"

namespace linkpred {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda must be a finite nonnegative number");
  }
  if (q < 1) throw DomainError("q must be a positive integer");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_sweeps < 1) throw DomainError("max_sweeps must be at least 1");
  if (!(ridge >= 0.0)) throw DomainError("ridge must be nonnegative");
}

LossWeights LossWeights::full_sum(Index n) {
  const double nn = static_cast<double>(n);
  return {Matrix::Ones(n, n), 1.0 / (nn * nn)};
}

LossWeights LossWeights::partial_sum(const ObservationMask& mask, bool directed) {
  const double known = mask.count_known(directed);
  if (known <= 0.0) {
    throw DomainError("partial-sum criterion needs at least one observed entry");
  }
  return {mask.entries(), 1.0 / known};
}

LossWeights LossWeights::from_mask(Index n, const ObservationMask* mask,
                                   bool directed) {
  if (!mask) return full_sum(n);
  if (mask->size() != n) throw DomainError("mask size does not match network");
  return partial_sum(*mask, directed);
}

namespace {

void check_dimensions(Index n, const AdjacencyMatrix& a, const SimilarityMatrix& w,
                      const LossWeights& loss) {
  if (a.size() != n || w.size() != n || loss.weights.rows() != n ||
      loss.weights.cols() != n) {
    throw DomainError("dimension mismatch: scores " + std::to_string(n) +
                      ", adjacency " + std::to_string(a.size()) + ", similarity " +
                      std::to_string(w.size()) + ", loss weights " +
                      std::to_string(loss.weights.rows()));
  }
}

Matrix zero_diagonal(Matrix f) {
  f.diagonal().setZero();
  return f;
}

Matrix pair_degree(const Matrix& w) {
  const Eigen::VectorXd d = w.rowwise().sum();
  return d * d.transpose() - w * w;
}

}  // namespace

double objective_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                          const SimilarityMatrix& w, const LossWeights& loss,
                          double lambda, double ridge) {
  const Index n = f.size();
  check_dimensions(n, a, w, loss);
  const Matrix fz = zero_diagonal(f.entries());
  const Matrix resid = zero_diagonal(a.entries() - fz);
  const double loss_term =
      loss.scale * (loss.weights.array() * resid.array().square()).sum();
  double penalty = 0.0;
  if (lambda != 0.0) {
    const Matrix wd = w.to_dense();
    const Matrix k = pair_degree(wd);
    const double quad = (k.array() * fz.array().square()).sum();
    const double cross = (fz.array() * (wd * fz * wd).array()).sum();
    // Clamp tiny negative values produced by cancellation.
    const double raw = std::max(0.0, 2.0 * quad - 2.0 * cross);
    const double nn = static_cast<double>(n);
    penalty = lambda / (nn * nn * nn * nn) * raw;
  }
  const double nn = static_cast<double>(n);
  return loss_term + penalty + ridge / (nn * nn) * fz.squaredNorm();
}

double objective_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                          const SimilarityMatrix& w, const ObservationMask* mask,
                          double lambda) {
  return objective_directed(f, a, w,
                            LossWeights::from_mask(f.size(), mask, true), lambda);
}

Matrix gradient_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                         const SimilarityMatrix& w, const LossWeights& loss,
                         double lambda, double ridge) {
  const Index n = f.size();
  check_dimensions(n, a, w, loss);
  const double nn = static_cast<double>(n);
  const Matrix fz = zero_diagonal(f.entries());
  const Matrix wd = w.to_dense();
  Matrix g = 2.0 * loss.scale *
             (loss.weights.array() * (fz - a.entries()).array()).matrix();
  g += 4.0 * lambda / (nn * nn * nn * nn) *
       ((pair_degree(wd).array() * fz.array()).matrix() - wd * fz * wd);
  g += 2.0 * ridge / (nn * nn) * fz;
  return zero_diagonal(std::move(g));
}

namespace detail {

namespace {

Eigen::VectorXd solve_block(const Eigen::SparseMatrix<double>& h,
                            const Eigen::VectorXd& b) {
  if (h.rows() <= 256) {
    const Matrix dense(h);
    Eigen::LLT<Matrix> llt(dense);
    if (llt.info() == Eigen::Success) return llt.solve(b);
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("sparse factorization failed: system is singular");
  }
  Eigen::VectorXd x = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("sparse solve failed: system is singular");
  }
  return x;
}

}  // namespace

// The pair graph of a sparse W falls apart into many components; each is
// factored on its own.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& h,
                          const Eigen::VectorXd& b) {
  const Index dim = h.rows();
  std::vector<Index> parent(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) parent[k] = k;
  auto find = [&](Index k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  };
  for (Index col = 0; col < h.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
      const Index ra = find(it.row());
      const Index rb = find(col);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::vector<Index> component(static_cast<std::size_t>(dim));
  std::vector<Index> local(static_cast<std::size_t>(dim));
  std::vector<std::vector<Index>> members;
  std::vector<Index> root_slot(static_cast<std::size_t>(dim), -1);
  for (Index k = 0; k < dim; ++k) {
    const Index r = find(k);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<Index>(members.size());
      members.emplace_back();
    }
    component[k] = root_slot[r];
    local[k] = static_cast<Index>(members[component[k]].size());
    members[component[k]].push_back(k);
  }

  Eigen::VectorXd x(dim);
  if (members.size() == 1) {
    x = solve_block(h, b);
  } else {
    std::vector<std::vector<Eigen::Triplet<double>>> parts(members.size());
    for (Index col = 0; col < h.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
        parts[component[col]].emplace_back(local[it.row()], local[col], it.value());
      }
    }
    for (std::size_t c = 0; c < members.size(); ++c) {
      const auto& idx = members[c];
      const auto size = static_cast<Index>(idx.size());
      if (size == 1) {
        const double d = parts[c].empty() ? 0.0 : parts[c].front().value();
        if (!(d > 0.0)) throw NumericalError("system is singular (zero pivot)");
        x(idx[0]) = b(idx[0]) / d;
        continue;
      }
      Eigen::SparseMatrix<double> sub(size, size);
      sub.setFromTriplets(parts[c].begin(), parts[c].end());
      Eigen::VectorXd rhs(size);
      for (Index k = 0; k < size; ++k) rhs(k) = b(idx[k]);
      const Eigen::VectorXd sol = solve_block(sub, rhs);
      for (Index k = 0; k < size; ++k) x(idx[k]) = sol(k);
    }
  }
  if (!x.allFinite()) throw NumericalError("linear solve produced non-finite values");
  return x;
}

DirectedBcd::DirectedBcd(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                         const LossWeights& loss, double lambda, double ridge,
                         double tol)
    : a_(a), loss_(loss), w_(w.to_dense()), k_(pair_degree(w_)),
      lambda_(lambda), ridge_(ridge), tol_(tol) {}

double DirectedBcd::sweep(Matrix& f) {
  const Index n = f.rows();
  const double nn = static_cast<double>(n);
  const double n4 = nn * nn * nn * nn;
  const Index m = n - 1;
  f.diagonal().setZero();
  Matrix g = f * w_;  // row i' holds (W f_i'.)^T
  double max_change = 0.0;

  Matrix block(m, m);
  Eigen::VectorXd rhs(m);
  for (Index i = 0; i < n; ++i) {
    const double wii = w_(i, i);
    const Eigen::RowVectorXd coupled = w_.row(i) * g - wii * g.row(i);
    for (Index r = 0; r < m; ++r) {
      const Index j = r < i ? r : r + 1;
      for (Index c = 0; c < m; ++c) {
        const Index jp = c < i ? c : c + 1;
        block(r, c) = -2.0 * lambda_ * wii * w_(j, jp);
      }
      const double vw = n4 * loss_.scale * loss_.weights(i, j);
      block(r, r) += vw + ridge_ * nn * nn + 2.0 * lambda_ * k_(i, j);
      rhs(r) = vw * a_(i, j) + 2.0 * lambda_ * coupled(j);
    }

    Eigen::VectorXd row;
    if (m <= 2000) {
      Eigen::LLT<Matrix> llt(block);
      if (llt.info() == Eigen::Success) {
        row = llt.solve(rhs);
      } else {
        Eigen::LDLT<Matrix> ldlt(block);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
          throw NumericalError("block system for row " + std::to_string(i) +
                               " is singular");
        }
        row = ldlt.solve(rhs);
      }
    } else {
      Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper> cg(block);
      cg.setTolerance(tol_ / 10.0);
      Eigen::VectorXd guess(m);
      for (Index r = 0; r < m; ++r) guess(r) = f(i, r < i ? r : r + 1);
      row = cg.solveWithGuess(rhs, guess);
    }
    if (!row.allFinite()) {
      throw NumericalError("block system for row " + std::to_string(i) +
                           " produced non-finite values");
    }
    for (Index r = 0; r < m; ++r) {
      const Index j = r < i ? r : r + 1;
      max_change = std::max(max_change, std::abs(row(r) - f(i, j)));
      f(i, j) = row(r);
    }
    g.row(i) = f.row(i) * w_;
  }
  return max_change;
}

}  // namespace detail

ScoreMatrix bcd_sweep_directed(const ScoreMatrix& f, const AdjacencyMatrix& a,
                               const SimilarityMatrix& w, const LossWeights& loss,
                               double lambda, double ridge) {
  check_dimensions(f.size(), a, w, loss);
  detail::DirectedBcd bcd(a, w, loss, lambda, ridge, 1e-6);
  Matrix next = f.entries();
  bcd.sweep(next);
  return ScoreMatrix(std::move(next), true);
}

namespace {

SolveResult solve_directed_direct(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                                  const LossWeights& loss, const SolverConfig& config) {
  const Index n = a.size();
  const double nn = static_cast<double>(n);
  const double n4 = nn * nn * nn * nn;
  const Index dim = n * (n - 1);

  std::vector<std::vector<SimilarityMatrix::Entry>> nbrs(static_cast<std::size_t>(n));
  double pair_weights = 0.0;
  for (Index i = 0; i < n; ++i) {
    nbrs[i] = w.row_nonzeros(i);
    pair_weights += static_cast<double>(nbrs[i].size());
  }
  if (config.lambda != 0.0 &&
      pair_weights * pair_weights > static_cast<double>(kMaxPairWeights)) {
    throw DomainError(
        "direct solve would store too many pair weights; truncate W or use "
        "--method bcd");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd b(dim);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Index p = detail::directed_index(n, i, j);
      const double vw = n4 * loss.scale * loss.weights(i, j);
      double diag = vw + config.ridge * nn * nn;
      b(p) = vw * a(i, j);
      if (config.lambda != 0.0) {
        for (const auto& wi : nbrs[i]) {
          for (const auto& wj : nbrs[j]) {
            if (wi.col == wj.col) continue;
            if (wi.col == i && wj.col == j) continue;
            const double weight = 2.0 * config.lambda * wi.value * wj.value;
            diag += weight;
            triplets.emplace_back(p, detail::directed_index(n, wi.col, wj.col),
                                  -weight);
          }
        }
      }
      triplets.emplace_back(p, p, diag);
    }
  }
  Eigen::SparseMatrix<double> h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  triplets = {};
  const Eigen::VectorXd x = detail::solve_spd(h, b);

  Matrix f = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) f(i, j) = x(detail::directed_index(n, i, j));
    }
  }
  SolveResult result{ScoreMatrix(std::move(f), true), {}};
  result.report.objective =
      objective_directed(result.scores, a, w, loss, config.lambda);
  return result;
}

}  // namespace

SolveResult solve_directed(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                           const LossWeights& loss, const SolverConfig& config,
                           const ScoreMatrix* warm_start) {
  config.validate();
  const Index n = a.size();
  check_dimensions(n, a, w, loss);
  if (n < 2) throw DomainError("need at least two nodes");
  if (config.method == SolveMethod::direct) {
    return solve_directed_direct(a, w, loss, config);
  }
  Matrix f = warm_start ? warm_start->entries() : a.entries();
  if (f.rows() != n) throw DomainError("warm start has the wrong size");
  detail::DirectedBcd bcd(a, w, loss, config.lambda, config.ridge, config.tol);
  SolveReport report;
  report.converged = false;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    report.final_change = bcd.sweep(f);
    report.sweeps_used = sweep;
    if (report.final_change < config.tol) {
      report.converged = true;
      break;
    }
  }
  SolveResult result{ScoreMatrix(std::move(f), true), report};
  result.report.objective =
      objective_directed(result.scores, a, w, loss, config.lambda);
  return result;
}

SolveResult solve_directed(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                           const ObservationMask* mask, const SolverConfig& config) {
  if (!a.directed()) {
    throw DomainError("solve_directed expects a directed network");
  }
  return solve_directed(a, w, LossWeights::from_mask(a.size(), mask, true), config);
}

SolveResult solve(const AdjacencyMatrix& a, const SimilarityMatrix& w,
                  const LossWeights& loss, const SolverConfig& config,
                  const ScoreMatrix* warm_start) {
  return a.directed() ? solve_directed(a, w, loss, config, warm_start)
                      : solve_undirected(a, w, loss, config, warm_start);
}

double max_power_approx_error(double x, double y, int q) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw DomainError("max-power approximation needs x, y in [0, 1]");
  }
  if (q < 1) throw DomainError("q must be a positive integer");
  // The larger power cancels exactly, leaving the smaller one.
  return std::pow(std::min(x, y), q);
}

}  // namespace linkpred
