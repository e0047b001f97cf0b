#include "linkpred/simgen.hpp"

#include <cmath>
#include <random>

#include "linkpred/error.hpp"

namespace linkpred {

namespace {

// Stream tags keep generation and observation draws independent for a seed.
constexpr std::uint64_t kTruthStream = 0x7472'7565;
constexpr std::uint64_t kObserveStream = 0x6f62'7376;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double inv_logit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

bool uses_norm(Family f) { return f == Family::b || f == Family::b_prime; }

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "a") return Family::a;
  if (name == "a'" || name == "a_prime" || name == "ap") return Family::a_prime;
  if (name == "b") return Family::b;
  if (name == "b'" || name == "b_prime" || name == "bp") return Family::b_prime;
  if (name == "c") return Family::c;
  if (name == "c'" || name == "c_prime" || name == "cp") return Family::c_prime;
  if (name == "d") return Family::d;
  if (name == "d'" || name == "d_prime" || name == "dp") return Family::d_prime;
  if (name == "sbm") return Family::sbm;
  throw DomainError("unknown model family '" + std::string(name) + "'");
}

std::string to_string(Family family) {
  switch (family) {
    case Family::a: return "a";
    case Family::a_prime: return "a'";
    case Family::b: return "b";
    case Family::b_prime: return "b'";
    case Family::c: return "c";
    case Family::c_prime: return "c'";
    case Family::d: return "d";
    case Family::d_prime: return "d'";
    case Family::sbm: return "sbm";
  }
  return "?";
}

bool is_directed(Family family) {
  switch (family) {
    case Family::a:
    case Family::a_prime:
    case Family::b:
    case Family::b_prime:
      return true;
    default:
      return false;
  }
}

SbmParams make_sbm(Index n, int blocks, double within, double between) {
  if (blocks < 1 || n < blocks) throw DomainError("need 1 <= blocks <= n");
  SbmParams params;
  for (Index i = 0; i < n; ++i) {
    params.labels.push_back(static_cast<int>(i * blocks / n));
  }
  params.block_probs = Matrix::Constant(blocks, blocks, between);
  params.block_probs.diagonal().setConstant(within);
  return params;
}

void SimModel::validate() const {
  if (n < 2) throw DomainError("simulation needs n >= 2");
  if (family == Family::sbm) {
    if (!sbm) throw DomainError("sbm family needs block parameters");
    const Matrix& s = sbm->block_probs;
    const auto k = s.rows();
    if (s.cols() != k || s != s.transpose()) {
      throw DomainError("block probability matrix must be square and symmetric");
    }
    if ((s.array() < 0.0).any() || (s.array() > 1.0).any()) {
      throw DomainError("block probabilities must lie in [0, 1]");
    }
    if (static_cast<Index>(sbm->labels.size()) != n) {
      throw DomainError("sbm needs one label per node");
    }
    for (const int c : sbm->labels) {
      if (c < 0 || c >= k) throw DomainError("sbm label outside [0, K)");
    }
  } else if (p < 1) {
    throw DomainError("covariate dimension must be positive");
  }
}

double link_logit(Family family, const Eigen::RowVectorXd& xi,
                  const Eigen::RowVectorXd& xj) {
  switch (family) {
    case Family::a: return xi.sum() - xj.sum();
    case Family::a_prime: return xi.sum() - xj.sum() - 8.0;
    case Family::b: return 2.0 * xi.dot(xj) / xj.norm();
    // The sparse variant is the dense one shifted by -6.
    case Family::b_prime: return 2.0 * xi.dot(xj) / xj.norm() - 6.0;
    case Family::c: return xi.sum() + xj.sum();
    case Family::c_prime: return xi.sum() + xj.sum() - 8.0;
    case Family::d: return xi.dot(xj);
    case Family::d_prime: return xi.dot(xj) - 6.0;
    case Family::sbm: break;
  }
  throw DomainError("sbm has no covariate link function");
}

TrueNetwork generate_true(const SimModel& model) {
  model.validate();
  const Index n = model.n;
  const bool directed = is_directed(model.family);
  auto rng = make_rng(model.seed, kTruthStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Matrix x;
  Matrix p = Matrix::Zero(n, n);
  if (model.family == Family::sbm) {
    x.resize(n, 0);
    const auto& labels = model.sbm->labels;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i != j) p(i, j) = model.sbm->block_probs(labels[i], labels[j]);
      }
    }
  } else {
    x.resize(n, model.p);
    for (Index i = 0; i < n; ++i) {
      do {
        for (Index k = 0; k < model.p; ++k) x(i, k) = normal(rng);
      } while (uses_norm(model.family) && x.row(i).norm() < 1e-8);
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i != j) p(i, j) = inv_logit(link_logit(model.family, x.row(i), x.row(j)));
      }
    }
  }

  AdjacencyMatrix a(n, directed);
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed ? 0 : i + 1; j < n; ++j) {
      if (i != j && unif(rng) < p(i, j)) a.set_edge(i, j);
    }
  }
  return {std::move(a), CovariateTable(std::move(x)), std::move(p)};
}

Observation observe(const AdjacencyMatrix& a_true, const ErrorModel& model,
                    std::uint64_t seed, ObserveMode mode) {
  const Index n = a_true.size();
  const bool directed = a_true.directed();
  auto rng = make_rng(seed, kObserveStream);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  AdjacencyMatrix a(n, directed);
  if (mode == ObserveMode::general) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = directed ? 0 : i + 1; j < n; ++j) {
        if (i == j) continue;
        const double u = unif(rng);
        const bool recorded = a_true.has_edge(i, j) ? (u < model.alpha) : (u >= model.beta);
        if (recorded) a.set_edge(i, j);
      }
    }
    return {std::move(a), std::nullopt};
  }
  ObservationMask mask(n, false);
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const bool known = unif(rng) < model.alpha;
      mask.set(i, j, known);
      if (!directed) mask.set(j, i, known);
      if (known && a_true.has_edge(i, j)) a.set_edge(i, j);
    }
  }
  return {std::move(a), std::move(mask)};
}

double expected_degree(const SimModel& model, int reps) {
  if (reps < 1) throw DomainError("need at least one replicate");
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    SimModel rep = model;
    rep.seed = model.seed + static_cast<std::uint64_t>(r);
    const auto truth = generate_true(rep);
    const double edges = static_cast<double>(truth.a_true.edge_count());
    const double per_node = edges / static_cast<double>(model.n);
    total += truth.a_true.directed() ? per_node : 2.0 * per_node;
  }
  return total / reps;
}

}  // namespace linkpred
