#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkpred/error_model.hpp"
#include "linkpred/net.hpp"

namespace linkpred {

/// Synthetic network families. a/b (and primes) are directed, c/d/sbm
/// undirected; primed families subtract a constant inside the logit.
enum class Family { a, a_prime, b, b_prime, c, c_prime, d, d_prime, sbm };

/// Accepts "a", "a'", "a_prime" (and so on) and "sbm".
Family parse_family(std::string_view name);
std::string to_string(Family family);
bool is_directed(Family family);

struct SbmParams {
  std::vector<int> labels;
  /// K x K symmetric block connection probabilities.
  Matrix block_probs;
};

/// Contiguous, near-equal blocks: node i gets label floor(i K / n).
SbmParams make_sbm(Index n, int blocks, double within, double between);

struct SimModel {
  Family family = Family::a;
  Index n = 100;
  int p = 5;
  std::uint64_t seed = 0;
  std::optional<SbmParams> sbm;

  void validate() const;
};

struct TrueNetwork {
  AdjacencyMatrix a_true;
  /// n x p covariates; n x 0 for sbm.
  CovariateTable x;
  /// Edge probabilities with a zero diagonal.
  Matrix p;
};

/// Logit of P_ij for covariate families given rows x_i and x_j.
double link_logit(Family family, const Eigen::RowVectorXd& xi,
                  const Eigen::RowVectorXd& xj);

/// Draws covariates X_i ~ N(0, I_p), edge probabilities and the true
/// network. Undirected families sample i < j and mirror.
TrueNetwork generate_true(const SimModel& model);

enum class ObserveMode {
  /// Each true edge kept with probability alpha, each non-edge kept with
  /// probability beta.
  general,
  /// E_ij ~ Bernoulli(alpha), A = E * A_true; E is returned.
  masked,
};

struct Observation {
  AdjacencyMatrix a;
  std::optional<ObservationMask> mask;
};

Observation observe(const AdjacencyMatrix& a_true, const ErrorModel& model,
                    std::uint64_t seed, ObserveMode mode);

/// Mean over `reps` replicates (seeds seed, seed+1, ...) of edges per node:
/// edge count / n for directed families, 2 * edge count / n otherwise.
double expected_degree(const SimModel& model, int reps);

}  // namespace linkpred
