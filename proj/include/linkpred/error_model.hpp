#pragma once

namespace linkpred {

/// Edge recording error model: a true edge is recorded with probability
/// alpha, a true non-edge with probability beta.
struct ErrorModel {
  double alpha = 1.0;
  double beta = 1.0;

  /// Throws DomainError unless both rates lie in [0, 1].
  ErrorModel(double alpha, double beta);

  /// alpha + beta > 1: observed probabilities rank pairs the same way as
  /// the true ones.
  bool informative() const noexcept { return alpha + beta > 1.0; }
};

/// Probability that an entry is observed as 1 given its true edge
/// probability: (alpha + beta - 1) p + (1 - beta).
double observed_probability(const ErrorModel& model, double p_true);

/// P(true edge | observed bit). The observed=1 branch is alpha p / P~ and
/// the observed=0 branch is (1 - alpha) p / (1 - P~). Throws DomainError
/// when the branch denominator vanishes.
double posterior_given_observed(const ErrorModel& model, double p_true,
                                bool observed);

}  // namespace linkpred
