#include "linkpred/error_model.hpp"

#include <string>

#include "linkpred/error.hpp"

namespace linkpred {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

ErrorModel::ErrorModel(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  require_probability(alpha, "alpha");
  require_probability(beta, "beta");
}

double observed_probability(const ErrorModel& model, double p_true) {
  require_probability(p_true, "true edge probability");
  return (model.alpha + model.beta - 1.0) * p_true + (1.0 - model.beta);
}

double posterior_given_observed(const ErrorModel& model, double p_true,
                                bool observed) {
  const double p_obs = observed_probability(model, p_true);
  if (observed) {
    if (p_obs <= 0.0) {
      throw DomainError("posterior for observed=1 undefined: P(A=1) is zero");
    }
    return model.alpha * p_true / p_obs;
  }
  if (p_obs >= 1.0) {
    throw DomainError("posterior for observed=0 undefined: P(A=0) is zero");
  }
  return (1.0 - model.alpha) * p_true / (1.0 - p_obs);
}

}  // namespace linkpred
