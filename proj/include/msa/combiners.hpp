#pragma once

#include <vector>

#include "msa/distribution.hpp"
#include "msa/predictors.hpp"
#include "msa/simplex.hpp"

namespace msa {

/* Distribution-weighted combination rules. Each input point mixes the
 * source predictors with weights proportional to z_k D_k + eta U / p, so the
 * per-point weights form a simplex and the denominator stays positive for
 * every eta > 0.
 *
 * dw_regression weighs by input marginals D_k(x); dw_probability weighs by
 * joint values D_k(x, y); dw_normalized renormalizes dw_probability over
 * outputs per input; dw_marginal applies marginal weights to already
 * normalized h_k(x, y) rows and is therefore normalized by construction. */

RegressionHypothesis dw_regression(const SimplexVector& z, double eta,
                                   const std::vector<DiscreteJointDistribution>& sources,
                                   const std::vector<RegressionHypothesis>& hs);

ProbabilityHypothesis dw_probability(const SimplexVector& z, double eta,
                                     const std::vector<DiscreteJointDistribution>& sources,
                                     const std::vector<ProbabilityHypothesis>& hs);

ProbabilityHypothesis dw_normalized(const SimplexVector& z, double eta,
                                    const std::vector<DiscreteJointDistribution>& sources,
                                    const std::vector<ProbabilityHypothesis>& hs);

ProbabilityHypothesis dw_marginal(const SimplexVector& z, double eta,
                                  const std::vector<DiscreteJointDistribution>& sources,
                                  const std::vector<ProbabilityHypothesis>& hs);

/* Per-point combination weights of the regression rule at input x; exposed
 * for tests and diagnostics. */
std::vector<double> dw_weights_at_x(const SimplexVector& z, double eta,
                                    const std::vector<DiscreteJointDistribution>& sources,
                                    std::size_t x);

}  // namespace msa
