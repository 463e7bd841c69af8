#pragma once

#include <vector>

#include "msa/distribution.hpp"

namespace msa {

/* Exponentiated Renyi divergence of order alpha > 1:
 *
 *     d_alpha(D || D') = [ sum_{x,y} D(x,y)^alpha / D'(x,y)^(alpha-1) ]^(1/(alpha-1))
 *
 * Evaluated in log space so large orders do not overflow. Zero-over-zero
 * cells contribute nothing; a cell with D > 0 and D' = 0 makes the
 * divergence infinite and throws SupportViolation. Equals 1 iff D = D',
 * is nondecreasing in alpha, and is bounded above by the sup ratio. */
double renyi_d_alpha(const DiscreteJointDistribution& d,
                     const DiscreteJointDistribution& dp, double alpha);

/* sup over the support of D of D(x,y)/D'(x,y); the alpha -> infinity limit
 * and an upper bound of renyi_d_alpha for every order. */
double renyi_sup_ratio(const DiscreteJointDistribution& d,
                       const DiscreteJointDistribution& dp);

/* Accuracy bound transferred to a target whose conditionals differ from the
 * sources':
 *
 *   eps_T = max_k [ E_{D_k(x)} d_alpha(D_T(.|x) || D_k(.|x))^(alpha-1) ]^(1/alpha)
 *           * eps^((alpha-1)/alpha) * M^(1/alpha)
 *
 * Inputs x with no target mass contribute a neutral divergence of 1.
 * Requires, for every k and every x with D_k(x) > 0, that the target
 * conditional is supported inside the source conditional. */
double epsilon_target(const DiscreteJointDistribution& target,
                      const std::vector<DiscreteJointDistribution>& sources,
                      double alpha, double epsilon, double M);

/* Right-hand side of the robustness guarantee for an arbitrary target:
 * [(eps + delta) * d_alpha]^((alpha-1)/alpha) * M^(1/alpha). */
double guarantee_bound(double epsilon, double delta, double d_alpha, double M,
                       double alpha);

/* Bundle of guarantee ingredients together with the computed bound. */
struct GuaranteeReport {
    double alpha = 2.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double M = 1.0;
    double d_alpha = 1.0;
    double bound_value = 0.0;
};

GuaranteeReport make_guarantee_report(double alpha, double epsilon, double delta,
                                      double d_alpha, double M);

}  // namespace msa
