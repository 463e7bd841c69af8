#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "msa/distribution.hpp"
#include "msa/predictors.hpp"
#include "msa/simplex.hpp"

namespace msa {

enum class Model { regression, probability };

/* Value of the min-max objective at z:
 *     gamma = max_k L(D_k, h_z^eta) - sum_j z_j L(D_j, h_z^eta),
 * which is nonnegative since the max dominates the weighted average.
 * Ties break toward the smallest k. */
struct ObjectiveValue {
    double gamma = 0.0;
    std::size_t argmax_k = 0;
    std::vector<double> losses;
};

/* Immutable solve instance: sources, their predictors, the loss, and the
 * smoothing eta of the distribution-weighted combination. Construction
 * precomputes the per-point quantities every evaluation reuses.
 *
 * The combined hypothesis is evaluated through the affine pair
 * h_z = J_z / K_z, where for the regression model
 *     J_z(x) = sum_k (z_k D_k(x) + eta U(x)/p) h_k(x),
 *     K_z(x) = sum_k z_k D_k(x) + eta U(x),
 * and for the probability model the same expressions run over joint cells
 * (x, y). K_z is strictly positive for eta > 0.
 *
 * Regression-model decompositions need a conditional for each source at
 * inputs the source gives no mass; the completion falls back to the pooled
 * conditional of the uniform source mixture, and to the uniform output
 * distribution where no source has mass at all. The completion cancels in
 * u_k - v_k, so the decomposition identity is unaffected by the choice. */
class DcProblem {
  public:
    static DcProblem regression(std::vector<DiscreteJointDistribution> sources,
                                std::vector<RegressionHypothesis> hypotheses,
                                std::vector<double> labels, LossSpec loss,
                                double eta);

    static DcProblem probability(std::vector<DiscreteJointDistribution> sources,
                                 std::vector<ProbabilityHypothesis> hypotheses,
                                 LossSpec loss, double eta);

    Model model() const { return model_; }
    std::size_t p() const { return p_; }
    double eta() const { return eta_; }
    const LossSpec& loss() const { return loss_; }
    const std::vector<DiscreteJointDistribution>& sources() const { return sources_; }
    const std::vector<double>& labels() const { return labels_; }

    /* Points a decomposition sums over: inputs x for the regression model,
     * joint cells for the probability model. */
    std::size_t point_count() const { return point_count_; }

    /* (J_z, K_z) at one point; h_z = J/K there. */
    std::pair<double, double> jz_kz(const SimplexVector& z, std::size_t point) const;

    /* Expected loss of h_z^eta on each source. */
    std::vector<double> loss_vector(const SimplexVector& z) const;

    ObjectiveValue objective(const SimplexVector& z) const;

    /* Combined hypothesis tabulated at every point (diagnostics and the
     * consistency tests against the combination rules). */
    std::vector<double> combined_values(const SimplexVector& z) const;

    // Precomputed internals, exposed for the decomposition evaluators.
    struct Internals {
        double u_point = 0.0;                     // uniform mass per point
        std::vector<std::vector<double>> weight;  // weight[k][point]: D_k mass
        std::vector<std::vector<double>> hyp;     // hyp[k][point]
        // regression model only; all indexed [k][x]
        std::vector<std::vector<double>> first_moment;   // sum_y label D_k(x,y)
        std::vector<std::vector<double>> second_moment;  // sum_y label^2 D_k(x,y)
        std::vector<std::vector<double>> cond_mean;      // completed E[label | x]
        std::vector<std::vector<double>> cond_sq;        // completed E[label^2 | x]
    };
    const Internals& internals() const { return internals_; }

  private:
    DcProblem() = default;

    void check_z(const SimplexVector& z) const;

    Model model_ = Model::regression;
    std::size_t p_ = 0;
    double eta_ = 0.0;
    LossSpec loss_;
    std::size_t point_count_ = 0;
    std::vector<DiscreteJointDistribution> sources_;
    std::vector<RegressionHypothesis> reg_hypotheses_;
    std::vector<ProbabilityHypothesis> prob_hypotheses_;
    std::vector<double> labels_;
    Internals internals_;
};

}  // namespace msa
