#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msa/dc_problem.hpp"
#include "msa/distribution.hpp"
#include "msa/gaussian.hpp"
#include "msa/predictors.hpp"
#include "msa/simplex.hpp"

namespace msa {

struct NamedTarget {
    std::string name;
    std::vector<double> lambda;
};

/* A complete solve instance: sources with their predictors, the loss
 * specification, named target mixtures and provenance notes. Continuous
 * constructions are reduced to weighted empirical tables over a pooled
 * sample before they land here, so the solver sees one uniform shape. */
struct Scenario {
    std::string name;
    Model model = Model::regression;
    LossSpec loss;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
    std::vector<double> labels;  // regression model; empty otherwise
    std::vector<DiscreteJointDistribution> sources;
    std::vector<RegressionHypothesis> reg_hypotheses;
    std::vector<ProbabilityHypothesis> prob_hypotheses;
    std::vector<NamedTarget> targets;
    std::string provenance;

    std::size_t p() const { return sources.size(); }

    DcProblem make_problem(double eta) const;

    /* Largest own-domain loss max_k L(D_k, h_k). */
    double epsilon() const;
};

/* Shape and bound checks; throws on any violation. Verifies in particular
 * that every pointwise source loss on the support is at most loss.M
 * (cross-entropy measured on the clipped reporting path). */
void validate_scenario(const Scenario& s);

/* ----- built-in constructions ----- */

/* Two point-mass regression domains on disjoint inputs with opposite
 * perfect predictors. Every convex combination suffers squared loss 1/4 on
 * the balanced mixture while the distribution-weighted rule drives the loss
 * to zero with eta. */
Scenario lower_bound_regression_instance();

/* p point-mass probability domains with indicator predictors on disjoint
 * supports; the best convex combination pays log(p) somewhere on the
 * mixture family. */
Scenario lower_bound_crossentropy_instance(std::size_t p);

/* Two overlapping uniform mixtures of three unit-variance planar Gaussians
 * (means on the four diagonal corners), labels x1^2 + x2^2, per-domain
 * linear least-squares predictors, densities evaluated analytically and
 * reduced over the pooled sample. The pooled sample keeps the per-domain
 * blocks in order: points [k*n, (k+1)*n) were drawn from domain k. */
Scenario gaussian_regression_scenario(std::uint64_t seed, std::size_t n_per_domain);

/* Three domains x three categories of isotropic Gaussians; category means
 * of consecutive domains related by a fixed random orthonormal map;
 * covariance magnitudes 0.05, 0.05, 0.3; per-domain softmax logistic
 * predictors trained by full-batch gradient descent. */
Scenario gaussian_classification_scenario(std::uint64_t seed,
                                          std::size_t n_per_category);

struct BuiltinInfo {
    std::string name;
    std::string description;
};
std::vector<BuiltinInfo> builtin_scenarios();

/* Builds a builtin by name ("lower-reg", "lower-xent", "gauss-reg",
 * "gauss-xent"); p sizes the cross-entropy lower-bound instance and n the
 * per-domain / per-category sample counts of the Gaussian ones. */
Scenario make_builtin(const std::string& name, std::uint64_t seed, std::size_t p,
                      std::size_t n);

/* ----- density estimation ----- */

struct EmpiricalSample {
    struct Point {
        std::vector<double> x;
        double y = 0.0;
    };
    std::vector<Point> points;
    int source_id = 0;
    std::uint64_t seed = 0;
};

/* Additive smoothing (count + eps) / (N + eps * cells); any eps > 0 yields
 * full support. */
DiscreteJointDistribution smoothed_histogram_from_counts(
    const std::vector<double>& counts, double smoothing);

/* Equal-width histogram over the sample's bounding box, bins per dimension,
 * then additive smoothing as above. The result is a distribution over cells
 * (n_y = 1). */
DiscreteJointDistribution estimate_density_histogram(const EmpiricalSample& sample,
                                                     std::size_t bins,
                                                     double smoothing);

/* Gaussian-kernel density estimate. */
class KdeDensity {
  public:
    KdeDensity(std::vector<std::vector<double>> points, double bandwidth);

    double eval(const std::vector<double>& x) const;
    double bandwidth() const { return bandwidth_; }
    std::size_t dims() const { return dims_; }

  private:
    std::vector<std::vector<double>> points_;
    double bandwidth_;
    std::size_t dims_;
};

KdeDensity estimate_density_kde(const EmpiricalSample& sample, double bandwidth);

/* Leave-one-out log-likelihood selection over a candidate bandwidth grid. */
double kde_cv_bandwidth(const EmpiricalSample& sample,
                        const std::vector<double>& candidates);

/* ----- robustness sweep ----- */

enum class CombinerKind { probability, normalized, marginal };

struct SweepRow {
    std::string target;
    std::vector<double> lambda;
    double dw = 0.0;
    double unif = 0.0;
    std::vector<double> per_source;
    double best_convex = 0.0;
};

/* Loss table over the lambda lattice: the distribution-weighted hypothesis,
 * the uniform predictor average, every single source predictor, and the
 * oracle convex combination g_lambda, plus a final column-wise worst row.
 * Cross-entropy baselines use the clipped reporting path so predictors with
 * zero scores produce finite numbers. */
struct SweepTable {
    std::vector<std::string> header;
    std::vector<SweepRow> rows;
    SweepRow worst;
};

SweepTable robustness_sweep(const Scenario& scenario, const SimplexVector& z,
                            double eta, double lambda_resolution,
                            CombinerKind combiner = CombinerKind::probability);

/* ----- scenario files (JSON) ----- */

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace msa
