#pragma once

#include <cstddef>
#include <vector>

#include "msa/distribution.hpp"
#include "msa/simplex.hpp"

namespace msa {

enum class LossKind { squared, cross_entropy };

/* Loss selector plus the uniform pointwise bound M. M must dominate the
 * pointwise loss of every source hypothesis on the points a solve touches;
 * scenario construction validates this eagerly. */
struct LossSpec {
    LossKind kind = LossKind::squared;
    double M = 1.0;
};

/* Real-valued predictor tabulated over the input set. */
struct RegressionHypothesis {
    std::vector<double> values;  // indexed by x

    std::size_t n_x() const { return values.size(); }
};

/* Scoring predictor over input-output pairs with entries in [0, 1].
 * per_x_normalized records that each input row sums to one, which the
 * normalized and marginal combination rules require. */
class ProbabilityHypothesis {
  public:
    ProbabilityHypothesis(std::size_t n_x, std::size_t n_y,
                          std::vector<double> values);

    std::size_t n_x() const { return n_x_; }
    std::size_t n_y() const { return n_y_; }
    double at(std::size_t x, std::size_t y) const { return values_[x * n_y_ + y]; }
    const std::vector<double>& values() const { return values_; }
    bool per_x_normalized() const { return per_x_normalized_; }

  private:
    std::size_t n_x_;
    std::size_t n_y_;
    std::vector<double> values_;
    bool per_x_normalized_;
};

/* Pointwise losses. Cross-entropy on a nonpositive score throws
 * NonpositiveProbability (the loss is infinite); the _clipped variant floors
 * the score at 1e-12 and is meant for reporting paths only. */
double squared_loss(double prediction, double label);
double cross_entropy_loss(double score);
double cross_entropy_loss_clipped(double score);

inline constexpr double kCrossEntropyFloor = 1e-12;

/* Expected losses under an exact table. The regression form maps output
 * indices to real labels through `labels` (length n_y). */
double expected_squared_loss(const DiscreteJointDistribution& d,
                             const RegressionHypothesis& h,
                             const std::vector<double>& labels);
double expected_cross_entropy(const DiscreteJointDistribution& d,
                              const ProbabilityHypothesis& h,
                              bool clipped = false);

/* Pointwise convex combinations sum_k alpha_k h_k. */
RegressionHypothesis convex_combination(const SimplexVector& alpha,
                                        const std::vector<RegressionHypothesis>& hs);
ProbabilityHypothesis convex_combination(const SimplexVector& alpha,
                                         const std::vector<ProbabilityHypothesis>& hs);

}  // namespace msa
