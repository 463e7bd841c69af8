#pragma once

#include <cstddef>
#include <vector>

#include "msa/simplex.hpp"

namespace msa {

/* Exact probability table over a finite input-output product space,
 * dense row-major in double precision. Construction clamps entries in
 * [-1e-12, 0) to zero, accepts totals within 1e-9 of one, and renormalizes;
 * larger deviations are rejected. Immutable after construction. */
class DiscreteJointDistribution {
  public:
    DiscreteJointDistribution(std::size_t n_x, std::size_t n_y,
                              std::vector<double> probs);

    static DiscreteJointDistribution uniform(std::size_t n_x, std::size_t n_y);
    static DiscreteJointDistribution point_mass(std::size_t n_x, std::size_t n_y,
                                                std::size_t x, std::size_t y);

    std::size_t n_x() const { return n_x_; }
    std::size_t n_y() const { return n_y_; }
    std::size_t cells() const { return probs_.size(); }

    double at(std::size_t x, std::size_t y) const { return probs_[x * n_y_ + y]; }
    const std::vector<double>& probs() const { return probs_; }

    bool same_shape(const DiscreteJointDistribution& other) const {
        return n_x_ == other.n_x_ && n_y_ == other.n_y_;
    }

  private:
    std::size_t n_x_;
    std::size_t n_y_;
    std::vector<double> probs_;
};

/* Marginal over inputs: result[x] = sum_y D(x, y). */
std::vector<double> marginal_x(const DiscreteJointDistribution& d);

/* Conditional over outputs at input x; requires positive marginal mass.
 * Throws ZeroMarginal otherwise. */
SimplexVector conditional_y_given_x(const DiscreteJointDistribution& d,
                                    std::size_t x);

/* Convex mixture sum_k lambda_k D_k. All sources must share one shape. */
DiscreteJointDistribution mixture(const SimplexVector& lambda,
                                  const std::vector<DiscreteJointDistribution>& sources);

}  // namespace msa
