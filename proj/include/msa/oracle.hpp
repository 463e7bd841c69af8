#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "msa/distribution.hpp"
#include "msa/simplex.hpp"

namespace msa {

/* Lattice over the simplex with the given step; 1/resolution must be a
 * whole number, and the enumerated size is C(1/res + p - 1, p - 1). */
struct GridSpec {
    std::size_t p = 2;
    double resolution = 1e-3;
};

inline constexpr std::size_t kMaxGridPoints = 10'000'000;

/* Number of lattice points, or throws GridTooLarge past the cap. */
std::size_t simplex_grid_size(const GridSpec& spec);

/* All lattice points in ascending lexicographic order of the weights. */
std::vector<SimplexVector> simplex_grid(const GridSpec& spec);

using SimplexFn = std::function<double(const SimplexVector&)>;

/* Exhaustive minimization over the lattice, tie-broken toward the
 * lexicographically smallest point. lipschitz_hat is the steepest observed
 * slope |df| / |dz| between adjacent lattice points, used to convert grid
 * resolution into a value margin. */
struct GridScan {
    SimplexVector z_best;
    double value = 0.0;
    double lipschitz_hat = 0.0;
    std::size_t points = 0;
};

GridScan brute_force_minmax(const SimplexFn& f, const GridSpec& spec);

/* Central difference of f at z along a zero-sum direction (e_i - e_j
 * scaled). Throws InfeasibleProbe when either endpoint leaves the simplex. */
double finite_diff_directional(const SimplexFn& f, const SimplexVector& z,
                               const std::vector<double>& direction, double step);

/* Randomized midpoint-convexity check; reports the worst signed violation
 * f((a+b)/2) - (f(a)+f(b))/2 observed across the trials. */
struct ConvexityReport {
    bool pass = false;
    double worst_violation = 0.0;
    std::size_t trials = 0;
};

ConvexityReport convexity_probe(const SimplexFn& f,
                                const std::function<SimplexVector()>& sampler,
                                std::size_t trials, double tol = 1e-10);

/* Numerical infimum of the order-alpha divergence from a target to the
 * mixture family of the sources, over a lambda lattice. Lattice points whose
 * mixture misses part of the target support are skipped. */
struct MixtureDivergence {
    SimplexVector lambda;
    double value = 0.0;
};

MixtureDivergence min_renyi_over_mixtures(
    const DiscreteJointDistribution& target,
    const std::vector<DiscreteJointDistribution>& sources, double alpha,
    double resolution);

}  // namespace msa
