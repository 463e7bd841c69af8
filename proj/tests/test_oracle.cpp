#include <cmath>

#include <doctest.h>

#include "msa/dc_solver.hpp"
#include "msa/errors.hpp"
#include "msa/oracle.hpp"
#include "msa/predictors.hpp"
#include "msa/renyi.hpp"
#include "msa/rng.hpp"
#include "msa/scenario.hpp"
#include "test_util.hpp"

using namespace msa;

TEST_CASE("simplex lattice enumeration") {
    const auto g2 = simplex_grid({2, 0.5});
    REQUIRE(g2.size() == 3);
    CHECK(g2[0].weights() == std::vector<double>{0.0, 1.0});
    CHECK(g2[1].weights() == std::vector<double>{0.5, 0.5});
    CHECK(g2[2].weights() == std::vector<double>{1.0, 0.0});

    const auto g1 = simplex_grid({1, 0.25});
    REQUIRE(g1.size() == 1);
    CHECK(g1[0][0] == 1.0);

    CHECK(simplex_grid({3, 0.5}).size() == 6);  // C(4, 2)
    CHECK(simplex_grid_size({3, 0.1}) == 66);   // C(12, 2)
    CHECK(simplex_grid_size({4, 0.2}) == 56);   // C(8, 3)

    CHECK_THROWS_AS(simplex_grid_size({4, 1e-3}), GridTooLarge);
    CHECK_THROWS_AS(simplex_grid_size({2, 0.3}), InvalidArgument);
    CHECK_THROWS_AS(simplex_grid_size({2, 0.0}), InvalidArgument);
}

TEST_CASE("exhaustive lattice minimization") {
    {  // constant function: the lexicographically smallest point wins
        const auto scan =
            brute_force_minmax([](const SimplexVector&) { return 1.0; }, {3, 0.5});
        CHECK(scan.z_best.weights() == std::vector<double>{0.0, 0.0, 1.0});
        CHECK(scan.value == 1.0);
        CHECK(scan.lipschitz_hat == 0.0);
        CHECK(scan.points == 6);
    }
    {  // quadratic distance to an off-lattice point
        const auto scan = brute_force_minmax(
            [](const SimplexVector& z) {
                const double a = z[0] - 0.32, b = z[1] - 0.68;
                return a * a + b * b;
            },
            {2, 0.01});
        CHECK(scan.z_best[0] == doctest::Approx(0.32).epsilon(1e-12));
    }
    {  // known adversarial value of convex combinations
        const auto s = lower_bound_regression_instance();
        const auto scan = brute_force_minmax(
            [&](const SimplexVector& alpha) {
                const auto g = convex_combination(alpha, s.reg_hypotheses);
                double worst = 0.0;
                for (const auto& d : s.sources)
                    worst = std::max(worst, expected_squared_loss(d, g, s.labels));
                return worst;
            },
            {2, 1e-3});
        CHECK(scan.value == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(scan.z_best[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    {  // cross-entropy counterpart at p = 3
        const auto s = lower_bound_crossentropy_instance(3);
        const auto scan = brute_force_minmax(
            [&](const SimplexVector& alpha) {
                const auto g = convex_combination(alpha, s.prob_hypotheses);
                double worst = 0.0;
                for (const auto& d : s.sources)
                    worst = std::max(worst, expected_cross_entropy(d, g, true));
                return worst;
            },
            {3, 1.0 / 9.0});
        CHECK(scan.value == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    }
}

TEST_CASE("observed slope of a linear functional matches its closed form") {
    // between lattice neighbors z -> z - res e_i + res e_j a linear map with
    // gradient g changes by res (g_j - g_i), so the steepest observed slope
    // is max |g_i - g_j| / sqrt(2)
    const std::vector<double> g = {3.0, -1.0, 0.5};
    const auto scan = brute_force_minmax(
        [&](const SimplexVector& z) {
            return g[0] * z[0] + g[1] * z[1] + g[2] * z[2];
        },
        {3, 0.1});
    double spread = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            spread = std::max(spread, std::fabs(g[i] - g[j]));
    CHECK(scan.lipschitz_hat ==
          doctest::Approx(spread / std::sqrt(2.0)).epsilon(1e-12));
    // and the minimum sits on the vertex of the smallest coefficient
    CHECK(scan.z_best.weights() == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(scan.value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("lattice margin brackets the solver on the lower-bound instance") {
    const auto problem = lower_bound_regression_instance().make_problem(0.01);
    SolverConfig config;
    config.eta = 0.01;
    config.z0 = std::vector<double>{0.8, 0.2};
    const auto res = dca_solve(problem, config);
    const auto scan = brute_force_minmax(
        [&](const SimplexVector& z) { return problem.objective(z).gamma; }, {2, 1e-3});
    CHECK(res.gamma_star <= scan.value + 1e-9);
    CHECK(scan.value <= res.gamma_star + scan.lipschitz_hat * 1e-3 * std::sqrt(2.0));
}

TEST_CASE("directional central differences") {
    const SimplexVector z({0.4, 0.6});
    CHECK(finite_diff_directional([](const SimplexVector&) { return 7.0; }, z,
                                  {1.0, -1.0}, 1e-4) == doctest::Approx(0.0));

    // linear functional: slope recovered exactly
    const auto linear = [](const SimplexVector& q) { return 3.0 * q[0] - 2.0 * q[1]; };
    CHECK(finite_diff_directional(linear, z, {1.0, -1.0}, 1e-4) ==
          doctest::Approx(5.0).epsilon(1e-10));

    CHECK_THROWS_AS(
        finite_diff_directional(linear, SimplexVector({1.0, 0.0}), {1.0, -1.0}, 1e-4),
        InfeasibleProbe);
    CHECK_THROWS_AS(finite_diff_directional(linear, z, {1.0, 0.0}, 1e-4),
                    InfeasibleProbe);
}

TEST_CASE("midpoint convexity probe") {
    Rng rng(7);
    const auto sampler = [&] { return SimplexVector(rng.dirichlet_flat(2)); };

    const auto affine = convexity_probe(
        [](const SimplexVector& z) { return 2.0 * z[0] - z[1] + 0.3; }, sampler, 100);
    CHECK(affine.pass);
    CHECK(affine.worst_violation <= 1e-12);

    const auto vee = convexity_probe(
        [](const SimplexVector& z) { return -std::min(z[0], z[1]); }, sampler, 100);
    CHECK(vee.pass);

    const auto cap = convexity_probe(
        [](const SimplexVector& z) { return std::min(z[0], z[1]); }, sampler, 100);
    CHECK_FALSE(cap.pass);
    CHECK(cap.worst_violation > 1e-3);

    CHECK_THROWS_AS(convexity_probe([](const SimplexVector&) { return 0.0; }, sampler, 0),
                    InvalidArgument);
}

TEST_CASE("divergence to the nearest lattice mixture") {
    Rng rng(9);
    const auto d1 = testutil::random_distribution(rng, 3, 2);
    const auto d2 = testutil::random_distribution(rng, 3, 2);
    const auto target = mixture(SimplexVector({0.3, 0.7}), {d1, d2});
    const auto best = min_renyi_over_mixtures(target, {d1, d2}, 2.0, 0.05);
    CHECK(best.value <= 1.0 + 1e-4);  // the target sits inside the family
    CHECK(std::fabs(best.lambda[0] - 0.3) <= 0.05 + 1e-12);

    // off-family target still gets a finite infimum
    const auto off = testutil::random_distribution(rng, 3, 2);
    const auto reached = min_renyi_over_mixtures(off, {d1, d2}, 2.0, 0.1);
    CHECK(reached.value >= 1.0 - 1e-12);
    CHECK(std::isfinite(reached.value));
}
