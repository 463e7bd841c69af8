#include <cmath>
#include <set>

#include <doctest.h>

#include "msa/combiners.hpp"
#include "msa/dc_solver.hpp"
#include "msa/errors.hpp"
#include "msa/gaussian.hpp"
#include "msa/oracle.hpp"
#include "msa/renyi.hpp"
#include "msa/rng.hpp"
#include "msa/scenario.hpp"
#include "test_util.hpp"

using namespace msa;

TEST_CASE("regression lower-bound instance") {
    const auto s = lower_bound_regression_instance();
    CHECK(s.model == Model::regression);
    CHECK(s.p() == 2);
    CHECK(s.loss.M == 1.0);
    CHECK(expected_squared_loss(s.sources[0], s.reg_hypotheses[0], s.labels) == 0.0);
    CHECK(expected_squared_loss(s.sources[1], s.reg_hypotheses[1], s.labels) == 0.0);

    // no convex combination beats 1/4 on the balanced target
    const auto target = mixture(SimplexVector({0.5, 0.5}), s.sources);
    const auto scan = brute_force_minmax(
        [&](const SimplexVector& alpha) {
            return expected_squared_loss(
                target, convex_combination(alpha, s.reg_hypotheses), s.labels);
        },
        {2, 1e-3});
    CHECK(scan.value == doctest::Approx(0.25).epsilon(1e-12));

    // the distribution-weighted rule drives it to zero
    const auto dw =
        dw_regression(SimplexVector({0.5, 0.5}), 0.01, s.sources, s.reg_hypotheses);
    CHECK(expected_squared_loss(target, dw, s.labels) <= 5e-5);
}

TEST_CASE("cross-entropy lower-bound instance") {
    for (const std::size_t p : {2ul, 3ul}) {
        const auto s = lower_bound_crossentropy_instance(p);
        CHECK(s.p() == p);
        for (const auto& h : s.prob_hypotheses) CHECK(h.per_x_normalized());

        const auto scan = brute_force_minmax(
            [&](const SimplexVector& alpha) {
                const auto g = convex_combination(alpha, s.prob_hypotheses);
                double worst = 0.0;
                for (const auto& d : s.sources)
                    worst = std::max(worst, expected_cross_entropy(d, g, true));
                return worst;
            },
            {p, 1.0 / static_cast<double>(4 * p)});
        CHECK(scan.value ==
              doctest::Approx(std::log(static_cast<double>(p))).epsilon(1e-9));

        const auto dw = dw_probability(SimplexVector::uniform(p), 0.01, s.sources,
                                       s.prob_hypotheses);
        for (const auto& d : s.sources)
            CHECK(expected_cross_entropy(d, dw) <= 0.05);
    }
    CHECK_THROWS_AS(lower_bound_crossentropy_instance(1), InvalidArgument);
}

TEST_CASE("gaussian regression scenario") {
    const auto s = gaussian_regression_scenario(5, 100);
    CHECK(s.model == Model::regression);
    CHECK(s.n_x == 200);
    CHECK(s.p() == 2);

    // gaussian support keeps every input reachable from both domains
    for (const auto& d : s.sources)
        for (const double m : marginal_x(d)) CHECK(m > 0.0);

    // least-squares optimality: each regressor beats the other linear fit on
    // its own training block (the pooled sample keeps domains in order)
    for (std::size_t k = 0; k < 2; ++k) {
        double own = 0.0, other = 0.0;
        for (std::size_t i = 100 * k; i < 100 * (k + 1); ++i) {
            own += squared_loss(s.reg_hypotheses[k].values[i], s.labels[i]);
            other += squared_loss(s.reg_hypotheses[1 - k].values[i], s.labels[i]);
        }
        CHECK(own <= other);
    }

    // identical seeds reproduce the scenario bit for bit
    const auto again = gaussian_regression_scenario(5, 100);
    CHECK(scenario_to_json(s) == scenario_to_json(again));
    const auto other_seed = gaussian_regression_scenario(6, 100);
    CHECK(scenario_to_json(s) != scenario_to_json(other_seed));

    CHECK_THROWS_AS(gaussian_regression_scenario(5, 10), InvalidArgument);
}

TEST_CASE("gaussian classification scenario") {
    const auto s = gaussian_classification_scenario(5, 50);
    CHECK(s.model == Model::probability);
    CHECK(s.p() == 3);
    CHECK(s.n_y == 3);
    CHECK(s.n_x == 450);

    for (const auto& h : s.prob_hypotheses) CHECK(h.per_x_normalized());
    for (const auto& d : s.sources)
        for (const double v : d.probs()) CHECK(v > 0.0);

    const auto again = gaussian_classification_scenario(5, 50);
    CHECK(scenario_to_json(s) == scenario_to_json(again));

    CHECK_THROWS_AS(gaussian_classification_scenario(5, 10), InvalidArgument);
}

TEST_CASE("builtin catalog") {
    const auto infos = builtin_scenarios();
    REQUIRE(infos.size() == 4);
    std::set<std::string> names;
    for (const auto& info : infos) names.insert(info.name);
    CHECK(names ==
          std::set<std::string>{"lower-reg", "lower-xent", "gauss-reg", "gauss-xent"});
    CHECK(make_builtin("lower-xent", 1, 4, 0).p() == 4);
    CHECK_THROWS_AS(make_builtin("nope", 1, 2, 0), InvalidArgument);
}

TEST_CASE("smoothed histograms") {
    const auto plain = smoothed_histogram_from_counts({2.0, 2.0}, 0.0);
    CHECK(plain.at(0, 0) == doctest::Approx(0.5));

    const auto smoothed = smoothed_histogram_from_counts({0.0, 4.0}, 1.0);
    CHECK(smoothed.at(0, 0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(smoothed.at(1, 0) == doctest::Approx(5.0 / 6).epsilon(1e-14));

    CHECK_THROWS_AS(smoothed_histogram_from_counts({}, 1.0), EmptySample);
    CHECK_THROWS_AS(smoothed_histogram_from_counts({0.0, 0.0}, 0.0), EmptySample);

    EmpiricalSample sample;
    sample.seed = 3;
    Rng rng(sample.seed);
    for (int i = 0; i < 200; ++i) sample.points.push_back({{rng.normal()}, 0.0});
    const auto hist = estimate_density_histogram(sample, 8, 0.5);
    CHECK(hist.n_x() == 8);
    for (const double cell : hist.probs()) CHECK(cell > 0.0);

    const auto unsmoothed = estimate_density_histogram(sample, 32, 0.0);
    double total = 0.0;
    for (const double cell : unsmoothed.probs()) total += cell;
    CHECK(total == doctest::Approx(1.0));

    // smoothing keeps the divergence to a full-support reference finite
    EmpiricalSample other;
    other.seed = 4;
    Rng rng2(other.seed);
    for (int i = 0; i < 200; ++i) other.points.push_back({{rng2.normal()}, 0.0});
    const auto reference = estimate_density_histogram(other, 8, 0.5);
    CHECK(std::isfinite(renyi_d_alpha(hist, reference, 2.0)));
    CHECK(renyi_d_alpha(hist, reference, 2.0) >= 1.0);

    CHECK_THROWS_AS(estimate_density_histogram({}, 8, 0.5), EmptySample);
}

TEST_CASE("kernel density estimate") {
    EmpiricalSample single;
    single.points.push_back({{1.5, -0.5}, 0.0});
    const auto bump = estimate_density_kde(single, 0.4);
    CHECK(bump.eval({1.5, -0.5}) ==
          doctest::Approx(1.0 / (2.0 * M_PI * 0.16)).epsilon(1e-12));
    CHECK(bump.eval({1.5, -0.5}) > bump.eval({8.0, -0.5}));  // ten bandwidths away

    // a standard normal target: the estimate integrates to one and improves
    // with more data
    const GaussianMixtureDensity truth(1, {{{0.0}, 1.0, 1.0}});
    const auto ise_for = [&](std::size_t n) {
        EmpiricalSample sample;
        Rng rng(11);
        for (std::size_t i = 0; i < n; ++i) sample.points.push_back({{rng.normal()}, 0.0});
        const auto kde = estimate_density_kde(sample, 0.25);
        double ise = 0.0, mass = 0.0;
        const double step = 0.01;
        for (double x = -6.0; x <= 6.0; x += step) {
            const double diff = kde.eval({x}) - truth.density({x});
            ise += diff * diff * step;
            mass += kde.eval({x}) * step;
        }
        CHECK(std::fabs(mass - 1.0) <= 0.01);
        return ise;
    };
    CHECK(ise_for(10000) < ise_for(100));

    // cross-validated bandwidth picks an interior candidate on clean data
    EmpiricalSample sample;
    Rng rng(13);
    for (int i = 0; i < 300; ++i) sample.points.push_back({{rng.normal()}, 0.0});
    const double bw = kde_cv_bandwidth(sample, {0.02, 0.1, 0.3, 0.8, 2.0});
    CHECK((bw == 0.1 || bw == 0.3 || bw == 0.8));
    CHECK(kde_cv_bandwidth(sample, {0.02, 0.1, 0.3, 0.8, 2.0}) == bw);

    CHECK_THROWS_AS(estimate_density_kde({}, 0.5), EmptySample);
    CHECK_THROWS_AS(estimate_density_kde(single, 0.0), InvalidArgument);
    CHECK_THROWS_AS(kde_cv_bandwidth(single, {0.5}), EmptySample);
}

TEST_CASE("robustness sweep") {
    const auto s = lower_bound_regression_instance();
    const auto table =
        robustness_sweep(s, SimplexVector::uniform(2), 0.01, 0.1);
    REQUIRE(table.header.size() == 7);
    CHECK(table.header[0] == "target");
    CHECK(table.header[6] == "best_convex");
    CHECK(table.rows.size() == 11);

    // vertex rows reproduce the single-domain losses exactly
    const auto dw = dw_regression(SimplexVector::uniform(2), 0.01, s.sources,
                                  s.reg_hypotheses);
    for (const auto& row : table.rows) {
        if (row.lambda == std::vector<double>{1.0, 0.0})
            CHECK(row.dw == expected_squared_loss(s.sources[0], dw, s.labels));
        if (row.lambda == std::vector<double>{0.0, 1.0})
            CHECK(row.dw == expected_squared_loss(s.sources[1], dw, s.labels));
    }

    CHECK(table.worst.best_convex == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(table.worst.dw <= 0.01);
    CHECK(table.worst.unif == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("balance transfers to every target mixture") {
    // after a solve, no lattice mixture loses more than the weighted average
    // plus the slack
    const double eta = 1e-3, eta_prime = 1e-4;
    const auto scenarios = {lower_bound_crossentropy_instance(3),
                            lower_bound_regression_instance(),
                            gaussian_classification_scenario(3, 50)};
    for (const auto& s : scenarios) {
        const auto problem = s.make_problem(eta);
        SolverConfig config;
        const auto res = dca_solve(problem, config);
        double weighted = 0.0;
        for (std::size_t k = 0; k < s.p(); ++k)
            weighted += res.z_star[k] * res.losses[k];

        const auto table = robustness_sweep(s, res.z_star, eta, 0.1);
        CHECK(table.worst.dw <= weighted + eta_prime + 1e-6);
        CHECK(table.worst.dw <= s.epsilon() + 2.0 * eta * s.loss.M + eta_prime + 1e-6);
    }
}

TEST_CASE("scenario files round trip") {
    Rng rng(3);
    for (const auto& s :
         {lower_bound_regression_instance(), lower_bound_crossentropy_instance(2),
          testutil::random_probability_instance(rng, 2, 3, 2)}) {
        const auto text = scenario_to_json(s);
        const auto back = scenario_from_json(text);
        CHECK(scenario_to_json(back) == text);
        CHECK(back.p() == s.p());
        CHECK(back.loss.M == s.loss.M);
    }

    CHECK_THROWS_AS(scenario_from_json("not json"), InvalidArgument);
    CHECK_THROWS_AS(scenario_from_json("{\"name\": \"x\"}"), InvalidArgument);

    // a declared bound below the observed losses is rejected
    auto s = lower_bound_regression_instance();
    s.loss.M = 0.5;
    CHECK_THROWS_AS(validate_scenario(s), InvalidArgument);

    CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), InvalidArgument);
}

TEST_CASE("point-mass constructions serialize exactly") {
    // the discrete lower-bound instances are already tables; writing and
    // reloading them changes nothing
    const auto s = lower_bound_crossentropy_instance(3);
    const auto back = scenario_from_json(scenario_to_json(s));
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back.sources[k].probs() == s.sources[k].probs());
        CHECK(back.prob_hypotheses[k].values() == s.prob_hypotheses[k].values());
    }
}
