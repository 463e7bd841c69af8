#include <cmath>

#include <doctest.h>

#include "msa/combiners.hpp"
#include "msa/dc_decomposition.hpp"
#include "msa/dc_problem.hpp"
#include "msa/errors.hpp"
#include "msa/oracle.hpp"
#include "msa/rng.hpp"
#include "msa/scenario.hpp"
#include "test_util.hpp"

using namespace msa;

namespace {

double loss_gap(const DcProblem& problem, std::size_t k, const SimplexVector& z) {
    const auto losses = problem.loss_vector(z);
    double avg = 0.0;
    for (std::size_t j = 0; j < problem.p(); ++j) avg += z[j] * losses[j];
    return losses[k] - avg;
}

}  // namespace

TEST_CASE("affine pair at a point") {
    // single source: K = D + eta U and J = K h
    const auto s = lower_bound_regression_instance();
    const auto solo = DcProblem::regression({s.sources[0]}, {s.reg_hypotheses[0]},
                                            s.labels, s.loss, 0.05);
    const auto marg = marginal_x(s.sources[0]);
    for (std::size_t x = 0; x < 2; ++x) {
        const auto [j, k] = solo.jz_kz(SimplexVector({1.0}), x);
        CHECK(k == doctest::Approx(marg[x] + 0.05 * 0.5).epsilon(1e-14));
        CHECK(j == doctest::Approx(k * s.reg_hypotheses[0].values[x]).epsilon(1e-14));
    }

    // J/K reproduces the combination rule at random points
    Rng rng(5);
    const auto sr = testutil::random_regression_instance(rng, 3, 6, 2);
    const auto problem = sr.make_problem(0.02);
    for (int trial = 0; trial < 100; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(3));
        const auto combo = dw_regression(z, 0.02, sr.sources, sr.reg_hypotheses);
        const std::size_t x = trial % 6;
        const auto [j, k] = problem.jz_kz(z, x);
        CHECK(j / k == doctest::Approx(combo.values[x]).epsilon(1e-12));
    }

    // equal sources make the ratio eta-independent
    const auto d = testutil::random_distribution(rng, 4, 2);
    RegressionHypothesis h1{{1.0, 2.0, 3.0, 4.0}};
    RegressionHypothesis h2{{0.0, 1.0, -1.0, 2.0}};
    for (const double eta : {1e-3, 0.1, 1.0}) {
        const auto prob =
            DcProblem::regression({d, d}, {h1, h2}, {0.0, 1.0}, {LossKind::squared, 40.0},
                                  eta);
        for (std::size_t x = 0; x < 4; ++x) {
            const auto [j, k] = prob.jz_kz(SimplexVector::uniform(2), x);
            CHECK(j / k ==
                  doctest::Approx(0.5 * (h1.values[x] + h2.values[x])).epsilon(1e-12));
        }
    }
}

TEST_CASE("squared-loss split") {
    const auto s = lower_bound_regression_instance();

    {  // single source: u and v coincide
        const auto solo = DcProblem::regression({s.sources[0]}, {s.reg_hypotheses[0]},
                                                s.labels, s.loss, 0.01);
        const auto [u, v] = uv_squared(solo, 0, SimplexVector({1.0}));
        CHECK(std::fabs(u - v) <= 1e-12);
    }

    Rng rng(17);
    const auto sr = testutil::random_regression_instance(rng, 3, 6, 3);
    const auto problem = sr.make_problem(1e-3);
    const DcDecomposition dec(problem);

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(3));
        const std::size_t k = trial % 3;
        const auto [u, v] = dec.uv(k, z);
        worst = std::max(worst, std::fabs((u - v) - loss_gap(problem, k, z)));
    }
    CHECK(worst <= 1e-10);

    // identity is insensitive to the conditional completion: probe the
    // disjoint-support construction as well
    const auto lower = s.make_problem(0.01);
    const DcDecomposition lower_dec(lower);
    for (int trial = 0; trial < 50; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(2));
        const std::size_t k = trial % 2;
        const auto [u, v] = lower_dec.uv(k, z);
        CHECK(std::fabs((u - v) - loss_gap(lower, k, z)) <= 1e-10);
    }
}

TEST_CASE("squared-loss halves are midpoint convex") {
    Rng rng(19);
    const auto sr = testutil::random_regression_instance(rng, 3, 6, 3);
    const auto problem = sr.make_problem(1e-3);
    const DcDecomposition dec(problem);
    Rng sample_rng(23);
    const auto sampler = [&] { return SimplexVector(sample_rng.dirichlet_flat(3)); };
    for (std::size_t k = 0; k < 3; ++k) {
        const auto cu = convexity_probe(
            [&](const SimplexVector& z) { return dec.uv(k, z).u; }, sampler, 200);
        const auto cv = convexity_probe(
            [&](const SimplexVector& z) { return dec.uv(k, z).v; }, sampler, 200);
        CHECK(cu.pass);
        CHECK(cv.pass);
    }
}

TEST_CASE("cross-entropy split") {
    Rng rng(29);
    const auto sp = testutil::random_probability_instance(rng, 3, 5, 3);

    {  // single source with full support: u and v coincide
        const auto solo = DcProblem::probability({sp.sources[0]}, {sp.prob_hypotheses[0]},
                                                 sp.loss, 0.01);
        const auto [u, v] = uv_crossentropy(solo, 0, SimplexVector({1.0}));
        CHECK(std::fabs(u - v) <= 1e-12);
    }

    const auto problem = sp.make_problem(1e-3);
    const DcDecomposition dec(problem);

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(3));
        const std::size_t k = trial % 3;
        const auto [u, v] = dec.uv(k, z);
        worst = std::max(worst, std::fabs((u - v) - loss_gap(problem, k, z)));
    }
    CHECK(worst <= 1e-10);

    // the entropic term of v equals the unnormalized relative entropy plus
    // the mass difference, recomputed independently
    for (int trial = 0; trial < 20; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(3));
        const std::size_t k = trial % 3;
        const double eta = problem.eta();
        const double u_cell = 1.0 / (5.0 * 3.0);

        long double first_term = 0.0L, bregman = 0.0L, mass_gap = 0.0L;
        long double log_k_term = 0.0L;
        for (std::size_t c = 0; c < problem.point_count(); ++c) {
            const auto [jz, kz] = problem.jz_kz(z, c);
            first_term += kz * std::log(kz / jz);
            bregman += kz * std::log(kz / jz) + (jz - kz);
            mass_gap += kz - jz;
            const double wk = sp.sources[k].probs()[c] + eta * u_cell;
            log_k_term += wk * std::log(kz);
        }
        CHECK(static_cast<double>(first_term) ==
              doctest::Approx(static_cast<double>(bregman + mass_gap)).epsilon(1e-12));
        const auto [u, v] = dec.uv(k, z);
        CHECK(v == doctest::Approx(static_cast<double>(first_term - log_k_term))
                       .epsilon(1e-10));
        (void)u;
    }
}

TEST_CASE("cross-entropy halves are midpoint convex") {
    Rng rng(31);
    const auto sp = testutil::random_probability_instance(rng, 3, 5, 3);
    const auto problem = sp.make_problem(1e-3);
    const DcDecomposition dec(problem);
    Rng sample_rng(37);
    const auto sampler = [&] { return SimplexVector(sample_rng.dirichlet_flat(3)); };
    for (std::size_t k = 0; k < 3; ++k) {
        const auto cu = convexity_probe(
            [&](const SimplexVector& z) { return dec.uv(k, z).u; }, sampler, 200);
        const auto cv = convexity_probe(
            [&](const SimplexVector& z) { return dec.uv(k, z).v; }, sampler, 200);
        CHECK(cu.pass);
        CHECK(cv.pass);
    }
}

TEST_CASE("a cell nobody scores is rejected") {
    // every hypothesis gives zero at cell (1, 1)
    std::vector<double> h(4, 0.5);
    h[3] = 0.0;
    const ProbabilityHypothesis hyp(2, 2, h);
    const auto d = DiscreteJointDistribution::uniform(2, 2);
    const auto problem =
        DcProblem::probability({d, d}, {hyp, hyp}, {LossKind::cross_entropy, 30.0}, 0.01);
    CHECK_THROWS_AS(uv_crossentropy(problem, 0, SimplexVector::uniform(2)), NonpositiveJz);
    CHECK_THROWS_AS(grad_v(problem, 0, SimplexVector::uniform(2)), NonpositiveJz);
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(43);

    {  // single source: the only feasible direction is zero
        const auto s = lower_bound_regression_instance();
        const auto solo = DcProblem::regression({s.sources[0]}, {s.reg_hypotheses[0]},
                                                s.labels, s.loss, 0.01);
        const auto g = grad_v(solo, 0, SimplexVector({1.0}));
        CHECK(g.size() == 1);
    }

    const auto check_model = [&](const DcProblem& problem) {
        const DcDecomposition dec(problem);
        const std::size_t p = problem.p();
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> raw = rng.dirichlet_flat(p);
            for (auto& w : raw) w = 0.05 + 0.9 * w;
            const SimplexVector z(raw);
            const std::size_t k = trial % p;
            const auto grad = dec.grad_v(k, z);
            const auto grad_u_vec = dec.grad_u(k, z);
            for (std::size_t i = 0; i + 1 < p; ++i) {
                std::vector<double> dir(p, 0.0);
                dir[i] = 1.0;
                dir[i + 1] = -1.0;
                const double an = grad[i] - grad[i + 1];
                const double fd = finite_diff_directional(
                    [&](const SimplexVector& q) { return dec.uv(k, q).v; }, z, dir,
                    1e-6);
                worst = std::max(worst, std::fabs(fd - an) /
                                            std::max({std::fabs(an), std::fabs(fd),
                                                      1e-8}));
                const double an_u = grad_u_vec[i] - grad_u_vec[i + 1];
                const double fd_u = finite_diff_directional(
                    [&](const SimplexVector& q) { return dec.uv(k, q).u; }, z, dir,
                    1e-6);
                worst = std::max(worst, std::fabs(fd_u - an_u) /
                                            std::max({std::fabs(an_u), std::fabs(fd_u),
                                                      1e-8}));
            }
        }
        return worst;
    };

    const auto sr = testutil::random_regression_instance(rng, 3, 6, 3);
    CHECK(check_model(sr.make_problem(1e-3)) <= 1e-5);
    const auto sp = testutil::random_probability_instance(rng, 3, 5, 3);
    CHECK(check_model(sp.make_problem(1e-3)) <= 1e-5);
}

TEST_CASE("gradient is equivariant under domain permutation") {
    Rng rng(47);
    const auto sp = testutil::random_probability_instance(rng, 3, 4, 3);
    const auto problem = sp.make_problem(1e-3);

    // rotate domains by one
    std::vector<DiscreteJointDistribution> rot_sources = {sp.sources[1], sp.sources[2],
                                                          sp.sources[0]};
    std::vector<ProbabilityHypothesis> rot_hyps = {sp.prob_hypotheses[1],
                                                   sp.prob_hypotheses[2],
                                                   sp.prob_hypotheses[0]};
    const auto rotated = DcProblem::probability(rot_sources, rot_hyps, sp.loss, 1e-3);

    const SimplexVector z({0.2, 0.3, 0.5});
    const SimplexVector z_rot({0.3, 0.5, 0.2});
    for (std::size_t k = 0; k < 3; ++k) {
        const auto g = grad_v(problem, k, z);
        const auto g_rot = grad_v(rotated, (k + 2) % 3, z_rot);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(g[i] == doctest::Approx(g_rot[(i + 2) % 3]).epsilon(1e-10));
    }
}

TEST_CASE("objective value") {
    const auto s = lower_bound_regression_instance();

    {  // single source
        const auto solo = DcProblem::regression({s.sources[0]}, {s.reg_hypotheses[0]},
                                                s.labels, s.loss, 0.01);
        const auto obj = solo.objective(SimplexVector({1.0}));
        CHECK(obj.gamma == 0.0);
        CHECK(obj.argmax_k == 0);
    }

    // symmetry balances the two domains
    const auto problem = s.make_problem(0.01);
    const auto obj = problem.objective(SimplexVector({0.5, 0.5}));
    CHECK(std::fabs(obj.gamma) <= 1e-15);

    // equal per-domain losses give zero and ties break low
    Rng rng(53);
    const auto d = testutil::random_distribution(rng, 3, 2);
    RegressionHypothesis h{{0.5, 0.5, 0.5}};
    const auto twin = DcProblem::regression({d, d}, {h, h}, {0.0, 1.0},
                                            {LossKind::squared, 4.0}, 0.05);
    const auto tied = twin.objective(SimplexVector({0.25, 0.75}));
    CHECK(std::fabs(tied.gamma) <= 1e-15);
    CHECK(tied.argmax_k == 0);

    // nonnegative over random weights
    const auto sp = testutil::random_probability_instance(rng, 3, 5, 3);
    const auto prob_p = sp.make_problem(1e-3);
    for (int trial = 0; trial < 50; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(3));
        CHECK(prob_p.objective(z).gamma >= -1e-12);
    }
}

TEST_CASE("majorant touches the objective at the expansion point") {
    Rng rng(59);
    const auto sr = testutil::random_regression_instance(rng, 2, 5, 2);
    const auto problem = sr.make_problem(1e-3);
    for (int trial = 0; trial < 20; ++trial) {
        const SimplexVector z(rng.dirichlet_flat(2));
        const auto lin = make_linearization(problem, z);
        CHECK(std::fabs(lin.phi_at_z_t - problem.objective(z).gamma) <= 1e-10);
        // and stays above the objective elsewhere
        const SimplexVector other(rng.dirichlet_flat(2));
        CHECK(phi_value(problem, lin, other).value >=
              problem.objective(other).gamma - 1e-10);
    }
}
