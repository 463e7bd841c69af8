#include "msa/dc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "msa/rng.hpp"

namespace msa {

namespace {

std::vector<double> normalized(std::vector<double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    for (auto& v : w) v /= total;
    return w;
}

/* Golden-section minimization of a unimodal f on [0, 1]. */
template <typename F>
std::pair<double, double> golden_min(F&& f, std::size_t iters, std::size_t& evals) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = 0.0, b = 1.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    evals += 2;
    for (std::size_t it = 0; it < iters; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

SimplexMinResult minimize_max_on_simplex(const MaxOracle& oracle,
                                         std::vector<double> z0,
                                         std::size_t max_evals, double tol,
                                         double step_scale) {
    const std::size_t p = z0.size();
    SimplexMinResult out;
    out.z = normalized(std::move(z0));
    out.value = oracle.value(out.z);
    out.evaluations = 1;
    if (p <= 1) return out;
    const double f0 = out.value;

    // Exponentiated-gradient phase. Starting from a nudged interior copy of
    // the incumbent so multiplicative updates can move every coordinate.
    std::vector<double> z(p);
    for (std::size_t i = 0; i < p; ++i)
        z[i] = (1.0 - 1e-9) * out.z[i] + 1e-9 / static_cast<double>(p);
    z = normalized(std::move(z));

    auto first = oracle.value_and_subgradient(z);
    ++out.evaluations;
    if (first.value < out.value) {
        out.value = first.value;
        out.z = z;
    }
    double gnorm = 0.0;
    for (double g : first.subgradient) gnorm = std::max(gnorm, std::fabs(g));

    if (std::isfinite(gnorm) && gnorm > 0.0) {
        double step_base = step_scale / gnorm;
        const double step_floor = step_base * 1e-14;
        const std::size_t eg_budget = max_evals / 2;
        std::vector<double> grad = first.subgradient;
        std::size_t t = 0;
        double epoch_best = out.value;
        const std::size_t chunk = 100;
        while (out.evaluations < eg_budget && step_base > step_floor) {
            for (std::size_t it = 0; it < chunk && out.evaluations < eg_budget; ++it) {
                ++t;
                const double s = step_base / std::sqrt(static_cast<double>(t));
                const double gmin = *std::min_element(grad.begin(), grad.end());
                double total = 0.0;
                for (std::size_t i = 0; i < p; ++i) {
                    z[i] = std::max(z[i], 1e-250) * std::exp(-s * (grad[i] - gmin));
                    total += z[i];
                }
                if (!(total > 0.0) || !std::isfinite(total)) {
                    z = out.z;  // walk degenerated; restart from the best point
                    break;
                }
                for (auto& v : z) v /= total;
                auto ev = oracle.value_and_subgradient(z);
                ++out.evaluations;
                grad = ev.subgradient;
                if (ev.value < out.value) {
                    out.value = ev.value;
                    out.z = z;
                }
            }
            if (epoch_best - out.value < tol * std::max(1.0, std::fabs(epoch_best))) {
                step_base *= 0.25;  // anneal and restart the walk from the best point
                z = out.z;
                t = 0;
            }
            epoch_best = out.value;
        }
    }

    // Pairwise mass-transfer polish: golden-section line searches between
    // coordinate pairs, accepted only on strict improvement.
    std::vector<double> cand(p);
    bool moved = true;
    std::size_t rounds = 0;
    while (moved && out.evaluations < max_evals && rounds < 40) {
        moved = false;
        ++rounds;
        for (std::size_t i = 0; i + 1 < p && out.evaluations < max_evals; ++i) {
            for (std::size_t j = i + 1; j < p && out.evaluations < max_evals; ++j) {
                const double mass = out.z[i] + out.z[j];
                if (mass <= 0.0) continue;
                cand = out.z;
                auto line = [&](double frac) {
                    cand[i] = frac * mass;
                    cand[j] = (1.0 - frac) * mass;
                    return oracle.value(cand);
                };
                const auto [frac, value] = golden_min(line, 64, out.evaluations);
                if (value < out.value) {
                    cand[i] = frac * mass;
                    cand[j] = (1.0 - frac) * mass;
                    out.z = normalized(cand);
                    out.value = value;
                    moved = true;
                }
            }
        }
    }

    out.improved = out.value < f0;
    if (!out.improved) out.value = f0;
    return out;
}

InnerResult inner_solve(const DcProblem& problem, const Linearization& lin,
                        const SimplexVector& z_t, const SolverConfig& config) {
    MaxOracle oracle;
    oracle.value = [&](const std::vector<double>& zraw) {
        return phi_value(problem, lin, SimplexVector(zraw)).value;
    };
    oracle.value_and_subgradient = [&](const std::vector<double>& zraw) {
        const SimplexVector z(zraw);
        const PhiValue pv = phi_value(problem, lin, z);
        auto g = grad_u(problem, pv.argmax_k, z);
        for (std::size_t i = 0; i < problem.p(); ++i)
            g[i] -= lin.grad_v_t[pv.argmax_k][i];
        return MaxOracleValue{pv.value, std::move(g)};
    };

    const auto res =
        minimize_max_on_simplex(oracle, z_t.weights(), config.inner_max_iters,
                                config.inner_tol, config.inner_step_scale);

    InnerResult out{z_t, lin.phi_at_z_t, lin.phi_at_z_t, res.evaluations, true};
    if (res.improved && res.value < lin.phi_at_z_t) {
        out.z = SimplexVector(res.z);
        out.phi_end = res.value;
        out.stalled = false;
    }
    return out;
}

namespace {

/* The exact majorant step can be very short when the convex bulk shared by
 * u_k and v_k is steep (its weight grows with M), so the outer loop also
 * tries longer candidates along the inner step direction plus a few
 * applications of the loss-reweighting map, and keeps whichever candidate
 * lowers the true objective the most. Candidates never replace the inner
 * step when they fail to improve on it, so the descent guarantee of the
 * majorant is preserved. */
void collect_candidates(const DcProblem& problem, const SolverConfig& config,
                        const SimplexVector& z_t, const SimplexVector& z_inner,
                        std::vector<SimplexVector>& out) {
    const std::size_t p = problem.p();
    out.clear();
    out.push_back(z_inner);

    // Geometric extrapolation along the inner step, capped at the simplex
    // boundary.
    std::vector<double> dir(p);
    double dir_norm = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        dir[i] = z_inner[i] - z_t[i];
        dir_norm = std::max(dir_norm, std::fabs(dir[i]));
    }
    if (dir_norm > 0.0) {
        double theta_max = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < p; ++i)
            if (dir[i] < 0.0) theta_max = std::min(theta_max, -z_t[i] / dir[i]);
        std::vector<double> cand(p);
        for (double theta = 2.0; theta <= 4096.0; theta *= 2.0) {
            const double step = std::min(theta, theta_max);
            bool valid = true;
            for (std::size_t i = 0; i < p; ++i) {
                cand[i] = z_t[i] + step * dir[i];
                if (cand[i] < 0.0) cand[i] = 0.0;
                valid = valid && cand[i] <= 1.0 + 1e-12;
            }
            if (valid) out.emplace_back(cand);
            if (step >= theta_max) break;
        }
    }

    // Loss-reweighting map applied 1, 4, 16 and 64 times.
    SimplexVector w = z_t;
    std::size_t applied = 0;
    for (const std::size_t stop : {1u, 4u, 16u, 64u}) {
        for (; applied < stop; ++applied) {
            const auto losses = problem.loss_vector(w);
            double denom = config.eta_prime;
            for (std::size_t k = 0; k < p; ++k) denom += w[k] * losses[k];
            std::vector<double> next(p);
            for (std::size_t k = 0; k < p; ++k)
                next[k] = (w[k] * losses[k] + config.eta_prime / static_cast<double>(p)) /
                          denom;
            w = SimplexVector(next);
        }
        out.push_back(w);
    }
}

SolveResult run_dca_once(const DcProblem& problem, const SolverConfig& config,
                         const SimplexVector& z0) {
    SolveResult result{z0, 0.0, {}, Certificate::local_only, {}};
    auto& trace = result.trace.iterations;

    SimplexVector z = z0;
    ObjectiveValue obj;

    try {
        obj = problem.objective(z);
        trace.push_back({0, obj.gamma, z.weights(), obj.losses, 0.0, 0.0});

        std::vector<SimplexVector> candidates;
        for (std::size_t t = 1;
             t <= config.outer_max_iters && obj.gamma > 1e-12; ++t) {
            const Linearization lin = make_linearization(problem, z);
            const double touch_error = std::fabs(lin.phi_at_z_t - obj.gamma);

            const InnerResult inner = inner_solve(problem, lin, z, config);

            collect_candidates(problem, config, z, inner.stalled ? z : inner.z,
                               candidates);
            SimplexVector best_z = z;
            ObjectiveValue best = obj;
            for (const auto& cand : candidates) {
                ObjectiveValue value;
                try {
                    value = problem.objective(cand);
                } catch (const Error&) {
                    continue;  // candidate left the evaluable region
                }
                if (value.gamma < best.gamma) {
                    best = value;
                    best_z = cand;
                }
            }
            if (best.gamma >= obj.gamma) break;  // no improving step anywhere

            const double maj_gap =
                phi_value(problem, lin, best_z).value - best.gamma;
            trace.push_back({t, best.gamma, best_z.weights(), best.losses,
                             touch_error, maj_gap});
            const double decrease = obj.gamma - best.gamma;
            z = best_z;
            obj = best;
            if (decrease < config.outer_tol * std::max(obj.gamma, 1e-300)) break;
        }
    } catch (const Error& e) {
        throw SolverFailure(std::string("solve failed: ") + e.what(),
                            std::move(result.trace));
    }

    result.z_star = z;
    result.gamma_star = obj.gamma;
    result.losses = obj.losses;
    result.certificate =
        optimality_certificate(obj.gamma, 1e-3 * problem.loss().M);
    return result;
}

}  // namespace

SolveResult dca_solve(const DcProblem& problem, const SolverConfig& config) {
    SimplexVector start = config.z0 ? SimplexVector(*config.z0)
                                    : SimplexVector::uniform(problem.p());
    if (start.size() != problem.p())
        throw ShapeMismatch("starting point length does not match source count");

    SolveResult best = run_dca_once(problem, config, start);
    best.trace.runs = 1;

    Rng rng(config.seed);
    for (std::size_t r = 0; r < config.restarts; ++r) {
        const SimplexVector z0(rng.dirichlet_flat(problem.p()));
        SolveResult candidate = run_dca_once(problem, config, z0);
        if (candidate.gamma_star < best.gamma_star) {
            const std::size_t runs = best.trace.runs;
            best = std::move(candidate);
            best.trace.runs = runs;
        }
        ++best.trace.runs;
    }
    return best;
}

FixedPointResult fixed_point_iterate(const DcProblem& problem, const SimplexVector& z0,
                                     double eta_prime, std::size_t max_iters,
                                     double tol) {
    if (!(eta_prime > 0.0))
        throw NonpositiveEta("fixed-point smoothing eta' must be positive");
    if (z0.size() != problem.p())
        throw ShapeMismatch("starting point length does not match source count");

    FixedPointResult out{z0, std::numeric_limits<double>::infinity(), 0, false};
    SimplexVector z = z0;
    const std::size_t p = problem.p();
    for (std::size_t it = 0; it < max_iters; ++it) {
        const auto losses = problem.loss_vector(z);
        double denom = eta_prime;
        for (std::size_t k = 0; k < p; ++k) denom += z[k] * losses[k];
        std::vector<double> next(p);
        double residual = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            next[k] = (z[k] * losses[k] + eta_prime / static_cast<double>(p)) / denom;
            residual = std::max(residual, std::fabs(next[k] - z[k]));
        }
        z = SimplexVector(next);
        out.iters = it + 1;
        if (residual < out.residual) {
            out.residual = residual;
            out.z = z;
        }
        if (residual <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

BalanceReport check_balance(const DcProblem& problem, const SimplexVector& z,
                            double eta_prime) {
    BalanceReport report;
    report.eta_prime = eta_prime;
    const auto losses = problem.loss_vector(z);
    long double avg = 0.0L;
    for (std::size_t k = 0; k < problem.p(); ++k) avg += z[k] * losses[k];
    report.slacks.resize(problem.p());
    report.max_slack = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < problem.p(); ++k) {
        report.slacks[k] = losses[k] - static_cast<double>(avg);
        report.max_slack = std::max(report.max_slack, report.slacks[k]);
    }
    report.pass = report.max_slack <= eta_prime;
    return report;
}

Certificate optimality_certificate(double gamma_star, double threshold) {
    if (gamma_star < -1e-12)
        throw InvalidArgument("objective value cannot be negative: " +
                              std::to_string(gamma_star));
    return gamma_star <= threshold ? Certificate::global_plausible
                                   : Certificate::local_only;
}

const char* certificate_name(Certificate c) {
    return c == Certificate::global_plausible ? "global_plausible" : "local_only";
}

}  // namespace msa
