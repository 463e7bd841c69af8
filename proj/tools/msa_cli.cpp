// Command-line front end: solve builtin or file scenarios for the robust
// mixture weight, sweep target mixtures, and run the independent numerical
// checks. Exit codes: 0 success, 2 validation failure, 3 solver error,
// 4 oracle check failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msa/dc_decomposition.hpp"
#include "msa/dc_solver.hpp"
#include "msa/errors.hpp"
#include "msa/oracle.hpp"
#include "msa/report.hpp"
#include "msa/rng.hpp"
#include "msa/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOracle = 4;

struct CommonFlags {
    std::string scenario;
    double eta = 1e-3;
    double eta_prime = 1e-4;
    std::string z0 = "uniform";
    std::size_t restarts = 0;
    std::size_t max_iters = 100;
    std::size_t inner_iters = 2000;
    double grid_res = 0.0;  // 0: pick by source count
    double lambda_res = 0.0;
    std::uint64_t seed = 1;
    std::size_t lower_p = 3;
    std::size_t samples = 0;  // 0: builder default
    std::string out = ".";
    std::string format = "summary";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("scenario", flags.scenario,
                    "builtin name (see list-scenarios) or scenario JSON path")
        ->required();
    cmd->add_option("--eta", flags.eta, "combination smoothing (default 1e-3)");
    cmd->add_option("--eta-prime", flags.eta_prime,
                    "balance slack / reweighting smoothing (default 1e-4)");
    cmd->add_option("--z0", flags.z0, "start weights: 'uniform' or comma list");
    cmd->add_option("--restarts", flags.restarts, "extra random starts");
    cmd->add_option("--max-iters", flags.max_iters, "outer iteration cap");
    cmd->add_option("--inner-iters", flags.inner_iters, "inner evaluation cap");
    cmd->add_option("--grid-res", flags.grid_res, "oracle grid resolution");
    cmd->add_option("--lambda-res", flags.lambda_res, "sweep lattice resolution");
    cmd->add_option("--seed", flags.seed, "generator seed");
    cmd->add_option("--p", flags.lower_p, "source count of lower-xent");
    cmd->add_option("--n", flags.samples, "sample size of the gaussian builders");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--format", flags.format, "stdout format: summary|json|csv")
        ->check(CLI::IsMember({"summary", "json", "csv"}));
}

msa::Scenario resolve_scenario(const CommonFlags& flags) {
    for (const auto& info : msa::builtin_scenarios())
        if (info.name == flags.scenario)
            return msa::make_builtin(flags.scenario, flags.seed, flags.lower_p,
                                     flags.samples);
    return msa::load_scenario(flags.scenario);
}

msa::SolverConfig solver_config(const CommonFlags& flags, std::size_t p) {
    msa::SolverConfig config;
    config.eta = flags.eta;
    config.eta_prime = flags.eta_prime;
    config.outer_max_iters = flags.max_iters;
    config.inner_max_iters = flags.inner_iters;
    config.restarts = flags.restarts;
    config.seed = flags.seed;
    if (flags.z0 != "uniform") {
        std::vector<double> z;
        std::stringstream ss(flags.z0);
        std::string item;
        while (std::getline(ss, item, ',')) z.push_back(std::stod(item));
        if (z.size() != p)
            throw msa::InvalidArgument("--z0 needs " + std::to_string(p) + " entries");
        config.z0 = std::move(z);
    }
    return config;
}

double default_grid_res(std::size_t p) {
    if (p <= 2) return 1e-3;
    if (p == 3) return 0.02;
    return 0.05;
}

double default_lambda_res(std::size_t p) { return p <= 3 ? 0.1 : 0.2; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw msa::InvalidArgument("cannot write " + path.string());
    out << content;
}

double wall_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

int cmd_solve(const CommonFlags& flags) {
    const auto start = std::chrono::steady_clock::now();
    const msa::Scenario scenario = resolve_scenario(flags);
    const msa::SolverConfig config = solver_config(flags, scenario.p());
    const msa::DcProblem problem = scenario.make_problem(flags.eta);

    msa::SolveResult result;
    try {
        result = msa::dca_solve(problem, config);
    } catch (const msa::SolverFailure& e) {
        std::cerr << "solver error: " << e.what() << " (partial trace: "
                  << e.trace.iterations.size() << " iterations)\n";
        return kExitSolver;
    }
    const auto balance = msa::check_balance(problem, result.z_star, flags.eta_prime);
    const msa::RunReport report = msa::make_report(scenario, config, result, balance);

    const std::string report_json = msa::report_to_json(report);
    const std::string trace_csv = msa::trace_to_csv(report.trace);

    const std::filesystem::path out_dir(flags.out);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "report.json", report_json);
    write_file(out_dir / "trace.csv", trace_csv);

    if (flags.format == "json") {
        std::cout << report_json;
    } else if (flags.format == "csv") {
        std::cout << trace_csv;
    } else {
        std::printf("scenario=%s gamma_star=%.17g certificate=%s balance=%s out=%s\n",
                    scenario.name.c_str(), result.gamma_star,
                    msa::certificate_name(result.certificate),
                    balance.pass ? "pass" : "fail", flags.out.c_str());
    }
    std::fprintf(stderr, "solve wall seconds: %.3f\n", wall_seconds(start));
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& z_source,
              const std::string& combiner_name) {
    const auto start = std::chrono::steady_clock::now();
    const msa::Scenario scenario = resolve_scenario(flags);
    const double lambda_res =
        flags.lambda_res > 0.0 ? flags.lambda_res : default_lambda_res(scenario.p());

    msa::CombinerKind combiner = msa::CombinerKind::probability;
    if (combiner_name == "normalized") combiner = msa::CombinerKind::normalized;
    if (combiner_name == "marginal") combiner = msa::CombinerKind::marginal;

    std::optional<msa::RunReport> report;
    msa::SimplexVector z = msa::SimplexVector::uniform(scenario.p());
    if (z_source == "solve") {
        const auto config = solver_config(flags, scenario.p());
        const auto problem = scenario.make_problem(flags.eta);
        msa::SolveResult result;
        try {
            result = msa::dca_solve(problem, config);
        } catch (const msa::SolverFailure& e) {
            std::cerr << "solver error: " << e.what() << "\n";
            return kExitSolver;
        }
        z = result.z_star;
        const auto balance = msa::check_balance(problem, z, flags.eta_prime);
        report = msa::make_report(scenario, config, result, balance);
    } else if (z_source == "uniform") {
        // keep uniform
    } else {
        std::ifstream in(z_source);
        if (!in) throw msa::InvalidArgument("cannot open weight source: " + z_source);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        const auto stored = msa::report_from_json(buffer.str());
        if (stored.z_star.size() != scenario.p())
            throw msa::InvalidArgument("stored weights do not match the scenario");
        z = msa::SimplexVector(stored.z_star);
    }

    const auto table = msa::robustness_sweep(scenario, z, flags.eta, lambda_res, combiner);
    const std::string sweep_csv = msa::sweep_to_csv(table);

    const std::filesystem::path out_dir(flags.out);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "sweep.csv", sweep_csv);
    if (report) {
        report->sweep = table;
        write_file(out_dir / "report.json", msa::report_to_json(*report));
        write_file(out_dir / "trace.csv", msa::trace_to_csv(report->trace));
    }

    if (flags.format == "csv" || flags.format == "json") {
        std::cout << sweep_csv;
    } else {
        std::printf("scenario=%s rows=%zu worst_dw=%.17g worst_unif=%.17g "
                    "worst_best_convex=%.17g out=%s\n",
                    scenario.name.c_str(), table.rows.size(), table.worst.dw,
                    table.worst.unif, table.worst.best_convex, flags.out.c_str());
    }
    std::fprintf(stderr, "sweep wall seconds: %.3f\n", wall_seconds(start));
    return kExitOk;
}

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

int cmd_oracle(const CommonFlags& flags, bool inject_grad_bug) {
    const msa::Scenario scenario = resolve_scenario(flags);
    const auto problem = scenario.make_problem(flags.eta);
    const msa::DcDecomposition dec(problem);
    const std::size_t p = scenario.p();
    std::vector<CheckLine> checks;
    msa::Rng rng(flags.seed);
    const auto sampler = [&] { return msa::SimplexVector(rng.dirichlet_flat(p)); };

    {  // u_k - v_k must reproduce the per-domain loss gap
        double worst = 0.0;
        for (std::size_t trial = 0; trial < 100; ++trial) {
            const auto z = sampler();
            const std::size_t k = trial % p;
            const auto [u, v] = dec.uv(k, z);
            const auto losses = problem.loss_vector(z);
            double avg = 0.0;
            for (std::size_t j = 0; j < p; ++j) avg += z[j] * losses[j];
            worst = std::max(worst, std::fabs((u - v) - (losses[k] - avg)));
        }
        char detail[64];
        std::snprintf(detail, sizeof(detail), "worst=%.3e tol=1e-10", worst);
        checks.push_back({"decomposition_identity", worst <= 1e-10, detail});
    }

    {  // analytic gradient of v against central differences
        double worst = 0.0;
        std::size_t probes = 0;
        for (std::size_t trial = 0; trial < 200 && probes < 50; ++trial) {
            std::vector<double> raw = rng.dirichlet_flat(p);
            for (auto& w : raw) w = 0.05 + 0.9 * w;  // keep probes interior
            msa::SimplexVector z(raw);
            const std::size_t k = trial % p;
            auto grad = dec.grad_v(k, z);
            if (inject_grad_bug)
                for (auto& g : grad) g *= 1.001;  // test hook
            if (p == 1) {
                ++probes;
                continue;
            }
            std::size_t bi = 0, bj = 1;
            double best = 0.0;
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = i + 1; j < p; ++j)
                    if (std::fabs(grad[i] - grad[j]) > best) {
                        best = std::fabs(grad[i] - grad[j]);
                        bi = i;
                        bj = j;
                    }
            std::vector<double> dir(p, 0.0);
            dir[bi] = 1.0;
            dir[bj] = -1.0;
            const double analytic = grad[bi] - grad[bj];
            const double fd = msa::finite_diff_directional(
                [&](const msa::SimplexVector& q) { return dec.uv(k, q).v; }, z, dir,
                1e-6);
            worst = std::max(worst, std::fabs(fd - analytic) /
                                        std::max({std::fabs(analytic), std::fabs(fd),
                                                  1e-8}));
            ++probes;
        }
        char detail[64];
        std::snprintf(detail, sizeof(detail), "worst_rel=%.3e tol=1e-5", worst);
        checks.push_back({"gradient_check", worst <= 1e-5, detail});
    }

    {  // midpoint convexity of both decomposition halves
        double worst_u = -1e300, worst_v = -1e300;
        for (std::size_t k = 0; k < p; ++k) {
            const auto cu = msa::convexity_probe(
                [&](const msa::SimplexVector& z) { return dec.uv(k, z).u; }, sampler,
                200);
            const auto cv = msa::convexity_probe(
                [&](const msa::SimplexVector& z) { return dec.uv(k, z).v; }, sampler,
                200);
            worst_u = std::max(worst_u, cu.worst_violation);
            worst_v = std::max(worst_v, cv.worst_violation);
        }
        char detail[64];
        std::snprintf(detail, sizeof(detail), "worst=%.3e tol=1e-10", worst_u);
        checks.push_back({"convexity_u", worst_u <= 1e-10, detail});
        std::snprintf(detail, sizeof(detail), "worst=%.3e tol=1e-10", worst_v);
        checks.push_back({"convexity_v", worst_v <= 1e-10, detail});
    }

    {  // majorant touches the objective at the expansion point
        double worst = 0.0;
        for (std::size_t trial = 0; trial < 20; ++trial) {
            const auto z = sampler();
            const auto lin = msa::make_linearization(problem, z);
            worst = std::max(worst,
                             std::fabs(lin.phi_at_z_t - problem.objective(z).gamma));
        }
        char detail[64];
        std::snprintf(detail, sizeof(detail), "worst=%.3e tol=1e-10", worst);
        checks.push_back({"majorization_touch", worst <= 1e-10, detail});
    }

    {  // solver against the exhaustive lattice
        const double res = flags.grid_res > 0.0 ? flags.grid_res : default_grid_res(p);
        const auto config = solver_config(flags, p);
        const auto result = msa::dca_solve(problem, config);
        const auto scan = msa::brute_force_minmax(
            [&](const msa::SimplexVector& z) { return problem.objective(z).gamma; },
            {p, res});
        const double margin =
            scan.lipschitz_hat * res * std::sqrt(static_cast<double>(p));
        const bool pass = result.gamma_star <= scan.value + 1e-9 &&
                          scan.value <= result.gamma_star + margin;
        char detail[128];
        std::snprintf(detail, sizeof(detail),
                      "gamma_dca=%.3e gamma_grid=%.3e margin=%.3e", result.gamma_star,
                      scan.value, margin);
        checks.push_back({"grid_equivalence", pass, detail});
    }

    if (scenario.name == "lower-reg" || scenario.name == "lower-xent") {
        // adversarial value of the best convex combination
        const std::size_t steps = p * (1000 / p);
        const double res = 1.0 / static_cast<double>(steps);
        const auto worst_convex = [&](const msa::SimplexVector& alpha) {
            double worst = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                const double loss =
                    scenario.model == msa::Model::regression
                        ? msa::expected_squared_loss(
                              scenario.sources[k],
                              msa::convex_combination(alpha, scenario.reg_hypotheses),
                              scenario.labels)
                        : msa::expected_cross_entropy(
                              scenario.sources[k],
                              msa::convex_combination(alpha, scenario.prob_hypotheses),
                              /*clipped=*/true);
                worst = std::max(worst, loss);
            }
            return worst;
        };
        const auto scan = msa::brute_force_minmax(worst_convex, {p, res});
        const double reference = scenario.model == msa::Model::regression
                                     ? 0.25
                                     : std::log(static_cast<double>(p));
        const bool pass = std::fabs(scan.value - reference) <= 1e-6;
        char detail[128];
        std::snprintf(detail, sizeof(detail), "minmax=%.9f reference=%.9f tol=1e-6",
                      scan.value, reference);
        checks.push_back({"convex_minmax", pass, detail});
    }

    bool all_pass = true;
    for (const auto& check : checks) {
        std::printf("%s %s (%s)\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                    check.detail.c_str());
        all_pass = all_pass && check.pass;
    }
    return all_pass ? kExitOk : kExitOracle;
}

int cmd_list() {
    for (const auto& info : msa::builtin_scenarios())
        std::printf("%-12s %s\n", info.name.c_str(), info.description.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust distribution-weighted combination of per-domain predictors"};
    app.require_subcommand(1);

    CommonFlags solve_flags, sweep_flags, oracle_flags;
    std::string z_source = "solve";
    std::string combiner = "probability";
    bool inject_grad_bug = false;

    auto* solve = app.add_subcommand("solve", "find the robust mixture weight");
    add_common_flags(solve, solve_flags);

    auto* sweep = app.add_subcommand("sweep", "loss table over target mixtures");
    add_common_flags(sweep, sweep_flags);
    sweep->add_option("--z", z_source, "weights: solve, uniform, or a report.json path");
    sweep->add_option("--combiner", combiner, "probability model combination rule")
        ->check(CLI::IsMember({"probability", "normalized", "marginal"}));

    auto* oracle = app.add_subcommand("oracle", "independent numerical checks");
    add_common_flags(oracle, oracle_flags);
    oracle->add_flag("--inject-grad-bug", inject_grad_bug, "fault-injection test hook")
        ->group("");

    auto* list = app.add_subcommand("list-scenarios", "builtin scenario catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_flags);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, z_source, combiner);
        if (oracle->parsed()) return cmd_oracle(oracle_flags, inject_grad_bug);
        if (list->parsed()) return cmd_list();
    } catch (const msa::SolverFailure& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const msa::Error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
