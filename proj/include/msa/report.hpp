#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msa/dc_solver.hpp"
#include "msa/scenario.hpp"

namespace msa {

/* Everything one solve (and optionally one sweep) produced, in a form that
 * serializes to JSON and re-parses losslessly. Floats are emitted with 17
 * significant digits in JSON and 9 in CSV. Wall-clock timing is deliberately
 * not part of the serialized report so identical seeds give byte-identical
 * files; the CLI prints timing on standard error instead. */
struct RunReport {
    std::string scenario;
    std::string model;  // "R" or "P"
    std::uint64_t seed = 0;

    // config echo
    double eta = 0.0;
    double eta_prime = 0.0;
    std::size_t outer_max_iters = 0;
    double outer_tol = 0.0;
    std::size_t inner_max_iters = 0;
    double inner_tol = 0.0;
    std::size_t restarts = 0;
    std::string z0 = "uniform";

    std::vector<double> z_star;
    double gamma_star = 0.0;
    std::string certificate;

    std::vector<double> balance_slacks;
    double balance_max_slack = 0.0;
    bool balance_pass = false;

    double epsilon = 0.0;
    double M = 0.0;
    double delta = 0.0;               // 2 eta M
    double mixture_loss_bound = 0.0;  // epsilon + eta M + eta'

    std::vector<IterRecord> trace;
    std::optional<SweepTable> sweep;
};

RunReport make_report(const Scenario& scenario, const SolverConfig& config,
                      const SolveResult& result, const BalanceReport& balance);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

/* "iter,gamma,loss_1..loss_p" rows, one per outer iteration. */
std::string trace_to_csv(const std::vector<IterRecord>& trace);

/* "target,lambda,dw,unif,h_1..h_p,best_convex" rows plus the worst-case
 * row; lambda entries are ';'-joined. */
std::string sweep_to_csv(const SweepTable& table);

}  // namespace msa
