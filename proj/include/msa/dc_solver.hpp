#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "msa/dc_decomposition.hpp"
#include "msa/dc_problem.hpp"
#include "msa/errors.hpp"
#include "msa/simplex.hpp"

namespace msa {

struct SolverConfig {
    double eta = 1e-3;
    double eta_prime = 1e-4;
    std::size_t outer_max_iters = 100;
    double outer_tol = 1e-9;   // stop on relative gamma decrease below this
    std::size_t inner_max_iters = 2000;
    double inner_tol = 1e-10;
    double inner_step_scale = 1.0;  // multiplies the calibrated 1/sqrt(t) step
    std::size_t restarts = 0;       // extra runs from random interior starts
    std::uint64_t seed = 1;
    std::optional<std::vector<double>> z0;  // default: uniform
};

struct IterRecord {
    std::size_t iter = 0;
    double gamma = 0.0;
    std::vector<double> z;
    std::vector<double> losses;
    /* |Phi_t(z_t) - gamma_t|: the majorant must touch the objective. */
    double majorization_touch_error = 0.0;
    /* Phi_t(z_{t+1}) - gamma_{t+1}: the majorant must stay above. */
    double majorization_gap = 0.0;
};

struct SolveTrace {
    std::vector<IterRecord> iterations;
    std::size_t runs = 1;  // 1 + accepted restarts
};

enum class Certificate { global_plausible, local_only };

struct SolveResult {
    SimplexVector z_star = SimplexVector::uniform(1);
    double gamma_star = 0.0;
    std::vector<double> losses;
    Certificate certificate = Certificate::local_only;
    SolveTrace trace;
};

/* Raised when an evaluation fails mid-solve; carries the partial trace. */
class SolverFailure : public Error {
  public:
    SolverFailure(const std::string& msg, SolveTrace trace)
        : Error(msg), trace(std::move(trace)) {}
    SolveTrace trace;
};

/* One evaluation of a pointwise-max objective on the simplex: value plus a
 * subgradient (the gradient of the active piece). Line searches only need
 * values, so the two entry points are separate. */
struct MaxOracleValue {
    double value = 0.0;
    std::vector<double> subgradient;
};
struct MaxOracle {
    std::function<double(const std::vector<double>&)> value;
    std::function<MaxOracleValue(const std::vector<double>&)> value_and_subgradient;
};

struct SimplexMinResult {
    std::vector<double> z;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool improved = false;
};

/* Minimizes a convex pointwise-max function over the simplex.
 *
 * Driver: exponentiated-gradient mirror descent with step c / sqrt(t), c
 * calibrated from the first subgradient norm, annealed over epochs and with
 * best-iterate selection; followed by pairwise coordinate line searches
 * (golden section on the segment moving mass between two coordinates) to
 * polish the minimizer. Every candidate is accepted only if it improves the
 * best value, so the result never exceeds f(z0). */
SimplexMinResult minimize_max_on_simplex(const MaxOracle& oracle,
                                         std::vector<double> z0,
                                         std::size_t max_evals, double tol,
                                         double step_scale);

struct InnerResult {
    SimplexVector z;
    double phi_start = 0.0;
    double phi_end = 0.0;
    std::size_t evaluations = 0;
    bool stalled = false;  // no improving step found; z equals z_t
};

/* One outer step: approximately minimizes Phi_t over the simplex. Monotone
 * acceptance guarantees Phi_t(result) <= Phi_t(z_t). */
InnerResult inner_solve(const DcProblem& problem, const Linearization& lin,
                        const SimplexVector& z_t, const SolverConfig& config);

/* Full outer loop from z0 (plus optional random restarts), recording gamma,
 * the per-domain losses and the majorization checks at every iteration.
 * Stops when gamma <= 1e-12, on relative gamma decrease below outer_tol, or
 * when the inner step stalls. gamma is nonincreasing along the trace. */
SolveResult dca_solve(const DcProblem& problem, const SolverConfig& config);

struct FixedPointResult {
    SimplexVector z;
    double residual = 0.0;
    std::size_t iters = 0;
    bool converged = false;
};

/* Diagnostic iteration of the loss-reweighting map
 *     z_k <- (z_k L(D_k, h_z) + eta'/p) / (sum_j z_j L(D_j, h_z) + eta').
 * The map always has a fixed point but plain iteration need not converge;
 * the best iterate seen and its residual are returned either way. */
FixedPointResult fixed_point_iterate(const DcProblem& problem, const SimplexVector& z0,
                                     double eta_prime, std::size_t max_iters,
                                     double tol);

struct BalanceReport {
    std::vector<double> slacks;  // L(D_k, h_z) - sum_j z_j L(D_j, h_z)
    double max_slack = 0.0;
    double eta_prime = 0.0;
    bool pass = false;
};

/* Checks that no source loses more than the z-weighted average plus eta'. */
BalanceReport check_balance(const DcProblem& problem, const SimplexVector& z,
                            double eta_prime);

/* The near-zero test: the global optimum of the min-max problem is zero, so
 * a solution with gamma above the threshold is only known to be local. */
Certificate optimality_certificate(double gamma_star, double threshold);

const char* certificate_name(Certificate c);

}  // namespace msa
