#pragma once

#include <cstddef>
#include <vector>

#include "msa/dc_problem.hpp"
#include "msa/simplex.hpp"

namespace msa {

/* Difference-of-convex split of the per-domain constraint
 *     L(D_k, h_z^eta) - L(D_z, h_z^eta) = u_k(z) - v_k(z)
 * with u_k and v_k convex.
 *
 * Squared loss (regression model): with the completed source conditionals
 * C_k(.|x) and the per-input pair (J_z, K_z),
 *     u_k(z) = L(D_k + eta U C_k(.|x), h_z) - 2M sum_x (D_k + eta U)(x) log K_z(x)
 *     v_k(z) = L(D_z + eta U C_k(.|x), h_z) - 2M sum_x (D_k + eta U)(x) log K_z(x)
 * where the first measure weights (x, y) by D_k(x,y) + eta U(x) C_k(y|x) and
 * the second by D_z(x,y) + eta U(x) C_k(y|x). The eta-terms cancel in the
 * difference, which therefore equals the constraint exactly.
 *
 * Cross-entropy loss (probability model): over joint cells,
 *     u_k(z) = -sum_{x,y} [D_k + eta U] log J_z
 *     v_k(z) =  sum_{x,y} K_z log(K_z / J_z) - [D_k + eta U] log K_z.
 *
 * Convexity of u_k needs the pointwise squared loss of h_z bounded by M;
 * combinations stay inside the per-point envelope of the sources, so the
 * empirical maximum over source hypotheses suffices. */

struct DcTerms {
    double u = 0.0;
    double v = 0.0;
};

DcTerms uv_squared(const DcProblem& problem, std::size_t k, const SimplexVector& z);
DcTerms uv_crossentropy(const DcProblem& problem, std::size_t k, const SimplexVector& z);

std::vector<double> grad_u(const DcProblem& problem, std::size_t k, const SimplexVector& z);
std::vector<double> grad_v(const DcProblem& problem, std::size_t k, const SimplexVector& z);

/* Model-dispatching facade over the evaluators above. */
class DcDecomposition {
  public:
    explicit DcDecomposition(const DcProblem& problem) : problem_(&problem) {}

    DcTerms uv(std::size_t k, const SimplexVector& z) const;
    std::vector<double> u_values(const SimplexVector& z) const;
    std::vector<double> grad_u(std::size_t k, const SimplexVector& z) const;
    std::vector<double> grad_v(std::size_t k, const SimplexVector& z) const;

    const DcProblem& problem() const { return *problem_; }

  private:
    const DcProblem* problem_;
};

/* Snapshot of v_k and its gradients at the current outer iterate, defining
 * the convex majorant
 *     Phi_t(z) = max_k [ u_k(z) - v_k(z_t) - (z - z_t) . grad v_k(z_t) ].
 * Phi_t touches the objective at z_t and upper-bounds it everywhere, which
 * is what makes the outer iteration monotone. */
struct Linearization {
    SimplexVector z_t;
    std::vector<double> v_t;
    std::vector<std::vector<double>> grad_v_t;
    double phi_at_z_t = 0.0;
};

Linearization make_linearization(const DcProblem& problem, const SimplexVector& z_t);

struct PhiValue {
    double value = 0.0;
    std::size_t argmax_k = 0;
};

PhiValue phi_value(const DcProblem& problem, const Linearization& lin,
                   const SimplexVector& z);

/* Subgradient of Phi_t at z: grad u_k*(z) - grad v_k*(z_t) for the active k. */
std::vector<double> phi_subgradient(const DcProblem& problem, const Linearization& lin,
                                    const SimplexVector& z);

}  // namespace msa
