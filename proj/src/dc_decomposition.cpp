#include "msa/dc_decomposition.hpp"

#include <cmath>

#include "msa/errors.hpp"

namespace msa {

namespace {

struct PointEval {
    double j = 0.0;
    double k = 0.0;
    double h = 0.0;
};

PointEval eval_point(const DcProblem::Internals& in, double eta, std::size_t p,
                     const SimplexVector& z, std::size_t c) {
    PointEval pe;
    pe.k = eta * in.u_point;
    const double smooth = eta * in.u_point / static_cast<double>(p);
    for (std::size_t k = 0; k < p; ++k) {
        pe.j += (z[k] * in.weight[k][c] + smooth) * in.hyp[k][c];
        pe.k += z[k] * in.weight[k][c];
    }
    pe.h = pe.j / pe.k;
    return pe;
}

void check_k(const DcProblem& problem, std::size_t k) {
    if (k >= problem.p()) throw InvalidArgument("domain index out of range");
}

}  // namespace

DcTerms uv_squared(const DcProblem& problem, std::size_t k, const SimplexVector& z) {
    if (problem.model() != Model::regression)
        throw InvalidArgument("squared-loss decomposition needs the regression model");
    check_k(problem, k);
    const auto& in = problem.internals();
    const std::size_t p = problem.p();
    const double eta = problem.eta();
    const double eu = eta * in.u_point;
    const double two_m = 2.0 * problem.loss().M;

    long double u = 0.0L, v = 0.0L;
    for (std::size_t x = 0; x < problem.point_count(); ++x) {
        const PointEval pe = eval_point(in, eta, p, z, x);
        const double wk = in.weight[k][x] + eu;
        const double log_term = two_m * wk * std::log(pe.k);

        const double a_hat = in.first_moment[k][x] + eu * in.cond_mean[k][x];
        const double b_hat = in.second_moment[k][x] + eu * in.cond_sq[k][x];
        u += wk * pe.h * pe.h - 2.0 * a_hat * pe.h + b_hat - log_term;

        double a_mix = eu * in.cond_mean[k][x];
        double b_mix = eu * in.cond_sq[k][x];
        for (std::size_t j = 0; j < p; ++j) {
            a_mix += z[j] * in.first_moment[j][x];
            b_mix += z[j] * in.second_moment[j][x];
        }
        v += pe.k * pe.h * pe.h - 2.0 * a_mix * pe.h + b_mix - log_term;
    }
    return {static_cast<double>(u), static_cast<double>(v)};
}

DcTerms uv_crossentropy(const DcProblem& problem, std::size_t k,
                        const SimplexVector& z) {
    if (problem.model() != Model::probability)
        throw InvalidArgument("cross-entropy decomposition needs the probability model");
    check_k(problem, k);
    const auto& in = problem.internals();
    const std::size_t p = problem.p();
    const double eta = problem.eta();
    const double eu = eta * in.u_point;

    long double u = 0.0L, v = 0.0L;
    for (std::size_t c = 0; c < problem.point_count(); ++c) {
        const PointEval pe = eval_point(in, eta, p, z, c);
        if (!(pe.j > 0.0))
            throw NonpositiveJz("every source score vanishes on a weighted cell");
        const double log_j = std::log(pe.j);
        const double log_k = std::log(pe.k);
        const double wk = in.weight[k][c] + eu;
        u -= wk * log_j;
        v += pe.k * (log_k - log_j) - wk * log_k;
    }
    return {static_cast<double>(u), static_cast<double>(v)};
}

std::vector<double> grad_u(const DcProblem& problem, std::size_t k,
                           const SimplexVector& z) {
    check_k(problem, k);
    const auto& in = problem.internals();
    const std::size_t p = problem.p();
    const double eta = problem.eta();
    const double eu = eta * in.u_point;
    const double two_m = 2.0 * problem.loss().M;

    std::vector<long double> g(p, 0.0L);
    if (problem.model() == Model::regression) {
        for (std::size_t x = 0; x < problem.point_count(); ++x) {
            const PointEval pe = eval_point(in, eta, p, z, x);
            const double wk = in.weight[k][x] + eu;
            const double a_hat = in.first_moment[k][x] + eu * in.cond_mean[k][x];
            const double resid = 2.0 * (wk * pe.h - a_hat) / pe.k;
            const double log_grad = two_m * wk / pe.k;
            for (std::size_t i = 0; i < p; ++i) {
                const double di = in.weight[i][x];
                if (di == 0.0) continue;
                g[i] += resid * di * (in.hyp[i][x] - pe.h) - log_grad * di;
            }
        }
    } else {
        for (std::size_t c = 0; c < problem.point_count(); ++c) {
            const PointEval pe = eval_point(in, eta, p, z, c);
            if (!(pe.j > 0.0))
                throw NonpositiveJz("every source score vanishes on a weighted cell");
            const double wk = in.weight[k][c] + eu;
            for (std::size_t i = 0; i < p; ++i) {
                const double di = in.weight[i][c];
                if (di == 0.0) continue;
                g[i] -= wk * di * in.hyp[i][c] / pe.j;
            }
        }
    }
    return std::vector<double>(g.begin(), g.end());
}

std::vector<double> grad_v(const DcProblem& problem, std::size_t k,
                           const SimplexVector& z) {
    check_k(problem, k);
    const auto& in = problem.internals();
    const std::size_t p = problem.p();
    const double eta = problem.eta();
    const double eu = eta * in.u_point;
    const double two_m = 2.0 * problem.loss().M;

    std::vector<long double> g(p, 0.0L);
    if (problem.model() == Model::regression) {
        for (std::size_t x = 0; x < problem.point_count(); ++x) {
            const PointEval pe = eval_point(in, eta, p, z, x);
            const double wk = in.weight[k][x] + eu;
            double a_mix = eu * in.cond_mean[k][x];
            for (std::size_t j = 0; j < p; ++j) a_mix += z[j] * in.first_moment[j][x];
            const double dh_scale = 1.0 / pe.k;
            const double log_grad = two_m * wk / pe.k;
            for (std::size_t i = 0; i < p; ++i) {
                const double di = in.weight[i][x];
                const double ai = in.first_moment[i][x];
                const double bi = in.second_moment[i][x];
                if (di == 0.0 && ai == 0.0 && bi == 0.0) {
                    continue;
                }
                const double dh = di * (in.hyp[i][x] - pe.h) * dh_scale;
                g[i] += di * pe.h * (2.0 * in.hyp[i][x] - pe.h) - 2.0 * ai * pe.h -
                        2.0 * a_mix * dh + bi - log_grad * di;
            }
        }
    } else {
        for (std::size_t c = 0; c < problem.point_count(); ++c) {
            const PointEval pe = eval_point(in, eta, p, z, c);
            if (!(pe.j > 0.0))
                throw NonpositiveJz("every source score vanishes on a weighted cell");
            const double log_ratio = std::log(pe.k) - std::log(pe.j);
            const double wk = in.weight[k][c] + eu;
            for (std::size_t i = 0; i < p; ++i) {
                const double di = in.weight[i][c];
                if (di == 0.0) continue;
                g[i] += di * (log_ratio + 1.0 - pe.k * in.hyp[i][c] / pe.j) -
                        wk * di / pe.k;
            }
        }
    }
    return std::vector<double>(g.begin(), g.end());
}

DcTerms DcDecomposition::uv(std::size_t k, const SimplexVector& z) const {
    return problem_->model() == Model::regression ? uv_squared(*problem_, k, z)
                                                  : uv_crossentropy(*problem_, k, z);
}

std::vector<double> DcDecomposition::u_values(const SimplexVector& z) const {
    const auto& problem = *problem_;
    const auto& in = problem.internals();
    const std::size_t p = problem.p();
    const double eta = problem.eta();
    const double eu = eta * in.u_point;
    const double two_m = 2.0 * problem.loss().M;

    std::vector<long double> acc(p, 0.0L);
    if (problem.model() == Model::regression) {
        for (std::size_t x = 0; x < problem.point_count(); ++x) {
            const PointEval pe = eval_point(in, eta, p, z, x);
            const double log_k = std::log(pe.k);
            const double h_sq = pe.h * pe.h;
            for (std::size_t k = 0; k < p; ++k) {
                const double wk = in.weight[k][x] + eu;
                const double a_hat = in.first_moment[k][x] + eu * in.cond_mean[k][x];
                const double b_hat = in.second_moment[k][x] + eu * in.cond_sq[k][x];
                acc[k] += wk * h_sq - 2.0 * a_hat * pe.h + b_hat - two_m * wk * log_k;
            }
        }
    } else {
        for (std::size_t c = 0; c < problem.point_count(); ++c) {
            const PointEval pe = eval_point(in, eta, p, z, c);
            if (!(pe.j > 0.0))
                throw NonpositiveJz("every source score vanishes on a weighted cell");
            const double log_j = std::log(pe.j);
            for (std::size_t k = 0; k < p; ++k)
                acc[k] -= (in.weight[k][c] + eu) * log_j;
        }
    }
    return std::vector<double>(acc.begin(), acc.end());
}

std::vector<double> DcDecomposition::grad_u(std::size_t k, const SimplexVector& z) const {
    return msa::grad_u(*problem_, k, z);
}

std::vector<double> DcDecomposition::grad_v(std::size_t k, const SimplexVector& z) const {
    return msa::grad_v(*problem_, k, z);
}

Linearization make_linearization(const DcProblem& problem, const SimplexVector& z_t) {
    DcDecomposition dec(problem);
    Linearization lin{z_t, {}, {}, 0.0};
    lin.v_t.resize(problem.p());
    lin.grad_v_t.resize(problem.p());
    const auto u_t = dec.u_values(z_t);
    double phi = 0.0;
    for (std::size_t k = 0; k < problem.p(); ++k) {
        lin.v_t[k] = dec.uv(k, z_t).v;
        lin.grad_v_t[k] = dec.grad_v(k, z_t);
        const double piece = u_t[k] - lin.v_t[k];
        if (k == 0 || piece > phi) phi = piece;
    }
    lin.phi_at_z_t = phi;
    return lin;
}

PhiValue phi_value(const DcProblem& problem, const Linearization& lin,
                   const SimplexVector& z) {
    DcDecomposition dec(problem);
    const auto u = dec.u_values(z);
    PhiValue out;
    for (std::size_t k = 0; k < problem.p(); ++k) {
        double lin_term = 0.0;
        for (std::size_t i = 0; i < problem.p(); ++i)
            lin_term += (z[i] - lin.z_t[i]) * lin.grad_v_t[k][i];
        const double piece = u[k] - lin.v_t[k] - lin_term;
        if (k == 0 || piece > out.value) {
            out.value = piece;
            out.argmax_k = k;
        }
    }
    return out;
}

std::vector<double> phi_subgradient(const DcProblem& problem, const Linearization& lin,
                                    const SimplexVector& z) {
    const PhiValue pv = phi_value(problem, lin, z);
    auto g = grad_u(problem, pv.argmax_k, z);
    for (std::size_t i = 0; i < problem.p(); ++i) g[i] -= lin.grad_v_t[pv.argmax_k][i];
    return g;
}

}  // namespace msa
