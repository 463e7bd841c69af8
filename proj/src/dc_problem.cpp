#include "msa/dc_problem.hpp"

#include <cmath>
#include <string>

#include "msa/errors.hpp"

namespace msa {

namespace {

void check_common(const std::vector<DiscreteJointDistribution>& sources, double eta) {
    if (sources.empty()) throw InvalidArgument("solve instance needs sources");
    if (!(eta > 0.0))
        throw NonpositiveEta("solve instance needs eta > 0, got " + std::to_string(eta));
    for (const auto& s : sources)
        if (!s.same_shape(sources.front()))
            throw ShapeMismatch("sources have differing shapes");
}

}  // namespace

DcProblem DcProblem::regression(std::vector<DiscreteJointDistribution> sources,
                                std::vector<RegressionHypothesis> hypotheses,
                                std::vector<double> labels, LossSpec loss,
                                double eta) {
    check_common(sources, eta);
    if (loss.kind != LossKind::squared)
        throw InvalidArgument("regression model pairs with the squared loss");
    if (hypotheses.size() != sources.size())
        throw ShapeMismatch("hypothesis count does not match source count");
    const std::size_t n_x = sources.front().n_x();
    const std::size_t n_y = sources.front().n_y();
    if (labels.size() != n_y)
        throw ShapeMismatch("label map does not cover the output set");
    for (const auto& h : hypotheses)
        if (h.n_x() != n_x) throw ShapeMismatch("hypothesis does not cover the input set");

    DcProblem prob;
    prob.model_ = Model::regression;
    prob.p_ = sources.size();
    prob.eta_ = eta;
    prob.loss_ = loss;
    prob.point_count_ = n_x;
    prob.labels_ = std::move(labels);

    auto& in = prob.internals_;
    in.u_point = 1.0 / static_cast<double>(n_x);
    in.weight.resize(prob.p_);
    in.hyp.resize(prob.p_);
    in.first_moment.resize(prob.p_);
    in.second_moment.resize(prob.p_);
    in.cond_mean.resize(prob.p_);
    in.cond_sq.resize(prob.p_);

    for (std::size_t k = 0; k < prob.p_; ++k) {
        in.weight[k] = marginal_x(sources[k]);
        in.hyp[k] = hypotheses[k].values;
        in.first_moment[k].assign(n_x, 0.0);
        in.second_moment[k].assign(n_x, 0.0);
        for (std::size_t x = 0; x < n_x; ++x) {
            long double m1 = 0.0L, m2 = 0.0L;
            for (std::size_t y = 0; y < n_y; ++y) {
                const double w = sources[k].at(x, y);
                if (w == 0.0) continue;
                m1 += w * prob.labels_[y];
                m2 += w * prob.labels_[y] * prob.labels_[y];
            }
            in.first_moment[k][x] = static_cast<double>(m1);
            in.second_moment[k][x] = static_cast<double>(m2);
        }
    }

    // Completed conditional moments: own conditional where the source has
    // mass, pooled conditional otherwise, uniform over labels as a last
    // resort. The completion cancels in u_k - v_k.
    double label_mean = 0.0, label_sq = 0.0;
    for (double l : prob.labels_) {
        label_mean += l;
        label_sq += l * l;
    }
    label_mean /= static_cast<double>(n_y);
    label_sq /= static_cast<double>(n_y);

    for (std::size_t k = 0; k < prob.p_; ++k) {
        in.cond_mean[k].assign(n_x, 0.0);
        in.cond_sq[k].assign(n_x, 0.0);
        for (std::size_t x = 0; x < n_x; ++x) {
            if (in.weight[k][x] > 0.0) {
                in.cond_mean[k][x] = in.first_moment[k][x] / in.weight[k][x];
                in.cond_sq[k][x] = in.second_moment[k][x] / in.weight[k][x];
                continue;
            }
            double pooled_mass = 0.0, pooled_m1 = 0.0, pooled_m2 = 0.0;
            for (std::size_t j = 0; j < prob.p_; ++j) {
                pooled_mass += in.weight[j][x];
                pooled_m1 += in.first_moment[j][x];
                pooled_m2 += in.second_moment[j][x];
            }
            if (pooled_mass > 0.0) {
                in.cond_mean[k][x] = pooled_m1 / pooled_mass;
                in.cond_sq[k][x] = pooled_m2 / pooled_mass;
            } else {
                in.cond_mean[k][x] = label_mean;
                in.cond_sq[k][x] = label_sq;
            }
        }
    }

    prob.sources_ = std::move(sources);
    prob.reg_hypotheses_ = std::move(hypotheses);
    return prob;
}

DcProblem DcProblem::probability(std::vector<DiscreteJointDistribution> sources,
                                 std::vector<ProbabilityHypothesis> hypotheses,
                                 LossSpec loss, double eta) {
    check_common(sources, eta);
    if (loss.kind != LossKind::cross_entropy)
        throw InvalidArgument("probability model pairs with the cross-entropy loss");
    if (hypotheses.size() != sources.size())
        throw ShapeMismatch("hypothesis count does not match source count");
    const std::size_t n_x = sources.front().n_x();
    const std::size_t n_y = sources.front().n_y();
    for (const auto& h : hypotheses)
        if (h.n_x() != n_x || h.n_y() != n_y)
            throw ShapeMismatch("hypothesis does not cover the table");

    DcProblem prob;
    prob.model_ = Model::probability;
    prob.p_ = sources.size();
    prob.eta_ = eta;
    prob.loss_ = loss;
    prob.point_count_ = n_x * n_y;

    auto& in = prob.internals_;
    in.u_point = 1.0 / static_cast<double>(n_x * n_y);
    in.weight.resize(prob.p_);
    in.hyp.resize(prob.p_);
    for (std::size_t k = 0; k < prob.p_; ++k) {
        in.weight[k] = sources[k].probs();
        in.hyp[k] = hypotheses[k].values();
    }

    prob.sources_ = std::move(sources);
    prob.prob_hypotheses_ = std::move(hypotheses);
    return prob;
}

void DcProblem::check_z(const SimplexVector& z) const {
    if (z.size() != p_)
        throw ShapeMismatch("weight length " + std::to_string(z.size()) +
                            " does not match " + std::to_string(p_) + " sources");
}

std::pair<double, double> DcProblem::jz_kz(const SimplexVector& z,
                                           std::size_t point) const {
    check_z(z);
    if (point >= point_count_) throw InvalidArgument("evaluation point out of range");
    const auto& in = internals_;
    double jz = 0.0;
    double kz = eta_ * in.u_point;
    const double smooth = eta_ * in.u_point / static_cast<double>(p_);
    for (std::size_t k = 0; k < p_; ++k) {
        jz += (z[k] * in.weight[k][point] + smooth) * in.hyp[k][point];
        kz += z[k] * in.weight[k][point];
    }
    return {jz, kz};
}

std::vector<double> DcProblem::combined_values(const SimplexVector& z) const {
    check_z(z);
    std::vector<double> values(point_count_);
    for (std::size_t c = 0; c < point_count_; ++c) {
        const auto [jz, kz] = jz_kz(z, c);
        values[c] = jz / kz;
    }
    return values;
}

std::vector<double> DcProblem::loss_vector(const SimplexVector& z) const {
    check_z(z);
    const auto& in = internals_;
    std::vector<long double> acc(p_, 0.0L);
    const double smooth = eta_ * in.u_point / static_cast<double>(p_);
    if (model_ == Model::regression) {
        for (std::size_t x = 0; x < point_count_; ++x) {
            double jz = 0.0;
            double kz = eta_ * in.u_point;
            for (std::size_t k = 0; k < p_; ++k) {
                jz += (z[k] * in.weight[k][x] + smooth) * in.hyp[k][x];
                kz += z[k] * in.weight[k][x];
            }
            const double h = jz / kz;
            for (std::size_t k = 0; k < p_; ++k) {
                if (in.weight[k][x] == 0.0 && in.first_moment[k][x] == 0.0) continue;
                acc[k] += in.weight[k][x] * h * h - 2.0 * in.first_moment[k][x] * h +
                          in.second_moment[k][x];
            }
        }
    } else {
        for (std::size_t c = 0; c < point_count_; ++c) {
            double jz = 0.0;
            double kz = eta_ * in.u_point;
            bool any_mass = false;
            for (std::size_t k = 0; k < p_; ++k) {
                jz += (z[k] * in.weight[k][c] + smooth) * in.hyp[k][c];
                kz += z[k] * in.weight[k][c];
                any_mass = any_mass || in.weight[k][c] > 0.0;
            }
            if (!any_mass) continue;
            if (!(jz > 0.0))
                throw NonpositiveProbability(
                    "combined score vanishes on a cell carrying source mass");
            const double log_h = std::log(jz) - std::log(kz);
            for (std::size_t k = 0; k < p_; ++k)
                if (in.weight[k][c] > 0.0) acc[k] -= in.weight[k][c] * log_h;
        }
    }
    std::vector<double> losses(p_);
    for (std::size_t k = 0; k < p_; ++k) losses[k] = static_cast<double>(acc[k]);
    return losses;
}

ObjectiveValue DcProblem::objective(const SimplexVector& z) const {
    ObjectiveValue out;
    out.losses = loss_vector(z);
    long double avg = 0.0L;
    for (std::size_t k = 0; k < p_; ++k) avg += z[k] * out.losses[k];
    double best = out.losses[0];
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < p_; ++k)
        if (out.losses[k] > best) {
            best = out.losses[k];
            best_k = k;
        }
    out.gamma = best - static_cast<double>(avg);
    out.argmax_k = best_k;
    return out;
}

}  // namespace msa
