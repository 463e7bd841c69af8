#include "msa/renyi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msa/errors.hpp"

namespace msa {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 1.0))
        throw InvalidArgument("Renyi order must exceed 1, got " + std::to_string(alpha));
}

/* log sum_i exp(t_i) with the usual max shift. */
double log_sum_exp(const std::vector<double>& t) {
    const double m = *std::max_element(t.begin(), t.end());
    long double acc = 0.0L;
    for (double v : t) acc += std::exp(v - m);
    return m + std::log(static_cast<double>(acc));
}

}  // namespace

double renyi_d_alpha(const DiscreteJointDistribution& d,
                     const DiscreteJointDistribution& dp, double alpha) {
    check_alpha(alpha);
    if (!d.same_shape(dp)) throw ShapeMismatch("divergence arguments differ in shape");
    std::vector<double> log_terms;
    log_terms.reserve(d.cells());
    const auto& pd = d.probs();
    const auto& pq = dp.probs();
    for (std::size_t c = 0; c < pd.size(); ++c) {
        if (pd[c] == 0.0) continue;  // 0^alpha / q^(alpha-1) = 0
        if (pq[c] == 0.0)
            throw SupportViolation("divergence is infinite: mass outside the reference support");
        log_terms.push_back(alpha * std::log(pd[c]) - (alpha - 1.0) * std::log(pq[c]));
    }
    if (log_terms.empty())
        throw InvalidArgument("divergence of an empty distribution");
    return std::exp(log_sum_exp(log_terms) / (alpha - 1.0));
}

double renyi_sup_ratio(const DiscreteJointDistribution& d,
                       const DiscreteJointDistribution& dp) {
    if (!d.same_shape(dp)) throw ShapeMismatch("divergence arguments differ in shape");
    double sup = 0.0;
    const auto& pd = d.probs();
    const auto& pq = dp.probs();
    for (std::size_t c = 0; c < pd.size(); ++c) {
        if (pd[c] == 0.0) continue;
        if (pq[c] == 0.0)
            throw SupportViolation("sup ratio is infinite: mass outside the reference support");
        sup = std::max(sup, pd[c] / pq[c]);
    }
    return sup;
}

double epsilon_target(const DiscreteJointDistribution& target,
                      const std::vector<DiscreteJointDistribution>& sources,
                      double alpha, double epsilon, double M) {
    check_alpha(alpha);
    if (epsilon < 0.0) throw InvalidArgument("epsilon must be nonnegative");
    if (!(M > 0.0)) throw InvalidArgument("loss bound M must be positive");
    if (sources.empty()) throw InvalidArgument("epsilon_target needs sources");
    for (const auto& s : sources)
        if (!s.same_shape(target)) throw ShapeMismatch("source and target shapes differ");

    const auto target_marg = marginal_x(target);
    double worst = 0.0;
    for (const auto& src : sources) {
        const auto src_marg = marginal_x(src);
        long double expectation = 0.0L;
        for (std::size_t x = 0; x < src.n_x(); ++x) {
            if (src_marg[x] == 0.0) continue;
            if (target_marg[x] == 0.0) {
                expectation += src_marg[x];  // vacuous conditional, neutral divergence 1
                continue;
            }
            // sum_y T(y|x)^alpha / S(y|x)^(alpha-1), i.e. d_alpha^(alpha-1)
            long double inner = 0.0L;
            for (std::size_t y = 0; y < src.n_y(); ++y) {
                const double t = target.at(x, y) / target_marg[x];
                if (t == 0.0) continue;
                const double s = src.at(x, y) / src_marg[x];
                if (s == 0.0)
                    throw SupportViolation(
                        "target conditional leaves the source conditional support");
                inner += std::exp(alpha * std::log(t) - (alpha - 1.0) * std::log(s));
            }
            expectation += src_marg[x] * inner;
        }
        worst = std::max(worst, static_cast<double>(expectation));
    }
    return std::pow(worst, 1.0 / alpha) * std::pow(epsilon, (alpha - 1.0) / alpha) *
           std::pow(M, 1.0 / alpha);
}

double guarantee_bound(double epsilon, double delta, double d_alpha, double M,
                       double alpha) {
    check_alpha(alpha);
    if (epsilon < 0.0 || delta < 0.0 || d_alpha < 0.0)
        throw InvalidArgument("guarantee ingredients must be nonnegative");
    if (!(M > 0.0)) throw InvalidArgument("loss bound M must be positive");
    return std::pow((epsilon + delta) * d_alpha, (alpha - 1.0) / alpha) *
           std::pow(M, 1.0 / alpha);
}

GuaranteeReport make_guarantee_report(double alpha, double epsilon, double delta,
                                      double d_alpha, double M) {
    GuaranteeReport r;
    r.alpha = alpha;
    r.epsilon = epsilon;
    r.delta = delta;
    r.d_alpha = d_alpha;
    r.M = M;
    r.bound_value = guarantee_bound(epsilon, delta, d_alpha, M, alpha);
    return r;
}

}  // namespace msa
