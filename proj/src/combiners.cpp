#include "msa/combiners.hpp"

#include <cmath>
#include <string>

#include "msa/errors.hpp"

namespace msa {

namespace {

void check_eta(double eta) {
    if (!(eta > 0.0))
        throw NonpositiveEta("combination smoothing eta must be positive, got " +
                             std::to_string(eta));
}

void check_sources(const std::vector<DiscreteJointDistribution>& sources,
                   std::size_t expected) {
    if (sources.empty()) throw InvalidArgument("combination needs sources");
    if (sources.size() != expected)
        throw ShapeMismatch("source count does not match weight length");
    for (const auto& s : sources)
        if (!s.same_shape(sources.front()))
            throw ShapeMismatch("sources have differing shapes");
}

}  // namespace

std::vector<double> dw_weights_at_x(const SimplexVector& z, double eta,
                                    const std::vector<DiscreteJointDistribution>& sources,
                                    std::size_t x) {
    check_eta(eta);
    check_sources(sources, z.size());
    const std::size_t p = sources.size();
    const double u = 1.0 / static_cast<double>(sources.front().n_x());
    std::vector<double> w(p);
    double denom = eta * u;
    for (std::size_t k = 0; k < p; ++k) {
        long double row = 0.0L;
        for (std::size_t y = 0; y < sources[k].n_y(); ++y) row += sources[k].at(x, y);
        w[k] = z[k] * static_cast<double>(row) + eta * u / static_cast<double>(p);
        denom += z[k] * static_cast<double>(row);
    }
    for (auto& v : w) v /= denom;
    return w;
}

RegressionHypothesis dw_regression(const SimplexVector& z, double eta,
                                   const std::vector<DiscreteJointDistribution>& sources,
                                   const std::vector<RegressionHypothesis>& hs) {
    check_eta(eta);
    check_sources(sources, z.size());
    if (hs.size() != sources.size())
        throw ShapeMismatch("hypothesis count does not match source count");
    const std::size_t n_x = sources.front().n_x();
    for (const auto& h : hs)
        if (h.n_x() != n_x) throw ShapeMismatch("hypothesis does not cover the input set");

    const std::size_t p = sources.size();
    const double u = 1.0 / static_cast<double>(n_x);
    std::vector<std::vector<double>> margs;
    margs.reserve(p);
    for (const auto& s : sources) margs.push_back(marginal_x(s));

    RegressionHypothesis out;
    out.values.assign(n_x, 0.0);
    for (std::size_t x = 0; x < n_x; ++x) {
        double denom = eta * u;
        for (std::size_t k = 0; k < p; ++k) denom += z[k] * margs[k][x];
        double value = 0.0;
        for (std::size_t k = 0; k < p; ++k)
            value += (z[k] * margs[k][x] + eta * u / static_cast<double>(p)) * hs[k].values[x];
        out.values[x] = value / denom;
    }
    return out;
}

ProbabilityHypothesis dw_probability(const SimplexVector& z, double eta,
                                     const std::vector<DiscreteJointDistribution>& sources,
                                     const std::vector<ProbabilityHypothesis>& hs) {
    check_eta(eta);
    check_sources(sources, z.size());
    if (hs.size() != sources.size())
        throw ShapeMismatch("hypothesis count does not match source count");
    const std::size_t n_x = sources.front().n_x();
    const std::size_t n_y = sources.front().n_y();
    for (const auto& h : hs)
        if (h.n_x() != n_x || h.n_y() != n_y)
            throw ShapeMismatch("hypothesis does not cover the table");

    const std::size_t p = sources.size();
    const double u = 1.0 / static_cast<double>(n_x * n_y);
    std::vector<double> values(n_x * n_y, 0.0);
    for (std::size_t c = 0; c < values.size(); ++c) {
        double denom = eta * u;
        double value = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            const double joint = sources[k].probs()[c];
            denom += z[k] * joint;
            value += (z[k] * joint + eta * u / static_cast<double>(p)) * hs[k].values()[c];
        }
        values[c] = std::min(value / denom, 1.0);
    }
    return ProbabilityHypothesis(n_x, n_y, std::move(values));
}

ProbabilityHypothesis dw_normalized(const SimplexVector& z, double eta,
                                    const std::vector<DiscreteJointDistribution>& sources,
                                    const std::vector<ProbabilityHypothesis>& hs) {
    for (const auto& h : hs)
        if (!h.per_x_normalized())
            throw InvalidArgument("normalized combination needs per-input normalized sources");
    const ProbabilityHypothesis base = dw_probability(z, eta, sources, hs);
    const std::size_t n_x = base.n_x();
    const std::size_t n_y = base.n_y();
    std::vector<double> values(n_x * n_y);
    for (std::size_t x = 0; x < n_x; ++x) {
        long double norm = 0.0L;
        for (std::size_t y = 0; y < n_y; ++y) norm += base.at(x, y);
        if (norm <= 0.0L)
            throw DegenerateNormalizer("combined scores vanish at input " + std::to_string(x));
        for (std::size_t y = 0; y < n_y; ++y)
            values[x * n_y + y] = static_cast<double>(base.at(x, y) / norm);
    }
    return ProbabilityHypothesis(n_x, n_y, std::move(values));
}

ProbabilityHypothesis dw_marginal(const SimplexVector& z, double eta,
                                  const std::vector<DiscreteJointDistribution>& sources,
                                  const std::vector<ProbabilityHypothesis>& hs) {
    check_eta(eta);
    check_sources(sources, z.size());
    if (hs.size() != sources.size())
        throw ShapeMismatch("hypothesis count does not match source count");
    for (const auto& h : hs)
        if (!h.per_x_normalized())
            throw InvalidArgument("marginal combination needs per-input normalized sources");
    const std::size_t n_x = sources.front().n_x();
    const std::size_t n_y = sources.front().n_y();
    for (const auto& h : hs)
        if (h.n_x() != n_x || h.n_y() != n_y)
            throw ShapeMismatch("hypothesis does not cover the table");

    std::vector<double> values(n_x * n_y, 0.0);
    for (std::size_t x = 0; x < n_x; ++x) {
        const auto w = dw_weights_at_x(z, eta, sources, x);
        for (std::size_t y = 0; y < n_y; ++y) {
            double value = 0.0;
            for (std::size_t k = 0; k < hs.size(); ++k) value += w[k] * hs[k].at(x, y);
            values[x * n_y + y] = std::min(value, 1.0);
        }
    }
    return ProbabilityHypothesis(n_x, n_y, std::move(values));
}

}  // namespace msa
