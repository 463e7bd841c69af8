#include "msa/distribution.hpp"

#include <cmath>
#include <string>

#include "msa/errors.hpp"

namespace msa {

DiscreteJointDistribution::DiscreteJointDistribution(std::size_t n_x,
                                                     std::size_t n_y,
                                                     std::vector<double> probs)
    : n_x_(n_x), n_y_(n_y), probs_(std::move(probs)) {
    if (n_x_ == 0 || n_y_ == 0)
        throw InvalidArgument("distribution needs n_x >= 1 and n_y >= 1");
    if (probs_.size() != n_x_ * n_y_)
        throw ShapeMismatch("probability table has " + std::to_string(probs_.size()) +
                            " cells, expected " + std::to_string(n_x_ * n_y_));
    long double total = 0.0L;
    for (auto& p : probs_) {
        if (!std::isfinite(p))
            throw InvalidArgument("probability entry is not finite");
        if (p < 0.0) {
            if (p < -1e-12)
                throw InvalidArgument("probability entry is negative");
            p = 0.0;
        }
        total += p;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9)
        throw InvalidArgument("probability table sums to " +
                              std::to_string(static_cast<double>(total)) +
                              ", outside the accepted 1e-9 drift");
    for (auto& p : probs_) p = static_cast<double>(p / total);
}

DiscreteJointDistribution DiscreteJointDistribution::uniform(std::size_t n_x,
                                                             std::size_t n_y) {
    return DiscreteJointDistribution(
        n_x, n_y, std::vector<double>(n_x * n_y, 1.0 / static_cast<double>(n_x * n_y)));
}

DiscreteJointDistribution DiscreteJointDistribution::point_mass(std::size_t n_x,
                                                                std::size_t n_y,
                                                                std::size_t x,
                                                                std::size_t y) {
    if (x >= n_x || y >= n_y) throw InvalidArgument("point mass outside the table");
    std::vector<double> probs(n_x * n_y, 0.0);
    probs[x * n_y + y] = 1.0;
    return DiscreteJointDistribution(n_x, n_y, std::move(probs));
}

std::vector<double> marginal_x(const DiscreteJointDistribution& d) {
    std::vector<double> marg(d.n_x(), 0.0);
    for (std::size_t x = 0; x < d.n_x(); ++x) {
        long double row = 0.0L;
        for (std::size_t y = 0; y < d.n_y(); ++y) row += d.at(x, y);
        marg[x] = static_cast<double>(row);
    }
    return marg;
}

SimplexVector conditional_y_given_x(const DiscreteJointDistribution& d,
                                    std::size_t x) {
    if (x >= d.n_x()) throw InvalidArgument("conditional input index out of range");
    long double row = 0.0L;
    for (std::size_t y = 0; y < d.n_y(); ++y) row += d.at(x, y);
    if (row <= 0.0L)
        throw ZeroMarginal("conditional undefined: no mass at input " +
                           std::to_string(x));
    std::vector<double> cond(d.n_y());
    for (std::size_t y = 0; y < d.n_y(); ++y)
        cond[y] = static_cast<double>(d.at(x, y) / row);
    return SimplexVector(std::move(cond));
}

DiscreteJointDistribution mixture(const SimplexVector& lambda,
                                  const std::vector<DiscreteJointDistribution>& sources) {
    if (sources.empty()) throw InvalidArgument("mixture needs at least one source");
    if (lambda.size() != sources.size())
        throw ShapeMismatch("mixture weight length " + std::to_string(lambda.size()) +
                            " does not match " + std::to_string(sources.size()) +
                            " sources");
    for (const auto& s : sources)
        if (!s.same_shape(sources.front()))
            throw ShapeMismatch("mixture sources have differing shapes");
    std::vector<double> probs(sources.front().cells(), 0.0);
    for (std::size_t k = 0; k < sources.size(); ++k) {
        const auto& table = sources[k].probs();
        for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += lambda[k] * table[c];
    }
    return DiscreteJointDistribution(sources.front().n_x(), sources.front().n_y(),
                                     std::move(probs));
}

}  // namespace msa
