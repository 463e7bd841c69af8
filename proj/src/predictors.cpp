#include "msa/predictors.hpp"

#include <cmath>
#include <string>

#include "msa/errors.hpp"

namespace msa {

ProbabilityHypothesis::ProbabilityHypothesis(std::size_t n_x, std::size_t n_y,
                                             std::vector<double> values)
    : n_x_(n_x), n_y_(n_y), values_(std::move(values)) {
    if (n_x_ == 0 || n_y_ == 0)
        throw InvalidArgument("hypothesis needs n_x >= 1 and n_y >= 1");
    if (values_.size() != n_x_ * n_y_)
        throw ShapeMismatch("hypothesis table has wrong cell count");
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidArgument("hypothesis scores must lie in [0, 1]");
    per_x_normalized_ = true;
    for (std::size_t x = 0; x < n_x_ && per_x_normalized_; ++x) {
        long double row = 0.0L;
        for (std::size_t y = 0; y < n_y_; ++y) row += at(x, y);
        if (std::fabs(static_cast<double>(row) - 1.0) > 1e-9) per_x_normalized_ = false;
    }
}

double squared_loss(double prediction, double label) {
    const double d = prediction - label;
    return d * d;
}

double cross_entropy_loss(double score) {
    if (!(score > 0.0))
        throw NonpositiveProbability("cross-entropy loss is infinite at score " +
                                     std::to_string(score));
    return -std::log(score);
}

double cross_entropy_loss_clipped(double score) {
    return -std::log(std::max(score, kCrossEntropyFloor));
}

double expected_squared_loss(const DiscreteJointDistribution& d,
                             const RegressionHypothesis& h,
                             const std::vector<double>& labels) {
    if (h.n_x() != d.n_x()) throw ShapeMismatch("hypothesis does not cover the input set");
    if (labels.size() != d.n_y()) throw ShapeMismatch("label map does not cover the output set");
    long double acc = 0.0L;
    for (std::size_t x = 0; x < d.n_x(); ++x)
        for (std::size_t y = 0; y < d.n_y(); ++y) {
            const double p = d.at(x, y);
            if (p == 0.0) continue;
            acc += p * squared_loss(h.values[x], labels[y]);
        }
    return static_cast<double>(acc);
}

double expected_cross_entropy(const DiscreteJointDistribution& d,
                              const ProbabilityHypothesis& h, bool clipped) {
    if (h.n_x() != d.n_x() || h.n_y() != d.n_y())
        throw ShapeMismatch("hypothesis does not cover the table");
    long double acc = 0.0L;
    for (std::size_t x = 0; x < d.n_x(); ++x)
        for (std::size_t y = 0; y < d.n_y(); ++y) {
            const double p = d.at(x, y);
            if (p == 0.0) continue;
            acc += p * (clipped ? cross_entropy_loss_clipped(h.at(x, y))
                                : cross_entropy_loss(h.at(x, y)));
        }
    return static_cast<double>(acc);
}

RegressionHypothesis convex_combination(const SimplexVector& alpha,
                                        const std::vector<RegressionHypothesis>& hs) {
    if (hs.empty()) throw InvalidArgument("combination needs hypotheses");
    if (alpha.size() != hs.size())
        throw ShapeMismatch("combination weight length does not match hypothesis count");
    const std::size_t n_x = hs.front().n_x();
    for (const auto& h : hs)
        if (h.n_x() != n_x) throw ShapeMismatch("hypotheses have differing input sets");
    RegressionHypothesis out;
    out.values.assign(n_x, 0.0);
    for (std::size_t k = 0; k < hs.size(); ++k)
        for (std::size_t x = 0; x < n_x; ++x) out.values[x] += alpha[k] * hs[k].values[x];
    return out;
}

ProbabilityHypothesis convex_combination(const SimplexVector& alpha,
                                         const std::vector<ProbabilityHypothesis>& hs) {
    if (hs.empty()) throw InvalidArgument("combination needs hypotheses");
    if (alpha.size() != hs.size())
        throw ShapeMismatch("combination weight length does not match hypothesis count");
    const std::size_t n_x = hs.front().n_x();
    const std::size_t n_y = hs.front().n_y();
    for (const auto& h : hs)
        if (h.n_x() != n_x || h.n_y() != n_y)
            throw ShapeMismatch("hypotheses have differing shapes");
    std::vector<double> values(n_x * n_y, 0.0);
    for (std::size_t k = 0; k < hs.size(); ++k) {
        const auto& table = hs[k].values();
        for (std::size_t c = 0; c < values.size(); ++c) values[c] += alpha[k] * table[c];
    }
    // convexity can leave 1 + ulp on normalized rows
    for (auto& v : values) v = std::min(v, 1.0);
    return ProbabilityHypothesis(n_x, n_y, std::move(values));
}

}  // namespace msa
