#include "msa/gaussian.hpp"

#include <cmath>

#include "msa/errors.hpp"

namespace msa {

GaussianMixtureDensity::GaussianMixtureDensity(std::size_t dims,
                                               std::vector<Component> components)
    : dims_(dims), components_(std::move(components)) {
    if (dims_ == 0) throw InvalidArgument("density needs at least one dimension");
    if (components_.empty()) throw InvalidArgument("mixture needs components");
    double total = 0.0;
    for (const auto& c : components_) {
        if (c.mean.size() != dims_) throw ShapeMismatch("component mean has wrong dimension");
        if (!(c.variance > 0.0)) throw InvalidArgument("component variance must be positive");
        if (c.weight < 0.0) throw InvalidArgument("component weight must be nonnegative");
        total += c.weight;
    }
    if (total <= 0.0) throw InvalidArgument("mixture weights sum to zero");
    for (auto& c : components_) c.weight /= total;
}

double GaussianMixtureDensity::density(const std::vector<double>& x) const {
    if (x.size() != dims_) throw ShapeMismatch("density evaluation point has wrong dimension");
    double value = 0.0;
    for (const auto& c : components_) {
        double sq = 0.0;
        for (std::size_t i = 0; i < dims_; ++i) {
            const double d = x[i] - c.mean[i];
            sq += d * d;
        }
        const double norm =
            std::pow(2.0 * M_PI * c.variance, -0.5 * static_cast<double>(dims_));
        value += c.weight * norm * std::exp(-0.5 * sq / c.variance);
    }
    return value;
}

}  // namespace msa
