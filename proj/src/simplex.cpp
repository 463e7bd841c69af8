#include "msa/simplex.hpp"

#include <cmath>

#include "msa/errors.hpp"

namespace msa {

SimplexVector::SimplexVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty())
        throw InvalidArgument("simplex vector needs at least one entry");
    double total = 0.0;
    for (auto& w : weights_) {
        if (!std::isfinite(w))
            throw InvalidArgument("simplex entry is not finite");
        if (w < 0.0) {
            if (w < -1e-12)
                throw InvalidArgument("simplex entry is negative");
            w = 0.0;  // clamp solver round-off
        }
        total += w;
    }
    if (total <= 0.0)
        throw InvalidArgument("simplex entries sum to zero");
    for (auto& w : weights_) w /= total;
}

SimplexVector SimplexVector::uniform(std::size_t p) {
    if (p == 0) throw InvalidArgument("simplex dimension must be positive");
    return SimplexVector(std::vector<double>(p, 1.0 / static_cast<double>(p)));
}

}  // namespace msa
