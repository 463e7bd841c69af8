#pragma once

#include <cstddef>
#include <vector>

namespace msa {

/* Nonnegative weight vector summing to one. Entries in [-1e-12, 0) are
 * clamped to zero and the vector is renormalized on construction, so solver
 * round-off cannot produce an invalid value. Immutable after construction. */
class SimplexVector {
  public:
    explicit SimplexVector(std::vector<double> weights);

    static SimplexVector uniform(std::size_t p);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

    bool operator==(const SimplexVector& other) const = default;

  private:
    std::vector<double> weights_;
};

}  // namespace msa
