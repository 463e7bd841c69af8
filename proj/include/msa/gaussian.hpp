#pragma once

#include <cstddef>
#include <vector>

namespace msa {

/* Mixture of isotropic Gaussians used as the analytic density backend for
 * continuous-input scenarios. */
class GaussianMixtureDensity {
  public:
    struct Component {
        std::vector<double> mean;
        double variance = 1.0;
        double weight = 1.0;
    };

    GaussianMixtureDensity(std::size_t dims, std::vector<Component> components);

    std::size_t dims() const { return dims_; }
    const std::vector<Component>& components() const { return components_; }

    double density(const std::vector<double>& x) const;

  private:
    std::size_t dims_;
    std::vector<Component> components_;
};

}  // namespace msa
