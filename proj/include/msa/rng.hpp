#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace msa {

/* Seeded generator with hand-rolled transforms so that streams depend only
 * on the mt19937_64 output, not on library-specific distribution
 * implementations. */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /* Uniform in [0, 1). */
    double uniform01() {
        return std::ldexp(static_cast<double>(engine_() >> 11), -53);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /* Standard normal via Box-Muller; values are produced in pairs. */
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /* Uniform draw from the probability simplex (flat Dirichlet), via
     * normalized exponential spacings. */
    std::vector<double> dirichlet_flat(std::size_t p) {
        std::vector<double> w(p);
        double total = 0.0;
        for (auto& v : w) {
            double u = 0.0;
            while (u <= 0.0) u = uniform01();
            v = -std::log(u);
            total += v;
        }
        for (auto& v : w) v /= total;
        return w;
    }

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace msa
