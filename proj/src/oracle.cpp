#include "msa/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "msa/errors.hpp"
#include "msa/renyi.hpp"

namespace msa {

namespace {

std::size_t resolution_steps(const GridSpec& spec) {
    if (spec.p == 0) throw InvalidArgument("grid dimension must be positive");
    if (!(spec.resolution > 0.0 && spec.resolution <= 1.0))
        throw InvalidArgument("grid resolution must lie in (0, 1]");
    const double inv = 1.0 / spec.resolution;
    const double rounded = std::round(inv);
    if (std::fabs(inv - rounded) > 1e-9 * inv)
        throw InvalidArgument("1/resolution must be a whole number, got " +
                              std::to_string(inv));
    return static_cast<std::size_t>(rounded);
}

/* C(n + p - 1, p - 1) with an early cap. */
std::size_t composition_count(std::size_t n, std::size_t p) {
    long double count = 1.0L;
    for (std::size_t i = 1; i < p; ++i) {
        count = count * static_cast<long double>(n + i) / static_cast<long double>(i);
        if (count > 2.0L * static_cast<long double>(kMaxGridPoints))
            return 2 * kMaxGridPoints;
    }
    return static_cast<std::size_t>(count + 0.5L);
}

/* Visits integer compositions of n into p parts in ascending lexicographic
 * order of (c_1, ..., c_p). */
template <typename Visit>
void for_each_composition(std::size_t n, std::size_t p, Visit&& visit) {
    std::vector<std::size_t> c(p, 0);
    const std::function<void(std::size_t, std::size_t)> rec =
        [&](std::size_t idx, std::size_t remaining) {
            if (idx + 1 == p) {
                c[idx] = remaining;
                visit(c);
                return;
            }
            for (std::size_t v = 0; v <= remaining; ++v) {
                c[idx] = v;
                rec(idx + 1, remaining - v);
            }
        };
    rec(0, n);
}

SimplexVector composition_to_point(const std::vector<std::size_t>& c, std::size_t n) {
    std::vector<double> w(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        w[i] = static_cast<double>(c[i]) / static_cast<double>(n);
    return SimplexVector(std::move(w));
}

}  // namespace

std::size_t simplex_grid_size(const GridSpec& spec) {
    const std::size_t n = resolution_steps(spec);
    const std::size_t count = composition_count(n, spec.p);
    if (count > kMaxGridPoints)
        throw GridTooLarge("simplex grid would hold more than 1e7 points");
    return count;
}

std::vector<SimplexVector> simplex_grid(const GridSpec& spec) {
    const std::size_t n = resolution_steps(spec);
    std::vector<SimplexVector> grid;
    grid.reserve(simplex_grid_size(spec));
    for_each_composition(n, spec.p, [&](const std::vector<std::size_t>& c) {
        grid.push_back(composition_to_point(c, n));
    });
    return grid;
}

GridScan brute_force_minmax(const SimplexFn& f, const GridSpec& spec) {
    const std::size_t n = resolution_steps(spec);
    const std::size_t count = simplex_grid_size(spec);

    // Values in enumeration order; ranks are recovered with the
    // combinatorial number system to look up lattice neighbors.
    std::vector<double> values;
    values.reserve(count);

    // cumulative[r][m] = sum_{w <= m} (compositions of w into r parts), so a
    // rank lookup is O(p): at prefix position i the skipped branch count is
    // sum_{v < c_i} count(remaining - v, r) = cumulative[r][remaining] -
    // cumulative[r][remaining - c_i].
    std::vector<std::vector<std::size_t>> cumulative(spec.p + 1);
    for (std::size_t r = 1; r <= spec.p; ++r) {
        cumulative[r].resize(n + 2, 0);
        for (std::size_t m = 0; m <= n; ++m)
            cumulative[r][m + 1] = cumulative[r][m] + composition_count(m, r);
    }
    const auto rank = [&](const std::vector<std::size_t>& c) {
        std::size_t idx = 0;
        std::size_t remaining = n;
        for (std::size_t i = 0; i + 1 < spec.p; ++i) {
            const std::size_t r = spec.p - i - 1;
            idx += cumulative[r][remaining + 1] - cumulative[r][remaining - c[i] + 1];
            remaining -= c[i];
        }
        return idx;
    };

    GridScan scan{SimplexVector::uniform(spec.p), 0.0, 0.0, count};
    bool first = true;
    for_each_composition(n, spec.p, [&](const std::vector<std::size_t>& c) {
        const SimplexVector z = composition_to_point(c, n);
        const double value = f(z);
        values.push_back(value);
        if (first || value < scan.value) {
            scan.value = value;
            scan.z_best = z;
            first = false;
        }
    });

    // Steepest slope between neighbors c -> c - e_i + e_j.
    const double edge = spec.resolution * std::sqrt(2.0);
    std::size_t idx = 0;
    std::vector<std::size_t> neighbor(spec.p);
    for_each_composition(n, spec.p, [&](const std::vector<std::size_t>& c) {
        const double here = values[idx];
        if (std::isfinite(here)) {
            for (std::size_t i = 0; i < spec.p; ++i) {
                if (c[i] == 0) continue;
                for (std::size_t j = 0; j < spec.p; ++j) {
                    if (j == i) continue;
                    neighbor = c;
                    --neighbor[i];
                    ++neighbor[j];
                    const double there = values[rank(neighbor)];
                    if (!std::isfinite(there)) continue;
                    scan.lipschitz_hat =
                        std::max(scan.lipschitz_hat, std::fabs(here - there) / edge);
                }
            }
        }
        ++idx;
    });
    return scan;
}

double finite_diff_directional(const SimplexFn& f, const SimplexVector& z,
                               const std::vector<double>& direction, double step) {
    if (direction.size() != z.size())
        throw ShapeMismatch("probe direction has wrong length");
    if (!(step > 0.0)) throw InvalidArgument("probe step must be positive");
    double drift = 0.0;
    for (double d : direction) drift += d;
    if (std::fabs(drift) > 1e-12)
        throw InfeasibleProbe("probe direction must have zero coordinate sum");

    std::vector<double> fwd(z.size()), bwd(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        fwd[i] = z[i] + step * direction[i];
        bwd[i] = z[i] - step * direction[i];
        if (fwd[i] < 0.0 || fwd[i] > 1.0 || bwd[i] < 0.0 || bwd[i] > 1.0)
            throw InfeasibleProbe("probe would leave the simplex at coordinate " +
                                  std::to_string(i));
    }
    return (f(SimplexVector(fwd)) - f(SimplexVector(bwd))) / (2.0 * step);
}

ConvexityReport convexity_probe(const SimplexFn& f,
                                const std::function<SimplexVector()>& sampler,
                                std::size_t trials, double tol) {
    if (trials == 0) throw InvalidArgument("convexity probe needs trials >= 1");
    ConvexityReport report;
    report.trials = trials;
    report.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        const SimplexVector a = sampler();
        const SimplexVector b = sampler();
        std::vector<double> mid(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
        const double violation =
            f(SimplexVector(mid)) - 0.5 * (f(a) + f(b));
        report.worst_violation = std::max(report.worst_violation, violation);
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

MixtureDivergence min_renyi_over_mixtures(
    const DiscreteJointDistribution& target,
    const std::vector<DiscreteJointDistribution>& sources, double alpha,
    double resolution) {
    if (sources.empty()) throw InvalidArgument("mixture family needs sources");
    const GridSpec spec{sources.size(), resolution};
    MixtureDivergence best{SimplexVector::uniform(sources.size()),
                           std::numeric_limits<double>::infinity()};
    for (const auto& lambda : simplex_grid(spec)) {
        double value;
        try {
            value = renyi_d_alpha(target, mixture(lambda, sources), alpha);
        } catch (const SupportViolation&) {
            continue;  // infinite divergence off this mixture's support
        }
        if (value < best.value) {
            best.value = value;
            best.lambda = lambda;
        }
    }
    if (!std::isfinite(best.value))
        throw SupportViolation("target is outside the support of every lattice mixture");
    return best;
}

}  // namespace msa
