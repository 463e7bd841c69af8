#include "msa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msa/combiners.hpp"
#include "msa/errors.hpp"
#include "msa/oracle.hpp"
#include "msa/rng.hpp"

namespace msa {

namespace {

using json = nlohmann::ordered_json;

/* Empirical loss bound: the largest pointwise loss of any source hypothesis
 * over the points a solve can weight (cross-entropy on the clipped path).
 * Combinations stay inside the per-point envelope of the sources, so this
 * bounds their losses as well. For the regression model the smoothing term
 * weights every input through the completed conditionals, so inputs without
 * pooled mass are bounded over every label; for the probability model the
 * smoothing weights every cell outright. */
double empirical_loss_bound(const Scenario& s) {
    double bound = 0.0;
    if (s.model == Model::regression) {
        for (std::size_t x = 0; x < s.n_x; ++x) {
            double row_mass = 0.0;
            for (const auto& d : s.sources)
                for (std::size_t y = 0; y < s.n_y; ++y) row_mass += d.at(x, y);
            for (std::size_t y = 0; y < s.n_y; ++y) {
                if (row_mass > 0.0) {
                    double mass = 0.0;
                    for (const auto& d : s.sources) mass += d.at(x, y);
                    if (mass == 0.0) continue;
                }
                for (const auto& h : s.reg_hypotheses)
                    bound = std::max(bound, squared_loss(h.values[x], s.labels[y]));
            }
        }
    } else {
        for (const auto& h : s.prob_hypotheses)
            for (const double v : h.values())
                bound = std::max(bound, cross_entropy_loss_clipped(v));
    }
    return bound;
}

std::vector<NamedTarget> default_targets(std::size_t p) {
    std::vector<NamedTarget> targets;
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double> lambda(p, 0.0);
        lambda[k] = 1.0;
        targets.push_back({"source_" + std::to_string(k + 1), std::move(lambda)});
    }
    targets.push_back(
        {"uniform_mixture", std::vector<double>(p, 1.0 / static_cast<double>(p))});
    return targets;
}

/* Solves the 3x3 normal equations of a least-squares fit with features
 * (1, x1, x2). */
std::vector<double> fit_linear_regressor(const std::vector<std::vector<double>>& xs,
                                         const std::vector<double>& ys) {
    constexpr std::size_t d = 3;
    double a[d][d] = {};
    double rhs[d] = {};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f[d] = {1.0, xs[i][0], xs[i][1]};
        for (std::size_t r = 0; r < d; ++r) {
            rhs[r] += f[r] * ys[i];
            for (std::size_t c = 0; c < d; ++c) a[r][c] += f[r] * f[c];
        }
    }
    // Gaussian elimination with partial pivoting.
    std::size_t perm[d] = {0, 1, 2};
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::fabs(a[perm[r]][col]) > std::fabs(a[perm[pivot]][col])) pivot = r;
        std::swap(perm[col], perm[pivot]);
        const double diag = a[perm[col]][col];
        if (std::fabs(diag) < 1e-12)
            throw InvalidArgument("degenerate least-squares system");
        for (std::size_t r = col + 1; r < d; ++r) {
            const double factor = a[perm[r]][col] / diag;
            for (std::size_t c = col; c < d; ++c) a[perm[r]][c] -= factor * a[perm[col]][c];
            rhs[perm[r]] -= factor * rhs[perm[col]];
        }
    }
    std::vector<double> w(d);
    for (std::size_t col = d; col-- > 0;) {
        double v = rhs[perm[col]];
        for (std::size_t c = col + 1; c < d; ++c) v -= a[perm[col]][c] * w[c];
        w[col] = v / a[perm[col]][col];
    }
    return w;
}

/* Full-batch softmax logistic regression with features (1, x1, x2);
 * fixed 500 iterations at step 0.1 keeps runs reproducible. */
std::vector<std::vector<double>> fit_logistic(const std::vector<std::vector<double>>& xs,
                                              const std::vector<std::size_t>& cats,
                                              std::size_t n_cat) {
    constexpr std::size_t d = 3;
    const std::size_t n = xs.size();
    std::vector<std::vector<double>> w(n_cat, std::vector<double>(d, 0.0));
    std::vector<double> scores(n_cat);
    std::vector<std::vector<double>> grad(n_cat, std::vector<double>(d));
    for (std::size_t iter = 0; iter < 500; ++iter) {
        for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double f[d] = {1.0, xs[i][0], xs[i][1]};
            double max_score = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < n_cat; ++c) {
                scores[c] = w[c][0] * f[0] + w[c][1] * f[1] + w[c][2] * f[2];
                max_score = std::max(max_score, scores[c]);
            }
            double total = 0.0;
            for (std::size_t c = 0; c < n_cat; ++c) {
                scores[c] = std::exp(scores[c] - max_score);
                total += scores[c];
            }
            for (std::size_t c = 0; c < n_cat; ++c) {
                const double err = scores[c] / total - (cats[i] == c ? 1.0 : 0.0);
                for (std::size_t r = 0; r < d; ++r) grad[c][r] += err * f[r];
            }
        }
        for (std::size_t c = 0; c < n_cat; ++c)
            for (std::size_t r = 0; r < d; ++r)
                w[c][r] -= 0.1 * grad[c][r] / static_cast<double>(n);
    }
    return w;
}

std::vector<double> softmax_row(const std::vector<std::vector<double>>& w,
                                const std::vector<double>& x) {
    const double f[3] = {1.0, x[0], x[1]};
    std::vector<double> out(w.size());
    double max_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < w.size(); ++c) {
        out[c] = w[c][0] * f[0] + w[c][1] * f[1] + w[c][2] * f[2];
        max_score = std::max(max_score, out[c]);
    }
    double total = 0.0;
    for (auto& v : out) {
        v = std::exp(v - max_score);
        total += v;
    }
    for (auto& v : out) v /= total;
    return out;
}

}  // namespace

DcProblem Scenario::make_problem(double eta) const {
    if (model == Model::regression)
        return DcProblem::regression(sources, reg_hypotheses, labels, loss, eta);
    return DcProblem::probability(sources, prob_hypotheses, loss, eta);
}

double Scenario::epsilon() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < p(); ++k) {
        const double own =
            model == Model::regression
                ? expected_squared_loss(sources[k], reg_hypotheses[k], labels)
                : expected_cross_entropy(sources[k], prob_hypotheses[k]);
        worst = std::max(worst, own);
    }
    return worst;
}

void validate_scenario(const Scenario& s) {
    if (s.name.empty()) throw InvalidArgument("scenario needs a name");
    if (s.sources.empty()) throw InvalidArgument("scenario needs sources");
    if (s.n_x == 0 || s.n_y == 0) throw InvalidArgument("scenario needs n_x, n_y >= 1");
    for (const auto& d : s.sources)
        if (d.n_x() != s.n_x || d.n_y() != s.n_y)
            throw ShapeMismatch("source shape does not match the scenario");
    if (s.model == Model::regression) {
        if (s.loss.kind != LossKind::squared)
            throw InvalidArgument("regression scenarios use the squared loss");
        if (s.labels.size() != s.n_y)
            throw ShapeMismatch("label map does not cover the output set");
        if (s.reg_hypotheses.size() != s.p())
            throw ShapeMismatch("hypothesis count does not match source count");
        for (const auto& h : s.reg_hypotheses)
            if (h.n_x() != s.n_x)
                throw ShapeMismatch("hypothesis does not cover the input set");
    } else {
        if (s.loss.kind != LossKind::cross_entropy)
            throw InvalidArgument("probability scenarios use the cross-entropy loss");
        if (s.prob_hypotheses.size() != s.p())
            throw ShapeMismatch("hypothesis count does not match source count");
        for (const auto& h : s.prob_hypotheses)
            if (h.n_x() != s.n_x || h.n_y() != s.n_y)
                throw ShapeMismatch("hypothesis does not cover the table");
    }
    if (!(s.loss.M > 0.0)) throw InvalidArgument("loss bound M must be positive");
    const double bound = empirical_loss_bound(s);
    if (bound > s.loss.M * (1.0 + 1e-12))
        throw InvalidArgument("pointwise source losses reach " + std::to_string(bound) +
                              ", above the declared bound M = " + std::to_string(s.loss.M));
    for (const auto& t : s.targets)
        if (t.lambda.size() != s.p())
            throw ShapeMismatch("target mixture weight has wrong length");
}

Scenario lower_bound_regression_instance() {
    Scenario s;
    s.name = "lower-reg";
    s.model = Model::regression;
    s.n_x = 2;
    s.n_y = 2;
    s.labels = {0.0, 1.0};
    s.sources.push_back(DiscreteJointDistribution::point_mass(2, 2, 0, 0));
    s.sources.push_back(DiscreteJointDistribution::point_mass(2, 2, 1, 1));
    s.reg_hypotheses.push_back({{0.0, 0.0}});
    s.reg_hypotheses.push_back({{1.0, 1.0}});
    s.loss = {LossKind::squared, 1.0};
    s.targets = default_targets(2);
    s.targets.push_back({"half_half", {0.5, 0.5}});
    s.provenance = "exact point-mass construction";
    validate_scenario(s);
    return s;
}

Scenario lower_bound_crossentropy_instance(std::size_t p) {
    if (p < 2) throw InvalidArgument("cross-entropy lower bound needs p >= 2");
    Scenario s;
    s.name = "lower-xent";
    s.model = Model::probability;
    s.n_x = p;
    s.n_y = p;
    for (std::size_t k = 0; k < p; ++k) {
        s.sources.push_back(DiscreteJointDistribution::point_mass(p, p, k, k));
        std::vector<double> values(p * p, 0.0);
        for (std::size_t x = 0; x < p; ++x) values[x * p + k] = 1.0;
        s.prob_hypotheses.emplace_back(p, p, std::move(values));
    }
    s.loss = {LossKind::cross_entropy, cross_entropy_loss_clipped(0.0)};
    s.targets = default_targets(p);
    s.provenance = "exact point-mass construction";
    validate_scenario(s);
    return s;
}

Scenario gaussian_regression_scenario(std::uint64_t seed, std::size_t n_per_domain) {
    if (n_per_domain < 100)
        throw InvalidArgument("gaussian regression scenario needs n >= 100 per domain");
    const std::vector<std::vector<double>> corners = {
        {1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}};
    const std::vector<std::vector<std::size_t>> members = {{0, 1, 2}, {1, 2, 3}};

    std::vector<GaussianMixtureDensity> densities;
    for (const auto& m : members) {
        std::vector<GaussianMixtureDensity::Component> comps;
        for (std::size_t i : m) comps.push_back({corners[i], 1.0, 1.0 / 3.0});
        densities.emplace_back(2, std::move(comps));
    }

    Rng rng(seed);
    std::vector<std::vector<double>> pooled;
    std::vector<std::vector<std::vector<double>>> per_domain(2);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < n_per_domain; ++i) {
            const std::size_t comp = std::min<std::size_t>(
                static_cast<std::size_t>(rng.uniform01() * 3.0), 2);
            const auto& mean = corners[members[k][comp]];
            std::vector<double> x = {mean[0] + rng.normal(), mean[1] + rng.normal()};
            per_domain[k].push_back(x);
            pooled.push_back(std::move(x));
        }
    }

    const auto label_fn = [](const std::vector<double>& x) {
        return x[0] * x[0] + x[1] * x[1];
    };

    Scenario s;
    s.name = "gauss-reg";
    s.model = Model::regression;
    s.n_x = pooled.size();
    s.n_y = pooled.size();
    s.labels.resize(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) s.labels[i] = label_fn(pooled[i]);

    for (std::size_t k = 0; k < 2; ++k) {
        std::vector<double> mass(pooled.size());
        long double total = 0.0L;
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            mass[i] = densities[k].density(pooled[i]);
            total += mass[i];
        }
        std::vector<double> probs(pooled.size() * pooled.size(), 0.0);
        for (std::size_t i = 0; i < pooled.size(); ++i)
            probs[i * pooled.size() + i] = static_cast<double>(mass[i] / total);
        s.sources.emplace_back(pooled.size(), pooled.size(), std::move(probs));

        std::vector<double> ys(per_domain[k].size());
        for (std::size_t i = 0; i < per_domain[k].size(); ++i)
            ys[i] = label_fn(per_domain[k][i]);
        const auto w = fit_linear_regressor(per_domain[k], ys);
        RegressionHypothesis h;
        h.values.resize(pooled.size());
        for (std::size_t i = 0; i < pooled.size(); ++i)
            h.values[i] = w[0] + w[1] * pooled[i][0] + w[2] * pooled[i][1];
        s.reg_hypotheses.push_back(std::move(h));
    }

    s.loss = {LossKind::squared, empirical_loss_bound(s)};
    s.targets = default_targets(2);
    s.targets.push_back({"half_half", {0.5, 0.5}});
    s.provenance = "analytic gaussian mixture densities reduced over a pooled sample, seed " +
                   std::to_string(seed);
    validate_scenario(s);
    return s;
}

Scenario gaussian_classification_scenario(std::uint64_t seed,
                                          std::size_t n_per_category) {
    if (n_per_category < 50)
        throw InvalidArgument("gaussian classification scenario needs n >= 50 per category");
    constexpr std::size_t n_domains = 3;
    constexpr std::size_t n_cat = 3;
    const double variances[n_domains] = {0.05, 0.05, 0.3};

    Rng rng(seed);
    // Base category means in [-2, 2]^2; later domains rotate them by powers
    // of one fixed random orthonormal map.
    std::vector<std::vector<double>> base_means(n_cat);
    for (auto& m : base_means) m = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};

    double q[2][2];
    {
        double a0 = rng.normal(), a1 = rng.normal();
        double norm = std::sqrt(a0 * a0 + a1 * a1);
        while (norm < 1e-6) {
            a0 = rng.normal();
            a1 = rng.normal();
            norm = std::sqrt(a0 * a0 + a1 * a1);
        }
        q[0][0] = a0 / norm;
        q[1][0] = a1 / norm;
        double b0 = rng.normal(), b1 = rng.normal();
        const double proj = b0 * q[0][0] + b1 * q[1][0];
        b0 -= proj * q[0][0];
        b1 -= proj * q[1][0];
        norm = std::sqrt(b0 * b0 + b1 * b1);
        while (norm < 1e-6) {
            b0 = rng.normal();
            b1 = rng.normal();
            const double pr = b0 * q[0][0] + b1 * q[1][0];
            b0 -= pr * q[0][0];
            b1 -= pr * q[1][0];
            norm = std::sqrt(b0 * b0 + b1 * b1);
        }
        q[0][1] = b0 / norm;
        q[1][1] = b1 / norm;
    }
    const auto apply_q = [&](const std::vector<double>& v) {
        return std::vector<double>{q[0][0] * v[0] + q[0][1] * v[1],
                                   q[1][0] * v[0] + q[1][1] * v[1]};
    };

    std::vector<std::vector<std::vector<double>>> means(n_domains);
    means[0] = base_means;
    for (std::size_t k = 1; k < n_domains; ++k) {
        means[k].resize(n_cat);
        for (std::size_t c = 0; c < n_cat; ++c) means[k][c] = apply_q(means[k - 1][c]);
    }

    std::vector<std::vector<double>> pooled;
    std::vector<std::vector<std::vector<double>>> domain_xs(n_domains);
    std::vector<std::vector<std::size_t>> domain_cats(n_domains);
    for (std::size_t k = 0; k < n_domains; ++k) {
        const double sd = std::sqrt(variances[k]);
        for (std::size_t c = 0; c < n_cat; ++c)
            for (std::size_t i = 0; i < n_per_category; ++i) {
                std::vector<double> x = {means[k][c][0] + sd * rng.normal(),
                                         means[k][c][1] + sd * rng.normal()};
                domain_xs[k].push_back(x);
                domain_cats[k].push_back(c);
                pooled.push_back(std::move(x));
            }
    }

    Scenario s;
    s.name = "gauss-xent";
    s.model = Model::probability;
    s.n_x = pooled.size();
    s.n_y = n_cat;

    for (std::size_t k = 0; k < n_domains; ++k) {
        std::vector<GaussianMixtureDensity> category_density;
        for (std::size_t c = 0; c < n_cat; ++c)
            category_density.emplace_back(
                2, std::vector<GaussianMixtureDensity::Component>{
                       {means[k][c], variances[k], 1.0}});
        std::vector<double> probs(pooled.size() * n_cat);
        long double total = 0.0L;
        for (std::size_t i = 0; i < pooled.size(); ++i)
            for (std::size_t c = 0; c < n_cat; ++c) {
                const double v =
                    category_density[c].density(pooled[i]) / static_cast<double>(n_cat);
                probs[i * n_cat + c] = v;
                total += v;
            }
        for (auto& v : probs) v = static_cast<double>(v / total);
        s.sources.emplace_back(pooled.size(), n_cat, std::move(probs));

        const auto w = fit_logistic(domain_xs[k], domain_cats[k], n_cat);
        std::vector<double> values(pooled.size() * n_cat);
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            const auto row = softmax_row(w, pooled[i]);
            for (std::size_t c = 0; c < n_cat; ++c) values[i * n_cat + c] = row[c];
        }
        s.prob_hypotheses.emplace_back(pooled.size(), n_cat, std::move(values));
    }

    s.loss = {LossKind::cross_entropy, empirical_loss_bound(s)};
    s.targets = default_targets(n_domains);
    s.provenance = "analytic gaussian densities; means drawn in [-2,2]^2, domain map from an "
                   "orthonormalized random matrix; reduced over a pooled sample, seed " +
                   std::to_string(seed);
    validate_scenario(s);
    return s;
}

std::vector<BuiltinInfo> builtin_scenarios() {
    return {
        {"lower-reg", "two point-mass regression domains where convex combinations fail"},
        {"lower-xent", "p point-mass probability domains where convex combinations fail"},
        {"gauss-reg", "two overlapping planar gaussian-mixture regression domains"},
        {"gauss-xent", "three gaussian classification domains, three categories"},
    };
}

Scenario make_builtin(const std::string& name, std::uint64_t seed, std::size_t p,
                      std::size_t n) {
    if (name == "lower-reg") return lower_bound_regression_instance();
    if (name == "lower-xent") return lower_bound_crossentropy_instance(p);
    if (name == "gauss-reg") return gaussian_regression_scenario(seed, n == 0 ? 150 : n);
    if (name == "gauss-xent")
        return gaussian_classification_scenario(seed, n == 0 ? 70 : n);
    throw InvalidArgument("unknown builtin scenario: " + name);
}

DiscreteJointDistribution smoothed_histogram_from_counts(
    const std::vector<double>& counts, double smoothing) {
    if (counts.empty()) throw EmptySample("histogram needs at least one cell");
    if (smoothing < 0.0) throw InvalidArgument("smoothing must be nonnegative");
    long double total = 0.0L;
    for (double c : counts) {
        if (c < 0.0) throw InvalidArgument("cell counts must be nonnegative");
        total += c;
    }
    const long double denom =
        total + static_cast<long double>(smoothing) * static_cast<long double>(counts.size());
    if (denom <= 0.0L) throw EmptySample("histogram has no mass");
    std::vector<double> probs(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        probs[i] = static_cast<double>((counts[i] + smoothing) / denom);
    return DiscreteJointDistribution(counts.size(), 1, std::move(probs));
}

DiscreteJointDistribution estimate_density_histogram(const EmpiricalSample& sample,
                                                     std::size_t bins,
                                                     double smoothing) {
    if (sample.points.empty()) throw EmptySample("histogram needs sample points");
    if (bins == 0) throw InvalidArgument("histogram needs bins >= 1");
    const std::size_t dims = sample.points.front().x.size();
    if (dims == 0) throw InvalidArgument("sample points need at least one feature");

    std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
    for (const auto& pt : sample.points) {
        if (pt.x.size() != dims) throw ShapeMismatch("sample points have mixed dimensions");
        for (std::size_t d = 0; d < dims; ++d) {
            lo[d] = std::min(lo[d], pt.x[d]);
            hi[d] = std::max(hi[d], pt.x[d]);
        }
    }
    std::vector<double> width(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const double span = hi[d] - lo[d];
        width[d] = span > 0.0 ? span / static_cast<double>(bins) : 1.0;
    }

    std::size_t cells = 1;
    for (std::size_t d = 0; d < dims; ++d) {
        if (cells > kMaxGridPoints / bins)
            throw GridTooLarge("histogram cell count exceeds the cap");
        cells *= bins;
    }
    std::vector<double> counts(cells, 0.0);
    for (const auto& pt : sample.points) {
        std::size_t cell = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            auto idx = static_cast<std::size_t>((pt.x[d] - lo[d]) / width[d]);
            idx = std::min(idx, bins - 1);
            cell = cell * bins + idx;
        }
        counts[cell] += 1.0;
    }
    return smoothed_histogram_from_counts(counts, smoothing);
}

KdeDensity::KdeDensity(std::vector<std::vector<double>> points, double bandwidth)
    : points_(std::move(points)), bandwidth_(bandwidth) {
    if (points_.empty()) throw EmptySample("density estimate needs sample points");
    if (!(bandwidth_ > 0.0)) throw InvalidArgument("bandwidth must be positive");
    dims_ = points_.front().size();
    for (const auto& pt : points_)
        if (pt.size() != dims_) throw ShapeMismatch("sample points have mixed dimensions");
}

double KdeDensity::eval(const std::vector<double>& x) const {
    if (x.size() != dims_) throw ShapeMismatch("evaluation point has wrong dimension");
    const double h2 = bandwidth_ * bandwidth_;
    const double norm =
        std::pow(2.0 * M_PI * h2, -0.5 * static_cast<double>(dims_)) /
        static_cast<double>(points_.size());
    long double total = 0.0L;
    for (const auto& pt : points_) {
        double sq = 0.0;
        for (std::size_t d = 0; d < dims_; ++d) {
            const double diff = x[d] - pt[d];
            sq += diff * diff;
        }
        total += std::exp(-0.5 * sq / h2);
    }
    return static_cast<double>(total) * norm;
}

KdeDensity estimate_density_kde(const EmpiricalSample& sample, double bandwidth) {
    if (sample.points.empty()) throw EmptySample("density estimate needs sample points");
    std::vector<std::vector<double>> pts;
    pts.reserve(sample.points.size());
    for (const auto& pt : sample.points) pts.push_back(pt.x);
    return KdeDensity(std::move(pts), bandwidth);
}

double kde_cv_bandwidth(const EmpiricalSample& sample,
                        const std::vector<double>& candidates) {
    if (sample.points.size() < 2)
        throw EmptySample("bandwidth selection needs at least two points");
    if (candidates.empty()) throw InvalidArgument("bandwidth selection needs candidates");
    const std::size_t n = sample.points.size();
    const std::size_t dims = sample.points.front().x.size();

    double best_bw = candidates.front();
    double best_ll = -std::numeric_limits<double>::infinity();
    for (const double bw : candidates) {
        if (!(bw > 0.0)) throw InvalidArgument("candidate bandwidth must be positive");
        const double h2 = bw * bw;
        const double norm = std::pow(2.0 * M_PI * h2, -0.5 * static_cast<double>(dims)) /
                            static_cast<double>(n - 1);
        long double ll = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double density = 0.0L;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double sq = 0.0;
                for (std::size_t d = 0; d < dims; ++d) {
                    const double diff = sample.points[i].x[d] - sample.points[j].x[d];
                    sq += diff * diff;
                }
                density += std::exp(-0.5 * sq / h2);
            }
            ll += std::log(std::max(static_cast<double>(density) * norm, 1e-300));
        }
        if (ll > best_ll) {
            best_ll = static_cast<double>(ll);
            best_bw = bw;
        }
    }
    return best_bw;
}

SweepTable robustness_sweep(const Scenario& scenario, const SimplexVector& z,
                            double eta, double lambda_resolution,
                            CombinerKind combiner) {
    validate_scenario(scenario);
    if (z.size() != scenario.p())
        throw ShapeMismatch("sweep weight length does not match source count");

    const std::size_t p = scenario.p();
    SweepTable table;
    table.header = {"target", "lambda", "dw", "unif"};
    for (std::size_t k = 0; k < p; ++k)
        table.header.push_back("h_" + std::to_string(k + 1));
    table.header.push_back("best_convex");

    RegressionHypothesis dw_r, unif_r;
    ProbabilityHypothesis dw_p(1, 1, {1.0}), unif_p(1, 1, {1.0});
    if (scenario.model == Model::regression) {
        dw_r = dw_regression(z, eta, scenario.sources, scenario.reg_hypotheses);
        unif_r = convex_combination(SimplexVector::uniform(p), scenario.reg_hypotheses);
    } else {
        switch (combiner) {
            case CombinerKind::probability:
                dw_p = dw_probability(z, eta, scenario.sources, scenario.prob_hypotheses);
                break;
            case CombinerKind::normalized:
                dw_p = dw_normalized(z, eta, scenario.sources, scenario.prob_hypotheses);
                break;
            case CombinerKind::marginal:
                dw_p = dw_marginal(z, eta, scenario.sources, scenario.prob_hypotheses);
                break;
        }
        unif_p = convex_combination(SimplexVector::uniform(p), scenario.prob_hypotheses);
    }

    const auto loss_on = [&](const DiscreteJointDistribution& target,
                             const RegressionHypothesis& hr,
                             const ProbabilityHypothesis& hp) {
        return scenario.model == Model::regression
                   ? expected_squared_loss(target, hr, scenario.labels)
                   : expected_cross_entropy(target, hp, /*clipped=*/true);
    };

    const auto grid = simplex_grid({p, lambda_resolution});
    table.rows.reserve(grid.size());
    std::size_t row_id = 0;
    for (const auto& lambda : grid) {
        const auto target = mixture(lambda, scenario.sources);
        SweepRow row;
        row.target = "lambda_" + std::to_string(row_id++);
        row.lambda = lambda.weights();
        row.dw = loss_on(target, dw_r, dw_p);
        row.unif = loss_on(target, unif_r, unif_p);
        row.per_source.resize(p);
        for (std::size_t k = 0; k < p; ++k)
            row.per_source[k] =
                scenario.model == Model::regression
                    ? loss_on(target, scenario.reg_hypotheses[k], dw_p)
                    : loss_on(target, dw_r, scenario.prob_hypotheses[k]);
        if (scenario.model == Model::regression) {
            const auto oracle_comb = convex_combination(lambda, scenario.reg_hypotheses);
            row.best_convex = loss_on(target, oracle_comb, dw_p);
        } else {
            const auto oracle_comb = convex_combination(lambda, scenario.prob_hypotheses);
            row.best_convex = loss_on(target, dw_r, oracle_comb);
        }
        table.rows.push_back(std::move(row));
    }

    table.worst.target = "worst_case";
    table.worst.lambda.clear();
    table.worst.per_source.assign(p, -std::numeric_limits<double>::infinity());
    table.worst.dw = table.worst.unif = table.worst.best_convex =
        -std::numeric_limits<double>::infinity();
    for (const auto& row : table.rows) {
        table.worst.dw = std::max(table.worst.dw, row.dw);
        table.worst.unif = std::max(table.worst.unif, row.unif);
        table.worst.best_convex = std::max(table.worst.best_convex, row.best_convex);
        for (std::size_t k = 0; k < p; ++k)
            table.worst.per_source[k] = std::max(table.worst.per_source[k], row.per_source[k]);
    }
    return table;
}

namespace {

json distribution_to_json(const DiscreteJointDistribution& d) {
    json rows = json::array();
    for (std::size_t x = 0; x < d.n_x(); ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < d.n_y(); ++y) row.push_back(d.at(x, y));
        rows.push_back(std::move(row));
    }
    return json{{"probs", std::move(rows)}};
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["model"] = s.model == Model::regression ? "R" : "P";
    j["loss"] = {{"kind", s.loss.kind == LossKind::squared ? "squared" : "cross_entropy"},
                 {"M", s.loss.M}};
    j["n_x"] = s.n_x;
    j["n_y"] = s.n_y;
    j["labels"] = s.labels;
    j["sources"] = json::array();
    for (const auto& d : s.sources) j["sources"].push_back(distribution_to_json(d));
    j["hypotheses"] = json::array();
    if (s.model == Model::regression) {
        for (const auto& h : s.reg_hypotheses)
            j["hypotheses"].push_back(json{{"values", h.values}});
    } else {
        for (const auto& h : s.prob_hypotheses) {
            json rows = json::array();
            for (std::size_t x = 0; x < h.n_x(); ++x) {
                json row = json::array();
                for (std::size_t y = 0; y < h.n_y(); ++y) row.push_back(h.at(x, y));
                rows.push_back(std::move(row));
            }
            j["hypotheses"].push_back(json{{"values", std::move(rows)}});
        }
    }
    j["targets"] = json::array();
    for (const auto& t : s.targets)
        j["targets"].push_back(json{{"name", t.name}, {"lambda", t.lambda}});
    j["provenance"] = s.provenance;
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("scenario file is not valid JSON: ") + e.what());
    }
    try {
        Scenario s;
        s.name = j.at("name").get<std::string>();
        const auto model = j.at("model").get<std::string>();
        if (model != "R" && model != "P")
            throw InvalidArgument("scenario model must be \"R\" or \"P\"");
        s.model = model == "R" ? Model::regression : Model::probability;
        const auto kind = j.at("loss").at("kind").get<std::string>();
        if (kind != "squared" && kind != "cross_entropy")
            throw InvalidArgument("loss kind must be squared or cross_entropy");
        s.loss.kind = kind == "squared" ? LossKind::squared : LossKind::cross_entropy;
        s.loss.M = j.at("loss").at("M").get<double>();
        s.n_x = j.at("n_x").get<std::size_t>();
        s.n_y = j.at("n_y").get<std::size_t>();
        if (j.contains("labels")) s.labels = j["labels"].get<std::vector<double>>();

        for (const auto& src : j.at("sources")) {
            const auto& rows = src.at("probs");
            if (rows.size() != s.n_x)
                throw ShapeMismatch("source table has wrong row count");
            std::vector<double> probs;
            probs.reserve(s.n_x * s.n_y);
            for (const auto& row : rows) {
                if (row.size() != s.n_y)
                    throw ShapeMismatch("source table has wrong column count");
                for (const auto& v : row) probs.push_back(v.get<double>());
            }
            s.sources.emplace_back(s.n_x, s.n_y, std::move(probs));
        }
        for (const auto& hyp : j.at("hypotheses")) {
            const auto& values = hyp.at("values");
            if (s.model == Model::regression) {
                s.reg_hypotheses.push_back({values.get<std::vector<double>>()});
            } else {
                if (values.size() != s.n_x)
                    throw ShapeMismatch("hypothesis table has wrong row count");
                std::vector<double> flat;
                flat.reserve(s.n_x * s.n_y);
                for (const auto& row : values) {
                    if (row.size() != s.n_y)
                        throw ShapeMismatch("hypothesis table has wrong column count");
                    for (const auto& v : row) flat.push_back(v.get<double>());
                }
                s.prob_hypotheses.emplace_back(s.n_x, s.n_y, std::move(flat));
            }
        }
        if (j.contains("targets"))
            for (const auto& t : j["targets"])
                s.targets.push_back({t.at("name").get<std::string>(),
                                     t.at("lambda").get<std::vector<double>>()});
        if (j.contains("provenance")) s.provenance = j["provenance"].get<std::string>();
        validate_scenario(s);
        return s;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("scenario file is malformed: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json(buffer.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write scenario file: " + path);
    out << scenario_to_json(s) << '\n';
}

}  // namespace msa
