#include "g2l/features.hpp"
#include "g2l/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <utility>

namespace g2l {

void Dataset::validate() const {
    if (vectors.empty()) {
        throw validation_error("dataset '" + name + "' is empty");
    }
    const std::size_t n = vectors.front().components.size();
    if (n == 0) {
        throw validation_error("dataset '" + name + "' has zero-dimensional vectors");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].components.size() != n) {
            throw validation_error("dataset '" + name + "': vector " + std::to_string(i) + " ('" +
                                   vectors[i].id + "') has " +
                                   std::to_string(vectors[i].components.size()) +
                                   " components, expected " + std::to_string(n));
        }
    }
}

Metric parse_metric(std::string_view name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "cityblock") return Metric::cityblock;
    if (name == "sqrt_js") return Metric::sqrt_js;
    throw validation_error("unknown metric '" + std::string(name) +
                           "' (expected euclidean, cityblock, or sqrt_js)");
}

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::euclidean: return "euclidean";
        case Metric::cityblock: return "cityblock";
        case Metric::sqrt_js: return "sqrt_js";
    }
    return "unknown";
}

void AnchorSet::validate() const {
    if (representatives.size() < 2) {
        throw validation_error("anchor set needs at least 2 representatives, got " +
                               std::to_string(representatives.size()));
    }
    std::set<std::pair<std::string, int>> seen;
    const std::size_t n = representatives.front().vector.components.size();
    for (const auto& rep : representatives) {
        if (!seen.insert({rep.source_name, rep.rep_index}).second) {
            throw validation_error("duplicate representative (" + rep.source_name + ", " +
                                   std::to_string(rep.rep_index) + ")");
        }
        if (rep.vector.components.size() != n) {
            throw validation_error("representative '" + rep.qualified_name + "' has " +
                                   std::to_string(rep.vector.components.size()) +
                                   " components, expected " + std::to_string(n));
        }
    }
}

std::size_t AnchorSet::dimension() const {
    return representatives.empty() ? 0 : representatives.front().vector.components.size();
}

ProbabilityVector::ProbabilityVector(std::vector<double> components)
    : components_(std::move(components)) {
    double sum = 0.0;
    for (double c : components_) {
        if (c < 0.0 || std::isnan(c)) {
            throw validation_error("probability vector has a negative or NaN component");
        }
        sum += c;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw validation_error("probability vector sums to " + std::to_string(sum) +
                               ", expected 1");
    }
}

ProbabilityVector ProbabilityVector::normalize(const std::vector<double>& raw) {
    long double sum = 0.0L;
    for (double c : raw) {
        if (c < 0.0 || std::isnan(c)) {
            throw validation_error("cannot normalize: negative or NaN component");
        }
        sum += c;
    }
    if (sum <= 0.0L) {
        throw validation_error("cannot normalize: components sum to zero");
    }
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = static_cast<double>(raw[i] / sum);
    }
    return ProbabilityVector(std::move(out));
}

namespace {

// Unbiased draw from [0, n) so sampling stays reproducible across standard
// library implementations.
std::uint64_t bounded_uint64(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

// First `m` entries of a seeded partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m,
                                                    std::uint64_t seed) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded_uint64(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

std::vector<double> mean_of(const std::vector<FeatureVector>& vectors,
                            const std::vector<std::size_t>& indices) {
    const std::size_t dim = vectors.front().components.size();
    std::vector<long double> acc(dim, 0.0L);
    for (std::size_t idx : indices) {
        for (std::size_t c = 0; c < dim; ++c) {
            acc[c] += vectors[idx].components[c];
        }
    }
    std::vector<double> out(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        out[c] = static_cast<double>(acc[c] / static_cast<long double>(indices.size()));
    }
    return out;
}

double sq_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
        acc += d * d;
    }
    return static_cast<double>(acc);
}

} // namespace

Representative aggregate_mean(const Dataset& ds, double sample_fraction, std::uint64_t seed) {
    ds.validate();
    if (!(sample_fraction > 0.0) || sample_fraction > 1.0) {
        throw validation_error("sample_fraction must be in (0, 1], got " +
                               std::to_string(sample_fraction));
    }
    const std::size_t n = ds.vectors.size();
    std::vector<std::size_t> indices;
    if (sample_fraction == 1.0) {
        indices.resize(n);
        std::iota(indices.begin(), indices.end(), std::size_t{0});
    } else {
        const std::size_t m = static_cast<std::size_t>(
            std::ceil(sample_fraction * static_cast<double>(n)));
        indices = sample_without_replacement(n, std::max<std::size_t>(m, 1), seed);
    }
    Representative rep;
    rep.source_name = ds.name;
    rep.rep_index = 0;
    rep.qualified_name = ds.name;
    rep.vector = FeatureVector{ds.name, mean_of(ds.vectors, indices)};
    return rep;
}

std::vector<Representative> aggregate_kmeans(const Dataset& ds, int k, std::uint64_t seed,
                                             int max_iters) {
    ds.validate();
    const std::size_t n = ds.vectors.size();
    if (k <= 0) {
        throw validation_error("k must be >= 1, got " + std::to_string(k));
    }
    if (static_cast<std::size_t>(k) > n) {
        throw validation_error("k = " + std::to_string(k) + " exceeds vector count " +
                               std::to_string(n));
    }

    // Farthest-first initialization: seeded first pick, then repeatedly the
    // point farthest from its nearest chosen center (lowest index on ties).
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(ds.vectors[bounded_uint64(rng, n)].components);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centers.size() < static_cast<std::size_t>(k)) {
        std::size_t far_idx = 0;
        double far_dist = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], sq_euclidean(ds.vectors[i].components, centers.back()));
            if (nearest[i] > far_dist) {
                far_dist = nearest[i];
                far_idx = i;
            }
        }
        centers.push_back(ds.vectors[far_idx].components);
    }

    std::vector<int> assignment(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_dist = sq_euclidean(ds.vectors[i].components, centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_euclidean(ds.vectors[i].components, centers[c]);
                if (d < best_dist) {
                    best_dist = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        for (int c = 0; c < k; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i) {
                if (assignment[i] == c) members.push_back(i);
            }
            if (!members.empty()) {
                centers[c] = mean_of(ds.vectors, members);
            }
            // Empty clusters keep their previous center.
        }
    }

    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignment) sizes[static_cast<std::size_t>(a)]++;
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)]; });

    std::vector<Representative> reps;
    reps.reserve(static_cast<std::size_t>(k));
    for (int rank = 0; rank < k; ++rank) {
        Representative rep;
        rep.source_name = ds.name;
        rep.rep_index = rank;
        rep.qualified_name = (k == 1) ? ds.name : ds.name + "_" + std::to_string(rank);
        rep.vector = FeatureVector{rep.qualified_name, centers[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])]};
        reps.push_back(std::move(rep));
    }
    return reps;
}

namespace {

void require_same_dimension(const FeatureVector& a, const FeatureVector& b) {
    if (a.components.size() != b.components.size()) {
        throw validation_error("dimension mismatch: '" + a.id + "' has " +
                               std::to_string(a.components.size()) + " components, '" + b.id +
                               "' has " + std::to_string(b.components.size()));
    }
}

// Jensen-Shannon divergence in bits between the normalizations of a and b.
double js_divergence(const FeatureVector& a, const FeatureVector& b) {
    const auto p = ProbabilityVector::normalize(a.components).components();
    const auto q = ProbabilityVector::normalize(b.components).components();
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) js += 0.5 * p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) js += 0.5 * q[i] * std::log2(q[i] / m);
    }
    return std::clamp(js, 0.0, 1.0);
}

} // namespace

double squared_distance(const FeatureVector& a, const FeatureVector& b, Metric metric) {
    require_same_dimension(a, b);
    switch (metric) {
        case Metric::euclidean:
            return sq_euclidean(a.components, b.components);
        case Metric::cityblock: {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < a.components.size(); ++i) {
                acc += std::fabs(static_cast<long double>(a.components[i]) - b.components[i]);
            }
            const double d = static_cast<double>(acc);
            return d * d;
        }
        case Metric::sqrt_js:
            return js_divergence(a, b);
    }
    throw validation_error("unknown metric");
}

double distance(const FeatureVector& a, const FeatureVector& b, Metric metric) {
    if (metric == Metric::euclidean || metric == Metric::sqrt_js) {
        return std::sqrt(squared_distance(a, b, metric));
    }
    require_same_dimension(a, b);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        acc += std::fabs(static_cast<long double>(a.components[i]) - b.components[i]);
    }
    return static_cast<double>(acc);
}

double kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q, double epsilon) {
    if (p.size() != q.size()) {
        throw validation_error("kl_divergence: length mismatch (" + std::to_string(p.size()) +
                               " vs " + std::to_string(q.size()) + ")");
    }
    if (!(epsilon > 0.0)) {
        throw validation_error("kl_divergence: epsilon must be positive");
    }
    const std::size_t n = p.size();
    long double p_sum = 0.0L;
    long double q_sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        p_sum += p.components()[i] + epsilon;
        q_sum += q.components()[i] + epsilon;
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pi = static_cast<double>((p.components()[i] + epsilon) / p_sum);
        const double qi = static_cast<double>((q.components()[i] + epsilon) / q_sum);
        kl += pi * std::log2(pi / qi);
    }
    return kl;
}

double dataset_divergence(const Dataset& target, const Dataset& reference, double sample_fraction,
                          std::uint64_t seed, double epsilon, std::vector<std::string>* warnings) {
    auto normalized_mean = [&](const Dataset& ds) {
        std::vector<double> mean = aggregate_mean(ds, sample_fraction, seed).vector.components;
        std::size_t clamped = 0;
        for (double& c : mean) {
            if (c < 0.0) {
                c = 0.0;
                ++clamped;
            }
        }
        if (clamped > 0 && warnings != nullptr) {
            warnings->push_back("dataset '" + ds.name + "': clamped " + std::to_string(clamped) +
                                " negative mean component(s) to 0");
        }
        try {
            return ProbabilityVector::normalize(mean);
        } catch (const validation_error&) {
            throw validation_error("dataset '" + ds.name +
                                   "': mean vector is all zero after clamping");
        }
    };
    const ProbabilityVector p = normalized_mean(target);
    const ProbabilityVector q = normalized_mean(reference);
    if (p.size() != q.size()) {
        throw validation_error("dataset_divergence: dimensionality mismatch");
    }
    return kl_divergence(p, q, epsilon);
}

double entropy_bits(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) {
        throw validation_error("entropy_bits: empty distribution");
    }
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;
}

} // namespace g2l
