#include "g2l/synth.hpp"
#include "g2l/errors.hpp"

#include <cmath>
#include <random>

namespace g2l {

namespace {

// Box-Muller on raw mt19937_64 output; keeps generated data identical across
// standard library implementations.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step, decorrelates per-cluster streams
    std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

SynthResult generate_clusters(const std::vector<ClusterSpec>& specs, std::size_t dim,
                              std::uint64_t seed) {
    if (dim == 0) {
        throw validation_error("generate_clusters: dim must be >= 1");
    }
    if (specs.empty()) {
        throw validation_error("generate_clusters: no cluster specs");
    }
    for (const auto& spec : specs) {
        if (spec.name.empty()) {
            throw validation_error("generate_clusters: cluster with empty name");
        }
        if (!(spec.sigma > 0.0)) {
            throw validation_error("cluster '" + spec.name + "': sigma must be > 0");
        }
        if (spec.count < 1) {
            throw validation_error("cluster '" + spec.name + "': count must be >= 1");
        }
        if (spec.center.size() != dim) {
            throw validation_error("cluster '" + spec.name + "': center has " +
                                   std::to_string(spec.center.size()) +
                                   " components, expected " + std::to_string(dim));
        }
    }

    SynthResult result;
    result.combined.name = "combined";
    for (std::size_t ci = 0; ci < specs.size(); ++ci) {
        const auto& spec = specs[ci];
        Dataset cluster;
        cluster.name = spec.name;
        NormalSource normals(mix_seed(seed, ci + 1));
        for (std::size_t k = 0; k < spec.count; ++k) {
            FeatureVector fv;
            fv.id = spec.name + "_" + std::to_string(k);
            fv.components.resize(dim);
            for (std::size_t c = 0; c < dim; ++c) {
                const double v = spec.center[c] + spec.sigma * normals.next();
                fv.components[c] = v < 0.0 ? 0.0 : v; // rectified activations
            }
            cluster.vectors.push_back(fv);
            result.combined.vectors.push_back(std::move(fv));
        }
        result.clusters.push_back(std::move(cluster));
    }
    return result;
}

std::vector<ClusterSpec> outlier_scenario_specs(std::size_t dim, std::size_t regular,
                                                std::size_t per_cluster, double sigma,
                                                double outlier_distance, std::uint64_t seed) {
    if (dim == 0 || regular == 0 || per_cluster == 0) {
        throw validation_error("outlier_scenario_specs: dim, regular, per_cluster must be >= 1");
    }
    if (!(sigma > 0.0) || !(outlier_distance > 0.0)) {
        throw validation_error("outlier_scenario_specs: sigma and outlier_distance must be > 0");
    }
    NormalSource centers(mix_seed(seed, 0));
    std::vector<ClusterSpec> specs;
    specs.reserve(regular + 1);
    for (std::size_t i = 0; i < regular; ++i) {
        ClusterSpec spec;
        spec.name = "cluster_" + (i < 10 ? "0" + std::to_string(i) : std::to_string(i));
        spec.sigma = sigma;
        spec.count = per_cluster;
        spec.center.resize(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            spec.center[c] = (2.0 + 8.0 * centers.uniform01()) * sigma;
        }
        specs.push_back(std::move(spec));
    }
    // Outlier displaced along the all-ones diagonal, so every component stays
    // positive and its distance from the regular block is outlier_distance.
    ClusterSpec outlier;
    outlier.name = "outlier";
    outlier.sigma = sigma;
    outlier.count = per_cluster;
    outlier.center.assign(dim, 6.0 * sigma + outlier_distance / std::sqrt(static_cast<double>(dim)));
    specs.push_back(std::move(outlier));
    return specs;
}

} // namespace g2l
