#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace g2l {

/// A point in R^n with an identity.
struct FeatureVector {
    std::string id;
    std::vector<double> components;
};

/// Named collection of feature vectors of uniform dimensionality.
struct Dataset {
    std::string name;
    std::vector<FeatureVector> vectors;

    std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().components.size(); }
    /// Throws validation_error if empty or dimensionality is not uniform.
    void validate() const;
};

/// A named anchor vector produced by aggregation. `qualified_name` is the
/// bare source name for single-representative sources and
/// "<source>_<suffix>" otherwise.
struct Representative {
    std::string source_name;
    int rep_index = 0;
    std::string qualified_name;
    FeatureVector vector;
};

enum class Metric { euclidean, cityblock, sqrt_js };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

/// The full set of anchors used for labeling, plus the metric they are
/// measured under.
struct AnchorSet {
    std::vector<Representative> representatives;
    Metric metric = Metric::euclidean;

    /// Requires >= 2 representatives, unique (source_name, rep_index) pairs,
    /// and uniform dimensionality.
    void validate() const;
    std::size_t dimension() const;
};

/// Nonnegative components summing to 1 (within 1e-9), validated at
/// construction.
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<double> components);

    /// Scales a nonnegative vector to sum 1. Throws if any component is
    /// negative or the sum is zero.
    static ProbabilityVector normalize(const std::vector<double>& raw);

    const std::vector<double>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }

private:
    std::vector<double> components_;
};

/// Componentwise mean over a seeded, without-replacement sample of
/// ceil(fraction * count) vectors. Fraction 1.0 takes the exact full mean.
Representative aggregate_mean(const Dataset& ds, double sample_fraction, std::uint64_t seed);

/// Lloyd k-means with seeded farthest-first initialization. Representatives
/// are ordered by descending cluster size (stable on ties) so qualified
/// names are deterministic.
std::vector<Representative> aggregate_kmeans(const Dataset& ds, int k, std::uint64_t seed,
                                             int max_iters = 100);

double distance(const FeatureVector& a, const FeatureVector& b, Metric metric);

/// distance(a,b,metric) squared; for the Euclidean metric the square root is
/// never taken, which keeps 1-simplex comparisons exact.
double squared_distance(const FeatureVector& a, const FeatureVector& b, Metric metric);

/// KL(p || q) in bits over the epsilon-smoothed, re-normalized vectors:
/// both inputs get +epsilon per component and are rescaled to sum 1 before
/// the usual sum of p_i * log2(p_i / q_i).
double kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q, double epsilon);

/// KL divergence between the normalized mean vectors of two datasets.
/// Negative mean components are clamped to 0; each clamp appends a message
/// to `warnings` when provided.
double dataset_divergence(const Dataset& target, const Dataset& reference, double sample_fraction,
                          std::uint64_t seed, double epsilon,
                          std::vector<std::string>* warnings = nullptr);

/// Shannon entropy in bits of an empirical distribution given as counts.
double entropy_bits(const std::vector<std::size_t>& counts);

} // namespace g2l
