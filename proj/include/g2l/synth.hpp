#pragma once

#include "g2l/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace g2l {

/// One synthetic source: isotropic Gaussian samples around `center`,
/// componentwise clamped at zero to mimic rectified activations.
struct ClusterSpec {
    std::string name;
    std::vector<double> center;
    double sigma = 1.0;
    std::size_t count = 1;
};

struct SynthResult {
    std::vector<Dataset> clusters; // one dataset per spec, in spec order
    Dataset combined;              // all samples, spec order then sample order
};

/// Seeded generation; every cluster draws from its own stream derived from
/// (seed, cluster index), so output does not depend on evaluation order.
SynthResult generate_clusters(const std::vector<ClusterSpec>& specs, std::size_t dim,
                              std::uint64_t seed);

/// Cluster layout used for the entropy-structure experiments: `regular`
/// clusters with centers drawn componentwise from [2*sigma, 10*sigma], plus
/// one "outlier" cluster displaced by `outlier_distance` along the diagonal.
std::vector<ClusterSpec> outlier_scenario_specs(std::size_t dim, std::size_t regular,
                                                std::size_t per_cluster, double sigma,
                                                double outlier_distance, std::uint64_t seed);

} // namespace g2l
