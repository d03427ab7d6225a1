#pragma once

#include "g2l/features.hpp"
#include "g2l/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace g2l {

/// One per-dimension extremization choice. Lowercase decisions record a
/// single name, uppercase record the (primary, secondary) extreme pair while
/// only the primary joins the simplex.
enum class Decision : char {
    closest = 'c',        // record and add the content minimizer
    farthest = 'f',       // record and add the content maximizer
    closest_pair = 'C',   // record minimizer then maximizer, add the minimizer
    farthest_pair = 'F',  // record maximizer then minimizer, add the maximizer
};

inline bool records_pair(Decision d) {
    return d == Decision::closest_pair || d == Decision::farthest_pair;
}

/// A sequence over {c, f, C, F}; its length is d_max.
struct Policy {
    std::vector<Decision> decisions;

    std::size_t d_max() const { return decisions.size(); }
    /// d_max plus one extra name per pair decision; in [d_max, 2*d_max].
    std::size_t label_length() const;
    std::string text() const;
};

/// Parses a policy string such as "Cfff". Throws validation_error naming the
/// 1-based position of the first illegal character.
Policy parse_policy(std::string_view text);

/// Output of labeling one target.
struct PseudoLabel {
    std::vector<std::string> names;                      // qualified representative names
    std::vector<std::pair<std::string, int>> chosen;     // (source, rep_index) added per dimension
    std::vector<double> contents;                        // extremal squared content per dimension
};

/// Target vertex plus the representatives chosen so far, with their pairwise
/// squared distances cached incrementally (one new row per added vertex).
class SimplexState {
public:
    explicit SimplexState(FeatureVector target);

    /// `sq_row` holds squared distances from `rep` to the current vertices,
    /// ordered target first then chosen representatives.
    void add_vertex(Representative rep, std::vector<double> sq_row);

    std::size_t vertex_count() const { return 1 + chosen_.size(); }
    const FeatureVector& target() const { return target_; }
    const std::vector<Representative>& chosen() const { return chosen_; }
    double cached_squared(std::size_t i, std::size_t j) const;

    /// Current vertex set as a validated DistanceMatrix.
    DistanceMatrix base_matrix() const;
    /// Base matrix extended by one candidate whose squared distances to the
    /// current vertices are `candidate_row`.
    DistanceMatrix extended_matrix(const std::vector<double>& candidate_row) const;

private:
    FeatureVector target_;
    std::vector<Representative> chosen_;
    std::vector<double> grid_; // (1+chosen)^2 squared distances, row-major
};

/// Runs the greedy per-dimension content extremization for one target.
/// Requires anchors.size() >= policy.label_length() so that names never
/// repeat, and matching dimensionality. Ties break by ascending
/// (source_name, rep_index).
PseudoLabel label_item(const FeatureVector& target, const AnchorSet& anchors,
                       const Policy& policy);

struct LabelFailure {
    std::size_t index = 0;
    std::string id;
    std::string message;
};

/// Per-dataset labeling result: `labels[i]` is empty exactly when item i
/// appears in `failures`.
struct LabelBatch {
    std::vector<std::optional<PseudoLabel>> labels;
    std::vector<LabelFailure> failures;
};

/// Labels every target, in input order. Item failures are collected, not
/// thrown; `threads` > 1 splits the targets without changing any result.
LabelBatch label_dataset(const Dataset& targets, const AnchorSet& anchors, const Policy& policy,
                         unsigned threads = 1);

/// Number of distinct policies at dimension d: 4^d.
std::uint64_t count_policies(int d);

/// Number of distinct name-sequence lengths: 2^d * binomial(d, l - d) for
/// l in [d, 2d].
std::uint64_t count_policies_by_length(int d, int l);

enum class ExtremalMode { min, max };

/// Exhaustive search over all (d+1)-subsets of representatives (no target
/// vertex); returns the qualified names of the content-extremal subset in
/// ascending (source, rep_index) order, first subset winning ties.
std::vector<std::string> find_extremal_simplex(const AnchorSet& anchors, int d, ExtremalMode mode);

/// Shannon entropy in bits of the empirical distribution over distinct full
/// name sequences.
double label_entropy(const std::vector<PseudoLabel>& labels);

} // namespace g2l
