#pragma once

#include "g2l/features.hpp"
#include "g2l/labeling.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace g2l {

/// All 4^d policies for one dimension, arranged on a 2^d x 2^d grid. The
/// grid nests the 2x2 block [[c, f], [C, F]] at every scale: bit k of the
/// row index (most significant first) decides lower/upper case of decision
/// k, bit k of the column index decides closest/farthest.
std::vector<Policy> enumerate_policies(int d);

/// Policy at 0-based (row, col) of that grid.
Policy policy_at(int d, std::size_t row, std::size_t col);

/// Grid position of a policy, inverse of policy_at.
std::pair<std::size_t, std::size_t> policy_position(const Policy& policy);

/// Entropy grid over every policy of one dimension. Cells are indexed
/// row * 2^d + col; failed policies leave their cell empty with a reason.
struct SweepResult {
    int d = 0;
    std::vector<std::optional<double>> entropy;      // bits, per policy index
    std::vector<std::size_t> unique_labels;          // per policy index, 0 when failed
    std::vector<std::string> errors;                 // per policy index, empty when fine

    std::size_t side() const { return std::size_t{1} << d; }
    std::size_t cells() const { return side() * side(); }
};

/// Labels every target under every policy of dimension d. Policies sharing a
/// decision prefix share simplex states, so the work follows the policy tree
/// rather than 4^d independent runs.
SweepResult sweep(const Dataset& targets, const AnchorSet& anchors, int d, unsigned threads = 1);

/// (policy text, distinct label count) rows sorted ascending by count.
struct LabelCountTable {
    std::vector<std::pair<std::string, std::size_t>> rows;
};

LabelCountTable label_count_table(const Dataset& targets, const AnchorSet& anchors,
                                  const std::vector<Policy>& policies);

/// Per-policy unique-label counts of a sweep as a sorted table.
LabelCountTable sweep_count_table(const SweepResult& result);

enum class HeatmapFormat { csv, pgm };

/// Writes the entropy grid (CSV of numbers, or binary 8-bit PGM min-max
/// normalized over present cells) plus a "<base>.policies.csv" companion
/// mapping 1-based (row, col) to policy text. Failed cells become empty CSV
/// fields / black pixels and land in "<base>.errors.json".
void export_heatmap(const SweepResult& result, const std::filesystem::path& path,
                    HeatmapFormat format);

void export_label_counts(const LabelCountTable& table, const std::filesystem::path& path);

} // namespace g2l
