#include "g2l/analysis.hpp"
#include "g2l/errors.hpp"
#include "g2l/io.hpp"
#include "labeling_detail.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

namespace g2l {

Policy policy_at(int d, std::size_t row, std::size_t col) {
    Policy policy;
    policy.decisions.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        const int shift = d - 1 - k;
        const bool pair_case = (row >> shift) & 1;  // lower half of each block: C/F
        const bool far_case = (col >> shift) & 1;   // right half of each block: f/F
        if (pair_case) {
            policy.decisions.push_back(far_case ? Decision::farthest_pair : Decision::closest_pair);
        } else {
            policy.decisions.push_back(far_case ? Decision::farthest : Decision::closest);
        }
    }
    return policy;
}

std::pair<std::size_t, std::size_t> policy_position(const Policy& policy) {
    std::size_t row = 0;
    std::size_t col = 0;
    for (Decision dec : policy.decisions) {
        row = (row << 1) | (records_pair(dec) ? 1 : 0);
        col = (col << 1) | ((dec == Decision::farthest || dec == Decision::farthest_pair) ? 1 : 0);
    }
    return {row, col};
}

std::vector<Policy> enumerate_policies(int d) {
    if (d < 1 || d > 8) {
        throw validation_error("enumerate_policies: d must be in [1, 8], got " + std::to_string(d));
    }
    const std::size_t side = std::size_t{1} << d;
    std::vector<Policy> policies;
    policies.reserve(side * side);
    for (std::size_t row = 0; row < side; ++row) {
        for (std::size_t col = 0; col < side; ++col) {
            policies.push_back(policy_at(d, row, col));
        }
    }
    return policies;
}

// ---------------------------------------------------------------------------
// Policy-tree sweep
// ---------------------------------------------------------------------------

namespace {

struct PolicyAccumulator {
    // Per policy index: label multiset and first failure reason.
    std::vector<std::map<std::string, std::size_t>> label_counts;
    std::vector<std::string> errors;

    explicit PolicyAccumulator(std::size_t cells) : label_counts(cells), errors(cells) {}

    void merge(const PolicyAccumulator& other) {
        for (std::size_t i = 0; i < label_counts.size(); ++i) {
            for (const auto& [label, count] : other.label_counts[i]) {
                label_counts[i][label] += count;
            }
            if (errors[i].empty()) errors[i] = other.errors[i];
        }
    }
};

// Name sequences are joined with a field separator that cannot occur in
// qualified names read from JSON/CSV sources in practice.
constexpr char kLabelSep = '\x1f';

struct TreeContext {
    const detail::SortedAnchors& anchors;
    detail::RepPairSqCache& pairs;
    const std::vector<double>& sq_target;
    int d;
    PolicyAccumulator& accum;
    // Candidate evaluations keyed by the sorted chosen set: every branch
    // (and every policy) reaching the same simplex reuses them.
    std::map<std::vector<std::size_t>, std::vector<detail::CandidateEval>> eval_cache;
};

const std::vector<detail::CandidateEval>& evals_for(TreeContext& ctx,
                                                    const std::vector<std::size_t>& chosen,
                                                    const std::vector<double>& grid) {
    std::vector<std::size_t> key = chosen;
    std::sort(key.begin(), key.end());
    auto it = ctx.eval_cache.find(key);
    if (it != ctx.eval_cache.end()) return it->second;
    auto evals = detail::evaluate_candidates(ctx.anchors, ctx.pairs, ctx.sq_target, chosen, grid);
    return ctx.eval_cache.emplace(std::move(key), std::move(evals)).first->second;
}

void mark_subtree_failed(TreeContext& ctx, int depth, std::size_t row, std::size_t col,
                         const std::string& reason) {
    const int rest = ctx.d - depth;
    const std::size_t row_base = row << rest;
    const std::size_t col_base = col << rest;
    const std::size_t span = std::size_t{1} << rest;
    const std::size_t side = std::size_t{1} << ctx.d;
    for (std::size_t r = 0; r < span; ++r) {
        for (std::size_t c = 0; c < span; ++c) {
            const std::size_t idx = (row_base + r) * side + (col_base + c);
            if (ctx.accum.errors[idx].empty()) ctx.accum.errors[idx] = reason;
        }
    }
}

void sweep_node(TreeContext& ctx, int depth, std::size_t row, std::size_t col,
                const std::vector<std::size_t>& chosen, const std::vector<char>& excluded,
                const std::vector<double>& grid, const std::string& names) {
    if (depth == ctx.d) {
        const std::size_t idx = row * (std::size_t{1} << ctx.d) + col;
        ++ctx.accum.label_counts[idx][names];
        return;
    }
    const auto& evals = evals_for(ctx, chosen, grid);
    static constexpr Decision kDecisions[4] = {Decision::closest, Decision::farthest,
                                               Decision::closest_pair, Decision::farthest_pair};
    for (Decision dec : kDecisions) {
        const std::size_t rbit = records_pair(dec) ? 1 : 0;
        const std::size_t cbit =
            (dec == Decision::farthest || dec == Decision::farthest_pair) ? 1 : 0;
        const std::size_t next_row = (row << 1) | rbit;
        const std::size_t next_col = (col << 1) | cbit;
        detail::StepOutcome step;
        try {
            step = detail::apply_decision(dec, evals, excluded);
        } catch (const std::exception& e) {
            mark_subtree_failed(ctx, depth + 1, next_row, next_col, e.what());
            continue;
        }
        std::string next_names = names;
        std::vector<char> next_excluded = excluded;
        for (std::size_t c : step.recorded) {
            if (!next_names.empty()) next_names.push_back(kLabelSep);
            next_names += ctx.anchors.rep(c).qualified_name;
            next_excluded[c] = 1;
        }
        std::vector<std::size_t> next_chosen = chosen;
        next_chosen.push_back(step.primary);
        const auto next_grid = detail::extend_grid(
            grid, detail::candidate_row(step.primary, ctx.sq_target, chosen, ctx.pairs));
        sweep_node(ctx, depth + 1, next_row, next_col, next_chosen, next_excluded, next_grid,
                   next_names);
    }
}

void sweep_target(const detail::SortedAnchors& anchors, detail::RepPairSqCache& pairs,
                  const FeatureVector& target, int d, PolicyAccumulator& accum) {
    const auto sq_target = detail::target_row(anchors, target, anchors.set->metric);
    TreeContext ctx{anchors, pairs, sq_target, d, accum, {}};
    sweep_node(ctx, 0, 0, 0, {}, std::vector<char>(anchors.size(), 0), {0.0}, {});
}

} // namespace

SweepResult sweep(const Dataset& targets, const AnchorSet& anchors, int d, unsigned threads) {
    if (d < 1 || d > 8) {
        throw validation_error("sweep: d must be in [1, 8], got " + std::to_string(d));
    }
    targets.validate();
    detail::SortedAnchors sorted(anchors);
    if (targets.dimension() != anchors.dimension()) {
        throw validation_error("sweep: targets have " + std::to_string(targets.dimension()) +
                               " components but anchors have " +
                               std::to_string(anchors.dimension()));
    }
    detail::RepPairSqCache pairs(sorted, /*precompute_all=*/true);

    const std::size_t cells = (std::size_t{1} << d) * (std::size_t{1} << d);
    const std::size_t n = targets.vectors.size();
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));

    std::vector<PolicyAccumulator> partial(workers, PolicyAccumulator(cells));
    auto run_range = [&](unsigned worker, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            sweep_target(sorted, pairs, targets.vectors[i], d, partial[worker]);
        }
    };
    if (workers == 1) {
        run_range(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = static_cast<std::size_t>(w) * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, w, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    PolicyAccumulator& total = partial[0];
    for (unsigned w = 1; w < workers; ++w) total.merge(partial[w]);

    SweepResult result;
    result.d = d;
    result.entropy.resize(cells);
    result.unique_labels.assign(cells, 0);
    result.errors.resize(cells);
    for (std::size_t idx = 0; idx < cells; ++idx) {
        if (!total.errors[idx].empty()) {
            result.errors[idx] = total.errors[idx];
            continue;
        }
        std::vector<std::size_t> counts;
        counts.reserve(total.label_counts[idx].size());
        for (const auto& [label, count] : total.label_counts[idx]) counts.push_back(count);
        result.unique_labels[idx] = counts.size();
        result.entropy[idx] = entropy_bits(counts);
    }
    return result;
}

LabelCountTable label_count_table(const Dataset& targets, const AnchorSet& anchors,
                                  const std::vector<Policy>& policies) {
    LabelCountTable table;
    for (const auto& policy : policies) {
        const LabelBatch batch = label_dataset(targets, anchors, policy);
        if (!batch.failures.empty()) {
            throw validation_error("label_count_table: policy '" + policy.text() + "' failed: " +
                                   batch.failures.front().message);
        }
        std::map<std::vector<std::string>, std::size_t> histogram;
        for (const auto& label : batch.labels) {
            ++histogram[label->names];
        }
        table.rows.emplace_back(policy.text(), histogram.size());
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return table;
}

LabelCountTable sweep_count_table(const SweepResult& result) {
    LabelCountTable table;
    const std::size_t side = result.side();
    for (std::size_t idx = 0; idx < result.cells(); ++idx) {
        if (!result.errors[idx].empty()) continue;
        table.rows.emplace_back(policy_at(result.d, idx / side, idx % side).text(),
                                result.unique_labels[idx]);
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return table;
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

void export_heatmap(const SweepResult& result, const std::filesystem::path& path,
                    HeatmapFormat format) {
    const std::size_t side = result.side();

    if (format == HeatmapFormat::csv) {
        std::ofstream out(path);
        if (!out) throw validation_error("cannot write '" + path.string() + "'");
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                if (c > 0) out << ",";
                const auto& cell = result.entropy[r * side + c];
                if (cell) out << format_double(*cell);
            }
            out << "\n";
        }
        if (!out) throw validation_error("write failed for '" + path.string() + "'");
    } else {
        double lo = 0.0;
        double hi = 0.0;
        bool seen = false;
        for (const auto& cell : result.entropy) {
            if (!cell) continue;
            if (!seen) {
                lo = hi = *cell;
                seen = true;
            } else {
                lo = std::min(lo, *cell);
                hi = std::max(hi, *cell);
            }
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw validation_error("cannot write '" + path.string() + "'");
        out << "P5\n" << side << " " << side << "\n255\n";
        for (std::size_t idx = 0; idx < result.cells(); ++idx) {
            unsigned char pixel = 0;
            const auto& cell = result.entropy[idx];
            if (cell && hi > lo) {
                pixel = static_cast<unsigned char>(
                    std::lround(255.0 * (*cell - lo) / (hi - lo)));
            }
            out.put(static_cast<char>(pixel));
        }
        if (!out) throw validation_error("write failed for '" + path.string() + "'");
    }

    // Companion: 1-based (row, col) -> policy text, matching the convention
    // used when the grid is displayed as a table.
    {
        std::ofstream out(companion_path(path, ".policies.csv"));
        if (!out) throw validation_error("cannot write policy companion for '" + path.string() + "'");
        out << "row,col,policy\n";
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                out << (r + 1) << "," << (c + 1) << "," << policy_at(result.d, r, c).text() << "\n";
            }
        }
    }

    bool any_error = false;
    for (const auto& err : result.errors) {
        if (!err.empty()) {
            any_error = true;
            break;
        }
    }
    if (any_error) {
        nlohmann::ordered_json report = nlohmann::ordered_json::array();
        for (std::size_t idx = 0; idx < result.cells(); ++idx) {
            if (result.errors[idx].empty()) continue;
            nlohmann::ordered_json entry;
            entry["row"] = idx / side + 1;
            entry["col"] = idx % side + 1;
            entry["policy"] = policy_at(result.d, idx / side, idx % side).text();
            entry["error"] = result.errors[idx];
            report.push_back(std::move(entry));
        }
        std::ofstream out(companion_path(path, ".errors.json"));
        if (!out) throw validation_error("cannot write error sidecar for '" + path.string() + "'");
        out << report.dump(2) << "\n";
    }
}

void export_label_counts(const LabelCountTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write '" + path.string() + "'");
    out << "policy,count\n";
    for (const auto& [policy, count] : table.rows) {
        out << policy << "," << count << "\n";
    }
    if (!out) throw validation_error("write failed for '" + path.string() + "'");
}

} // namespace g2l
