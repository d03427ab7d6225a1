#include "g2l/labeling.hpp"
#include "g2l/errors.hpp"
#include "labeling_detail.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <thread>

namespace g2l {

std::size_t Policy::label_length() const {
    std::size_t pairs = 0;
    for (Decision d : decisions) {
        if (records_pair(d)) ++pairs;
    }
    return decisions.size() + pairs;
}

std::string Policy::text() const {
    std::string out;
    out.reserve(decisions.size());
    for (Decision d : decisions) out.push_back(static_cast<char>(d));
    return out;
}

Policy parse_policy(std::string_view text) {
    if (text.empty()) {
        throw validation_error("policy string is empty");
    }
    Policy policy;
    policy.decisions.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch != 'c' && ch != 'f' && ch != 'C' && ch != 'F') {
            throw validation_error("illegal policy character '" + std::string(1, ch) +
                                   "' at position " + std::to_string(i + 1));
        }
        policy.decisions.push_back(static_cast<Decision>(ch));
    }
    return policy;
}

// ---------------------------------------------------------------------------
// SimplexState
// ---------------------------------------------------------------------------

SimplexState::SimplexState(FeatureVector target)
    : target_(std::move(target)), grid_{0.0} {}

void SimplexState::add_vertex(Representative rep, std::vector<double> sq_row) {
    const std::size_t k = vertex_count();
    if (sq_row.size() != k) {
        throw validation_error("SimplexState: expected a row of " + std::to_string(k) +
                               " squared distances, got " + std::to_string(sq_row.size()));
    }
    grid_ = detail::extend_grid(grid_, sq_row);
    chosen_.push_back(std::move(rep));
}

double SimplexState::cached_squared(std::size_t i, std::size_t j) const {
    return grid_[i * vertex_count() + j];
}

DistanceMatrix SimplexState::base_matrix() const {
    return DistanceMatrix(vertex_count(), grid_);
}

DistanceMatrix SimplexState::extended_matrix(const std::vector<double>& candidate_row) const {
    return DistanceMatrix(vertex_count() + 1, detail::extend_grid(grid_, candidate_row));
}

// ---------------------------------------------------------------------------
// Shared internals
// ---------------------------------------------------------------------------

namespace detail {

SortedAnchors::SortedAnchors(const AnchorSet& anchors) : set(&anchors) {
    anchors.validate();
    lex.resize(anchors.representatives.size());
    std::iota(lex.begin(), lex.end(), std::size_t{0});
    std::sort(lex.begin(), lex.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = anchors.representatives[a];
        const auto& rb = anchors.representatives[b];
        if (ra.source_name != rb.source_name) return ra.source_name < rb.source_name;
        return ra.rep_index < rb.rep_index;
    });
}

RepPairSqCache::RepPairSqCache(const SortedAnchors& anchors, bool precompute_all)
    : anchors_(&anchors), full_(precompute_all) {
    if (full_) {
        const std::size_t n = anchors.size();
        matrix_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double sq = squared_distance(anchors.rep(i).vector, anchors.rep(j).vector,
                                                   anchors.set->metric);
                matrix_[i * n + j] = sq;
                matrix_[j * n + i] = sq;
            }
        }
    }
}

double RepPairSqCache::operator()(std::size_t a, std::size_t b) {
    if (full_) {
        return matrix_[a * anchors_->size() + b];
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                              static_cast<std::uint64_t>(std::max(a, b));
    auto it = lazy_.find(key);
    if (it != lazy_.end()) return it->second;
    const double sq =
        squared_distance(anchors_->rep(a).vector, anchors_->rep(b).vector, anchors_->set->metric);
    lazy_.emplace(key, sq);
    return sq;
}

std::vector<double> target_row(const SortedAnchors& anchors, const FeatureVector& target,
                               Metric metric) {
    std::vector<double> row(anchors.size());
    for (std::size_t c = 0; c < anchors.size(); ++c) {
        row[c] = squared_distance(target, anchors.rep(c).vector, metric);
    }
    return row;
}

std::vector<double> extend_grid(const std::vector<double>& base_grid,
                                const std::vector<double>& new_row) {
    const std::size_t k = new_row.size();
    std::vector<double> grid((k + 1) * (k + 1), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            grid[i * (k + 1) + j] = base_grid[i * k + j];
        }
        grid[i * (k + 1) + k] = new_row[i];
        grid[k * (k + 1) + i] = new_row[i];
    }
    return grid;
}

std::vector<double> candidate_row(std::size_t cand, const std::vector<double>& sq_target,
                                  const std::vector<std::size_t>& chosen, RepPairSqCache& pairs) {
    std::vector<double> row;
    row.reserve(1 + chosen.size());
    row.push_back(sq_target[cand]);
    for (std::size_t prior : chosen) {
        row.push_back(pairs(cand, prior));
    }
    return row;
}

std::vector<CandidateEval> evaluate_candidates(const SortedAnchors& anchors,
                                               RepPairSqCache& pairs,
                                               const std::vector<double>& sq_target,
                                               const std::vector<std::size_t>& chosen,
                                               const std::vector<double>& base_grid) {
    std::vector<CandidateEval> evals(anchors.size());
    std::vector<char> in_simplex(anchors.size(), 0);
    for (std::size_t c : chosen) in_simplex[c] = 1;
    for (std::size_t c = 0; c < anchors.size(); ++c) {
        if (in_simplex[c]) continue;
        const auto row = candidate_row(c, sq_target, chosen, pairs);
        const DistanceMatrix dm(row.size() + 1, extend_grid(base_grid, row));
        const CMResult res = simplex_content(dm);
        evals[c] = CandidateEval{res.comparison_key(), res.squared_content};
    }
    return evals;
}

namespace {

// First eligible index with the strictly best key; ascending scan order is
// the lexicographic tie-break. `skip` removes one extra index (the primary,
// when picking a pair's secondary).
std::size_t arg_extreme(const std::vector<CandidateEval>& evals, const std::vector<char>& excluded,
                        bool want_max, std::size_t skip) {
    std::size_t best = evals.size();
    for (std::size_t c = 0; c < evals.size(); ++c) {
        if (excluded[c] || c == skip || std::isnan(evals[c].key)) continue;
        if (best == evals.size() || (want_max ? evals[c].key > evals[best].key
                                              : evals[c].key < evals[best].key)) {
            best = c;
        }
    }
    if (best == evals.size()) {
        throw validation_error("insufficient candidates: every representative is chosen or excluded");
    }
    return best;
}

} // namespace

StepOutcome apply_decision(Decision decision, const std::vector<CandidateEval>& evals,
                           const std::vector<char>& excluded) {
    const std::size_t none = evals.size();
    StepOutcome out;
    switch (decision) {
        case Decision::closest:
            out.primary = arg_extreme(evals, excluded, /*want_max=*/false, none);
            out.recorded = {out.primary};
            break;
        case Decision::farthest:
            out.primary = arg_extreme(evals, excluded, /*want_max=*/true, none);
            out.recorded = {out.primary};
            break;
        case Decision::closest_pair: {
            out.primary = arg_extreme(evals, excluded, /*want_max=*/false, none);
            const std::size_t secondary = arg_extreme(evals, excluded, /*want_max=*/true, out.primary);
            out.recorded = {out.primary, secondary};
            break;
        }
        case Decision::farthest_pair: {
            out.primary = arg_extreme(evals, excluded, /*want_max=*/true, none);
            const std::size_t secondary = arg_extreme(evals, excluded, /*want_max=*/false, out.primary);
            out.recorded = {out.primary, secondary};
            break;
        }
    }
    out.primary_squared_content = evals[out.primary].squared_content;
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Labeling
// ---------------------------------------------------------------------------

namespace {

void check_labeling_preconditions(const detail::SortedAnchors& anchors,
                                  const FeatureVector& target, const Policy& policy) {
    if (policy.d_max() == 0) {
        throw validation_error("policy is empty");
    }
    if (target.components.size() != anchors.set->dimension()) {
        throw validation_error("target '" + target.id + "' has " +
                               std::to_string(target.components.size()) +
                               " components but anchors have " +
                               std::to_string(anchors.set->dimension()));
    }
    // Every recorded name must be a distinct representative, so a policy
    // needs label_length() of them, not just d_max.
    if (anchors.size() < policy.label_length()) {
        throw validation_error("insufficient candidates: policy '" + policy.text() + "' records " +
                               std::to_string(policy.label_length()) + " names but only " +
                               std::to_string(anchors.size()) + " representatives exist");
    }
}

PseudoLabel label_item_impl(const detail::SortedAnchors& anchors, detail::RepPairSqCache& pairs,
                            const FeatureVector& target, const Policy& policy) {
    const auto sq_target = detail::target_row(anchors, target, anchors.set->metric);

    PseudoLabel label;
    label.names.reserve(policy.label_length());
    label.chosen.reserve(policy.d_max());
    label.contents.reserve(policy.d_max());

    std::vector<std::size_t> chosen;
    std::vector<char> excluded(anchors.size(), 0);
    std::vector<double> grid{0.0}; // target-only simplex

    for (Decision decision : policy.decisions) {
        const auto evals = detail::evaluate_candidates(anchors, pairs, sq_target, chosen, grid);
        const auto step = detail::apply_decision(decision, evals, excluded);
        for (std::size_t c : step.recorded) {
            label.names.push_back(anchors.rep(c).qualified_name);
            excluded[c] = 1;
        }
        const auto& rep = anchors.rep(step.primary);
        label.chosen.emplace_back(rep.source_name, rep.rep_index);
        label.contents.push_back(step.primary_squared_content);

        grid = detail::extend_grid(grid,
                                   detail::candidate_row(step.primary, sq_target, chosen, pairs));
        chosen.push_back(step.primary);
    }
    return label;
}

} // namespace

PseudoLabel label_item(const FeatureVector& target, const AnchorSet& anchors,
                       const Policy& policy) {
    detail::SortedAnchors sorted(anchors);
    check_labeling_preconditions(sorted, target, policy);
    detail::RepPairSqCache pairs(sorted, /*precompute_all=*/false);
    return label_item_impl(sorted, pairs, target, policy);
}

LabelBatch label_dataset(const Dataset& targets, const AnchorSet& anchors, const Policy& policy,
                         unsigned threads) {
    if (!targets.vectors.empty()) {
        targets.validate();
    }
    detail::SortedAnchors sorted(anchors);

    LabelBatch batch;
    batch.labels.resize(targets.vectors.size());
    if (targets.vectors.empty()) {
        return batch;
    }
    check_labeling_preconditions(sorted, targets.vectors.front(), policy);

    detail::RepPairSqCache pairs(sorted, /*precompute_all=*/true);

    const std::size_t n = targets.vectors.size();
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    std::vector<std::vector<LabelFailure>> failures(workers);

    auto run_range = [&](unsigned worker, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                batch.labels[i] = label_item_impl(sorted, pairs, targets.vectors[i], policy);
            } catch (const std::exception& e) {
                failures[worker].push_back(LabelFailure{i, targets.vectors[i].id, e.what()});
            }
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

    for (auto& list : failures) {
        batch.failures.insert(batch.failures.end(), list.begin(), list.end());
    }
    std::sort(batch.failures.begin(), batch.failures.end(),
              [](const LabelFailure& a, const LabelFailure& b) { return a.index < b.index; });
    return batch;
}

// ---------------------------------------------------------------------------
// Counting identities
// ---------------------------------------------------------------------------

std::uint64_t count_policies(int d) {
    if (d < 1 || d > 31) {
        throw validation_error("count_policies: d must be in [1, 31], got " + std::to_string(d));
    }
    return std::uint64_t{1} << (2 * d);
}

std::uint64_t count_policies_by_length(int d, int l) {
    if (d < 1 || d > 31) {
        throw validation_error("count_policies_by_length: d must be in [1, 31], got " +
                               std::to_string(d));
    }
    if (l < d || l > 2 * d) {
        throw validation_error("count_policies_by_length: l must be in [d, 2d], got l = " +
                               std::to_string(l) + " for d = " + std::to_string(d));
    }
    const int k = l - d;
    // binomial(d, k) via Pascal's rule, exact in 64 bits for d <= 31.
    std::vector<std::uint64_t> row(static_cast<std::size_t>(k) + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= d; ++i) {
        for (int j = std::min(i, k); j >= 1; --j) {
            row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j) - 1];
        }
    }
    return (std::uint64_t{1} << d) * row[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Exhaustive extremal search
// ---------------------------------------------------------------------------

std::vector<std::string> find_extremal_simplex(const AnchorSet& anchors, int d,
                                               ExtremalMode mode) {
    detail::SortedAnchors sorted(anchors);
    if (d < 1) {
        throw validation_error("find_extremal_simplex: d must be >= 1, got " + std::to_string(d));
    }
    const std::size_t n = sorted.size();
    const std::size_t subset = static_cast<std::size_t>(d) + 1;
    if (subset > n) {
        throw validation_error("find_extremal_simplex: d = " + std::to_string(d) + " needs " +
                               std::to_string(subset) + " representatives, only " +
                               std::to_string(n) + " exist");
    }
    detail::RepPairSqCache pairs(sorted, /*precompute_all=*/true);

    // Lexicographic combination enumeration; strict improvement keeps the
    // first extremal subset, which is the documented tie-break.
    std::vector<std::size_t> combo(subset);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    std::vector<std::size_t> best;
    double best_key = 0.0;

    for (;;) {
        std::vector<double> grid(subset * subset, 0.0);
        for (std::size_t i = 0; i < subset; ++i) {
            for (std::size_t j = i + 1; j < subset; ++j) {
                grid[i * subset + j] = grid[j * subset + i] = pairs(combo[i], combo[j]);
            }
        }
        const CMResult res = simplex_content(DistanceMatrix(subset, grid));
        const double key = res.comparison_key();
        if (best.empty() || (mode == ExtremalMode::min ? key < best_key : key > best_key)) {
            best = combo;
            best_key = key;
        }

        // next combination
        std::size_t i = subset;
        while (i > 0 && combo[i - 1] == n - subset + i - 1) --i;
        if (i == 0) break;
        ++combo[i - 1];
        for (std::size_t j = i; j < subset; ++j) combo[j] = combo[j - 1] + 1;
    }

    std::vector<std::string> names;
    names.reserve(best.size());
    for (std::size_t c : best) names.push_back(sorted.rep(c).qualified_name);
    return names;
}

double label_entropy(const std::vector<PseudoLabel>& labels) {
    if (labels.empty()) {
        throw validation_error("label_entropy: empty label list");
    }
    std::map<std::vector<std::string>, std::size_t> histogram;
    for (const auto& label : labels) {
        ++histogram[label.names];
    }
    std::vector<std::size_t> counts;
    counts.reserve(histogram.size());
    for (const auto& [key, count] : histogram) counts.push_back(count);
    return entropy_bits(counts);
}

} // namespace g2l
