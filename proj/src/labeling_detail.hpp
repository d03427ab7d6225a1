#pragma once

// Internals shared between the greedy labeler and the policy sweep. Candidate
// indices everywhere are positions in the lexicographic anchor ordering, which
// makes first-wins scans implement the documented tie-break.

#include "g2l/errors.hpp"
#include "g2l/features.hpp"
#include "g2l/geometry.hpp"
#include "g2l/labeling.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <unordered_map>
#include <vector>

namespace g2l::detail {

/// Validated anchor set with candidates ordered by (source_name, rep_index).
struct SortedAnchors {
    explicit SortedAnchors(const AnchorSet& anchors);

    const AnchorSet* set;
    std::vector<std::size_t> lex; // lex[cand] = index into set->representatives

    std::size_t size() const { return lex.size(); }
    const Representative& rep(std::size_t cand) const { return set->representatives[lex[cand]]; }
};

/// Memoized representative-to-representative squared distances. Precomputed
/// as a full matrix for batch work (shared read-only across threads), lazy
/// for one-off labelings.
class RepPairSqCache {
public:
    RepPairSqCache(const SortedAnchors& anchors, bool precompute_all);

    double operator()(std::size_t a, std::size_t b);

private:
    const SortedAnchors* anchors_;
    bool full_;
    std::vector<double> matrix_;                     // full mode
    std::unordered_map<std::uint64_t, double> lazy_; // lazy mode
};

struct CandidateEval {
    double key = std::numeric_limits<double>::quiet_NaN();             // comparison key
    double squared_content = std::numeric_limits<double>::quiet_NaN(); // clamped, diagnostic
};

/// Squared distance rows from the target to every candidate.
std::vector<double> target_row(const SortedAnchors& anchors, const FeatureVector& target,
                               Metric metric);

/// Evaluates every candidate not already in the simplex as its next vertex.
/// `base_grid` is the (1+chosen)^2 squared-distance grid of the current
/// simplex (target first). Entries for chosen candidates stay NaN.
std::vector<CandidateEval> evaluate_candidates(const SortedAnchors& anchors,
                                               RepPairSqCache& pairs,
                                               const std::vector<double>& sq_target,
                                               const std::vector<std::size_t>& chosen,
                                               const std::vector<double>& base_grid);

struct StepOutcome {
    std::vector<std::size_t> recorded; // candidate indices appended to the name sequence
    std::size_t primary = 0;           // joins the simplex
    double primary_squared_content = 0.0;
};

/// Applies one policy decision over the evaluated candidates, skipping
/// excluded ones. Throws validation_error when fewer candidates remain than
/// the decision records.
StepOutcome apply_decision(Decision decision, const std::vector<CandidateEval>& evals,
                           const std::vector<char>& excluded);

/// Grows the simplex grid by the chosen candidate's squared-distance row.
std::vector<double> extend_grid(const std::vector<double>& base_grid,
                                const std::vector<double>& new_row);

/// Candidate's squared distances to [target, chosen...] in vertex order.
std::vector<double> candidate_row(std::size_t cand, const std::vector<double>& sq_target,
                                  const std::vector<std::size_t>& chosen, RepPairSqCache& pairs);

} // namespace g2l::detail
