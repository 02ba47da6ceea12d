#pragma once

// Pareto-optimal feature selection over per-task importance scores.
//
// Selection peels the frontier layer by layer: every feature not strictly
// dominated by a remaining feature is taken, until the budget would be
// exceeded, at which point a seeded uniform draw fills the remaining quota
// from the current frontier and selection stops.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

// Dense |features| x |tasks| matrix of non-negative importance scores.
class ImportanceMatrix {
public:
    ImportanceMatrix(std::vector<FeatureId> features, std::vector<TaskId> tasks,
                     std::vector<double> scores_row_major)
        : features_(std::move(features)), tasks_(std::move(tasks)),
          scores_(std::move(scores_row_major)) {
        if (features_.empty()) throw UsageError("ImportanceMatrix: no features");
        if (tasks_.empty()) throw UsageError("ImportanceMatrix: no tasks");
        if (scores_.size() != features_.size() * tasks_.size())
            throw UsageError("ImportanceMatrix: score count does not match shape");
        require_unique(features_, "feature");
        require_unique(tasks_, "task");
        for (double s : scores_)
            if (!std::isfinite(s) || s < 0.0)
                throw UsageError("ImportanceMatrix: scores must be finite and >= 0");
    }

    std::size_t feature_count() const { return features_.size(); }
    std::size_t task_count() const { return tasks_.size(); }
    const std::vector<FeatureId>& features() const { return features_; }
    const std::vector<TaskId>& tasks() const { return tasks_; }

    std::span<const double> row(std::size_t i) const {
        return {scores_.data() + i * tasks_.size(), tasks_.size()};
    }

    std::size_t index_of(const FeatureId& f) const {
        for (std::size_t i = 0; i < features_.size(); ++i)
            if (features_[i] == f) return i;
        throw UsageError("ImportanceMatrix: unknown feature '" + f + "'");
    }

private:
    static void require_unique(const std::vector<std::string>& names, const char* what) {
        std::set<std::string> seen;
        for (const auto& n : names) {
            if (n.empty()) throw UsageError(std::string("ImportanceMatrix: empty ") + what + " name");
            if (!seen.insert(n).second)
                throw UsageError(std::string("ImportanceMatrix: duplicate ") + what + " '" + n + "'");
        }
    }

    std::vector<FeatureId> features_;
    std::vector<TaskId> tasks_;
    std::vector<double> scores_;
};

struct SelectionResult {
    std::vector<FeatureId> selected;            // in selection order
    std::map<FeatureId, int> iteration_of;      // 1-based frontier iteration
    std::vector<std::size_t> frontier_sizes;    // size of each computed frontier
};

// a <= b componentwise. Equal vectors dominate each other; frontier logic
// below uses the strict form (dominated and different).
inline bool dominated_by(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw UsageError("dominated_by: length mismatch");
    if (a.empty()) throw UsageError("dominated_by: empty vectors");
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] > b[j]) return false;
    return true;
}

namespace detail {

inline bool strictly_dominates(std::span<const double> winner, std::span<const double> loser) {
    bool differs = false;
    for (std::size_t j = 0; j < winner.size(); ++j) {
        if (loser[j] > winner[j]) return false;
        if (loser[j] != winner[j]) differs = true;
    }
    return differs;
}

} // namespace detail

// Active features not strictly dominated by any other active feature.
// Equal-vector duplicates land on the frontier together.
inline std::set<FeatureId> pareto_frontier(const ImportanceMatrix& matrix,
                                           const std::set<FeatureId>& active) {
    if (active.empty()) throw UsageError("pareto_frontier: empty active set");
    std::vector<std::size_t> idx;
    idx.reserve(active.size());
    for (const auto& f : active) idx.push_back(matrix.index_of(f));

    std::set<FeatureId> frontier;
    for (std::size_t i : idx) {
        bool dominated = false;
        for (std::size_t k : idx) {
            if (k != i && detail::strictly_dominates(matrix.row(k), matrix.row(i))) {
                dominated = true;
                break;
            }
        }
        if (!dominated) frontier.insert(matrix.features()[i]);
    }
    return frontier;
}

// Iterative frontier selection with a dominance-count sweep: the strict
// dominance lists are built once, and removing a selected feature decrements
// the count of everything it dominates, so each frontier is the set of
// active features with count zero.
inline SelectionResult select_features(const ImportanceMatrix& matrix, std::size_t budget,
                                       Seed seed) {
    if (budget < 1) throw UsageError("select_features: budget must be >= 1");

    const std::size_t n = matrix.feature_count();
    std::vector<std::vector<std::size_t>> dominates(n); // i -> features i strictly dominates
    std::vector<std::size_t> dominator_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i != k && detail::strictly_dominates(matrix.row(i), matrix.row(k))) {
                dominates[i].push_back(k);
                ++dominator_count[k];
            }
        }
    }

    Rng rng(seed);
    SelectionResult result;
    std::vector<bool> active(n, true);
    std::size_t remaining = std::min(budget, n);
    int iteration = 0;

    const auto take = [&](std::size_t i) {
        result.selected.push_back(matrix.features()[i]);
        result.iteration_of[matrix.features()[i]] = iteration;
        active[i] = false;
        for (std::size_t d : dominates[i])
            if (active[d]) --dominator_count[d];
    };

    while (remaining > 0) {
        ++iteration;
        std::vector<std::size_t> frontier;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i] && dominator_count[i] == 0) frontier.push_back(i);
        result.frontier_sizes.push_back(frontier.size());

        if (frontier.size() <= remaining) {
            for (std::size_t i : frontier) take(i);
            remaining -= frontier.size();
        } else {
            // Random fill freezes this frontier: draw the quota and stop.
            for (std::size_t picked = 0; picked < remaining; ++picked) {
                std::size_t j = picked + static_cast<std::size_t>(
                                             rng.uniform_below(frontier.size() - picked));
                std::swap(frontier[picked], frontier[j]);
                take(frontier[picked]);
            }
            remaining = 0;
        }
    }
    return result;
}

} // namespace lattice
