#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "lattice/filter.hpp"

using namespace lattice;

namespace {

ImportanceMatrix make_matrix(std::vector<std::vector<double>> rows,
                             std::vector<std::string> names = {}) {
    const std::size_t n = rows.size();
    const std::size_t tasks = rows.front().size();
    if (names.empty())
        for (std::size_t i = 0; i < n; ++i) names.push_back("F" + std::to_string(i + 1));
    std::vector<TaskId> task_names;
    for (std::size_t j = 0; j < tasks; ++j) task_names.push_back("T" + std::to_string(j + 1));
    std::vector<double> scores;
    for (const auto& row : rows) scores.insert(scores.end(), row.begin(), row.end());
    return ImportanceMatrix(std::move(names), std::move(task_names), std::move(scores));
}

// Oracle: per-round full pairwise strict-dominance scan, nothing shared with
// the dominance-count implementation.
struct OracleSelection {
    std::vector<std::set<std::string>> layers; // frontier per iteration until exhausted
};

bool oracle_strictly_dominates(std::span<const double> a, std::span<const double> b) {
    bool all_geq = true, any_gt = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] < b[j]) all_geq = false;
        if (a[j] > b[j]) any_gt = true;
    }
    return all_geq && any_gt;
}

OracleSelection oracle_layers(const ImportanceMatrix& m) {
    OracleSelection result;
    std::set<std::size_t> active;
    for (std::size_t i = 0; i < m.feature_count(); ++i) active.insert(i);
    while (!active.empty()) {
        std::set<std::string> layer;
        std::set<std::size_t> taken;
        for (std::size_t i : active) {
            bool dominated = false;
            for (std::size_t k : active)
                if (k != i && oracle_strictly_dominates(m.row(k), m.row(i))) {
                    dominated = true;
                    break;
                }
            if (!dominated) {
                layer.insert(m.features()[i]);
                taken.insert(i);
            }
        }
        for (std::size_t i : taken) active.erase(i);
        result.layers.push_back(std::move(layer));
    }
    return result;
}

const std::vector<std::vector<double>> kFiveFeatures{{3, 1}, {1, 3}, {2, 2}, {1, 1}, {0, 0}};

// 10 features layered 4/3/3 (each layer mutually incomparable, each point
// strictly dominated by one in the previous layer).
const std::vector<std::vector<double>> kTenFeatures{
    {12, 3}, {11, 4}, {10, 5}, {9, 6}, // layer 1
    {8, 2},  {7, 3},  {6, 4},          // layer 2
    {5, 1},  {4, 2},  {3, 3},          // layer 3
};

} // namespace

TEST_CASE("dominated_by definition") {
    const std::vector<double> a{1, 1}, b{2, 2}, c{3, 1}, z3(3, 0.0);
    CHECK(dominated_by(a, b));
    CHECK_FALSE(dominated_by(b, c)); // 2 <= 3 but 2 > 1
    CHECK(dominated_by(z3, z3));     // equal vectors dominate each other
    CHECK_THROWS_AS(dominated_by(a, z3), UsageError);
    const std::vector<double> empty;
    CHECK_THROWS_AS(dominated_by(empty, empty), UsageError);
}

TEST_CASE("pareto_frontier on the five-feature example") {
    const auto m = make_matrix(kFiveFeatures);
    std::set<FeatureId> all(m.features().begin(), m.features().end());
    CHECK(pareto_frontier(m, all) == std::set<FeatureId>{"F1", "F2", "F3"});

    CHECK_THROWS_AS(pareto_frontier(m, {}), UsageError);
}

TEST_CASE("pareto_frontier keeps scalar ties together") {
    const auto m = make_matrix({{5}, {3}, {5}});
    std::set<FeatureId> all(m.features().begin(), m.features().end());
    CHECK(pareto_frontier(m, all) == std::set<FeatureId>{"F1", "F3"});
}

TEST_CASE("pareto_frontier of identical vectors is the whole set") {
    const auto m = make_matrix({{2, 2}, {2, 2}, {2, 2}});
    std::set<FeatureId> all(m.features().begin(), m.features().end());
    CHECK(pareto_frontier(m, all) == all);
}

TEST_CASE("select_features five-feature example, T=4") {
    const auto m = make_matrix(kFiveFeatures);
    const auto result = select_features(m, 4, Seed{0});
    CHECK(result.frontier_sizes == std::vector<std::size_t>{3, 1});
    CHECK(std::set<FeatureId>(result.selected.begin(), result.selected.end()) ==
          std::set<FeatureId>{"F1", "F2", "F3", "F4"});
    CHECK(result.iteration_of.at("F1") == 1);
    CHECK(result.iteration_of.at("F2") == 1);
    CHECK(result.iteration_of.at("F3") == 1);
    CHECK(result.iteration_of.at("F4") == 2);
}

TEST_CASE("select_features reproduces the 10-feature, T=9, 3-iteration shape") {
    const auto m = make_matrix(kTenFeatures);
    const auto result = select_features(m, 9, Seed{42});
    CHECK(result.frontier_sizes == std::vector<std::size_t>{4, 3, 3});
    CHECK(result.selected.size() == 9);
    int max_iteration = 0;
    for (const auto& [f, it] : result.iteration_of) {
        (void)f;
        max_iteration = std::max(max_iteration, it);
    }
    CHECK(max_iteration == 3);
}

TEST_CASE("single task selects by descending score") {
    const auto m = make_matrix({{9}, {7}, {5}});
    const auto result = select_features(m, 2, Seed{0});
    CHECK(result.selected == std::vector<FeatureId>{"F1", "F2"});
}

TEST_CASE("budget clamps to feature count and budget zero is rejected") {
    const auto m = make_matrix(kFiveFeatures);
    const auto result = select_features(m, 100, Seed{0});
    CHECK(result.selected.size() == 5);
    CHECK_THROWS_AS(select_features(m, 0, Seed{0}), UsageError);
}

TEST_CASE("select_features matches the brute-force oracle on random instances") {
    Rng rng(Seed{2024});
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.uniform_below(19); // up to 20 features
        const std::size_t tasks = 1 + rng.uniform_below(4);
        std::vector<std::vector<double>> rows(n, std::vector<double>(tasks));
        for (auto& row : rows)
            for (auto& v : row) v = static_cast<double>(rng.uniform_below(11));
        const auto m = make_matrix(rows);
        const auto oracle = oracle_layers(m);

        // full-frontier budget: sum of the first k layers, so no random fill
        std::size_t k = 1 + rng.uniform_below(oracle.layers.size());
        std::size_t budget = 0;
        for (std::size_t i = 0; i < k; ++i) budget += oracle.layers[i].size();

        const auto result = select_features(m, budget, Seed{trial});
        REQUIRE(result.selected.size() == budget);
        REQUIRE(result.frontier_sizes.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(result.frontier_sizes[i] == oracle.layers[i].size());
            for (const auto& f : oracle.layers[i])
                CHECK(result.iteration_of.at(f) == static_cast<int>(i + 1));
        }
    }
}

TEST_CASE("monotonic layering: a strict dominator is selected strictly earlier") {
    Rng rng(Seed{77});
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.uniform_below(10);
        std::vector<std::vector<double>> rows(n, std::vector<double>(3));
        for (auto& row : rows)
            for (auto& v : row) v = static_cast<double>(rng.uniform_below(6));
        const auto m = make_matrix(rows);
        const auto result = select_features(m, n, Seed{trial}); // select everything

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && oracle_strictly_dominates(m.row(i), m.row(j)))
                    CHECK(result.iteration_of.at(m.features()[i]) <
                          result.iteration_of.at(m.features()[j]));
    }
}

TEST_CASE("identical inputs and seed give identical results") {
    const auto m = make_matrix(kTenFeatures);
    const auto a = select_features(m, 9, Seed{7});
    const auto b = select_features(m, 9, Seed{7});
    CHECK(a.selected == b.selected);
    CHECK(a.iteration_of == b.iteration_of);
    CHECK(a.frontier_sizes == b.frontier_sizes);
}

TEST_CASE("random fill is unbiased across seeds") {
    // last frontier has 4 candidates and quota 2: each should appear ~50%
    const auto m = make_matrix({{5, 1}, {4, 2}, {3, 3}, {2, 4}});
    std::map<FeatureId, int> counts;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        const auto result = select_features(m, 2, Seed{static_cast<std::uint64_t>(s)});
        REQUIRE(result.selected.size() == 2);
        for (const auto& f : result.selected) ++counts[f];
    }
    for (const auto& [f, c] : counts) {
        const double freq = static_cast<double>(c) / trials;
        INFO(f << " frequency " << freq);
        CHECK(freq == Catch::Approx(0.5).margin(0.02));
    }
}

TEST_CASE("matrix construction contract") {
    CHECK_THROWS_AS(ImportanceMatrix({}, {"t"}, {}), UsageError);
    CHECK_THROWS_AS(ImportanceMatrix({"a"}, {}, {}), UsageError);
    CHECK_THROWS_AS(ImportanceMatrix({"a", "a"}, {"t"}, {1, 2}), UsageError);
    CHECK_THROWS_AS(ImportanceMatrix({"a"}, {"t"}, {1, 2}), UsageError);
    CHECK_THROWS_AS(ImportanceMatrix({"a"}, {"t"}, {-1}), UsageError);
}
