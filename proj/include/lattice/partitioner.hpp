#pragma once

// Policy engine grouping (domain, objective) pairs into portfolios.
// Pipeline: domain clustering on user-id overlap (single linkage), split by
// feedback class, greedy similarity subgrouping, compliance separation, then
// first-fit-decreasing budget packing. Every step breaks ties by name so the
// output is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

struct DomainMeta {
    std::string name;
    std::set<std::string> user_ids; // sample of the id space
    std::set<std::string> item_ids;
    std::set<std::string> compliance_tags;
};

enum class FeedbackClass {
    fresh_dense,    // click, like, follow
    delayed_sparse, // purchase, conversion
};

struct ObjectiveMeta {
    std::string name;
    std::string domain;
    FeedbackClass feedback_class = FeedbackClass::fresh_dense;
    std::map<std::string, double> similarity; // objective name -> [-1, 1]; absent pairs default to 1
    double est_value = 0.0;                   // revenue-impact proxy
    double cost = 0.0;                        // compute-budget units
};

struct PortfolioMember {
    std::string domain;
    std::string objective;

    auto operator<=>(const PortfolioMember&) const = default;
};

struct Portfolio {
    std::vector<PortfolioMember> members;
    double total_cost = 0.0;
    std::set<std::string> compliance_union;
    bool over_budget = false; // single member alone exceeding the budget
};

struct PartitionPolicy {
    double user_overlap_min = 0.0;
    double similarity_min = -1.0;
    double budget_per_portfolio = 0.0;
    std::vector<std::pair<std::string, std::string>> incompatible_tag_pairs;
    bool require_item_overlap = false; // also gate clustering on item overlap
    double item_overlap_min = 0.0;
};

struct IdOverlap {
    double user_jaccard = 0.0;
    double item_jaccard = 0.0;
};

namespace detail {

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace detail

inline IdOverlap id_overlap(const DomainMeta& a, const DomainMeta& b) {
    if (a.user_ids.empty() || b.user_ids.empty() || a.item_ids.empty() || b.item_ids.empty())
        throw UsageError("id_overlap: id sets must be non-empty");
    return IdOverlap{detail::jaccard(a.user_ids, b.user_ids),
                     detail::jaccard(a.item_ids, b.item_ids)};
}

namespace detail {

struct ObjectiveRef {
    const ObjectiveMeta* meta = nullptr;
    const DomainMeta* domain = nullptr;
};

// est_value descending, then name, then domain.
inline bool by_value_then_name(const ObjectiveRef& a, const ObjectiveRef& b) {
    if (a.meta->est_value != b.meta->est_value) return a.meta->est_value > b.meta->est_value;
    if (a.meta->name != b.meta->name) return a.meta->name < b.meta->name;
    return a.meta->domain < b.meta->domain;
}

inline double similarity_between(const ObjectiveMeta& a, const ObjectiveMeta& b) {
    if (auto it = a.similarity.find(b.name); it != a.similarity.end()) return it->second;
    if (auto it = b.similarity.find(a.name); it != b.similarity.end()) return it->second;
    return 1.0; // absent similarity data: assume fully related
}

inline bool tags_conflict(const std::set<std::string>& ta, const std::set<std::string>& tb,
                          const std::vector<std::pair<std::string, std::string>>& incompatible) {
    for (const auto& [t1, t2] : incompatible)
        if ((ta.count(t1) && tb.count(t2)) || (ta.count(t2) && tb.count(t1))) return true;
    return false;
}

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

} // namespace detail

inline std::vector<Portfolio> partition(const std::vector<DomainMeta>& domains,
                                        const std::vector<ObjectiveMeta>& objectives,
                                        const PartitionPolicy& policy) {
    // Index domains by name; names must be unique.
    std::map<std::string, const DomainMeta*> domain_by_name;
    for (const auto& d : domains) {
        if (d.name.empty()) throw UsageError("partition: empty domain name");
        if (!domain_by_name.emplace(d.name, &d).second)
            throw UsageError("partition: duplicate domain '" + d.name + "'");
    }
    {
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& o : objectives) {
            if (o.name.empty()) throw UsageError("partition: empty objective name");
            if (!domain_by_name.count(o.domain))
                throw UsageError("partition: objective '" + o.name + "' references unknown domain '" +
                                 o.domain + "'");
            if (!seen.emplace(o.domain, o.name).second)
                throw UsageError("partition: duplicate objective '" + o.name + "' in domain '" +
                                 o.domain + "'");
            for (const auto& [other, sim] : o.similarity) {
                (void)other;
                if (!(sim >= -1.0 && sim <= 1.0))
                    throw UsageError("partition: similarity out of [-1, 1] for '" + o.name + "'");
            }
            if (!(o.est_value >= 0.0) || !(o.cost >= 0.0))
                throw UsageError("partition: est_value and cost must be >= 0");
        }
    }

    // 1. Domain clusters: single linkage over the overlap threshold.
    std::vector<const DomainMeta*> sorted_domains;
    for (const auto& [name, d] : domain_by_name) {
        (void)name;
        sorted_domains.push_back(d);
    }
    detail::DisjointSet dsu(sorted_domains.size());
    for (std::size_t i = 0; i < sorted_domains.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted_domains.size(); ++j) {
            const IdOverlap ov = id_overlap(*sorted_domains[i], *sorted_domains[j]);
            const bool users_ok = ov.user_jaccard >= policy.user_overlap_min;
            const bool items_ok =
                !policy.require_item_overlap || ov.item_jaccard >= policy.item_overlap_min;
            if (users_ok && items_ok) dsu.unite(i, j);
        }
    }
    std::map<std::size_t, std::vector<const DomainMeta*>> clusters; // keyed by root; name order inside
    for (std::size_t i = 0; i < sorted_domains.size(); ++i)
        clusters[dsu.find(i)].push_back(sorted_domains[i]);
    std::vector<std::vector<const DomainMeta*>> cluster_list;
    for (auto& [root, members] : clusters) {
        (void)root;
        cluster_list.push_back(std::move(members));
    }
    std::sort(cluster_list.begin(), cluster_list.end(),
              [](const auto& a, const auto& b) { return a.front()->name < b.front()->name; });

    std::vector<Portfolio> portfolios;

    const auto emit_with_budget = [&](std::vector<detail::ObjectiveRef> group) {
        // 5. Budget: first-fit decreasing by est_value; an oversized single
        // member becomes a flagged singleton.
        std::sort(group.begin(), group.end(), detail::by_value_then_name);
        std::vector<std::vector<detail::ObjectiveRef>> bins;
        std::vector<double> bin_cost;
        for (const auto& ref : group) {
            if (ref.meta->cost > policy.budget_per_portfolio) {
                Portfolio p;
                p.members.push_back({ref.meta->domain, ref.meta->name});
                p.total_cost = ref.meta->cost;
                p.compliance_union = ref.domain->compliance_tags;
                p.over_budget = true;
                portfolios.push_back(std::move(p));
                continue;
            }
            bool placed = false;
            for (std::size_t b = 0; b < bins.size(); ++b) {
                if (bin_cost[b] + ref.meta->cost <= policy.budget_per_portfolio) {
                    bins[b].push_back(ref);
                    bin_cost[b] += ref.meta->cost;
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                bins.push_back({ref});
                bin_cost.push_back(ref.meta->cost);
            }
        }
        for (const auto& bin : bins) {
            Portfolio p;
            for (const auto& ref : bin) {
                p.members.push_back({ref.meta->domain, ref.meta->name});
                p.total_cost += ref.meta->cost;
                p.compliance_union.insert(ref.domain->compliance_tags.begin(),
                                          ref.domain->compliance_tags.end());
            }
            portfolios.push_back(std::move(p));
        }
    };

    const auto split_compliant = [&](std::vector<detail::ObjectiveRef> group) {
        // 4. Compliance: repeatedly eject the lower-value side of any
        // incompatible pair; ejected members form a follow-up group.
        std::vector<std::vector<detail::ObjectiveRef>> work{std::move(group)};
        while (!work.empty()) {
            std::vector<detail::ObjectiveRef> current = std::move(work.back());
            work.pop_back();
            std::sort(current.begin(), current.end(), detail::by_value_then_name);
            std::vector<detail::ObjectiveRef> ejected;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t i = 0; i < current.size() && !changed; ++i) {
                    for (std::size_t j = i + 1; j < current.size() && !changed; ++j) {
                        if (detail::tags_conflict(current[i].domain->compliance_tags,
                                                  current[j].domain->compliance_tags,
                                                  policy.incompatible_tag_pairs)) {
                            // j sorts after i, so j is the lower-value member
                            ejected.push_back(current[j]);
                            current.erase(current.begin() + static_cast<std::ptrdiff_t>(j));
                            changed = true;
                        }
                    }
                }
            }
            emit_with_budget(std::move(current));
            if (!ejected.empty()) work.push_back(std::move(ejected));
        }
    };

    for (const auto& cluster : cluster_list) {
        std::set<std::string> cluster_domains;
        for (const auto* d : cluster) cluster_domains.insert(d->name);

        for (FeedbackClass cls : {FeedbackClass::fresh_dense, FeedbackClass::delayed_sparse}) {
            // 2. Objectives of this cluster and class.
            std::vector<detail::ObjectiveRef> refs;
            for (const auto& o : objectives)
                if (o.feedback_class == cls && cluster_domains.count(o.domain))
                    refs.push_back({&o, domain_by_name.at(o.domain)});
            if (refs.empty()) continue;
            std::sort(refs.begin(), refs.end(), detail::by_value_then_name);

            // 3. Similarity subgroups: seed with the highest value, attach
            // anything meeting the threshold against every current member.
            std::vector<detail::ObjectiveRef> remaining = std::move(refs);
            while (!remaining.empty()) {
                std::vector<detail::ObjectiveRef> group{remaining.front()};
                remaining.erase(remaining.begin());
                for (auto it = remaining.begin(); it != remaining.end();) {
                    const bool compatible = std::all_of(
                        group.begin(), group.end(), [&](const detail::ObjectiveRef& g) {
                            return detail::similarity_between(*it->meta, *g.meta) >=
                                   policy.similarity_min;
                        });
                    if (compatible) {
                        group.push_back(*it);
                        it = remaining.erase(it);
                    } else {
                        ++it;
                    }
                }
                split_compliant(std::move(group));
            }
        }
    }
    return portfolios;
}

} // namespace lattice
