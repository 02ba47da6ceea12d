#pragma once

// Profile-driven execution-plan search: an exact dynamic program over
// (layer, memory) states seeds a beam search that alternates between
// mutating per-layer strategies/batch size and mutating model knobs, scoring
// candidates by a scaling-law quality surrogate under latency and quality
// constraints.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

// Per-layer profile measurements. Memory is in integral units so the DP can
// index it as an array dimension; latency entries are milliseconds.
class ProfileTable {
public:
    ProfileTable(std::size_t layer_count, std::vector<std::string> strategies,
                 std::vector<std::uint32_t> batch_sizes, std::vector<double> latency_ms,
                 std::vector<std::int64_t> memory_units, std::vector<double> comm_ms)
        : layers_(layer_count), strategies_(std::move(strategies)),
          batch_sizes_(std::move(batch_sizes)), latency_(std::move(latency_ms)),
          memory_(std::move(memory_units)), comm_(std::move(comm_ms)) {
        if (layers_ == 0) throw UsageError("ProfileTable: no layers");
        if (strategies_.empty()) throw UsageError("ProfileTable: no strategies");
        if (batch_sizes_.empty()) throw UsageError("ProfileTable: no batch sizes");
        std::set<std::string> names;
        for (const auto& s : strategies_) {
            if (s.empty()) throw UsageError("ProfileTable: empty strategy name");
            if (!names.insert(s).second)
                throw UsageError("ProfileTable: duplicate strategy '" + s + "'");
        }
        for (std::size_t i = 0; i < batch_sizes_.size(); ++i) {
            if (batch_sizes_[i] == 0 || (i > 0 && batch_sizes_[i] <= batch_sizes_[i - 1]))
                throw UsageError("ProfileTable: batch sizes must be positive and strictly increasing");
        }
        const std::size_t cells = layers_ * strategies_.size() * batch_sizes_.size();
        if (latency_.size() != cells || memory_.size() != cells)
            throw UsageError("ProfileTable: incomplete latency/memory profile");
        if (comm_.size() != layers_ * strategies_.size())
            throw UsageError("ProfileTable: incomplete communication profile");
        for (double v : latency_)
            if (!std::isfinite(v) || v < 0.0)
                throw UsageError("ProfileTable: latency must be finite and >= 0");
        for (std::int64_t v : memory_)
            if (v < 0) throw UsageError("ProfileTable: memory must be >= 0");
        for (double v : comm_)
            if (!std::isfinite(v) || v < 0.0)
                throw UsageError("ProfileTable: comm latency must be finite and >= 0");
    }

    std::size_t layer_count() const { return layers_; }
    const std::vector<std::string>& strategies() const { return strategies_; }
    const std::vector<std::uint32_t>& batch_sizes() const { return batch_sizes_; }

    double latency(std::size_t layer, std::size_t strategy, std::size_t batch_idx) const {
        return latency_[(layer * strategies_.size() + strategy) * batch_sizes_.size() + batch_idx];
    }
    std::int64_t memory(std::size_t layer, std::size_t strategy, std::size_t batch_idx) const {
        return memory_[(layer * strategies_.size() + strategy) * batch_sizes_.size() + batch_idx];
    }
    double comm(std::size_t layer, std::size_t strategy) const {
        return comm_[layer * strategies_.size() + strategy];
    }

    std::size_t batch_index(std::uint32_t batch) const {
        for (std::size_t i = 0; i < batch_sizes_.size(); ++i)
            if (batch_sizes_[i] == batch) return i;
        throw UsageError("ProfileTable: batch size " + std::to_string(batch) + " not profiled");
    }

private:
    std::size_t layers_;
    std::vector<std::string> strategies_;
    std::vector<std::uint32_t> batch_sizes_;
    std::vector<double> latency_;
    std::vector<std::int64_t> memory_;
    std::vector<double> comm_;
};

struct ExecutionPlan {
    std::uint32_t batch = 0;
    std::vector<std::size_t> per_layer;  // strategy index per layer
    double total_latency_ms = 0.0;       // sum over layers of latency + comm
    std::int64_t memory_units = 0;       // sum over layers of memory

    double throughput() const {
        return total_latency_ms > 0.0 ? static_cast<double>(batch) / total_latency_ms
                                      : std::numeric_limits<double>::infinity();
    }
};

// Recomputes latency/memory of an assignment from the table; the plan fields
// must always match this exactly.
inline ExecutionPlan materialize_plan(const ProfileTable& profile, std::uint32_t batch,
                                      std::vector<std::size_t> per_layer) {
    if (per_layer.size() != profile.layer_count())
        throw UsageError("materialize_plan: wrong layer count");
    const std::size_t b = profile.batch_index(batch);
    ExecutionPlan plan;
    plan.batch = batch;
    for (std::size_t l = 0; l < per_layer.size(); ++l) {
        const std::size_t s = per_layer[l];
        if (s >= profile.strategies().size())
            throw UsageError("materialize_plan: strategy index out of range");
        plan.total_latency_ms += profile.latency(l, s, b) + profile.comm(l, s);
        plan.memory_units += profile.memory(l, s, b);
    }
    plan.per_layer = std::move(per_layer);
    return plan;
}

// Exact DP over (layer, memory-used) states for one batch size:
//   best[l+1][r] = min over s of best[l][r - mem(l, s)] + lat(l, s) + comm(l, s)
// Ties in the argmin go to the lowest strategy index. Returns nullopt when no
// assignment fits the capacity. O(|S| * L * R).
inline std::optional<ExecutionPlan> dp_bootstrap(const ProfileTable& profile,
                                                 std::int64_t capacity, std::uint32_t batch) {
    if (capacity <= 0) throw UsageError("dp_bootstrap: capacity must be positive");
    const std::size_t b = profile.batch_index(batch);
    const std::size_t L = profile.layer_count();
    const std::size_t S = profile.strategies().size();
    const std::size_t R = static_cast<std::size_t>(capacity);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> prev(R + 1, 0.0), cur(R + 1, kInf);
    std::vector<std::uint32_t> choice((R + 1) * L, 0);

    for (std::size_t l = 0; l < L; ++l) {
        std::fill(cur.begin(), cur.end(), kInf);
        for (std::size_t r = 0; r <= R; ++r) {
            double best = kInf;
            std::uint32_t best_s = 0;
            for (std::size_t s = 0; s < S; ++s) {
                const std::int64_t need = profile.memory(l, s, b);
                if (need > static_cast<std::int64_t>(r)) continue;
                const double candidate =
                    prev[r - static_cast<std::size_t>(need)] + profile.latency(l, s, b) +
                    profile.comm(l, s);
                if (candidate < best) {
                    best = candidate;
                    best_s = static_cast<std::uint32_t>(s);
                }
            }
            cur[r] = best;
            choice[l * (R + 1) + r] = best_s;
        }
        std::swap(prev, cur);
    }

    if (!std::isfinite(prev[R])) return std::nullopt;

    // prev[r] is non-increasing in r, so the best reachable state is at r = R.
    std::vector<std::size_t> per_layer(L, 0);
    std::size_t r = R;
    for (std::size_t l = L; l-- > 0;) {
        const std::size_t s = choice[l * (R + 1) + r];
        per_layer[l] = s;
        r -= static_cast<std::size_t>(profile.memory(l, s, b));
    }
    return materialize_plan(profile, batch, std::move(per_layer));
}

struct BatchOutcome {
    std::uint32_t batch = 0;
    bool feasible = false;
    double total_latency_ms = 0.0; // meaningful when feasible
    double throughput = 0.0;       // batch / latency, when feasible
};

struct BatchPlanSearch {
    std::optional<ExecutionPlan> best; // max throughput; ties -> smaller batch
    std::vector<BatchOutcome> outcomes;
};

inline BatchPlanSearch dp_bootstrap_all_batches(const ProfileTable& profile,
                                                std::int64_t capacity) {
    BatchPlanSearch result;
    for (std::uint32_t batch : profile.batch_sizes()) {
        BatchOutcome outcome;
        outcome.batch = batch;
        if (auto plan = dp_bootstrap(profile, capacity, batch)) {
            outcome.feasible = true;
            outcome.total_latency_ms = plan->total_latency_ms;
            outcome.throughput = plan->throughput();
            if (!result.best || outcome.throughput > result.best->throughput())
                result.best = std::move(plan);
        }
        result.outcomes.push_back(outcome);
    }
    return result;
}

// Largest profiled batch size admitting any assignment within capacity.
inline std::optional<std::uint32_t> estimate_max_batch(const ProfileTable& profile,
                                                       std::int64_t capacity) {
    const auto& batches = profile.batch_sizes();
    for (std::size_t i = batches.size(); i-- > 0;)
        if (dp_bootstrap(profile, capacity, batches[i])) return batches[i];
    return std::nullopt;
}

struct KnobSpec {
    std::string name;
    double min_value = 0.0;
    double max_value = 0.0;
    bool integral = false;
    double initial = 0.0;
};

struct HyperparamPoint {
    std::vector<double> values; // aligned with the space's knob order
    double flops = 0.0;
};

// Knob bounds plus a pluggable FLOPs formula. The formula must be
// recomputable from the knob values and strictly positive.
class HyperparamSpace {
public:
    using FlopsFn = std::function<double(std::span<const double>)>;

    HyperparamSpace(std::vector<KnobSpec> knobs, FlopsFn flops)
        : knobs_(std::move(knobs)), flops_(std::move(flops)) {
        if (knobs_.empty()) throw UsageError("HyperparamSpace: no knobs");
        if (!flops_) throw UsageError("HyperparamSpace: missing flops formula");
        std::set<std::string> names;
        for (const auto& k : knobs_) {
            if (k.name.empty()) throw UsageError("HyperparamSpace: empty knob name");
            if (!names.insert(k.name).second)
                throw UsageError("HyperparamSpace: duplicate knob '" + k.name + "'");
            if (!(k.min_value <= k.max_value))
                throw UsageError("HyperparamSpace: knob '" + k.name + "' has empty range");
            if (k.initial < k.min_value || k.initial > k.max_value)
                throw UsageError("HyperparamSpace: knob '" + k.name + "' initial out of bounds");
        }
    }

    const std::vector<KnobSpec>& knobs() const { return knobs_; }

    HyperparamPoint make(std::vector<double> values) const {
        if (values.size() != knobs_.size())
            throw UsageError("HyperparamSpace: wrong knob count");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (knobs_[i].integral) values[i] = std::round(values[i]);
            if (values[i] < knobs_[i].min_value || values[i] > knobs_[i].max_value)
                throw UsageError("HyperparamSpace: knob '" + knobs_[i].name + "' out of bounds");
        }
        HyperparamPoint p;
        p.flops = flops_(values);
        if (!(p.flops > 0.0) || !std::isfinite(p.flops))
            throw UsageError("HyperparamSpace: flops formula must be positive and finite");
        p.values = std::move(values);
        return p;
    }

    HyperparamPoint initial_point() const {
        std::vector<double> values;
        for (const auto& k : knobs_) values.push_back(k.initial);
        return make(std::move(values));
    }

    double clamp(std::size_t knob, double v) const {
        const auto& k = knobs_[knob];
        v = std::min(std::max(v, k.min_value), k.max_value);
        return k.integral ? std::round(v) : v;
    }

private:
    std::vector<KnobSpec> knobs_;
    FlopsFn flops_;
};

// Declarative FLOPs form for file-driven configs: coefficient * prod(v_i ^ e_i).
struct MonomialFlops {
    double coefficient = 1.0;
    std::vector<double> exponents; // aligned with knob order

    double operator()(std::span<const double> values) const {
        double f = coefficient;
        for (std::size_t i = 0; i < values.size() && i < exponents.size(); ++i)
            f *= std::pow(values[i], exponents[i]);
        return f;
    }
};

// Scaling-law surrogate: quality(f) = q0 * (f / f0)^alpha.
struct QualityModel {
    double baseline_quality = 0.0; // Q0 at reference flops
    double reference_flops = 1.0;  // f0
    double exponent = 0.003;       // alpha

    double quality(double flops) const { return baseline_quality * std::pow(flops / reference_flops, exponent); }

    void validate() const {
        if (!(baseline_quality >= 0.0)) throw UsageError("QualityModel: Q0 must be >= 0");
        if (!(reference_flops > 0.0)) throw UsageError("QualityModel: f0 must be > 0");
        if (!(exponent > 0.0)) throw UsageError("QualityModel: exponent must be > 0");
    }
};

enum class ScoreMode {
    quality_per_flops, // quality / flops^alpha, throughput only breaks ties
    throughput,        // batch / latency, quality acts as constraint only
};

struct SearchConfig {
    std::size_t beam_width = 4;       // K
    std::size_t steps_per_phase = 8;  // S
    double latency_budget_ms = 0.0;   // T
    double quality_floor = 0.0;       // Q
    std::int64_t memory_capacity = 0; // R, integral units
    Seed seed;
    double scaling_exponent = 0.003; // alpha
    std::size_t max_iterations = 8;  // phase count cap
    ScoreMode mode = ScoreMode::quality_per_flops;

    void validate() const {
        if (beam_width == 0) throw UsageError("SearchConfig: beam_width must be positive");
        if (steps_per_phase == 0) throw UsageError("SearchConfig: steps_per_phase must be positive");
        if (!(latency_budget_ms > 0.0)) throw UsageError("SearchConfig: latency budget must be positive");
        if (!(quality_floor > 0.0)) throw UsageError("SearchConfig: quality floor must be positive");
        if (memory_capacity <= 0) throw UsageError("SearchConfig: memory capacity must be positive");
        if (!(scaling_exponent > 0.0 && scaling_exponent < 1.0))
            throw UsageError("SearchConfig: scaling exponent must be in (0, 1)");
        if (max_iterations == 0) throw UsageError("SearchConfig: max_iterations must be positive");
    }
};

// Constraint rule: violating the latency budget or the quality floor zeroes
// the score. Otherwise quality / flops^alpha -- constant along the surrogate
// scaling curve, so improving it means beating the scaling baseline.
inline double score(const ExecutionPlan& plan, const HyperparamPoint& hp, const QualityModel& qm,
                    const SearchConfig& cfg) {
    const double quality = qm.quality(hp.flops);
    if (plan.total_latency_ms > cfg.latency_budget_ms) return 0.0;
    if (quality < cfg.quality_floor) return 0.0;
    if (cfg.mode == ScoreMode::throughput) return plan.throughput();
    return quality / std::pow(hp.flops, cfg.scaling_exponent);
}

struct SearchCandidate {
    HyperparamPoint hp;
    ExecutionPlan plan;
    double score = 0.0;
    double throughput = 0.0;
    std::uint64_t sequence = 0; // insertion order; final tie-break
};

struct PlanProposal {
    std::uint32_t batch = 0;
    std::vector<std::size_t> per_layer;
};

struct ProposalContext {
    const ProfileTable& profile;
    const HyperparamSpace& space;
    const SearchConfig& config;
    std::size_t phase_index;
    const SearchCandidate* best_ever; // highest-scoring candidate seen so far, if any
};

// Proposal strategy interface; deterministic given the Rng it is handed.
class Proposer {
public:
    virtual ~Proposer() = default;
    virtual PlanProposal propose_plan(const ProposalContext& ctx, const SearchCandidate& base,
                                      Rng& rng) = 0;
    virtual std::vector<double> propose_knobs(const ProposalContext& ctx,
                                              const SearchCandidate& base, Rng& rng) = 0;
};

// Seeded random mutation with geometric step decay on knobs, plus periodic
// resampling around the best candidate seen so far.
class MutationProposer : public Proposer {
public:
    PlanProposal propose_plan(const ProposalContext& ctx, const SearchCandidate& base,
                              Rng& rng) override {
        PlanProposal p;
        p.batch = base.plan.batch;
        p.per_layer = base.plan.per_layer;
        const std::size_t layers = ctx.profile.layer_count();
        const std::size_t strategies = ctx.profile.strategies().size();
        const std::size_t mutations = 1 + static_cast<std::size_t>(rng.uniform_below(2));
        for (std::size_t m = 0; m < mutations; ++m) {
            const std::size_t l = static_cast<std::size_t>(rng.uniform_below(layers));
            p.per_layer[l] = static_cast<std::size_t>(rng.uniform_below(strategies));
        }
        if (rng.uniform_below(4) == 0) {
            const auto& batches = ctx.profile.batch_sizes();
            const std::size_t cur = ctx.profile.batch_index(p.batch);
            const bool up = rng.uniform_below(2) == 0;
            if (up && cur + 1 < batches.size()) p.batch = batches[cur + 1];
            if (!up && cur > 0) p.batch = batches[cur - 1];
        }
        return p;
    }

    std::vector<double> propose_knobs(const ProposalContext& ctx, const SearchCandidate& base,
                                      Rng& rng) override {
        ++calls_;
        const SearchCandidate* origin = base.hp.values.empty() ? nullptr : &base;
        if (calls_ % 4 == 0 && ctx.best_ever) origin = ctx.best_ever;

        std::vector<double> values = origin ? origin->hp.values : std::vector<double>{};
        const auto& knobs = ctx.space.knobs();
        const double decay = std::pow(0.7, static_cast<double>(ctx.phase_index / 2));
        const std::size_t k = static_cast<std::size_t>(rng.uniform_below(knobs.size()));
        const double range = knobs[k].max_value - knobs[k].min_value;
        const double step = std::max(range * 0.5 * decay, knobs[k].integral ? 1.0 : range * 1e-3);
        const double delta = (rng.uniform01() * 2.0 - 1.0) * step;
        values[k] = ctx.space.clamp(k, values[k] + delta);
        return values;
    }

private:
    std::uint64_t calls_ = 0;
};

struct BeamSearchResult {
    std::vector<SearchCandidate> ranked; // score > 0 only, descending
    std::string diagnostics;             // non-empty when ranked is empty
};

namespace detail {

inline std::string candidate_key(const SearchCandidate& c) {
    std::string key;
    key.reserve(16 + c.plan.per_layer.size() * 8 + c.hp.values.size() * 8);
    const auto append_u64 = [&key](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((v >> (i * 8)) & 0xFF));
    };
    append_u64(c.plan.batch);
    for (std::size_t s : c.plan.per_layer) append_u64(s);
    for (double v : c.hp.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        append_u64(bits);
    }
    return key;
}

} // namespace detail

// Alternating beam search. The beam is seeded with the DP plan at the default
// knobs plus seeded perturbations, then phases alternate: sharding (knobs
// frozen, plans mutated) and hyperparameters (plans frozen, knobs mutated).
// Each phase runs steps_per_phase proposal rounds of one candidate per beam
// entry; the pool keeps the top beam_width by (score, throughput, insertion).
inline BeamSearchResult beam_search(const ProfileTable& profile, const HyperparamSpace& space,
                                    const QualityModel& qm, const SearchConfig& cfg,
                                    Proposer* proposer = nullptr) {
    cfg.validate();
    qm.validate();
    MutationProposer default_proposer;
    Proposer& prop = proposer ? *proposer : default_proposer;

    Rng rng(cfg.seed);
    std::uint64_t sequence = 0;

    const auto evaluate = [&](const HyperparamPoint& hp, std::uint32_t batch,
                              std::vector<std::size_t> per_layer)
        -> std::optional<SearchCandidate> {
        ExecutionPlan plan;
        try {
            plan = materialize_plan(profile, batch, std::move(per_layer));
        } catch (const UsageError&) {
            return std::nullopt;
        }
        if (plan.memory_units > cfg.memory_capacity) return std::nullopt;
        SearchCandidate c;
        c.hp = hp;
        c.plan = std::move(plan);
        c.score = score(c.plan, c.hp, qm, cfg);
        c.throughput = c.plan.throughput();
        c.sequence = sequence++;
        return c;
    };

    // Seed beam: DP optimum at default knobs, then random perturbations.
    std::vector<SearchCandidate> beam;
    const auto dp = dp_bootstrap_all_batches(profile, cfg.memory_capacity);
    if (!dp.best) {
        BeamSearchResult empty;
        empty.diagnostics = "no feasible plan for any profiled batch size at capacity " +
                            std::to_string(cfg.memory_capacity);
        return empty;
    }
    std::vector<std::uint32_t> feasible_batches;
    for (const auto& o : dp.outcomes)
        if (o.feasible) feasible_batches.push_back(o.batch);

    const HyperparamPoint default_hp = space.initial_point();
    if (auto c = evaluate(default_hp, dp.best->batch, dp.best->per_layer)) beam.push_back(*c);

    while (beam.size() < cfg.beam_width) {
        std::vector<double> values;
        for (const auto& knob : space.knobs()) {
            const double u = rng.uniform01();
            values.push_back(space.clamp(values.size(),
                                         knob.min_value + u * (knob.max_value - knob.min_value)));
        }
        const std::uint32_t batch =
            feasible_batches[static_cast<std::size_t>(rng.uniform_below(feasible_batches.size()))];
        auto base = dp_bootstrap(profile, cfg.memory_capacity, batch);
        auto per_layer = base->per_layer;
        // a couple of random strategy flips; fall back to the DP plan when they break feasibility
        for (int attempt = 0; attempt < 4; ++attempt) {
            auto mutated = per_layer;
            const std::size_t l = static_cast<std::size_t>(rng.uniform_below(mutated.size()));
            mutated[l] = static_cast<std::size_t>(rng.uniform_below(profile.strategies().size()));
            if (materialize_plan(profile, batch, mutated).memory_units <= cfg.memory_capacity) {
                per_layer = mutated;
                break;
            }
        }
        if (auto c = evaluate(space.make(values), batch, per_layer)) beam.push_back(*c);
    }

    const auto beam_signature = [](const std::vector<SearchCandidate>& b) {
        std::string sig;
        for (const auto& c : b) sig += detail::candidate_key(c) + "|";
        return sig;
    };

    SearchCandidate best_copy; // highest score seen so far, stable across beam reshuffles
    bool have_best = false;

    std::string prev_sig = beam_signature(beam);
    std::size_t unchanged_phases = 0;

    for (std::size_t phase = 0; phase < cfg.max_iterations; ++phase) {
        const bool sharding_phase = (phase % 2 == 0);
        for (const auto& c : beam) {
            if (!have_best || c.score > best_copy.score) {
                best_copy = c;
                have_best = true;
            }
        }
        ProposalContext ctx{profile, space, cfg, phase, have_best ? &best_copy : nullptr};

        for (std::size_t step = 0; step < cfg.steps_per_phase; ++step) {
            std::vector<SearchCandidate> pool = beam;
            for (std::size_t i = 0; i < beam.size(); ++i) {
                std::optional<SearchCandidate> cand;
                if (sharding_phase) {
                    PlanProposal p = prop.propose_plan(ctx, beam[i], rng);
                    try {
                        cand = evaluate(beam[i].hp, p.batch, std::move(p.per_layer));
                    } catch (const UsageError&) {
                        cand = std::nullopt;
                    }
                } else {
                    std::vector<double> knobs = prop.propose_knobs(ctx, beam[i], rng);
                    try {
                        cand = evaluate(space.make(std::move(knobs)), beam[i].plan.batch,
                                        beam[i].plan.per_layer);
                    } catch (const UsageError&) {
                        cand = std::nullopt;
                    }
                }
                if (cand) pool.push_back(std::move(*cand));
            }

            std::stable_sort(pool.begin(), pool.end(),
                             [](const SearchCandidate& a, const SearchCandidate& b) {
                                 if (a.score != b.score) return a.score > b.score;
                                 if (a.throughput != b.throughput) return a.throughput > b.throughput;
                                 return a.sequence < b.sequence;
                             });
            std::vector<SearchCandidate> next;
            std::set<std::string> seen;
            for (auto& c : pool) {
                if (!seen.insert(detail::candidate_key(c)).second) continue;
                next.push_back(std::move(c));
                if (next.size() == cfg.beam_width) break;
            }
            beam = std::move(next);
        }

        const std::string sig = beam_signature(beam);
        unchanged_phases = (sig == prev_sig) ? unchanged_phases + 1 : 0;
        prev_sig = sig;
        if (unchanged_phases >= 2) break;
    }

    BeamSearchResult result;
    for (const auto& c : beam)
        if (c.score > 0.0) result.ranked.push_back(c);
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const SearchCandidate& a, const SearchCandidate& b) {
                         if (a.score != b.score) return a.score > b.score;
                         if (a.throughput != b.throughput) return a.throughput > b.throughput;
                         return a.sequence < b.sequence;
                     });
    if (result.ranked.empty())
        result.diagnostics = "beam contains no candidate satisfying the latency and quality constraints";
    return result;
}

} // namespace lattice
