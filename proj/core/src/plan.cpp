#include "gtr/plan.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gtr/rng.hpp"

namespace gtr {

namespace {

std::string pos_str(TokenPos p) {
    return "(" + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
}

// n split into m parts differing by at most one, larger parts first.
std::vector<int> near_even_sizes(int n, int m) {
    std::vector<int> sizes(static_cast<std::size_t>(m), n / m);
    for (int i = 0; i < n % m; ++i) sizes[static_cast<std::size_t>(i)] += 1;
    return sizes;
}

}  // namespace

void require_valid(const DiffusionSchedule& sched) {
    if (sched.t_min < 1 || sched.t_max < sched.t_min) {
        throw InvalidArgument("need t_max >= t_min >= 1, got t_max=" +
                              std::to_string(sched.t_max) + " t_min=" + std::to_string(sched.t_min));
    }
    if (sched.t_rec < 1) throw InvalidArgument("need t_rec >= 1, got " + std::to_string(sched.t_rec));
    if (sched.t_detail < sched.t_rec) {
        throw InvalidArgument("need t_detail >= t_rec, got t_detail=" +
                              std::to_string(sched.t_detail) + " t_rec=" + std::to_string(sched.t_rec));
    }
    if (!(sched.beta > 0.0) || sched.beta > 1.0) {
        throw InvalidBeta("beta must be in (0, 1], got " + std::to_string(sched.beta));
    }
}

int SamplingPlan::stage_count() const {
    int k = 0;
    for (const PlanStep& step : steps) k = std::max(k, step.stage);
    return k;
}

int top_fraction_count(double beta, int n) {
    if (!(beta > 0.0) || beta > 1.0) {
        throw InvalidBeta("beta must be in (0, 1], got " + std::to_string(beta));
    }
    const int count = static_cast<int>(std::ceil(beta * n - 1e-9));
    return std::clamp(count, 1, n);
}

std::vector<std::vector<TokenPos>> chunk_stage(std::span<const TokenPos> stage_tokens,
                                               double rate, std::uint64_t seed) {
    if (stage_tokens.empty()) throw EmptySet("cannot chunk an empty stage");
    if (!(rate > 0.0)) throw InvalidArgument("generation rate must be positive, got " + std::to_string(rate));

    const int n = static_cast<int>(stage_tokens.size());
    const int chunks = std::clamp(static_cast<int>(std::lround(n / rate)), 1, n);

    std::vector<TokenPos> shuffled(stage_tokens.begin(), stage_tokens.end());
    std::mt19937_64 rng(mix64(seed));
    shuffle(shuffled, rng);

    std::vector<std::vector<TokenPos>> out;
    out.reserve(static_cast<std::size_t>(chunks));
    std::size_t next = 0;
    for (int size : near_even_sizes(n, chunks)) {
        out.emplace_back(shuffled.begin() + static_cast<std::ptrdiff_t>(next),
                         shuffled.begin() + static_cast<std::ptrdiff_t>(next + size));
        next += static_cast<std::size_t>(size);
    }
    return out;
}

int diffusion_steps_for(int m, int total_generation_steps, const DiffusionSchedule& sched) {
    require_valid(sched);
    if (total_generation_steps < 1 || m < 1 || m > total_generation_steps) {
        throw IndexOutOfRange("generation step " + std::to_string(m) + " outside 1.." +
                              std::to_string(total_generation_steps));
    }
    if (total_generation_steps == 1) return sched.t_max;
    const double span = static_cast<double>(sched.t_max - sched.t_min);
    const double fraction = static_cast<double>(m - 1) / static_cast<double>(total_generation_steps - 1);
    return static_cast<int>(std::lround(sched.t_max - span * fraction));
}

SamplingPlan build_plan(const StagePartition& partition, const GenerationRates& rates,
                        const DiffusionSchedule& sched, std::uint64_t seed) {
    require_valid(sched);
    const int stage_count = partition.stage_count();
    if (stage_count < 2) {
        throw InvalidStageCount("plan needs a partition with at least 2 stages");
    }
    if (static_cast<int>(rates.rates.size()) != stage_count) {
        throw InvalidArgument("got " + std::to_string(rates.rates.size()) + " rates for " +
                              std::to_string(stage_count) + " stages");
    }

    // Chunk every stage first so the generation-stage step total is known
    // before budgets are assigned.
    std::vector<std::vector<std::vector<TokenPos>>> chunked;
    chunked.reserve(static_cast<std::size_t>(stage_count));
    for (int k = 0; k < stage_count; ++k) {
        chunked.push_back(chunk_stage(partition.stages[static_cast<std::size_t>(k)],
                                      rates.rates[static_cast<std::size_t>(k)],
                                      stream_seed(seed, static_cast<std::uint64_t>(k))));
    }

    int generation_steps = 0;
    for (int k = 0; k < stage_count - 1; ++k) generation_steps += static_cast<int>(chunked[static_cast<std::size_t>(k)].size());

    SamplingPlan plan;
    plan.shape = partition.shape;
    plan.seed = seed;

    int m = 0;  // position within the concatenated generation steps
    for (int k = 0; k < stage_count; ++k) {
        const bool reconstruction = (k == stage_count - 1);
        for (auto& chunk : chunked[static_cast<std::size_t>(k)]) {
            const int t = reconstruction ? sched.t_rec
                                         : diffusion_steps_for(++m, generation_steps, sched);
            PlanStep step;
            step.stage = k + 1;
            step.steps.assign(chunk.size(), t);
            step.tokens = std::move(chunk);
            plan.steps.push_back(std::move(step));
        }
    }
    return plan;
}

SamplingPlan plan_from_order(GridShape shape, std::span<const TokenPos> order, int ar_steps,
                             int steps_per_token) {
    require_valid(shape);
    if (order.empty()) throw EmptySet("cannot plan an empty order");
    if (ar_steps < 1 || ar_steps > static_cast<int>(order.size())) {
        throw InvalidArgument("ar_steps must be in 1..|order|, got " + std::to_string(ar_steps));
    }
    if (steps_per_token < 1) {
        throw InvalidArgument("steps_per_token must be >= 1, got " + std::to_string(steps_per_token));
    }

    SamplingPlan plan;
    plan.shape = shape;
    std::size_t next = 0;
    for (int size : near_even_sizes(static_cast<int>(order.size()), ar_steps)) {
        PlanStep step;
        step.stage = 1;
        step.tokens.assign(order.begin() + static_cast<std::ptrdiff_t>(next),
                           order.begin() + static_cast<std::ptrdiff_t>(next + size));
        step.steps.assign(static_cast<std::size_t>(size), steps_per_token);
        plan.steps.push_back(std::move(step));
        next += static_cast<std::size_t>(size);
    }
    return plan;
}

SamplingPlan apply_fts_overrides(const SamplingPlan& plan, const ScoreMap& scores,
                                 const DiffusionSchedule& sched) {
    require_valid(sched);
    const int last_stage = plan.stage_count();

    std::vector<TokenPos> rec_tokens;
    for (const PlanStep& step : plan.steps) {
        if (step.stage != last_stage) continue;
        rec_tokens.insert(rec_tokens.end(), step.tokens.begin(), step.tokens.end());
    }
    for (const TokenPos& p : rec_tokens) {
        if (!scores.contains(p)) {
            throw MissingScore("reconstruction token (" + std::to_string(p.i) + "," +
                               std::to_string(p.j) + ") has no importance score");
        }
    }

    const int count = top_fraction_count(sched.beta, static_cast<int>(rec_tokens.size()));
    std::stable_sort(rec_tokens.begin(), rec_tokens.end(), [&](TokenPos a, TokenPos b) {
        const double sa = scores.at(a);
        const double sb = scores.at(b);
        if (sa != sb) return sa > sb;
        return a < b;  // ties toward the smaller raster index
    });
    const std::set<TokenPos> selected(rec_tokens.begin(), rec_tokens.begin() + count);

    SamplingPlan out = plan;
    for (PlanStep& step : out.steps) {
        if (step.stage != last_stage) continue;
        for (std::size_t t = 0; t < step.tokens.size(); ++t) {
            if (selected.contains(step.tokens[t])) step.steps[t] = sched.t_detail;
        }
    }
    return out;
}

CostCounters count_cost(const SamplingPlan& plan) {
    CostCounters cost;
    for (const PlanStep& step : plan.steps) {
        cost.ar_steps += 1;
        while (static_cast<int>(cost.per_stage.size()) < step.stage) {
            cost.per_stage.push_back({static_cast<int>(cost.per_stage.size()) + 1, 0, 0});
        }
        StageCost& stage = cost.per_stage[static_cast<std::size_t>(step.stage - 1)];
        stage.ar_steps += 1;
        for (int t : step.steps) {
            cost.token_diffusion_steps += t;
            stage.token_diffusion_steps += t;
        }
    }
    return cost;
}

std::vector<PlanViolation> validate_plan(const SamplingPlan& plan, GridShape shape) {
    std::vector<PlanViolation> violations;
    if (plan.shape != shape) {
        violations.push_back({"shape", "plan shape " + std::to_string(plan.shape.h) + "x" +
                                           std::to_string(plan.shape.w) + " does not match " +
                                           std::to_string(shape.h) + "x" + std::to_string(shape.w)});
    }
    if (!shape.valid()) {
        violations.push_back({"shape", "target shape is invalid"});
        return violations;
    }

    std::vector<int> seen(static_cast<std::size_t>(shape.tokens()), 0);
    int last_stage = 0;
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
        const PlanStep& step = plan.steps[s];
        const std::string where = "step " + std::to_string(s);
        if (step.tokens.empty()) violations.push_back({"empty-step", where + " has no tokens"});
        if (step.stage < last_stage) {
            violations.push_back({"stage-order", where + " stage " + std::to_string(step.stage) +
                                                     " after stage " + std::to_string(last_stage)});
        }
        last_stage = std::max(last_stage, step.stage);
        if (step.steps.size() != step.tokens.size()) {
            violations.push_back({"step-count", where + " has " + std::to_string(step.steps.size()) +
                                                    " step counts for " +
                                                    std::to_string(step.tokens.size()) + " tokens"});
        }
        for (std::size_t t = 0; t < step.tokens.size(); ++t) {
            const TokenPos p = step.tokens[t];
            if (!in_bounds(p, shape)) {
                violations.push_back({"bounds", where + " token " + pos_str(p) + " outside grid"});
                continue;
            }
            if (++seen[static_cast<std::size_t>(raster_index(p, shape))] == 2) {
                violations.push_back({"disjointness", "token " + pos_str(p) + " generated more than once"});
            }
            if (t < step.steps.size() && step.steps[t] < 1) {
                violations.push_back({"step-count", where + " token " + pos_str(p) +
                                                        " has non-positive diffusion steps"});
            }
        }
    }
    for (int r = 0; r < shape.tokens(); ++r) {
        if (seen[static_cast<std::size_t>(r)] == 0) {
            violations.push_back({"coverage", "token " + pos_str(pos_at(r, shape)) + " never generated"});
        }
    }
    return violations;
}

}  // namespace gtr
