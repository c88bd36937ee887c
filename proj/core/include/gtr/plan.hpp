#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gtr/grid.hpp"

namespace gtr {

// Tokens generated per masked-AR step, one rate per stage.
struct GenerationRates {
    std::vector<double> rates;
};

struct DiffusionSchedule {
    int t_max = 50;     // first generation step
    int t_min = 20;     // last generation step
    int t_rec = 20;     // reconstruction stage
    int t_detail = 50;  // high-frequency tokens selected for extra refinement
    double beta = 0.1;  // fraction of reconstruction tokens upgraded to t_detail
};

void require_valid(const DiffusionSchedule& sched);

// One masked-AR step: the token set X^{k,m} sampled jointly, with the
// per-token diffusion step budget.
struct PlanStep {
    int stage = 1;                 // 1-based stage index k
    std::vector<TokenPos> tokens;  // X^{k,m}
    std::vector<int> steps;        // diffusion steps, aligned with tokens

    friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct SamplingPlan {
    GridShape shape;
    std::uint64_t seed = 0;
    std::vector<PlanStep> steps;

    int ar_steps() const { return static_cast<int>(steps.size()); }
    int stage_count() const;
};

// ceil(beta * n) with a guard against binary-fraction overshoot
// (0.1 * 130 must give 13, not 14); clamped to [1, n].
int top_fraction_count(double beta, int n);

// Split stage tokens into M = clamp(round(|S|/rate), 1, |S|) chunks of
// near-equal size (larger chunks first), membership by a seeded shuffle.
std::vector<std::vector<TokenPos>> chunk_stage(std::span<const TokenPos> stage_tokens,
                                               double rate, std::uint64_t seed);

// Linearly decreasing budget over the concatenated generation steps:
// m = 1 gets t_max, m = G gets t_min. 1-based m; throws IndexOutOfRange.
int diffusion_steps_for(int m, int total_generation_steps, const DiffusionSchedule& sched);

// The executable plan: stages 1..K-1 chunked at their rates and scheduled
// t_max -> t_min over the concatenated generation steps; stage K chunked
// likewise with every token at t_rec.
SamplingPlan build_plan(const StagePartition& partition, const GenerationRates& rates,
                        const DiffusionSchedule& sched, std::uint64_t seed);

// Single-stage plan that walks `order` in `ar_steps` near-equal chunks with a
// constant per-token budget. Used for the raster/subsample/random baselines.
SamplingPlan plan_from_order(GridShape shape, std::span<const TokenPos> order,
                             int ar_steps, int steps_per_token);

using ScoreMap = std::map<TokenPos, double>;

// Upgrade the ceil(beta * |S_K|) highest-scoring reconstruction tokens to
// t_detail (ties to the smaller raster index). Other tokens are untouched;
// idempotent for fixed scores.
SamplingPlan apply_fts_overrides(const SamplingPlan& plan, const ScoreMap& scores,
                                 const DiffusionSchedule& sched);

struct StageCost {
    int stage = 0;
    long long ar_steps = 0;
    long long token_diffusion_steps = 0;
};

struct CostCounters {
    long long ar_steps = 0;
    long long token_diffusion_steps = 0;
    std::vector<StageCost> per_stage;
};

CostCounters count_cost(const SamplingPlan& plan);

struct PlanViolation {
    std::string kind;  // "coverage" | "disjointness" | "stage-order" | "step-count" | "bounds" | "empty-step" | "shape"
    std::string detail;
};

// Checks coverage, disjointness, stage ordering and positive step counts;
// returns every violation found, empty means ok.
std::vector<PlanViolation> validate_plan(const SamplingPlan& plan, GridShape shape);

}  // namespace gtr
