#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gtr/fts.hpp"
#include "gtr/grid.hpp"
#include "gtr/plan.hpp"

// An exactly solvable surrogate for the generative model: a Gaussian Markov
// random field on the token grid. Executing a sampling plan against it means
// drawing every token of a step from its scalar conditional given all
// previously generated tokens, with within-step cross-covariances set to
// zero. That diagonal approximation is exactly the error source of parallel
// set prediction, and because everything is Gaussian the resulting output law
// and its KL divergence to the true joint have closed forms - no sampling
// needed to measure how much a schedule loses.

namespace gtr {

struct GmrfModel {
    GridShape shape;
    Eigen::MatrixXd precision;   // d*I - coupling on the 4-neighbor graph; SPD
    Eigen::MatrixXd covariance;  // precision^{-1}, computed at construction
    Eigen::VectorXd mean;        // raster-indexed

    int dim() const { return static_cast<int>(precision.rows()); }
};

// Homogeneous coupling rho, or a per-position rho_map (edge coupling is the
// mean of its endpoint values). SPD is established by Cholesky factorization;
// d > 4*max|rho| is sufficient but not required. Throws NotPositiveDefinite.
GmrfModel build_grid_gmrf(GridShape shape, double rho, double diag,
                          std::span<const double> rho_map = {},
                          std::span<const double> mean = {});

struct GaussianLaw {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    int dim() const { return static_cast<int>(mean.size()); }
};

// p(x_target | x_observed) with everything else marginalized out:
// mean = offset + regression * x_observed.
struct ConditionalLaw {
    Eigen::MatrixXd regression;  // |target| x |observed|
    Eigen::MatrixXd covariance;  // |target| x |target|
    Eigen::VectorXd offset;
};

ConditionalLaw conditional_law(const GmrfModel& model, std::span<const TokenPos> target,
                               std::span<const TokenPos> observed);

// Output variance of a T-step Euler discretization of the reverse process for
// a standardized Gaussian target with analytic score:
//   v <- v * (1 - beta_rate*dt/2)^2 + beta_rate*dt,  dt = horizon/T, v_0 = 1.
// v(T) -> 1 as T grows; the per-token KL to N(0,1) is (v - 1 - ln v)/2.
struct PerTokenSamplerLaw {
    int steps = 0;
    double variance = 1.0;

    double kl() const;
};

PerTokenSamplerLaw per_token_sampler_law(int steps, double beta_rate = 2.0,
                                         double horizon = 1.0);

struct SamplerBias {
    bool enabled = false;
    double beta_rate = 2.0;
    double horizon = 1.0;
};

// Exact output law of the plan under within-step conditional independence.
// With bias enabled, each token's standardized innovation variance becomes
// v(T) for its scheduled step count T. Deterministic; no sampling.
GaussianLaw propagate_plan(const GmrfModel& model, const SamplingPlan& plan,
                           const SamplerBias& bias = {});

struct KlResult {
    double value = 0.0;
    bool floored = false;  // law covariance eigenvalues were floored at 1e-12
};

// KL(law || N(model.mean, model.covariance)).
KlResult kl_to_truth(const GaussianLaw& law, const GmrfModel& model);

// Trace of the conditional covariance of the complement given the observed
// cells. The consistency analog: smaller trace means completions are more
// tightly pinned down.
double conditional_variance_trace(const GmrfModel& model, std::span<const TokenPos> observed);

struct MomentEstimate {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // sample covariance (N-1 normalization)
    long long samples = 0;
};

// Actually executes the plan n_samples times with seeded randomness and the
// same conditional structure as propagate_plan; the independent cross-check
// for the closed-form propagation.
MomentEstimate monte_carlo_execute(const GmrfModel& model, const SamplingPlan& plan,
                                   long long n_samples, std::uint64_t seed,
                                   const SamplerBias& bias = {});

// Draw one joint sample by executing the plan once. Raster-indexed.
Eigen::VectorXd sample_plan_once(const GmrfModel& model, const SamplingPlan& plan,
                                 std::uint64_t seed, const SamplerBias& bias = {});

// Regression coefficients of pos's conditional mean on its (2w+1)^2 window
// (zero at the center and outside the grid), flattened row-major. Supplies
// conditioning features so frequency scoring can run inside the testbed.
ConditioningVector token_features(const GmrfModel& model, TokenPos pos, int half_width);

}  // namespace gtr
