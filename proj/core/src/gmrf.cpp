#include "gtr/gmrf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gtr/errors.hpp"
#include "gtr/rng.hpp"

namespace gtr {

namespace {

std::string pos_str(TokenPos p) {
    return "(" + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
}

std::vector<int> raster_indices(GridShape shape, std::span<const TokenPos> positions,
                                const char* what) {
    std::vector<int> out;
    out.reserve(positions.size());
    for (const TokenPos& p : positions) {
        if (!in_bounds(p, shape)) {
            throw IndexOutOfRange(std::string(what) + " position " + pos_str(p) + " outside " +
                                  std::to_string(shape.h) + "x" + std::to_string(shape.w) + " grid");
        }
        out.push_back(raster_index(p, shape));
    }
    return out;
}

void require_disjoint(std::span<const int> a, std::span<const int> b, GridShape shape) {
    std::vector<char> seen(static_cast<std::size_t>(shape.tokens()), 0);
    for (int r : a) {
        if (seen[static_cast<std::size_t>(r)]++) {
            throw OverlappingSets("position " + pos_str(pos_at(r, shape)) + " repeated in target set");
        }
    }
    for (int r : b) {
        if (seen[static_cast<std::size_t>(r)]++) {
            throw OverlappingSets("position " + pos_str(pos_at(r, shape)) +
                                  " appears in both target and observed sets");
        }
    }
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, std::span<const int> rows,
                          std::span<const int> cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                m(rows[r], cols[c]);
        }
    }
    return out;
}

Eigen::VectorXd subvector(const Eigen::VectorXd& v, std::span<const int> rows) {
    Eigen::VectorXd out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = v(rows[r]);
    return out;
}

// One masked-AR step reduced to an affine-Gaussian update: targets get mean
// offset + regression * x_observed and independent innovations of variance
// innovation_var (true scalar conditional variance, optionally inflated by
// the finite-step sampler factor). observed refers to all previously
// generated tokens in generation order.
struct CompiledStep {
    std::vector<int> target_rasters;
    Eigen::MatrixXd regression;
    Eigen::VectorXd offset;
    Eigen::VectorXd innovation_var;
};

struct CompiledPlan {
    std::vector<CompiledStep> steps;
    std::vector<int> generation_rasters;  // generation order
    int dim = 0;
};

CompiledPlan compile_plan(const GmrfModel& model, const SamplingPlan& plan,
                          const SamplerBias& bias) {
    if (plan.shape != model.shape) {
        throw InvalidArgument("plan shape does not match model shape");
    }
    CompiledPlan compiled;
    compiled.dim = model.dim();

    std::vector<char> generated(static_cast<std::size_t>(model.dim()), 0);
    for (const PlanStep& step : plan.steps) {
        if (step.tokens.empty()) throw EmptySet("plan contains a step with no tokens");
        if (step.steps.size() != step.tokens.size()) {
            throw InvalidArgument("plan step has mismatched token/step-count lengths");
        }
        const std::vector<int> targets = raster_indices(model.shape, step.tokens, "plan");
        for (int r : targets) {
            if (generated[static_cast<std::size_t>(r)]) {
                throw OverlappingSets("token " + pos_str(pos_at(r, model.shape)) +
                                      " generated more than once");
            }
        }

        const auto& observed = compiled.generation_rasters;
        const Eigen::MatrixXd sigma_to =
            submatrix(model.covariance, targets, observed);  // |X| x |O|

        CompiledStep op;
        op.target_rasters = targets;
        if (observed.empty()) {
            op.regression.resize(static_cast<Eigen::Index>(targets.size()), 0);
        } else {
            const Eigen::MatrixXd sigma_oo = submatrix(model.covariance, observed, observed);
            op.regression = Eigen::LLT<Eigen::MatrixXd>(sigma_oo)
                                .solve(sigma_to.transpose())
                                .transpose();
        }
        op.offset = subvector(model.mean, targets) -
                    op.regression * subvector(model.mean, observed);
        op.innovation_var.resize(static_cast<Eigen::Index>(targets.size()));
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            double v = model.covariance(targets[t], targets[t]);
            if (!observed.empty()) v -= op.regression.row(ti).dot(sigma_to.row(ti));
            if (bias.enabled) {
                v *= per_token_sampler_law(step.steps[t], bias.beta_rate, bias.horizon).variance;
            }
            op.innovation_var(ti) = std::max(v, 0.0);
        }
        compiled.steps.push_back(std::move(op));

        for (int r : targets) {
            generated[static_cast<std::size_t>(r)] = 1;
            compiled.generation_rasters.push_back(r);
        }
    }
    if (static_cast<int>(compiled.generation_rasters.size()) != model.dim()) {
        throw InvalidArgument("plan covers " + std::to_string(compiled.generation_rasters.size()) +
                              " of " + std::to_string(model.dim()) + " tokens");
    }
    return compiled;
}

// Permutation sending generation order back to raster order: Eigen's
// convention is (P*v)(indices(g)) = v(g), and slot g of the generation-order
// state holds raster cell generation_rasters[g].
Eigen::PermutationMatrix<Eigen::Dynamic> raster_permutation(const CompiledPlan& compiled) {
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(compiled.dim);
    for (int g = 0; g < compiled.dim; ++g) {
        perm.indices()(g) = compiled.generation_rasters[static_cast<std::size_t>(g)];
    }
    return perm;
}

}  // namespace

GmrfModel build_grid_gmrf(GridShape shape, double rho, double diag,
                          std::span<const double> rho_map, std::span<const double> mean) {
    require_valid(shape);
    const int n = shape.tokens();
    if (!rho_map.empty() && static_cast<int>(rho_map.size()) != n) {
        throw InvalidArgument("rho_map has " + std::to_string(rho_map.size()) +
                              " entries for a grid of " + std::to_string(n));
    }
    if (!mean.empty() && static_cast<int>(mean.size()) != n) {
        throw InvalidArgument("mean has " + std::to_string(mean.size()) +
                              " entries for a grid of " + std::to_string(n));
    }

    GmrfModel model;
    model.shape = shape;
    model.precision = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        model.precision(r, r) = diag;
        const TokenPos p = pos_at(r, shape);
        // Right and down neighbors; symmetry fills the rest.
        for (const TokenPos q : {TokenPos{p.i, p.j + 1}, TokenPos{p.i + 1, p.j}}) {
            if (!in_bounds(q, shape)) continue;
            const int s = raster_index(q, shape);
            const double coupling =
                rho_map.empty()
                    ? rho
                    : 0.5 * (rho_map[static_cast<std::size_t>(r)] + rho_map[static_cast<std::size_t>(s)]);
            model.precision(r, s) = -coupling;
            model.precision(s, r) = -coupling;
        }
    }

    const Eigen::LLT<Eigen::MatrixXd> llt(model.precision);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("precision d*I - coupling is not positive definite (d=" +
                                  std::to_string(diag) + ")");
    }
    model.covariance = llt.solve(Eigen::MatrixXd::Identity(n, n));
    // Solve output drifts off symmetric at roundoff level; re-symmetrize so
    // downstream Cholesky factorizations see an exactly symmetric matrix.
    model.covariance = 0.5 * (model.covariance + model.covariance.transpose()).eval();

    model.mean = Eigen::VectorXd::Zero(n);
    for (std::size_t r = 0; r < mean.size(); ++r) {
        model.mean(static_cast<Eigen::Index>(r)) = mean[r];
    }
    return model;
}

ConditionalLaw conditional_law(const GmrfModel& model, std::span<const TokenPos> target,
                               std::span<const TokenPos> observed) {
    if (target.empty()) throw EmptySet("conditional law needs a nonempty target set");
    const std::vector<int> t_idx = raster_indices(model.shape, target, "target");
    const std::vector<int> o_idx = raster_indices(model.shape, observed, "observed");
    require_disjoint(t_idx, o_idx, model.shape);

    ConditionalLaw law;
    if (o_idx.empty()) {
        law.regression.resize(static_cast<Eigen::Index>(t_idx.size()), 0);
        law.covariance = submatrix(model.covariance, t_idx, t_idx);
        law.offset = subvector(model.mean, t_idx);
        return law;
    }

    // Work from the precision of the (target, observed) marginal: invert the
    // joint marginal covariance, then the target-target block of that
    // precision is the inverse conditional covariance and -Q_TT^{-1} Q_TO the
    // regression. Marginalizing unmentioned cells happens for free in
    // covariance space.
    std::vector<int> joint = t_idx;
    joint.insert(joint.end(), o_idx.begin(), o_idx.end());
    const Eigen::MatrixXd marginal_cov = submatrix(model.covariance, joint, joint);
    const Eigen::LLT<Eigen::MatrixXd> llt(marginal_cov);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("marginal covariance of the selected cells is not positive definite");
    }
    const Eigen::MatrixXd marginal_prec =
        llt.solve(Eigen::MatrixXd::Identity(marginal_cov.rows(), marginal_cov.cols()));

    const auto nt = static_cast<Eigen::Index>(t_idx.size());
    const auto no = static_cast<Eigen::Index>(o_idx.size());
    const Eigen::MatrixXd q_tt = marginal_prec.topLeftCorner(nt, nt);
    const Eigen::MatrixXd q_to = marginal_prec.topRightCorner(nt, no);

    const Eigen::LLT<Eigen::MatrixXd> tt(q_tt);
    if (tt.info() != Eigen::Success) {
        throw NotPositiveDefinite("conditional precision block is not positive definite");
    }
    law.covariance = tt.solve(Eigen::MatrixXd::Identity(nt, nt));
    law.covariance = 0.5 * (law.covariance + law.covariance.transpose()).eval();
    law.regression = -tt.solve(q_to);
    law.offset = subvector(model.mean, t_idx) - law.regression * subvector(model.mean, o_idx);
    return law;
}

double PerTokenSamplerLaw::kl() const { return 0.5 * (variance - 1.0 - std::log(variance)); }

PerTokenSamplerLaw per_token_sampler_law(int steps, double beta_rate, double horizon) {
    if (steps < 1) throw InvalidArgument("sampler needs >= 1 step, got " + std::to_string(steps));
    if (!(beta_rate > 0.0) || !(horizon > 0.0)) {
        throw InvalidArgument("beta_rate and horizon must be positive");
    }
    const double dt = horizon / steps;
    double v = 1.0;
    for (int t = 0; t < steps; ++t) {
        const double shrink = 1.0 - 0.5 * beta_rate * dt;
        v = v * shrink * shrink + beta_rate * dt;
    }
    return {steps, v};
}

GaussianLaw propagate_plan(const GmrfModel& model, const SamplingPlan& plan,
                           const SamplerBias& bias) {
    const CompiledPlan compiled = compile_plan(model, plan, bias);
    const int n = compiled.dim;

    // Mean and covariance of the tokens generated so far, generation-ordered.
    Eigen::VectorXd mean(n);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index done = 0;
    for (const CompiledStep& op : compiled.steps) {
        const auto nx = static_cast<Eigen::Index>(op.target_rasters.size());
        mean.segment(done, nx) = op.offset + op.regression * mean.head(done);

        const Eigen::MatrixXd cross = op.regression * cov.topLeftCorner(done, done);
        cov.block(done, 0, nx, done) = cross;
        cov.block(0, done, done, nx) = cross.transpose();
        Eigen::MatrixXd diag_block = cross * op.regression.transpose();
        diag_block.diagonal() += op.innovation_var;
        cov.block(done, done, nx, nx) = 0.5 * (diag_block + diag_block.transpose());
        done += nx;
    }

    const auto perm = raster_permutation(compiled);
    GaussianLaw law;
    law.mean = perm * mean;
    law.covariance = perm * cov * perm.transpose();
    return law;
}

KlResult kl_to_truth(const GaussianLaw& law, const GmrfModel& model) {
    if (law.dim() != model.dim()) {
        throw InvalidArgument("law dimension " + std::to_string(law.dim()) +
                              " does not match model dimension " + std::to_string(model.dim()));
    }
    const int n = model.dim();

    const Eigen::LLT<Eigen::MatrixXd> llt(model.precision);
    double logdet_precision = 0.0;
    for (int i = 0; i < n; ++i) logdet_precision += 2.0 * std::log(llt.matrixL()(i, i));

    // The plan law can be rank-deficient (deterministic tokens under extreme
    // bias), so take eigenvalues and floor them rather than trusting a
    // Cholesky to exist.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(law.covariance);
    constexpr double kFloor = 1e-12;
    KlResult result;
    double logdet_law = 0.0;
    for (int i = 0; i < n; ++i) {
        double lambda = eig.eigenvalues()(i);
        if (lambda < kFloor) {
            lambda = kFloor;
            result.floored = true;
        }
        logdet_law += std::log(lambda);
    }

    const Eigen::VectorXd delta = law.mean - model.mean;
    const double trace = (model.precision * law.covariance).trace();
    const double quad = delta.dot(model.precision * delta);
    result.value = 0.5 * (trace + quad - n - logdet_precision - logdet_law);
    return result;
}

double conditional_variance_trace(const GmrfModel& model, std::span<const TokenPos> observed) {
    const std::vector<int> o_idx = raster_indices(model.shape, observed, "observed");
    require_disjoint(o_idx, {}, model.shape);

    std::vector<char> is_observed(static_cast<std::size_t>(model.dim()), 0);
    for (int r : o_idx) is_observed[static_cast<std::size_t>(r)] = 1;
    std::vector<int> rest;
    for (int r = 0; r < model.dim(); ++r) {
        if (!is_observed[static_cast<std::size_t>(r)]) rest.push_back(r);
    }
    if (rest.empty()) throw EmptySet("no unobserved cells left to complete");

    // Conditional precision of the complement is just the complement block of
    // the joint precision; its inverse trace is the measure.
    const Eigen::MatrixXd cond_prec = submatrix(model.precision, rest, rest);
    const Eigen::LLT<Eigen::MatrixXd> llt(cond_prec);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("complement precision block is not positive definite");
    }
    return llt.solve(Eigen::MatrixXd::Identity(cond_prec.rows(), cond_prec.cols())).trace();
}

Eigen::VectorXd sample_plan_once(const GmrfModel& model, const SamplingPlan& plan,
                                 std::uint64_t seed, const SamplerBias& bias) {
    const CompiledPlan compiled = compile_plan(model, plan, bias);
    GaussianRng rng(seed);

    Eigen::VectorXd state(compiled.dim);
    Eigen::Index done = 0;
    for (const CompiledStep& op : compiled.steps) {
        const auto nx = static_cast<Eigen::Index>(op.target_rasters.size());
        Eigen::VectorXd draw = op.offset + op.regression * state.head(done);
        for (Eigen::Index t = 0; t < nx; ++t) {
            draw(t) += std::sqrt(op.innovation_var(t)) * rng.next();
        }
        state.segment(done, nx) = draw;
        done += nx;
    }
    return raster_permutation(compiled) * state;
}

MomentEstimate monte_carlo_execute(const GmrfModel& model, const SamplingPlan& plan,
                                   long long n_samples, std::uint64_t seed,
                                   const SamplerBias& bias) {
    if (n_samples < 2) throw InvalidArgument("need >= 2 samples for a covariance estimate");
    const CompiledPlan compiled = compile_plan(model, plan, bias);
    const auto perm = raster_permutation(compiled);
    const int n = compiled.dim;

    // Welford accumulation keeps this single-pass without storing draws.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd state(n);
    for (long long s = 0; s < n_samples; ++s) {
        GaussianRng rng(stream_seed(seed, static_cast<std::uint64_t>(s)));
        Eigen::Index done = 0;
        for (const CompiledStep& op : compiled.steps) {
            const auto nx = static_cast<Eigen::Index>(op.target_rasters.size());
            Eigen::VectorXd draw = op.offset + op.regression * state.head(done);
            for (Eigen::Index t = 0; t < nx; ++t) {
                draw(t) += std::sqrt(op.innovation_var(t)) * rng.next();
            }
            state.segment(done, nx) = draw;
            done += nx;
        }
        const Eigen::VectorXd sample = perm * state;
        const Eigen::VectorXd delta = sample - mean;
        mean += delta / static_cast<double>(s + 1);
        m2.noalias() += delta * (sample - mean).transpose();
    }

    MomentEstimate estimate;
    estimate.mean = mean;
    estimate.covariance = (0.5 * (m2 + m2.transpose())) / static_cast<double>(n_samples - 1);
    estimate.samples = n_samples;
    return estimate;
}

ConditioningVector token_features(const GmrfModel& model, TokenPos pos, int half_width) {
    if (half_width < 1) {
        throw InvalidArgument("window half-width must be >= 1, got " + std::to_string(half_width));
    }
    if (!in_bounds(pos, model.shape)) {
        throw IndexOutOfRange("position " + pos_str(pos) + " outside grid");
    }

    std::vector<TokenPos> window;
    for (int di = -half_width; di <= half_width; ++di) {
        for (int dj = -half_width; dj <= half_width; ++dj) {
            if (di == 0 && dj == 0) continue;
            const TokenPos q{pos.i + di, pos.j + dj};
            if (in_bounds(q, model.shape)) window.push_back(q);
        }
    }
    const TokenPos target[] = {pos};
    const ConditionalLaw law = conditional_law(model, target, window);

    const int side = 2 * half_width + 1;
    ConditioningVector features(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), 0.0);
    for (std::size_t c = 0; c < window.size(); ++c) {
        const int slot = (window[c].i - pos.i + half_width) * side + (window[c].j - pos.j + half_width);
        features[static_cast<std::size_t>(slot)] = law.regression(0, static_cast<Eigen::Index>(c));
    }
    return features;
}

}  // namespace gtr
