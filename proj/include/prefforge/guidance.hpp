#pragma once

// Reward-guided item refinement: gradient ascent on the model's preference
// probability with respect to the target item's features, with backtracking
// line search and an optional feature-norm cap.  Accepted steps never lower
// the preference score.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/encode.hpp"
#include "prefforge/kernel.hpp"
#include "prefforge/model.hpp"
#include "prefforge/tape.hpp"
#include "prefforge/world.hpp"

namespace prefforge {

struct GuidanceConfig {
    int steps = 30;          // maximum accepted ascent steps
    double weight = 0.75;    // reward scale on log preference probability
    double step_size = 0.2;  // initial ascent step
    int max_halvings = 8;    // line-search budget per step
    double norm_cap = 1.0;   // features projected into this ball; <= 0 disables
    double min_improve = 1e-12;  // objective gain below this ends the search

    void validate() const {
        require(steps >= 0, "guidance: steps must be >= 0");
        require(weight > 0.0, "guidance: weight must be positive");
        require(step_size > 0.0, "guidance: step_size must be positive");
        require(max_halvings >= 0, "guidance: max_halvings must be >= 0");
        require(min_improve >= 0.0, "guidance: min_improve must be >= 0");
        require_finite(norm_cap, "guidance: norm_cap");
    }
};

struct GuidanceStep {
    int step = 0;
    double q = 0.0;          // preference score after the step
    double objective = 0.0;  // weight * log q
    double step_size = 0.0;  // accepted step length
};

struct GuidanceResult {
    std::vector<double> features;
    double q_before = 0.0;
    double q_after = 0.0;
    int accepted_steps = 0;
    bool hit_step_budget = false;  // stopped because cfg.steps ran out
    std::vector<GuidanceStep> trace;
};

namespace detail {

// Objective weight * log Q and its gradient with respect to the target item's
// features.  The logit-level gradient of log sigmoid(like - dislike) is
// (1 - Q) on `like` and -(1 - Q) on `dislike`; the tape maps it to features.
struct GuidanceEval {
    double q = 0.0;
    double objective = 0.0;
    std::vector<double> grad;  // empty unless requested
};

inline GuidanceEval eval_objective(const Model& model, const SequenceSpec& base,
                                   const std::vector<double>& features, double weight,
                                   bool want_grad) {
    SequenceSpec seq = base;
    seq.target = features;
    tape::Tape t;
    ParamIds ids = model.add_parameters(t, false);
    ForwardNodes f = model.build_forward(t, ids, seq, want_grad);
    GuidanceEval out;
    const LogitPair lp = model.read_logits(t, f);
    out.q = preference_score(lp);
    out.objective = weight * log_sigmoid(lp.like - lp.dislike);
    if (want_grad) {
        const double g = weight * (1.0 - out.q);
        t.backward(f.logits, Tensor2(1, 2, {g, -g}));
        const Tensor2& gphi = t.grad(f.features);
        // Target sub-token rows are the last tokens_per_item rows; they repeat
        // the same feature vector, so their gradients sum.
        const int m = model.config().tokens_per_item;
        const std::size_t first =
            gphi.rows() - static_cast<std::size_t>(m);
        out.grad.assign(features.size(), 0.0);
        for (std::size_t r = first; r < gphi.rows(); ++r)
            for (std::size_t c = 0; c < gphi.cols(); ++c) out.grad[c] += gphi.at(r, c);
    }
    return out;
}

inline void project_norm(std::vector<double>& v, double cap) {
    if (cap <= 0.0) return;
    const double n = norm2(v);
    if (n > cap) {
        const double s = cap / n;
        for (double& x : v) x *= s;
    }
}

}  // namespace detail

// Refines one item's features for one user.  Deterministic; the trace records
// every accepted step.  Throws RefinementError when the start point is
// invalid (non-finite features or an initial score of exactly zero).
inline GuidanceResult refine_item(const Model& model, const World& w, int user_id,
                                  const std::vector<double>& initial_features,
                                  const GuidanceConfig& cfg, std::uint64_t order_seed) {
    cfg.validate();
    require(static_cast<int>(initial_features.size()) == model.config().feature_dim,
            "guidance: feature size mismatch");
    for (double x : initial_features)
        if (!std::isfinite(x))
            throw RefinementError("guidance: initial features contain non-finite values");

    SequenceSpec base = make_sequence(
        w, user_id, initial_features,
        derive_seed(order_seed, "ctx", static_cast<std::uint64_t>(user_id)));

    GuidanceResult res;
    res.features = initial_features;
    detail::project_norm(res.features, cfg.norm_cap);

    detail::GuidanceEval cur =
        detail::eval_objective(model, base, res.features, cfg.weight, false);
    if (!std::isfinite(cur.objective))
        throw RefinementError("guidance: objective is non-finite at the start point");
    res.q_before = cur.q;
    res.q_after = cur.q;

    for (int step = 1; step <= cfg.steps; ++step) {
        detail::GuidanceEval g =
            detail::eval_objective(model, base, res.features, cfg.weight, true);
        double eta = cfg.step_size;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h, eta *= 0.5) {
            std::vector<double> cand = res.features;
            for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += eta * g.grad[i];
            detail::project_norm(cand, cfg.norm_cap);
            detail::GuidanceEval next =
                detail::eval_objective(model, base, cand, cfg.weight, false);
            if (std::isfinite(next.objective) &&
                next.objective > cur.objective + cfg.min_improve) {
                res.features = std::move(cand);
                cur = next;
                res.trace.push_back(GuidanceStep{step, next.q, next.objective, eta});
                ++res.accepted_steps;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // converged: no step length improves the objective
        if (step == cfg.steps) res.hit_step_budget = true;
    }

    res.q_after = cur.q;
    return res;
}

}  // namespace prefforge
