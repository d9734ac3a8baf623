#pragma once

// Training loop: Adam with decoupled weight decay, global-norm gradient
// clipping, per-step sampling of (user, history-entry) targets, and a
// deterministic per-step loss log.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/encode.hpp"
#include "prefforge/losses.hpp"
#include "prefforge/model.hpp"
#include "prefforge/rng.hpp"
#include "prefforge/tape.hpp"
#include "prefforge/world.hpp"

namespace prefforge {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // decoupled: applied to params, not gradients

    void validate() const {
        require(lr > 0.0, "adam: lr must be positive");
        require(beta1 >= 0.0 && beta1 < 1.0, "adam: beta1 must be in [0, 1)");
        require(beta2 >= 0.0 && beta2 < 1.0, "adam: beta2 must be in [0, 1)");
        require(eps > 0.0, "adam: eps must be positive");
        require(weight_decay >= 0.0, "adam: weight_decay must be >= 0");
    }
};

// Adam over a fixed list of parameter tensors.  Gradients are passed aligned
// with the tensor list given at construction.
class Adam {
public:
    Adam(std::vector<Tensor2*> params, const AdamConfig& cfg) : params_(std::move(params)), cfg_(cfg) {
        cfg_.validate();
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (Tensor2* p : params_) {
            m_.emplace_back(p->rows(), p->cols());
            v_.emplace_back(p->rows(), p->cols());
        }
    }

    void step(const std::vector<Tensor2>& grads) {
        require(grads.size() == params_.size(), "adam: gradient list size mismatch");
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Tensor2& p = *params_[i];
            const Tensor2& g = grads[i];
            require(p.same_shape(g), "adam: gradient shape mismatch");
            Tensor2& m = m_[i];
            Tensor2& v = v_[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
                v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
                const double mhat = m[j] / bc1;
                const double vhat = v[j] / bc2;
                p[j] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                                   cfg_.weight_decay * p[j]);
            }
        }
    }

    long steps_taken() const { return t_; }

private:
    std::vector<Tensor2*> params_;
    AdamConfig cfg_;
    std::vector<Tensor2> m_, v_;
    long t_ = 0;
};

// Scales gradients so their joint L2 norm is at most max_norm; returns the
// pre-clip norm.  max_norm <= 0 disables clipping.
inline double clip_global_norm(std::vector<Tensor2>& grads, double max_norm) {
    double sq = 0.0;
    for (const Tensor2& g : grads)
        for (std::size_t j = 0; j < g.size(); ++j) sq += g[j] * g[j];
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (Tensor2& g : grads) g *= s;
    }
    return norm;
}

struct TrainConfig {
    int steps = 600;
    int batch_size = 16;
    AdamConfig adam;
    double clip_norm = 5.0;      // global-norm gradient clip; <= 0 disables
    LossWeights loss_weights;    // per-term multipliers (ablation knob)
    int freeze_pref_steps = 0;   // steps during which preference tokens stay fixed
    std::uint64_t seed = 123;
    int log_every = 1;

    void validate() const {
        require(steps >= 0, "train: steps must be >= 0");
        require(batch_size >= 1, "train: batch_size must be >= 1");
        require(log_every >= 1, "train: log_every must be >= 1");
        require(freeze_pref_steps >= 0, "train: freeze_pref_steps must be >= 0");
        adam.validate();
        require_finite(clip_norm, "train: clip_norm");
        require_finite(loss_weights.base, "train: loss weight base");
        require_finite(loss_weights.l_plus, "train: loss weight l_plus");
        require_finite(loss_weights.l_minus, "train: loss weight l_minus");
    }
};

struct TrainLogRow {
    long step = 0;  // 1-based, the step that produced these losses
    double total = 0.0;
    double base = 0.0;
    double l_plus = 0.0;
    double l_minus = 0.0;
};

struct TrainResult {
    std::vector<TrainLogRow> log;
    long steps_run = 0;
    double final_total = 0.0;
    double wall_seconds = 0.0;  // excluded from serialized logs
};

// One training target: user + the history entry whose (liked, disliked) pair
// becomes the prediction targets.  The remaining history is the context.
struct TrainSample {
    int user_id = 0;
    int entry = 0;
};

inline std::vector<TrainSample> training_pool(const World& w) {
    std::vector<TrainSample> pool;
    for (const User& u : w.users) {
        const auto& hist = w.histories[static_cast<std::size_t>(u.id)];
        for (int e = 0; e < static_cast<int>(hist.size()); ++e)
            pool.push_back(TrainSample{u.id, e});
    }
    return pool;
}

// Runs the optimization loop.  Each step samples a batch without replacement,
// scores the liked and disliked item of every sampled history entry against
// the user's remaining history, and descends the combined objective.
// Deterministic given (model init, world, config).
inline TrainResult train(Model& model, const World& w, const TrainConfig& tc,
                         const std::function<void(const TrainLogRow&)>& on_log = {}) {
    tc.validate();
    require(model.config().feature_dim == w.config.feature_dim,
            "train: model feature_dim != world feature_dim");
    require(model.config().max_history + 1 >= w.config.n_ref,
            "train: model max_history too small for world histories");

    std::vector<TrainSample> pool = training_pool(w);
    require(!pool.empty(), "train: world has no history entries to train on");

    auto named = model.parameters();
    std::vector<Tensor2*> param_ptrs;
    int pref_token_index = -1;
    for (std::size_t i = 0; i < named.size(); ++i) {
        param_ptrs.push_back(named[i].second);
        if (named[i].first == "p_v") pref_token_index = static_cast<int>(i);
    }
    Adam opt(param_ptrs, tc.adam);

    TrainResult result;
    const auto t0 = std::chrono::steady_clock::now();

    const int draw = std::min<int>(tc.batch_size, static_cast<int>(pool.size()));
    for (long step = 1; step <= tc.steps; ++step) {
        // Partial Fisher-Yates: the first `draw` entries are the batch.
        Rng batch_rng(derive_seed(tc.seed, "batch", static_cast<std::uint64_t>(step)));
        for (int i = 0; i < draw; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) +
                static_cast<std::size_t>(batch_rng.uniform_index(pool.size() - static_cast<std::size_t>(i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }

        tape::Tape tape;
        ParamIds ids = model.add_parameters(tape, true);
        std::vector<tape::NodeId> id_list;
        for_each_param(model.config(), ids, [&](const std::string&, tape::NodeId& id) {
            id_list.push_back(id);
        });

        PairBatch batch;
        std::vector<std::pair<tape::NodeId, tape::NodeId>> logit_nodes;  // (pos, neg)
        batch.reserve(static_cast<std::size_t>(draw));
        for (int i = 0; i < draw; ++i) {
            const TrainSample& s = pool[static_cast<std::size_t>(i)];
            const HistoryEntry& h =
                w.histories[static_cast<std::size_t>(s.user_id)][static_cast<std::size_t>(s.entry)];
            const std::uint64_t order_seed = derive_seed(
                tc.seed, "order", static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(i));
            SequenceSpec pos_seq = make_sequence(w, s.user_id, w.item(h.pos_item).features,
                                                 order_seed, s.entry);
            SequenceSpec neg_seq = pos_seq;
            neg_seq.target = w.item(h.neg_item).features;
            ForwardNodes fp = model.build_forward(tape, ids, pos_seq);
            ForwardNodes fn = model.build_forward(tape, ids, neg_seq);
            batch.push_back(PairSample{model.read_logits(tape, fp), model.read_logits(tape, fn)});
            logit_nodes.emplace_back(fp.logits, fn.logits);
        }

        const LossBreakdown losses = total_loss(batch, tc.loss_weights);
        const std::vector<PairGrad> grads = total_loss_grad(batch, tc.loss_weights);

        std::vector<std::pair<tape::NodeId, Tensor2>> seeds;
        seeds.reserve(2 * batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            seeds.emplace_back(logit_nodes[i].first,
                               Tensor2(1, 2, {grads[i].pos_like, grads[i].pos_dislike}));
            seeds.emplace_back(logit_nodes[i].second,
                               Tensor2(1, 2, {grads[i].neg_like, grads[i].neg_dislike}));
        }
        tape.backward_multi(seeds);

        std::vector<Tensor2> param_grads;
        param_grads.reserve(id_list.size());
        for (tape::NodeId id : id_list) param_grads.push_back(tape.grad(id));
        if (pref_token_index >= 0 && step <= tc.freeze_pref_steps)
            param_grads[static_cast<std::size_t>(pref_token_index)].fill(0.0);
        clip_global_norm(param_grads, tc.clip_norm);
        opt.step(param_grads);

        result.final_total = losses.total;
        if (step % tc.log_every == 0 || step == tc.steps) {
            TrainLogRow row{step, losses.total, losses.base, losses.l_plus, losses.l_minus};
            result.log.push_back(row);
            if (on_log) on_log(row);
        }
        ++result.steps_run;
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace prefforge
