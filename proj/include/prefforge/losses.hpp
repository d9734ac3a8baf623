#pragma once

#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/kernel.hpp"

namespace prefforge {

// Like/dislike logit pair for one target item.
struct LogitPair {
    double like = 0.0;     // logit for the "like" outcome
    double dislike = 0.0;  // logit for the "dislike" outcome
};

// One training pair: logits for the liked target and the disliked target,
// both conditioned on the same user history.
struct PairSample {
    LogitPair pos;
    LogitPair neg;
};

using PairBatch = std::vector<PairSample>;

struct LossWeights {
    double base = 1.0;
    double l_plus = 1.0;
    double l_minus = 1.0;
};

struct LossBreakdown {
    double total = 0.0;
    double base = 0.0;
    double l_plus = 0.0;
    double l_minus = 0.0;
};

// Gradient of the total loss with respect to one sample's four logits.
struct PairGrad {
    double pos_like = 0.0;
    double pos_dislike = 0.0;
    double neg_like = 0.0;
    double neg_dislike = 0.0;
};

// Preference score: softmax of the like logit over the like/dislike pair,
// which collapses to sigmoid of the logit margin.
inline double preference_score(const LogitPair& p) {
    require_finite(p.like, "preference_score");
    require_finite(p.dislike, "preference_score");
    return sigmoid(p.like - p.dislike);
}

inline void check_batch(const PairBatch& batch, const char* op) {
    require(!batch.empty(), std::string(op) + ": empty batch");
}

// Mean two-class cross entropy: the liked target labelled "like", the
// disliked target labelled "dislike", each pair weighted 1/2.
inline double base_loss(const PairBatch& batch) {
    check_batch(batch, "base_loss");
    double sum = 0.0;
    for (const auto& s : batch) {
        sum += 0.5 * (-log_sigmoid(s.pos.like - s.pos.dislike) -
                      log_sigmoid(s.neg.dislike - s.neg.like));
    }
    return sum / static_cast<double>(batch.size());
}

struct ContrastiveParts {
    double l_plus = 0.0;
    double l_minus = 0.0;
};

// Ranking losses on logit margins: like logits must rank the liked target
// above the disliked one, dislike logits the reverse.
inline ContrastiveParts contrastive_losses(const PairBatch& batch) {
    check_batch(batch, "contrastive_losses");
    double lp = 0.0, lm = 0.0;
    for (const auto& s : batch) {
        lp += -log_sigmoid(s.pos.like - s.neg.like);
        lm += -log_sigmoid(s.neg.dislike - s.pos.dislike);
    }
    const double n = static_cast<double>(batch.size());
    return {lp / n, lm / n};
}

inline LossBreakdown total_loss(const PairBatch& batch, const LossWeights& w = {}) {
    check_batch(batch, "total_loss");
    LossBreakdown out;
    out.base = base_loss(batch);
    const ContrastiveParts cp = contrastive_losses(batch);
    out.l_plus = cp.l_plus;
    out.l_minus = cp.l_minus;
    out.total = w.base * out.base + w.l_plus * out.l_plus + w.l_minus * out.l_minus;
    return out;
}

// Analytic gradient of total_loss; checked against finite differences in the
// test suite. d(-log sigmoid(x))/dx = sigmoid(x) - 1.
inline std::vector<PairGrad> total_loss_grad(const PairBatch& batch, const LossWeights& w = {}) {
    check_batch(batch, "total_loss_grad");
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    std::vector<PairGrad> grads(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& s = batch[i];
        PairGrad& g = grads[i];
        // base: 0.5 * (-log sig(pos.like - pos.dislike) - log sig(neg.dislike - neg.like))
        const double ga = 0.5 * w.base * (sigmoid(s.pos.like - s.pos.dislike) - 1.0) * inv_n;
        g.pos_like += ga;
        g.pos_dislike -= ga;
        const double gb = 0.5 * w.base * (sigmoid(s.neg.dislike - s.neg.like) - 1.0) * inv_n;
        g.neg_dislike += gb;
        g.neg_like -= gb;
        // l_plus: -log sig(pos.like - neg.like)
        const double gp = w.l_plus * (sigmoid(s.pos.like - s.neg.like) - 1.0) * inv_n;
        g.pos_like += gp;
        g.neg_like -= gp;
        // l_minus: -log sig(neg.dislike - pos.dislike)
        const double gm = w.l_minus * (sigmoid(s.neg.dislike - s.pos.dislike) - 1.0) * inv_n;
        g.neg_dislike += gm;
        g.pos_dislike -= gm;
    }
    return grads;
}

}  // namespace prefforge
