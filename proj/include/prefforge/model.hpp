#pragma once

// Preference-conditioned transformer scorer.  A user is encoded as a token
// sequence: learned preference tokens, then (liked, disliked) item pairs from
// their history, then the target item.  Each block applies pre-norm
// self-attention, an optional dedicated item-to-preference cross-attention
// sublayer, and a tanh MLP.  The head maps the final target token to
// (like, dislike) logits.  All math runs through the autodiff tape so training
// and inference share one forward implementation.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/losses.hpp"
#include "prefforge/rng.hpp"
#include "prefforge/tape.hpp"
#include "prefforge/tensor.hpp"

namespace prefforge {

struct ModelConfig {
    int feature_dim = 16;   // width of item feature vectors
    int d_model = 16;       // transformer width
    int n_layers = 2;
    int n_heads = 4;
    int mlp_hidden = 48;
    int n_pref_tokens = 10;  // learned preference tokens (0 disables them)
    int tokens_per_item = 1; // sub-tokens each item expands to
    int max_history = 8;     // sizes the position table
    // The two injection paths for preference tokens, independently togglable:
    // membership in self-attention, and a dedicated cross-attention sublayer
    // where item tokens query the preference tokens.
    bool pref_in_self_attention = true;
    bool pref_cross_attention = true;
    std::uint64_t init_seed = 7;

    bool cross_enabled() const { return pref_cross_attention && n_pref_tokens > 0; }
    int head_dim() const { return d_model / n_heads; }
    int max_item_tokens() const { return (2 * max_history + 1) * tokens_per_item; }

    void validate() const {
        require(feature_dim >= 1, "model: feature_dim must be >= 1");
        require(d_model >= 1, "model: d_model must be >= 1");
        require(n_layers >= 1, "model: n_layers must be >= 1");
        require(n_heads >= 1, "model: n_heads must be >= 1");
        require(d_model % n_heads == 0, "model: d_model must be divisible by n_heads");
        require(mlp_hidden >= 1, "model: mlp_hidden must be >= 1");
        require(n_pref_tokens >= 0, "model: n_pref_tokens must be >= 0");
        require(tokens_per_item >= 1, "model: tokens_per_item must be >= 1");
        require(max_history >= 0, "model: max_history must be >= 0");
    }
};

// One user-context scoring request: item feature vectors only; the model is
// agnostic to where they came from.
struct SequenceSpec {
    // (liked, disliked) feature pairs, already in presentation order.
    std::vector<std::pair<std::vector<double>, std::vector<double>>> history;
    std::vector<double> target;
};

template <typename T>
struct BlockFields {
    T ln1_g{}, ln1_b{}, wq{}, wk{}, wv{}, wo{};        // self-attention
    T ln2_g{}, ln2_b{}, cq{}, ck{}, cv{}, co{};        // cross-attention (optional)
    T ln3_g{}, ln3_b{}, w1{}, b1{}, w2{}, b2{};        // MLP
};

template <typename T>
struct ParamFields {
    T p_v{};        // n_pref_tokens x d_model (absent when zero tokens)
    T w_item{};     // feature_dim x d_model
    T role_emb{};   // 3 x d_model: liked / disliked / target
    T slot_emb{};   // tokens_per_item x d_model
    T pos_emb{};    // max_item_tokens x d_model
    std::vector<BlockFields<T>> blocks;
    T lnf_g{}, lnf_b{};
    T w_head{};     // d_model x 2 -> (like, dislike)
    T b_head{};     // 1 x 2
};

using Params = ParamFields<Tensor2>;
using ParamIds = ParamFields<tape::NodeId>;

// Visits every active parameter in a fixed order (init, optimizer state,
// serialization, and tape leaves all share it).
template <typename PF, typename Fn>
void for_each_param(const ModelConfig& cfg, PF& p, Fn&& fn) {
    if (cfg.n_pref_tokens > 0) fn("p_v", p.p_v);
    fn("w_item", p.w_item);
    fn("role_emb", p.role_emb);
    fn("slot_emb", p.slot_emb);
    fn("pos_emb", p.pos_emb);
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        auto& b = p.blocks[i];
        const std::string pre = "blocks." + std::to_string(i) + ".";
        fn(pre + "ln1_g", b.ln1_g);
        fn(pre + "ln1_b", b.ln1_b);
        fn(pre + "wq", b.wq);
        fn(pre + "wk", b.wk);
        fn(pre + "wv", b.wv);
        fn(pre + "wo", b.wo);
        if (cfg.cross_enabled()) {
            fn(pre + "ln2_g", b.ln2_g);
            fn(pre + "ln2_b", b.ln2_b);
            fn(pre + "cq", b.cq);
            fn(pre + "ck", b.ck);
            fn(pre + "cv", b.cv);
            fn(pre + "co", b.co);
        }
        fn(pre + "ln3_g", b.ln3_g);
        fn(pre + "ln3_b", b.ln3_b);
        fn(pre + "w1", b.w1);
        fn(pre + "b1", b.b1);
        fn(pre + "w2", b.w2);
        fn(pre + "b2", b.b2);
    }
    fn("final_ln_g", p.lnf_g);
    fn("final_ln_b", p.lnf_b);
    fn("w_head", p.w_head);
    fn("b_head", p.b_head);
}

// Result of building one scoring pass on a tape.  Attention nodes are kept so
// callers can read weight matrices (probes) without re-running anything.
struct ForwardNodes {
    tape::NodeId logits = -1;       // 1 x 2
    tape::NodeId last_hidden = -1;  // 1 x d_model, after the final layer norm
    tape::NodeId features = -1;     // item-token feature leaf (when tracked)
    std::vector<std::vector<tape::NodeId>> self_attn;   // [layer][head]
    std::vector<std::vector<tape::NodeId>> cross_attn;  // [layer][head] (may be empty)
    int seq_len = 0;
    int n_pref = 0;
    int n_item_tokens = 0;
};

// Attention weights captured from one forward pass.
struct ProbeResult {
    LogitPair logits;
    std::vector<double> user_embedding;
    std::vector<std::vector<Tensor2>> self_attn;   // [layer][head]
    std::vector<std::vector<Tensor2>> cross_attn;  // [layer][head]
    int seq_len = 0;
    int n_pref = 0;
    int n_target_tokens = 0;
    bool self_includes_pref = false;
};

struct ScoreResult {
    LogitPair logits;
    std::vector<double> user_embedding;
};

class Model {
public:
    explicit Model(const ModelConfig& cfg) : cfg_(cfg) {
        cfg.validate();
        init_params();
    }

    const ModelConfig& config() const { return cfg_; }
    Params& params() { return params_; }
    const Params& params() const { return params_; }

    // Stable (name, tensor) enumeration of the active parameters.
    std::vector<std::pair<std::string, Tensor2*>> parameters() {
        std::vector<std::pair<std::string, Tensor2*>> out;
        for_each_param(cfg_, params_, [&](const std::string& name, Tensor2& t) {
            out.emplace_back(name, &t);
        });
        return out;
    }
    std::vector<std::pair<std::string, const Tensor2*>> parameters() const {
        std::vector<std::pair<std::string, const Tensor2*>> out;
        for_each_param(cfg_, params_, [&](const std::string& name, const Tensor2& t) {
            out.emplace_back(name, &t);
        });
        return out;
    }

    // Copies every parameter onto a tape as leaves, in parameters() order.
    ParamIds add_parameters(tape::Tape& t, bool with_grads) const {
        ParamIds ids;
        ids.blocks.resize(static_cast<std::size_t>(cfg_.n_layers));
        const Params& p = params_;
        ParamIds* out = &ids;
        // Walk both structures in lockstep via the shared visitation order.
        std::vector<tape::NodeId*> slots;
        for_each_param(cfg_, *out, [&](const std::string&, tape::NodeId& id) {
            slots.push_back(&id);
        });
        std::size_t at = 0;
        for_each_param(cfg_, p, [&](const std::string&, const Tensor2& tens) {
            *slots[at++] = t.leaf(tens, with_grads);
        });
        return ids;
    }

    // Builds the full scoring graph for one sequence; reusable within a batch
    // by passing the same ParamIds.  `track_features` turns the item-feature
    // matrix into a differentiable leaf (used by feature refinement).
    ForwardNodes build_forward(tape::Tape& t, const ParamIds& ids, const SequenceSpec& seq,
                               bool track_features = false) const {
        validate_sequence(seq);
        const int m = cfg_.tokens_per_item;
        const int H = static_cast<int>(seq.history.size());
        const int n_item_tokens = (2 * H + 1) * m;
        const int L_p = cfg_.n_pref_tokens;
        const int S = L_p + n_item_tokens;
        const int D = cfg_.d_model;

        // Item-token inputs: features plus role / slot / position lookups.
        Tensor2 feats(static_cast<std::size_t>(n_item_tokens),
                      static_cast<std::size_t>(cfg_.feature_dim));
        std::vector<int> roles, slots, positions;
        roles.reserve(static_cast<std::size_t>(n_item_tokens));
        int row = 0;
        auto emit_item = [&](const std::vector<double>& f, int role) {
            for (int j = 0; j < m; ++j, ++row) {
                for (int c = 0; c < cfg_.feature_dim; ++c)
                    feats.at(static_cast<std::size_t>(row), static_cast<std::size_t>(c)) =
                        f[static_cast<std::size_t>(c)];
                roles.push_back(role);
                slots.push_back(j);
                positions.push_back(row);
            }
        };
        for (const auto& [pos, neg] : seq.history) {
            emit_item(pos, kRoleLiked);
            emit_item(neg, kRoleDisliked);
        }
        emit_item(seq.target, kRoleTarget);

        ForwardNodes out;
        out.seq_len = S;
        out.n_pref = L_p;
        out.n_item_tokens = n_item_tokens;

        tape::NodeId phi = t.leaf(std::move(feats), track_features);
        if (track_features) out.features = phi;

        tape::NodeId items_x = t.matmul(phi, ids.w_item);
        items_x = t.add(items_x, t.gather_rows(ids.role_emb, roles));
        items_x = t.add(items_x, t.gather_rows(ids.slot_emb, slots));
        items_x = t.add(items_x, t.gather_rows(ids.pos_emb, positions));

        tape::NodeId x = L_p > 0 ? t.concat_rows({ids.p_v, items_x}) : items_x;

        out.self_attn.resize(static_cast<std::size_t>(cfg_.n_layers));
        if (cfg_.cross_enabled())
            out.cross_attn.resize(static_cast<std::size_t>(cfg_.n_layers));

        for (int layer = 0; layer < cfg_.n_layers; ++layer) {
            const auto& bp = ids.blocks[static_cast<std::size_t>(layer)];

            // Self-attention.  When preference tokens are excluded from this
            // path they pass through the sublayer unchanged.
            tape::NodeId h = t.layer_norm(x, bp.ln1_g, bp.ln1_b);
            tape::NodeId attn_out;
            if (L_p > 0 && !cfg_.pref_in_self_attention) {
                tape::NodeId np = t.slice_rows(h, static_cast<std::size_t>(L_p),
                                               static_cast<std::size_t>(S));
                tape::NodeId o = multi_head(t, np, np, bp.wq, bp.wk, bp.wv, bp.wo,
                                            &out.self_attn[static_cast<std::size_t>(layer)]);
                tape::NodeId zeros = t.leaf(
                    Tensor2(static_cast<std::size_t>(L_p), static_cast<std::size_t>(D), 0.0));
                attn_out = t.concat_rows({zeros, o});
            } else {
                attn_out = multi_head(t, h, h, bp.wq, bp.wk, bp.wv, bp.wo,
                                      &out.self_attn[static_cast<std::size_t>(layer)]);
            }
            x = t.add(x, attn_out);

            // Item-to-preference cross-attention: item tokens query the
            // preference-token states; preference rows pass through.
            if (cfg_.cross_enabled()) {
                tape::NodeId h2 = t.layer_norm(x, bp.ln2_g, bp.ln2_b);
                tape::NodeId q_rows = t.slice_rows(h2, static_cast<std::size_t>(L_p),
                                                   static_cast<std::size_t>(S));
                tape::NodeId kv_rows = t.slice_rows(h2, 0, static_cast<std::size_t>(L_p));
                tape::NodeId o = multi_head(t, q_rows, kv_rows, bp.cq, bp.ck, bp.cv, bp.co,
                                            &out.cross_attn[static_cast<std::size_t>(layer)]);
                tape::NodeId zeros = t.leaf(
                    Tensor2(static_cast<std::size_t>(L_p), static_cast<std::size_t>(D), 0.0));
                x = t.add(x, t.concat_rows({zeros, o}));
            }

            // MLP.
            tape::NodeId h3 = t.layer_norm(x, bp.ln3_g, bp.ln3_b);
            tape::NodeId u = t.tanh(t.add_row(t.matmul(h3, bp.w1), bp.b1));
            x = t.add(x, t.add_row(t.matmul(u, bp.w2), bp.b2));
        }

        x = t.layer_norm(x, ids.lnf_g, ids.lnf_b);
        tape::NodeId last = t.slice_rows(x, static_cast<std::size_t>(S - 1),
                                         static_cast<std::size_t>(S));
        out.last_hidden = last;
        out.logits = t.add_row(t.matmul(last, ids.w_head), ids.b_head);
        return out;
    }

    // No-gradient scoring convenience.
    ScoreResult score(const SequenceSpec& seq) const {
        tape::Tape t;
        ParamIds ids = add_parameters(t, false);
        ForwardNodes f = build_forward(t, ids, seq);
        ScoreResult r;
        r.logits = read_logits(t, f);
        r.user_embedding = t.value(f.last_hidden).row_vector(0);
        return r;
    }

    // Scoring plus captured attention maps.
    ProbeResult probe(const SequenceSpec& seq) const {
        tape::Tape t;
        ParamIds ids = add_parameters(t, false);
        ForwardNodes f = build_forward(t, ids, seq);
        ProbeResult r;
        r.logits = read_logits(t, f);
        r.user_embedding = t.value(f.last_hidden).row_vector(0);
        r.seq_len = f.seq_len;
        r.n_pref = f.n_pref;
        r.n_target_tokens = cfg_.tokens_per_item;
        r.self_includes_pref = cfg_.n_pref_tokens == 0 || cfg_.pref_in_self_attention;
        r.self_attn.resize(f.self_attn.size());
        for (std::size_t l = 0; l < f.self_attn.size(); ++l)
            for (tape::NodeId id : f.self_attn[l]) r.self_attn[l].push_back(t.value(id));
        r.cross_attn.resize(f.cross_attn.size());
        for (std::size_t l = 0; l < f.cross_attn.size(); ++l)
            for (tape::NodeId id : f.cross_attn[l]) r.cross_attn[l].push_back(t.value(id));
        return r;
    }

    // Distribution over preference tokens that the target tokens attend with,
    // averaged over target sub-tokens.  layer -1 = last layer; head -1 =
    // average over heads.  Uses the cross-attention map when that sublayer is
    // active, otherwise the preference columns of self-attention.
    std::vector<double> pref_attention_profile(const ProbeResult& pr, int layer,
                                               int head) const {
        require(cfg_.n_pref_tokens > 0,
                "pref_attention_profile: model has no preference tokens");
        const int L = static_cast<int>(pr.self_attn.size());
        if (layer == -1) layer = L - 1;
        require(layer >= 0 && layer < L, "pref_attention_profile: layer out of range");
        require(head >= -1 && head < cfg_.n_heads, "pref_attention_profile: head out of range");

        const bool use_cross = !pr.cross_attn.empty();
        require(use_cross || pr.self_includes_pref,
                "pref_attention_profile: no attention path reaches preference tokens");

        const int L_p = pr.n_pref;
        const int n_heads = cfg_.n_heads;
        std::vector<double> profile(static_cast<std::size_t>(L_p), 0.0);
        int h0 = head == -1 ? 0 : head;
        int h1 = head == -1 ? n_heads : head + 1;
        for (int h = h0; h < h1; ++h) {
            const Tensor2& A = use_cross
                                   ? pr.cross_attn[static_cast<std::size_t>(layer)]
                                                  [static_cast<std::size_t>(h)]
                                   : pr.self_attn[static_cast<std::size_t>(layer)]
                                                 [static_cast<std::size_t>(h)];
            // Rows indexed by query token.  Cross maps exclude the preference
            // rows; full self-attention includes them.
            const int row_base = use_cross ? pr.seq_len - L_p - pr.n_target_tokens
                                           : pr.seq_len - pr.n_target_tokens;
            for (int tk = 0; tk < pr.n_target_tokens; ++tk)
                for (int j = 0; j < L_p; ++j)
                    profile[static_cast<std::size_t>(j)] +=
                        A.at(static_cast<std::size_t>(row_base + tk),
                             static_cast<std::size_t>(j));
        }
        double sum = 0.0;
        for (double v : profile) sum += v;
        require(sum > 0.0, "pref_attention_profile: empty attention mass");
        for (double& v : profile) v /= sum;
        return profile;
    }

    LogitPair read_logits(const tape::Tape& t, const ForwardNodes& f) const {
        const Tensor2& lg = t.value(f.logits);
        return LogitPair{lg.at(0, 0), lg.at(0, 1)};
    }

    static constexpr int kRoleLiked = 0;
    static constexpr int kRoleDisliked = 1;
    static constexpr int kRoleTarget = 2;

private:
    void validate_sequence(const SequenceSpec& seq) const {
        require(static_cast<int>(seq.history.size()) <= cfg_.max_history,
                "model: history longer than max_history");
        auto check_vec = [&](const std::vector<double>& v, const char* what) {
            require(static_cast<int>(v.size()) == cfg_.feature_dim,
                    std::string("model: ") + what + " feature size mismatch");
            for (double x : v) require_finite(x, std::string("model: ") + what + " features");
        };
        for (const auto& [pos, neg] : seq.history) {
            check_vec(pos, "history item");
            check_vec(neg, "history item");
        }
        check_vec(seq.target, "target item");
    }

    // Standard multi-head attention; stores one attention-weight node per head
    // in `probe` when provided.
    tape::NodeId multi_head(tape::Tape& t, tape::NodeId q_in, tape::NodeId kv_in,
                            tape::NodeId wq, tape::NodeId wk, tape::NodeId wv, tape::NodeId wo,
                            std::vector<tape::NodeId>* probe) const {
        const int dh = cfg_.head_dim();
        tape::NodeId Q = t.matmul(q_in, wq);
        tape::NodeId K = t.matmul(kv_in, wk);
        tape::NodeId V = t.matmul(kv_in, wv);
        std::vector<tape::NodeId> heads;
        heads.reserve(static_cast<std::size_t>(cfg_.n_heads));
        const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));
        for (int h = 0; h < cfg_.n_heads; ++h) {
            const std::size_t c0 = static_cast<std::size_t>(h * dh);
            const std::size_t c1 = static_cast<std::size_t>((h + 1) * dh);
            tape::NodeId Qh = t.slice_cols(Q, c0, c1);
            tape::NodeId Kh = t.slice_cols(K, c0, c1);
            tape::NodeId Vh = t.slice_cols(V, c0, c1);
            tape::NodeId scores = t.scale(t.matmul(Qh, t.transpose(Kh)), inv_scale);
            tape::NodeId A = t.row_softmax(scores);
            if (probe) probe->push_back(A);
            heads.push_back(t.matmul(A, Vh));
        }
        tape::NodeId O = cfg_.n_heads == 1 ? heads[0] : t.concat_cols(heads);
        return t.matmul(O, wo);
    }

    void init_params() {
        const int D = cfg_.d_model;
        const int F = cfg_.feature_dim;
        Rng rng(derive_seed(cfg_.init_seed, "model-init"));
        auto tn = [&](std::size_t r, std::size_t c) {
            Tensor2 t(r, c);
            for (auto& x : t.data()) x = rng.truncated_normal(0.02);
            return t;
        };
        Params& p = params_;
        if (cfg_.n_pref_tokens > 0)
            p.p_v = tn(static_cast<std::size_t>(cfg_.n_pref_tokens),
                       static_cast<std::size_t>(D));
        p.w_item = tn(static_cast<std::size_t>(F), static_cast<std::size_t>(D));
        p.role_emb = tn(3, static_cast<std::size_t>(D));
        p.slot_emb = tn(static_cast<std::size_t>(cfg_.tokens_per_item),
                        static_cast<std::size_t>(D));
        p.pos_emb = tn(static_cast<std::size_t>(cfg_.max_item_tokens()),
                       static_cast<std::size_t>(D));
        p.blocks.resize(static_cast<std::size_t>(cfg_.n_layers));
        for (auto& b : p.blocks) {
            b.ln1_g = Tensor2(1, static_cast<std::size_t>(D), 1.0);
            b.ln1_b = Tensor2(1, static_cast<std::size_t>(D), 0.0);
            b.wq = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            b.wk = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            b.wv = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            b.wo = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            if (cfg_.cross_enabled()) {
                b.ln2_g = Tensor2(1, static_cast<std::size_t>(D), 1.0);
                b.ln2_b = Tensor2(1, static_cast<std::size_t>(D), 0.0);
                b.cq = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
                b.ck = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
                b.cv = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
                b.co = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(D));
            }
            b.ln3_g = Tensor2(1, static_cast<std::size_t>(D), 1.0);
            b.ln3_b = Tensor2(1, static_cast<std::size_t>(D), 0.0);
            b.w1 = tn(static_cast<std::size_t>(D), static_cast<std::size_t>(cfg_.mlp_hidden));
            b.b1 = Tensor2(1, static_cast<std::size_t>(cfg_.mlp_hidden), 0.0);
            b.w2 = tn(static_cast<std::size_t>(cfg_.mlp_hidden), static_cast<std::size_t>(D));
            b.b2 = Tensor2(1, static_cast<std::size_t>(D), 0.0);
        }
        p.lnf_g = Tensor2(1, static_cast<std::size_t>(D), 1.0);
        p.lnf_b = Tensor2(1, static_cast<std::size_t>(D), 0.0);
        p.w_head = tn(static_cast<std::size_t>(D), 2);
        p.b_head = Tensor2(1, 2, 0.0);
    }

    ModelConfig cfg_;
    Params params_;
};

}  // namespace prefforge
