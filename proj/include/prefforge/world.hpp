#pragma once

// Synthetic preference world: clustered users with latent taste vectors,
// items with latent features, and a closed-form ground-truth scorer.  The
// generator enforces the group-structure contract (tight balls around well
// separated prototypes) and `verify_assumption` re-checks it empirically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/kernel.hpp"
#include "prefforge/rng.hpp"
#include "prefforge/tensor.hpp"

namespace prefforge {

struct GroupSpec {
    int id = 0;
    std::vector<double> prototype;  // centroid of the group's taste ball
    double rho = 0.0;               // ball radius
    double eps = 0.0;               // intra-group mean |score gap| budget
    double alpha = 0.0;             // intra-group decision-disagreement budget
};

struct WorldConfig {
    int num_groups = 4;
    int feature_dim = 16;
    int users_per_group = 50;
    int num_prompts = 40;
    int items_per_prompt = 30;
    // Final `held_out_prompts` prompt ids are reserved for evaluation: history
    // sampling never draws from them.
    int held_out_prompts = 4;

    // Per-group bounds; a single entry broadcasts to all groups.
    std::vector<double> rho{0.1};
    std::vector<double> eps{0.1};
    std::vector<double> alpha{0.07};
    // Pairwise bounds; a 1x1 matrix broadcasts to every off-diagonal pair.
    std::vector<std::vector<double>> delta{{1.1}};
    std::vector<std::vector<double>> beta{{0.65}};

    double prototype_radius = 1.0;  // prototypes are sampled on this sphere
    double sharpness = 6.0;         // score steepness around the decision plane
    int n_ref = 8;                  // history pairs generated per user
    double min_margin = 0.2;        // minimum score gap inside a history pair
    std::uint64_t seed = 1;

    bool broadcast_groups() const { return rho.size() == 1; }

    double rho_of(int k) const { return rho.size() == 1 ? rho[0] : rho.at(static_cast<std::size_t>(k)); }
    double eps_of(int k) const { return eps.size() == 1 ? eps[0] : eps.at(static_cast<std::size_t>(k)); }
    double alpha_of(int k) const {
        return alpha.size() == 1 ? alpha[0] : alpha.at(static_cast<std::size_t>(k));
    }
    double delta_of(int k, int l) const {
        if (delta.size() == 1 && delta[0].size() == 1) return delta[0][0];
        return delta.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(l));
    }
    double beta_of(int k, int l) const {
        if (beta.size() == 1 && beta[0].size() == 1) return beta[0][0];
        return beta.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(l));
    }

    int training_prompts() const { return num_prompts - held_out_prompts; }

    void validate() const {
        require(num_groups >= 1, "world: num_groups must be >= 1");
        require(feature_dim >= 1, "world: feature_dim must be >= 1");
        require(users_per_group >= 1, "world: users_per_group must be >= 1");
        require(num_prompts >= 1, "world: num_prompts must be >= 1");
        require(items_per_prompt >= 2, "world: items_per_prompt must be >= 2");
        require(held_out_prompts >= 0 && held_out_prompts < num_prompts,
                "world: held_out_prompts must be in [0, num_prompts)");
        require(prototype_radius > 0.0, "world: prototype_radius must be positive");
        require(sharpness > 0.0, "world: sharpness must be positive");
        require(n_ref >= 0, "world: n_ref must be >= 0");
        require(min_margin >= 0.0 && min_margin < 1.0, "world: min_margin must be in [0, 1)");
        require(n_ref == 0 || training_prompts() >= 1,
                "world: history sampling needs at least one training prompt");

        const std::size_t k = static_cast<std::size_t>(num_groups);
        auto check_group_vec = [&](const std::vector<double>& v, const std::string& name) {
            require(v.size() == 1 || v.size() == k,
                    "world: " + name + " must have one entry or one per group");
            for (double x : v) require_finite(x, "world: " + name);
        };
        check_group_vec(rho, "rho");
        check_group_vec(eps, "eps");
        check_group_vec(alpha, "alpha");
        for (int g = 0; g < num_groups; ++g) {
            require(rho_of(g) >= 0.0, "world: rho must be >= 0");
            require(eps_of(g) > 0.0, "world: eps must be positive");
            require(alpha_of(g) >= 0.0 && alpha_of(g) < 1.0, "world: alpha must be in [0, 1)");
        }

        auto check_pair_mat = [&](const std::vector<std::vector<double>>& m,
                                  const std::string& name) {
            if (m.size() == 1 && m[0].size() == 1) {
                require_finite(m[0][0], "world: " + name);
                return;
            }
            require(m.size() == k, "world: " + name + " must be 1x1 or num_groups x num_groups");
            for (const auto& row : m) {
                require(row.size() == k, "world: " + name + " rows must have num_groups entries");
                for (double x : row) require_finite(x, "world: " + name);
            }
            for (int a = 0; a < num_groups; ++a)
                for (int b = a + 1; b < num_groups; ++b)
                    require(m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ==
                                m[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)],
                            "world: " + name + " must be symmetric");
        };
        check_pair_mat(delta, "delta");
        check_pair_mat(beta, "beta");
        for (int a = 0; a < num_groups; ++a) {
            for (int b = a + 1; b < num_groups; ++b) {
                require(delta_of(a, b) > 0.0, "world: delta must be positive for distinct groups");
                require(beta_of(a, b) >= 0.0 && beta_of(a, b) < 1.0,
                        "world: beta must be in [0, 1)");
                // Separation must dominate both ball radii or the balls could
                // violate the inter-group distance bound.
                require(delta_of(a, b) > 0.0 && delta_of(a, b) + rho_of(a) + rho_of(b) <=
                                                    2.0 * prototype_radius,
                        "world: delta + rho_a + rho_b must fit inside the prototype sphere "
                        "diameter");
            }
        }
        require_finite(prototype_radius, "world: prototype_radius");
    }
};

struct User {
    int id = 0;
    int group = 0;
    std::vector<double> pref;  // latent taste vector w
};

struct Item {
    int id = 0;
    int prompt = 0;
    std::vector<double> features;  // latent feature vector phi
};

struct HistoryEntry {
    int pos_item = 0;  // liked item id
    int neg_item = 0;  // disliked item id
    int prompt = 0;    // prompt both items belong to
};

struct World {
    WorldConfig config;
    std::vector<GroupSpec> groups;
    std::vector<User> users;
    std::vector<Item> items;
    std::vector<std::vector<HistoryEntry>> histories;  // indexed by user id

    const Item& item(int id) const {
        require(id >= 0 && static_cast<std::size_t>(id) < items.size(),
                "world: item id " + std::to_string(id) + " out of range");
        return items[static_cast<std::size_t>(id)];
    }
    const User& user(int id) const {
        require(id >= 0 && static_cast<std::size_t>(id) < users.size(),
                "world: user id " + std::to_string(id) + " out of range");
        return users[static_cast<std::size_t>(id)];
    }
    bool is_held_out_prompt(int prompt) const {
        return prompt >= config.training_prompts() && prompt < config.num_prompts;
    }
};

// Ground-truth preference score in (0, 1): sigmoid of the scaled alignment
// between the user's taste vector and the item's features.
inline double true_score(const World& w, const User& u, const Item& z) {
    return sigmoid(w.config.sharpness * dot(u.pref, z.features));
}

// Strict pairwise decision: 1 when the user scores `a` above `b`, else 0.
inline int true_decision(const World& w, const User& u, const Item& a, const Item& b) {
    return true_score(w, u, a) > true_score(w, u, b) ? 1 : 0;
}

// Samples n_ref (liked, disliked) pairs for one user.  Each pair comes from a
// single prompt, the liked item scores above 0.5 and the disliked one below,
// and the score gap is at least min_margin.  Prompts are kept distinct while
// enough remain; after one full pass over all training prompts, reuse is
// allowed.  Exhausting the retry budget raises a generation error.
inline std::vector<HistoryEntry> sample_history(const World& world, const User& user, int n_ref,
                                                double min_margin, std::uint64_t seed) {
    require(n_ref >= 0, "sample_history: n_ref must be >= 0");
    require(min_margin >= 0.0, "sample_history: min_margin must be >= 0");
    std::vector<HistoryEntry> out;
    if (n_ref == 0) return out;

    const int n_prompts = world.config.training_prompts();
    require(n_prompts >= 1, "sample_history: no training prompts available");

    // Items grouped by prompt (training prompts only).
    std::vector<std::vector<int>> by_prompt(static_cast<std::size_t>(n_prompts));
    for (const Item& it : world.items)
        if (it.prompt < n_prompts) by_prompt[static_cast<std::size_t>(it.prompt)].push_back(it.id);

    Rng rng(seed);
    constexpr int kPairAttempts = 64;     // draws per prompt before moving on
    constexpr int kTotalAttempts = 20000; // global budget across all prompts
    int attempts = 0;

    std::vector<int> order(static_cast<std::size_t>(n_prompts));
    for (int p = 0; p < n_prompts; ++p) order[static_cast<std::size_t>(p)] = p;

    while (static_cast<int>(out.size()) < n_ref) {
        rng.shuffle(order);
        bool advanced = false;
        for (int prompt : order) {
            if (static_cast<int>(out.size()) >= n_ref) break;
            const auto& pool = by_prompt[static_cast<std::size_t>(prompt)];
            if (pool.size() < 2) continue;
            for (int t = 0; t < kPairAttempts; ++t) {
                if (++attempts > kTotalAttempts)
                    throw GenerationError("sample_history: retry budget exhausted for user " +
                                          std::to_string(user.id) + " (min_margin " +
                                          std::to_string(min_margin) + ")");
                int a = pool[static_cast<std::size_t>(rng.uniform_index(pool.size()))];
                int b = pool[static_cast<std::size_t>(rng.uniform_index(pool.size()))];
                if (a == b) continue;
                double qa = true_score(world, user, world.item(a));
                double qb = true_score(world, user, world.item(b));
                if (qa < qb) {
                    std::swap(a, b);
                    std::swap(qa, qb);
                }
                if (qa > 0.5 && qb < 0.5 && qa - qb >= min_margin) {
                    out.push_back(HistoryEntry{a, b, prompt});
                    advanced = true;
                    break;
                }
            }
        }
        if (!advanced)
            throw GenerationError("sample_history: retry budget exhausted for user " +
                                  std::to_string(user.id) + " (min_margin " +
                                  std::to_string(min_margin) + ")");
    }
    return out;
}

// Builds a full world from the config: prototypes by rejection sampling on the
// sphere (pairwise distance >= delta_kl + rho_k + rho_l), users uniform in
// each prototype's rho-ball, items uniform in the unit ball, then a history
// per user.  Deterministic given config.seed.
inline World generate_world(const WorldConfig& cfg) {
    cfg.validate();
    World w;
    w.config = cfg;

    // Prototypes.
    Rng proto_rng(derive_seed(cfg.seed, "prototypes"));
    constexpr int kProtoAttempts = 10000;
    for (int k = 0; k < cfg.num_groups; ++k) {
        bool placed = false;
        for (int t = 0; t < kProtoAttempts && !placed; ++t) {
            std::vector<double> p = proto_rng.unit_vector(static_cast<std::size_t>(cfg.feature_dim));
            for (double& x : p) x *= cfg.prototype_radius;
            bool ok = true;
            for (int l = 0; l < k; ++l) {
                double need = cfg.delta_of(k, l) + cfg.rho_of(k) + cfg.rho_of(l);
                if (distance(p, w.groups[static_cast<std::size_t>(l)].prototype) < need) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                GroupSpec g;
                g.id = k;
                g.prototype = std::move(p);
                g.rho = cfg.rho_of(k);
                g.eps = cfg.eps_of(k);
                g.alpha = cfg.alpha_of(k);
                w.groups.push_back(std::move(g));
                placed = true;
            }
        }
        if (!placed)
            throw ConfigError("generate_world: could not place prototype for group " +
                              std::to_string(k) + " after " + std::to_string(kProtoAttempts) +
                              " attempts; separation constraints are too tight");
    }

    // Users.
    Rng user_rng(derive_seed(cfg.seed, "users"));
    for (int k = 0; k < cfg.num_groups; ++k) {
        const GroupSpec& g = w.groups[static_cast<std::size_t>(k)];
        for (int i = 0; i < cfg.users_per_group; ++i) {
            User u;
            u.id = static_cast<int>(w.users.size());
            u.group = k;
            u.pref = g.prototype;
            if (g.rho > 0.0) {
                std::vector<double> off =
                    user_rng.ball_vector(static_cast<std::size_t>(cfg.feature_dim), g.rho);
                for (int d = 0; d < cfg.feature_dim; ++d)
                    u.pref[static_cast<std::size_t>(d)] += off[static_cast<std::size_t>(d)];
            }
            w.users.push_back(std::move(u));
        }
    }

    // Items.
    Rng item_rng(derive_seed(cfg.seed, "items"));
    for (int p = 0; p < cfg.num_prompts; ++p) {
        for (int i = 0; i < cfg.items_per_prompt; ++i) {
            Item it;
            it.id = static_cast<int>(w.items.size());
            it.prompt = p;
            it.features = item_rng.ball_vector(static_cast<std::size_t>(cfg.feature_dim), 1.0);
            w.items.push_back(std::move(it));
        }
    }

    // Histories.
    w.histories.resize(w.users.size());
    for (const User& u : w.users)
        w.histories[static_cast<std::size_t>(u.id)] = sample_history(
            w, u, cfg.n_ref, cfg.min_margin,
            derive_seed(cfg.seed, "history", static_cast<std::uint64_t>(u.id)));

    return w;
}

// ---------------------------------------------------------------------------
// Structure verification
// ---------------------------------------------------------------------------

// Exhaustive geometric scan: every user inside its group ball, every
// cross-group user pair at least delta apart.  Slack fields carry the worst
// observed margins (excess <= 0 and slack >= 0 when compliant).
struct DistanceScan {
    double max_radius_excess = 0.0;   // max over users of ||w - proto|| - rho
    double min_inter_slack = 0.0;     // min over cross pairs of dist - delta
    long radius_violations = 0;
    long inter_violations = 0;
    bool pass = true;
};

inline DistanceScan scan_distances(const World& w) {
    constexpr double kTol = 1e-9;  // absorbs float rounding in norms
    DistanceScan s;
    s.max_radius_excess = -std::numeric_limits<double>::infinity();
    s.min_inter_slack = std::numeric_limits<double>::infinity();
    for (const User& u : w.users) {
        const GroupSpec& g = w.groups[static_cast<std::size_t>(u.group)];
        double excess = distance(u.pref, g.prototype) - g.rho;
        s.max_radius_excess = std::max(s.max_radius_excess, excess);
        if (excess > kTol) ++s.radius_violations;
    }
    for (std::size_t i = 0; i < w.users.size(); ++i) {
        for (std::size_t j = i + 1; j < w.users.size(); ++j) {
            if (w.users[i].group == w.users[j].group) continue;
            double slack = distance(w.users[i].pref, w.users[j].pref) -
                           w.config.delta_of(w.users[i].group, w.users[j].group);
            s.min_inter_slack = std::min(s.min_inter_slack, slack);
            if (slack < -kTol) ++s.inter_violations;
        }
    }
    if (w.users.empty()) s.max_radius_excess = 0.0;
    bool any_cross = std::isfinite(s.min_inter_slack);
    if (!any_cross) s.min_inter_slack = 0.0;
    s.pass = s.radius_violations == 0 && s.inter_violations == 0;
    return s;
}

// Empirical check of the behavioural clauses.  Intra-group: mean |score gap|
// <= eps and decision disagreement <= alpha.  Inter-group: mean |score gap| >=
// max(eps_k, eps_l) and agreement <= beta.  Proportion clauses get a 95%
// binomial confidence allowance; mean-score clauses are compared directly.
struct IntraGroupStats {
    int group = 0;
    double eps_hat = 0.0;    // mean |Q_i - Q_j|, same group, random item
    double alpha_hat = 0.0;  // decision disagreement rate
    double alpha_ci = 0.0;   // 95% half-width
    long n_score = 0;
    long n_decision = 0;
    bool eps_ok = false;
    bool alpha_ok = false;
};

struct InterGroupStats {
    int group_a = 0;
    int group_b = 0;
    double score_gap_hat = 0.0;  // mean |Q_i - Q_j| across groups
    double beta_hat = 0.0;       // decision agreement rate
    double beta_ci = 0.0;        // 95% half-width
    long n_score = 0;
    long n_decision = 0;
    bool score_ok = false;
    bool beta_ok = false;
};

struct AssumptionReport {
    DistanceScan geometry;
    std::vector<IntraGroupStats> intra;  // groups with at least two users
    std::vector<InterGroupStats> inter;  // all unordered group pairs
    bool all_pass = false;
};

inline double binomial_ci95(double p_hat, long n) {
    return 1.96 * std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

inline AssumptionReport verify_assumption(const World& w, long n_probe_items,
                                          long n_probe_pairs, std::uint64_t seed) {
    require(n_probe_items >= 1, "verify_assumption: n_probe_items must be >= 1");
    require(n_probe_pairs >= 1, "verify_assumption: n_probe_pairs must be >= 1");
    require(!w.users.empty() && !w.items.empty(), "verify_assumption: world is empty");

    AssumptionReport rep;
    rep.geometry = scan_distances(w);

    // Users indexed per group.
    std::vector<std::vector<int>> members(static_cast<std::size_t>(w.config.num_groups));
    for (const User& u : w.users) members[static_cast<std::size_t>(u.group)].push_back(u.id);

    const std::size_t n_items = w.items.size();
    Rng rng(derive_seed(seed, "assumption-probes"));
    auto pick = [&](const std::vector<int>& pool) {
        return pool[static_cast<std::size_t>(rng.uniform_index(pool.size()))];
    };
    auto pick_distinct = [&](const std::vector<int>& pool, int avoid) {
        int x = avoid;
        while (x == avoid) x = pick(pool);
        return x;
    };

    bool all_ok = rep.geometry.pass;

    for (int k = 0; k < w.config.num_groups; ++k) {
        const auto& pool = members[static_cast<std::size_t>(k)];
        if (pool.size() < 2) continue;  // intra clauses need two distinct users
        IntraGroupStats st;
        st.group = k;
        double gap_sum = 0.0;
        for (long t = 0; t < n_probe_items; ++t) {
            int i = pick(pool);
            int j = pick_distinct(pool, i);
            const Item& z = w.items[static_cast<std::size_t>(rng.uniform_index(n_items))];
            gap_sum += std::abs(true_score(w, w.user(i), z) - true_score(w, w.user(j), z));
        }
        st.n_score = n_probe_items;
        st.eps_hat = gap_sum / static_cast<double>(n_probe_items);

        long disagree = 0;
        for (long t = 0; t < n_probe_pairs; ++t) {
            int i = pick(pool);
            int j = pick_distinct(pool, i);
            std::size_t za = static_cast<std::size_t>(rng.uniform_index(n_items));
            std::size_t zb = za;
            while (zb == za) zb = static_cast<std::size_t>(rng.uniform_index(n_items));
            int di = true_decision(w, w.user(i), w.items[za], w.items[zb]);
            int dj = true_decision(w, w.user(j), w.items[za], w.items[zb]);
            if (di != dj) ++disagree;
        }
        st.n_decision = n_probe_pairs;
        st.alpha_hat = static_cast<double>(disagree) / static_cast<double>(n_probe_pairs);
        st.alpha_ci = binomial_ci95(st.alpha_hat, n_probe_pairs);

        st.eps_ok = st.eps_hat <= w.config.eps_of(k);
        st.alpha_ok = st.alpha_hat <= w.config.alpha_of(k) + st.alpha_ci;
        all_ok = all_ok && st.eps_ok && st.alpha_ok;
        rep.intra.push_back(st);
    }

    for (int k = 0; k < w.config.num_groups; ++k) {
        for (int l = k + 1; l < w.config.num_groups; ++l) {
            const auto& pa = members[static_cast<std::size_t>(k)];
            const auto& pb = members[static_cast<std::size_t>(l)];
            if (pa.empty() || pb.empty()) continue;
            InterGroupStats st;
            st.group_a = k;
            st.group_b = l;
            double gap_sum = 0.0;
            for (long t = 0; t < n_probe_items; ++t) {
                int i = pick(pa);
                int j = pick(pb);
                const Item& z = w.items[static_cast<std::size_t>(rng.uniform_index(n_items))];
                gap_sum += std::abs(true_score(w, w.user(i), z) - true_score(w, w.user(j), z));
            }
            st.n_score = n_probe_items;
            st.score_gap_hat = gap_sum / static_cast<double>(n_probe_items);

            long agree = 0;
            for (long t = 0; t < n_probe_pairs; ++t) {
                int i = pick(pa);
                int j = pick(pb);
                std::size_t za = static_cast<std::size_t>(rng.uniform_index(n_items));
                std::size_t zb = za;
                while (zb == za) zb = static_cast<std::size_t>(rng.uniform_index(n_items));
                int di = true_decision(w, w.user(i), w.items[za], w.items[zb]);
                int dj = true_decision(w, w.user(j), w.items[za], w.items[zb]);
                if (di == dj) ++agree;
            }
            st.n_decision = n_probe_pairs;
            st.beta_hat = static_cast<double>(agree) / static_cast<double>(n_probe_pairs);
            st.beta_ci = binomial_ci95(st.beta_hat, n_probe_pairs);

            st.score_ok =
                st.score_gap_hat >= std::max(w.config.eps_of(k), w.config.eps_of(l));
            st.beta_ok = st.beta_hat <= w.config.beta_of(k, l) + st.beta_ci;
            all_ok = all_ok && st.score_ok && st.beta_ok;
            rep.inter.push_back(st);
        }
    }

    rep.all_pass = all_ok;
    return rep;
}

}  // namespace prefforge
