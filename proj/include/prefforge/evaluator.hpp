#pragma once

// Evaluation toolkit: ranked retrieval cases on held-out prompts, scorer
// abstractions (model / ground truth / random), confidence-margin audits,
// k-means clustering of user embeddings with internal quality indices,
// attention-profile divergence by group, and history-length sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "prefforge/common.hpp"
#include "prefforge/encode.hpp"
#include "prefforge/model.hpp"
#include "prefforge/rng.hpp"
#include "prefforge/world.hpp"

namespace prefforge {

// ---------------------------------------------------------------------------
// Eval cases and scorers
// ---------------------------------------------------------------------------

// Evaluation-stage knobs, grouped for config files and the CLI.
struct EvalConfig {
    int n_cases = 400;
    int n_negatives = 3;
    double case_margin = 0.1;
    std::vector<int> k_list{1, 2, 3};
    double tau = 0.1;      // margin-audit confidence band half-width
    int cluster_k = 0;     // 0 = use the world's true group count
    int restarts = 8;      // k-means restarts
    std::vector<int> nref_list;  // empty = {1, 2, 4, world n_ref}
    int attn_layer = -1;   // -1 = last layer
    int attn_head = -1;    // -1 = average over heads
    std::uint64_t seed = 2024;

    void validate() const {
        require(n_cases >= 1, "eval: n_cases must be >= 1");
        require(n_negatives >= 1, "eval: n_negatives must be >= 1");
        require(case_margin >= 0.0 && case_margin < 0.5,
                "eval: case_margin must be in [0, 0.5)");
        require(!k_list.empty(), "eval: k_list must not be empty");
        require(tau > 0.0 && tau < 0.5, "eval: tau must be in (0, 0.5)");
        require(cluster_k >= 0, "eval: cluster_k must be >= 0");
        require(restarts >= 1, "eval: restarts must be >= 1");
        require(attn_layer >= -1, "eval: attn_layer must be >= -1");
        require(attn_head >= -1, "eval: attn_head must be >= -1");
    }
};

// One ranked-retrieval case: the scorer should place `positive` above every
// item in `negatives`.
struct EvalCase {
    int user_id = 0;
    int positive = 0;            // item id with true score >= 0.5 + margin
    std::vector<int> negatives;  // item ids with true score <= 0.5 - margin
};

using Scorer = std::function<double(int user_id, const Item& item)>;

// Samples ranking cases from held-out prompts.  The positive clears the
// like boundary by `case_margin`, negatives clear the dislike boundary by the
// same amount, so every case has an unambiguous truth.
inline std::vector<EvalCase> make_eval_cases(const World& w, int n_cases, int n_negatives,
                                             double case_margin, std::uint64_t seed) {
    require(n_cases >= 1, "eval cases: n_cases must be >= 1");
    require(n_negatives >= 1, "eval cases: n_negatives must be >= 1");
    require(case_margin >= 0.0 && case_margin < 0.5,
            "eval cases: case_margin must be in [0, 0.5)");
    std::vector<int> pool;
    for (const Item& it : w.items)
        if (w.is_held_out_prompt(it.prompt)) pool.push_back(it.id);
    require(!pool.empty(), "eval cases: world has no held-out prompts to draw from");

    Rng rng(derive_seed(seed, "eval-cases"));
    std::vector<EvalCase> cases;
    cases.reserve(static_cast<std::size_t>(n_cases));
    constexpr int kBudget = 4000;  // candidate draws per case
    for (int c = 0; c < n_cases; ++c) {
        const User& u = w.users[static_cast<std::size_t>(rng.uniform_index(w.users.size()))];
        EvalCase ec;
        ec.user_id = u.id;
        ec.positive = -1;
        int attempts = 0;
        while (static_cast<int>(ec.negatives.size()) < n_negatives || ec.positive < 0) {
            if (++attempts > kBudget)
                throw GenerationError("eval cases: candidate budget exhausted for user " +
                                      std::to_string(u.id) + " (case_margin " +
                                      std::to_string(case_margin) + ")");
            const int id = pool[static_cast<std::size_t>(rng.uniform_index(pool.size()))];
            if (id == ec.positive ||
                std::find(ec.negatives.begin(), ec.negatives.end(), id) != ec.negatives.end())
                continue;
            const double q = true_score(w, u, w.item(id));
            if (ec.positive < 0 && q >= 0.5 + case_margin)
                ec.positive = id;
            else if (static_cast<int>(ec.negatives.size()) < n_negatives &&
                     q <= 0.5 - case_margin)
                ec.negatives.push_back(id);
        }
        cases.push_back(std::move(ec));
    }
    return cases;
}

// Scores with the trained model: preference probability of the target item
// under the user's (seeded, optionally truncated) history context.
inline Scorer model_scorer(const Model& m, const World& w, std::uint64_t order_seed,
                           int max_entries = -1) {
    return [&m, &w, order_seed, max_entries](int user_id, const Item& item) {
        SequenceSpec seq =
            make_sequence(w, user_id, item.features,
                          derive_seed(order_seed, "ctx", static_cast<std::uint64_t>(user_id)),
                          -1, max_entries);
        return preference_score(m.score(seq).logits);
    };
}

// Scores with the ground-truth preference function.
inline Scorer oracle_scorer(const World& w) {
    return [&w](int user_id, const Item& item) { return true_score(w, w.user(user_id), item); };
}

// Stateless pseudo-random scores, deterministic in (seed, user, item).
inline Scorer random_scorer(std::uint64_t seed) {
    return [seed](int user_id, const Item& item) {
        const std::uint64_t h = mix64(derive_seed(seed, "random-score",
                                                  static_cast<std::uint64_t>(user_id),
                                                  static_cast<std::uint64_t>(item.id)));
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    };
}

// ---------------------------------------------------------------------------
// Ranking metrics
// ---------------------------------------------------------------------------

struct EvalReport {
    std::vector<int> k_list;
    std::vector<double> topk;  // aligned with k_list
    double pairwise = 0.0;     // P[score(pos) > score(neg)] over all pairs
    long n_cases = 0;
    long n_pairs = 0;
    long tie_cases = 0;  // cases where some negative tied the positive exactly
};

// Top-k accuracy with conservative tie handling: a negative that ties the
// positive counts as ranked above it.
inline EvalReport evaluate_topk(const World& w, const std::vector<EvalCase>& cases,
                                const Scorer& scorer, const std::vector<int>& k_list) {
    require(!cases.empty(), "evaluate_topk: no cases");
    require(!k_list.empty(), "evaluate_topk: empty k list");
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        require(k_list[i] >= 1, "evaluate_topk: k must be >= 1");
        if (i > 0) require(k_list[i] > k_list[i - 1], "evaluate_topk: k list must be ascending");
    }
    EvalReport rep;
    rep.k_list = k_list;
    rep.topk.assign(k_list.size(), 0.0);
    long pair_correct = 0;
    for (const EvalCase& c : cases) {
        const double sp = scorer(c.user_id, w.item(c.positive));
        int ahead = 0;
        bool tied = false;
        for (int nid : c.negatives) {
            const double sn = scorer(c.user_id, w.item(nid));
            if (sn >= sp) ++ahead;
            if (sn == sp) tied = true;
            if (sp > sn) ++pair_correct;
            ++rep.n_pairs;
        }
        const int rank = 1 + ahead;
        if (tied) ++rep.tie_cases;
        for (std::size_t i = 0; i < k_list.size(); ++i)
            if (rank <= k_list[i]) rep.topk[i] += 1.0;
        ++rep.n_cases;
    }
    for (double& v : rep.topk) v /= static_cast<double>(rep.n_cases);
    rep.pairwise = static_cast<double>(pair_correct) / static_cast<double>(rep.n_pairs);
    return rep;
}

// ---------------------------------------------------------------------------
// Confidence-margin audit
// ---------------------------------------------------------------------------

// Splits all scored candidates into confident-correct / confident-wrong /
// ambiguous, where scores inside the open band (0.5 - tau, 0.5 + tau) are
// ambiguous.  Fractions share one denominator (all scored candidates).
struct MarginAudit {
    double tau = 0.0;
    long n_scored = 0;
    long n_confident_correct = 0;
    long n_confident_wrong = 0;
    long n_ambiguous = 0;
    double frac_confident_correct = 0.0;
    double frac_confident_wrong = 0.0;
    double frac_ambiguous = 0.0;
};

inline MarginAudit margin_audit(const World& w, const std::vector<EvalCase>& cases,
                                const Scorer& scorer, double tau) {
    require(tau > 0.0 && tau < 0.5, "margin_audit: tau must be in (0, 0.5)");
    require(!cases.empty(), "margin_audit: no cases");
    MarginAudit a;
    a.tau = tau;
    auto judge = [&](int user_id, int item_id, bool liked_truth) {
        const double q = scorer(user_id, w.item(item_id));
        require_finite(q, "margin_audit: score");
        ++a.n_scored;
        if (std::abs(q - 0.5) < tau) {
            ++a.n_ambiguous;
        } else if ((q > 0.5) == liked_truth) {
            ++a.n_confident_correct;
        } else {
            ++a.n_confident_wrong;
        }
    };
    for (const EvalCase& c : cases) {
        judge(c.user_id, c.positive, true);
        for (int nid : c.negatives) judge(c.user_id, nid, false);
    }
    const double n = static_cast<double>(a.n_scored);
    a.frac_confident_correct = static_cast<double>(a.n_confident_correct) / n;
    a.frac_confident_wrong = static_cast<double>(a.n_confident_wrong) / n;
    a.frac_ambiguous = static_cast<double>(a.n_ambiguous) / n;
    return a;
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignment;
    double inertia = 0.0;  // sum of squared distances to assigned centroid
    int iters = 0;
    bool converged = false;
};

// Standard k-means with D^2-weighted seeding and Lloyd iterations.  Ties in
// assignment go to the lowest cluster index; an emptied cluster is re-seeded
// with the point farthest from its assigned centroid.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                           std::uint64_t seed, int max_iters = 100) {
    require(k >= 1, "kmeans: k must be >= 1");
    require(static_cast<int>(points.size()) >= k, "kmeans: fewer points than clusters");
    require(max_iters >= 1, "kmeans: max_iters must be >= 1");
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();
    for (const auto& p : points)
        require(p.size() == dim, "kmeans: inconsistent point dimensions");

    Rng rng(derive_seed(seed, "kmeans"));
    KMeansResult res;

    // D^2-weighted seeding.
    res.centroids.push_back(points[static_cast<std::size_t>(rng.uniform_index(n))]);
    std::vector<double> d2(n);
    while (static_cast<int>(res.centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : res.centroids) {
                const double d = distance(points[i], c);
                best = std::min(best, d * d);
            }
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = static_cast<std::size_t>(rng.uniform_index(n));  // all points covered
        } else {
            double r = rng.uniform() * total;
            for (; pick + 1 < n; ++pick) {
                r -= d2[pick];
                if (r <= 0.0) break;
            }
        }
        res.centroids.push_back(points[pick]);
    }

    res.assignment.assign(n, -1);
    for (int it = 1; it <= max_iters; ++it) {
        res.iters = it;
        // Assignment step.
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = distance(points[i], res.centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }
        // Update step.
        std::vector<std::vector<double>> sums(
            static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
        std::vector<long> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(res.assignment[i]);
            for (std::size_t j = 0; j < dim; ++j) sums[c][j] += points[i][j];
            ++counts[c];
        }
        for (int c = 0; c < k; ++c) {
            const std::size_t ci = static_cast<std::size_t>(c);
            if (counts[ci] == 0) {
                // Re-seed an empty cluster with the worst-served point.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = distance(
                        points[i], res.centroids[static_cast<std::size_t>(res.assignment[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                res.centroids[ci] = points[far];
                res.assignment[far] = c;
                changed = true;
                continue;
            }
            for (std::size_t j = 0; j < dim; ++j)
                res.centroids[ci][j] = sums[ci][j] / static_cast<double>(counts[ci]);
        }
        if (!changed) {
            res.converged = true;
            break;
        }
    }

    res.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d =
            distance(points[i], res.centroids[static_cast<std::size_t>(res.assignment[i])]);
        res.inertia += d * d;
    }
    return res;
}

// Mean silhouette coefficient; singleton clusters contribute 0.
inline double silhouette(const std::vector<std::vector<double>>& points,
                         const std::vector<int>& assignment, int k) {
    const std::size_t n = points.size();
    require(assignment.size() == n, "silhouette: assignment size mismatch");
    require(k >= 2, "silhouette: needs at least two clusters");
    require(n >= 2, "silhouette: needs at least two points");
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (int a : assignment) {
        require(a >= 0 && a < k, "silhouette: assignment out of range");
        ++counts[static_cast<std::size_t>(a)];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int own = assignment[i];
        if (counts[static_cast<std::size_t>(own)] <= 1) continue;  // s = 0
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum[static_cast<std::size_t>(assignment[j])] += distance(points[i], points[j]);
        }
        const double a =
            sum[static_cast<std::size_t>(own)] /
            static_cast<double>(counts[static_cast<std::size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || counts[static_cast<std::size_t>(c)] == 0) continue;
            b = std::min(b, sum[static_cast<std::size_t>(c)] /
                                static_cast<double>(counts[static_cast<std::size_t>(c)]));
        }
        if (!std::isfinite(b)) continue;  // no other non-empty cluster
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

// Davies-Bouldin index (lower is better).  Empty clusters are excluded.
inline double davies_bouldin(const std::vector<std::vector<double>>& points,
                             const std::vector<int>& assignment, int k) {
    const std::size_t n = points.size();
    require(assignment.size() == n, "davies_bouldin: assignment size mismatch");
    require(k >= 2, "davies_bouldin: needs at least two clusters");
    const std::size_t dim = points[0].size();
    std::vector<std::vector<double>> centroid(static_cast<std::size_t>(k),
                                              std::vector<double>(dim, 0.0));
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = static_cast<std::size_t>(assignment[i]);
        require(assignment[i] >= 0 && assignment[i] < k,
                "davies_bouldin: assignment out of range");
        for (std::size_t j = 0; j < dim; ++j) centroid[c][j] += points[i][j];
        ++counts[c];
    }
    std::vector<int> live;
    for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0) {
            for (std::size_t j = 0; j < dim; ++j)
                centroid[static_cast<std::size_t>(c)][j] /=
                    static_cast<double>(counts[static_cast<std::size_t>(c)]);
            live.push_back(c);
        }
    require(live.size() >= 2, "davies_bouldin: needs two non-empty clusters");
    std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        scatter[static_cast<std::size_t>(assignment[i])] +=
            distance(points[i], centroid[static_cast<std::size_t>(assignment[i])]);
    for (int c : live)
        scatter[static_cast<std::size_t>(c)] /=
            static_cast<double>(counts[static_cast<std::size_t>(c)]);

    double db = 0.0;
    for (int a : live) {
        double worst = 0.0;
        for (int b : live) {
            if (a == b) continue;
            const double m = distance(centroid[static_cast<std::size_t>(a)],
                                      centroid[static_cast<std::size_t>(b)]);
            const double s =
                scatter[static_cast<std::size_t>(a)] + scatter[static_cast<std::size_t>(b)];
            const double r = m > 0.0 ? s / m
                                     : (s == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            worst = std::max(worst, r);
        }
        db += worst;
    }
    return db / static_cast<double>(live.size());
}

// Fraction of points whose cluster's majority true label matches their own.
inline double purity(const std::vector<int>& assignment, const std::vector<int>& labels,
                     int k) {
    require(assignment.size() == labels.size() && !assignment.empty(),
            "purity: size mismatch");
    int max_label = 0;
    for (int l : labels) {
        require(l >= 0, "purity: negative label");
        max_label = std::max(max_label, l);
    }
    std::vector<std::vector<long>> table(
        static_cast<std::size_t>(k), std::vector<long>(static_cast<std::size_t>(max_label + 1), 0));
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        require(assignment[i] >= 0 && assignment[i] < k, "purity: assignment out of range");
        ++table[static_cast<std::size_t>(assignment[i])][static_cast<std::size_t>(labels[i])];
    }
    long hit = 0;
    for (const auto& row : table) hit += *std::max_element(row.begin(), row.end());
    return static_cast<double>(hit) / static_cast<double>(assignment.size());
}

// ---------------------------------------------------------------------------
// User embeddings and cluster report
// ---------------------------------------------------------------------------

// Deterministic probe item every user is scored against when an embedding or
// attention profile is extracted: the first held-out item when one exists,
// otherwise the last item.
inline const Item& embedding_probe_item(const World& w) {
    require(!w.items.empty(), "embedding probe: world has no items");
    for (const Item& it : w.items)
        if (w.is_held_out_prompt(it.prompt)) return it;
    return w.items.back();
}

inline std::vector<std::vector<double>> user_embeddings(const Model& m, const World& w,
                                                        std::uint64_t seed) {
    const Item& probe = embedding_probe_item(w);
    std::vector<std::vector<double>> out;
    out.reserve(w.users.size());
    for (const User& u : w.users) {
        SequenceSpec seq = make_sequence(
            w, u.id, probe.features,
            derive_seed(seed, "embed-order", static_cast<std::uint64_t>(u.id)));
        out.push_back(m.score(seq).user_embedding);
    }
    return out;
}

struct ClusterReport {
    int k = 0;
    int restarts = 0;
    std::vector<int> assignment;
    double inertia = 0.0;
    double silhouette = 0.0;
    double davies_bouldin = 0.0;
    double purity = 0.0;  // against true group labels
};

// Clusters user embeddings with seeded k-means restarts (best inertia wins)
// and reports internal indices plus purity against the true groups.
inline ClusterReport cluster_users(const Model& m, const World& w, int k, std::uint64_t seed,
                                   int restarts = 8) {
    require(restarts >= 1, "cluster_users: restarts must be >= 1");
    std::vector<std::vector<double>> emb = user_embeddings(m, w, seed);
    KMeansResult best;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        KMeansResult res =
            kmeans(emb, k, derive_seed(seed, "restart", static_cast<std::uint64_t>(r)));
        if (!have || res.inertia < best.inertia) {
            best = std::move(res);
            have = true;
        }
    }
    std::vector<int> labels;
    labels.reserve(w.users.size());
    for (const User& u : w.users) labels.push_back(u.group);
    ClusterReport rep;
    rep.k = k;
    rep.restarts = restarts;
    rep.assignment = best.assignment;
    rep.inertia = best.inertia;
    rep.silhouette = silhouette(emb, best.assignment, k);
    rep.davies_bouldin = davies_bouldin(emb, best.assignment, k);
    rep.purity = purity(best.assignment, labels, k);
    return rep;
}

// ---------------------------------------------------------------------------
// Attention-profile divergence
// ---------------------------------------------------------------------------

// KL(p || q) over two discrete distributions after light additive smoothing.
inline double attention_kl(const std::vector<double>& p, const std::vector<double>& q) {
    require(p.size() == q.size() && !p.empty(), "attention_kl: size mismatch");
    constexpr double kSmooth = 1e-12;
    double ps = 0.0, qs = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        require(p[i] >= 0.0 && q[i] >= 0.0, "attention_kl: negative probability");
        ps += p[i] + kSmooth;
        qs += q[i] + kSmooth;
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = (p[i] + kSmooth) / ps;
        const double qi = (q[i] + kSmooth) / qs;
        kl += pi * std::log(pi / qi);
    }
    return std::max(0.0, kl);
}

// Per-user attention profiles over preference tokens against the shared probe
// item (same probe as user_embeddings).
inline std::vector<std::vector<double>> user_pref_profiles(const Model& m, const World& w,
                                                           int layer, int head,
                                                           std::uint64_t seed) {
    const Item& probe = embedding_probe_item(w);
    std::vector<std::vector<double>> out;
    out.reserve(w.users.size());
    for (const User& u : w.users) {
        SequenceSpec seq = make_sequence(
            w, u.id, probe.features,
            derive_seed(seed, "embed-order", static_cast<std::uint64_t>(u.id)));
        out.push_back(m.pref_attention_profile(m.probe(seq), layer, head));
    }
    return out;
}

struct KlReport {
    double intra_mean = 0.0;
    double inter_mean = 0.0;
    long n_intra_pairs = 0;
    long n_inter_pairs = 0;
    double separation = 0.0;  // inter_mean - intra_mean
};

// Mean pairwise KL of attention profiles, split by whether the (ordered) user
// pair shares a group.
inline KlReport group_kl_report(const std::vector<std::vector<double>>& profiles,
                                const std::vector<int>& groups) {
    require(profiles.size() == groups.size() && !profiles.empty(),
            "group_kl_report: size mismatch");
    KlReport rep;
    double intra = 0.0, inter = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            if (i == j) continue;
            const double kl = attention_kl(profiles[i], profiles[j]);
            if (groups[i] == groups[j]) {
                intra += kl;
                ++rep.n_intra_pairs;
            } else {
                inter += kl;
                ++rep.n_inter_pairs;
            }
        }
    }
    require(rep.n_intra_pairs >= 1, "group_kl_report: no intra-group pairs");
    require(rep.n_inter_pairs >= 1, "group_kl_report: no inter-group pairs");
    rep.intra_mean = intra / static_cast<double>(rep.n_intra_pairs);
    rep.inter_mean = inter / static_cast<double>(rep.n_inter_pairs);
    rep.separation = rep.inter_mean - rep.intra_mean;
    return rep;
}

// ---------------------------------------------------------------------------
// History-length sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    int n_ref = 0;
    EvalReport report;
};

// Re-evaluates the same cases with the user's shuffled history truncated to
// each requested length.
inline std::vector<SweepRow> nref_sweep(const Model& m, const World& w,
                                        const std::vector<EvalCase>& cases,
                                        const std::vector<int>& nref_list,
                                        const std::vector<int>& k_list, std::uint64_t seed) {
    require(!nref_list.empty(), "nref_sweep: empty length list");
    std::vector<SweepRow> rows;
    rows.reserve(nref_list.size());
    for (int n : nref_list) {
        require(n >= 0, "nref_sweep: lengths must be >= 0");
        Scorer s = model_scorer(m, w, derive_seed(seed, "sweep", static_cast<std::uint64_t>(n)), n);
        rows.push_back(SweepRow{n, evaluate_topk(w, cases, s, k_list)});
    }
    return rows;
}

}  // namespace prefforge
