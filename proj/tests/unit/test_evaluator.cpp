#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "prefforge/evaluator.hpp"
#include "prefforge/trainer.hpp"

using namespace prefforge;

namespace {

WorldConfig eval_world_config() {
    WorldConfig cfg;
    cfg.num_groups = 2;
    cfg.feature_dim = 6;
    cfg.users_per_group = 4;
    cfg.num_prompts = 10;
    cfg.items_per_prompt = 8;
    cfg.held_out_prompts = 2;
    cfg.n_ref = 4;
    cfg.seed = 21;
    return cfg;
}

ModelConfig eval_model_config() {
    ModelConfig cfg;
    cfg.feature_dim = 6;
    cfg.d_model = 8;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.mlp_hidden = 10;
    cfg.n_pref_tokens = 2;
    cfg.max_history = 4;
    cfg.init_seed = 9;
    return cfg;
}

// Scorer that reads from a fixed (item id -> score) table.
Scorer table_scorer(std::map<int, double> table) {
    return [table = std::move(table)](int, const Item& item) { return table.at(item.id); };
}

void check_close(double got, double want, double tol) {
    INFO("got=" << got << " want=" << want << " tol=" << tol);
    REQUIRE(std::fabs(got - want) <= tol);
}

}  // namespace

TEST_CASE("eval cases have unambiguous ground truth on held-out prompts", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const double margin = 0.1;
    const auto cases = make_eval_cases(w, 50, 3, margin, 77);
    REQUIRE(cases.size() == 50);
    for (const EvalCase& c : cases) {
        const User& u = w.user(c.user_id);
        REQUIRE(w.is_held_out_prompt(w.item(c.positive).prompt));
        REQUIRE(true_score(w, u, w.item(c.positive)) >= 0.5 + margin);
        REQUIRE(c.negatives.size() == 3);
        std::set<int> seen{c.positive};
        for (int nid : c.negatives) {
            REQUIRE(w.is_held_out_prompt(w.item(nid).prompt));
            REQUIRE(true_score(w, u, w.item(nid)) <= 0.5 - margin);
            REQUIRE(seen.insert(nid).second);  // all candidates distinct
        }
    }
    // Deterministic in the seed.
    const auto again = make_eval_cases(w, 50, 3, margin, 77);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        REQUIRE(cases[i].user_id == again[i].user_id);
        REQUIRE(cases[i].positive == again[i].positive);
        REQUIRE(cases[i].negatives == again[i].negatives);
    }
    const auto other = make_eval_cases(w, 50, 3, margin, 78);
    bool differs = false;
    for (std::size_t i = 0; i < cases.size() && !differs; ++i)
        differs = cases[i].positive != other[i].positive || cases[i].user_id != other[i].user_id;
    REQUIRE(differs);
}

TEST_CASE("eval case sampling fails loudly when starved", "[evaluator]") {
    WorldConfig cfg = eval_world_config();
    cfg.held_out_prompts = 0;
    const World none = generate_world(cfg);
    REQUIRE_THROWS_AS(make_eval_cases(none, 5, 3, 0.1, 1), DomainError);

    WorldConfig flat = eval_world_config();
    flat.sharpness = 2.0;    // max score sigma(2 * 1.1) ~ 0.90: margin 0.45 unreachable
    flat.min_margin = 0.05;  // keep history sampling feasible at low sharpness
    const World w = generate_world(flat);
    REQUIRE_THROWS_AS(make_eval_cases(w, 5, 3, 0.45, 1), GenerationError);

    const World ok = generate_world(eval_world_config());
    REQUIRE_THROWS_AS(make_eval_cases(ok, 0, 3, 0.1, 1), DomainError);
    REQUIRE_THROWS_AS(make_eval_cases(ok, 5, 0, 0.1, 1), DomainError);
    REQUIRE_THROWS_AS(make_eval_cases(ok, 5, 3, 0.5, 1), DomainError);
}

TEST_CASE("top-k fixture: ranks counted by hand", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const int base = w.config.training_prompts() * w.config.items_per_prompt;  // held-out ids
    std::vector<EvalCase> cases(3);
    for (int i = 0; i < 3; ++i) {
        cases[static_cast<std::size_t>(i)].user_id = 0;
        cases[static_cast<std::size_t>(i)].positive = base + 4 * i;
        cases[static_cast<std::size_t>(i)].negatives = {base + 4 * i + 1, base + 4 * i + 2,
                                                        base + 4 * i + 3};
    }
    std::map<int, double> t;
    // Case 0: positive wins outright (rank 1).
    t[base + 0] = 0.9; t[base + 1] = 0.5; t[base + 2] = 0.4; t[base + 3] = 0.3;
    // Case 1: one negative beats it (rank 2).
    t[base + 4] = 0.5; t[base + 5] = 0.6; t[base + 6] = 0.4; t[base + 7] = 0.3;
    // Case 2: all negatives beat it (rank 4).
    t[base + 8] = 0.2; t[base + 9] = 0.6; t[base + 10] = 0.5; t[base + 11] = 0.4;

    const EvalReport rep = evaluate_topk(w, cases, table_scorer(t), {1, 2, 3});
    REQUIRE(rep.n_cases == 3);
    REQUIRE(rep.n_pairs == 9);
    check_close(rep.topk[0], 1.0 / 3.0, 1e-15);
    check_close(rep.topk[1], 2.0 / 3.0, 1e-15);
    check_close(rep.topk[2], 2.0 / 3.0, 1e-15);
    check_close(rep.pairwise, 5.0 / 9.0, 1e-15);  // 3 + 2 + 0 wins
    REQUIRE(rep.tie_cases == 0);
}

TEST_CASE("exact ties demote the positive conservatively", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const int base = w.config.training_prompts() * w.config.items_per_prompt;
    EvalCase c;
    c.user_id = 0;
    c.positive = base;
    c.negatives = {base + 1, base + 2, base + 3};
    std::map<int, double> t{{base, 0.5}, {base + 1, 0.5}, {base + 2, 0.1}, {base + 3, 0.2}};
    const EvalReport rep = evaluate_topk(w, {c}, table_scorer(t), {1, 2, 3});
    REQUIRE(rep.tie_cases == 1);
    check_close(rep.topk[0], 0.0, 1e-15);  // tie pushes it to rank 2
    check_close(rep.topk[1], 1.0, 1e-15);
    check_close(rep.pairwise, 2.0 / 3.0, 1e-15);  // the tied pair is not a win
}

TEST_CASE("k list validation", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const auto cases = make_eval_cases(w, 3, 3, 0.1, 5);
    const Scorer s = oracle_scorer(w);
    REQUIRE_THROWS_AS(evaluate_topk(w, cases, s, {}), DomainError);
    REQUIRE_THROWS_AS(evaluate_topk(w, cases, s, {0, 1}), DomainError);
    REQUIRE_THROWS_AS(evaluate_topk(w, cases, s, {2, 2}), DomainError);
    REQUIRE_THROWS_AS(evaluate_topk(w, cases, s, {3, 1}), DomainError);
    REQUIRE_THROWS_AS(evaluate_topk(w, {}, s, {1}), DomainError);
}

TEST_CASE("oracle scorer is perfect; random scorer sits at chance", "[evaluator]") {
    // A wide held-out pool so hashed scores rarely repeat across cases.
    WorldConfig cfg = eval_world_config();
    cfg.users_per_group = 25;
    cfg.num_prompts = 30;
    cfg.items_per_prompt = 10;
    cfg.held_out_prompts = 10;
    const World w = generate_world(cfg);
    const auto cases = make_eval_cases(w, 2000, 3, 0.1, 31);

    const EvalReport oracle = evaluate_topk(w, cases, oracle_scorer(w), {1, 2, 3});
    REQUIRE(oracle.topk[0] == 1.0);
    REQUIRE(oracle.topk[2] == 1.0);
    REQUIRE(oracle.pairwise == 1.0);
    REQUIRE(oracle.tie_cases == 0);

    // 1 positive vs 3 negatives under a random scorer: rank is uniform on
    // {1..4}; allow 5 sigma of binomial noise around 25/50/75%.
    const EvalReport rnd = evaluate_topk(w, cases, random_scorer(99), {1, 2, 3});
    check_close(rnd.topk[0], 0.25, 0.07);
    check_close(rnd.topk[1], 0.50, 0.08);
    check_close(rnd.topk[2], 0.75, 0.07);
    check_close(rnd.pairwise, 0.50, 0.05);
}

TEST_CASE("margin audit splits scores into the three bands", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const int base = w.config.training_prompts() * w.config.items_per_prompt;
    std::vector<EvalCase> cases(2);
    cases[0] = {0, base, {base + 1, base + 2}};
    cases[1] = {0, base + 3, {base + 4, base + 5}};
    // tau = 0.125 keeps every comparison exactly representable.
    std::map<int, double> t{
        {base, 0.9},        // positive, confident correct
        {base + 1, 0.55},   // negative, inside the band -> ambiguous
        {base + 2, 0.2},    // negative, confident correct
        {base + 3, 0.25},   // positive scored low -> confident wrong
        {base + 4, 0.75},   // negative scored high -> confident wrong
        {base + 5, 0.5625}, // inside the band -> ambiguous
    };
    const MarginAudit a = margin_audit(w, cases, table_scorer(t), 0.125);
    REQUIRE(a.n_scored == 6);
    REQUIRE(a.n_confident_correct == 2);
    REQUIRE(a.n_confident_wrong == 2);
    REQUIRE(a.n_ambiguous == 2);
    check_close(a.frac_confident_correct + a.frac_confident_wrong + a.frac_ambiguous, 1.0, 1e-15);

    // The band is open: a score exactly tau away is confident.
    std::map<int, double> edge{{base, 0.625}, {base + 1, 0.375}, {base + 2, 0.375},
                               {base + 3, 0.625}, {base + 4, 0.375}, {base + 5, 0.375}};
    const MarginAudit b = margin_audit(w, cases, table_scorer(edge), 0.125);
    REQUIRE(b.n_ambiguous == 0);

    REQUIRE_THROWS_AS(margin_audit(w, cases, table_scorer(t), 0.0), DomainError);
    REQUIRE_THROWS_AS(margin_audit(w, cases, table_scorer(t), 0.5), DomainError);
    REQUIRE_THROWS_AS(margin_audit(w, {}, table_scorer(t), 0.1), DomainError);
}

TEST_CASE("k-means recovers well-separated blobs", "[evaluator]") {
    const std::vector<std::vector<double>> pts{{0.0, 0.0},  {1.0, 0.5},  {0.5, 1.0},
                                               {50.0, 50.0}, {51.0, 50.5}, {50.5, 51.0}};
    const KMeansResult r = kmeans(pts, 2, 7);
    REQUIRE(r.converged);
    REQUIRE(r.assignment[0] == r.assignment[1]);
    REQUIRE(r.assignment[1] == r.assignment[2]);
    REQUIRE(r.assignment[3] == r.assignment[4]);
    REQUIRE(r.assignment[4] == r.assignment[5]);
    REQUIRE(r.assignment[0] != r.assignment[3]);

    // Inertia equals its definition, recomputed.
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = distance(pts[i], r.centroids[static_cast<std::size_t>(r.assignment[i])]);
        inertia += d * d;
    }
    check_close(r.inertia, inertia, 1e-12);

    // Determinism.
    const KMeansResult r2 = kmeans(pts, 2, 7);
    REQUIRE(r2.assignment == r.assignment);
    REQUIRE(r2.inertia == r.inertia);
}

TEST_CASE("k-means degenerate shapes", "[evaluator]") {
    const std::vector<std::vector<double>> pts{{0.0}, {1.0}, {2.0}, {3.0}};
    const KMeansResult all = kmeans(pts, 4, 3);
    check_close(all.inertia, 0.0, 1e-18);  // every point its own centroid

    const std::vector<std::vector<double>> same{{2.5, 1.0}, {2.5, 1.0}, {2.5, 1.0}};
    const KMeansResult one = kmeans(same, 1, 3);
    REQUIRE(one.centroids[0] == std::vector<double>({2.5, 1.0}));
    check_close(one.inertia, 0.0, 1e-18);

    const KMeansResult mean = kmeans({{0.0}, {1.0}, {5.0}}, 1, 3);
    check_close(mean.centroids[0][0], 2.0, 1e-12);

    // Duplicated points can empty a cluster; the reseed path must still
    // terminate with a valid assignment.
    const std::vector<std::vector<double>> dup{{0.0}, {0.0}, {0.0}, {0.0}, {10.0}};
    const KMeansResult res = kmeans(dup, 3, 11);
    for (int a : res.assignment) {
        REQUIRE(a >= 0);
        REQUIRE(a < 3);
    }
    REQUIRE(std::isfinite(res.inertia));

    REQUIRE_THROWS_AS(kmeans(pts, 5, 1), DomainError);
    REQUIRE_THROWS_AS(kmeans(pts, 0, 1), DomainError);
    REQUIRE_THROWS_AS(kmeans({{1.0}, {1.0, 2.0}}, 1, 1), DomainError);
    REQUIRE_THROWS_AS(kmeans(pts, 2, 1, 0), DomainError);
}

TEST_CASE("silhouette matches high-precision fixtures", "[evaluator]") {
    const std::vector<std::vector<double>> a{{0.0, 0.0}, {1.0, 0.5}, {0.5, 1.0},
                                             {5.0, 5.0}, {6.0, 5.5}, {5.5, 6.0}};
    check_close(silhouette(a, {0, 0, 0, 1, 1, 1}, 2), 0.86073821464805371017, 1e-12);

    const std::vector<std::vector<double>> b{{0.0, 0.0}, {0.4, 0.1}, {4.0, 0.0}, {4.5, 0.3},
                                             {4.0, 0.6}, {0.0, 6.0}, {9.0, 9.0}};
    check_close(silhouette(b, {0, 0, 1, 1, 1, 2, 2}, 3), 0.574613276548917174662, 1e-12);

    // Two zero-scatter clusters: perfect separation.
    const std::vector<std::vector<double>> c{{0.0}, {0.0}, {10.0}, {10.0}};
    check_close(silhouette(c, {0, 0, 1, 1}, 2), 1.0, 1e-15);
}

TEST_CASE("silhouette: singletons contribute zero", "[evaluator]") {
    const std::vector<std::vector<double>> pts{{0.0, 0.0}, {5.0, 5.0}, {5.1, 5.0}};
    const std::vector<int> labels{0, 1, 1};
    // By the definition: the singleton contributes 0, the pair contributes
    // 1 - a/b with a = 0.1 and b = distance to the lone point.
    const double b1 = std::sqrt(50.0);
    const double b2 = std::sqrt(5.1 * 5.1 + 25.0);
    const double expect = ((1.0 - 0.1 / b1) + (1.0 - 0.1 / b2)) / 3.0;
    check_close(silhouette(pts, labels, 2), expect, 1e-12);
}

TEST_CASE("silhouette stays within its bounds on random data", "[evaluator]") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> pts;
        std::vector<int> labels;
        const int n = 6 + static_cast<int>(rng.uniform_index(5));
        for (int i = 0; i < n; ++i) {
            pts.push_back({rng.normal(), rng.normal()});
            labels.push_back(static_cast<int>(rng.uniform_index(3)));
        }
        // Ensure at least two distinct labels.
        labels[0] = 0;
        labels[1] = 1;
        const double s = silhouette(pts, labels, 3);
        REQUIRE(s >= -1.0 - 1e-12);
        REQUIRE(s <= 1.0 + 1e-12);
    }
}

TEST_CASE("silhouette and davies_bouldin validate their inputs", "[evaluator]") {
    const std::vector<std::vector<double>> pts{{0.0}, {1.0}};
    REQUIRE_THROWS_AS(silhouette(pts, {0, 0}, 1), DomainError);
    REQUIRE_THROWS_AS(silhouette(pts, {0}, 2), DomainError);
    REQUIRE_THROWS_AS(silhouette(pts, {0, 5}, 2), DomainError);
    REQUIRE_THROWS_AS(davies_bouldin(pts, {0, 0}, 1), DomainError);
    REQUIRE_THROWS_AS(davies_bouldin(pts, {0, 0}, 2), DomainError);  // one live cluster
    REQUIRE_THROWS_AS(davies_bouldin(pts, {0, 3}, 2), DomainError);
}

TEST_CASE("davies_bouldin matches high-precision fixtures", "[evaluator]") {
    const std::vector<std::vector<double>> a{{0.0, 0.0}, {1.0, 0.5}, {0.5, 1.0},
                                             {5.0, 5.0}, {6.0, 5.5}, {5.5, 6.0}};
    check_close(davies_bouldin(a, {0, 0, 0, 1, 1, 1}, 2), 0.160947570824873003253, 1e-12);

    const std::vector<std::vector<double>> b{{0.0, 0.0}, {0.4, 0.1}, {4.0, 0.0}, {4.5, 0.3},
                                             {4.0, 0.6}, {0.0, 6.0}, {9.0, 9.0}};
    check_close(davies_bouldin(b, {0, 0, 1, 1, 1, 2, 2}, 3), 0.661975847471970043796, 1e-12);

    const std::vector<std::vector<double>> c{{0.0}, {0.0}, {10.0}, {10.0}};
    check_close(davies_bouldin(c, {0, 0, 1, 1}, 2), 0.0, 1e-18);
}

TEST_CASE("purity counts majority labels per cluster", "[evaluator]") {
    check_close(purity({0, 0, 1, 1, 2}, {1, 1, 0, 0, 0}, 3), 1.0, 1e-15);
    check_close(purity({0, 0, 0, 1}, {0, 1, 0, 1}, 2), 0.75, 1e-15);
    REQUIRE_THROWS_AS(purity({0, 1}, {0}, 2), DomainError);
    REQUIRE_THROWS_AS(purity({0, 5}, {0, 0}, 2), DomainError);
    REQUIRE_THROWS_AS(purity({0, 0}, {0, -1}, 1), DomainError);
}

TEST_CASE("attention KL fixtures and properties", "[evaluator]") {
    check_close(attention_kl({0.9, 0.1}, {0.1, 0.9}), 1.75777966186897550623, 1e-9);
    check_close(attention_kl({0.5, 0.5}, {0.25, 0.75}), 0.14384103622589046372, 1e-9);
    REQUIRE(attention_kl({0.3, 0.7}, {0.3, 0.7}) == 0.0);
    check_close(attention_kl({2.0, 2.0}, {1.0, 1.0}), 0.0, 1e-12);  // renormalized

    // Hard zeros survive via smoothing.
    const double hard = attention_kl({1.0, 0.0}, {0.0, 1.0});
    REQUIRE(std::isfinite(hard));
    REQUIRE(hard > 20.0);

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(4), q(4);
        for (auto& x : p) x = rng.uniform();
        for (auto& x : q) x = rng.uniform();
        REQUIRE(attention_kl(p, q) >= 0.0);
    }

    REQUIRE_THROWS_AS(attention_kl({0.5}, {0.5, 0.5}), DomainError);
    REQUIRE_THROWS_AS(attention_kl({}, {}), DomainError);
    REQUIRE_THROWS_AS(attention_kl({-0.1, 1.1}, {0.5, 0.5}), DomainError);
}

TEST_CASE("group KL report separates intra and inter pairs", "[evaluator]") {
    const std::vector<std::vector<double>> profiles{
        {0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}};
    const std::vector<int> groups{0, 0, 1, 1};
    const KlReport rep = group_kl_report(profiles, groups);
    REQUIRE(rep.n_intra_pairs == 4);   // ordered pairs within each group
    REQUIRE(rep.n_inter_pairs == 8);
    check_close(rep.intra_mean, 0.0, 1e-15);
    const double d = attention_kl({0.9, 0.1}, {0.1, 0.9});
    check_close(rep.inter_mean, d, 1e-12);
    check_close(rep.separation, d, 1e-12);

    REQUIRE_THROWS_AS(group_kl_report(profiles, {0, 0, 0, 0}), DomainError);
    REQUIRE_THROWS_AS(group_kl_report(profiles, {0, 1, 2, 3}), DomainError);
    REQUIRE_THROWS_AS(group_kl_report({}, {}), DomainError);
}

TEST_CASE("embedding probe item is shared and deterministic", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const Item& probe = embedding_probe_item(w);
    REQUIRE(probe.id == w.config.training_prompts() * w.config.items_per_prompt);
    REQUIRE(w.is_held_out_prompt(probe.prompt));

    WorldConfig no_held = eval_world_config();
    no_held.held_out_prompts = 0;
    const World w2 = generate_world(no_held);
    REQUIRE(embedding_probe_item(w2).id == static_cast<int>(w2.items.size()) - 1);
}

TEST_CASE("user embeddings and cluster report are deterministic", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const Model m(eval_model_config());
    const auto emb = user_embeddings(m, w, 5);
    REQUIRE(emb.size() == w.users.size());
    for (const auto& e : emb) REQUIRE(e.size() == 8);
    REQUIRE(emb == user_embeddings(m, w, 5));

    const ClusterReport a = cluster_users(m, w, 2, 17, 4);
    const ClusterReport b = cluster_users(m, w, 2, 17, 4);
    REQUIRE(a.assignment == b.assignment);
    REQUIRE(a.inertia == b.inertia);
    REQUIRE(a.silhouette == b.silhouette);
    REQUIRE(a.k == 2);
    REQUIRE(a.restarts == 4);
    REQUIRE(a.assignment.size() == w.users.size());
    REQUIRE(a.purity >= 0.0);
    REQUIRE(a.purity <= 1.0);
    REQUIRE(a.silhouette >= -1.0);
    REQUIRE(a.silhouette <= 1.0);
    REQUIRE(a.davies_bouldin >= 0.0);
    REQUIRE_THROWS_AS(cluster_users(m, w, 2, 17, 0), DomainError);
}

TEST_CASE("model scorer matches a hand-built scoring call", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const Model m(eval_model_config());
    const Scorer s = model_scorer(m, w, 123);
    const Item& item = w.items[5];
    const SequenceSpec seq =
        make_sequence(w, 2, item.features, derive_seed(123, "ctx", 2));
    REQUIRE(s(2, item) == preference_score(m.score(seq).logits));
    REQUIRE(s(2, item) == s(2, item));  // stateless
}

TEST_CASE("user preference profiles feed the group KL report", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const Model m(eval_model_config());
    const auto profiles = user_pref_profiles(m, w, -1, -1, 5);
    REQUIRE(profiles.size() == w.users.size());
    for (const auto& p : profiles) {
        REQUIRE(p.size() == 2);  // n_pref_tokens
        double sum = 0.0;
        for (double v : p) sum += v;
        check_close(sum, 1.0, 1e-12);
    }
    std::vector<int> groups;
    for (const User& u : w.users) groups.push_back(u.group);
    const KlReport rep = group_kl_report(profiles, groups);
    REQUIRE(rep.n_intra_pairs == 2 * (4 * 3));  // 2 groups x ordered pairs of 4
    REQUIRE(rep.n_inter_pairs == 2 * (4 * 4));
    REQUIRE(std::isfinite(rep.separation));
}

TEST_CASE("history-length sweep echoes its lengths deterministically", "[evaluator]") {
    const World w = generate_world(eval_world_config());
    const Model m(eval_model_config());
    const auto cases = make_eval_cases(w, 10, 3, 0.1, 3);
    const auto rows = nref_sweep(m, w, cases, {0, 1, 4}, {1, 2}, 9);
    REQUIRE(rows.size() == 3);
    REQUIRE(rows[0].n_ref == 0);
    REQUIRE(rows[1].n_ref == 1);
    REQUIRE(rows[2].n_ref == 4);
    for (const auto& r : rows) {
        REQUIRE(r.report.n_cases == 10);
        REQUIRE(r.report.topk.size() == 2);
    }
    const auto again = nref_sweep(m, w, cases, {0, 1, 4}, {1, 2}, 9);
    for (std::size_t i = 0; i < rows.size(); ++i)
        REQUIRE(rows[i].report.topk == again[i].report.topk);

    REQUIRE_THROWS_AS(nref_sweep(m, w, cases, {}, {1}, 9), DomainError);
    REQUIRE_THROWS_AS(nref_sweep(m, w, cases, {-1}, {1}, 9), DomainError);
}

TEST_CASE("eval configuration validation", "[evaluator]") {
    EvalConfig ec;
    REQUIRE_NOTHROW(ec.validate());
    ec.n_cases = 0;
    REQUIRE_THROWS_AS(ec.validate(), DomainError);
    ec = {};
    ec.tau = 0.5;
    REQUIRE_THROWS_AS(ec.validate(), DomainError);
    ec = {};
    ec.case_margin = 0.5;
    REQUIRE_THROWS_AS(ec.validate(), DomainError);
    ec = {};
    ec.k_list = {};
    REQUIRE_THROWS_AS(ec.validate(), DomainError);
    ec = {};
    ec.restarts = 0;
    REQUIRE_THROWS_AS(ec.validate(), DomainError);
    ec = {};
    ec.attn_layer = -2;
    REQUIRE_THROWS_AS(ec.validate(), DomainError);
}
