// Minimal end-to-end tour of the library: generate a synthetic preference
// world, check its separation guarantees, train a small scoring model,
// evaluate it against the oracle and a random baseline, cluster the learned
// user embeddings, and gradient-refine one held-out item for one user.
//
// Runs in well under a minute on one core.  Build via the `quickstart`
// target and run with no arguments, or pass a seed:
//
//   ./quickstart [seed]

#include <cstdio>
#include <cstdlib>

#include "prefforge/prefforge.hpp"

using namespace prefforge;

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;

    // A small but non-trivial world: 3 user groups in a 12-dimensional
    // feature space, 30 users, clean preference histories.
    WorldConfig wc;
    wc.num_groups = 3;
    wc.feature_dim = 12;
    wc.users_per_group = 10;
    wc.num_prompts = 24;
    wc.items_per_prompt = 20;
    wc.held_out_prompts = 6;
    wc.n_ref = 6;
    wc.seed = seed;
    World world = generate_world(wc);
    std::printf("world: %zu users in %d groups, %zu items, %zu history entries/user\n",
                world.users.size(), wc.num_groups, world.items.size(),
                world.histories[0].size());

    // The generator promises tight groups that stay far apart.  Verify both
    // the geometry (exhaustively) and the induced decisions (by sampling).
    AssumptionReport assumption = verify_assumption(world, 2000, 2000, derive_seed(seed, "verify"));
    std::printf("separation check: %s (radius violations %ld, cross-group violations %ld)\n",
                assumption.all_pass ? "pass" : "FAIL", assumption.geometry.radius_violations,
                assumption.geometry.inter_violations);

    // Train a compact model with every loss term active.
    ModelConfig mc;
    mc.feature_dim = wc.feature_dim;
    mc.d_model = 16;
    mc.n_layers = 2;
    mc.n_heads = 4;
    mc.mlp_hidden = 32;
    mc.n_pref_tokens = 6;
    mc.init_seed = derive_seed(seed, "init");
    Model model(mc);

    TrainConfig tc;
    tc.steps = 400;
    tc.batch_size = 16;
    tc.seed = derive_seed(seed, "train");
    tc.log_every = 100;
    TrainResult tr = train(model, world, tc);
    std::printf("trained %d steps in %.1fs, final loss %.4f\n", tc.steps, tr.wall_seconds,
                tr.log.back().total);

    // Score held-out cases: the model against the truth and against chance.
    std::vector<EvalCase> cases = make_eval_cases(world, 200, 3, 0.1, derive_seed(seed, "cases"));
    EvalReport got = evaluate_topk(world, cases, model_scorer(model, world, derive_seed(seed, "ctx")), {1});
    EvalReport oracle = evaluate_topk(world, cases, oracle_scorer(world), {1});
    EvalReport random = evaluate_topk(world, cases, random_scorer(derive_seed(seed, "rand")), {1});
    std::printf("pairwise accuracy: model %.3f | oracle %.3f | random %.3f\n", got.pairwise,
                oracle.pairwise, random.pairwise);
    std::printf("top-1 accuracy:    model %.3f | oracle %.3f | random %.3f\n", got.topk[0],
                oracle.topk[0], random.topk[0]);

    // The learned user embeddings should recover the hidden groups.
    ClusterReport cl = cluster_users(model, world, wc.num_groups, derive_seed(seed, "cluster"));
    std::printf("user clustering: silhouette %.3f, davies-bouldin %.3f, purity %.3f\n",
                cl.silhouette, cl.davies_bouldin, cl.purity);

    // Gradient-refine one held-out item for user 0 and compare true scores.
    const Item* start = nullptr;
    for (const Item& it : world.items)
        if (world.is_held_out_prompt(it.prompt)) {
            start = &it;
            break;
        }
    GuidanceConfig gc;
    GuidanceResult gr = refine_item(model, world, 0, start->features, gc, derive_seed(seed, "order"));
    Item refined;
    refined.features = gr.features;
    std::printf("guided refinement: model score %.3f -> %.3f, true score %.3f -> %.3f "
                "(%d accepted steps)\n",
                gr.q_before, gr.q_after, true_score(world, world.user(0), *start),
                true_score(world, world.user(0), refined), gr.accepted_steps);
    return 0;
}
