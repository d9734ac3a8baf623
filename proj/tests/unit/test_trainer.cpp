#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "prefforge/trainer.hpp"

using namespace prefforge;

namespace {

WorldConfig train_world_config() {
    WorldConfig cfg;
    cfg.num_groups = 2;
    cfg.feature_dim = 6;
    cfg.users_per_group = 6;
    cfg.num_prompts = 8;
    cfg.items_per_prompt = 6;
    cfg.held_out_prompts = 1;
    cfg.n_ref = 4;
    cfg.seed = 11;
    return cfg;
}

ModelConfig train_model_config() {
    ModelConfig cfg;
    cfg.feature_dim = 6;
    cfg.d_model = 8;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.mlp_hidden = 12;
    cfg.n_pref_tokens = 2;
    cfg.tokens_per_item = 1;
    cfg.max_history = 4;
    cfg.init_seed = 5;
    return cfg;
}

TrainConfig quick_train_config(int steps) {
    TrainConfig tc;
    tc.steps = steps;
    tc.batch_size = 8;
    tc.adam.lr = 3e-3;
    tc.seed = 42;
    return tc;
}

}  // namespace

TEST_CASE("first Adam steps match the closed-form fixture", "[trainer]") {
    Tensor2 p(1, 1, 0.0);
    Adam opt({&p}, AdamConfig{0.1, 0.9, 0.999, 1e-8, 0.0});
    opt.step({Tensor2(1, 1, 1.0)});
    REQUIRE(std::fabs(p[0] - (-0.09999999900000001)) < 1e-12);
    opt.step({Tensor2(1, 1, 1.0)});
    REQUIRE(std::fabs(p[0] - (-0.19999999800000002)) < 1e-12);
    REQUIRE(opt.steps_taken() == 2);
}

TEST_CASE("decoupled weight decay shrinks parameters without gradients", "[trainer]") {
    Tensor2 p(1, 1, 2.0);
    Adam opt({&p}, AdamConfig{0.1, 0.9, 0.999, 1e-8, 0.01});
    opt.step({Tensor2(1, 1, 0.0)});
    REQUIRE(std::fabs(p[0] - 1.998) < 1e-15);  // p - lr * wd * p
}

TEST_CASE("Adam validates configuration and gradient shapes", "[trainer]") {
    Tensor2 p(2, 2, 0.0);
    REQUIRE_THROWS_AS(Adam({&p}, AdamConfig{0.0, 0.9, 0.999, 1e-8, 0.0}), DomainError);
    REQUIRE_THROWS_AS(Adam({&p}, AdamConfig{0.1, 1.0, 0.999, 1e-8, 0.0}), DomainError);
    REQUIRE_THROWS_AS(Adam({&p}, AdamConfig{0.1, 0.9, 0.999, 0.0, 0.0}), DomainError);
    REQUIRE_THROWS_AS(Adam({&p}, AdamConfig{0.1, 0.9, 0.999, 1e-8, -1.0}), DomainError);

    Adam opt({&p}, AdamConfig{});
    REQUIRE_THROWS_AS(opt.step({}), DomainError);                    // wrong list length
    REQUIRE_THROWS_AS(opt.step({Tensor2(1, 2, 0.0)}), DomainError);  // wrong shape
}

TEST_CASE("global-norm clipping rescales exactly at the cap", "[trainer]") {
    std::vector<Tensor2> grads{Tensor2(1, 1, 3.0), Tensor2(1, 1, 4.0)};
    REQUIRE(clip_global_norm(grads, 2.5) == 5.0);
    REQUIRE(std::fabs(grads[0][0] - 1.5) < 1e-15);
    REQUIRE(std::fabs(grads[1][0] - 2.0) < 1e-15);

    std::vector<Tensor2> loose{Tensor2(1, 1, 3.0), Tensor2(1, 1, 4.0)};
    REQUIRE(clip_global_norm(loose, 10.0) == 5.0);
    REQUIRE(loose[0][0] == 3.0);  // under the cap: untouched

    std::vector<Tensor2> off{Tensor2(1, 1, 3.0), Tensor2(1, 1, 4.0)};
    REQUIRE(clip_global_norm(off, 0.0) == 5.0);  // <= 0 disables
    REQUIRE(off[1][0] == 4.0);
}

TEST_CASE("training pool enumerates every (user, entry) target", "[trainer]") {
    const World w = generate_world(train_world_config());
    const auto pool = training_pool(w);
    REQUIRE(pool.size() == w.users.size() * static_cast<std::size_t>(w.config.n_ref));
    REQUIRE(pool[0].user_id == 0);
    REQUIRE(pool[0].entry == 0);
    REQUIRE(pool[1].entry == 1);
    REQUIRE(pool.back().user_id == static_cast<int>(w.users.size()) - 1);
}

TEST_CASE("training reduces the loss and reports an honest log", "[trainer]") {
    const World w = generate_world(train_world_config());
    Model model(train_model_config());
    const TrainConfig tc = quick_train_config(60);
    std::vector<TrainLogRow> streamed;
    const TrainResult r = train(model, w, tc, [&](const TrainLogRow& row) {
        streamed.push_back(row);
    });

    REQUIRE(r.steps_run == 60);
    REQUIRE(r.log.size() == 60);
    REQUIRE(streamed.size() == r.log.size());
    for (std::size_t i = 0; i < r.log.size(); ++i) {
        REQUIRE(r.log[i].step == static_cast<long>(i) + 1);
        REQUIRE(std::isfinite(r.log[i].total));
        REQUIRE(r.log[i].total ==
                Catch::Approx(r.log[i].base + r.log[i].l_plus + r.log[i].l_minus).epsilon(1e-12));
        REQUIRE(streamed[i].step == r.log[i].step);
        REQUIRE(streamed[i].total == r.log[i].total);
    }
    REQUIRE(r.final_total == r.log.back().total);
    REQUIRE(r.log.back().total < r.log.front().total);  // learning happened
    REQUIRE(r.wall_seconds > 0.0);
}

TEST_CASE("training is bitwise deterministic in its seeds", "[trainer]") {
    const World w = generate_world(train_world_config());
    const TrainConfig tc = quick_train_config(25);

    Model a(train_model_config());
    const TrainResult ra = train(a, w, tc);
    Model b(train_model_config());
    const TrainResult rb = train(b, w, tc);

    REQUIRE(ra.log.size() == rb.log.size());
    for (std::size_t i = 0; i < ra.log.size(); ++i) {
        REQUIRE(ra.log[i].total == rb.log[i].total);  // exact, not approximate
        REQUIRE(ra.log[i].base == rb.log[i].base);
    }
    const auto pa = a.parameters();
    const auto pb = b.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) REQUIRE(*pa[i].second == *pb[i].second);

    // A different sampling seed must change the trajectory.
    Model c(train_model_config());
    TrainConfig other = tc;
    other.seed = 43;
    const TrainResult rc = train(c, w, other);
    REQUIRE(rc.log.back().total != ra.log.back().total);
}

TEST_CASE("freeze_pref_steps pins the preference tokens", "[trainer]") {
    const World w = generate_world(train_world_config());

    Model frozen(train_model_config());
    const Tensor2 init_pv = frozen.params().p_v;
    TrainConfig tc = quick_train_config(10);
    tc.freeze_pref_steps = 10;
    train(frozen, w, tc);
    REQUIRE(frozen.params().p_v == init_pv);
    REQUIRE(!(frozen.params().w_item == Model(train_model_config()).params().w_item));

    Model live(train_model_config());
    TrainConfig tc2 = quick_train_config(10);
    tc2.freeze_pref_steps = 5;  // unfreezes halfway
    train(live, w, tc2);
    REQUIRE(!(live.params().p_v == init_pv));
}

TEST_CASE("log_every thins the log but keeps the last step", "[trainer]") {
    const World w = generate_world(train_world_config());
    Model model(train_model_config());
    TrainConfig tc = quick_train_config(25);
    tc.log_every = 10;
    const TrainResult r = train(model, w, tc);
    REQUIRE(r.log.size() == 3);
    REQUIRE(r.log[0].step == 10);
    REQUIRE(r.log[1].step == 20);
    REQUIRE(r.log[2].step == 25);  // final step is always logged
}

TEST_CASE("oversized batches fall back to the full pool", "[trainer]") {
    const World w = generate_world(train_world_config());
    Model model(train_model_config());
    TrainConfig tc = quick_train_config(3);
    tc.batch_size = 100000;
    const TrainResult r = train(model, w, tc);
    REQUIRE(r.steps_run == 3);
    REQUIRE(std::isfinite(r.final_total));
}

TEST_CASE("zero-step training is a no-op", "[trainer]") {
    const World w = generate_world(train_world_config());
    Model model(train_model_config());
    const Tensor2 before = model.params().w_item;
    const TrainResult r = train(model, w, quick_train_config(0));
    REQUIRE(r.steps_run == 0);
    REQUIRE(r.log.empty());
    REQUIRE(model.params().w_item == before);
}

TEST_CASE("ablated loss weights gate the optimized total only", "[trainer]") {
    const World w = generate_world(train_world_config());
    Model model(train_model_config());
    TrainConfig tc = quick_train_config(5);
    tc.loss_weights = {1.0, 0.0, 0.0};
    const TrainResult r = train(model, w, tc);
    for (const auto& row : r.log) {
        REQUIRE(row.total == row.base);  // weighted sum collapses to the base term
        REQUIRE(row.l_plus > 0.0);       // components still measured
        REQUIRE(row.l_minus > 0.0);
    }
}

TEST_CASE("train validates its configuration and world pairing", "[trainer]") {
    const World w = generate_world(train_world_config());
    Model model(train_model_config());

    TrainConfig bad = quick_train_config(1);
    bad.steps = -1;
    REQUIRE_THROWS_AS(train(model, w, bad), DomainError);
    bad = quick_train_config(1);
    bad.batch_size = 0;
    REQUIRE_THROWS_AS(train(model, w, bad), DomainError);
    bad = quick_train_config(1);
    bad.log_every = 0;
    REQUIRE_THROWS_AS(train(model, w, bad), DomainError);
    bad = quick_train_config(1);
    bad.adam.lr = 0.0;
    REQUIRE_THROWS_AS(train(model, w, bad), DomainError);

    ModelConfig wrong_dim = train_model_config();
    wrong_dim.feature_dim = 7;
    Model m2(wrong_dim);
    REQUIRE_THROWS_AS(train(m2, w, quick_train_config(1)), DomainError);

    ModelConfig short_ctx = train_model_config();
    short_ctx.max_history = 2;  // world histories need n_ref - 1 = 3 context slots
    Model m3(short_ctx);
    REQUIRE_THROWS_AS(train(m3, w, quick_train_config(1)), DomainError);

    WorldConfig empty = train_world_config();
    empty.n_ref = 0;
    const World w2 = generate_world(empty);
    REQUIRE_THROWS_AS(train(model, w2, quick_train_config(1)), DomainError);
}
