#pragma once

// Command-line front end.  Subcommands: gen-world, verify, train, eval,
// cluster, attn, guide, ablate.  Exit codes: 0 success, 1 failed check or
// runtime error, 2 usage/config error.  Seed precedence: --seed flag, then
// the PREFFORGE_SEED environment variable, then the config file / defaults.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "prefforge/common.hpp"
#include "prefforge/encode.hpp"
#include "prefforge/evaluator.hpp"
#include "prefforge/guidance.hpp"
#include "prefforge/model.hpp"
#include "prefforge/serialize.hpp"
#include "prefforge/trainer.hpp"
#include "prefforge/world.hpp"

namespace prefforge::cli {

inline constexpr const char* kSeedEnvVar = "PREFFORGE_SEED";

namespace detail {

inline std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv(kSeedEnvVar);
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0')
        throw ConfigError(std::string(kSeedEnvVar) + ": not a valid unsigned integer: \"" +
                          raw + "\"");
    return static_cast<std::uint64_t>(v);
}

// Flag > environment > fallback.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                                  std::uint64_t fallback) {
    if (flag) return *flag;
    if (auto env = env_seed()) return *env;
    return fallback;
}

inline Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    Json j = load_json_file(path);
    if (!j.is_object()) throw ConfigError(path + ": config root must be a JSON object");
    static const std::vector<std::string> kSections{"world", "model", "train", "eval",
                                                    "guidance"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const auto& s : kSections)
            if (key == s) ok = true;
        if (!ok) throw ConfigError(path + ": unknown config section \"" + key + "\"");
    }
    return j;
}

inline Json section(const Json& cfg, const char* name) {
    return cfg.contains(name) ? cfg.at(name) : Json::object();
}

// Model config resolution: absent fields inherit the world's geometry.
inline ModelConfig resolve_model_config(Json mj, const World& w) {
    if (!mj.contains("feature_dim")) mj["feature_dim"] = w.config.feature_dim;
    if (!mj.contains("max_history")) mj["max_history"] = std::max(w.config.n_ref, 1);
    ModelConfig mc = model_config_from_json(mj);
    require(mc.feature_dim == w.config.feature_dim,
            "model.feature_dim (" + std::to_string(mc.feature_dim) +
                ") must match the world feature_dim (" +
                std::to_string(w.config.feature_dim) + ")");
    return mc;
}

inline std::vector<int> resolve_nref_list(const EvalConfig& ec, const World& w) {
    std::vector<int> ns = ec.nref_list;
    if (ns.empty()) {
        for (int n : {1, 2, 4, w.config.n_ref})
            if (n >= 0 && n <= w.config.n_ref) ns.push_back(n);
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    }
    for (int n : ns)
        require(n >= 0 && n <= w.config.n_ref,
                "eval.nref_list entries must be within the world's history length");
    return ns;
}

inline void print_eval_report(const char* label, const EvalReport& r) {
    std::printf("%s:", label);
    for (std::size_t i = 0; i < r.k_list.size(); ++i)
        std::printf(" top%d=%.4f", r.k_list[i], r.topk[i]);
    std::printf(" pairwise=%.4f (cases=%ld ties=%ld)\n", r.pairwise, r.n_cases, r.tie_cases);
}

inline void print_assumption_report(const AssumptionReport& rep, const World& w) {
    std::printf("geometry: radius violations %ld (max excess %.3e), "
                "inter violations %ld (min slack %.3e)\n",
                rep.geometry.radius_violations, rep.geometry.max_radius_excess,
                rep.geometry.inter_violations, rep.geometry.min_inter_slack);
    for (const IntraGroupStats& s : rep.intra)
        std::printf("group %d: eps_hat %.4f <= %.4f %s | alpha_hat %.4f <= %.4f+%.4f %s "
                    "(n=%ld/%ld)\n",
                    s.group, s.eps_hat, w.config.eps_of(s.group), s.eps_ok ? "ok" : "FAIL",
                    s.alpha_hat, w.config.alpha_of(s.group), s.alpha_ci,
                    s.alpha_ok ? "ok" : "FAIL", s.n_score, s.n_decision);
    for (const InterGroupStats& s : rep.inter)
        std::printf("pair (%d,%d): score_gap %.4f >= %.4f %s | beta_hat %.4f <= %.4f+%.4f %s "
                    "(n=%ld/%ld)\n",
                    s.group_a, s.group_b, s.score_gap_hat,
                    std::max(w.config.eps_of(s.group_a), w.config.eps_of(s.group_b)),
                    s.score_ok ? "ok" : "FAIL", s.beta_hat,
                    w.config.beta_of(s.group_a, s.group_b), s.beta_ci,
                    s.beta_ok ? "ok" : "FAIL", s.n_score, s.n_decision);
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

inline void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--seed", f.seed, "seed override (wins over " + std::string(kSeedEnvVar) + ")");
    cmd->add_flag("--force", f.force, "overwrite existing output files");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

inline int cmd_gen_world(const detail::CommonFlags& f, const std::string& out_path) {
    Json cfg = detail::load_config(f.config_path);
    WorldConfig wc = world_config_from_json(detail::section(cfg, "world"));
    wc.seed = detail::resolve_seed(f.seed, wc.seed);
    World w = generate_world(wc);
    save_world(out_path, w, f.force);
    std::printf("world: %d groups x %d users, %d prompts x %d items (%d held out), "
                "n_ref %d, seed %llu -> %s\n",
                wc.num_groups, wc.users_per_group, wc.num_prompts, wc.items_per_prompt,
                wc.held_out_prompts, wc.n_ref,
                static_cast<unsigned long long>(wc.seed), out_path.c_str());
    return 0;
}

inline int cmd_verify(const detail::CommonFlags& f, const std::string& world_path,
                      long probes, long pairs, const std::string& json_out) {
    World w = load_world(world_path);
    const std::uint64_t seed = detail::resolve_seed(f.seed, derive_seed(w.config.seed, "verify"));
    AssumptionReport rep = verify_assumption(w, probes, pairs, seed);
    detail::print_assumption_report(rep, w);
    if (!json_out.empty()) write_text_file(json_out, to_json(rep).dump(2) + "\n", f.force);
    std::printf("RESULT: %s\n", rep.all_pass ? "PASS" : "FAIL");
    return rep.all_pass ? 0 : 1;
}

inline int cmd_train(const detail::CommonFlags& f, const std::string& world_path,
                     const std::string& out_path, const std::string& log_path, bool quiet) {
    Json cfg = detail::load_config(f.config_path);
    World w = load_world(world_path);
    ModelConfig mc = detail::resolve_model_config(detail::section(cfg, "model"), w);
    TrainConfig tc = train_config_from_json(detail::section(cfg, "train"));
    tc.seed = detail::resolve_seed(f.seed, tc.seed);

    Model model(mc);
    auto progress = [&](const TrainLogRow& r) {
        if (!quiet)
            std::printf("step %ld/%d total=%.4f base=%.4f l+=%.4f l-=%.4f\n", r.step, tc.steps,
                        r.total, r.base, r.l_plus, r.l_minus);
    };
    TrainResult res = train(model, w, tc, progress);

    CheckpointMeta meta{res.steps_run, w.config.seed, tc.seed};
    save_checkpoint(out_path, model, meta, f.force);
    if (!log_path.empty()) save_train_log(log_path, res.log, f.force);
    std::printf("trained %ld steps in %.1fs, final total %.4f -> %s\n", res.steps_run,
                res.wall_seconds, res.final_total, out_path.c_str());
    return 0;
}

inline int cmd_eval(const detail::CommonFlags& f, const std::string& world_path,
                    const std::string& ckpt_path, const std::string& out_path,
                    const std::string& csv_path) {
    Json cfg = detail::load_config(f.config_path);
    World w = load_world(world_path);
    LoadedCheckpoint ck = load_checkpoint(ckpt_path);
    require(ck.model.config().feature_dim == w.config.feature_dim,
            "eval: checkpoint feature_dim does not match the world");
    EvalConfig ec = eval_config_from_json(detail::section(cfg, "eval"));
    ec.seed = detail::resolve_seed(f.seed, ec.seed);

    std::vector<EvalCase> cases =
        make_eval_cases(w, ec.n_cases, ec.n_negatives, ec.case_margin, ec.seed);
    Scorer model_s = model_scorer(ck.model, w, derive_seed(ec.seed, "model-ctx"));
    EvalReport model_rep = evaluate_topk(w, cases, model_s, ec.k_list);
    EvalReport oracle_rep = evaluate_topk(w, cases, oracle_scorer(w), ec.k_list);
    EvalReport random_rep =
        evaluate_topk(w, cases, random_scorer(derive_seed(ec.seed, "random")), ec.k_list);
    MarginAudit audit = margin_audit(w, cases, model_s, ec.tau);
    std::vector<SweepRow> sweep =
        nref_sweep(ck.model, w, cases, detail::resolve_nref_list(ec, w), ec.k_list, ec.seed);

    const int k = ec.cluster_k > 0 ? ec.cluster_k : w.config.num_groups;
    ClusterReport cluster = cluster_users(ck.model, w, k, ec.seed, ec.restarts);

    Json out{{"cases", Json{{"n_cases", ec.n_cases},
                            {"n_negatives", ec.n_negatives},
                            {"case_margin", ec.case_margin},
                            {"seed", ec.seed}}},
             {"model", to_json(model_rep)},
             {"oracle", to_json(oracle_rep)},
             {"random", to_json(random_rep)},
             {"margin_audit", to_json(audit)},
             {"sweep", to_json(sweep)},
             {"cluster", to_json(cluster)}};

    if (ck.model.config().n_pref_tokens > 0) {
        std::vector<std::vector<double>> profiles =
            user_pref_profiles(ck.model, w, ec.attn_layer, ec.attn_head, ec.seed);
        std::vector<int> groups;
        for (const User& u : w.users) groups.push_back(u.group);
        out["attention_kl"] = to_json(group_kl_report(profiles, groups));
    }

    detail::print_eval_report("model", model_rep);
    detail::print_eval_report("oracle", oracle_rep);
    detail::print_eval_report("random", random_rep);
    std::printf("margin audit (tau=%.2f): correct=%.4f wrong=%.4f ambiguous=%.4f\n", audit.tau,
                audit.frac_confident_correct, audit.frac_confident_wrong, audit.frac_ambiguous);
    for (const SweepRow& r : sweep)
        std::printf("n_ref %d: top%d=%.4f pairwise=%.4f\n", r.n_ref, r.report.k_list[0],
                    r.report.topk[0], r.report.pairwise);
    std::printf("cluster k=%d: silhouette=%.4f davies_bouldin=%.4f purity=%.4f\n", cluster.k,
                cluster.silhouette, cluster.davies_bouldin, cluster.purity);
    if (out.contains("attention_kl"))
        std::printf("attention KL: intra=%.4f inter=%.4f separation=%.4f\n",
                    out["attention_kl"]["intra_mean"].get<double>(),
                    out["attention_kl"]["inter_mean"].get<double>(),
                    out["attention_kl"]["separation"].get<double>());

    if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n", f.force);
    if (!csv_path.empty()) write_text_file(csv_path, eval_report_csv(model_rep), f.force);
    return 0;
}

inline int cmd_cluster(const detail::CommonFlags& f, const std::string& world_path,
                       const std::string& ckpt_path, int k_flag, int restarts_flag,
                       const std::string& out_path) {
    Json cfg = detail::load_config(f.config_path);
    World w = load_world(world_path);
    LoadedCheckpoint ck = load_checkpoint(ckpt_path);
    EvalConfig ec = eval_config_from_json(detail::section(cfg, "eval"));
    ec.seed = detail::resolve_seed(f.seed, ec.seed);
    const int k = k_flag > 0 ? k_flag : (ec.cluster_k > 0 ? ec.cluster_k : w.config.num_groups);
    const int restarts = restarts_flag > 0 ? restarts_flag : ec.restarts;
    ClusterReport rep = cluster_users(ck.model, w, k, ec.seed, restarts);
    std::printf("cluster k=%d restarts=%d: silhouette=%.4f davies_bouldin=%.4f purity=%.4f "
                "inertia=%.4f\n",
                rep.k, rep.restarts, rep.silhouette, rep.davies_bouldin, rep.purity,
                rep.inertia);
    if (!out_path.empty()) write_text_file(out_path, to_json(rep).dump(2) + "\n", f.force);
    return 0;
}

inline int cmd_attn(const detail::CommonFlags& f, const std::string& world_path,
                    const std::string& ckpt_path, int layer, int head,
                    const std::string& out_path) {
    Json cfg = detail::load_config(f.config_path);
    World w = load_world(world_path);
    LoadedCheckpoint ck = load_checkpoint(ckpt_path);
    require(ck.model.config().n_pref_tokens > 0,
            "attn: checkpoint has no preference tokens to analyze");
    EvalConfig ec = eval_config_from_json(detail::section(cfg, "eval"));
    ec.seed = detail::resolve_seed(f.seed, ec.seed);
    const int use_layer = layer >= -1 ? layer : ec.attn_layer;
    const int use_head = head >= -1 ? head : ec.attn_head;
    std::vector<std::vector<double>> profiles =
        user_pref_profiles(ck.model, w, use_layer, use_head, ec.seed);
    std::vector<int> groups;
    for (const User& u : w.users) groups.push_back(u.group);
    KlReport rep = group_kl_report(profiles, groups);
    std::printf("attention KL (layer=%d head=%d): intra=%.4f inter=%.4f separation=%.4f "
                "(pairs %ld/%ld)\n",
                use_layer, use_head, rep.intra_mean, rep.inter_mean, rep.separation,
                rep.n_intra_pairs, rep.n_inter_pairs);
    if (!out_path.empty()) write_text_file(out_path, to_json(rep).dump(2) + "\n", f.force);
    return 0;
}

inline int cmd_guide(const detail::CommonFlags& f, const std::string& world_path,
                     const std::string& ckpt_path, int user_id, int item_id, int trials,
                     const std::string& out_path) {
    Json cfg = detail::load_config(f.config_path);
    World w = load_world(world_path);
    LoadedCheckpoint ck = load_checkpoint(ckpt_path);
    GuidanceConfig gc = guidance_config_from_json(detail::section(cfg, "guidance"));
    const std::uint64_t seed =
        detail::resolve_seed(f.seed, derive_seed(w.config.seed, "guide"));
    require(user_id >= 0 && user_id < static_cast<int>(w.users.size()),
            "guide: --user out of range");
    require(trials >= 1, "guide: --trials must be >= 1");

    // Starting items: the requested one, or seeded draws from held-out prompts.
    std::vector<int> starts;
    if (item_id >= 0) {
        require(item_id < static_cast<int>(w.items.size()), "guide: --item out of range");
        starts.assign(static_cast<std::size_t>(trials), item_id);
    } else {
        std::vector<int> pool;
        for (const Item& it : w.items)
            if (w.is_held_out_prompt(it.prompt)) pool.push_back(it.id);
        if (pool.empty())
            for (const Item& it : w.items) pool.push_back(it.id);
        Rng rng(derive_seed(seed, "guide-items"));
        for (int t = 0; t < trials; ++t)
            starts.push_back(pool[static_cast<std::size_t>(rng.uniform_index(pool.size()))]);
    }

    Json trials_json = Json::array();
    double gain_sum = 0.0;
    long improved = 0;
    for (int t = 0; t < trials; ++t) {
        const Item& start = w.item(starts[static_cast<std::size_t>(t)]);
        GuidanceResult r = refine_item(ck.model, w, user_id, start.features, gc,
                                       derive_seed(seed, "order", static_cast<std::uint64_t>(t)));
        gain_sum += r.q_after - r.q_before;
        if (r.q_after > r.q_before) ++improved;
        Json tj = to_json(r);
        tj["start_item"] = start.id;
        trials_json.push_back(std::move(tj));
        std::printf("trial %d: item %d q %.4f -> %.4f (%d steps)\n", t, start.id, r.q_before,
                    r.q_after, r.accepted_steps);
    }
    const double mean_gain = gain_sum / static_cast<double>(trials);
    std::printf("guide user %d: mean gain %.4f, improved %ld/%d\n", user_id, mean_gain,
                improved, trials);
    if (!out_path.empty()) {
        Json out{{"user", user_id},
                 {"trials", std::move(trials_json)},
                 {"mean_gain", mean_gain},
                 {"improved", improved},
                 {"n_trials", trials}};
        write_text_file(out_path, out.dump(2) + "\n", f.force);
    }
    return 0;
}

inline int cmd_ablate(const detail::CommonFlags& f, const std::string& world_path,
                      const std::string& out_dir, bool quiet) {
    Json cfg = detail::load_config(f.config_path);
    World w = load_world(world_path);
    TrainConfig base_tc = train_config_from_json(detail::section(cfg, "train"));
    base_tc.seed = detail::resolve_seed(f.seed, base_tc.seed);
    EvalConfig ec = eval_config_from_json(detail::section(cfg, "eval"));
    ec.seed = detail::resolve_seed(f.seed, ec.seed);

    struct Arm {
        const char* name;
        bool pref_tokens;
        LossWeights weights;
    };
    const Arm arms[] = {
        {"base", false, LossWeights{1.0, 0.0, 0.0}},
        {"contrastive", false, LossWeights{1.0, 1.0, 1.0}},
        {"full", true, LossWeights{1.0, 1.0, 1.0}},
    };

    std::vector<EvalCase> cases =
        make_eval_cases(w, ec.n_cases, ec.n_negatives, ec.case_margin, ec.seed);

    std::string tsv = "arm";
    for (int k : ec.k_list) tsv += "\ttop" + std::to_string(k);
    tsv += "\tpairwise\n";

    Json summary = Json::object();
    for (const Arm& arm : arms) {
        Json mj = detail::section(cfg, "model");
        if (!arm.pref_tokens) mj["n_pref_tokens"] = 0;
        ModelConfig mc = detail::resolve_model_config(mj, w);
        TrainConfig tc = base_tc;
        tc.loss_weights = arm.weights;

        Model model(mc);
        if (!quiet) std::printf("=== arm %s ===\n", arm.name);
        TrainResult res = train(model, w, tc);
        const std::string arm_dir = out_dir + "/" + arm.name;
        save_checkpoint(arm_dir + "/checkpoint.json", model,
                        CheckpointMeta{res.steps_run, w.config.seed, tc.seed}, f.force);
        save_train_log(arm_dir + "/train_log.csv", res.log, f.force);

        EvalReport rep = evaluate_topk(
            w, cases, model_scorer(model, w, derive_seed(ec.seed, "model-ctx")), ec.k_list);
        if (!quiet) detail::print_eval_report(arm.name, rep);
        Json arm_json{{"ranking", to_json(rep)},
                      {"final_loss", res.final_total},
                      {"loss_weights", Json{{"base", arm.weights.base},
                                            {"l_plus", arm.weights.l_plus},
                                            {"l_minus", arm.weights.l_minus}}},
                      {"n_pref_tokens", mc.n_pref_tokens}};
        summary[arm.name] = std::move(arm_json);

        tsv += arm.name;
        for (double v : rep.topk) tsv += "\t" + fmt_double(v);
        tsv += "\t" + fmt_double(rep.pairwise) + "\n";
    }

    write_text_file(out_dir + "/summary.tsv", tsv, f.force);
    write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n", f.force);
    std::printf("ablation summary -> %s/summary.tsv\n", out_dir.c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
    CLI::App app{"synthetic preference-learning workbench"};
    app.require_subcommand(1);

    detail::CommonFlags fw, fv, ft, fe, fc, fa, fg, fb;

    // gen-world
    auto* gen = app.add_subcommand("gen-world", "generate a synthetic world file");
    std::string gen_out;
    gen->add_option("--out", gen_out, "output world JSON")->required();
    detail::add_common(gen, fw);

    // verify
    auto* ver = app.add_subcommand("verify", "check the group-structure contract of a world");
    std::string ver_world, ver_json;
    long ver_probes = 10000, ver_pairs = 10000;
    ver->add_option("--world", ver_world, "world JSON")->required();
    ver->add_option("--probes", ver_probes, "score probes per clause");
    ver->add_option("--pairs", ver_pairs, "decision probes per clause");
    ver->add_option("--json", ver_json, "write the report JSON here");
    detail::add_common(ver, fv);

    // train
    auto* tr = app.add_subcommand("train", "train a model on a world");
    std::string tr_world, tr_out, tr_log;
    bool tr_quiet = false;
    tr->add_option("--world", tr_world, "world JSON")->required();
    tr->add_option("--out", tr_out, "output checkpoint JSON")->required();
    tr->add_option("--log", tr_log, "write the per-step loss CSV here");
    tr->add_flag("--quiet", tr_quiet, "suppress progress lines");
    detail::add_common(tr, ft);

    // eval
    auto* ev = app.add_subcommand("eval", "full evaluation report for a checkpoint");
    std::string ev_world, ev_ckpt, ev_out, ev_csv;
    ev->add_option("--world", ev_world, "world JSON")->required();
    ev->add_option("--ckpt", ev_ckpt, "checkpoint JSON")->required();
    ev->add_option("--out", ev_out, "write the report JSON here");
    ev->add_option("--csv", ev_csv, "write the ranking CSV here");
    detail::add_common(ev, fe);

    // cluster
    auto* cl = app.add_subcommand("cluster", "cluster user embeddings");
    std::string cl_world, cl_ckpt, cl_out;
    int cl_k = 0, cl_restarts = 0;
    cl->add_option("--world", cl_world, "world JSON")->required();
    cl->add_option("--ckpt", cl_ckpt, "checkpoint JSON")->required();
    cl->add_option("--k", cl_k, "cluster count (default: true group count)");
    cl->add_option("--restarts", cl_restarts, "k-means restarts");
    cl->add_option("--out", cl_out, "write the report JSON here");
    detail::add_common(cl, fc);

    // attn
    auto* at = app.add_subcommand("attn", "attention-profile divergence by group");
    std::string at_world, at_ckpt, at_out;
    int at_layer = -2, at_head = -2;  // -2 = inherit from config
    at->add_option("--world", at_world, "world JSON")->required();
    at->add_option("--ckpt", at_ckpt, "checkpoint JSON")->required();
    at->add_option("--layer", at_layer, "layer index (-1 = last)");
    at->add_option("--head", at_head, "head index (-1 = average)");
    at->add_option("--out", at_out, "write the report JSON here");
    detail::add_common(at, fa);

    // guide
    auto* gd = app.add_subcommand("guide", "refine item features toward a user's taste");
    std::string gd_world, gd_ckpt, gd_out;
    int gd_user = 0, gd_item = -1, gd_trials = 1;
    gd->add_option("--world", gd_world, "world JSON")->required();
    gd->add_option("--ckpt", gd_ckpt, "checkpoint JSON")->required();
    gd->add_option("--user", gd_user, "user id (default 0)");
    gd->add_option("--item", gd_item, "starting item id (default: seeded held-out draws)");
    gd->add_option("--trials", gd_trials, "number of refinement trials");
    gd->add_option("--out", gd_out, "write the trial report JSON here");
    detail::add_common(gd, fg);

    // ablate
    auto* ab = app.add_subcommand("ablate", "train and compare the three loss/token arms");
    std::string ab_world, ab_dir;
    bool ab_quiet = false;
    ab->add_option("--world", ab_world, "world JSON")->required();
    ab->add_option("--out-dir", ab_dir, "output directory")->required();
    ab->add_flag("--quiet", ab_quiet, "suppress progress lines");
    detail::add_common(ab, fb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_world(fw, gen_out);
        if (ver->parsed()) return cmd_verify(fv, ver_world, ver_probes, ver_pairs, ver_json);
        if (tr->parsed()) return cmd_train(ft, tr_world, tr_out, tr_log, tr_quiet);
        if (ev->parsed()) return cmd_eval(fe, ev_world, ev_ckpt, ev_out, ev_csv);
        if (cl->parsed()) return cmd_cluster(fc, cl_world, cl_ckpt, cl_k, cl_restarts, cl_out);
        if (at->parsed()) return cmd_attn(fa, at_world, at_ckpt, at_layer, at_head, at_out);
        if (gd->parsed())
            return cmd_guide(fg, gd_world, gd_ckpt, gd_user, gd_item, gd_trials, gd_out);
        if (ab->parsed()) return cmd_ablate(fb, ab_world, ab_dir, ab_quiet);
        std::fprintf(stderr, "error: no subcommand given\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

inline int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("prefforge");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace prefforge::cli
