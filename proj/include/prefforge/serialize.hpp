#pragma once

// JSON and CSV persistence: world files, model checkpoints, training logs,
// and report serialization.  All numeric output uses shortest round-trip
// formatting, so save/load cycles are bit-exact and reruns are byte-identical.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "prefforge/common.hpp"
#include "prefforge/evaluator.hpp"
#include "prefforge/guidance.hpp"
#include "prefforge/model.hpp"
#include "prefforge/tensor.hpp"
#include "prefforge/trainer.hpp"
#include "prefforge/world.hpp"

namespace prefforge {

using Json = nlohmann::json;

inline constexpr const char* kWorldFormat = "prefforge-world";
inline constexpr const char* kCheckpointFormat = "prefforge-checkpoint";

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

namespace detail {

inline void check_keys(const Json& j, const std::vector<std::string>& allowed,
                       const std::string& where) {
    require(j.is_object(), where + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(where + ": unknown field \"" + key + "\"");
    }
}

template <typename T>
T get_or(const Json& j, const char* key, T def, const std::string& where) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

// Accepts a scalar (broadcast) or an array for per-group bounds.
inline std::vector<double> get_group_vec(const Json& j, const char* key,
                                         std::vector<double> def, const std::string& where) {
    if (!j.contains(key)) return def;
    const Json& v = j.at(key);
    if (v.is_number()) return {v.get<double>()};
    try {
        return v.get<std::vector<double>>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

// Accepts a scalar (broadcast) or a full matrix for pairwise bounds.
inline std::vector<std::vector<double>> get_pair_mat(const Json& j, const char* key,
                                                     std::vector<std::vector<double>> def,
                                                     const std::string& where) {
    if (!j.contains(key)) return def;
    const Json& v = j.at(key);
    if (v.is_number()) return {{v.get<double>()}};
    try {
        return v.get<std::vector<std::vector<double>>>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

}  // namespace detail

// Shortest round-trip decimal form of a double (used for CSV/TSV output).
inline std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes atomically (temp file + rename).  Refuses to replace an existing
// file unless `overwrite` is set.
inline void write_text_file(const std::string& path, const std::string& content,
                            bool overwrite) {
    namespace fs = std::filesystem;
    if (!overwrite && fs::exists(path))
        throw ConfigError("refusing to overwrite existing file: " + path +
                          " (pass --force to replace)");
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw LoadError("cannot write file: " + tmp.string());
        out << content;
        if (!out.good()) throw LoadError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw LoadError(what + ": invalid JSON: " + e.what());
    }
}

inline Json load_json_file(const std::string& path) {
    return parse_json_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

inline Json tensor_to_json(const Tensor2& t) {
    return Json{{"rows", t.rows()}, {"cols", t.cols()}, {"data", t.data()}};
}

inline Tensor2 tensor_from_json(const Json& j, const std::string& where) {
    try {
        const std::size_t rows = j.at("rows").get<std::size_t>();
        const std::size_t cols = j.at("cols").get<std::size_t>();
        std::vector<double> data = j.at("data").get<std::vector<double>>();
        require(data.size() == rows * cols, where + ": tensor data length mismatch");
        return Tensor2(rows, cols, std::move(data));
    } catch (const Json::exception& e) {
        throw LoadError(where + ": bad tensor: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Configs
// ---------------------------------------------------------------------------

inline Json to_json(const WorldConfig& c) {
    return Json{{"num_groups", c.num_groups},
                {"feature_dim", c.feature_dim},
                {"users_per_group", c.users_per_group},
                {"num_prompts", c.num_prompts},
                {"items_per_prompt", c.items_per_prompt},
                {"held_out_prompts", c.held_out_prompts},
                {"rho", c.rho},
                {"eps", c.eps},
                {"alpha", c.alpha},
                {"delta", c.delta},
                {"beta", c.beta},
                {"prototype_radius", c.prototype_radius},
                {"sharpness", c.sharpness},
                {"n_ref", c.n_ref},
                {"min_margin", c.min_margin},
                {"seed", c.seed}};
}

inline WorldConfig world_config_from_json(const Json& j, const std::string& where = "world") {
    detail::check_keys(j,
                       {"num_groups", "feature_dim", "users_per_group", "num_prompts",
                        "items_per_prompt", "held_out_prompts", "rho", "eps", "alpha", "delta",
                        "beta", "prototype_radius", "sharpness", "n_ref", "min_margin", "seed"},
                       where);
    WorldConfig c;
    c.num_groups = detail::get_or(j, "num_groups", c.num_groups, where);
    c.feature_dim = detail::get_or(j, "feature_dim", c.feature_dim, where);
    c.users_per_group = detail::get_or(j, "users_per_group", c.users_per_group, where);
    c.num_prompts = detail::get_or(j, "num_prompts", c.num_prompts, where);
    c.items_per_prompt = detail::get_or(j, "items_per_prompt", c.items_per_prompt, where);
    c.held_out_prompts = detail::get_or(j, "held_out_prompts", c.held_out_prompts, where);
    c.rho = detail::get_group_vec(j, "rho", c.rho, where);
    c.eps = detail::get_group_vec(j, "eps", c.eps, where);
    c.alpha = detail::get_group_vec(j, "alpha", c.alpha, where);
    c.delta = detail::get_pair_mat(j, "delta", c.delta, where);
    c.beta = detail::get_pair_mat(j, "beta", c.beta, where);
    c.prototype_radius = detail::get_or(j, "prototype_radius", c.prototype_radius, where);
    c.sharpness = detail::get_or(j, "sharpness", c.sharpness, where);
    c.n_ref = detail::get_or(j, "n_ref", c.n_ref, where);
    c.min_margin = detail::get_or(j, "min_margin", c.min_margin, where);
    c.seed = detail::get_or(j, "seed", c.seed, where);
    c.validate();
    return c;
}

inline Json to_json(const ModelConfig& c) {
    return Json{{"feature_dim", c.feature_dim},
                {"d_model", c.d_model},
                {"n_layers", c.n_layers},
                {"n_heads", c.n_heads},
                {"mlp_hidden", c.mlp_hidden},
                {"n_pref_tokens", c.n_pref_tokens},
                {"tokens_per_item", c.tokens_per_item},
                {"max_history", c.max_history},
                {"pref_in_self_attention", c.pref_in_self_attention},
                {"pref_cross_attention", c.pref_cross_attention},
                {"init_seed", c.init_seed}};
}

inline ModelConfig model_config_from_json(const Json& j, const std::string& where = "model") {
    detail::check_keys(j,
                       {"feature_dim", "d_model", "n_layers", "n_heads", "mlp_hidden",
                        "n_pref_tokens", "tokens_per_item", "max_history",
                        "pref_in_self_attention", "pref_cross_attention", "init_seed"},
                       where);
    ModelConfig c;
    c.feature_dim = detail::get_or(j, "feature_dim", c.feature_dim, where);
    c.d_model = detail::get_or(j, "d_model", c.d_model, where);
    c.n_layers = detail::get_or(j, "n_layers", c.n_layers, where);
    c.n_heads = detail::get_or(j, "n_heads", c.n_heads, where);
    c.mlp_hidden = detail::get_or(j, "mlp_hidden", c.mlp_hidden, where);
    c.n_pref_tokens = detail::get_or(j, "n_pref_tokens", c.n_pref_tokens, where);
    c.tokens_per_item = detail::get_or(j, "tokens_per_item", c.tokens_per_item, where);
    c.max_history = detail::get_or(j, "max_history", c.max_history, where);
    c.pref_in_self_attention =
        detail::get_or(j, "pref_in_self_attention", c.pref_in_self_attention, where);
    c.pref_cross_attention =
        detail::get_or(j, "pref_cross_attention", c.pref_cross_attention, where);
    c.init_seed = detail::get_or(j, "init_seed", c.init_seed, where);
    c.validate();
    return c;
}

inline Json to_json(const TrainConfig& c) {
    return Json{{"steps", c.steps},
                {"batch_size", c.batch_size},
                {"lr", c.adam.lr},
                {"beta1", c.adam.beta1},
                {"beta2", c.adam.beta2},
                {"adam_eps", c.adam.eps},
                {"weight_decay", c.adam.weight_decay},
                {"clip_norm", c.clip_norm},
                {"loss_weights",
                 Json{{"base", c.loss_weights.base},
                      {"l_plus", c.loss_weights.l_plus},
                      {"l_minus", c.loss_weights.l_minus}}},
                {"freeze_pref_steps", c.freeze_pref_steps},
                {"seed", c.seed},
                {"log_every", c.log_every}};
}

inline TrainConfig train_config_from_json(const Json& j, const std::string& where = "train") {
    detail::check_keys(j,
                       {"steps", "batch_size", "lr", "beta1", "beta2", "adam_eps",
                        "weight_decay", "clip_norm", "loss_weights", "freeze_pref_steps",
                        "seed", "log_every"},
                       where);
    TrainConfig c;
    c.steps = detail::get_or(j, "steps", c.steps, where);
    c.batch_size = detail::get_or(j, "batch_size", c.batch_size, where);
    c.adam.lr = detail::get_or(j, "lr", c.adam.lr, where);
    c.adam.beta1 = detail::get_or(j, "beta1", c.adam.beta1, where);
    c.adam.beta2 = detail::get_or(j, "beta2", c.adam.beta2, where);
    c.adam.eps = detail::get_or(j, "adam_eps", c.adam.eps, where);
    c.adam.weight_decay = detail::get_or(j, "weight_decay", c.adam.weight_decay, where);
    c.clip_norm = detail::get_or(j, "clip_norm", c.clip_norm, where);
    if (j.contains("loss_weights")) {
        const Json& w = j.at("loss_weights");
        detail::check_keys(w, {"base", "l_plus", "l_minus"}, where + ".loss_weights");
        c.loss_weights.base = detail::get_or(w, "base", c.loss_weights.base, where);
        c.loss_weights.l_plus = detail::get_or(w, "l_plus", c.loss_weights.l_plus, where);
        c.loss_weights.l_minus = detail::get_or(w, "l_minus", c.loss_weights.l_minus, where);
    }
    c.freeze_pref_steps = detail::get_or(j, "freeze_pref_steps", c.freeze_pref_steps, where);
    c.seed = detail::get_or(j, "seed", c.seed, where);
    c.log_every = detail::get_or(j, "log_every", c.log_every, where);
    c.validate();
    return c;
}

inline Json to_json(const EvalConfig& c) {
    return Json{{"n_cases", c.n_cases},
                {"n_negatives", c.n_negatives},
                {"case_margin", c.case_margin},
                {"k_list", c.k_list},
                {"tau", c.tau},
                {"cluster_k", c.cluster_k},
                {"restarts", c.restarts},
                {"nref_list", c.nref_list},
                {"attn_layer", c.attn_layer},
                {"attn_head", c.attn_head},
                {"seed", c.seed}};
}

inline EvalConfig eval_config_from_json(const Json& j, const std::string& where = "eval") {
    detail::check_keys(j,
                       {"n_cases", "n_negatives", "case_margin", "k_list", "tau", "cluster_k",
                        "restarts", "nref_list", "attn_layer", "attn_head", "seed"},
                       where);
    EvalConfig c;
    c.n_cases = detail::get_or(j, "n_cases", c.n_cases, where);
    c.n_negatives = detail::get_or(j, "n_negatives", c.n_negatives, where);
    c.case_margin = detail::get_or(j, "case_margin", c.case_margin, where);
    c.k_list = detail::get_or(j, "k_list", c.k_list, where);
    c.tau = detail::get_or(j, "tau", c.tau, where);
    c.cluster_k = detail::get_or(j, "cluster_k", c.cluster_k, where);
    c.restarts = detail::get_or(j, "restarts", c.restarts, where);
    c.nref_list = detail::get_or(j, "nref_list", c.nref_list, where);
    c.attn_layer = detail::get_or(j, "attn_layer", c.attn_layer, where);
    c.attn_head = detail::get_or(j, "attn_head", c.attn_head, where);
    c.seed = detail::get_or(j, "seed", c.seed, where);
    c.validate();
    return c;
}

inline Json to_json(const GuidanceConfig& c) {
    return Json{{"steps", c.steps},          {"weight", c.weight},
                {"step_size", c.step_size},  {"max_halvings", c.max_halvings},
                {"norm_cap", c.norm_cap},    {"min_improve", c.min_improve}};
}

inline GuidanceConfig guidance_config_from_json(const Json& j,
                                                const std::string& where = "guidance") {
    detail::check_keys(
        j, {"steps", "weight", "step_size", "max_halvings", "norm_cap", "min_improve"}, where);
    GuidanceConfig c;
    c.steps = detail::get_or(j, "steps", c.steps, where);
    c.weight = detail::get_or(j, "weight", c.weight, where);
    c.step_size = detail::get_or(j, "step_size", c.step_size, where);
    c.max_halvings = detail::get_or(j, "max_halvings", c.max_halvings, where);
    c.norm_cap = detail::get_or(j, "norm_cap", c.norm_cap, where);
    c.min_improve = detail::get_or(j, "min_improve", c.min_improve, where);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// World files
// ---------------------------------------------------------------------------

inline Json world_to_json(const World& w) {
    Json groups = Json::array();
    for (const GroupSpec& g : w.groups)
        groups.push_back(Json{{"id", g.id},
                              {"prototype", g.prototype},
                              {"rho", g.rho},
                              {"eps", g.eps},
                              {"alpha", g.alpha}});
    Json users = Json::array();
    for (const User& u : w.users)
        users.push_back(Json{{"id", u.id}, {"group", u.group}, {"pref", u.pref}});
    Json items = Json::array();
    for (const Item& it : w.items)
        items.push_back(Json{{"id", it.id}, {"prompt", it.prompt}, {"features", it.features}});
    Json histories = Json::array();
    for (const auto& hist : w.histories) {
        Json entries = Json::array();
        for (const HistoryEntry& h : hist)
            entries.push_back(
                Json{{"pos", h.pos_item}, {"neg", h.neg_item}, {"prompt", h.prompt}});
        histories.push_back(std::move(entries));
    }
    return Json{{"format", kWorldFormat}, {"version", kWorldVersion},
                {"config", to_json(w.config)}, {"groups", std::move(groups)},
                {"users", std::move(users)},   {"items", std::move(items)},
                {"histories", std::move(histories)}};
}

inline World world_from_json(const Json& j, const std::string& where) {
    try {
        require(j.is_object(), where + ": expected a JSON object");
        const std::string format = detail::get_or<std::string>(j, "format", "", where);
        if (format != kWorldFormat)
            throw LoadError(where + ": not a world file (format \"" + format + "\")");
        const int version = detail::get_or(j, "version", -1, where);
        if (version != kWorldVersion)
            throw LoadError(where + ": unsupported world version " + std::to_string(version) +
                            " (expected " + std::to_string(kWorldVersion) + ")");
        World w;
        w.config = world_config_from_json(j.at("config"), where + ".config");
        for (const Json& gj : j.at("groups")) {
            GroupSpec g;
            g.id = gj.at("id").get<int>();
            g.prototype = gj.at("prototype").get<std::vector<double>>();
            g.rho = gj.at("rho").get<double>();
            g.eps = gj.at("eps").get<double>();
            g.alpha = gj.at("alpha").get<double>();
            w.groups.push_back(std::move(g));
        }
        for (const Json& uj : j.at("users")) {
            User u;
            u.id = uj.at("id").get<int>();
            u.group = uj.at("group").get<int>();
            u.pref = uj.at("pref").get<std::vector<double>>();
            w.users.push_back(std::move(u));
        }
        for (const Json& ij : j.at("items")) {
            Item it;
            it.id = ij.at("id").get<int>();
            it.prompt = ij.at("prompt").get<int>();
            it.features = ij.at("features").get<std::vector<double>>();
            w.items.push_back(std::move(it));
        }
        for (const Json& hj : j.at("histories")) {
            std::vector<HistoryEntry> hist;
            for (const Json& ej : hj)
                hist.push_back(HistoryEntry{ej.at("pos").get<int>(), ej.at("neg").get<int>(),
                                            ej.at("prompt").get<int>()});
            w.histories.push_back(std::move(hist));
        }

        // Structural integrity.
        require(static_cast<int>(w.groups.size()) == w.config.num_groups,
                where + ": group count mismatch");
        require(w.histories.size() == w.users.size(), where + ": history count mismatch");
        for (std::size_t i = 0; i < w.groups.size(); ++i) {
            require(w.groups[i].id == static_cast<int>(i), where + ": group ids not sequential");
            require(static_cast<int>(w.groups[i].prototype.size()) == w.config.feature_dim,
                    where + ": prototype dimension mismatch");
        }
        for (std::size_t i = 0; i < w.users.size(); ++i) {
            const User& u = w.users[i];
            require(u.id == static_cast<int>(i), where + ": user ids not sequential");
            require(u.group >= 0 && u.group < w.config.num_groups,
                    where + ": user group out of range");
            require(static_cast<int>(u.pref.size()) == w.config.feature_dim,
                    where + ": user taste dimension mismatch");
        }
        for (std::size_t i = 0; i < w.items.size(); ++i) {
            const Item& it = w.items[i];
            require(it.id == static_cast<int>(i), where + ": item ids not sequential");
            require(it.prompt >= 0 && it.prompt < w.config.num_prompts,
                    where + ": item prompt out of range");
            require(static_cast<int>(it.features.size()) == w.config.feature_dim,
                    where + ": item feature dimension mismatch");
        }
        for (const auto& hist : w.histories) {
            for (const HistoryEntry& h : hist) {
                require(h.pos_item != h.neg_item, where + ": history pair repeats an item");
                require(w.item(h.pos_item).prompt == h.prompt &&
                            w.item(h.neg_item).prompt == h.prompt,
                        where + ": history entry prompt mismatch");
            }
        }
        return w;
    } catch (const Json::exception& e) {
        throw LoadError(where + ": malformed world file: " + e.what());
    }
}

inline void save_world(const std::string& path, const World& w, bool overwrite) {
    write_text_file(path, world_to_json(w).dump(2) + "\n", overwrite);
}

inline World load_world(const std::string& path) {
    return world_from_json(load_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct CheckpointMeta {
    long step = 0;
    std::uint64_t world_seed = 0;
    std::uint64_t train_seed = 0;
};

inline Json checkpoint_to_json(const Model& m, const CheckpointMeta& meta) {
    Json params = Json::object();
    for (const auto& [name, tensor] : m.parameters()) params[name] = tensor_to_json(*tensor);
    return Json{{"format", kCheckpointFormat},
                {"version", kCheckpointVersion},
                {"model_config", to_json(m.config())},
                {"step", meta.step},
                {"seeds", Json{{"world", meta.world_seed}, {"train", meta.train_seed}}},
                {"params", std::move(params)}};
}

inline void save_checkpoint(const std::string& path, const Model& m, const CheckpointMeta& meta,
                            bool overwrite) {
    write_text_file(path, checkpoint_to_json(m, meta).dump(2) + "\n", overwrite);
}

struct LoadedCheckpoint {
    Model model;
    CheckpointMeta meta;
};

inline LoadedCheckpoint checkpoint_from_json(const Json& j, const std::string& where) {
    try {
        require(j.is_object(), where + ": expected a JSON object");
        const std::string format = detail::get_or<std::string>(j, "format", "", where);
        if (format != kCheckpointFormat)
            throw LoadError(where + ": not a checkpoint file (format \"" + format + "\")");
        const int version = detail::get_or(j, "version", -1, where);
        if (version != kCheckpointVersion)
            throw LoadError(where + ": unsupported checkpoint version " +
                            std::to_string(version) + " (expected " +
                            std::to_string(kCheckpointVersion) + ")");
        ModelConfig cfg = model_config_from_json(j.at("model_config"), where + ".model_config");
        LoadedCheckpoint out{Model(cfg), CheckpointMeta{}};
        out.meta.step = detail::get_or<long>(j, "step", 0, where);
        if (j.contains("seeds")) {
            const Json& s = j.at("seeds");
            out.meta.world_seed = detail::get_or<std::uint64_t>(s, "world", 0, where);
            out.meta.train_seed = detail::get_or<std::uint64_t>(s, "train", 0, where);
        }
        const Json& params = j.at("params");
        require(params.is_object(), where + ": params must be an object");
        auto named = out.model.parameters();
        require(params.size() == named.size(),
                where + ": checkpoint has " + std::to_string(params.size()) +
                    " parameter tensors, model expects " + std::to_string(named.size()));
        for (auto& [name, tensor] : named) {
            if (!params.contains(name))
                throw LoadError(where + ": missing parameter \"" + name + "\"");
            Tensor2 loaded = tensor_from_json(params.at(name), where + ".params." + name);
            require(loaded.same_shape(*tensor),
                    where + ": parameter \"" + name + "\" has wrong shape");
            *tensor = std::move(loaded);
        }
        return out;
    } catch (const Json::exception& e) {
        throw LoadError(where + ": malformed checkpoint: " + e.what());
    }
}

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    return checkpoint_from_json(load_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Training log CSV
// ---------------------------------------------------------------------------

inline std::string train_log_csv(const std::vector<TrainLogRow>& rows) {
    std::string out = "step,total,base,l_plus,l_minus\n";
    for (const TrainLogRow& r : rows) {
        out += std::to_string(r.step);
        out += ',';
        out += fmt_double(r.total);
        out += ',';
        out += fmt_double(r.base);
        out += ',';
        out += fmt_double(r.l_plus);
        out += ',';
        out += fmt_double(r.l_minus);
        out += '\n';
    }
    return out;
}

inline void save_train_log(const std::string& path, const std::vector<TrainLogRow>& rows,
                           bool overwrite) {
    write_text_file(path, train_log_csv(rows), overwrite);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json to_json(const EvalReport& r) {
    return Json{{"k_list", r.k_list},   {"topk", r.topk},
                {"pairwise", r.pairwise}, {"n_cases", r.n_cases},
                {"n_pairs", r.n_pairs},   {"tie_cases", r.tie_cases}};
}

inline Json to_json(const MarginAudit& a) {
    return Json{{"tau", a.tau},
                {"n_scored", a.n_scored},
                {"n_confident_correct", a.n_confident_correct},
                {"n_confident_wrong", a.n_confident_wrong},
                {"n_ambiguous", a.n_ambiguous},
                {"frac_confident_correct", a.frac_confident_correct},
                {"frac_confident_wrong", a.frac_confident_wrong},
                {"frac_ambiguous", a.frac_ambiguous}};
}

inline Json to_json(const ClusterReport& r) {
    return Json{{"k", r.k},
                {"restarts", r.restarts},
                {"assignment", r.assignment},
                {"inertia", r.inertia},
                {"silhouette", r.silhouette},
                {"davies_bouldin", r.davies_bouldin},
                {"purity", r.purity}};
}

inline Json to_json(const KlReport& r) {
    return Json{{"intra_mean", r.intra_mean},
                {"inter_mean", r.inter_mean},
                {"n_intra_pairs", r.n_intra_pairs},
                {"n_inter_pairs", r.n_inter_pairs},
                {"separation", r.separation}};
}

inline Json to_json(const std::vector<SweepRow>& rows) {
    Json arr = Json::array();
    for (const SweepRow& r : rows)
        arr.push_back(Json{{"n_ref", r.n_ref}, {"report", to_json(r.report)}});
    return arr;
}

inline Json to_json(const DistanceScan& s) {
    return Json{{"max_radius_excess", s.max_radius_excess},
                {"min_inter_slack", s.min_inter_slack},
                {"radius_violations", s.radius_violations},
                {"inter_violations", s.inter_violations},
                {"pass", s.pass}};
}

inline Json to_json(const AssumptionReport& r) {
    Json intra = Json::array();
    for (const IntraGroupStats& s : r.intra)
        intra.push_back(Json{{"group", s.group},
                             {"eps_hat", s.eps_hat},
                             {"alpha_hat", s.alpha_hat},
                             {"alpha_ci", s.alpha_ci},
                             {"n_score", s.n_score},
                             {"n_decision", s.n_decision},
                             {"eps_ok", s.eps_ok},
                             {"alpha_ok", s.alpha_ok}});
    Json inter = Json::array();
    for (const InterGroupStats& s : r.inter)
        inter.push_back(Json{{"group_a", s.group_a},
                             {"group_b", s.group_b},
                             {"score_gap_hat", s.score_gap_hat},
                             {"beta_hat", s.beta_hat},
                             {"beta_ci", s.beta_ci},
                             {"n_score", s.n_score},
                             {"n_decision", s.n_decision},
                             {"score_ok", s.score_ok},
                             {"beta_ok", s.beta_ok}});
    return Json{{"geometry", to_json(r.geometry)},
                {"intra", std::move(intra)},
                {"inter", std::move(inter)},
                {"all_pass", r.all_pass}};
}

inline Json to_json(const GuidanceResult& r) {
    Json trace = Json::array();
    for (const GuidanceStep& s : r.trace)
        trace.push_back(Json{{"step", s.step},
                             {"q", s.q},
                             {"objective", s.objective},
                             {"step_size", s.step_size}});
    return Json{{"features", r.features},
                {"q_before", r.q_before},
                {"q_after", r.q_after},
                {"accepted_steps", r.accepted_steps},
                {"hit_step_budget", r.hit_step_budget},
                {"trace", std::move(trace)}};
}

// metric,value CSV for a ranking report.
inline std::string eval_report_csv(const EvalReport& r) {
    std::string out = "metric,value\n";
    for (std::size_t i = 0; i < r.k_list.size(); ++i) {
        out += "top" + std::to_string(r.k_list[i]) + ",";
        out += fmt_double(r.topk[i]);
        out += '\n';
    }
    out += "pairwise," + fmt_double(r.pairwise) + "\n";
    out += "n_cases," + std::to_string(r.n_cases) + "\n";
    out += "n_pairs," + std::to_string(r.n_pairs) + "\n";
    out += "tie_cases," + std::to_string(r.tie_cases) + "\n";
    return out;
}

}  // namespace prefforge
