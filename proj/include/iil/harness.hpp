#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iil/adversarial.hpp"
#include "iil/checkpoint.hpp"
#include "iil/config.hpp"
#include "iil/demo.hpp"
#include "iil/envs.hpp"
#include "iil/girl.hpp"
#include "iil/icm.hpp"
#include "iil/metrics.hpp"
#include "iil/plot.hpp"
#include "iil/policy.hpp"
#include "iil/ppo.hpp"

namespace iil {

struct HarnessPaths {
    std::string dir;

    std::string expert_ckpt() const { return dir + "/expert.ckpt"; }
    std::string expert_metrics() const { return dir + "/expert_metrics.csv"; }
    std::string demo_file() const { return dir + "/demo.bin"; }
    std::string reward_ckpt() const { return dir + "/reward.ckpt"; }
    std::string reward_metrics() const { return dir + "/reward_metrics.csv"; }
    std::string imitate_metrics(const std::string& method, std::uint64_t seed,
                                const std::string& tag = "") const {
        return dir + "/imitate_" + method + tag + "_seed" + std::to_string(seed) + ".csv";
    }
    std::string policy_ckpt(const std::string& method, std::uint64_t seed,
                            const std::string& tag = "") const {
        return dir + "/policy_" + method + tag + "_seed" + std::to_string(seed) + ".ckpt";
    }
    std::string ablate_csv() const { return dir + "/ablate_beta.csv"; }
    std::string curves_svg() const { return dir + "/curves.svg"; }
    std::string eval_csv(const std::string& method, std::uint64_t seed) const {
        return dir + "/eval_" + method + "_seed" + std::to_string(seed) + ".csv";
    }

    void ensure_dir() const { std::filesystem::create_directories(dir); }
};

inline std::unique_ptr<Env> make_env(const ExperimentConfig& cfg) {
    if (cfg.env.id == "grid_hazard") {
        GridHazardConfig g;
        g.width = cfg.env.width;
        g.height = cfg.env.height;
        g.pellets = cfg.env.pellets;
        g.hazards = cfg.env.hazards;
        g.lives = cfg.env.lives;
        g.max_steps = cfg.env.max_steps;
        g.fixed_layout_seed = cfg.env.layout_seed;
        return std::make_unique<GridHazardEnv>(g);
    }
    if (cfg.env.id == "pendulum") {
        PendulumConfig p;
        p.max_steps = cfg.env.max_steps;
        return std::make_unique<PendulumEnv>(p);
    }
    throw ConfigError("unknown env id '" + cfg.env.id + "'");
}

inline VecEnv make_vec_env(const ExperimentConfig& cfg, std::size_t n,
                           std::uint64_t master_seed) {
    std::vector<std::unique_ptr<Env>> envs;
    for (std::size_t i = 0; i < n; ++i) envs.push_back(make_env(cfg));
    return VecEnv(std::move(envs), master_seed);
}

inline PolicyArch policy_arch(const ExperimentConfig::PpoBlock& block) {
    return PolicyArch{{block.hidden, block.hidden}, Activation::tanh};
}

inline PpoConfig ppo_config(const ExperimentConfig::PpoBlock& block) {
    PpoConfig c;
    c.lr = block.lr;
    c.clip_eps = block.clip_eps;
    c.entropy_coef = block.entropy_coef;
    c.value_coef = block.value_coef;
    c.gae_lambda = block.gae_lambda;
    c.gamma = block.gamma;
    c.horizon = block.horizon;
    c.num_envs = block.num_envs;
    c.epochs_per_update = block.epochs_per_update;
    c.minibatches = block.minibatches;
    return c;
}

inline GirlConfig girl_config(const ExperimentConfig& cfg) {
    GirlConfig g;
    g.alpha = cfg.method.girl_alpha;
    g.lambda = cfg.method.girl_lambda;
    g.beta = cfg.method.girl_beta;
    g.learned_prior = cfg.method.girl_prior == "learned";
    g.hidden = {cfg.method.reward_hidden, cfg.method.reward_hidden};
    g.activation = cfg.discrete_env() ? Activation::leaky_relu : Activation::tanh;
    return g;
}

inline IcmConfig icm_config(const ExperimentConfig& cfg) {
    IcmConfig c;
    c.lambda = cfg.method.icm_lambda;
    c.feature_dim = cfg.method.icm_feature_dim;
    c.hidden = {cfg.method.reward_hidden, cfg.method.reward_hidden};
    c.activation = cfg.discrete_env() ? Activation::leaky_relu : Activation::tanh;
    return c;
}

inline DiscConfig disc_config(const ExperimentConfig& cfg) {
    DiscConfig d;
    d.vail = cfg.method.name == "vail";
    d.i_c = cfg.method.vail_i_c;
    d.dual_step = cfg.method.vail_dual_step;
    d.bottleneck_dim = cfg.method.vail_bottleneck_dim;
    d.hidden = {cfg.method.reward_hidden, cfg.method.reward_hidden};
    d.activation = cfg.discrete_env() ? Activation::leaky_relu : Activation::tanh;
    return d;
}

// ---------------------------------------------------------------------------
// Shared PPO stage loop with periodic greedy evaluation rows.
// ---------------------------------------------------------------------------

struct PpoStageResult {
    double final_eval_mean = 0.0;
    std::size_t updates = 0;
    std::size_t rows = 0;
};

using AfterUpdateHook = std::function<void(const RolloutBatch&, std::size_t)>;

inline PpoStageResult run_ppo_stage(const ExperimentConfig& cfg,
                                    const ExperimentConfig::PpoBlock& block, PolicyNet& policy,
                                    RewardSource* source, bool standardize_rewards,
                                    MetricsWriter& metrics, std::uint64_t master_seed,
                                    const std::string& stage,
                                    const AfterUpdateHook& after_update = {}) {
    const PpoConfig pcfg = ppo_config(block);
    pcfg.validate();
    VecEnv vec = make_vec_env(cfg, pcfg.num_envs, derive_seed(master_seed, stage + "-envs", 0));
    Rng rollout_rng(derive_seed(master_seed, stage + "-rollout", 0));
    AdamState adam(pcfg.lr, policy.params("policy"));
    RewardStandardizer standardizer(standardize_rewards && source != nullptr, pcfg.gamma,
                                    pcfg.num_envs);
    std::unique_ptr<Env> eval_env = make_env(cfg);

    const std::size_t steps_per_update = pcfg.horizon * pcfg.num_envs;
    const std::size_t updates = block.total_steps / std::max<std::size_t>(1, steps_per_update);
    PpoStageResult result;
    result.updates = updates;

    auto eval_mean = [&](std::size_t update) {
        std::vector<std::uint64_t> seeds{derive_seed(master_seed, stage + "-eval", update)};
        return evaluate(policy, *eval_env, block.eval_episodes, seeds).mean;
    };

    for (std::size_t u = 1; u <= updates; ++u) {
        RolloutBatch batch = collect_rollout(
            policy, vec, source, pcfg.horizon,
            standardizer.enabled() ? &standardizer : nullptr, rollout_rng);
        gae(batch, pcfg.gamma, pcfg.gae_lambda);
        UpdateStats stats = ppo_update(policy, batch, pcfg, adam, rollout_rng);
        if (after_update) after_update(batch, u);

        if (u % block.eval_interval == 0 || u == updates) {
            MetricsRow row;
            row.step = u * steps_per_update;
            row.update = u;
            row.mean_intrinsic_reward = batch.mean_reward();
            row.mean_true_return = eval_mean(u);
            row.loss_recon = stats.value_loss;
            row.loss_kl = stats.entropy;
            row.loss_policy = stats.policy_loss;
            row.seed = master_seed;
            metrics.write(row);
            ++result.rows;
            result.final_eval_mean = row.mean_true_return;
        }
    }
    if (updates == 0) {
        MetricsRow row;
        row.seed = master_seed;
        row.mean_true_return = eval_mean(0);
        metrics.write(row);
        ++result.rows;
        result.final_eval_mean = row.mean_true_return;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Pipeline commands. Artifacts live under the configured output directory
// with fixed names, so stages compose.
// ---------------------------------------------------------------------------

inline double cmd_expert_train(const ExperimentConfig& cfg, std::uint64_t seed) {
    HarnessPaths paths{cfg.output_dir};
    paths.ensure_dir();
    std::unique_ptr<Env> env = make_env(cfg);
    Rng init(derive_seed(seed, "expert-init", 0));
    PolicyNet policy(env->spec().state_dim, env->spec().action_space, policy_arch(cfg.expert),
                     init);
    MetricsWriter metrics(paths.expert_metrics());
    PpoStageResult r =
        run_ppo_stage(cfg, cfg.expert, policy, nullptr, false, metrics, seed, "expert");
    save_checkpoint(paths.expert_ckpt(), policy.params("policy"));
    std::cout << "expert-train: " << r.updates << " updates, final eval mean "
              << r.final_eval_mean << "\n";
    return r.final_eval_mean;
}

inline PolicyNet load_policy(const ExperimentConfig& cfg,
                             const ExperimentConfig::PpoBlock& block, const std::string& path) {
    std::unique_ptr<Env> env = make_env(cfg);
    Rng dummy(0);
    PolicyNet policy(env->spec().state_dim, env->spec().action_space, policy_arch(block), dummy);
    restore_params(load_checkpoint(path), policy.params("policy"));
    return policy;
}

inline Demonstration cmd_record_demo(const ExperimentConfig& cfg, std::uint64_t seed) {
    HarnessPaths paths{cfg.output_dir};
    paths.ensure_dir();
    PolicyNet policy = load_policy(cfg, cfg.expert, paths.expert_ckpt());
    std::unique_ptr<Env> env = make_env(cfg);
    const Provenance mode =
        cfg.demo.mode == "one_life" ? Provenance::one_life : Provenance::full_episode;
    ActFn act = [&policy](const std::vector<double>& s) { return policy.greedy(s); };
    Demonstration demo =
        record(act, *env, mode, cfg.demo.episodes, derive_seed(seed, "demo", 0));
    save_demo(demo, paths.demo_file());
    std::cout << "record-demo: " << demo.size() << " transitions over " << demo.episodes
              << " episode(s), true return sum " << demo.true_reward_sum << " ("
              << cfg.demo.mode << ")\n";
    return demo;
}

inline void write_reward_metrics(const std::string& path, std::uint64_t seed,
                                 const std::vector<RewardTrainRow>& rows) {
    MetricsWriter metrics(path);
    for (const auto& r : rows) {
        MetricsRow row;
        row.step = r.epoch;
        row.update = r.epoch;
        row.loss_recon = r.loss.reconstruction;
        row.loss_kl = r.loss.latent_kl;
        row.loss_policy = r.loss.policy_term;
        row.seed = seed;
        metrics.write(row);
    }
}

inline void cmd_train_reward(const ExperimentConfig& cfg, std::uint64_t seed) {
    HarnessPaths paths{cfg.output_dir};
    paths.ensure_dir();
    if (cfg.method.name != "girl" && cfg.method.name != "cdil")
        throw ConfigError("train-reward applies to methods girl and cdil only; " +
                          cfg.method.name + "'s discriminator trains inside imitate");
    Demonstration demo = load_demo(paths.demo_file());
    std::unique_ptr<Env> env = make_env(cfg);
    StateNormalizer norm = StateNormalizer::for_env(env->spec());
    Rng init(derive_seed(seed, "reward-init", 0));
    Rng train_rng(derive_seed(seed, "reward-train", 0));

    if (cfg.method.name == "girl") {
        GirlModule module(env->spec().state_dim, env->spec().action_space, girl_config(cfg),
                          init);
        auto log = train_girl(module, demo, norm, cfg.method.reward_epochs,
                              cfg.method.reward_batch, cfg.method.reward_lr, cfg.demo.stride,
                              train_rng);
        save_checkpoint(paths.reward_ckpt(), module.params("girl"));
        write_reward_metrics(paths.reward_metrics(), seed, log);
        std::cout << "train-reward: girl, " << cfg.method.reward_epochs
                  << " epochs, final objective " << (log.empty() ? 0.0 : log.back().loss.total)
                  << "\n";
    } else {
        IcmModule module(env->spec().state_dim, env->spec().action_space, icm_config(cfg), init);
        auto log = train_icm(module, demo, norm, cfg.method.reward_epochs,
                             cfg.method.reward_batch, cfg.method.reward_lr, cfg.demo.stride,
                             train_rng);
        save_checkpoint(paths.reward_ckpt(), module.params("icm"));
        std::vector<RewardTrainRow> rows;
        for (const auto& r : log) {
            RewardTrainRow row;
            row.epoch = r.epoch;
            row.loss.reconstruction = r.loss.forward;
            row.loss.policy_term = r.loss.inverse;
            row.loss.total = r.loss.total;
            rows.push_back(row);
        }
        write_reward_metrics(paths.reward_metrics(), seed, rows);
        std::cout << "train-reward: cdil, " << cfg.method.reward_epochs
                  << " epochs, final loss " << (log.empty() ? 0.0 : log.back().loss.total)
                  << "\n";
    }
}

// Imitation stage. The learner's only reward channel is the configured
// intrinsic source; the true reward is read during greedy evaluation only.
inline double cmd_imitate(const ExperimentConfig& cfg, std::uint64_t seed,
                          const std::string& tag = "") {
    HarnessPaths paths{cfg.output_dir};
    paths.ensure_dir();
    const std::string& method = cfg.method.name;
    Demonstration demo = load_demo(paths.demo_file());
    std::unique_ptr<Env> env = make_env(cfg);
    StateNormalizer norm = StateNormalizer::for_env(env->spec());
    MetricsWriter metrics(paths.imitate_metrics(method, seed, tag));

    if (method == "bc") {
        Rng init(derive_seed(seed, "bc-init", 0));
        PolicyNet policy(env->spec().state_dim, env->spec().action_space,
                         policy_arch(cfg.imitation), init);
        Rng train_rng(derive_seed(seed, "bc-train", 0));
        auto params = policy.params("bc");
        AdamState adam(cfg.method.bc_lr, params);
        double final_eval = 0.0;
        const std::size_t interval = std::max<std::size_t>(1, cfg.method.bc_epochs / 25);
        for (std::size_t epoch = 1; epoch <= cfg.method.bc_epochs; ++epoch) {
            auto batch = sample_minibatch(demo, cfg.method.reward_batch, 1, train_rng);
            zero_grads(params);
            const double nll = bc_nll_loss(policy, batch);
            if (!std::isfinite(nll)) throw NumericError("bc: non-finite NLL");
            adam.step(params);
            if (epoch % interval == 0 || epoch == cfg.method.bc_epochs) {
                std::vector<std::uint64_t> eval_seeds{derive_seed(seed, "bc-eval", epoch)};
                MetricsRow row;
                row.step = epoch;
                row.update = epoch;
                row.mean_true_return =
                    evaluate(policy, *env, cfg.imitation.eval_episodes, eval_seeds).mean;
                row.loss_policy = nll;
                row.seed = seed;
                metrics.write(row);
                final_eval = row.mean_true_return;
            }
        }
        zero_grads(params);
        save_checkpoint(paths.policy_ckpt(method, seed, tag), policy.params("policy"));
        std::cout << "imitate(bc): final eval mean " << final_eval << "\n";
        return final_eval;
    }

    Rng init(derive_seed(seed, "imitate-init", 0));
    PolicyNet policy(env->spec().state_dim, env->spec().action_space,
                     policy_arch(cfg.imitation), init);

    std::unique_ptr<RewardSource> source;
    GirlModule girl_module;
    IcmModule icm_module;
    Discriminator disc;
    std::unique_ptr<AdamState> disc_adam;
    Rng disc_rng(derive_seed(seed, "disc-train", 0));
    AfterUpdateHook hook;

    if (method == "girl") {
        Rng dummy(0);
        girl_module = GirlModule(env->spec().state_dim, env->spec().action_space,
                                 girl_config(cfg), dummy);
        restore_params(load_checkpoint(paths.reward_ckpt()), girl_module.params("girl"));
        source = std::make_unique<GirlRewardSource>(girl_module, norm);
    } else if (method == "cdil") {
        Rng dummy(0);
        icm_module = IcmModule(env->spec().state_dim, env->spec().action_space, icm_config(cfg),
                               dummy);
        restore_params(load_checkpoint(paths.reward_ckpt()), icm_module.params("icm"));
        source = std::make_unique<IcmRewardSource>(icm_module, norm);
    } else if (method == "gail" || method == "vail") {
        Rng disc_init(derive_seed(seed, "disc-init", 0));
        disc = Discriminator(env->spec().state_dim, env->spec().action_space, disc_config(cfg),
                             disc_init);
        disc_adam = std::make_unique<AdamState>(cfg.method.disc_lr, disc.params());
        source = std::make_unique<GailRewardSource>(disc, norm, cfg.method.gail_reward_variant);

        // Normalized demo tensors for discriminator minibatches.
        auto demo_states = std::make_shared<Matrix>(demo.size(), env->spec().state_dim);
        auto demo_actions = std::make_shared<std::vector<Action>>();
        for (std::size_t i = 0; i < demo.size(); ++i) {
            auto s = norm.normalize(demo.transitions[i].state);
            std::copy(s.begin(), s.end(), demo_states->row(i));
            demo_actions->push_back(demo.transitions[i].action);
        }
        const std::size_t disc_batch = cfg.method.disc_batch;
        StateNormalizer hook_norm = norm;
        hook = [&, demo_states, demo_actions, disc_batch, hook_norm](const RolloutBatch& batch,
                                                                     std::size_t) {
            const std::size_t nd = std::min(disc_batch, demo_states->rows);
            Matrix db(nd, demo_states->cols);
            std::vector<Action> da;
            for (std::size_t k = 0; k < nd; ++k) {
                const std::size_t i = disc_rng.uniform_int(demo_states->rows);
                std::copy(demo_states->row(i), demo_states->row(i) + demo_states->cols,
                          db.row(k));
                da.push_back((*demo_actions)[i]);
            }
            const std::size_t np = std::min(disc_batch, batch.size());
            Matrix pb(np, batch.states.cols);
            std::vector<Action> pa;
            for (std::size_t k = 0; k < np; ++k) {
                const std::size_t i = disc_rng.uniform_int(batch.size());
                std::copy(batch.states.row(i), batch.states.row(i) + batch.states.cols,
                          pb.row(k));
                pa.push_back(batch.actions[i]);
            }
            hook_norm.normalize_rows(pb);
            disc_update(disc, *disc_adam, db, da, pb, pa, disc_rng);
        };
    } else {
        throw ConfigError("unknown method '" + method + "'");
    }

    PpoStageResult r = run_ppo_stage(cfg, cfg.imitation, policy, source.get(), cfg.standardize,
                                     metrics, seed, "imitate", hook);
    save_checkpoint(paths.policy_ckpt(method, seed, tag), policy.params("policy"));
    std::cout << "imitate(" << method << "): " << r.updates << " updates, final eval mean "
              << r.final_eval_mean << "\n";
    return r.final_eval_mean;
}

inline EvalResult cmd_evaluate(const ExperimentConfig& cfg, std::uint64_t seed) {
    HarnessPaths paths{cfg.output_dir};
    PolicyNet policy =
        load_policy(cfg, cfg.imitation, paths.policy_ckpt(cfg.method.name, seed));
    std::unique_ptr<Env> env = make_env(cfg);
    EvalResult res = evaluate(policy, *env, cfg.eval.episodes, cfg.eval.seeds);
    MetricsWriter metrics(paths.eval_csv(cfg.method.name, seed));
    for (std::size_t i = 0; i < res.per_seed_mean.size(); ++i) {
        MetricsRow row;
        row.update = i;
        row.mean_true_return = res.per_seed_mean[i];
        row.seed = cfg.eval.seeds[i];
        metrics.write(row);
    }
    std::cout << "evaluate(" << cfg.method.name << "): mean " << res.mean << " std "
              << res.stddev << " over " << cfg.eval.seeds.size() << " seeds\n";
    return res;
}

// Reruns the imitation stage for every beta in the configured grid and every
// eval seed. The merged table is keyed by (beta, seed).
inline void cmd_ablate_beta(const ExperimentConfig& cfg, std::uint64_t /*seed*/) {
    if (cfg.method.name != "girl") throw ConfigError("ablate-beta requires method girl");
    HarnessPaths paths{cfg.output_dir};
    paths.ensure_dir();
    std::ofstream table(paths.ablate_csv(), std::ios::trunc);
    if (!table) throw IoError("cannot open " + paths.ablate_csv());
    table << "beta,seed,mean_true_return\n";
    for (std::size_t bi = 0; bi < cfg.method.girl_beta_grid.size(); ++bi) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.method.girl_beta = cfg.method.girl_beta_grid[bi];
        const std::string tag = "_beta" + std::to_string(bi);
        for (std::uint64_t s : cfg.eval.seeds) {
            const double mean = cmd_imitate(run_cfg, s, tag);
            table << detail::format_double(run_cfg.method.girl_beta) << ',' << s << ','
                  << detail::format_double(mean) << "\n";
            table.flush();
        }
    }
    std::cout << "ablate-beta: table written to " << paths.ablate_csv() << "\n";
}

// Demonstration per-episode mean via deterministic replay (the demo file
// carries no rewards).
inline std::optional<double> demo_reference_line(const ExperimentConfig& cfg) {
    HarnessPaths paths{cfg.output_dir};
    if (!std::filesystem::exists(paths.demo_file())) return std::nullopt;
    Demonstration demo = load_demo(paths.demo_file());
    std::unique_ptr<Env> env = make_env(cfg);
    if (demo.env_id != env->id()) return std::nullopt;
    const double total = replay_return(demo, *env);
    return total / static_cast<double>(std::max<std::size_t>(1, demo.episodes));
}

inline std::optional<double> expert_reference_line(const ExperimentConfig& cfg) {
    HarnessPaths paths{cfg.output_dir};
    if (!std::filesystem::exists(paths.expert_metrics())) return std::nullopt;
    auto rows = read_metrics_csv(paths.expert_metrics());
    if (rows.empty()) return std::nullopt;
    return rows.back().mean_true_return;
}

inline std::string cmd_plot(const ExperimentConfig& cfg, std::vector<std::string> csv_paths,
                            const std::string& out_path = "") {
    HarnessPaths paths{cfg.output_dir};
    if (csv_paths.empty()) {
        // Default: every imitation metrics file in the output directory.
        if (std::filesystem::exists(paths.dir))
            for (const auto& entry : std::filesystem::directory_iterator(paths.dir)) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("imitate_", 0) == 0 && name.size() > 4 &&
                    name.substr(name.size() - 4) == ".csv")
                    csv_paths.push_back(entry.path().string());
            }
        std::sort(csv_paths.begin(), csv_paths.end());
    }
    if (csv_paths.empty()) throw ConfigError("plot: no metrics CSVs found");

    std::map<std::string, std::vector<std::vector<MetricsRow>>> groups;
    for (const std::string& p : csv_paths) groups[curve_label(p)].push_back(read_metrics_csv(p));
    std::vector<AggregatedCurve> curves;
    for (auto& [label, runs] : groups) curves.push_back(aggregate_runs(label, runs));

    const std::string svg =
        render_svg(curves, demo_reference_line(cfg), expert_reference_line(cfg));
    const std::string target = out_path.empty() ? paths.curves_svg() : out_path;
    paths.ensure_dir();
    std::ofstream os(target, std::ios::trunc);
    if (!os) throw IoError("cannot write " + target);
    os << svg;
    std::cout << "plot: " << curves.size() << " curve(s) -> " << target << "\n";
    return svg;
}

}  // namespace iil
