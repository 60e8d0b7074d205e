#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "iil/errors.hpp"

namespace iil {

// Plain-text sectioned key=value configuration. Every key has a default;
// unknown sections or keys are errors. Defaults follow the environment kind
// (the continuous task uses its own learning rates, stride and alpha).
struct ExperimentConfig {
    struct EnvBlock {
        std::string id = "grid_hazard";  // grid_hazard | pendulum
        std::uint64_t layout_seed = 7;   // fixes the board; the "game" identity
        std::size_t lives = 3;
        std::size_t width = 8;
        std::size_t height = 8;
        std::size_t pellets = 10;
        std::size_t hazards = 6;
        std::size_t max_steps = 200;
    } env;

    struct PpoBlock {
        double lr = 2.5e-4;
        double clip_eps = 0.1;
        double entropy_coef = 0.01;
        double value_coef = 0.5;
        double gae_lambda = 0.95;
        double gamma = 0.99;
        std::size_t horizon = 128;
        std::size_t num_envs = 16;
        std::size_t epochs_per_update = 4;
        std::size_t minibatches = 4;
        std::size_t hidden = 64;
        std::size_t total_steps = 200000;
        std::size_t eval_interval = 10;  // updates between metric rows
        std::size_t eval_episodes = 10;
    } expert;

    struct DemoBlock {
        std::string mode = "one_life";  // one_life | full_episode
        std::size_t episodes = 1;
        std::size_t stride = 4;
    } demo;

    struct MethodBlock {
        std::string name = "girl";  // girl | cdil | gail | vail | bc
        double girl_alpha = 100.0;
        double girl_lambda = 1.0;
        double girl_beta = 1.0;
        std::string girl_prior = "standard_normal";  // standard_normal | learned
        std::vector<double> girl_beta_grid = {1.0, 0.999, 0.99, 0.95, 0.9};
        double icm_lambda = 1.0;
        std::size_t icm_feature_dim = 32;
        std::size_t reward_hidden = 64;
        std::size_t reward_epochs = 50000;
        std::size_t reward_batch = 32;
        double reward_lr = 3e-5;
        int gail_reward_variant = 1;
        double vail_i_c = 0.2;
        double vail_dual_step = 1e-5;
        std::size_t vail_bottleneck_dim = 32;
        double disc_lr = 1e-3;
        std::size_t disc_batch = 128;
        std::size_t bc_epochs = 5000;
        double bc_lr = 2.5e-4;
    } method;

    PpoBlock imitation;
    bool standardize = true;

    struct EvalBlock {
        std::size_t episodes = 10;
        std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    } eval;

    std::string output_dir = "out";

    bool discrete_env() const { return env.id != "pendulum"; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
    return static_cast<int>(parse_u64(key, v));
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& key, const std::string& v, Fn parse_one) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_one(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

template <typename T>
std::string format_list(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

inline void apply_ppo_key(ExperimentConfig::PpoBlock& b, const std::string& section,
                          const std::string& key, const std::string& v) {
    const std::string full = section + "." + key;
    if (key == "lr") b.lr = parse_double(full, v);
    else if (key == "clip_eps") b.clip_eps = parse_double(full, v);
    else if (key == "entropy_coef") b.entropy_coef = parse_double(full, v);
    else if (key == "value_coef") b.value_coef = parse_double(full, v);
    else if (key == "gae_lambda") b.gae_lambda = parse_double(full, v);
    else if (key == "gamma") b.gamma = parse_double(full, v);
    else if (key == "horizon") b.horizon = parse_u64(full, v);
    else if (key == "num_envs") b.num_envs = parse_u64(full, v);
    else if (key == "epochs_per_update") b.epochs_per_update = parse_u64(full, v);
    else if (key == "minibatches") b.minibatches = parse_u64(full, v);
    else if (key == "hidden") b.hidden = parse_u64(full, v);
    else if (key == "total_steps") b.total_steps = parse_u64(full, v);
    else if (key == "eval_interval") b.eval_interval = parse_u64(full, v);
    else if (key == "eval_episodes") b.eval_episodes = parse_u64(full, v);
    else throw ConfigError("unknown key [" + section + "] " + key);
}

inline void serialize_ppo(std::ostream& os, const char* name,
                          const ExperimentConfig::PpoBlock& b) {
    os << "[" << name << "]\n";
    os << "lr = " << format_double(b.lr) << "\n";
    os << "clip_eps = " << format_double(b.clip_eps) << "\n";
    os << "entropy_coef = " << format_double(b.entropy_coef) << "\n";
    os << "value_coef = " << format_double(b.value_coef) << "\n";
    os << "gae_lambda = " << format_double(b.gae_lambda) << "\n";
    os << "gamma = " << format_double(b.gamma) << "\n";
    os << "horizon = " << b.horizon << "\n";
    os << "num_envs = " << b.num_envs << "\n";
    os << "epochs_per_update = " << b.epochs_per_update << "\n";
    os << "minibatches = " << b.minibatches << "\n";
    os << "hidden = " << b.hidden << "\n";
    os << "total_steps = " << b.total_steps << "\n";
    os << "eval_interval = " << b.eval_interval << "\n";
    os << "eval_episodes = " << b.eval_episodes << "\n";
}

}  // namespace detail

// Paper-stated defaults for the continuous control domain.
inline ExperimentConfig default_config_for(const std::string& env_id) {
    ExperimentConfig cfg;
    cfg.env.id = env_id;
    if (env_id == "pendulum") {
        cfg.demo.mode = "full_episode";
        cfg.demo.episodes = 5;  // 5 x 200 steps = one 1000-step demonstration
        cfg.demo.stride = 20;
        cfg.method.girl_alpha = 1.0;
        cfg.method.vail_i_c = 0.5;
        cfg.method.reward_hidden = 100;
        for (ExperimentConfig::PpoBlock* b : {&cfg.expert, &cfg.imitation}) {
            b->lr = 3e-4;
            b->entropy_coef = 0.0;
            b->hidden = 100;
        }
        cfg.expert.total_steps = 200000;
        cfg.imitation.total_steps = 500000;
    } else {
        cfg.imitation.lr = 2.5e-4;
        cfg.imitation.total_steps = 500000;
    }
    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    // First pass: collect (section, key, value) and find env.id so the right
    // defaults apply underneath.
    std::vector<std::array<std::string, 3>> entries;
    std::string section;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    std::string env_id = "grid_hazard";
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            section = t.substr(1, t.size() - 2);
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside a section");
        if (section == "env" && key == "id") env_id = value;
        entries.push_back({section, key, value});
    }
    if (env_id != "grid_hazard" && env_id != "pendulum")
        throw ConfigError("unknown env id '" + env_id + "'");

    ExperimentConfig cfg = default_config_for(env_id);
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_u64;
    for (const auto& [sec, key, value] : entries) {
        const std::string full = sec + "." + key;
        if (sec == "env") {
            if (key == "id") cfg.env.id = value;
            else if (key == "layout_seed") cfg.env.layout_seed = parse_u64(full, value);
            else if (key == "lives") cfg.env.lives = parse_u64(full, value);
            else if (key == "width") cfg.env.width = parse_u64(full, value);
            else if (key == "height") cfg.env.height = parse_u64(full, value);
            else if (key == "pellets") cfg.env.pellets = parse_u64(full, value);
            else if (key == "hazards") cfg.env.hazards = parse_u64(full, value);
            else if (key == "max_steps") cfg.env.max_steps = parse_u64(full, value);
            else throw ConfigError("unknown key [env] " + key);
        } else if (sec == "expert") {
            detail::apply_ppo_key(cfg.expert, sec, key, value);
        } else if (sec == "imitation") {
            if (key == "standardize") cfg.standardize = parse_bool(full, value);
            else detail::apply_ppo_key(cfg.imitation, sec, key, value);
        } else if (sec == "demo") {
            if (key == "mode") {
                if (value != "one_life" && value != "full_episode")
                    throw ConfigError("demo.mode must be one_life or full_episode");
                cfg.demo.mode = value;
            } else if (key == "episodes") cfg.demo.episodes = parse_u64(full, value);
            else if (key == "stride") cfg.demo.stride = parse_u64(full, value);
            else throw ConfigError("unknown key [demo] " + key);
        } else if (sec == "method") {
            if (key == "name") {
                if (value != "girl" && value != "cdil" && value != "gail" &&
                    value != "vail" && value != "bc")
                    throw ConfigError("unknown method '" + value + "'");
                cfg.method.name = value;
            } else if (key == "girl.alpha") cfg.method.girl_alpha = parse_double(full, value);
            else if (key == "girl.lambda") cfg.method.girl_lambda = parse_double(full, value);
            else if (key == "girl.beta") cfg.method.girl_beta = parse_double(full, value);
            else if (key == "girl.prior") {
                if (value != "standard_normal" && value != "learned")
                    throw ConfigError("girl.prior must be standard_normal or learned");
                cfg.method.girl_prior = value;
            } else if (key == "girl.beta_grid")
                cfg.method.girl_beta_grid =
                    detail::parse_list<double>(full, value, parse_double);
            else if (key == "icm.lambda") cfg.method.icm_lambda = parse_double(full, value);
            else if (key == "icm.feature_dim")
                cfg.method.icm_feature_dim = parse_u64(full, value);
            else if (key == "reward.hidden") cfg.method.reward_hidden = parse_u64(full, value);
            else if (key == "reward.epochs") cfg.method.reward_epochs = parse_u64(full, value);
            else if (key == "reward.batch") cfg.method.reward_batch = parse_u64(full, value);
            else if (key == "reward.lr") cfg.method.reward_lr = parse_double(full, value);
            else if (key == "gail.reward_variant")
                cfg.method.gail_reward_variant = parse_int(full, value);
            else if (key == "vail.i_c") cfg.method.vail_i_c = parse_double(full, value);
            else if (key == "vail.dual_step")
                cfg.method.vail_dual_step = parse_double(full, value);
            else if (key == "vail.bottleneck_dim")
                cfg.method.vail_bottleneck_dim = parse_u64(full, value);
            else if (key == "disc.lr") cfg.method.disc_lr = parse_double(full, value);
            else if (key == "disc.batch") cfg.method.disc_batch = parse_u64(full, value);
            else if (key == "bc.epochs") cfg.method.bc_epochs = parse_u64(full, value);
            else if (key == "bc.lr") cfg.method.bc_lr = parse_double(full, value);
            else throw ConfigError("unknown key [method] " + key);
        } else if (sec == "eval") {
            if (key == "episodes") cfg.eval.episodes = parse_u64(full, value);
            else if (key == "seeds")
                cfg.eval.seeds = detail::parse_list<std::uint64_t>(full, value, parse_u64);
            else throw ConfigError("unknown key [eval] " + key);
        } else if (sec == "output") {
            if (key == "dir") cfg.output_dir = value;
            else throw ConfigError("unknown key [output] " + key);
        } else {
            throw ConfigError("unknown section [" + sec + "]");
        }
    }
    if (cfg.env.id != "grid_hazard" && cfg.env.id != "pendulum")
        throw ConfigError("unknown env id '" + cfg.env.id + "'");
    if (cfg.demo.stride < 1) throw ConfigError("demo.stride must be >= 1");
    if (cfg.method.girl_beta <= 0.0 || cfg.method.girl_beta > 1.0)
        throw ConfigError("girl.beta must lie in (0,1]");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    using detail::format_double;
    std::ostringstream os;
    os << "[env]\n";
    os << "id = " << cfg.env.id << "\n";
    os << "layout_seed = " << cfg.env.layout_seed << "\n";
    os << "lives = " << cfg.env.lives << "\n";
    os << "width = " << cfg.env.width << "\n";
    os << "height = " << cfg.env.height << "\n";
    os << "pellets = " << cfg.env.pellets << "\n";
    os << "hazards = " << cfg.env.hazards << "\n";
    os << "max_steps = " << cfg.env.max_steps << "\n\n";
    detail::serialize_ppo(os, "expert", cfg.expert);
    os << "\n[demo]\n";
    os << "mode = " << cfg.demo.mode << "\n";
    os << "episodes = " << cfg.demo.episodes << "\n";
    os << "stride = " << cfg.demo.stride << "\n\n";
    os << "[method]\n";
    os << "name = " << cfg.method.name << "\n";
    os << "girl.alpha = " << format_double(cfg.method.girl_alpha) << "\n";
    os << "girl.lambda = " << format_double(cfg.method.girl_lambda) << "\n";
    os << "girl.beta = " << format_double(cfg.method.girl_beta) << "\n";
    os << "girl.prior = " << cfg.method.girl_prior << "\n";
    os << "girl.beta_grid = " << detail::format_list(cfg.method.girl_beta_grid) << "\n";
    os << "icm.lambda = " << format_double(cfg.method.icm_lambda) << "\n";
    os << "icm.feature_dim = " << cfg.method.icm_feature_dim << "\n";
    os << "reward.hidden = " << cfg.method.reward_hidden << "\n";
    os << "reward.epochs = " << cfg.method.reward_epochs << "\n";
    os << "reward.batch = " << cfg.method.reward_batch << "\n";
    os << "reward.lr = " << format_double(cfg.method.reward_lr) << "\n";
    os << "gail.reward_variant = " << cfg.method.gail_reward_variant << "\n";
    os << "vail.i_c = " << format_double(cfg.method.vail_i_c) << "\n";
    os << "vail.dual_step = " << format_double(cfg.method.vail_dual_step) << "\n";
    os << "vail.bottleneck_dim = " << cfg.method.vail_bottleneck_dim << "\n";
    os << "disc.lr = " << format_double(cfg.method.disc_lr) << "\n";
    os << "disc.batch = " << cfg.method.disc_batch << "\n";
    os << "bc.epochs = " << cfg.method.bc_epochs << "\n";
    os << "bc.lr = " << format_double(cfg.method.bc_lr) << "\n\n";
    detail::serialize_ppo(os, "imitation", cfg.imitation);
    os << "standardize = " << (cfg.standardize ? "true" : "false") << "\n\n";
    os << "[eval]\n";
    os << "episodes = " << cfg.eval.episodes << "\n";
    os << "seeds = " << detail::format_list(cfg.eval.seeds) << "\n\n";
    os << "[output]\n";
    os << "dir = " << cfg.output_dir << "\n";
    return os.str();
}

}  // namespace iil
