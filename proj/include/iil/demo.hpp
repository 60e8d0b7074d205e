#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "iil/checkpoint.hpp"
#include "iil/envs.hpp"
#include "iil/errors.hpp"
#include "iil/rng.hpp"

namespace iil {

struct Transition {
    std::vector<double> state;
    Action action;
    std::vector<double> next_state;
};

enum class Provenance : std::uint8_t { one_life = 0, full_episode = 1 };

// Ordered expert transitions plus recording metadata. Immutable after
// construction; the true-reward sum never feeds any learner.
struct Demonstration {
    std::vector<Transition> transitions;
    Provenance provenance = Provenance::one_life;
    std::string env_id;
    std::uint64_t seed = 0;
    std::size_t state_dim = 0;
    ActionSpace::Kind action_kind = ActionSpace::Kind::discrete;
    std::size_t action_dim = 0;  // action count (discrete) or vector width
    double true_reward_sum = 0.0;  // metadata only
    std::size_t episodes = 0;      // metadata only

    std::size_t size() const { return transitions.size(); }
    bool discrete() const { return action_kind == ActionSpace::Kind::discrete; }
};

using ActFn = std::function<Action(const std::vector<double>&)>;

inline std::uint64_t demo_episode_seed(std::uint64_t base, std::size_t episode) {
    return derive_seed(base, "demo-episode", episode);
}

// Rolls `policy` greedily per caller and records transitions. one_life stops
// at the first life-loss event, keeping that transition; full_episode runs
// until episode_done. Multiple episodes are concatenated.
inline Demonstration record(const ActFn& policy, Env& env, Provenance mode,
                            std::size_t episodes, std::uint64_t base_seed) {
    Demonstration demo;
    demo.provenance = mode;
    demo.env_id = env.id();
    demo.seed = base_seed;
    demo.state_dim = env.spec().state_dim;
    demo.action_kind = env.spec().action_space.kind;
    demo.action_dim = env.spec().action_space.discrete() ? env.spec().action_space.n
                                                         : env.spec().action_space.dim;
    demo.episodes = episodes;
    for (std::size_t ep = 0; ep < episodes; ++ep) {
        std::vector<double> state = env.reset(demo_episode_seed(base_seed, ep));
        while (true) {
            Action a = policy(state);
            if (env.spec().action_space.discrete() && a.index >= env.spec().action_space.n)
                throw DomainError("record: policy action out of space");
            StepResult r = env.step(a);
            demo.transitions.push_back({state, a, r.next_state});
            demo.true_reward_sum += r.true_reward();
            state = r.next_state;
            if (mode == Provenance::one_life && r.life_lost) break;
            if (r.episode_done) break;
        }
    }
    return demo;
}

// Re-steps the environment through the demo's actions and returns the true
// reward sum it produces. Independent of the recorded metadata.
inline double replay_return(const Demonstration& demo, Env& env) {
    double total = 0.0;
    std::size_t idx = 0;
    for (std::size_t ep = 0; ep < demo.episodes && idx < demo.size(); ++ep) {
        env.reset(demo_episode_seed(demo.seed, ep));
        while (idx < demo.size()) {
            StepResult r = env.step(demo.transitions[idx].action);
            total += r.true_reward();
            ++idx;
            if (demo.provenance == Provenance::one_life && r.life_lost) break;
            if (r.episode_done) break;
        }
    }
    return total;
}

// Uniform minibatch over the strided index set {0, stride, 2*stride, ...}.
// Distinct indices whenever the set is large enough, as a random permutation
// prefix; with replacement otherwise.
inline std::vector<std::size_t> sample_minibatch_indices(std::size_t demo_size,
                                                         std::size_t batch_size,
                                                         std::size_t stride, Rng& rng) {
    if (stride < 1) throw DomainError("sample_minibatch: stride < 1");
    if (demo_size == 0) throw DomainError("sample_minibatch: empty demonstration");
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < demo_size; i += stride) pool.push_back(i);
    std::vector<std::size_t> out;
    out.reserve(batch_size);
    if (pool.size() >= batch_size) {
        for (std::size_t k = 0; k < batch_size; ++k) {
            const std::size_t j = k + rng.uniform_int(pool.size() - k);
            std::swap(pool[k], pool[j]);
            out.push_back(pool[k]);
        }
    } else {
        for (std::size_t k = 0; k < batch_size; ++k)
            out.push_back(pool[rng.uniform_int(pool.size())]);
    }
    return out;
}

inline std::vector<Transition> sample_minibatch(const Demonstration& demo,
                                                std::size_t batch_size, std::size_t stride,
                                                Rng& rng) {
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (std::size_t i : sample_minibatch_indices(demo.size(), batch_size, stride, rng))
        batch.push_back(demo.transitions[i]);
    return batch;
}

// ---------------------------------------------------------------------------
// Demo file format: magic "IILDEMO1\0", header (env_id, u32 state_dim,
// u32 action kind, u32 action dim, u64 transition count, u8 provenance,
// u64 seed), then f64 rows of state | action | next_state.
// ---------------------------------------------------------------------------

namespace detail {
inline constexpr char kDemoMagic[9] = {'I', 'I', 'L', 'D', 'E', 'M', 'O', '1', '\0'};
}

inline void save_demo(const Demonstration& demo, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open demo for write: " + path);
    os.write(detail::kDemoMagic, sizeof(detail::kDemoMagic));
    detail::write_pod(os, static_cast<std::uint32_t>(demo.env_id.size()));
    os.write(demo.env_id.data(), static_cast<std::streamsize>(demo.env_id.size()));
    detail::write_pod(os, static_cast<std::uint32_t>(demo.state_dim));
    detail::write_pod(os, static_cast<std::uint32_t>(demo.action_kind));
    detail::write_pod(os, static_cast<std::uint32_t>(demo.action_dim));
    detail::write_pod(os, static_cast<std::uint64_t>(demo.size()));
    detail::write_pod(os, static_cast<std::uint8_t>(demo.provenance));
    detail::write_pod(os, static_cast<std::uint64_t>(demo.seed));
    const std::size_t awidth = demo.discrete() ? 1 : demo.action_dim;
    for (const Transition& t : demo.transitions) {
        if (t.state.size() != demo.state_dim || t.next_state.size() != demo.state_dim)
            throw DimensionError("save_demo: transition state width mismatch");
        os.write(reinterpret_cast<const char*>(t.state.data()),
                 static_cast<std::streamsize>(demo.state_dim * sizeof(double)));
        if (demo.discrete()) {
            const double a = static_cast<double>(t.action.index);
            detail::write_pod(os, a);
        } else {
            if (t.action.continuous.size() != awidth)
                throw DimensionError("save_demo: action width mismatch");
            os.write(reinterpret_cast<const char*>(t.action.continuous.data()),
                     static_cast<std::streamsize>(awidth * sizeof(double)));
        }
        os.write(reinterpret_cast<const char*>(t.next_state.data()),
                 static_cast<std::streamsize>(demo.state_dim * sizeof(double)));
    }
    if (!os) throw IoError("demo write failed: " + path);
}

inline Demonstration load_demo(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open demo: " + path);
    char magic[sizeof(detail::kDemoMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, detail::kDemoMagic, sizeof(magic)) != 0)
        throw FormatError("bad demo magic", 0);
    std::size_t offset = sizeof(magic);

    Demonstration demo;
    const auto id_len = detail::read_pod<std::uint32_t>(is, offset, "env id length");
    demo.env_id.resize(id_len);
    is.read(demo.env_id.data(), id_len);
    if (!is) throw FormatError("truncated env id", offset);
    offset += id_len;
    demo.state_dim = detail::read_pod<std::uint32_t>(is, offset, "state dim");
    const auto kind = detail::read_pod<std::uint32_t>(is, offset, "action kind");
    if (kind > 1) throw FormatError("unknown action kind", offset - sizeof(std::uint32_t));
    demo.action_kind = static_cast<ActionSpace::Kind>(kind);
    demo.action_dim = detail::read_pod<std::uint32_t>(is, offset, "action dim");
    const auto count = detail::read_pod<std::uint64_t>(is, offset, "transition count");
    const auto prov = detail::read_pod<std::uint8_t>(is, offset, "provenance");
    if (prov > 1) throw FormatError("unknown provenance", offset - sizeof(std::uint8_t));
    demo.provenance = static_cast<Provenance>(prov);
    demo.seed = detail::read_pod<std::uint64_t>(is, offset, "seed");

    const std::size_t awidth = demo.discrete() ? 1 : demo.action_dim;
    demo.transitions.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Transition& t = demo.transitions[i];
        t.state.resize(demo.state_dim);
        is.read(reinterpret_cast<char*>(t.state.data()),
                static_cast<std::streamsize>(demo.state_dim * sizeof(double)));
        if (!is) throw FormatError("truncated state row", offset);
        offset += demo.state_dim * sizeof(double);
        if (demo.discrete()) {
            const double a = detail::read_pod<double>(is, offset, "action");
            if (a < 0.0 || a >= static_cast<double>(demo.action_dim))
                throw FormatError("discrete action out of range", offset - sizeof(double));
            t.action.index = static_cast<std::size_t>(a);
        } else {
            t.action.continuous.resize(awidth);
            is.read(reinterpret_cast<char*>(t.action.continuous.data()),
                    static_cast<std::streamsize>(awidth * sizeof(double)));
            if (!is) throw FormatError("truncated action row", offset);
            offset += awidth * sizeof(double);
        }
        t.next_state.resize(demo.state_dim);
        is.read(reinterpret_cast<char*>(t.next_state.data()),
                static_cast<std::streamsize>(demo.state_dim * sizeof(double)));
        if (!is) throw FormatError("truncated next state row", offset);
        offset += demo.state_dim * sizeof(double);
    }
    return demo;
}

}  // namespace iil
