#pragma once

#include <optional>
#include <span>

#include "trl/agent/replay.hpp"
#include "trl/nn/network.hpp"
#include "trl/rng.hpp"

namespace trl::agent {

// Linear decay from `start` to `end` over `decay_episodes`, flat afterwards.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    int decay_episodes = 1;

    double at(int episode) const {
        if (episode >= decay_episodes) return end;
        if (episode < 0) return start;
        return start + (end - start) * double(episode) / double(decay_episodes);
    }
};

struct AgentConfig {
    double gamma = 0.95;
    double learning_rate = 5e-4;
    EpsilonSchedule epsilon;
    int batch_size = 64;
    int target_sync_interval = 200;  // gradient steps between target refreshes
    size_t buffer_capacity = 20000;

    void validate() const;
};

struct TaggedAction {
    int action = 0;
    bool explored = false;
};

// Q-learning on a pair of networks: gradient steps touch `eval`, bootstrap
// targets come from `target`, which is copied from eval every
// target_sync_interval steps.
class QAgent {
public:
    QAgent(nn::Network net, AgentConfig cfg);

    TaggedAction select_action_tagged(std::span<const double> obs, double eps, Rng& rng) const;
    int select_action(std::span<const double> obs, double eps, Rng& rng) const {
        return select_action_tagged(obs, eps, rng).action;
    }
    int greedy_action(std::span<const double> obs) const;

    void store(Transition t) { buffer_.store(std::move(t)); }

    // One minibatch of SGD on the squared TD error; no-op (nullopt) until the
    // buffer holds a full batch. Returns the mean loss over the batch.
    std::optional<double> train_step(Rng& rng);

    void sync_target() { target_ = eval_; }

    const nn::Network& eval_net() const { return eval_; }
    const nn::Network& target_net() const { return target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    const AgentConfig& config() const { return cfg_; }
    long train_steps() const { return steps_; }

private:
    nn::Network eval_;
    nn::Network target_;
    ReplayBuffer buffer_;
    AgentConfig cfg_;
    long steps_ = 0;
};

// One tabular backup:  Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
// Reference dynamics for the network agent's tests.
void tabular_q_update(std::vector<std::vector<double>>& q, int s, int a, double r,
                      int s_next, double alpha, double gamma);

}  // namespace trl::agent
