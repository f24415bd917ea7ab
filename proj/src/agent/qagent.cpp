#include "trl/agent/qagent.hpp"

#include <algorithm>

#include "trl/errors.hpp"

namespace trl::agent {

void AgentConfig::validate() const {
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must be in [0, 1]");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
    if (epsilon.start < 0.0 || epsilon.start > 1.0 || epsilon.end < 0.0 || epsilon.end > 1.0)
        throw ConfigError("epsilon bounds must be in [0, 1]");
    if (epsilon.decay_episodes < 1) throw ConfigError("epsilon decay span must be positive");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (target_sync_interval < 1) throw ConfigError("target sync interval must be positive");
    if (buffer_capacity < size_t(batch_size)) throw ConfigError("buffer smaller than one batch");
}

QAgent::QAgent(nn::Network net, AgentConfig cfg)
    : eval_(std::move(net)), target_(eval_), buffer_(cfg.buffer_capacity), cfg_(cfg) {
    cfg_.validate();
}

TaggedAction QAgent::select_action_tagged(std::span<const double> obs, double eps, Rng& rng) const {
    if (rng.uniform01() < eps) return {rng.uniform_int(eval_.n_actions()), true};
    return {greedy_action(obs), false};
}

int QAgent::greedy_action(std::span<const double> obs) const {
    return nn::argmax(nn::forward(eval_, obs));
}

std::optional<double> QAgent::train_step(Rng& rng) {
    if (buffer_.size() < size_t(cfg_.batch_size)) return std::nullopt;

    nn::Gradients grads = nn::zero_gradients(eval_);
    double scale = 1.0 / double(cfg_.batch_size);
    double loss_sum = 0.0;
    for (int k = 0; k < cfg_.batch_size; ++k) {
        const Transition& tr = buffer_.at(size_t(rng.uniform_int(int(buffer_.size()))));
        double target = tr.r;
        if (!tr.done) {
            std::vector<double> q_next = nn::forward(target_, tr.s_next);
            target += cfg_.gamma * q_next[size_t(nn::argmax(q_next))];
        }
        loss_sum += nn::accumulate_backward(eval_, tr.s, tr.a, target, scale, grads);
    }
    nn::sgd_update(eval_, grads, cfg_.learning_rate);
    ++steps_;
    if (steps_ % cfg_.target_sync_interval == 0) sync_target();
    return loss_sum / double(cfg_.batch_size);
}

void tabular_q_update(std::vector<std::vector<double>>& q, int s, int a, double r,
                      int s_next, double alpha, double gamma) {
    double best_next = *std::max_element(q[size_t(s_next)].begin(), q[size_t(s_next)].end());
    double& cell = q[size_t(s)][size_t(a)];
    cell += alpha * (r + gamma * best_next - cell);
}

}  // namespace trl::agent
