#include "trl/transfer/transfer.hpp"

#include <algorithm>

#include "trl/errors.hpp"
#include "trl/nn/serialize.hpp"

namespace trl::transfer {

void TransferConfig::validate() const {
    if (beta0 < 0.0 || beta0 > 1.0) throw ConfigError("beta0 must be in [0, 1]");
    if (t_tran < 1) throw ConfigError("transfer decay span must be positive");
    if (t_exp < 0) throw ConfigError("exploration hold span must be non-negative");
}

double transfer_probability(long t, const TransferConfig& cfg) {
    double p = cfg.beta0 * (1.0 - double(t) / double(cfg.t_tran));
    return std::max(0.0, p);
}

TransferSelection select_action_with_transfer(std::span<const double> obs,
                                              const agent::QAgent& student,
                                              const ExpertHandle& expert, double eps,
                                              long t, const TransferConfig& cfg, Rng& rng) {
    double p1 = transfer_probability(t, cfg);
    double u = rng.uniform01();
    if (u < p1) {
        return {nn::argmax(nn::forward(expert.net, obs)), RuleTag::Transfer};
    }
    if (u < p1 + eps * (1.0 - p1)) {
        return {rng.uniform_int(student.eval_net().n_actions()), RuleTag::Exploration};
    }
    return {student.greedy_action(obs), RuleTag::Exploitation};
}

ExpertHandle load_expert(const std::string& path, int expected_input_dim,
                         std::string source_label) {
    nn::Network net = nn::load_network(path);
    if (net.input_dim() != expected_input_dim) {
        throw ModelFormatError("expert input dimension " + std::to_string(net.input_dim()) +
                               " does not match the task observation size " +
                               std::to_string(expected_input_dim));
    }
    return {std::move(net), std::move(source_label)};
}

}  // namespace trl::transfer
