#pragma once

#include <span>
#include <string>

#include "trl/agent/qagent.hpp"
#include "trl/nn/network.hpp"
#include "trl/rng.hpp"

namespace trl::transfer {

struct TransferConfig {
    double beta0 = 0.8;  // initial probability of copying the expert
    long t_tran = 1;     // decision steps over which that probability decays to zero
    long t_exp = 0;      // decision steps during which epsilon stays at its start value

    void validate() const;
};

// Frozen policy from a source task. Only its greedy action is ever used.
struct ExpertHandle {
    nn::Network net;
    std::string source_label;
};

// beta0 * (1 - t / t_tran), floored at zero once t reaches t_tran.
double transfer_probability(long t, const TransferConfig& cfg);

enum class RuleTag { Transfer, Exploration, Exploitation };

struct TransferSelection {
    int action = 0;
    RuleTag rule = RuleTag::Exploitation;
};

// Splits one uniform draw three ways: expert copy with probability p1,
// a random action with eps * (1 - p1), the student's greedy action otherwise.
// With beta0 = 0 this reduces exactly to plain epsilon-greedy selection.
TransferSelection select_action_with_transfer(std::span<const double> obs,
                                              const agent::QAgent& student,
                                              const ExpertHandle& expert, double eps,
                                              long t, const TransferConfig& cfg, Rng& rng);

// Loads a saved policy and checks it fits the target task's observation size.
ExpertHandle load_expert(const std::string& path, int expected_input_dim,
                         std::string source_label = "");

}  // namespace trl::transfer
