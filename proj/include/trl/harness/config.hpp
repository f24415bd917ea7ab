#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trl/agent/qagent.hpp"
#include "trl/env/intersection_env.hpp"

namespace trl::harness {

enum class Algo { Dql = 0, Dueling = 1 };

const char* algo_name(Algo a);
Algo parse_algo(const std::string& s);          // throws ConfigError
env::Task parse_task(const std::string& s);     // throws ConfigError

struct NetArch {
    std::vector<int> trunk_hidden{128, 128};
    int stream_hidden = 64;
};

// Transfer knobs as configured; spans of 0 / -1 mean "derive from the planned
// decision-step budget" (half of it and a twentieth of it, respectively).
struct TransferKnobs {
    double beta0 = 0.8;
    long t_tran = 0;
    long t_exp = -1;
};

struct RunConfig {
    Algo algo = Algo::Dueling;
    env::Task task = env::Task::Straight;
    int episodes = 2000;  // desk scale; --paper-scale doubles it
    uint64_t seed = 1;
    std::string out_dir;

    agent::AgentConfig agent;
    double epsilon_decay_frac = 0.8;  // fraction of episodes the decay spans
    env::EnvConfig env;
    NetArch net;
    std::optional<TransferKnobs> transfer;

    void validate() const;
};

// Flat key=value file, '#' comments, dotted namespaces (e.g. env.sim_hz=20).
std::map<std::string, std::string> read_kv_file(const std::string& path);

// Applies recognized keys onto the config; unknown keys or malformed values
// raise ConfigError.
void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv);

}  // namespace trl::harness
