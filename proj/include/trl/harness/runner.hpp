#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trl/harness/config.hpp"
#include "trl/harness/metrics.hpp"
#include "trl/nn/network.hpp"

namespace trl::harness {

// Test instrumentation; both hooks are optional.
struct TrainHooks {
    // Replaces action selection entirely (no rng draws happen).
    std::function<int(const std::vector<double>&)> force_action;
    // Called after each episode with the logged row and the raw step rewards.
    std::function<void(const EpisodeMetrics&, const std::vector<double>&)> on_episode;
};

struct TrainResult {
    std::vector<EpisodeMetrics> metrics;
    nn::Network model;
    std::string model_path;    // empty when no out dir was configured
    std::string metrics_path;
};

// Runs the episode loop and, when cfg.out_dir is set, writes metrics.csv and
// model.trlq there. Fully determined by (cfg, seed).
TrainResult train(const RunConfig& cfg, const TrainHooks* hooks = nullptr);

// Same loop with the three-rule action selection against a frozen expert.
TrainResult transfer_train(const std::string& expert_path, const RunConfig& cfg,
                           const TrainHooks* hooks = nullptr);

struct EvalSummary {
    int episodes = 0;
    double success_rate = 0.0;
    double mean_return = 0.0;
    double mean_distance = 0.0;
    std::vector<EpisodeMetrics> per_episode;
};

EvalSummary evaluate(const nn::Network& net, env::Task task, int episodes, uint64_t seed,
                     const env::EnvConfig& env_cfg);
EvalSummary evaluate_file(const std::string& model_path, env::Task task, int episodes,
                          uint64_t seed, const env::EnvConfig& env_cfg,
                          const std::string& out_dir = "");

enum class CrossMode { Frozen, Finetune };

struct HeatmapCell {
    Algo algo = Algo::Dueling;
    env::Task source = env::Task::Straight;
    env::Task target = env::Task::Straight;
    int episodes = 0;
    double success_rate = 0.0;
};

std::string format_heatmap_csv(const std::vector<HeatmapCell>& cells);

// Evaluates every (source model, target task) pair. In Finetune mode each
// cell first trains a student briefly against the source model as expert.
// Cells are seeded independently of each other; the algo column is read from
// the model file's head kind.
std::vector<HeatmapCell> cross_evaluate(
    const std::vector<std::pair<env::Task, std::string>>& models,
    const std::vector<env::Task>& targets, int episodes, uint64_t seed,
    const RunConfig& base, CrossMode mode, int finetune_episodes,
    const std::string& out_dir);

// Reads <run_dir>/metrics.csv and writes plot-ready curves under
// <run_dir>/report/; copies heatmap.csv through when present.
void emit_report(const std::string& run_dir, int window = 100);

// Seed expansion streams (documented so runs can be reproduced externally).
inline constexpr uint64_t kSeedStreamNet = 1;
inline constexpr uint64_t kSeedStreamAgent = 2;
inline constexpr uint64_t kSeedStreamEval = 3;
inline constexpr uint64_t kSeedStreamCellBase = 500;
inline constexpr uint64_t kSeedStreamEpisodeBase = 1000;

}  // namespace trl::harness
