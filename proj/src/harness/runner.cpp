#include "trl/harness/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "trl/errors.hpp"
#include "trl/nn/serialize.hpp"
#include "trl/transfer/transfer.hpp"

namespace trl::harness {

namespace fs = std::filesystem;

namespace {

int steps_per_episode(const env::EnvConfig& e) {
    return std::max(1, int(std::lround(e.episode_duration / e.decision_period)));
}

transfer::TransferConfig resolve_transfer(const TransferKnobs& knobs, const RunConfig& cfg) {
    long planned = long(cfg.episodes) * steps_per_episode(cfg.env);
    transfer::TransferConfig tc;
    tc.beta0 = knobs.beta0;
    tc.t_tran = knobs.t_tran > 0 ? knobs.t_tran : std::max(1L, planned / 2);
    tc.t_exp = knobs.t_exp >= 0 ? knobs.t_exp : planned / 20;
    tc.validate();
    return tc;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

TrainResult run_training(const RunConfig& cfg, const transfer::ExpertHandle* expert,
                         const TrainHooks* hooks) {
    cfg.validate();
    env::IntersectionEnv world(cfg.env, cfg.task);
    int obs_dim = world.observation_size();
    if (expert && expert->net.input_dim() != obs_dim)
        throw ModelFormatError("expert input dimension does not match the observation size");

    nn::Arch arch{obs_dim, int(env::kEgoAccelerations.size()), cfg.net.trunk_hidden,
                  cfg.net.stream_hidden};
    nn::HeadKind head = cfg.algo == Algo::Dueling ? nn::HeadKind::Dueling : nn::HeadKind::Plain;

    agent::AgentConfig acfg = cfg.agent;
    acfg.epsilon.decay_episodes =
        std::max(1, int(std::lround(cfg.epsilon_decay_frac * cfg.episodes)));
    agent::QAgent student(nn::make_network(arch, head, derive_seed(cfg.seed, kSeedStreamNet)),
                          acfg);
    Rng rng(derive_seed(cfg.seed, kSeedStreamAgent));

    transfer::TransferConfig tc;
    long e_exp = 0;
    if (expert) {
        tc = resolve_transfer(cfg.transfer.value_or(TransferKnobs{}), cfg);
        e_exp = tc.t_exp / steps_per_episode(cfg.env);
    }

    TrainResult result;
    long t = 0;  // decision steps across all episodes
    for (int e = 0; e < cfg.episodes; ++e) {
        std::vector<double> obs = world.reset(derive_seed(cfg.seed, kSeedStreamEpisodeBase + uint64_t(e)));
        EpisodeMetrics row;
        row.episode = e;
        std::vector<double> step_rewards;
        double loss_sum = 0.0;
        long loss_n = 0;
        double discount = 1.0;
        bool collision = false, success = false;

        while (!world.done()) {
            double eps = expert ? (t < tc.t_exp ? acfg.epsilon.start
                                                : acfg.epsilon.at(int(e - e_exp)))
                                : acfg.epsilon.at(e);
            int action;
            if (hooks && hooks->force_action) {
                action = hooks->force_action(obs);
            } else if (expert) {
                transfer::TransferSelection sel = transfer::select_action_with_transfer(
                    obs, student, *expert, eps, t, tc, rng);
                action = sel.action;
                switch (sel.rule) {
                    case transfer::RuleTag::Transfer: ++row.n_transfer; break;
                    case transfer::RuleTag::Exploration: ++row.n_explore; break;
                    case transfer::RuleTag::Exploitation: ++row.n_exploit; break;
                }
            } else {
                agent::TaggedAction sel = student.select_action_tagged(obs, eps, rng);
                action = sel.action;
                if (sel.explored) ++row.n_explore; else ++row.n_exploit;
            }

            env::StepOutcome out = world.step(action);
            student.store({obs, action, out.reward, out.observation, out.done});
            if (std::optional<double> loss = student.train_step(rng)) {
                loss_sum += *loss;
                ++loss_n;
            }

            row.undiscounted_return += out.reward;
            row.discounted_return += discount * out.reward;
            discount *= acfg.gamma;
            step_rewards.push_back(out.reward);
            collision = out.info.collision;
            success = out.info.reached_goal;
            obs = std::move(out.observation);
            ++t;
        }

        row.distance_m = world.ego_distance();
        row.mean_speed_mps = world.elapsed() > 0.0 ? row.distance_m / world.elapsed() : 0.0;
        row.collision = collision;
        row.success = success;
        row.mean_loss = loss_n > 0 ? loss_sum / double(loss_n) : 0.0;
        if (hooks && hooks->on_episode) hooks->on_episode(row, step_rewards);
        result.metrics.push_back(row);
    }

    result.model = student.eval_net();
    if (!cfg.out_dir.empty()) {
        ensure_dir(cfg.out_dir);
        result.metrics_path = (fs::path(cfg.out_dir) / "metrics.csv").string();
        result.model_path = (fs::path(cfg.out_dir) / "model.trlq").string();
        write_metrics_csv(result.metrics_path, result.metrics);
        nn::save_network(result.model, result.model_path);
    }
    return result;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const TrainHooks* hooks) {
    return run_training(cfg, nullptr, hooks);
}

TrainResult transfer_train(const std::string& expert_path, const RunConfig& cfg,
                           const TrainHooks* hooks) {
    env::IntersectionEnv probe(cfg.env, cfg.task);
    transfer::ExpertHandle expert =
        transfer::load_expert(expert_path, probe.observation_size());
    RunConfig full = cfg;
    if (!full.transfer) full.transfer.emplace();
    return run_training(full, &expert, hooks);
}

EvalSummary evaluate(const nn::Network& net, env::Task task, int episodes, uint64_t seed,
                     const env::EnvConfig& env_cfg) {
    if (episodes < 1) throw ConfigError("evaluation needs at least one episode");
    env::IntersectionEnv world(env_cfg, task);
    if (net.input_dim() != world.observation_size())
        throw ModelFormatError("model input dimension does not match the observation size");

    EvalSummary sum;
    sum.episodes = episodes;
    for (int e = 0; e < episodes; ++e) {
        std::vector<double> obs = world.reset(derive_seed(seed, kSeedStreamEpisodeBase + uint64_t(e)));
        EpisodeMetrics row;
        row.episode = e;
        double discount = 1.0;
        double gamma = 0.95;
        while (!world.done()) {
            int action = nn::argmax(nn::forward(net, obs));
            env::StepOutcome out = world.step(action);
            row.undiscounted_return += out.reward;
            row.discounted_return += discount * out.reward;
            discount *= gamma;
            row.collision = out.info.collision;
            row.success = out.info.reached_goal;
            obs = std::move(out.observation);
        }
        row.distance_m = world.ego_distance();
        row.mean_speed_mps = world.elapsed() > 0.0 ? row.distance_m / world.elapsed() : 0.0;
        sum.per_episode.push_back(row);
        sum.success_rate += row.success ? 1.0 : 0.0;
        sum.mean_return += row.undiscounted_return;
        sum.mean_distance += row.distance_m;
    }
    sum.success_rate /= double(episodes);
    sum.mean_return /= double(episodes);
    sum.mean_distance /= double(episodes);
    return sum;
}

EvalSummary evaluate_file(const std::string& model_path, env::Task task, int episodes,
                          uint64_t seed, const env::EnvConfig& env_cfg,
                          const std::string& out_dir) {
    nn::Network net = nn::load_network(model_path);
    EvalSummary sum = evaluate(net, task, episodes, seed, env_cfg);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), sum.per_episode);
    }
    return sum;
}

std::string format_heatmap_csv(const std::vector<HeatmapCell>& cells) {
    std::string out = "algo,source_task,target_task,episodes,success_rate\n";
    for (const HeatmapCell& c : cells) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", c.success_rate);
        out += std::string(algo_name(c.algo)) + ',' + env::task_name(c.source) + ',' +
               env::task_name(c.target) + ',' + std::to_string(c.episodes) + ',' + buf + '\n';
    }
    return out;
}

std::vector<HeatmapCell> cross_evaluate(
    const std::vector<std::pair<env::Task, std::string>>& models,
    const std::vector<env::Task>& targets, int episodes, uint64_t seed,
    const RunConfig& base, CrossMode mode, int finetune_episodes,
    const std::string& out_dir) {
    if (models.empty()) throw ConfigError("cross evaluation needs at least one source model");
    if (targets.empty()) throw ConfigError("cross evaluation needs at least one target task");
    if (mode == CrossMode::Finetune && finetune_episodes < 1)
        throw ConfigError("finetune mode needs a positive episode budget");

    std::vector<HeatmapCell> cells;
    uint64_t cell_index = 0;
    for (const auto& [source, path] : models) {
        nn::Network net = nn::load_network(path);
        Algo algo = net.head == nn::HeadKind::Dueling ? Algo::Dueling : Algo::Dql;
        for (env::Task target : targets) {
            uint64_t cell_seed = derive_seed(seed, kSeedStreamCellBase + cell_index);
            ++cell_index;
            EvalSummary sum;
            if (mode == CrossMode::Frozen) {
                sum = evaluate(net, target, episodes, cell_seed, base.env);
            } else {
                RunConfig fcfg = base;
                fcfg.algo = algo;
                fcfg.task = target;
                fcfg.episodes = finetune_episodes;
                fcfg.seed = cell_seed;
                fcfg.out_dir.clear();
                TrainResult student = transfer_train(path, fcfg);
                sum = evaluate(student.model, target, episodes,
                               derive_seed(cell_seed, kSeedStreamEval), base.env);
            }
            cells.push_back({algo, source, target, episodes, sum.success_rate});
        }
    }

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::string path = (fs::path(out_dir) / "heatmap.csv").string();
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + path);
        std::string body = format_heatmap_csv(cells);
        f.write(body.data(), std::streamsize(body.size()));
        if (!f) throw IoError("write failed: " + path);
    }
    return cells;
}

void emit_report(const std::string& run_dir, int window) {
    if (window < 1) throw ConfigError("smoothing window must be positive");
    fs::path dir(run_dir);
    fs::path metrics_path = dir / "metrics.csv";
    if (!fs::exists(metrics_path)) throw IoError("no metrics.csv in " + run_dir);
    std::vector<EpisodeMetrics> rows = read_metrics_csv(metrics_path.string());
    if (rows.empty()) throw IoError("metrics.csv has no rows in " + run_dir);

    fs::path rep = dir / "report";
    ensure_dir(rep.string());

    auto write_curve = [&rep](const char* name, const char* col,
                              const std::vector<std::pair<int, double>>& points) {
        fs::path p = rep / name;
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + p.string());
        f << "episode," << col << '\n';
        char buf[64];
        for (const auto& [ep, v] : points) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            f << ep << ',' << buf << '\n';
        }
        if (!f) throw IoError("write failed: " + p.string());
    };

    std::vector<double> returns;
    for (const EpisodeMetrics& m : rows) returns.push_back(m.undiscounted_return);
    std::vector<double> smoothed = moving_average(returns, window);
    std::vector<std::pair<int, double>> pts;
    // Window-end anchoring; a window wider than the series yields one row at
    // the last episode.
    size_t first_end = rows.size() >= size_t(window) ? size_t(window) - 1 : rows.size() - 1;
    for (size_t i = 0; i < smoothed.size(); ++i)
        pts.push_back({rows[first_end + i].episode, smoothed[i]});
    write_curve("return_smoothed.csv", "smoothed_return", pts);

    pts.clear();
    for (const EpisodeMetrics& m : rows) pts.push_back({m.episode, m.distance_m});
    write_curve("distance_curve.csv", "distance_m", pts);
    pts.clear();
    for (const EpisodeMetrics& m : rows) pts.push_back({m.episode, m.mean_speed_mps});
    write_curve("speed_curve.csv", "mean_speed_mps", pts);
    pts.clear();
    for (const EpisodeMetrics& m : rows) pts.push_back({m.episode, m.mean_loss});
    write_curve("loss_curve.csv", "mean_loss", pts);

    fs::path heat = dir / "heatmap.csv";
    if (fs::exists(heat)) fs::copy_file(heat, rep / "heatmap.csv", fs::copy_options::overwrite_existing);
}

}  // namespace trl::harness
