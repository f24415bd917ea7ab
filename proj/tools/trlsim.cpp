#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trl/errors.hpp"
#include "trl/harness/runner.hpp"

namespace {

using namespace trl;
using harness::RunConfig;

struct CommonFlags {
    std::string task = "straight";
    std::string algo = "dueling";
    int episodes = -1;
    long seed = -1;
    std::string config_path;
    std::string out;
    bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_algo = true) {
    cmd->add_option("--task", f.task, "driving task: left, straight or right");
    if (with_algo) cmd->add_option("--algo", f.algo, "learner: dql or dueling");
    cmd->add_option("--episodes", f.episodes, "episode count");
    cmd->add_option("--seed", f.seed, "run seed");
    cmd->add_option("--config", f.config_path, "key=value config file");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_flag("--paper-scale", f.paper_scale, "use the full-size episode budgets");
}

// Precedence: built-in defaults, then config file, then explicit flags.
RunConfig build_config(const CommonFlags& f, const CLI::App* cmd, int default_episodes) {
    RunConfig cfg;
    cfg.episodes = default_episodes;
    if (!f.config_path.empty()) harness::apply_kv(cfg, harness::read_kv_file(f.config_path));
    if (cmd->count("--task")) cfg.task = harness::parse_task(f.task);
    if (cmd->get_option_no_throw("--algo") && cmd->count("--algo"))
        cfg.algo = harness::parse_algo(f.algo);
    if (f.paper_scale) cfg.episodes = 2 * default_episodes;
    if (cmd->count("--episodes")) cfg.episodes = f.episodes;
    if (cmd->count("--seed")) cfg.seed = uint64_t(f.seed);
    if (cmd->count("--out")) cfg.out_dir = f.out;
    return cfg;
}

void print_train_summary(const harness::TrainResult& res) {
    int n = int(res.metrics.size());
    int tail = std::min(100, n);
    double succ = 0.0, ret = 0.0;
    for (int i = n - tail; i < n; ++i) {
        succ += res.metrics[size_t(i)].success ? 1.0 : 0.0;
        ret += res.metrics[size_t(i)].undiscounted_return;
    }
    std::printf("episodes=%d last%d_success=%.3f last%d_return=%.3f\n", n, tail,
                succ / tail, tail, ret / tail);
    if (!res.model_path.empty())
        std::printf("model=%s\nmetrics=%s\n", res.model_path.c_str(), res.metrics_path.c_str());
}

int run(int argc, char** argv) {
    CLI::App app{"unsignalized-intersection driving simulator and Q-learning harness"};
    app.require_subcommand(1);

    CommonFlags tf;
    CLI::App* train = app.add_subcommand("train", "train a policy from scratch");
    add_common(train, tf);

    CommonFlags ef;
    std::string eval_model;
    CLI::App* evaluate = app.add_subcommand("evaluate", "greedy evaluation of a saved model");
    add_common(evaluate, ef, false);
    evaluate->add_option("--model", eval_model, "model file")->required();

    CommonFlags xf;
    std::string expert_path;
    double beta0 = -1.0;
    long ttran = -2, texp = -2;
    CLI::App* ttrain = app.add_subcommand("transfer-train", "train against a frozen expert");
    add_common(ttrain, xf);
    ttrain->add_option("--expert", expert_path, "expert model file")->required();
    ttrain->add_option("--beta0", beta0, "initial expert-copy probability");
    ttrain->add_option("--ttran", ttran, "expert decay span in decision steps (0 = auto)");
    ttrain->add_option("--texp", texp, "epsilon hold span in decision steps (-1 = auto)");

    CommonFlags cf;
    std::string model_left, model_straight, model_right;
    std::string targets_flag = "left,straight,right";
    std::string mode_flag = "frozen";
    int finetune_episodes = 100;
    CLI::App* cross = app.add_subcommand("cross-eval", "success-rate matrix of saved models");
    add_common(cross, cf, false);
    cross->add_option("--model-left", model_left, "model trained on the left-turn task");
    cross->add_option("--model-straight", model_straight, "model trained on the straight task");
    cross->add_option("--model-right", model_right, "model trained on the right-turn task");
    cross->add_option("--targets", targets_flag, "comma list of target tasks");
    cross->add_option("--mode", mode_flag, "frozen or finetune");
    cross->add_option("--finetune-episodes", finetune_episodes,
                      "training budget per cell in finetune mode");

    std::string report_dir;
    int window = 100;
    CLI::App* report = app.add_subcommand("report", "write plot-ready curves for a run");
    report->add_option("--run", report_dir, "run directory containing metrics.csv")->required();
    report->add_option("--window", window, "moving-average window");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help or the parse diagnostic
        return code == 0 ? 0 : 2;
    }

    if (train->parsed()) {
        RunConfig cfg = build_config(tf, train, 2000);
        print_train_summary(harness::train(cfg));
    } else if (evaluate->parsed()) {
        RunConfig cfg = build_config(ef, evaluate, 10);
        harness::EvalSummary sum = harness::evaluate_file(eval_model, cfg.task, cfg.episodes,
                                                          cfg.seed, cfg.env, cfg.out_dir);
        std::printf("episodes=%d success_rate=%.3f mean_return=%.3f mean_distance=%.1f\n",
                    sum.episodes, sum.success_rate, sum.mean_return, sum.mean_distance);
    } else if (ttrain->parsed()) {
        RunConfig cfg = build_config(xf, ttrain, 500);
        if (!cfg.transfer) cfg.transfer.emplace();
        if (ttrain->count("--beta0")) cfg.transfer->beta0 = beta0;
        if (ttrain->count("--ttran")) cfg.transfer->t_tran = ttran;
        if (ttrain->count("--texp")) cfg.transfer->t_exp = texp;
        print_train_summary(harness::transfer_train(expert_path, cfg));
    } else if (cross->parsed()) {
        RunConfig cfg = build_config(cf, cross, 10);
        std::vector<std::pair<env::Task, std::string>> models;
        if (!model_left.empty()) models.push_back({env::Task::LeftTurn, model_left});
        if (!model_straight.empty()) models.push_back({env::Task::Straight, model_straight});
        if (!model_right.empty()) models.push_back({env::Task::RightTurn, model_right});
        std::vector<env::Task> targets;
        std::stringstream ss(targets_flag);
        std::string item;
        while (std::getline(ss, item, ',')) targets.push_back(harness::parse_task(item));
        harness::CrossMode mode;
        if (mode_flag == "frozen") mode = harness::CrossMode::Frozen;
        else if (mode_flag == "finetune") mode = harness::CrossMode::Finetune;
        else throw ConfigError("unknown mode '" + mode_flag + "', expected frozen or finetune");
        std::vector<harness::HeatmapCell> cells = harness::cross_evaluate(
            models, targets, cfg.episodes, cfg.seed, cfg, mode, finetune_episodes, cfg.out_dir);
        std::fputs(harness::format_heatmap_csv(cells).c_str(), stdout);
    } else if (report->parsed()) {
        harness::emit_report(report_dir, window);
        std::printf("report written under %s/report\n", report_dir.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const ModelFormatError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
