#include "trl/harness/config.hpp"

#include <fstream>
#include <sstream>

#include "trl/errors.hpp"

namespace trl::harness {

const char* algo_name(Algo a) { return a == Algo::Dql ? "dql" : "dueling"; }

Algo parse_algo(const std::string& s) {
    if (s == "dql") return Algo::Dql;
    if (s == "dueling") return Algo::Dueling;
    throw ConfigError("unknown algo '" + s + "', expected dql or dueling");
}

env::Task parse_task(const std::string& s) {
    if (s == "left") return env::Task::LeftTurn;
    if (s == "straight") return env::Task::Straight;
    if (s == "right") return env::Task::RightTurn;
    throw ConfigError("unknown task '" + s + "', expected left, straight or right");
}

void RunConfig::validate() const {
    if (episodes < 1) throw ConfigError("episodes must be positive");
    if (epsilon_decay_frac <= 0.0 || epsilon_decay_frac > 1.0)
        throw ConfigError("epsilon decay fraction must be in (0, 1]");
    agent.validate();
    env.validate();
    if (net.stream_hidden < 0) throw ConfigError("stream width must be non-negative");
    for (int h : net.trunk_hidden)
        if (h < 1) throw ConfigError("trunk widths must be positive");
    if (transfer) {
        if (transfer->beta0 < 0.0 || transfer->beta0 > 1.0)
            throw ConfigError("beta0 must be in [0, 1]");
        if (transfer->t_tran < 0) throw ConfigError("transfer span must be non-negative");
        if (transfer->t_exp < -1) throw ConfigError("exploration hold must be >= -1");
    }
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        std::string t = strip(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = strip(t.substr(0, eq));
        std::string val = strip(t.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    if (v.empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(int(to_long(key, item)));
    return out;
}

}  // namespace

void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) {
        if (key == "run.algo") cfg.algo = parse_algo(val);
        else if (key == "run.task") cfg.task = parse_task(val);
        else if (key == "run.episodes") cfg.episodes = int(to_long(key, val));
        else if (key == "run.seed") cfg.seed = uint64_t(to_long(key, val));
        else if (key == "run.out") cfg.out_dir = val;
        else if (key == "agent.gamma") cfg.agent.gamma = to_double(key, val);
        else if (key == "agent.learning_rate") cfg.agent.learning_rate = to_double(key, val);
        else if (key == "agent.epsilon_start") cfg.agent.epsilon.start = to_double(key, val);
        else if (key == "agent.epsilon_end") cfg.agent.epsilon.end = to_double(key, val);
        else if (key == "agent.epsilon_decay_frac") cfg.epsilon_decay_frac = to_double(key, val);
        else if (key == "agent.batch_size") cfg.agent.batch_size = int(to_long(key, val));
        else if (key == "agent.target_sync") cfg.agent.target_sync_interval = int(to_long(key, val));
        else if (key == "agent.buffer_capacity") cfg.agent.buffer_capacity = size_t(to_long(key, val));
        else if (key == "env.sim_hz") cfg.env.sim_hz = to_double(key, val);
        else if (key == "env.episode_duration") cfg.env.episode_duration = to_double(key, val);
        else if (key == "env.n_vehicles") cfg.env.n_vehicles = int(to_long(key, val));
        else if (key == "env.decision_period") cfg.env.decision_period = to_double(key, val);
        else if (key == "env.n_observed") cfg.env.n_observed = int(to_long(key, val));
        else if (key == "net.trunk") cfg.net.trunk_hidden = to_int_list(key, val);
        else if (key == "net.stream_hidden") cfg.net.stream_hidden = int(to_long(key, val));
        else if (key == "transfer.beta0") {
            if (!cfg.transfer) cfg.transfer.emplace();
            cfg.transfer->beta0 = to_double(key, val);
        } else if (key == "transfer.ttran") {
            if (!cfg.transfer) cfg.transfer.emplace();
            cfg.transfer->t_tran = to_long(key, val);
        } else if (key == "transfer.texp") {
            if (!cfg.transfer) cfg.transfer.emplace();
            cfg.transfer->t_exp = to_long(key, val);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
}

}  // namespace trl::harness
