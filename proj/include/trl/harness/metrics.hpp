#pragma once

#include <span>
#include <string>
#include <vector>

namespace trl::harness {

struct EpisodeMetrics {
    int episode = 0;
    double undiscounted_return = 0.0;
    double discounted_return = 0.0;
    double distance_m = 0.0;
    double mean_speed_mps = 0.0;
    bool collision = false;
    bool success = false;
    double mean_loss = 0.0;
    long n_transfer = 0;
    long n_explore = 0;
    long n_exploit = 0;
};

inline constexpr const char* kMetricsHeader =
    "episode,return,discounted_return,distance_m,mean_speed_mps,collision,success,"
    "mean_loss,n_transfer,n_explore,n_exploit";

std::string format_metrics_csv(std::span<const EpisodeMetrics> rows);
void write_metrics_csv(const std::string& path, std::span<const EpisodeMetrics> rows);
std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path);

// Trailing moving average: out[i] = mean(series[i .. i+window-1]), so the
// result has size() - window + 1 entries. A window wider than the series
// collapses to the single full mean.
std::vector<double> moving_average(std::span<const double> series, int window);

}  // namespace trl::harness
