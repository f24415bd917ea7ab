#include "trl/harness/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trl/errors.hpp"

namespace trl::harness {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string format_metrics_csv(std::span<const EpisodeMetrics> rows) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const EpisodeMetrics& m : rows) {
        out += std::to_string(m.episode);
        out += ',' + fmt(m.undiscounted_return);
        out += ',' + fmt(m.discounted_return);
        out += ',' + fmt(m.distance_m);
        out += ',' + fmt(m.mean_speed_mps);
        out += ',' + std::to_string(int(m.collision));
        out += ',' + std::to_string(int(m.success));
        out += ',' + fmt(m.mean_loss);
        out += ',' + std::to_string(m.n_transfer);
        out += ',' + std::to_string(m.n_explore);
        out += ',' + std::to_string(m.n_exploit);
        out += '\n';
    }
    return out;
}

void write_metrics_csv(const std::string& path, std::span<const EpisodeMetrics> rows) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    std::string body = format_metrics_csv(rows);
    f.write(body.data(), std::streamsize(body.size()));
    if (!f) throw IoError("write failed: " + path);
}

std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open metrics file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty metrics file: " + path);
    if (line != kMetricsHeader) throw IoError("unexpected metrics header in " + path);

    std::vector<EpisodeMetrics> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) throw IoError("malformed metrics row in " + path);
        EpisodeMetrics m;
        m.episode = std::stoi(cells[0]);
        m.undiscounted_return = std::stod(cells[1]);
        m.discounted_return = std::stod(cells[2]);
        m.distance_m = std::stod(cells[3]);
        m.mean_speed_mps = std::stod(cells[4]);
        m.collision = cells[5] == "1";
        m.success = cells[6] == "1";
        m.mean_loss = std::stod(cells[7]);
        m.n_transfer = std::stol(cells[8]);
        m.n_explore = std::stol(cells[9]);
        m.n_exploit = std::stol(cells[10]);
        rows.push_back(m);
    }
    return rows;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
    if (window < 1) throw std::invalid_argument("window must be positive");
    if (series.empty()) return {};
    size_t w = size_t(window);
    if (w >= series.size()) {
        double sum = 0.0;
        for (double v : series) sum += v;
        return {sum / double(series.size())};
    }
    std::vector<double> out;
    out.reserve(series.size() - w + 1);
    double sum = 0.0;
    for (size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i + 1 >= w) {
            out.push_back(sum / double(w));
            sum -= series[i + 1 - w];
        }
    }
    return out;
}

}  // namespace trl::harness
