#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace trl::agent {

struct Transition {
    std::vector<double> s;
    int a = 0;
    double r = 0.0;
    std::vector<double> s_next;
    bool done = false;
};

// Fixed-capacity ring: once full, each store overwrites the oldest entry.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : cap_(capacity) {
        if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    }

    void store(Transition t) {
        if (data_.size() < cap_) {
            data_.push_back(std::move(t));
        } else {
            data_[cursor_] = std::move(t);
        }
        cursor_ = (cursor_ + 1) % cap_;
    }

    size_t size() const { return data_.size(); }
    size_t capacity() const { return cap_; }
    const Transition& at(size_t i) const { return data_[i]; }

private:
    std::vector<Transition> data_;
    size_t cap_;
    size_t cursor_ = 0;
};

}  // namespace trl::agent
