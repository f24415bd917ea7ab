#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trl::nn {

enum class Activation : uint8_t { Identity = 0, Relu = 1 };

enum class HeadKind : uint8_t { Plain = 0, Dueling = 1 };

struct Layer {
    int in = 0;
    int out = 0;
    Activation act = Activation::Identity;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
};

// Fully connected trunk followed by either a single linear output layer
// (Plain) or separate value and advantage streams recombined with the
// mean-subtracted aggregation (Dueling).
struct Network {
    HeadKind head = HeadKind::Plain;
    std::vector<Layer> trunk;
    std::vector<Layer> plain;  // one linear layer when head == Plain
    std::vector<Layer> value;  // ends in a single unit when head == Dueling
    std::vector<Layer> adv;    // ends in n_actions units when head == Dueling

    int input_dim() const;
    int n_actions() const;
    size_t param_count() const;
};

struct Arch {
    int input_dim = 0;
    int n_actions = 0;
    std::vector<int> trunk_hidden;  // relu widths; may be empty
    int stream_hidden = 0;          // dueling stream width; 0 keeps streams linear
};

// Weights drawn uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
Network make_network(const Arch& arch, HeadKind head, uint64_t seed);

std::vector<double> forward(const Network& net, std::span<const double> input);

struct LayerGrad {
    std::vector<double> w;
    std::vector<double> b;
};

struct Gradients {
    std::vector<LayerGrad> trunk, plain, value, adv;
};

Gradients zero_gradients(const Network& net);

// Squared TD error on the chosen action:  (target - q[action])^2.
// Gradients scaled by `scale` are added into `grads`; returns the loss.
double accumulate_backward(const Network& net, std::span<const double> input, int action,
                           double target, double scale, Gradients& grads);

std::pair<double, Gradients> backward(const Network& net, std::span<const double> input,
                                      int action, double target);

// params <- params - lr * grads
void sgd_update(Network& net, const Gradients& grads, double lr);

// Lowest index wins ties.
int argmax(std::span<const double> v);

// Flat parameter views, used by the serializer and by gradient checks.
std::vector<double*> param_pointers(Network& net);
std::vector<const double*> param_pointers(const Network& net);
std::vector<const double*> grad_pointers(const Gradients& grads);

}  // namespace trl::nn
