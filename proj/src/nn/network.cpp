#include "trl/nn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "trl/rng.hpp"

namespace trl::nn {

int Network::input_dim() const {
    if (!trunk.empty()) return trunk.front().in;
    return head == HeadKind::Plain ? plain.front().in : value.front().in;
}

int Network::n_actions() const {
    return head == HeadKind::Plain ? plain.back().out : adv.back().out;
}

size_t Network::param_count() const {
    size_t n = 0;
    for (const auto* stack : {&trunk, &plain, &value, &adv})
        for (const Layer& l : *stack) n += l.w.size() + l.b.size();
    return n;
}

static Layer init_layer(int in, int out, Activation act, Rng& rng) {
    Layer l{in, out, act, std::vector<double>(size_t(in) * out), std::vector<double>(out, 0.0)};
    double bound = std::sqrt(6.0 / double(in + out));
    for (double& w : l.w) w = rng.uniform(-bound, bound);
    return l;
}

Network make_network(const Arch& arch, HeadKind head, uint64_t seed) {
    if (arch.input_dim < 1 || arch.n_actions < 1)
        throw std::invalid_argument("network needs positive input and action dims");
    for (int h : arch.trunk_hidden)
        if (h < 1) throw std::invalid_argument("trunk widths must be positive");
    if (arch.stream_hidden < 0)
        throw std::invalid_argument("stream width must be non-negative");

    Rng rng(seed);
    Network net;
    net.head = head;
    int cur = arch.input_dim;
    for (int h : arch.trunk_hidden) {
        net.trunk.push_back(init_layer(cur, h, Activation::Relu, rng));
        cur = h;
    }
    if (head == HeadKind::Plain) {
        net.plain.push_back(init_layer(cur, arch.n_actions, Activation::Identity, rng));
    } else {
        if (arch.stream_hidden > 0) {
            net.value.push_back(init_layer(cur, arch.stream_hidden, Activation::Relu, rng));
            net.value.push_back(init_layer(arch.stream_hidden, 1, Activation::Identity, rng));
            net.adv.push_back(init_layer(cur, arch.stream_hidden, Activation::Relu, rng));
            net.adv.push_back(init_layer(arch.stream_hidden, arch.n_actions, Activation::Identity, rng));
        } else {
            net.value.push_back(init_layer(cur, 1, Activation::Identity, rng));
            net.adv.push_back(init_layer(cur, arch.n_actions, Activation::Identity, rng));
        }
    }
    return net;
}

static void layer_forward(const Layer& l, const std::vector<double>& x, std::vector<double>& z,
                          std::vector<double>& a) {
    z.assign(size_t(l.out), 0.0);
    for (int i = 0; i < l.out; ++i) {
        const double* row = l.w.data() + size_t(i) * l.in;
        double acc = l.b[i];
        for (int j = 0; j < l.in; ++j) acc += row[j] * x[j];
        z[i] = acc;
    }
    a = z;
    if (l.act == Activation::Relu)
        for (double& v : a) v = v > 0.0 ? v : 0.0;
}

namespace {

// Per-layer input and pre-activation, kept for the backward pass.
struct StackTrace {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> zs;
    std::vector<double> out;
};

StackTrace run_stack(const std::vector<Layer>& stack, std::vector<double> x) {
    StackTrace t;
    for (const Layer& l : stack) {
        std::vector<double> z, a;
        layer_forward(l, x, z, a);
        t.inputs.push_back(std::move(x));
        t.zs.push_back(std::move(z));
        x = std::move(a);
    }
    t.out = std::move(x);
    return t;
}

// Backpropagates `dout` through the stack, adding scaled gradients; returns
// the gradient with respect to the stack input.
std::vector<double> backprop_stack(const std::vector<Layer>& stack, const StackTrace& t,
                                   std::vector<double> dout, double scale,
                                   std::vector<LayerGrad>& grads) {
    for (size_t li = stack.size(); li-- > 0;) {
        const Layer& l = stack[li];
        if (l.act == Activation::Relu)
            for (int i = 0; i < l.out; ++i)
                if (t.zs[li][i] <= 0.0) dout[i] = 0.0;
        const std::vector<double>& x = t.inputs[li];
        LayerGrad& g = grads[li];
        std::vector<double> dx(size_t(l.in), 0.0);
        for (int i = 0; i < l.out; ++i) {
            double d = dout[i];
            g.b[i] += scale * d;
            double* gw = g.w.data() + size_t(i) * l.in;
            const double* w = l.w.data() + size_t(i) * l.in;
            for (int j = 0; j < l.in; ++j) {
                gw[j] += scale * d * x[j];
                dx[j] += w[j] * d;
            }
        }
        dout = std::move(dx);
    }
    return dout;
}

std::vector<double> combine_dueling(const std::vector<double>& v, const std::vector<double>& a) {
    double mean = 0.0;
    for (double x : a) mean += x;
    mean /= double(a.size());
    std::vector<double> q(a.size());
    for (size_t i = 0; i < a.size(); ++i) q[i] = v[0] + a[i] - mean;
    return q;
}

}  // namespace

std::vector<double> forward(const Network& net, std::span<const double> input) {
    std::vector<double> x(input.begin(), input.end());
    for (const Layer& l : net.trunk) {
        std::vector<double> z, a;
        layer_forward(l, x, z, a);
        x = std::move(a);
    }
    if (net.head == HeadKind::Plain) {
        for (const Layer& l : net.plain) {
            std::vector<double> z, a;
            layer_forward(l, x, z, a);
            x = std::move(a);
        }
        return x;
    }
    StackTrace tv = run_stack(net.value, x);
    StackTrace ta = run_stack(net.adv, std::move(x));
    return combine_dueling(tv.out, ta.out);
}

Gradients zero_gradients(const Network& net) {
    Gradients g;
    auto fill = [](const std::vector<Layer>& stack, std::vector<LayerGrad>& out) {
        for (const Layer& l : stack)
            out.push_back({std::vector<double>(l.w.size(), 0.0), std::vector<double>(l.b.size(), 0.0)});
    };
    fill(net.trunk, g.trunk);
    fill(net.plain, g.plain);
    fill(net.value, g.value);
    fill(net.adv, g.adv);
    return g;
}

double accumulate_backward(const Network& net, std::span<const double> input, int action,
                           double target, double scale, Gradients& grads) {
    if (action < 0 || action >= net.n_actions())
        throw std::invalid_argument("action index out of range");

    StackTrace trunk_t = run_stack(net.trunk, {input.begin(), input.end()});
    double q_a;
    std::vector<double> dtrunk;
    if (net.head == HeadKind::Plain) {
        StackTrace head_t = run_stack(net.plain, trunk_t.out);
        q_a = head_t.out[size_t(action)];
        double dloss = -2.0 * (target - q_a);
        std::vector<double> dq(head_t.out.size(), 0.0);
        dq[size_t(action)] = dloss;
        dtrunk = backprop_stack(net.plain, head_t, std::move(dq), scale, grads.plain);
    } else {
        StackTrace value_t = run_stack(net.value, trunk_t.out);
        StackTrace adv_t = run_stack(net.adv, trunk_t.out);
        std::vector<double> q = combine_dueling(value_t.out, adv_t.out);
        q_a = q[size_t(action)];
        double dloss = -2.0 * (target - q_a);
        // dQ_a/dV = 1 and dQ_a/dA_j = [j == a] - 1/K from the mean-subtracted
        // aggregation.
        std::vector<double> dv{dloss};
        std::vector<double> da(q.size());
        double k_inv = 1.0 / double(q.size());
        for (size_t j = 0; j < q.size(); ++j)
            da[j] = dloss * ((int(j) == action ? 1.0 : 0.0) - k_inv);
        std::vector<double> d1 = backprop_stack(net.value, value_t, std::move(dv), scale, grads.value);
        std::vector<double> d2 = backprop_stack(net.adv, adv_t, std::move(da), scale, grads.adv);
        dtrunk.assign(d1.size(), 0.0);
        for (size_t i = 0; i < d1.size(); ++i) dtrunk[i] = d1[i] + d2[i];
    }
    backprop_stack(net.trunk, trunk_t, std::move(dtrunk), scale, grads.trunk);
    double err = target - q_a;
    return err * err;
}

std::pair<double, Gradients> backward(const Network& net, std::span<const double> input,
                                      int action, double target) {
    Gradients g = zero_gradients(net);
    double loss = accumulate_backward(net, input, action, target, 1.0, g);
    return {loss, std::move(g)};
}

void sgd_update(Network& net, const Gradients& grads, double lr) {
    auto apply = [lr](std::vector<Layer>& stack, const std::vector<LayerGrad>& gs) {
        for (size_t li = 0; li < stack.size(); ++li) {
            Layer& l = stack[li];
            const LayerGrad& g = gs[li];
            for (size_t i = 0; i < l.w.size(); ++i) l.w[i] -= lr * g.w[i];
            for (size_t i = 0; i < l.b.size(); ++i) l.b[i] -= lr * g.b[i];
        }
    };
    apply(net.trunk, grads.trunk);
    apply(net.plain, grads.plain);
    apply(net.value, grads.value);
    apply(net.adv, grads.adv);
}

int argmax(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < int(v.size()); ++i)
        if (v[size_t(i)] > v[size_t(best)]) best = i;
    return best;
}

template <typename Net, typename Ptr>
static std::vector<Ptr> collect_params(Net& net) {
    std::vector<Ptr> out;
    auto take = [&out](auto& stack) {
        for (auto& l : stack) {
            for (auto& w : l.w) out.push_back(&w);
            for (auto& b : l.b) out.push_back(&b);
        }
    };
    take(net.trunk);
    take(net.plain);
    take(net.value);
    take(net.adv);
    return out;
}

std::vector<double*> param_pointers(Network& net) {
    return collect_params<Network, double*>(net);
}

std::vector<const double*> param_pointers(const Network& net) {
    return collect_params<const Network, const double*>(net);
}

std::vector<const double*> grad_pointers(const Gradients& grads) {
    std::vector<const double*> out;
    auto take = [&out](const std::vector<LayerGrad>& stack) {
        for (const LayerGrad& g : stack) {
            for (const double& w : g.w) out.push_back(&w);
            for (const double& b : g.b) out.push_back(&b);
        }
    };
    take(grads.trunk);
    take(grads.plain);
    take(grads.value);
    take(grads.adv);
    return out;
}

}  // namespace trl::nn
