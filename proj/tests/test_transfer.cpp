#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <vector>

#include "trl/agent/qagent.hpp"
#include "trl/errors.hpp"
#include "trl/nn/network.hpp"
#include "trl/nn/serialize.hpp"
#include "trl/transfer/transfer.hpp"

using namespace trl;
using namespace trl::transfer;

namespace {

nn::Network small_net(int in, int actions, uint64_t seed, nn::HeadKind head = nn::HeadKind::Plain) {
    nn::Arch arch;
    arch.input_dim = in;
    arch.n_actions = actions;
    arch.trunk_hidden = {8};
    arch.stream_hidden = 4;
    return nn::make_network(arch, head, seed);
}

agent::QAgent small_student(uint64_t seed) {
    agent::AgentConfig cfg;
    cfg.epsilon.decay_episodes = 10;
    return agent::QAgent(small_net(4, 3, seed), cfg);
}

std::vector<double> snapshot(const nn::Network& net) {
    std::vector<double> out;
    for (const double* p : nn::param_pointers(net)) out.push_back(*p);
    return out;
}

}  // namespace

TEST_CASE("expert-copy probability decays linearly and floors at zero") {
    TransferConfig cfg;
    cfg.beta0 = 0.8;
    cfg.t_tran = 100;
    CHECK(transfer_probability(0, cfg) == doctest::Approx(0.8));
    CHECK(transfer_probability(50, cfg) == doctest::Approx(0.4));
    CHECK(transfer_probability(100, cfg) == 0.0);
    CHECK(transfer_probability(100000, cfg) == 0.0);

    double prev = 1.0;
    for (long t = 0; t <= 140; ++t) {
        double p = transfer_probability(t, cfg);
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        CHECK(p <= cfg.beta0);
        prev = p;
    }
}

TEST_CASE("the three branch probabilities always partition unity") {
    for (double beta0 : {0.0, 0.3, 0.8, 1.0}) {
        for (double eps : {0.0, 0.05, 0.5, 1.0}) {
            for (long t : {0L, 10L, 50L, 100L, 500L}) {
                TransferConfig cfg;
                cfg.beta0 = beta0;
                cfg.t_tran = 100;
                double p1 = transfer_probability(t, cfg);
                double p2 = eps * (1.0 - p1);
                double p3 = (1.0 - eps) * (1.0 - p1);
                CHECK(std::abs(p1 + p2 + p3 - 1.0) <= 1e-15);
            }
        }
    }
}

TEST_CASE("configuration bounds are enforced") {
    TransferConfig ok;
    ok.t_tran = 10;
    CHECK_NOTHROW(ok.validate());
    TransferConfig bad = ok;
    bad.beta0 = 1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ok;
    bad.beta0 = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ok;
    bad.t_tran = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ok;
    bad.t_exp = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("full belief at the start always copies the expert") {
    agent::QAgent student = small_student(1);
    ExpertHandle expert{small_net(4, 3, 2), "src"};
    TransferConfig cfg;
    cfg.beta0 = 1.0;
    cfg.t_tran = 100;
    Rng rng(5);
    std::vector<double> obs{0.1, -0.2, 0.3, 0.9};
    int expert_greedy = nn::argmax(nn::forward(expert.net, obs));
    for (int i = 0; i < 50; ++i) {
        TransferSelection sel = select_action_with_transfer(obs, student, expert, 0.5, 0, cfg, rng);
        CHECK(sel.rule == RuleTag::Transfer);
        CHECK(sel.action == expert_greedy);
    }
}

TEST_CASE("after the decay span the policy is plain epsilon-greedy on the same stream") {
    agent::QAgent student = small_student(3);
    ExpertHandle expert{small_net(4, 3, 4), "src"};
    TransferConfig cfg;
    cfg.beta0 = 0.8;
    cfg.t_tran = 50;
    std::vector<double> obs{0.4, 0.0, -0.7, 0.2};

    Rng rng_a(99), rng_b(99);
    for (int i = 0; i < 300; ++i) {
        TransferSelection sel =
            select_action_with_transfer(obs, student, expert, 0.3, 50 + i, cfg, rng_a);
        agent::TaggedAction plain = student.select_action_tagged(obs, 0.3, rng_b);
        CHECK(sel.rule != RuleTag::Transfer);
        CHECK(sel.action == plain.action);
        CHECK((sel.rule == RuleTag::Exploration) == plain.explored);
    }
}

TEST_CASE("zero initial belief reproduces epsilon-greedy from step zero") {
    agent::QAgent student = small_student(13);
    ExpertHandle expert{small_net(4, 3, 14), "src"};
    TransferConfig cfg;
    cfg.beta0 = 0.0;
    cfg.t_tran = 100;
    std::vector<double> obs{-0.3, 0.8, 0.1, 0.0};
    Rng rng_a(7), rng_b(7);
    for (long t = 0; t < 200; ++t) {
        TransferSelection sel = select_action_with_transfer(obs, student, expert, 0.4, t, cfg, rng_a);
        agent::TaggedAction plain = student.select_action_tagged(obs, 0.4, rng_b);
        CHECK(sel.action == plain.action);
        CHECK(sel.rule != RuleTag::Transfer);
        CHECK((sel.rule == RuleTag::Exploration) == plain.explored);
    }
}

TEST_CASE("rule frequencies match the nominal split within three sigma") {
    agent::QAgent student = small_student(21);
    ExpertHandle expert{small_net(4, 3, 22), "src"};
    TransferConfig cfg;
    cfg.beta0 = 0.8;
    cfg.t_tran = 1000;
    std::vector<double> obs{0.2, 0.2, -0.2, 0.5};
    Rng rng(31);
    const int n = 10000;
    std::array<int, 3> counts{};
    for (int i = 0; i < n; ++i) {
        TransferSelection sel = select_action_with_transfer(obs, student, expert, 0.5, 0, cfg, rng);
        ++counts[size_t(sel.rule)];
    }
    // Nominal (p1, p2, p3) = (0.8, 0.1, 0.1) at t=0.
    std::array<double, 3> p{0.8, 0.1, 0.1};
    for (int i = 0; i < 3; ++i) {
        double frac = double(counts[size_t(i)]) / n;
        double sigma = std::sqrt(p[size_t(i)] * (1.0 - p[size_t(i)]) / n);
        CHECK(std::abs(frac - p[size_t(i)]) <= 3.0 * sigma);
    }
}

TEST_CASE("expert parameters never change while the student trains") {
    ExpertHandle expert{small_net(6, 3, 40), "src"};
    std::vector<double> before = snapshot(expert.net);

    agent::AgentConfig acfg;
    acfg.batch_size = 8;
    acfg.buffer_capacity = 64;
    acfg.epsilon.decay_episodes = 10;
    agent::QAgent student(small_net(6, 3, 41), acfg);
    TransferConfig cfg;
    cfg.beta0 = 0.5;
    cfg.t_tran = 100;
    Rng rng(11);
    std::vector<double> obs{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    for (int i = 0; i < 100; ++i) {
        TransferSelection sel =
            select_action_with_transfer(obs, student, expert, 0.3, i, cfg, rng);
        agent::Transition tr;
        tr.s = obs;
        tr.a = sel.action;
        tr.r = 0.1;
        tr.s_next = obs;
        tr.done = (i % 10 == 0);
        student.store(std::move(tr));
        student.train_step(rng);
    }
    CHECK(student.train_steps() > 0);
    std::vector<double> after = snapshot(expert.net);
    CHECK(before == after);
}

TEST_CASE("saved experts reload with identical behavior") {
    auto path = (std::filesystem::temp_directory_path() / "trl_expert.trlq").string();
    nn::Network net = small_net(5, 3, 60, nn::HeadKind::Dueling);
    nn::save_network(net, path);

    ExpertHandle expert = load_expert(path, 5, "straight");
    CHECK(expert.source_label == "straight");
    Rng rng(71);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(5);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        auto a = nn::forward(net, x);
        auto b = nn::forward(expert.net, x);
        REQUIRE(a.size() == b.size());
        for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
    }

    CHECK_THROWS_AS(load_expert(path, 7), ModelFormatError);
    CHECK_THROWS_AS(load_expert("/nonexistent/expert.trlq", 5), IoError);
    std::filesystem::remove(path);
}
