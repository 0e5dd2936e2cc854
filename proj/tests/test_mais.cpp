// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ucsfl/mais.hpp"

using namespace ucsfl;

namespace {

// Single affine layer with zero weights: the logits are the biases.
Mlp constant_policy(const Eigen::VectorXd& logits) {
    Mlp net({kStateFeatures, static_cast<std::size_t>(logits.size())}, 1);
    net.weights[0].setZero();
    net.biases[0] = logits;
    return net;
}

AgentAction make_action(std::size_t split, std::vector<bool> bits) {
    AgentAction a;
    a.split = split;
    a.bits = std::move(bits);
    return a;
}

Environment tiny_env(std::uint64_t seed, std::size_t M, std::size_t U, const SplitProfile& profile) {
    return make_environment(seed, M, U, 200.0, FadingParams{}, RadioConfig{}, ComputeConfig{}, profile, NbcdConfig{},
                            1.0, 2);
}

}  // namespace

TEST_CASE("TD errors") {
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(td_errors(one, one, 2.0 * one, 0.99)[0] == 1.98);
    const Eigen::VectorXd r = Eigen::Vector3d(0.5, -1.0, 2.0);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
    CHECK(td_errors(r, z, z, 0.99) == r);
    const Eigen::VectorXd v = Eigen::Vector3d(0.1, 0.2, 0.3);
    CHECK(td_errors(r, v, Eigen::Vector3d(9.0, 9.0, 9.0), 0.0) == r - v);
    CHECK_THROWS(td_errors(r, one, z, 0.9));
}

TEST_CASE("GAE") {
    const Eigen::VectorXd a = gae(Eigen::Vector2d(1.0, 0.5), 0.99, 0.9);
    CHECK(a[0] == 1.4455);
    CHECK(a[1] == 0.5);
    const Eigen::VectorXd d = Eigen::Vector3d(0.3, -0.7, 1.1);
    CHECK(gae(d, 0.99, 0.0) == d);
    CHECK(gae(Eigen::VectorXd::Zero(4), 0.99, 0.9).isZero(0.0));
}

TEST_CASE("reward is minus the bottleneck ratio") {
    RatioReport r;
    r.ratios = Eigen::Vector2d(2.5, 1.0);
    CHECK(reward(r) == -2.5);
    r.ratios = Eigen::Vector3d(4.0, 4.0, 4.0);
    CHECK(reward(r) == -4.0);
    r.ratios = Eigen::Vector2d(2.5, 0.1);
    CHECK(reward(r) == -2.5);
}

TEST_CASE("policy output") {
    const PolicyOutput flat = policy_output(Eigen::VectorXd::Zero(9), 6);
    for (Eigen::Index l = 0; l < 6; ++l) CHECK(flat.split_probs[l] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    for (Eigen::Index m = 0; m < 3; ++m) CHECK(flat.bit_probs[m] == 0.5);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(9);
    z[2] = 1e6;  // clamped to the bound
    const PolicyOutput peaked = policy_output(z, 6);
    CHECK(peaked.split_probs[2] >= 1.0 - 1e-15);
    CHECK(std::isfinite(peaked.split_probs.sum()));
    CHECK_THROWS(policy_output(Eigen::VectorXd::Zero(3), 6));
}

TEST_CASE("action sampling") {
    Rng rng(4);
    const Eigen::Vector3d gains(1e-12, 5e-12, 2e-12);
    SUBCASE("near-certain split") {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(9);
        z[4] = kLogitBound;
        const Mlp actor = constant_policy(z);
        for (int i = 0; i < 50; ++i) CHECK(sample_action(actor, Eigen::VectorXd::Zero(5), 6, gains, rng).split == 5);
    }
    SUBCASE("all bits off are repaired to the strongest AP") {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(9);
        z.tail(3).setConstant(-kLogitBound);
        const Mlp actor = constant_policy(z);
        for (int i = 0; i < 20; ++i) {
            const AgentAction a = sample_action(actor, Eigen::VectorXd::Zero(5), 6, gains, rng);
            CHECK(a.repaired);
            CHECK(a.bits == std::vector<bool>{false, true, false});
            CHECK(a.probabilities.size() == 4);
        }
    }
    SUBCASE("uniform policy: split frequencies and bit rates") {
        const Mlp actor = constant_policy(Eigen::VectorXd::Zero(9));
        std::vector<int> count(6, 0);
        int on = 0;
        const int n = 30000;
        for (int i = 0; i < n; ++i) {
            const AgentAction a = sample_action(actor, Eigen::VectorXd::Zero(5), 6, gains, rng);
            ++count[a.split - 1];
            on += a.bits[0];
            CHECK(a.probabilities[0] == doctest::Approx(1.0 / 6.0));
        }
        for (int c : count) CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 6.0) < 0.01);
        // bit 0 is on with probability 1/2 plus the repair mass routed elsewhere
        CHECK(std::abs(on / static_cast<double>(n) - 0.5) < 0.01);
    }
}

TEST_CASE("state features") {
    const SplitProfile prof = vgg16_profile();
    LinkRates rates;
    rates.uplink_rate = Eigen::Vector2d(2e4, 2e4);
    rates.downlink_rate = Eigen::Vector2d(5e4, 5e4);
    StrategyAssignment s{{1, 1}, AssociationMatrix::all_ones(3, 2)};
    const auto raw = raw_state(s, prof, rates);
    CHECK(raw[0][0] == doctest::Approx(0.8e6));
    CHECK(raw[0][1] == doctest::Approx(0.039e6));
    CHECK(raw[0][2] == doctest::Approx(3.87e9));
    CHECK(raw[0][3] == 2e4);
    CHECK(raw[0][4] == 5e4);
    CHECK(raw[0] == raw[1]);

    FeatureScales scales{prof.max_activation_bits(), prof.max_submodel_bits(), prof.total_load(), 4e4, 1e5};
    CHECK(build_state(s, prof, rates, scales)[0][0] == 1.0);
    s.splits = {6, 6};
    const auto top = build_state(s, prof, rates, scales);
    CHECK(top[0][1] == 1.0);
    CHECK(top[0][2] == 1.0);
    CHECK(top[0][3] == 0.5);
    rates.uplink_rate[1] = 1e9;
    CHECK(build_state(s, prof, rates, scales)[1][3] == 1.0);
    CHECK_THROWS(raw_state(s, prof, LinkRates{}));
}

TEST_CASE("critic input layout") {
    const std::vector<Eigen::VectorXd> states{Eigen::VectorXd::Constant(5, 0.1), Eigen::VectorXd::Constant(5, 0.2)};
    const std::vector<AgentAction> actions{make_action(2, {true, false, true}), make_action(6, {false, true, false})};
    const Eigen::VectorXd x = critic_input(states, actions, 6, 3);
    CHECK(x.size() == 2 * (5 + 6 + 3));
    CHECK(x.head(5).isConstant(0.1));
    CHECK(x.segment(5, 5).isConstant(0.2));
    Eigen::VectorXd tail(18);
    tail << 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0;
    CHECK(x.tail(18) == tail);
}

TEST_CASE("ratio vector") {
    const Eigen::Vector3d gains(1.0, 1.0, 1.0);
    Eigen::VectorXd z(5);
    z << std::log(0.4), std::log(0.6), 0.3, -0.2, 1.0;
    Eigen::VectorXd z_old = z;
    z_old.head(2) << std::log(0.2), std::log(0.8);
    const Mlp now = constant_policy(z), old = constant_policy(z_old);
    const AgentAction a = make_action(1, {true, false, true});
    const Eigen::VectorXd same = ratio_vector(now, now, Eigen::VectorXd::Zero(5), a, 2);
    CHECK(same.isOnes(1e-15));
    const Eigen::VectorXd r = ratio_vector(now, old, Eigen::VectorXd::Zero(5), a, 2);
    CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.tail(3).isOnes(1e-15));
    CHECK(r.allFinite());
    CHECK((r.array() > 0.0).all());
}

TEST_CASE("actor objective") {
    Rng rng(8);
    const std::size_t L = 3, M = 2;
    std::vector<Eigen::VectorXd> states;
    std::vector<AgentAction> actions;
    for (int t = 0; t < 4; ++t) {
        Eigen::VectorXd s(5);
        for (Eigen::Index i = 0; i < 5; ++i) s[i] = uniform01(rng);
        states.push_back(s);
        actions.push_back(make_action(1 + t % 3, {t % 2 == 0, true}));
    }
    const Eigen::VectorXd adv = Eigen::Vector4d(0.7, -1.2, 0.4, 2.0);

    SUBCASE("at the old policy the value is the mean advantage") {
        Mlp actor({5, 6, L + M}, 3, 0.5);
        const double v = actor_objective(actor, actor, states, actions, adv, 0.1, L);
        CHECK(v == doctest::Approx(adv.mean()).epsilon(1e-14));
    }

    SUBCASE("gradient matches finite differences, including clipped elements") {
        Mlp old({5, 6, L + M}, 3, 0.5);
        Mlp actor = old;
        Eigen::VectorXd p = actor.parameters();
        for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += 0.05 * (uniform01(rng) - 0.5);
        actor.set_parameters(p);
        MlpGradients g;
        actor_objective(actor, old, states, actions, adv, 0.1, L, &g);
        const Eigen::VectorXd analytic = g.flatten();
        Eigen::VectorXd numeric(p.size());
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            Eigen::VectorXd q = p;
            q[i] += h;
            actor.set_parameters(q);
            const double up = actor_objective(actor, old, states, actions, adv, 0.1, L);
            q[i] -= 2.0 * h;
            actor.set_parameters(q);
            const double down = actor_objective(actor, old, states, actions, adv, 0.1, L);
            numeric[i] = (up - down) / (2.0 * h);
        }
        CHECK((analytic - numeric).norm() <= 1e-3 * numeric.norm());
    }

    SUBCASE("clip branch") {
        Eigen::VectorXd z(5), z_old(5);
        z << std::log(0.6), std::log(0.3), std::log(0.1), 0.0, 0.0;
        z_old << std::log(0.4), std::log(0.3), std::log(0.3), 0.0, 0.0;
        Mlp actor = constant_policy(z);
        const Mlp old = constant_policy(z_old);
        const std::vector<Eigen::VectorXd> s1{Eigen::VectorXd::Zero(5)};
        const std::vector<AgentAction> a1{make_action(1, {true, false})};
        const Eigen::VectorXd A = Eigen::VectorXd::Constant(1, 2.0);
        MlpGradients g;
        const double v = actor_objective(actor, old, s1, a1, A, 0.1, L, &g);
        // split ratio 1.5 clips to 1.1; both bits sit at ratio 1
        CHECK(v == doctest::Approx((1.1 * 2.0 + 2.0 + 2.0) / 3.0).epsilon(1e-14));
        // nothing flows into the split logits
        CHECK(g.db[0].head(3).isZero(0.0));
        CHECK(!g.db[0].tail(2).isZero(0.0));
    }

    SUBCASE("an ascent step raises the objective") {
        Mlp actor({5, 6, L + M}, 3, 0.5);
        const Mlp old = actor;
        Adam opt(actor, 1e-3);
        const double before = actor_update(actor, opt, old, states, actions, adv, 0.1, L);
        CHECK(actor_objective(actor, old, states, actions, adv, 0.1, L) > before);
    }
}

TEST_CASE("critic loss and update") {
    Rng rng(6);
    std::vector<Eigen::VectorXd> inputs;
    for (int t = 0; t < 6; ++t) {
        Eigen::VectorXd x(4);
        for (Eigen::Index i = 0; i < 4; ++i) x[i] = uniform01(rng);
        inputs.push_back(x);
    }

    SUBCASE("zero advantage at the old critic is a fixed point") {
        Mlp critic({4, 8, 1}, 2);
        Eigen::VectorXd targets(6);
        for (int t = 0; t < 6; ++t) targets[t] = critic.predict(inputs[static_cast<std::size_t>(t)])[0];
        MlpGradients g;
        CHECK(critic_loss(critic, inputs, targets, &g) == 0.0);
        CHECK(g.flatten().isZero(0.0));
    }

    SUBCASE("gradient matches finite differences") {
        Mlp critic({4, 8, 1}, 2);
        const Eigen::VectorXd targets = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
        MlpGradients g;
        critic_loss(critic, inputs, targets, &g);
        const Eigen::VectorXd analytic = g.flatten();
        const Eigen::VectorXd p = critic.parameters();
        Eigen::VectorXd numeric(p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            Eigen::VectorXd q = p;
            q[i] += 1e-6;
            critic.set_parameters(q);
            const double up = critic_loss(critic, inputs, targets);
            q[i] -= 2e-6;
            critic.set_parameters(q);
            const double down = critic_loss(critic, inputs, targets);
            numeric[i] = (up - down) / 2e-6;
        }
        CHECK((analytic - numeric).norm() <= 1e-4 * numeric.norm());
    }

    SUBCASE("loss decreases on a frozen batch") {
        Mlp critic({4, 8, 1}, 2);
        const Mlp old = critic;
        Adam opt(critic, 1e-3);
        const Eigen::VectorXd adv = Eigen::VectorXd::LinSpaced(6, -0.5, 0.8);
        double prev = critic_update(critic, opt, old, inputs, adv);
        for (int i = 1; i < 100; ++i) {
            const double now = critic_update(critic, opt, old, inputs, adv);
            CHECK(now < prev);
            prev = now;
        }
    }
}

TEST_CASE("training on a single-strategy environment returns it") {
    const SplitProfile one({{1e5, 1e5, 1e9}});
    StrategyEvaluator ev(tiny_env(1, 1, 2, one));
    const MaisResult r = train(ev, PpoConfig{}, 3);
    CHECK(r.rewards.size() == 1);
    CHECK(r.best.splits == Splits{1, 1});
    CHECK(r.best.assoc == AssociationMatrix::all_ones(1, 2));
    CHECK(r.updates == 0);
}

TEST_CASE("training loop bookkeeping") {
    StrategyEvaluator ev(tiny_env(5, 2, 1, vgg16_profile()));
    PpoConfig cfg;
    cfg.episodes = 24;
    cfg.hidden = {8};
    const MaisResult r = train(ev, cfg, 11);
    CHECK(r.rewards.size() == 24);
    CHECK(r.updates == 24 / cfg.horizon);

    // every reward is finite, no better than the best strategy and no worse than the worst
    double lo = 0.0, hi = -1e300;
    for (std::size_t l = 1; l <= 6; ++l)
        for (int mask = 1; mask < 4; ++mask) {
            AssociationMatrix b(2, 1);
            b.set(0, 0, mask & 1);
            b.set(1, 0, mask & 2);
            const double v = reward(ev.evaluate({{l}, b}).ratio);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    bool varied = false;
    for (double x : r.rewards) {
        CHECK(std::isfinite(x));
        CHECK(x >= lo);
        CHECK(x <= hi);
        varied = varied || x != r.rewards.front();
    }
    CHECK(varied);
    CHECK(r.best_reward == *std::max_element(r.rewards.begin(), r.rewards.end()));
    CHECK(r.rewards[r.best_episode] == r.best_reward);

    StrategyEvaluator twin(tiny_env(5, 2, 1, vgg16_profile()));
    CHECK(train(twin, cfg, 11).rewards == r.rewards);
}

TEST_CASE("ppo config validation") {
    PpoConfig c;
    c.gamma = 0.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.horizon = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.hidden = {0};
    CHECK_THROWS(c.validate());
    c = {};
    c.actor_lr = -1.0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("reward trace csv") {
    std::ostringstream empty, two;
    write_reward_trace_csv(empty, {});
    CHECK(empty.str() == "episode,reward\n");
    write_reward_trace_csv(two, {-2.5, -1.25});
    CHECK(two.str() == "episode,reward\n1,-2.5\n2,-1.25\n");
}
