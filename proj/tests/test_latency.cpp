// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "helpers.hpp"
#include "ucsfl/latency.hpp"

using namespace ucsfl;

namespace {

LinkRates flat_rates(std::size_t U, double ul, double dl) {
    LinkRates r;
    r.uplink_rate = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(U), ul);
    r.downlink_rate = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(U), dl);
    return r;
}

}  // namespace

TEST_CASE("UE compute latency") {
    const SplitProfile p = vgg16_profile();
    ComputeConfig c;
    CHECK(ue_compute_latency(p, {1, 1}, c) == 3.87);
    CHECK(ue_compute_latency(p, {1, 6}, c) == 30.94);
    const double base = ue_compute_latency(p, {3}, c);
    c.f_ue = 2e9;
    CHECK(ue_compute_latency(p, {3}, c) == doctest::Approx(base / 2.0).epsilon(1e-15));
    CHECK_THROWS(ue_compute_latency(p, {0}, c));
    CHECK_THROWS(ue_compute_latency(p, {7}, c));
    CHECK_THROWS(ue_compute_latency(p, {}, c));
}

TEST_CASE("uplink latency") {
    const SplitProfile p = vgg16_profile();
    CHECK(uplink_latency(p, {1}, flat_rates(1, 0.1e6, 1.0))[0] == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(uplink_latency(p, {6}, flat_rates(1, 0.001e6, 1.0))[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(uplink_latency(p, {2}, flat_rates(1, 2e5, 1.0))[0] ==
          doctest::Approx(uplink_latency(p, {2}, flat_rates(1, 1e5, 1.0))[0] / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(uplink_latency(p, {1}, flat_rates(1, 0.0, 1.0)), std::domain_error);
    CHECK_THROWS(uplink_latency(p, {1, 2}, flat_rates(1, 1.0, 1.0)));
}

TEST_CASE("DPU latency") {
    const SplitProfile p = vgg16_profile();
    ComputeConfig c;
    CHECK(dpu_latency_max(p, {6, 6}, c) == 0.0);
    CHECK(dpu_latency_max(p, {1}, c) == doctest::Approx(5.414).epsilon(1e-14));
    CHECK(dpu_latency_max(p, {1}, c) == (30.94e9 - 3.87e9) / 5e9);
}

TEST_CASE("DPU max equals the per-AP form maximized over APs") {
    const SplitProfile p = vgg16_profile();
    ComputeConfig c;
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t M = 1 + rng() % 5, U = 1 + rng() % 5;
        AssociationMatrix b(M, U);
        Splits s(U);
        for (std::size_t u = 0; u < U; ++u) {
            s[u] = 1 + rng() % 6;
            b.set(rng() % M, u, true);
            for (std::size_t m = 0; m < M; ++m)
                if (rng() % 3 == 0) b.set(m, u, true);
        }
        double best = 0.0;
        for (std::size_t m = 0; m < M; ++m) best = std::max(best, dpu_latency_ap(p, s, b, m, c));
        CHECK(best == dpu_latency_max(p, s, c));
    }
    AssociationMatrix lonely(2, 1);
    lonely.set(0, 0, true);
    CHECK(dpu_latency_ap(p, {1}, lonely, 1, c) == 0.0);
}

TEST_CASE("downlink latency") {
    const SplitProfile p = vgg16_profile();
    CHECK(downlink_latency(p, {1}, flat_rates(1, 1.0, 0.039e6))[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(downlink_latency(p, {6}, flat_rates(1, 1.0, 1e6))[0] == doctest::Approx(138.361).epsilon(1e-15));
    CHECK_THROWS_AS(downlink_latency(p, {1}, flat_rates(1, 1.0, 0.0)), std::domain_error);
}

TEST_CASE("total latency") {
    SUBCASE("only the backprop constant") {
        // huge frequencies and rates make every other term vanish below double resolution
        const SplitProfile p({{1e-300, 1e-300, 1e-300}});
        ComputeConfig c;
        c.f_ue = c.f_dpu = 1e300;
        c.t_back = 1.0;
        const LatencyBreakdown t = total_latency(p, {1, 1}, flat_rates(2, 1e300, 1e300), c);
        CHECK(t.t_total[0] == 1.0);
        CHECK(t.t_total[1] == 1.0);
    }
    SUBCASE("single UE is a plain sum") {
        const SplitProfile p = vgg16_profile();
        ComputeConfig c;
        const LatencyBreakdown t = total_latency(p, {2}, flat_rates(1, 3e4, 5e4), c);
        CHECK(t.t_total[0] == doctest::Approx(9.42 + 0.4e6 / 3e4 + (30.94 - 9.42) / 5.0 + 0.5 + 0.261e6 / 5e4));
    }
    SUBCASE("random instance equals the independently summed parts") {
        const SplitProfile p = vgg16_profile();
        ComputeConfig c;
        c.f_ue = 1.3e9;
        c.f_dpu = 4.1e9;
        c.t_back = 0.7;
        Rng rng(4);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t U = 1 + rng() % 5;
            Splits s(U);
            LinkRates r = flat_rates(U, 0.0, 0.0);
            for (std::size_t u = 0; u < U; ++u) {
                s[u] = 1 + rng() % 6;
                r.uplink_rate[static_cast<Eigen::Index>(u)] = 1e3 + 1e5 * uniform01(rng);
                r.downlink_rate[static_cast<Eigen::Index>(u)] = 1e3 + 1e5 * uniform01(rng);
            }
            double t_ue = 0.0, t_ul = 0.0, t_dpu = 0.0;
            for (std::size_t u = 0; u < U; ++u) {
                t_ue = std::max(t_ue, p.mac_load(s[u]) / c.f_ue);
                t_ul = std::max(t_ul, p.activation_bits(s[u]) / r.uplink_rate[static_cast<Eigen::Index>(u)]);
                t_dpu = std::max(t_dpu, (p.total_load() - p.mac_load(s[u])) / c.f_dpu);
            }
            const LatencyBreakdown t = total_latency(p, s, r, c);
            for (std::size_t u = 0; u < U; ++u) {
                const double dl = p.submodel_bits(s[u]) / r.downlink_rate[static_cast<Eigen::Index>(u)];
                CHECK(test::rel_err(t.t_total[static_cast<Eigen::Index>(u)], t_ue + t_ul + t_dpu + 0.7 + dl) < 1e-14);
            }
            CHECK(t.t_ul_max == t_ul);
        }
    }
}

TEST_CASE("identical splits: the uplink bottleneck is the slowest link") {
    const SplitProfile p = vgg16_profile();
    LinkRates r = flat_rates(3, 0.0, 1.0);
    r.uplink_rate << 4e4, 1.5e4, 9e4;
    const LatencyBreakdown t = total_latency(p, {3, 3, 3}, r, ComputeConfig{});
    CHECK(t.t_ul_max == p.activation_bits(3) / 1.5e4);
}

TEST_CASE("total latency is monotone in every resource") {
    const SplitProfile p = vgg16_profile();
    const Splits s{2, 4};
    LinkRates r = flat_rates(2, 2e4, 3e4);
    ComputeConfig c;
    const LatencyBreakdown base = total_latency(p, s, r, c);
    auto no_worse = [&](const LatencyBreakdown& t) {
        for (Eigen::Index u = 0; u < 2; ++u) CHECK(t.t_total[u] <= base.t_total[u]);
    };
    ComputeConfig faster = c;
    faster.f_ue *= 2.0;
    no_worse(total_latency(p, s, r, faster));
    faster = c;
    faster.f_dpu *= 2.0;
    no_worse(total_latency(p, s, r, faster));
    LinkRates more = r;
    more.uplink_rate *= 2.0;
    no_worse(total_latency(p, s, more, c));
    more = r;
    more.downlink_rate *= 2.0;
    no_worse(total_latency(p, s, more, c));
}

TEST_CASE("compute config validation") {
    ComputeConfig c;
    c.f_ue = 0.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.cycles_per_op = 0.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.t_back = -1.0;
    CHECK_THROWS(c.validate());
}
