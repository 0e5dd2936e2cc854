// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ucsfl/convergence.hpp"

using namespace ucsfl;

namespace {

QuadraticTask scalar_task() {
    QuadraticTaskConfig c;
    c.dim = 1;
    c.layers = 1;
    c.mu = c.beta = 1.0;
    c.num_aps = c.num_ues = 1;
    c.eps = 0.0;
    return make_quadratic_task(c, 1);
}

}  // namespace

TEST_CASE("task construction") {
    QuadraticTaskConfig c;
    c.heterogeneity = 0.3;
    const QuadraticTask t = make_quadratic_task(c, 9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.A);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((t.init - t.w_star).norm() == doctest::Approx(c.init_distance));
    // w_star minimizes the average loss
    Eigen::VectorXd g = Eigen::VectorXd::Zero(6);
    for (std::size_t m = 0; m < t.num_aps; ++m)
        for (std::size_t u = 0; u < t.num_ues; ++u) g += t.gradient(m, u, t.w_star);
    CHECK(g.norm() < 1e-12);
    CHECK(t.Gamma == doctest::Approx(t.f_star));
    CHECK(t.Gamma > 0.0);
    CHECK(t.layer_size(0) + t.layer_size(1) + t.layer_size(2) == 6);

    c.heterogeneity = 0.0;
    CHECK(make_quadratic_task(c, 9).Gamma == 0.0);
    c.layers = 7;
    CHECK_THROWS(make_quadratic_task(c, 9));
}

TEST_CASE("local update") {
    QuadraticTask t = scalar_task();
    t.optima[0] = Eigen::VectorXd::Zero(1);
    Rng rng(1);
    CHECK(local_update(t, Eigen::VectorXd::Ones(1), 0, 0, 0.5, rng, false)[0] == 0.5);
    CHECK(local_update(t, t.optimum(0, 0), 0, 0, 0.5, rng, false) == t.optimum(0, 0));
    CHECK_THROWS(local_update(t, t.init, 0, 0, 0.0, rng));
}

TEST_CASE("layer noise variance and norm cap") {
    QuadraticTaskConfig c;
    c.dim = 7;
    c.layers = 3;
    c.eps = 0.5;
    const QuadraticTask t = make_quadratic_task(c, 2);
    Rng rng(3);
    const int n = 10000;
    Eigen::VectorXd second(3);
    second.setZero();
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd z = layer_noise(t, rng);
        for (std::size_t k = 0; k < 3; ++k) {
            const double sq = z.segment(static_cast<Eigen::Index>(t.layer_begin(k)),
                                        static_cast<Eigen::Index>(t.layer_size(k)))
                                  .squaredNorm();
            CHECK(sq <= 0.25 + 1e-12);
            second[static_cast<Eigen::Index>(k)] += sq;
        }
    }
    second /= n;
    for (Eigen::Index k = 0; k < 3; ++k) {
        CHECK(second[k] <= 0.25);
        CHECK(second[k] > 0.5 * 0.25);
    }
}

TEST_CASE("aggregation") {
    SUBCASE("one AP cluster") {
        AssociationMatrix b(1, 2);
        b.set(0, 0, true);
        b.set(0, 1, true);
        const Aggregates a = aggregate({Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)}, b);
        CHECK(a.ap_means[0] == Eigen::Vector2d(2, 3));
        CHECK(a.ue_means[0] == Eigen::Vector2d(2, 3));
    }
    SUBCASE("single serving AP") {
        AssociationMatrix b(2, 2);
        b.set(0, 0, true);
        b.set(1, 0, false);
        b.set(0, 1, true);
        b.set(1, 1, true);
        std::vector<Eigen::VectorXd> w{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 5.0),
                                       Eigen::VectorXd::Constant(1, 9.0), Eigen::VectorXd::Constant(1, 7.0)};
        const Aggregates a = aggregate(w, b);
        CHECK(a.ue_means[0] == a.ap_means[0]);
        CHECK(a.ap_means[0][0] == 3.0);
        CHECK(a.ap_means[1][0] == 7.0);
        CHECK(a.ue_means[1][0] == 5.0);
    }
    SUBCASE("all ones gives the grand mean") {
        std::vector<Eigen::VectorXd> w;
        Eigen::VectorXd total = Eigen::VectorXd::Zero(3);
        for (int i = 0; i < 12; ++i) {
            w.push_back(Eigen::Vector3d(i, i * i, -0.5 * i));
            total += w.back();
        }
        const Aggregates a = aggregate(w, AssociationMatrix::all_ones(4, 3));
        for (const auto& m : a.ue_means) CHECK((m - total / 12.0).norm() < 1e-12);
    }
    SUBCASE("identical models are a fixed point") {
        Rng rng(5);
        const AssociationMatrix b = sample_clusters(5, 4, 2, rng);
        const Eigen::Vector3d w(0.1, -2.0, 3.3);
        const Aggregates a = aggregate(std::vector<Eigen::VectorXd>(20, w), b);
        for (const auto& m : a.ue_means) CHECK((m - w).norm() < 1e-15);
    }
    SUBCASE("errors") {
        CHECK_THROWS(aggregate({Eigen::Vector2d(1, 2)}, AssociationMatrix::all_ones(1, 2)));
        AssociationMatrix b(1, 2);
        b.set(0, 0, true);
        CHECK_THROWS(aggregate({Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)}, b));
    }
}

TEST_CASE("split front and back") {
    QuadraticTaskConfig c;
    c.dim = 4;
    c.layers = 2;
    const QuadraticTask t = make_quadratic_task(c, 1);
    const Eigen::Vector4d w(1, 2, 3, 4);
    CHECK(split_front(t, w, 2) == w);
    CHECK(split_back(t, w, 2).size() == 0);
    CHECK(split_front(t, w, 1) == Eigen::Vector2d(1, 2));
    CHECK(split_back(t, w, 1) == Eigen::Vector2d(3, 4));
    CHECK_THROWS(split_front(t, w, 0));
    CHECK_THROWS(split_front(t, w, 3));
}

TEST_CASE("bound constants") {
    const BoundConstants k = bound_constants(1.0, 2.0, 3, 1.0, 0.5, 0.0, 4.0, 10);
    CHECK(k.alpha == 2.0);
    CHECK(k.iota == 15.0);
    CHECK(k.R == doctest::Approx(792.09375).epsilon(1e-14));
    CHECK(bound_constants(1.0, 2.0, 3, 1.0, 0.5, 0.0, 4.0, 40).iota == 39.0);

    const BoundConstants zero = bound_constants(1.0, 2.0, 3, 0.0, 0.0, 0.0, 3.0, 10);
    CHECK(zero.R == 0.0);
    const auto b = bound_eval(zero, 1.0, 0.7, 10);
    for (std::size_t t = 1; t <= 10; ++t)
        CHECK(b[t - 1] == doctest::Approx(2.0 / (t + 15.0) * (16.0 / 2.0) * 0.7).epsilon(1e-14));

    CHECK(learning_rate(1, 1.0, 15.0) == 2.0 / 16.0);
    CHECK_THROWS(bound_constants(1.0, 2.0, 3, 1.0, 0.5, 0.0, 0.5, 10));
    CHECK_THROWS(bound_constants(2.0, 1.0, 3, 1.0, 0.5, 0.0, 1.0, 10));
}

TEST_CASE("bound decreases in the cluster size") {
    for (double z : {0.1, 1.0, 7.0})
        for (double eps : {0.0, 0.3}) {
            double prev = 1e300;
            for (double c = 1.0; c <= 10.0; c += 1.0) {
                const double v = bound_eval(bound_constants(1.0, 2.0, 3, z, eps, 0.2, c, 50), 1.0, 1.0, 50).back();
                CHECK(v < prev);
                prev = v;
            }
        }
    const double flat1 = bound_eval(bound_constants(1.0, 2.0, 3, 0.0, 0.0, 0.2, 1.0, 50), 1.0, 1.0, 50).back();
    const double flat9 = bound_eval(bound_constants(1.0, 2.0, 3, 0.0, 0.0, 0.2, 9.0, 50), 1.0, 1.0, 50).back();
    CHECK(flat1 == flat9);
}

TEST_CASE("cluster sampling frequencies") {
    Rng rng(12);
    const std::size_t M = 10, U = 4, C = 3;
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(M, U);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const AssociationMatrix b = sample_clusters(M, U, C, rng);
        for (std::size_t u = 0; u < U; ++u) CHECK(b.serving_aps(u).size() == C);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t u = 0; u < U; ++u) freq(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(u)) += b(m, u);
    }
    freq /= n;
    CHECK((freq.array() - 0.3).abs().maxCoeff() < 0.02);
    CHECK_THROWS(sample_clusters(3, 2, 4, rng));
    CHECK_THROWS(sample_clusters(3, 2, 0, rng));
}

TEST_CASE("noiseless full association converges monotonically") {
    QuadraticTaskConfig c;
    c.eps = 0.0;
    c.num_aps = 3;
    c.num_ues = 2;
    const QuadraticTask t = make_quadratic_task(c, 4);
    const RoundTrace tr = run_rounds(t, AssociationMatrix::all_ones(3, 2), 200, 1, 1, false);
    for (Eigen::Index r = 1; r < tr.gap.rows(); ++r) CHECK(tr.gap(r, 0) < tr.gap(r - 1, 0));
    // identical optima: every aggregate is the plain gradient-descent iterate
    const double iota = bound_constants(t, 1.0, 200).iota;
    Eigen::VectorXd w = t.init;
    for (std::size_t r = 1; r <= 200; ++r) {
        w -= learning_rate(r, t.mu, iota) * t.A * (w - t.w_star);
        CHECK(tr.gap(static_cast<Eigen::Index>(r - 1), 0) ==
              doctest::Approx(t.global_loss(w) - t.f_star).epsilon(1e-10));
    }
    CHECK(tr.gap.col(0) == tr.gap.col(1));
}

TEST_CASE("first-round gap matches a direct computation") {
    QuadraticTaskConfig c;
    c.num_aps = 1;
    c.num_ues = 1;
    c.eps = 0.0;
    const QuadraticTask t = make_quadratic_task(c, 2);
    const RoundTrace tr = run_rounds(t, AssociationMatrix::all_ones(1, 1), 5, 1, 1, false);
    const double eta = learning_rate(1, t.mu, bound_constants(t, 1.0, 5).iota);
    const Eigen::VectorXd w1 = t.init - eta * t.A * (t.init - t.optimum(0, 0));
    CHECK(tr.gap(0, 0) == doctest::Approx(t.global_loss(w1) - t.f_star).epsilon(1e-13));
    CHECK(tr.delta1[0] == doctest::Approx((w1 - t.w_star).squaredNorm()).epsilon(1e-13));
}

TEST_CASE("federated rounds track centralized SGD") {
    QuadraticTaskConfig c;
    c.num_aps = 4;
    c.num_ues = 2;
    const QuadraticTask t = make_quadratic_task(c, 6);
    const std::size_t T = 50, seeds = 100;
    double fed = 0.0, central = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
        fed += run_rounds(t, AssociationMatrix::all_ones(4, 2), T, s).gap.col(0).tail(1)[0];
        central += centralized_sgd(t, T, s)[static_cast<Eigen::Index>(T - 1)];
    }
    CHECK(fed < 3.0 * central);
    CHECK(central < 3.0 * fed);
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {9, 4, 1, 0}) == doctest::Approx(-1.0));
    // ranks with ties: x -> 1,2,3,4 ; y -> 1.5,1.5,3,4
    CHECK(spearman({1, 2, 3, 4}, {5, 5, 6, 7}) == doctest::Approx(0.9486832980505138).epsilon(1e-12));
    CHECK(spearman({1, 1}, {2, 3}) == 0.0);
    CHECK_THROWS(spearman({1}, {1}));
}

TEST_CASE("cluster sweep and monotonicity report") {
    QuadraticTaskConfig c;
    c.num_aps = 4;
    c.num_ues = 2;
    const QuadraticTask t = make_quadratic_task(c, 3);
    const auto sweep = cluster_sweep(t, {1, 2, 4}, 20, 30, 7);
    REQUIRE(sweep.size() == 3);
    for (const auto& p : sweep) {
        CHECK(p.gap.rows() == 20);
        CHECK(p.worst_ratio <= 1.0);
    }
    const MonotonicityReport r = monotonicity_check(t, sweep);
    CHECK(r.bound_strictly_decreasing);
    CHECK(r.final_bound.size() == 3);

    std::ostringstream csv;
    write_convergence_csv(csv, sweep);
    const std::string s = csv.str();
    CHECK(s.rfind("cluster_size,round,mean_gap,max_gap,min_bound\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 20);

    std::ostringstream again;
    write_convergence_csv(again, cluster_sweep(t, {1, 2, 4}, 20, 30, 7));
    CHECK(again.str() == s);
}
