// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/convergence.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ucsfl/csv.hpp"

namespace ucsfl {

void QuadraticTaskConfig::validate() const {
    if (layers < 1 || dim < layers) throw std::invalid_argument("quadratic task: need 1 <= layers <= dim");
    if (!(mu > 0.0) || !(beta >= mu)) throw std::invalid_argument("quadratic task: need 0 < mu <= beta");
    if (num_aps < 1 || num_ues < 1) throw std::invalid_argument("quadratic task: need at least one AP and one UE");
    if (heterogeneity < 0.0 || eps < 0.0 || init_distance < 0.0)
        throw std::invalid_argument("quadratic task: heterogeneity, eps and init_distance must be >= 0");
}

std::size_t QuadraticTask::layer_begin(std::size_t k) const {
    if (k >= layers) throw std::out_of_range("layer index");
    return k * dim() / layers;
}

std::size_t QuadraticTask::layer_size(std::size_t k) const {
    return (k + 1 == layers ? dim() : layer_begin(k + 1)) - layer_begin(k);
}

std::size_t QuadraticTask::prefix_size(std::size_t split) const {
    if (split < 1 || split > layers) throw std::out_of_range("split outside 1..L");
    return split == layers ? dim() : layer_begin(split);
}

double QuadraticTask::loss(std::size_t m, std::size_t u, const Eigen::VectorXd& w) const {
    const Eigen::VectorXd e = w - optimum(m, u);
    return 0.5 * e.dot(A * e);
}

Eigen::VectorXd QuadraticTask::gradient(std::size_t m, std::size_t u, const Eigen::VectorXd& w) const {
    return A * (w - optimum(m, u));
}

double QuadraticTask::global_loss(const Eigen::VectorXd& w) const {
    double acc = 0.0;
    for (std::size_t m = 0; m < num_aps; ++m)
        for (std::size_t u = 0; u < num_ues; ++u) acc += loss(m, u, w);
    return acc / static_cast<double>(num_aps * num_ues);
}

QuadraticTask make_quadratic_task(const QuadraticTaskConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto d = static_cast<Eigen::Index>(cfg.dim);
    Rng rng = make_rng(seed, "task");
    std::normal_distribution<double> normal;

    Eigen::MatrixXd G(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) G(i, j) = normal(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    Eigen::VectorXd eig(d);
    for (Eigen::Index i = 0; i < d; ++i)
        eig[i] = d == 1 ? cfg.mu : cfg.mu + (cfg.beta - cfg.mu) * static_cast<double>(i) / static_cast<double>(d - 1);

    QuadraticTask t;
    t.layers = cfg.layers;
    t.num_aps = cfg.num_aps;
    t.num_ues = cfg.num_ues;
    t.A = Q * eig.asDiagonal() * Q.transpose();
    t.A = 0.5 * (t.A + t.A.transpose());
    t.mu = cfg.mu;
    t.beta = cfg.beta;
    t.eps = cfg.eps;

    Eigen::VectorXd dir(d);
    for (Eigen::Index i = 0; i < d; ++i) dir[i] = normal(rng);
    const Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < cfg.num_aps * cfg.num_ues; ++k) {
        Eigen::VectorXd c = center;
        if (cfg.heterogeneity > 0.0)
            for (Eigen::Index i = 0; i < d; ++i) c[i] += cfg.heterogeneity * normal(rng);
        t.optima.push_back(std::move(c));
    }
    t.w_star = Eigen::VectorXd::Zero(d);
    for (const auto& c : t.optima) t.w_star += c;
    t.w_star /= static_cast<double>(t.optima.size());
    t.init = t.w_star + cfg.init_distance * dir / dir.norm();

    t.f_star = t.global_loss(t.w_star);
    t.Gamma = t.f_star;  // every F_{m,u} attains 0
    double spread = 0.0;
    for (const auto& c : t.optima) spread = std::max(spread, (c - t.w_star).norm());
    const double sqrt_l = std::sqrt(static_cast<double>(cfg.layers));
    t.radius = std::max(cfg.init_distance, (cfg.beta * spread + sqrt_l * cfg.eps) / cfg.mu);
    const double grad = cfg.beta * (t.radius + spread);
    t.Z = std::sqrt(grad * grad + cfg.eps * cfg.eps);
    return t;
}

Eigen::VectorXd layer_noise(const QuadraticTask& task, Rng& rng) {
    Eigen::VectorXd n(static_cast<Eigen::Index>(task.dim()));
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < task.layers; ++k) {
        const auto b = static_cast<Eigen::Index>(task.layer_begin(k));
        const auto s = static_cast<Eigen::Index>(task.layer_size(k));
        const double sd = task.eps / std::sqrt(static_cast<double>(s));
        for (Eigen::Index i = 0; i < s; ++i) n[b + i] = sd * normal(rng);
        const double norm = n.segment(b, s).norm();
        if (norm > task.eps) n.segment(b, s) *= task.eps / norm;
    }
    return n;
}

Eigen::VectorXd local_update(const QuadraticTask& task, const Eigen::VectorXd& w, std::size_t m, std::size_t u,
                             double eta, Rng& rng, bool noisy) {
    if (!(eta > 0.0)) throw std::invalid_argument("local_update: eta must be positive");
    Eigen::VectorXd g = task.gradient(m, u, w);
    if (noisy && task.eps > 0.0) g += layer_noise(task, rng);
    return w - eta * g;
}

Aggregates aggregate(const std::vector<Eigen::VectorXd>& models, const AssociationMatrix& assoc) {
    const std::size_t M = assoc.num_aps(), U = assoc.num_ues();
    if (models.size() != M * U) throw std::invalid_argument("aggregate: expected M * U models");
    Aggregates out;
    out.ap_means.resize(M);
    for (std::size_t m = 0; m < M; ++m) {
        const auto served = assoc.served_ues(m);
        if (served.empty()) continue;
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(models[m * U + served.front()].size());
        for (std::size_t v : served) acc += models[m * U + v];
        out.ap_means[m] = acc / static_cast<double>(served.size());
    }
    out.ue_means.resize(U);
    for (std::size_t u = 0; u < U; ++u) {
        const auto aps = assoc.serving_aps(u);
        if (aps.empty()) throw std::invalid_argument("aggregate: UE with an empty AP cluster");
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(out.ap_means[aps.front()].size());
        for (std::size_t m : aps) acc += out.ap_means[m];
        out.ue_means[u] = acc / static_cast<double>(aps.size());
    }
    return out;
}

Eigen::VectorXd split_front(const QuadraticTask& task, const Eigen::VectorXd& w, std::size_t split) {
    return w.head(static_cast<Eigen::Index>(task.prefix_size(split)));
}

Eigen::VectorXd split_back(const QuadraticTask& task, const Eigen::VectorXd& w, std::size_t split) {
    return w.tail(w.size() - static_cast<Eigen::Index>(task.prefix_size(split)));
}

BoundConstants bound_constants(double mu, double beta, std::size_t layers, double Z, double eps, double Gamma,
                               double cluster_size, std::size_t rounds) {
    if (!(cluster_size >= 1.0)) throw std::invalid_argument("bound: cluster size must be >= 1");
    if (!(mu > 0.0) || !(beta >= mu)) throw std::invalid_argument("bound: need 0 < mu <= beta");
    if (rounds < 1) throw std::invalid_argument("bound: need at least one round");
    BoundConstants b;
    b.alpha = beta / mu;
    b.iota = std::max(8.0 * b.alpha, static_cast<double>(rounds)) - 1.0;
    const double c = cluster_size;
    const double L = static_cast<double>(layers);
    const double drift = static_cast<double>(rounds) - 1.0;
    b.R = (3.0 * c + 1.0) / c * drift * drift * L * Z * Z + (c + 1.0) / (2.0 * c) * L * Z * Z +
          (c + 1.0) / (2.0 * c) * L * eps * eps + 2.0 * beta * Gamma;
    return b;
}

BoundConstants bound_constants(const QuadraticTask& task, double cluster_size, std::size_t rounds) {
    return bound_constants(task.mu, task.beta, task.layers, task.Z, task.eps, task.Gamma, cluster_size, rounds);
}

double learning_rate(std::size_t t, double mu, double iota) { return 2.0 / (mu * (static_cast<double>(t) + iota)); }

std::vector<double> bound_eval(const BoundConstants& consts, double mu, double delta1, std::size_t rounds) {
    std::vector<double> out(rounds);
    const double bracket = 2.0 * consts.R / mu + mu * (consts.iota + 1.0) / 2.0 * delta1;
    for (std::size_t t = 1; t <= rounds; ++t) out[t - 1] = consts.alpha / (static_cast<double>(t) + consts.iota) * bracket;
    return out;
}

RoundTrace run_rounds(const QuadraticTask& task, const AssociationMatrix& assoc, std::size_t rounds,
                      std::uint64_t seed, std::size_t local_steps, bool noisy) {
    assoc.validate();
    if (assoc.num_aps() != task.num_aps || assoc.num_ues() != task.num_ues)
        throw std::invalid_argument("run_rounds: association shape does not match the task");
    if (rounds < 1 || local_steps < 1) throw std::invalid_argument("run_rounds: rounds and local_steps must be >= 1");
    const std::size_t M = task.num_aps, U = task.num_ues;
    const double iota = bound_constants(task, 1.0, rounds).iota;
    Rng rng = make_rng(seed, "noise");

    std::vector<Eigen::VectorXd> models(M * U, task.init);
    RoundTrace tr;
    tr.gap.resize(static_cast<Eigen::Index>(rounds), static_cast<Eigen::Index>(U));
    tr.delta1.resize(static_cast<Eigen::Index>(U));
    for (std::size_t t = 1; t <= rounds; ++t) {
        const double eta = learning_rate(t, task.mu, iota);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t u = 0; u < U; ++u) {
                if (!assoc(m, u)) continue;
                for (std::size_t s = 0; s < local_steps; ++s)
                    models[m * U + u] = local_update(task, models[m * U + u], m, u, eta, rng, noisy);
            }
        const Aggregates agg = aggregate(models, assoc);
        for (std::size_t u = 0; u < U; ++u) {
            const Eigen::VectorXd& w = agg.ue_means[u];
            tr.gap(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(u)) = task.global_loss(w) - task.f_star;
            if (t == 1) tr.delta1[static_cast<Eigen::Index>(u)] = (w - task.w_star).squaredNorm();
            for (std::size_t m = 0; m < M; ++m)
                if (assoc(m, u)) models[m * U + u] = w;
        }
    }
    return tr;
}

Eigen::VectorXd centralized_sgd(const QuadraticTask& task, std::size_t rounds, std::uint64_t seed) {
    const double iota = bound_constants(task, 1.0, rounds).iota;
    Rng rng = make_rng(seed, "noise");
    Eigen::VectorXd w = task.init;
    Eigen::VectorXd gap(static_cast<Eigen::Index>(rounds));
    for (std::size_t t = 1; t <= rounds; ++t) {
        Eigen::VectorXd g = task.A * (w - task.w_star);
        if (task.eps > 0.0) g += layer_noise(task, rng);
        w -= learning_rate(t, task.mu, iota) * g;
        gap[static_cast<Eigen::Index>(t - 1)] = task.global_loss(w) - task.f_star;
    }
    return gap;
}

AssociationMatrix sample_clusters(std::size_t num_aps, std::size_t num_ues, std::size_t cluster_size, Rng& rng) {
    if (cluster_size < 1 || cluster_size > num_aps) throw std::invalid_argument("sample_clusters: need 1 <= C_u <= M");
    AssociationMatrix b(num_aps, num_ues);
    std::vector<std::size_t> aps(num_aps);
    for (std::size_t u = 0; u < num_ues; ++u) {
        std::iota(aps.begin(), aps.end(), std::size_t{0});
        // partial Fisher-Yates
        for (std::size_t i = 0; i < cluster_size; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, num_aps - 1);
            std::swap(aps[i], aps[pick(rng)]);
            b.set(aps[i], u, true);
        }
    }
    return b;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
    const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<ClusterSweepPoint> cluster_sweep(const QuadraticTask& task, const std::vector<std::size_t>& cluster_sizes,
                                             std::size_t rounds, std::size_t seeds, std::uint64_t base_seed,
                                             std::size_t local_steps) {
    if (seeds < 1) throw std::invalid_argument("cluster_sweep: need at least one seed");
    const auto T = static_cast<Eigen::Index>(rounds);
    const auto U = static_cast<Eigen::Index>(task.num_ues);
    std::vector<ClusterSweepPoint> out;
    for (std::size_t c : cluster_sizes) {
        ClusterSweepPoint pt;
        pt.cluster_size = c;
        pt.gap = Eigen::MatrixXd::Zero(T, U);
        pt.delta1 = Eigen::VectorXd::Zero(U);
        for (std::size_t s = 0; s < seeds; ++s) {
            Rng rng = make_rng(base_seed, "clusters", s);
            const AssociationMatrix b = sample_clusters(task.num_aps, task.num_ues, c, rng);
            const RoundTrace tr = run_rounds(task, b, rounds, derive_seed(base_seed, "seed", s), local_steps);
            pt.gap += tr.gap;
            pt.delta1 += tr.delta1;
        }
        pt.gap /= static_cast<double>(seeds);
        pt.delta1 /= static_cast<double>(seeds);
        pt.mean_gap = pt.gap.rowwise().mean();
        const BoundConstants k = bound_constants(task, static_cast<double>(c), rounds);
        pt.bound.resize(T, U);
        for (Eigen::Index u = 0; u < U; ++u) {
            const std::vector<double> bd = bound_eval(k, task.mu, pt.delta1[u], rounds);
            for (Eigen::Index t = 0; t < T; ++t) {
                pt.bound(t, u) = bd[static_cast<std::size_t>(t)];
                pt.worst_ratio = std::max(pt.worst_ratio, pt.gap(t, u) / pt.bound(t, u));
            }
        }
        out.push_back(std::move(pt));
    }
    return out;
}

MonotonicityReport monotonicity_check(const QuadraticTask& task, const std::vector<ClusterSweepPoint>& sweep) {
    MonotonicityReport r;
    const double delta1 = (task.init - task.w_star).squaredNorm();
    for (const auto& p : sweep) {
        const auto rounds = static_cast<std::size_t>(p.gap.rows());
        r.cluster_sizes.push_back(p.cluster_size);
        r.final_bound.push_back(
            bound_eval(bound_constants(task, static_cast<double>(p.cluster_size), rounds), task.mu, delta1, rounds).back());
        r.final_gap.push_back(p.mean_gap[p.mean_gap.size() - 1]);
    }
    r.bound_strictly_decreasing = true;
    r.gap_non_increasing = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        r.bound_strictly_decreasing = r.bound_strictly_decreasing && r.final_bound[i] < r.final_bound[i - 1];
        r.gap_non_increasing = r.gap_non_increasing && r.final_gap[i] <= r.final_gap[i - 1];
    }
    if (sweep.size() >= 2) {
        std::vector<double> sizes(r.cluster_sizes.begin(), r.cluster_sizes.end());
        r.spearman_rho = spearman(sizes, r.final_gap);
    }
    return r;
}

void write_convergence_csv(std::ostream& os, const std::vector<ClusterSweepPoint>& sweep) {
    os << "cluster_size,round,mean_gap,max_gap,min_bound\n";
    for (const auto& p : sweep)
        for (Eigen::Index t = 0; t < p.gap.rows(); ++t)
            os << p.cluster_size << ',' << t + 1 << ',' << fmt_num(p.mean_gap[t]) << ',' << fmt_num(p.gap.row(t).maxCoeff())
               << ',' << fmt_num(p.bound.row(t).minCoeff()) << '\n';
}

}  // namespace ucsfl
