// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ucsfl/phy.hpp"
#include "ucsfl/random.hpp"

namespace ucsfl {

struct QuadraticTaskConfig {
    std::size_t dim = 6;
    std::size_t layers = 3;  // equal coordinate blocks
    double mu = 1.0;
    double beta = 2.0;
    std::size_t num_aps = 10;
    std::size_t num_ues = 4;
    double heterogeneity = 0.0;  // std of the per-(m,u) optimum offsets
    double eps = 0.5;            // per-layer noise norm cap
    double init_distance = 2.0;  // |W_init - W*| before offsets

    void validate() const;
};

/// F_{m,u}(w) = 1/2 (w - c_mu)^T A (w - c_mu) with mu I <= A <= beta I.
struct QuadraticTask {
    std::size_t layers = 0;
    std::size_t num_aps = 0;
    std::size_t num_ues = 0;
    Eigen::MatrixXd A;
    std::vector<Eigen::VectorXd> optima;  // indexed m * U + u
    Eigen::VectorXd w_star;               // minimizer of the average loss
    Eigen::VectorXd init;
    double mu = 0.0;
    double beta = 0.0;
    double eps = 0.0;
    double Z = 0.0;      // per-layer stochastic gradient norm bound
    double Gamma = 0.0;  // F* - mean_mu F*_mu
    double f_star = 0.0;
    double radius = 0.0;  // every iterate stays within this distance of w_star

    std::size_t dim() const { return static_cast<std::size_t>(A.rows()); }
    std::size_t layer_begin(std::size_t k) const;
    std::size_t layer_size(std::size_t k) const;
    /// Number of leading coordinates in layers 1..split.
    std::size_t prefix_size(std::size_t split) const;

    const Eigen::VectorXd& optimum(std::size_t m, std::size_t u) const { return optima[m * num_ues + u]; }
    double loss(std::size_t m, std::size_t u, const Eigen::VectorXd& w) const;
    Eigen::VectorXd gradient(std::size_t m, std::size_t u, const Eigen::VectorXd& w) const;
    /// Average of F_{m,u} over every (m, u) pair.
    double global_loss(const Eigen::VectorXd& w) const;
};

/// Eigenvalues of A span [mu, beta] with both ends attained. Z is derived from
/// the invariant ball of radius max(|init - w*|, (beta D_c + sqrt(L) eps) / mu)
/// where D_c = max |c_mu - w*|, which holds while eta_t <= 1 / beta.
QuadraticTask make_quadratic_task(const QuadraticTaskConfig& cfg, std::uint64_t seed);

/// Per-layer N(0, eps^2 / d_k) noise, each layer rescaled to norm <= eps.
Eigen::VectorXd layer_noise(const QuadraticTask& task, Rng& rng);

/// One noisy gradient step on F_{m,u}.
Eigen::VectorXd local_update(const QuadraticTask& task, const Eigen::VectorXd& w, std::size_t m, std::size_t u,
                             double eta, Rng& rng, bool noisy = true);

struct Aggregates {
    std::vector<Eigen::VectorXd> ap_means;  // empty vector for APs serving nobody
    std::vector<Eigen::VectorXd> ue_means;
};

/// Intra-cluster mean at every AP, then the mean over each UE's serving APs.
/// models is indexed m * U + u and only entries with b(m, u) = 1 are read.
Aggregates aggregate(const std::vector<Eigen::VectorXd>& models, const AssociationMatrix& assoc);

/// Coordinates of layers 1..split, and the remaining layers.
Eigen::VectorXd split_front(const QuadraticTask& task, const Eigen::VectorXd& w, std::size_t split);
Eigen::VectorXd split_back(const QuadraticTask& task, const Eigen::VectorXd& w, std::size_t split);

struct BoundConstants {
    double alpha = 0.0;
    double iota = 0.0;
    double R = 0.0;
};

BoundConstants bound_constants(double mu, double beta, std::size_t layers, double Z, double eps, double Gamma,
                               double cluster_size, std::size_t rounds);
BoundConstants bound_constants(const QuadraticTask& task, double cluster_size, std::size_t rounds);

/// eta_t = 2 / (mu (t + iota)).
double learning_rate(std::size_t t, double mu, double iota);

/// bound(t) = alpha / (t + iota) [2 R / mu + mu (iota + 1) / 2 delta1], t = 1..rounds.
std::vector<double> bound_eval(const BoundConstants& consts, double mu, double delta1, std::size_t rounds);

struct RoundTrace {
    Eigen::MatrixXd gap;      // rounds x U: F(Wbar_{u,t}) - F*, Wbar_{u,t} after round t
    Eigen::VectorXd delta1;   // |Wbar_{u,1} - W*|^2 per UE
};

/// Every round: local_steps noisy steps at each (m, u) with b = 1, two-level
/// aggregation, then W_{m,u} <- Wbar_u. All models start at task.init.
RoundTrace run_rounds(const QuadraticTask& task, const AssociationMatrix& assoc, std::size_t rounds,
                      std::uint64_t seed, std::size_t local_steps = 1, bool noisy = true);

/// Single model, exact average gradient plus one layer-noise draw per step, same schedule.
Eigen::VectorXd centralized_sgd(const QuadraticTask& task, std::size_t rounds, std::uint64_t seed);

/// Each UE joins cluster_size distinct APs chosen uniformly.
AssociationMatrix sample_clusters(std::size_t num_aps, std::size_t num_ues, std::size_t cluster_size, Rng& rng);

/// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ClusterSweepPoint {
    std::size_t cluster_size = 0;
    Eigen::MatrixXd gap;       // rounds x U, seed-mean
    Eigen::VectorXd delta1;    // per UE, seed-mean
    Eigen::MatrixXd bound;     // rounds x U, each UE with its own delta1
    Eigen::VectorXd mean_gap;  // rounds, averaged over UEs
    double worst_ratio = 0.0;  // max over t, u of gap / bound
};

/// Fresh random clusters per seed; seeds are shared across cluster sizes.
std::vector<ClusterSweepPoint> cluster_sweep(const QuadraticTask& task, const std::vector<std::size_t>& cluster_sizes,
                                             std::size_t rounds, std::size_t seeds, std::uint64_t base_seed,
                                             std::size_t local_steps = 1);

struct MonotonicityReport {
    std::vector<std::size_t> cluster_sizes;
    std::vector<double> final_bound;
    std::vector<double> final_gap;
    bool bound_strictly_decreasing = false;
    bool gap_non_increasing = false;
    double spearman_rho = 0.0;
};

/// The bound side uses delta1 = |init - W*|^2 for every cluster size so that
/// only R varies; the empirical side uses the seed-mean final gap.
MonotonicityReport monotonicity_check(const QuadraticTask& task, const std::vector<ClusterSweepPoint>& sweep);

void write_convergence_csv(std::ostream& os, const std::vector<ClusterSweepPoint>& sweep);

}  // namespace ucsfl
