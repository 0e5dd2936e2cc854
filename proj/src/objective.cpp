// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "ucsfl/random.hpp"

namespace ucsfl {

void StrategyAssignment::validate(std::size_t num_points) const {
    if (splits.size() != assoc.num_ues()) throw std::invalid_argument("strategy: one split per UE required");
    for (std::size_t l : splits)
        if (l < 1 || l > num_points) throw std::out_of_range("strategy: split index out of range");
    assoc.validate();
}

std::string StrategyAssignment::key() const {
    std::string s;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(splits[i]);
    }
    return s + '|' + assoc.to_string();
}

RatioReport latency_accuracy_ratio(const Eigen::VectorXd& expected_latency, const AssociationMatrix& assoc,
                                   double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument("latency_accuracy_ratio: ell must be positive");
    if (static_cast<std::size_t>(expected_latency.size()) != assoc.num_ues())
        throw std::invalid_argument("latency_accuracy_ratio: size mismatch");
    RatioReport r;
    r.ell = ell;
    r.expected_latency = expected_latency;
    r.ratios.resize(expected_latency.size());
    for (Eigen::Index u = 0; u < expected_latency.size(); ++u) {
        const std::size_t c = assoc.cluster_size(static_cast<std::size_t>(u));
        if (c == 0) throw std::invalid_argument("latency_accuracy_ratio: UE with empty AP cluster");
        r.ratios[u] = expected_latency[u] / std::pow(static_cast<double>(c), ell);
    }
    r.max_ratio = r.ratios.maxCoeff();
    return r;
}

Baseline parse_baseline(const std::string& name) {
    if (name == "BL1" || name == "bl1") return Baseline::bl1;
    if (name == "BL2" || name == "bl2") return Baseline::bl2;
    if (name == "BL3" || name == "bl3") return Baseline::bl3;
    throw std::invalid_argument("unknown baseline '" + name + "'");
}

std::string to_string(Baseline kind) {
    switch (kind) {
        case Baseline::bl1: return "BL1";
        case Baseline::bl2: return "BL2";
        case Baseline::bl3: return "BL3";
    }
    return "?";
}

StrategyAssignment baseline(Baseline kind, std::size_t num_aps, std::size_t num_ues, std::size_t num_points,
                            const std::optional<Splits>& splits_from,
                            const std::optional<AssociationMatrix>& assoc_from) {
    if (num_aps < 1 || num_ues < 1 || num_points < 1) throw std::invalid_argument("baseline: empty dimensions");
    StrategyAssignment s;
    switch (kind) {
        case Baseline::bl1:
            if (!splits_from) throw std::invalid_argument("BL1 needs the splits to keep");
            s.splits = *splits_from;
            s.assoc = AssociationMatrix::all_ones(num_aps, num_ues);
            break;
        case Baseline::bl2:
            if (!assoc_from) throw std::invalid_argument("BL2 needs the association to keep");
            s.splits.assign(num_ues, 1);
            s.assoc = *assoc_from;
            break;
        case Baseline::bl3:
            s.splits.assign(num_ues, num_points);
            s.assoc = AssociationMatrix::all_ones(num_aps, num_ues);
            break;
    }
    if (s.assoc.num_aps() != num_aps || s.assoc.num_ues() != num_ues)
        throw std::invalid_argument("baseline: association has the wrong shape");
    s.validate(num_points);
    return s;
}

Environment make_environment(std::uint64_t seed, std::size_t num_aps, std::size_t num_ues, double radius,
                             const FadingParams& fading, const RadioConfig& radio, const ComputeConfig& compute,
                             const SplitProfile& profile, const NbcdConfig& nbcd, double ell, std::size_t n_draws,
                             ApPlacement placement, bool wrap_around) {
    Environment env;
    env.layout = place_network(derive_seed(seed, "placement"), num_aps, num_ues, radius, placement, wrap_around);
    env.large_scale = draw_large_scale(env.layout, fading, derive_seed(seed, "channel"));
    env.fading = fading;
    env.radio = radio;
    env.compute = compute;
    env.profile = profile;
    env.nbcd = nbcd;
    env.ell = ell;
    env.n_draws = n_draws;
    env.seed = seed;
    return env;
}

StrategyEvaluator::StrategyEvaluator(Environment env) : env_(std::move(env)) {
    if (env_.n_draws < 1) throw std::invalid_argument("evaluator: n_draws must be >= 1");
    env_.radio.validate();
    env_.compute.validate();
    for (std::size_t d = 0; d < env_.n_draws; ++d)
        draws_.push_back(draw_fading(env_.large_scale, env_.fading, derive_seed(env_.seed, "channel.draw", d)));
}

const StrategyEvaluation& StrategyEvaluator::evaluate(const StrategyAssignment& strategy) {
    strategy.validate(env_.profile.num_points());
    const std::string key = strategy.key();
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    const auto U = static_cast<Eigen::Index>(env_.num_ues());
    StrategyEvaluation ev;
    LatencyBreakdown& mean = ev.mean_latency;
    mean.t_ul = Eigen::VectorXd::Zero(U);
    mean.t_dl = Eigen::VectorXd::Zero(U);
    mean.t_total = Eigen::VectorXd::Zero(U);
    RatioOfMeans acc(env_.num_ues());
    for (const ChannelRealization& ch : draws_) {
        const NbcdResult res = solve(ch, strategy.assoc, strategy.splits, env_.profile, env_.radio, env_.nbcd);
        if (!res.converged) ++ev.unconverged_draws;
        const NbcdProblem pr(ch, strategy.assoc, strategy.splits, env_.profile, env_.radio);
        acc.add_uplink(pr.uplink_gains(), strategy.assoc, res.p, 1.0);
        acc.add_downlink(pr.downlink_amplitudes(res.v), 1.0);
        const LatencyBreakdown b = total_latency(env_.profile, strategy.splits, res.rates, env_.compute);
        mean.t_ul += b.t_ul;
        mean.t_ul_max += b.t_ul_max;
        mean.t_dl += b.t_dl;
        mean.t_total += b.t_total;
    }
    const double n = static_cast<double>(draws_.size());
    // Compute and backhaul terms do not depend on the draw.
    mean.t_ue = ue_compute_latency(env_.profile, strategy.splits, env_.compute);
    mean.t_dpu_max = dpu_latency_max(env_.profile, strategy.splits, env_.compute);
    mean.t_back = env_.compute.t_back;
    mean.t_ul /= n;
    mean.t_ul_max /= n;
    mean.t_dl /= n;
    mean.t_total /= n;
    ev.expected_rates = acc.rates(env_.radio.bandwidth);
    ev.ratio = latency_accuracy_ratio(mean.t_total, strategy.assoc, env_.ell);
    return cache_.emplace(key, std::move(ev)).first->second;
}

}  // namespace ucsfl
