// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>

#include "ucsfl/channel.hpp"
#include "ucsfl/latency.hpp"
#include "ucsfl/nbcd.hpp"
#include "ucsfl/phy.hpp"
#include "ucsfl/split_profile.hpp"

namespace ucsfl {

struct StrategyAssignment {
    Splits splits;
    AssociationMatrix assoc;

    void validate(std::size_t num_points) const;
    /// "l1-l2-...|assoc" form, used as a cache key and in CSV output.
    std::string key() const;
    auto operator<=>(const StrategyAssignment&) const = default;
};

struct RatioReport {
    Eigen::VectorXd ratios;
    double max_ratio = 0.0;
    double ell = 1.0;
    Eigen::VectorXd expected_latency;
};

/// Upsilon_u = E{t_u} / C_u^ell.
RatioReport latency_accuracy_ratio(const Eigen::VectorXd& expected_latency, const AssociationMatrix& assoc,
                                   double ell);

enum class Baseline { bl1, bl2, bl3 };

Baseline parse_baseline(const std::string& name);
std::string to_string(Baseline kind);

/// BL1: given splits, every AP serves every UE. BL2: every UE splits after block 1,
/// given association. BL3: no splitting (l = L), every AP serves every UE.
StrategyAssignment baseline(Baseline kind, std::size_t num_aps, std::size_t num_ues, std::size_t num_points,
                            const std::optional<Splits>& splits_from = std::nullopt,
                            const std::optional<AssociationMatrix>& assoc_from = std::nullopt);

/// Everything the long-term problem holds fixed: geometry, shadowing, radio,
/// compute and solver settings, plus the seeds of the fading draws used for E{.}.
struct Environment {
    NetworkLayout layout;
    LargeScaleMap large_scale;
    FadingParams fading;
    RadioConfig radio;
    ComputeConfig compute;
    SplitProfile profile;
    NbcdConfig nbcd;
    double ell = 1.0;
    std::size_t n_draws = 20;
    std::uint64_t seed = 0;

    std::size_t num_aps() const { return layout.num_aps(); }
    std::size_t num_ues() const { return layout.num_ues(); }
};

/// Places the network and draws shadowing from `seed`'s substreams.
Environment make_environment(std::uint64_t seed, std::size_t num_aps, std::size_t num_ues, double radius,
                             const FadingParams& fading, const RadioConfig& radio, const ComputeConfig& compute,
                             const SplitProfile& profile, const NbcdConfig& nbcd, double ell, std::size_t n_draws,
                             ApPlacement placement = ApPlacement::uniform, bool wrap_around = true);

struct StrategyEvaluation {
    RatioReport ratio;
    LatencyBreakdown mean_latency;  // componentwise average over draws
    LinkRates expected_rates;       // ratio of means over the per-draw solutions
    std::size_t unconverged_draws = 0;
};

/// Monte-Carlo estimate of E{t_u}: the short-term solver runs on every fading
/// draw. The draws are fixed at construction so every strategy sees the same
/// channels; results are memoized per strategy.
class StrategyEvaluator {
public:
    explicit StrategyEvaluator(Environment env);

    const Environment& environment() const { return env_; }
    const std::vector<ChannelRealization>& draws() const { return draws_; }
    const StrategyEvaluation& evaluate(const StrategyAssignment& strategy);
    std::size_t cache_size() const { return cache_.size(); }

private:
    Environment env_;
    std::vector<ChannelRealization> draws_;
    std::map<std::string, StrategyEvaluation> cache_;
};

}  // namespace ucsfl
