// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ucsfl/nn.hpp"
#include "ucsfl/objective.hpp"
#include "ucsfl/random.hpp"

namespace ucsfl {

struct PpoConfig {
    double gamma = 0.99;
    double lambda = 0.9;
    std::size_t horizon = 4;  // rollout length between updates
    double clip = 0.1;
    double critic_lr = 1e-5;
    double actor_lr = 5e-5;
    std::size_t episodes = 200;  // one joint action per episode
    std::vector<std::size_t> hidden = {64, 64};
    double policy_output_scale = 0.01;
    bool normalize_reward = true;
    bool normalize_advantage = true;  // per-rollout standardization for the actor step
    double rate_scale_ul = 0.0;  // bit/s; 0 picks a single-user upper bound
    double rate_scale_dl = 0.0;

    void validate() const;
};

constexpr std::size_t kStateFeatures = 5;

/// Per-UE features: activation bits, sub-model bits, UE load, expected uplink
/// and downlink rate.
struct FeatureScales {
    double activation_bits = 1.0;
    double submodel_bits = 1.0;
    double load = 1.0;
    double rate_ul = 1.0;
    double rate_dl = 1.0;
};

/// Profile maxima plus rate scales; rates use the single-user bound
/// w log2(1 + P sum_m |h_mu|^2 / sigma^2) over the evaluator's draws unless set.
FeatureScales feature_scales(const StrategyEvaluator& evaluator, const PpoConfig& cfg);

/// Unnormalized per-UE features, one 5-vector per UE.
std::vector<Eigen::VectorXd> raw_state(const StrategyAssignment& strategy, const SplitProfile& profile,
                                       const LinkRates& expected_rates);
/// Features divided by the scales and clamped to [0, 1].
std::vector<Eigen::VectorXd> build_state(const StrategyAssignment& strategy, const SplitProfile& profile,
                                         const LinkRates& expected_rates, const FeatureScales& scales);

/// Split index is 1-based; probabilities are those of the executed elements
/// (split first, then one per AP bit).
struct AgentAction {
    std::size_t split = 1;
    std::vector<bool> bits;
    Eigen::VectorXd probabilities;
    bool repaired = false;
};

constexpr double kLogitBound = 50.0;

/// Clamped logits -> (split probabilities over L, bit-on probabilities over M).
struct PolicyOutput {
    Eigen::VectorXd split_probs;
    Eigen::VectorXd bit_probs;
};
PolicyOutput policy_output(const Eigen::VectorXd& logits, std::size_t num_points);

/// Probability of each element of `action` under `policy`.
Eigen::VectorXd element_probabilities(const PolicyOutput& policy, const AgentAction& action);

/// Samples a split and AP bits. If every bit is 0, the bit of the AP with the
/// largest large-scale gain is set.
AgentAction sample_action(const Mlp& actor, const Eigen::VectorXd& state, std::size_t num_points,
                          const Eigen::VectorXd& large_scale_gains, Rng& rng);

StrategyAssignment to_strategy(const std::vector<AgentAction>& actions, std::size_t num_aps);

/// U_t = -max_u Upsilon_u.
double reward(const RatioReport& ratio);

Eigen::VectorXd td_errors(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                          const Eigen::VectorXd& next_values, double gamma);
/// A_t = sum_{l >= 0} (gamma lambda)^l delta_{t+l}, truncated at the end of the rollout.
Eigen::VectorXd gae(const Eigen::VectorXd& deltas, double gamma, double lambda);

/// Global state of every UE followed by one-hot split and AP bits per UE.
Eigen::VectorXd critic_input(const std::vector<Eigen::VectorXd>& states, const std::vector<AgentAction>& actions,
                             std::size_t num_points, std::size_t num_aps);

/// Mean squared error of critic(x_t) against targets_t, and its parameter gradient.
double critic_loss(Mlp& critic, const std::vector<Eigen::VectorXd>& inputs, const Eigen::VectorXd& targets,
                   MlpGradients* grads = nullptr);

/// One optimizer step on the MSE towards old_critic(x_t) + A_t. Returns the loss before the step.
double critic_update(Mlp& critic, Adam& opt, const Mlp& old_critic, const std::vector<Eigen::VectorXd>& inputs,
                     const Eigen::VectorXd& advantages);

/// New-over-old probability of the executed split and of each executed bit.
Eigen::VectorXd ratio_vector(const Mlp& actor, const Mlp& old_actor, const Eigen::VectorXd& state,
                             const AgentAction& action, std::size_t num_points);

/// Mean over time steps and the M + 1 elements of min(r A, clip(r, 1 - k, 1 + k) A).
double actor_objective(Mlp& actor, const Mlp& old_actor, const std::vector<Eigen::VectorXd>& states,
                       const std::vector<AgentAction>& actions, const Eigen::VectorXd& advantages, double clip,
                       std::size_t num_points, MlpGradients* grads = nullptr);

/// One ascent step on actor_objective. Returns the objective before the step.
double actor_update(Mlp& actor, Adam& opt, const Mlp& old_actor, const std::vector<Eigen::VectorXd>& states,
                    const std::vector<AgentAction>& actions, const Eigen::VectorXd& advantages, double clip,
                    std::size_t num_points);

struct MaisResult {
    StrategyAssignment best;
    double best_reward = 0.0;
    std::size_t best_episode = 0;
    std::vector<double> rewards;  // raw reward per episode
    std::size_t updates = 0;
};

/// Multi-agent training loop: one actor per UE, one shared critic.
MaisResult train(StrategyEvaluator& evaluator, const PpoConfig& cfg, std::uint64_t seed);

void write_reward_trace_csv(std::ostream& os, const std::vector<double>& rewards);

}  // namespace ucsfl
