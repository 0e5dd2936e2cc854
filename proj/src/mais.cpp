// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/mais.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ucsfl/csv.hpp"

namespace ucsfl {

void PpoConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo: gamma must be in (0, 1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("ppo: lambda must be in [0, 1]");
    if (horizon < 1) throw std::invalid_argument("ppo: horizon must be >= 1");
    if (!(clip > 0.0)) throw std::invalid_argument("ppo: clip must be positive");
    if (!(critic_lr > 0.0) || !(actor_lr > 0.0)) throw std::invalid_argument("ppo: learning rates must be positive");
    if (episodes < 1) throw std::invalid_argument("ppo: episodes must be >= 1");
    for (std::size_t h : hidden)
        if (h == 0) throw std::invalid_argument("ppo: hidden widths must be positive");
    if (!(policy_output_scale > 0.0)) throw std::invalid_argument("ppo: policy_output_scale must be positive");
    if (rate_scale_ul < 0.0 || rate_scale_dl < 0.0) throw std::invalid_argument("ppo: rate scales must be >= 0");
}

FeatureScales feature_scales(const StrategyEvaluator& evaluator, const PpoConfig& cfg) {
    const Environment& env = evaluator.environment();
    FeatureScales s;
    s.activation_bits = env.profile.max_activation_bits();
    s.submodel_bits = env.profile.max_submodel_bits();
    s.load = env.profile.total_load();
    s.rate_ul = cfg.rate_scale_ul;
    s.rate_dl = cfg.rate_scale_dl;
    if (s.rate_ul > 0.0 && s.rate_dl > 0.0) return s;

    const double w = env.radio.bandwidth;
    const double sigma2 = env.fading.noise_power;
    double best_ul = 0.0, best_dl = 0.0;
    for (std::size_t u = 0; u < env.num_ues(); ++u) {
        double ul = 0.0, dl = 0.0;
        for (const ChannelRealization& ch : evaluator.draws()) {
            double energy = 0.0, amplitude = 0.0;
            for (std::size_t m = 0; m < env.num_aps(); ++m) {
                energy += ch.at(m, u).squaredNorm();
                amplitude += ch.at(m, u).norm();
            }
            ul += w * std::log2(1.0 + env.radio.p_ul_max * energy / sigma2);
            dl += w * std::log2(1.0 + env.radio.p_dl_max * amplitude * amplitude / sigma2);
        }
        const double n = static_cast<double>(evaluator.draws().size());
        best_ul = std::max(best_ul, ul / n);
        best_dl = std::max(best_dl, dl / n);
    }
    if (!(s.rate_ul > 0.0)) s.rate_ul = best_ul > 0.0 ? best_ul : 1.0;
    if (!(s.rate_dl > 0.0)) s.rate_dl = best_dl > 0.0 ? best_dl : 1.0;
    return s;
}

std::vector<Eigen::VectorXd> raw_state(const StrategyAssignment& strategy, const SplitProfile& profile,
                                       const LinkRates& expected_rates) {
    const std::size_t U = strategy.splits.size();
    if (static_cast<std::size_t>(expected_rates.uplink_rate.size()) != U ||
        static_cast<std::size_t>(expected_rates.downlink_rate.size()) != U)
        throw std::invalid_argument("raw_state: rate vectors do not match the UE count");
    std::vector<Eigen::VectorXd> out;
    out.reserve(U);
    for (std::size_t u = 0; u < U; ++u) {
        const SplitPoint& sp = profile.at(strategy.splits[u]);
        Eigen::VectorXd f(kStateFeatures);
        f << sp.activation_bits, sp.submodel_bits, sp.mac_load, expected_rates.uplink_rate[static_cast<Eigen::Index>(u)],
            expected_rates.downlink_rate[static_cast<Eigen::Index>(u)];
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<Eigen::VectorXd> build_state(const StrategyAssignment& strategy, const SplitProfile& profile,
                                         const LinkRates& expected_rates, const FeatureScales& scales) {
    std::vector<Eigen::VectorXd> out = raw_state(strategy, profile, expected_rates);
    Eigen::VectorXd inv(kStateFeatures);
    inv << 1.0 / scales.activation_bits, 1.0 / scales.submodel_bits, 1.0 / scales.load, 1.0 / scales.rate_ul,
        1.0 / scales.rate_dl;
    for (auto& f : out) f = f.cwiseProduct(inv).cwiseMax(0.0).cwiseMin(1.0);
    return out;
}

PolicyOutput policy_output(const Eigen::VectorXd& logits, std::size_t num_points) {
    if (num_points < 1 || static_cast<std::size_t>(logits.size()) < num_points)
        throw std::invalid_argument("policy_output: logits shorter than the split count");
    const Eigen::VectorXd z = logits.cwiseMax(-kLogitBound).cwiseMin(kLogitBound);
    const auto L = static_cast<Eigen::Index>(num_points);
    PolicyOutput out;
    const Eigen::ArrayXd e = (z.head(L).array() - z.head(L).maxCoeff()).exp();
    out.split_probs = (e / e.sum()).matrix();
    out.bit_probs = (1.0 / (1.0 + (-z.tail(z.size() - L).array()).exp())).matrix();
    return out;
}

Eigen::VectorXd element_probabilities(const PolicyOutput& policy, const AgentAction& action) {
    const auto M = policy.bit_probs.size();
    if (static_cast<Eigen::Index>(action.bits.size()) != M)
        throw std::invalid_argument("element_probabilities: bit count mismatch");
    Eigen::VectorXd p(M + 1);
    p[0] = policy.split_probs[static_cast<Eigen::Index>(action.split - 1)];
    for (Eigen::Index m = 0; m < M; ++m) {
        const double on = policy.bit_probs[m];
        p[m + 1] = action.bits[static_cast<std::size_t>(m)] ? on : 1.0 - on;
    }
    return p;
}

AgentAction sample_action(const Mlp& actor, const Eigen::VectorXd& state, std::size_t num_points,
                          const Eigen::VectorXd& large_scale_gains, Rng& rng) {
    const PolicyOutput pol = policy_output(actor.predict(state), num_points);
    const auto M = pol.bit_probs.size();
    if (large_scale_gains.size() != M) throw std::invalid_argument("sample_action: gain vector has the wrong size");
    AgentAction a;
    std::discrete_distribution<std::size_t> pick(pol.split_probs.data(), pol.split_probs.data() + pol.split_probs.size());
    a.split = pick(rng) + 1;
    a.bits.resize(static_cast<std::size_t>(M));
    bool any = false;
    for (Eigen::Index m = 0; m < M; ++m) {
        a.bits[static_cast<std::size_t>(m)] = uniform01(rng) < pol.bit_probs[m];
        any = any || a.bits[static_cast<std::size_t>(m)];
    }
    if (!any) {
        Eigen::Index best = 0;
        large_scale_gains.maxCoeff(&best);
        a.bits[static_cast<std::size_t>(best)] = true;
        a.repaired = true;
    }
    a.probabilities = element_probabilities(pol, a);
    return a;
}

StrategyAssignment to_strategy(const std::vector<AgentAction>& actions, std::size_t num_aps) {
    StrategyAssignment s;
    s.assoc = AssociationMatrix(num_aps, actions.size());
    for (std::size_t u = 0; u < actions.size(); ++u) {
        if (actions[u].bits.size() != num_aps) throw std::invalid_argument("to_strategy: bit count mismatch");
        s.splits.push_back(actions[u].split);
        for (std::size_t m = 0; m < num_aps; ++m) s.assoc.set(m, u, actions[u].bits[m]);
    }
    return s;
}

double reward(const RatioReport& ratio) { return -ratio.ratios.maxCoeff(); }

Eigen::VectorXd td_errors(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                          const Eigen::VectorXd& next_values, double gamma) {
    if (values.size() != rewards.size() || next_values.size() != rewards.size())
        throw std::invalid_argument("td_errors: length mismatch");
    return rewards + gamma * next_values - values;
}

Eigen::VectorXd gae(const Eigen::VectorXd& deltas, double gamma, double lambda) {
    Eigen::VectorXd adv(deltas.size());
    double acc = 0.0;
    for (Eigen::Index t = deltas.size(); t-- > 0;) {
        acc = deltas[t] + gamma * lambda * acc;
        adv[t] = acc;
    }
    return adv;
}

Eigen::VectorXd critic_input(const std::vector<Eigen::VectorXd>& states, const std::vector<AgentAction>& actions,
                             std::size_t num_points, std::size_t num_aps) {
    if (states.size() != actions.size()) throw std::invalid_argument("critic_input: states and actions differ in count");
    const std::size_t U = states.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(U * (kStateFeatures + num_points + num_aps)));
    Eigen::Index i = 0;
    for (const auto& s : states) {
        x.segment(i, static_cast<Eigen::Index>(kStateFeatures)) = s;
        i += static_cast<Eigen::Index>(kStateFeatures);
    }
    for (const auto& a : actions) {
        x[i + static_cast<Eigen::Index>(a.split - 1)] = 1.0;
        i += static_cast<Eigen::Index>(num_points);
        for (std::size_t m = 0; m < num_aps; ++m) x[i + static_cast<Eigen::Index>(m)] = a.bits[m] ? 1.0 : 0.0;
        i += static_cast<Eigen::Index>(num_aps);
    }
    return x;
}

double critic_loss(Mlp& critic, const std::vector<Eigen::VectorXd>& inputs, const Eigen::VectorXd& targets,
                   MlpGradients* grads) {
    if (static_cast<Eigen::Index>(inputs.size()) != targets.size() || inputs.empty())
        throw std::invalid_argument("critic_loss: batch mismatch");
    const double n = static_cast<double>(inputs.size());
    if (grads) *grads = critic.zero_gradients();
    double loss = 0.0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        const double err = critic.forward(inputs[t])[0] - targets[static_cast<Eigen::Index>(t)];
        loss += err * err / n;
        if (grads) *grads += critic.backward(Eigen::VectorXd::Constant(1, 2.0 * err / n));
    }
    return loss;
}

double critic_update(Mlp& critic, Adam& opt, const Mlp& old_critic, const std::vector<Eigen::VectorXd>& inputs,
                     const Eigen::VectorXd& advantages) {
    Eigen::VectorXd targets(advantages.size());
    for (std::size_t t = 0; t < inputs.size(); ++t)
        targets[static_cast<Eigen::Index>(t)] = old_critic.predict(inputs[t])[0] + advantages[static_cast<Eigen::Index>(t)];
    MlpGradients g;
    const double loss = critic_loss(critic, inputs, targets, &g);
    opt.step(critic, g, false);
    return loss;
}

Eigen::VectorXd ratio_vector(const Mlp& actor, const Mlp& old_actor, const Eigen::VectorXd& state,
                             const AgentAction& action, std::size_t num_points) {
    const Eigen::VectorXd now = element_probabilities(policy_output(actor.predict(state), num_points), action);
    const Eigen::VectorXd old = element_probabilities(policy_output(old_actor.predict(state), num_points), action);
    if ((old.array() <= 0.0).any()) throw std::domain_error("ratio_vector: old policy gives the action zero probability");
    return now.cwiseQuotient(old);
}

double actor_objective(Mlp& actor, const Mlp& old_actor, const std::vector<Eigen::VectorXd>& states,
                       const std::vector<AgentAction>& actions, const Eigen::VectorXd& advantages, double clip,
                       std::size_t num_points, MlpGradients* grads) {
    if (states.size() != actions.size() || static_cast<Eigen::Index>(states.size()) != advantages.size() ||
        states.empty())
        throw std::invalid_argument("actor_objective: batch mismatch");
    if (grads) *grads = actor.zero_gradients();
    const auto L = static_cast<Eigen::Index>(num_points);
    double total = 0.0;
    for (std::size_t t = 0; t < states.size(); ++t) {
        const AgentAction& a = actions[t];
        const double adv = advantages[static_cast<Eigen::Index>(t)];
        const Eigen::VectorXd logits = actor.forward(states[t]);
        const PolicyOutput pol = policy_output(logits, num_points);
        const Eigen::VectorXd now = element_probabilities(pol, a);
        const Eigen::VectorXd old = element_probabilities(policy_output(old_actor.predict(states[t]), num_points), a);
        const auto K = now.size();
        const double weight = 1.0 / static_cast<double>(states.size() * static_cast<std::size_t>(K));
        Eigen::VectorXd upstream = Eigen::VectorXd::Zero(logits.size());
        for (Eigen::Index k = 0; k < K; ++k) {
            const double r = now[k] / old[k];
            const double unclipped = r * adv;
            const double clipped = std::clamp(r, 1.0 - clip, 1.0 + clip) * adv;
            total += weight * std::min(unclipped, clipped);
            if (unclipped > clipped) continue;
            // d r / d z = r * d log p / d z; saturated logits pass no gradient
            const double scale = weight * adv * r;
            if (k == 0) {
                for (Eigen::Index j = 0; j < L; ++j) {
                    if (std::abs(logits[j]) >= kLogitBound) continue;
                    const double kron = (j == static_cast<Eigen::Index>(a.split - 1)) ? 1.0 : 0.0;
                    upstream[j] += scale * (kron - pol.split_probs[j]);
                }
            } else {
                const Eigen::Index j = L + k - 1;
                if (std::abs(logits[j]) >= kLogitBound) continue;
                const double b = a.bits[static_cast<std::size_t>(k - 1)] ? 1.0 : 0.0;
                upstream[j] += scale * (b - pol.bit_probs[k - 1]);
            }
        }
        if (grads) *grads += actor.backward(upstream);
    }
    return total;
}

double actor_update(Mlp& actor, Adam& opt, const Mlp& old_actor, const std::vector<Eigen::VectorXd>& states,
                    const std::vector<AgentAction>& actions, const Eigen::VectorXd& advantages, double clip,
                    std::size_t num_points) {
    MlpGradients g;
    const double value = actor_objective(actor, old_actor, states, actions, advantages, clip, num_points, &g);
    opt.step(actor, g, true);
    return value;
}

MaisResult train(StrategyEvaluator& evaluator, const PpoConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const Environment& env = evaluator.environment();
    const std::size_t U = env.num_ues();
    const std::size_t M = env.num_aps();
    const std::size_t L = env.profile.num_points();
    const FeatureScales scales = feature_scales(evaluator, cfg);

    std::vector<Eigen::VectorXd> gains(U, Eigen::VectorXd(static_cast<Eigen::Index>(M)));
    for (std::size_t u = 0; u < U; ++u)
        for (std::size_t m = 0; m < M; ++m) gains[u][static_cast<Eigen::Index>(m)] = env.large_scale.at(m, u);

    std::vector<std::size_t> actor_widths{kStateFeatures};
    actor_widths.insert(actor_widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    actor_widths.push_back(L + M);
    std::vector<std::size_t> critic_widths{U * (kStateFeatures + L + M)};
    critic_widths.insert(critic_widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    critic_widths.push_back(1);

    std::vector<Mlp> actors, old_actors;
    std::vector<Adam> actor_opts;
    for (std::size_t u = 0; u < U; ++u) {
        actors.emplace_back(actor_widths, derive_seed(seed, "ppo.actor", u), cfg.policy_output_scale);
        actor_opts.emplace_back(actors.back(), cfg.actor_lr);
    }
    old_actors = actors;
    Mlp critic(critic_widths, derive_seed(seed, "ppo.critic"));
    Mlp old_critic = critic;
    Adam critic_opt(critic, cfg.critic_lr);
    Rng rng = make_rng(seed, "ppo.sample");

    MaisResult result;
    auto sample_joint = [&](const std::vector<Eigen::VectorXd>& state) {
        std::vector<AgentAction> a;
        for (std::size_t u = 0; u < U; ++u) a.push_back(sample_action(old_actors[u], state[u], L, gains[u], rng));
        return a;
    };
    auto record = [&](const StrategyAssignment& s, const StrategyEvaluation& ev) {
        const double r = reward(ev.ratio);
        result.rewards.push_back(r);
        if (result.rewards.size() == 1 || r > result.best_reward) {
            result.best = s;
            result.best_reward = r;
            result.best_episode = result.rewards.size() - 1;
        }
        return r;
    };

    if (L == 1 && M == 1) {
        StrategyAssignment only{Splits(U, 1), AssociationMatrix::all_ones(1, U)};
        record(only, evaluator.evaluate(only));
        return result;
    }

    // The first state comes from a uniformly random feasible strategy.
    StrategyAssignment start;
    start.assoc = AssociationMatrix(M, U);
    for (std::size_t u = 0; u < U; ++u) {
        start.splits.push_back(1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(L)) % L);
        const std::uint64_t mask = 1 + static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>((1ULL << M) - 1)) % ((1ULL << M) - 1);
        for (std::size_t m = 0; m < M; ++m) start.assoc.set(m, u, (mask >> m) & 1ULL);
    }
    std::vector<Eigen::VectorXd> state = build_state(start, env.profile, evaluator.evaluate(start).expected_rates, scales);

    double reward_scale = 0.0;
    std::vector<std::vector<Eigen::VectorXd>> buf_states;
    std::vector<std::vector<AgentAction>> buf_actions;
    std::vector<double> buf_rewards;
    while (result.rewards.size() < cfg.episodes) {
        const std::vector<AgentAction> action = sample_joint(state);
        const StrategyAssignment strategy = to_strategy(action, M);
        const StrategyEvaluation& ev = evaluator.evaluate(strategy);
        double r = record(strategy, ev);
        if (cfg.normalize_reward) {
            reward_scale = std::max(reward_scale, std::abs(r));
            if (reward_scale > 0.0) r /= reward_scale;
        }
        buf_states.push_back(state);
        buf_actions.push_back(action);
        buf_rewards.push_back(r);
        state = build_state(strategy, env.profile, ev.expected_rates, scales);
        if (buf_states.size() < cfg.horizon) continue;

        // Bootstrap from the action the old policy takes in the next state.
        const std::vector<AgentAction> bootstrap = sample_joint(state);
        const auto T = static_cast<Eigen::Index>(cfg.horizon);
        std::vector<Eigen::VectorXd> inputs;
        Eigen::VectorXd rewards(T), values(T), next_values(T);
        for (Eigen::Index t = 0; t < T; ++t) {
            const auto i = static_cast<std::size_t>(t);
            inputs.push_back(critic_input(buf_states[i], buf_actions[i], L, M));
            rewards[t] = buf_rewards[i];
            values[t] = old_critic.predict(inputs.back())[0];
        }
        for (Eigen::Index t = 0; t + 1 < T; ++t) next_values[t] = values[t + 1];
        next_values[T - 1] = old_critic.predict(critic_input(state, bootstrap, L, M))[0];
        const Eigen::VectorXd adv = gae(td_errors(rewards, values, next_values, cfg.gamma), cfg.gamma, cfg.lambda);

        critic_update(critic, critic_opt, old_critic, inputs, adv);
        Eigen::VectorXd actor_adv = adv;
        if (cfg.normalize_advantage && T > 1) {
            const double mean = adv.mean();
            const double sd = std::sqrt((adv.array() - mean).square().sum() / static_cast<double>(T - 1));
            actor_adv = (adv.array() - mean) / (sd + 1e-8);
        }
        for (std::size_t u = 0; u < U; ++u) {
            std::vector<Eigen::VectorXd> su;
            std::vector<AgentAction> au;
            for (std::size_t i = 0; i < buf_states.size(); ++i) {
                su.push_back(buf_states[i][u]);
                au.push_back(buf_actions[i][u]);
            }
            actor_update(actors[u], actor_opts[u], old_actors[u], su, au, actor_adv, cfg.clip, L);
        }
        buf_states.clear();
        buf_actions.clear();
        buf_rewards.clear();
        old_actors = actors;
        old_critic = critic;
        ++result.updates;
    }
    return result;
}

void write_reward_trace_csv(std::ostream& os, const std::vector<double>& rewards) {
    os << "episode,reward\n";
    for (std::size_t i = 0; i < rewards.size(); ++i) os << i + 1 << ',' << fmt_num(rewards[i]) << '\n';
}

}  // namespace ucsfl
