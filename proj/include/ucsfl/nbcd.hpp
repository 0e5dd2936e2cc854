// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "ucsfl/channel.hpp"
#include "ucsfl/latency.hpp"
#include "ucsfl/phy.hpp"
#include "ucsfl/split_profile.hpp"

namespace ucsfl {

struct RadioConfig {
    double bandwidth = 15e3;  // w, Hz
    double p_ul_max = 0.1;    // W
    double p_dl_max = 0.3;    // W per AP
    double noise_power = default_noise_power();

    void validate() const;
};

enum class PenaltyRule {
    multiplicative,  // theta_u *= exp(-rho * log(t_max / t_u))
    additive,        // theta_u = penalty_step(theta_u, rho * (1 - t_u / t_max))
};

struct NbcdConfig {
    // Both rules rescale the penalties to max 1 after each step. Steps decay by step_decay per outer iteration and additionally by
    // step_shrink whenever the block's bottleneck UE changes.
    PenaltyRule penalty_rule = PenaltyRule::multiplicative;
    double rho_theta = 0.3;
    double rho_pi = 0.3;
    double step_decay = 0.85;
    double step_shrink = 0.5;
    double tol_inner = 1e-5;
    double tol_outer = 1e-4;
    int max_inner = 50;
    int max_outer = 100;
    double bisect_tol = 1e-8;
    int bisect_max = 100;
    double ridge = 1e-12;
    int max_sweeps = 200;     // cyclic passes over the per-AP multipliers
    double sweep_tol = 1e-6;  // an active AP within this relative slack below budget counts as tight
    bool record_trace = false;

    void validate() const;
};

/// Short-term variables. Auxiliaries and multipliers live in noise-normalized
/// units (channels divided by the noise amplitude).
struct NbcdState {
    Eigen::VectorXd p;
    BeamformerSet v;
    Eigen::VectorXd theta;
    Eigen::VectorXd pi;
    Eigen::VectorXd xi_ul;
    Eigen::VectorXd xi_dl;
    Eigen::VectorXd omega;
    Eigen::VectorXcd Omega;
    Eigen::VectorXd upsilon;
    Eigen::VectorXd chi;
    double t_max_ul = 0.0;
    double t_max_dl = 0.0;
    double step_theta = 0.0;  // current penalty steps, set from the config on first use
    double step_pi = 0.0;
    int bottleneck_ul = -1;
    int bottleneck_dl = -1;
};

/// Precomputed, noise-normalized view of one short-term instance.
class NbcdProblem {
public:
    NbcdProblem(const ChannelRealization& channel, const AssociationMatrix& assoc, const Splits& splits,
                const SplitProfile& profile, const RadioConfig& radio);

    std::size_t num_aps() const { return m_; }
    std::size_t num_ues() const { return u_; }
    std::size_t n_ant() const { return n_ant_; }
    const AssociationMatrix& assoc() const { return assoc_; }
    const RadioConfig& radio() const { return radio_; }
    /// ln2 / w.
    double multiplier_scale() const { return ln2_over_w_; }

    /// Uplink gains over noise power; G(u, v) as in uplink_gain_matrix.
    const Eigen::MatrixXd& uplink_gains() const { return g_; }
    /// C_u, the uplink noise multiplicity.
    const Eigen::VectorXd& uplink_noise() const { return c_; }
    /// Rows are h_{m,v} / sigma for every UE v.
    const Eigen::MatrixXcd& ap_channels(std::size_t m) const { return h_[m]; }
    /// H_m H_m^H.
    const Eigen::MatrixXcd& ap_gram(std::size_t m) const { return s_[m]; }
    const Eigen::VectorXd& activation_bits() const { return d_; }
    const Eigen::VectorXd& submodel_bits() const { return d_sub_; }

    Eigen::MatrixXcd downlink_amplitudes(const BeamformerSet& v) const;
    LinkRates link_rates(const Eigen::VectorXd& p, const BeamformerSet& v) const;

private:
    std::size_t m_, u_, n_ant_;
    AssociationMatrix assoc_;
    RadioConfig radio_;
    double ln2_over_w_;
    Eigen::MatrixXd g_;
    Eigen::VectorXd c_;
    std::vector<Eigen::MatrixXcd> h_;
    std::vector<Eigen::MatrixXcd> s_;
    Eigen::VectorXd d_, d_sub_;
};

// Closed-form kernels.

/// Quadratic-transform auxiliary of the uplink block.
double fp_omega(double theta, double xi, double p_us, double p_iui, double noise);
/// Quadratic-transform auxiliary of the downlink block; `amplitude` is h_u B_u v_u.
std::complex<double> fp_Omega(double pi, double xi, std::complex<double> amplitude, double received_power,
                              double noise);
/// Uplink power for a given multiplier; `weighted_gain` is sum_v omega_v^2 G(v, u).
double power_for_multiplier(double theta, double xi, double omega, double g_uu, double weighted_gain,
                            double multiplier_scale, double upsilon);
/// One projected sub-gradient step: value - step unless that would leave the positive orthant.
double penalty_step(double value, double step);

/// Binary search for the multiplier x >= 0 of a non-increasing f: returns x = 0
/// when f(0) <= target, else x with target - rel_tol * target <= f(x) <= target.
struct BisectionResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};
template <class F>
BisectionResult bisect_multiplier(F&& f, double target, double rel_tol, int max_iter, double start = 1.0);

// Block updates on the state.

NbcdState initial_state(const NbcdProblem& problem);
void update_uplink_sinr(NbcdState& s, const NbcdProblem& problem);
void update_downlink_sinr(NbcdState& s, const NbcdProblem& problem);
void update_omega(NbcdState& s, const NbcdProblem& problem);
void update_Omega(NbcdState& s, const NbcdProblem& problem);
void update_power(NbcdState& s, const NbcdProblem& problem, const NbcdConfig& cfg);
void update_beamformer(NbcdState& s, const NbcdProblem& problem, const NbcdConfig& cfg);
/// Penalty update from the rates of the previous outer iteration; `iteration` is 1-based.
void update_penalties(NbcdState& s, const LinkRates& previous, const NbcdProblem& problem,
                      const NbcdConfig& cfg, int iteration);

/// Weighted sum-rate of each block (bit/s), the value its inner loop ascends.
double uplink_surrogate(const NbcdState& s, const NbcdProblem& problem);
double downlink_surrogate(const NbcdState& s, const NbcdProblem& problem);

struct NbcdTraceRow {
    int iteration = 0;
    double t_max_ul = 0.0;
    double t_max_dl = 0.0;
    double max_violation = 0.0;  // relative excess over the C1 / C2 budgets
    int inner_ul = 0;
    int inner_dl = 0;
};

struct NbcdResult {
    Eigen::VectorXd p;
    BeamformerSet v;
    LinkRates rates;
    double t_max_ul = 0.0;
    double t_max_dl = 0.0;
    int outer_iterations = 0;
    bool converged = false;
    double final_relative_change = 0.0;
    NbcdState state;
    std::vector<NbcdTraceRow> trace;
    /// Per inner loop, the surrogate after each proposed block update (only with record_trace).
    std::vector<std::vector<double>> uplink_surrogates;
    std::vector<std::vector<double>> downlink_surrogates;
};

NbcdResult solve(const ChannelRealization& channel, const AssociationMatrix& assoc, const Splits& splits,
                 const SplitProfile& profile, const RadioConfig& radio, const NbcdConfig& cfg,
                 const NbcdState* init = nullptr);

/// Per-AP equal-power matched-filter beamformers.
BeamformerSet mrt_beamformers(const ChannelRealization& channel, const AssociationMatrix& assoc,
                              double p_dl_max);

void write_nbcd_trace_csv(std::ostream& os, const std::vector<NbcdTraceRow>& trace);

template <class F>
BisectionResult bisect_multiplier(F&& f, double target, double rel_tol, int max_iter, double start) {
    BisectionResult r;
    const double tol = rel_tol * target;
    const double f0 = f(0.0);
    if (f0 <= target) {
        r.value = f0;
        r.converged = true;
        return r;
    }
    // Bracket [lo, hi] with f(lo) > target >= f(hi).
    double lo = 0.0, flo = f0;
    double hi = start > 0.0 ? start : 1.0;
    double fhi = f(hi);
    if (fhi <= target) {
        for (int k = 0; k < 1100; ++k) {
            const double cand = hi * 0.5;
            const double fc = f(cand);
            if (fc > target) {
                lo = cand;
                flo = fc;
                break;
            }
            hi = cand;
            fhi = fc;
        }
    } else {
        for (int k = 0; k < 1100 && fhi > target; ++k) {
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = f(hi);
        }
        if (fhi > target) throw std::runtime_error("bisect_multiplier: failed to bracket the constraint");
    }
    // Bracketed search: log-log secant steps aimed just inside the feasible side,
    // with a plain halving whenever the same end moved twice in a row.
    const double aim = target - 0.5 * tol;
    int same_side = 0;
    bool last_low = false;
    while (r.iterations < max_iter) {
        if (target - fhi <= tol) {
            r.converged = true;
            break;
        }
        double mid;
        const bool interpolate = lo > 0.0 && fhi > 0.0 && std::isfinite(flo) && same_side < 2;
        if (interpolate) {
            const double llo = std::log(lo), lhi = std::log(hi);
            double t = (std::log(aim) - std::log(flo)) / (std::log(fhi) - std::log(flo));
            t = std::clamp(t, 0.01, 0.99);
            mid = std::exp(llo + t * (lhi - llo));
        } else {
            mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
        }
        const double fm = f(mid);
        ++r.iterations;
        const bool low = fm > target;
        if (low) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        same_side = (r.iterations > 1 && low == last_low) ? same_side + 1 : 0;
        last_low = low;
    }
    r.x = hi;
    r.value = fhi;
    return r;
}

}  // namespace ucsfl
