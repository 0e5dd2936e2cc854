// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/nbcd.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <limits>
#include <numbers>
#include <ostream>

#include "ucsfl/csv.hpp"

namespace ucsfl {

void RadioConfig::validate() const {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(p_ul_max > 0.0) || !(p_dl_max > 0.0)) throw std::invalid_argument("power budgets must be positive");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
}

void NbcdConfig::validate() const {
    if (!(rho_theta > 0.0) || !(rho_pi > 0.0)) throw std::invalid_argument("nbcd: step sizes must be positive");
    if (!(step_shrink > 0.0) || step_shrink > 1.0 || !(step_decay > 0.0) || step_decay > 1.0)
        throw std::invalid_argument("nbcd: step_shrink and step_decay must be in (0, 1]");
    if (!(sweep_tol > 0.0)) throw std::invalid_argument("nbcd: sweep_tol must be positive");
    if (!(tol_inner > 0.0) || !(tol_outer > 0.0) || !(bisect_tol > 0.0))
        throw std::invalid_argument("nbcd: tolerances must be positive");
    if (max_inner < 1 || max_outer < 1 || bisect_max < 1 || max_sweeps < 1)
        throw std::invalid_argument("nbcd: iteration caps must be positive");
    if (!(ridge >= 0.0)) throw std::invalid_argument("nbcd: ridge must be >= 0");
}

NbcdProblem::NbcdProblem(const ChannelRealization& channel, const AssociationMatrix& assoc, const Splits& splits,
                         const SplitProfile& profile, const RadioConfig& radio)
    : m_(channel.num_aps), u_(channel.num_ues), n_ant_(channel.n_ant), assoc_(assoc), radio_(radio) {
    radio.validate();
    if (assoc.num_aps() != m_ || assoc.num_ues() != u_)
        throw std::invalid_argument("nbcd: association and channel dimensions differ");
    assoc.validate();
    if (splits.size() != u_) throw std::invalid_argument("nbcd: one split per UE required");
    validate_splits(profile, splits);

    ln2_over_w_ = std::numbers::ln2 / radio.bandwidth;
    const double sigma = std::sqrt(radio.noise_power);
    g_ = uplink_gain_matrix(channel, assoc) / radio.noise_power;
    const auto U = static_cast<Eigen::Index>(u_);
    c_.resize(U);
    d_.resize(U);
    d_sub_.resize(U);
    for (std::size_t u = 0; u < u_; ++u) {
        const auto i = static_cast<Eigen::Index>(u);
        c_[i] = static_cast<double>(assoc.cluster_size(u));
        d_[i] = profile.activation_bits(splits[u]);
        d_sub_[i] = profile.submodel_bits(splits[u]);
    }
    for (std::size_t m = 0; m < m_; ++m) {
        Eigen::MatrixXcd h(U, static_cast<Eigen::Index>(n_ant_));
        for (std::size_t v = 0; v < u_; ++v) h.row(static_cast<Eigen::Index>(v)) = channel.at(m, v).transpose() / sigma;
        s_.push_back(h * h.adjoint());
        h_.push_back(std::move(h));
    }
}

Eigen::MatrixXcd NbcdProblem::downlink_amplitudes(const BeamformerSet& v) const {
    const auto U = static_cast<Eigen::Index>(u_);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(U, U);
    for (std::size_t m = 0; m < m_; ++m)
        for (std::size_t b = 0; b < u_; ++b)
            if (assoc_(m, b)) s.col(static_cast<Eigen::Index>(b)) += h_[m] * v.block(m, b);
    return s;
}

LinkRates NbcdProblem::link_rates(const Eigen::VectorXd& p, const BeamformerSet& v) const {
    LinkRates r;
    r.bandwidth = radio_.bandwidth;
    r.uplink_sinr = uplink_sinr(g_, assoc_, p, 1.0);
    r.downlink_sinr = downlink_sinr(downlink_amplitudes(v), 1.0);
    r.uplink_rate = rates(r.uplink_sinr, radio_.bandwidth);
    r.downlink_rate = rates(r.downlink_sinr, radio_.bandwidth);
    return r;
}

double fp_omega(double theta, double xi, double p_us, double p_iui, double noise) {
    return std::sqrt(theta * (1.0 + xi) * p_us) / (p_us + p_iui + noise);
}

std::complex<double> fp_Omega(double pi, double xi, std::complex<double> amplitude, double received_power,
                              double noise) {
    return std::sqrt(pi * (1.0 + xi)) * amplitude / (received_power + noise);
}

double power_for_multiplier(double theta, double xi, double omega, double g_uu, double weighted_gain,
                            double multiplier_scale, double upsilon) {
    const double num = theta * (1.0 + xi) * omega * omega * g_uu;
    if (num == 0.0) return 0.0;
    const double den = weighted_gain + multiplier_scale * upsilon;
    return num / (den * den);
}

double penalty_step(double value, double step) {
    const double next = value - step;
    return next > 0.0 ? next : value;
}

BeamformerSet mrt_beamformers(const ChannelRealization& channel, const AssociationMatrix& assoc, double p_dl_max) {
    BeamformerSet bf;
    bf.num_aps = channel.num_aps;
    bf.n_ant = channel.n_ant;
    bf.v.assign(channel.num_ues,
                Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(channel.num_aps * channel.n_ant)));
    for (std::size_t m = 0; m < channel.num_aps; ++m) {
        const std::size_t cm = assoc.ue_cluster_size(m);
        if (cm == 0) continue;
        const double amp = std::sqrt(p_dl_max / static_cast<double>(cm));
        for (std::size_t u : assoc.served_ues(m)) {
            const Eigen::VectorXcd& h = channel.at(m, u);
            const double n = h.norm();
            if (!(n > 0.0)) throw std::invalid_argument("mrt_beamformers: zero-norm channel");
            bf.block(m, u) = h.conjugate() * (amp / n);
        }
    }
    return bf;
}

namespace {

constexpr double kMaxLogGap = 10.0;

double max_violation(const NbcdProblem& pr, const Eigen::VectorXd& p, const BeamformerSet& v) {
    double worst = 0.0;
    for (Eigen::Index u = 0; u < p.size(); ++u) worst = std::max(worst, p[u] / pr.radio().p_ul_max - 1.0);
    for (std::size_t m = 0; m < pr.num_aps(); ++m) worst = std::max(worst, v.ap_power(m) / pr.radio().p_dl_max - 1.0);
    return worst;
}

double max_latency(const Eigen::VectorXd& bits, const Eigen::VectorXd& rate) {
    double t = 0.0;
    for (Eigen::Index u = 0; u < bits.size(); ++u)
        t = std::max(t, rate[u] > 0.0 ? bits[u] / rate[u] : std::numeric_limits<double>::infinity());
    return t;
}

}  // namespace

NbcdState initial_state(const NbcdProblem& pr) {
    const auto U = static_cast<Eigen::Index>(pr.num_ues());
    NbcdState s;
    s.p = Eigen::VectorXd::Constant(U, pr.radio().p_ul_max);
    s.v.num_aps = pr.num_aps();
    s.v.n_ant = pr.n_ant();
    s.v.v.assign(pr.num_ues(), Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(pr.num_aps() * pr.n_ant())));
    for (std::size_t m = 0; m < pr.num_aps(); ++m) {
        const std::size_t cm = pr.assoc().ue_cluster_size(m);
        if (cm == 0) continue;
        const double amp = std::sqrt(pr.radio().p_dl_max / static_cast<double>(cm));
        for (std::size_t u : pr.assoc().served_ues(m)) {
            const Eigen::VectorXcd h = pr.ap_channels(m).row(static_cast<Eigen::Index>(u)).transpose();
            s.v.block(m, u) = h.conjugate() * (amp / h.norm());
        }
    }
    s.theta = Eigen::VectorXd::Ones(U);
    s.pi = Eigen::VectorXd::Ones(U);
    s.omega = Eigen::VectorXd::Zero(U);
    s.Omega = Eigen::VectorXcd::Zero(U);
    s.upsilon = Eigen::VectorXd::Zero(U);
    s.chi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pr.num_aps()));
    update_uplink_sinr(s, pr);
    update_downlink_sinr(s, pr);
    const LinkRates r = pr.link_rates(s.p, s.v);
    s.t_max_ul = max_latency(pr.activation_bits(), r.uplink_rate);
    s.t_max_dl = max_latency(pr.submodel_bits(), r.downlink_rate);
    return s;
}

void update_uplink_sinr(NbcdState& s, const NbcdProblem& pr) {
    s.xi_ul = uplink_sinr(pr.uplink_gains(), pr.assoc(), s.p, 1.0);
}

void update_downlink_sinr(NbcdState& s, const NbcdProblem& pr) {
    s.xi_dl = downlink_sinr(pr.downlink_amplitudes(s.v), 1.0);
}

void update_omega(NbcdState& s, const NbcdProblem& pr) {
    const Eigen::MatrixXd& g = pr.uplink_gains();
    for (Eigen::Index u = 0; u < g.rows(); ++u) {
        const double p_us = s.p[u] * g(u, u);
        const double p_iui = g.row(u).dot(s.p) - p_us;
        s.omega[u] = fp_omega(s.theta[u], s.xi_ul[u], p_us, p_iui, pr.uplink_noise()[u]);
    }
}

void update_Omega(NbcdState& s, const NbcdProblem& pr) {
    const Eigen::MatrixXcd a = pr.downlink_amplitudes(s.v);
    for (Eigen::Index u = 0; u < a.rows(); ++u)
        s.Omega[u] = fp_Omega(s.pi[u], s.xi_dl[u], a(u, u), a.row(u).squaredNorm(), 1.0);
}

void update_power(NbcdState& s, const NbcdProblem& pr, const NbcdConfig& cfg) {
    const Eigen::MatrixXd& g = pr.uplink_gains();
    const Eigen::VectorXd w2 = s.omega.cwiseAbs2();
    const double scale = pr.multiplier_scale();
    for (Eigen::Index u = 0; u < g.rows(); ++u) {
        const double wg = g.col(u).dot(w2);
        auto f = [&](double ups) {
            return power_for_multiplier(s.theta[u], s.xi_ul[u], s.omega[u], g(u, u), wg, scale, ups);
        };
        const double start = s.upsilon[u] > 0.0 ? s.upsilon[u] : 1.0;
        const BisectionResult r = bisect_multiplier(f, pr.radio().p_ul_max, cfg.bisect_tol, cfg.bisect_max, start);
        s.upsilon[u] = r.x;
        s.p[u] = std::min(r.value, pr.radio().p_ul_max);
    }
}

namespace {

// Downlink beamformer solve in the U x U "push-through" form. For UE u with
// serving set psi_u and per-AP weights x_m, the stationary point is
//   v_{m,u} = H_m^H y_u / x_m,  y_u = (I + D K_u)^{-1} c_u e_u,
//   K_u = sum_{m in psi_u} H_m H_m^H / x_m,  D = diag(|Omega|^2),
// which avoids inverting the (M n_ant)-square matrix.
class DownlinkSolver {
public:
    DownlinkSolver(const NbcdProblem& pr, const NbcdState& s, double ridge_factor)
        : pr_(pr), n_(static_cast<Eigen::Index>(pr.num_ues())), a_(n_, n_), lu_(n_), rhs_(n_), z_(n_) {
        d_ = s.Omega.cwiseAbs2();
        c_.resize(n_);
        for (Eigen::Index u = 0; u < n_; ++u) c_[u] = s.Omega[u] * std::sqrt(s.pi[u] * (1.0 + s.xi_dl[u]));
        double trace = 0.0;
        for (std::size_t u = 0; u < pr.num_ues(); ++u) {
            double t = 0.0;
            for (std::size_t m : pr.assoc().serving_aps(u)) t += d_.dot(pr.ap_gram(m).diagonal().real());
            trace = std::max(trace, t);
        }
        ridge_ = ridge_factor * trace;
        if (!(ridge_ > 0.0)) ridge_ = std::numeric_limits<double>::min();
        for (std::size_t u = 0; u < pr.num_ues(); ++u) serving_.push_back(pr.assoc().serving_aps(u));
        for (std::size_t m = 0; m < pr.num_aps(); ++m) served_.push_back(pr.assoc().served_ues(m));
        x_.assign(pr.num_aps(), ridge_);
        y_.assign(pr.num_ues(), Eigen::VectorXcd::Zero(n_));
        rest_.assign(pr.num_ues(), Eigen::MatrixXcd::Zero(n_, n_));
    }

    double ridge() const { return ridge_; }

    void set_weights(const std::vector<double>& x) {
        x_ = x;
        for (std::size_t u = 0; u < pr_.num_ues(); ++u) {
            Eigen::MatrixXcd& k = rest_[u];
            k.setZero();
            for (std::size_t m : serving_[u]) k += pr_.ap_gram(m) / x_[m];
            solve_ue(u, k, y_[u]);
        }
    }

    /// Freezes every weight but x_m; subsequent power(m, x) calls vary x_m only.
    void focus(std::size_t m) {
        for (std::size_t u : served_[m]) {
            Eigen::MatrixXcd& k = rest_[u];
            k.setZero();
            for (std::size_t o : serving_[u])
                if (o != m) k += pr_.ap_gram(o) / x_[o];
        }
    }

    double power(std::size_t m, double x) {
        double p = 0.0;
        const Eigen::MatrixXcd& g = pr_.ap_gram(m);
        for (std::size_t u : served_[m]) {
            a_.noalias() = rest_[u] + g / x;
            solve_ue(u, a_, z_);
            p += z_.dot(g * z_).real() / (x * x);
        }
        return p;
    }

    /// Commits x_m (after focus(m)).
    void commit(std::size_t m, double x) {
        x_[m] = x;
        const Eigen::MatrixXcd& g = pr_.ap_gram(m);
        for (std::size_t u : served_[m]) {
            a_.noalias() = rest_[u] + g / x;
            solve_ue(u, a_, y_[u]);
        }
    }

    double committed_power(std::size_t m) const {
        double p = 0.0;
        const Eigen::MatrixXcd& g = pr_.ap_gram(m);
        for (std::size_t u : served_[m]) p += y_[u].dot(g * y_[u]).real() / (x_[m] * x_[m]);
        return p;
    }

    void write(BeamformerSet& v) const {
        for (std::size_t u = 0; u < pr_.num_ues(); ++u) {
            v.v[u].setZero();
            for (std::size_t m : serving_[u]) v.block(m, u) = pr_.ap_channels(m).adjoint() * (y_[u] / x_[m]);
        }
    }

private:
    // y = (I + D K)^{-1} c_u e_u; overwrites k.
    void solve_ue(std::size_t u, Eigen::MatrixXcd& k, Eigen::VectorXcd& y) {
        const auto iu = static_cast<Eigen::Index>(u);
        if (c_[iu] == 0.0) {
            y.setZero();
            return;
        }
        for (Eigen::Index r = 0; r < n_; ++r) k.row(r) *= d_[r];
        k.diagonal().array() += 1.0;
        lu_.compute(k);
        rhs_.setZero();
        rhs_[iu] = c_[iu];
        y = lu_.solve(rhs_);
    }
    void solve_ue(std::size_t u, const Eigen::MatrixXcd& k, Eigen::VectorXcd& y) {
        a_ = k;
        solve_ue(u, a_, y);
    }

    const NbcdProblem& pr_;
    Eigen::Index n_;
    Eigen::VectorXd d_;
    Eigen::VectorXcd c_;
    double ridge_ = 0.0;
    std::vector<std::vector<std::size_t>> serving_, served_;
    std::vector<double> x_;
    std::vector<Eigen::VectorXcd> y_;
    std::vector<Eigen::MatrixXcd> rest_;
    Eigen::MatrixXcd a_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    Eigen::VectorXcd rhs_, z_;
};

}  // namespace

void update_beamformer(NbcdState& s, const NbcdProblem& pr, const NbcdConfig& cfg) {
    DownlinkSolver solver(pr, s, cfg.ridge);
    const double budget = pr.radio().p_dl_max;
    const double scale = pr.multiplier_scale();
    const double ridge = solver.ridge();
    std::vector<double> x(pr.num_aps());
    for (std::size_t m = 0; m < pr.num_aps(); ++m) x[m] = scale * s.chi[static_cast<Eigen::Index>(m)] + ridge;
    solver.set_weights(x);

    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        bool settled = true;
        for (std::size_t m = 0; m < pr.num_aps(); ++m) {
            const double pm = solver.committed_power(m);
            const double chi_m = s.chi[static_cast<Eigen::Index>(m)];
            const bool slack = chi_m == 0.0 && pm <= budget;
            const bool tight = pm <= budget && pm >= budget * (1.0 - cfg.sweep_tol);
            if (slack || tight) continue;
            settled = false;
            solver.focus(m);
            auto f = [&](double chi) { return solver.power(m, scale * chi + ridge); };
            const BisectionResult r = bisect_multiplier(f, budget, cfg.bisect_tol, cfg.bisect_max,
                                                        chi_m > 0.0 ? chi_m : 1.0);
            s.chi[static_cast<Eigen::Index>(m)] = r.x;
            solver.commit(m, scale * r.x + ridge);
        }
        if (settled) break;
    }
    solver.write(s.v);
    for (std::size_t m = 0; m < pr.num_aps(); ++m) {
        const double pm = s.v.ap_power(m);
        if (pm > budget) {
            const double k = std::sqrt(budget / pm);
            for (std::size_t u = 0; u < pr.num_ues(); ++u) s.v.block(m, u) *= k;
        }
    }
}

void update_penalties(NbcdState& s, const LinkRates& prev, const NbcdProblem& pr, const NbcdConfig& cfg,
                      int iteration) {
    if (iteration <= 1 || s.step_theta <= 0.0) s.step_theta = cfg.rho_theta;
    if (iteration <= 1 || s.step_pi <= 0.0) s.step_pi = cfg.rho_pi;
    s.t_max_ul = max_latency(pr.activation_bits(), prev.uplink_rate);
    s.t_max_dl = max_latency(pr.submodel_bits(), prev.downlink_rate);
    auto step = [&](Eigen::VectorXd& weights, const Eigen::VectorXd& bits, const Eigen::VectorXd& rate, double t_max,
                    double& rho, int& bottleneck) {
        Eigen::Index worst = 0;
        for (Eigen::Index u = 0; u < weights.size(); ++u) {
            const double t = rate[u] > 0.0 ? bits[u] / rate[u] : std::numeric_limits<double>::infinity();
            if (t >= t_max) worst = u;
            if (cfg.penalty_rule == PenaltyRule::additive) {
                const double g = t < t_max ? 1.0 - t / t_max : 0.0;
                weights[u] = penalty_step(weights[u], rho * g);
            } else {
                double g = 0.0;
                if (t < t_max) g = std::isfinite(t_max) ? std::min(std::log(t_max / t), kMaxLogGap) : kMaxLogGap;
                weights[u] *= std::exp(-rho * g);
            }
        }
        weights /= weights.maxCoeff();
        rho *= cfg.step_decay;
        if (bottleneck >= 0 && bottleneck != static_cast<int>(worst)) rho *= cfg.step_shrink;
        bottleneck = static_cast<int>(worst);
    };
    step(s.theta, pr.activation_bits(), prev.uplink_rate, s.t_max_ul, s.step_theta, s.bottleneck_ul);
    step(s.pi, pr.submodel_bits(), prev.downlink_rate, s.t_max_dl, s.step_pi, s.bottleneck_dl);
}

double uplink_surrogate(const NbcdState& s, const NbcdProblem& pr) {
    const Eigen::VectorXd xi = uplink_sinr(pr.uplink_gains(), pr.assoc(), s.p, 1.0);
    return s.theta.dot(rates(xi, pr.radio().bandwidth));
}

double downlink_surrogate(const NbcdState& s, const NbcdProblem& pr) {
    const Eigen::VectorXd xi = downlink_sinr(pr.downlink_amplitudes(s.v), 1.0);
    return s.pi.dot(rates(xi, pr.radio().bandwidth));
}

NbcdResult solve(const ChannelRealization& channel, const AssociationMatrix& assoc, const Splits& splits,
                 const SplitProfile& profile, const RadioConfig& radio, const NbcdConfig& cfg, const NbcdState* init) {
    cfg.validate();
    const NbcdProblem pr(channel, assoc, splits, profile, radio);
    NbcdResult res;
    NbcdState s = init ? *init : initial_state(pr);

    LinkRates r = pr.link_rates(s.p, s.v);
    double t_ul = max_latency(pr.activation_bits(), r.uplink_rate);
    double t_dl = max_latency(pr.submodel_bits(), r.downlink_rate);
    double best_ul = t_ul, best_dl = t_dl;
    Eigen::VectorXd best_p = s.p;
    BeamformerSet best_v = s.v;
    double objective = t_ul + t_dl;

    for (int n = 1; n <= cfg.max_outer; ++n) {
        NbcdTraceRow row;
        row.iteration = n;

        // A UE whose power or beam collapsed keeps a zero auxiliary and cannot
        // recover, so each inner loop restarts from the best iterate so far.
        s.p = best_p;
        std::vector<double> ul_values;
        double f = uplink_surrogate(s, pr);
        for (int i = 0; i < cfg.max_inner; ++i) {
            update_uplink_sinr(s, pr);
            update_omega(s, pr);
            update_power(s, pr, cfg);
            const double fn = uplink_surrogate(s, pr);
            ++row.inner_ul;
            if (cfg.record_trace) ul_values.push_back(fn);
            const bool done = std::fabs(fn - f) <= cfg.tol_inner * std::fabs(f);
            f = fn;
            if (done) break;
        }

        s.v = best_v;
        update_downlink_sinr(s, pr);
        std::vector<double> dl_values;
        f = downlink_surrogate(s, pr);
        for (int i = 0; i < cfg.max_inner; ++i) {
            update_downlink_sinr(s, pr);
            update_Omega(s, pr);
            const BeamformerSet previous = s.v;
            update_beamformer(s, pr, cfg);
            double fn = downlink_surrogate(s, pr);
            ++row.inner_dl;
            if (cfg.record_trace) dl_values.push_back(fn);
            if (fn < f) {
                s.v = previous;
                fn = f;
            }
            const bool done = std::fabs(fn - f) <= cfg.tol_inner * std::fabs(f);
            f = fn;
            if (done) break;
        }
        update_uplink_sinr(s, pr);
        update_downlink_sinr(s, pr);

        r = pr.link_rates(s.p, s.v);
        t_ul = max_latency(pr.activation_bits(), r.uplink_rate);
        t_dl = max_latency(pr.submodel_bits(), r.downlink_rate);
        if (t_ul < best_ul) {
            best_ul = t_ul;
            best_p = s.p;
        }
        if (t_dl < best_dl) {
            best_dl = t_dl;
            best_v = s.v;
        }
        const double next = t_ul + t_dl;
        if (!std::isfinite(next))
            res.final_relative_change = std::numeric_limits<double>::infinity();
        else
            res.final_relative_change = next == objective ? 0.0 : std::fabs(next - objective) / objective;
        objective = next;
        row.t_max_ul = t_ul;
        row.t_max_dl = t_dl;
        row.max_violation = max_violation(pr, s.p, s.v);
        res.outer_iterations = n;
        if (cfg.record_trace) {
            res.trace.push_back(row);
            res.uplink_surrogates.push_back(std::move(ul_values));
            res.downlink_surrogates.push_back(std::move(dl_values));
        }
        if (res.final_relative_change < cfg.tol_outer) {
            res.converged = true;
            break;
        }
        update_penalties(s, r, pr, cfg, n);
    }

    res.p = best_p;
    res.v = best_v;
    res.rates = pr.link_rates(best_p, best_v);
    res.t_max_ul = max_latency(pr.activation_bits(), res.rates.uplink_rate);
    res.t_max_dl = max_latency(pr.submodel_bits(), res.rates.downlink_rate);
    res.state = std::move(s);
    return res;
}

void write_nbcd_trace_csv(std::ostream& os, const std::vector<NbcdTraceRow>& trace) {
    os << "iteration,t_max_ul_s,t_max_dl_s,max_violation,inner_ul,inner_dl\n";
    for (const auto& r : trace)
        os << r.iteration << ',' << fmt_num(r.t_max_ul) << ',' << fmt_num(r.t_max_dl) << ','
           << fmt_num(r.max_violation) << ',' << r.inner_ul << ',' << r.inner_dl << '\n';
}

}  // namespace ucsfl
