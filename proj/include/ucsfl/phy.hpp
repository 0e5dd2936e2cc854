// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ucsfl/channel.hpp"

namespace ucsfl {

/// Binary M x U AP-UE association; b(m, u) = 1 when AP m serves UE u.
class AssociationMatrix {
public:
    AssociationMatrix() = default;
    AssociationMatrix(std::size_t num_aps, std::size_t num_ues, bool value = false);
    static AssociationMatrix all_ones(std::size_t num_aps, std::size_t num_ues);

    std::size_t num_aps() const { return m_; }
    std::size_t num_ues() const { return u_; }
    bool operator()(std::size_t m, std::size_t u) const { return b_[m * u_ + u] != 0; }
    void set(std::size_t m, std::size_t u, bool value) { b_[m * u_ + u] = value ? 1 : 0; }

    /// C_u: number of APs serving UE u.
    std::size_t cluster_size(std::size_t u) const;
    /// C_m: number of UEs served by AP m.
    std::size_t ue_cluster_size(std::size_t m) const;
    std::vector<std::size_t> serving_aps(std::size_t u) const;
    std::vector<std::size_t> served_ues(std::size_t m) const;

    /// Throws if any UE has an empty AP cluster.
    void validate() const;
    std::string to_string() const;  // rows of 0/1 separated by ';'

    bool operator==(const AssociationMatrix&) const = default;
    auto operator<=>(const AssociationMatrix&) const = default;

private:
    std::size_t m_ = 0;
    std::size_t u_ = 0;
    std::vector<std::uint8_t> b_;
};

/// Per-UE downlink beamformers; v[u] stacks the M per-AP blocks of length n_ant.
struct BeamformerSet {
    std::size_t num_aps = 0;
    std::size_t n_ant = 0;
    std::vector<Eigen::VectorXcd> v;

    Eigen::VectorBlock<Eigen::VectorXcd> block(std::size_t m, std::size_t u) {
        return v[u].segment(static_cast<Eigen::Index>(m * n_ant), static_cast<Eigen::Index>(n_ant));
    }
    Eigen::VectorBlock<const Eigen::VectorXcd> block(std::size_t m, std::size_t u) const {
        return v[u].segment(static_cast<Eigen::Index>(m * n_ant), static_cast<Eigen::Index>(n_ant));
    }
    /// Sum over UEs of the AP-m block energies.
    double ap_power(std::size_t m) const;
};

struct LinkRates {
    Eigen::VectorXd uplink_sinr;
    Eigen::VectorXd uplink_rate;
    Eigen::VectorXd downlink_sinr;
    Eigen::VectorXd downlink_rate;
    double bandwidth = 0.0;
};

/// Unit-norm conjugate combiners u_{m,u} = h_{m,u} / |h_{m,u}|, same indexing as the channel.
std::vector<Eigen::VectorXcd> conjugate_combiner(const ChannelRealization& channel);

/// G(u, v) = |sum_m b_{m,u} u_{m,u}^H h_{m,v}|^2, the gain of UE v's signal at UE u's combined output.
Eigen::MatrixXd uplink_gain_matrix(const ChannelRealization& channel, const AssociationMatrix& b);

Eigen::VectorXd uplink_sinr(const Eigen::MatrixXd& gains, const AssociationMatrix& b,
                            const Eigen::VectorXd& p, double sigma2);
Eigen::VectorXd uplink_sinr(const ChannelRealization& channel, const AssociationMatrix& b,
                            const Eigen::VectorXd& p, double sigma2);

/// S(u, v) = h_u B_v v_v, the amplitude of UE v's beam observed at UE u.
Eigen::MatrixXcd downlink_amplitudes(const ChannelRealization& channel, const AssociationMatrix& b,
                                     const BeamformerSet& v);

Eigen::VectorXd downlink_sinr(const Eigen::MatrixXcd& amplitudes, double sigma2);
Eigen::VectorXd downlink_sinr(const ChannelRealization& channel, const AssociationMatrix& b,
                              const BeamformerSet& v, double sigma2);

Eigen::VectorXd rates(const Eigen::VectorXd& sinr, double w);

/// Accumulates useful and interference-plus-noise powers over channel draws
/// and forms rates from the ratio of the averages.
class RatioOfMeans {
public:
    explicit RatioOfMeans(std::size_t num_ues);
    void add_uplink(const Eigen::MatrixXd& gains, const AssociationMatrix& b,
                    const Eigen::VectorXd& p, double sigma2);
    void add_downlink(const Eigen::MatrixXcd& amplitudes, double sigma2);
    LinkRates rates(double w) const;
    std::size_t uplink_draws() const { return n_ul_; }
    std::size_t downlink_draws() const { return n_dl_; }

private:
    Eigen::VectorXd ul_signal_, ul_denominator_, dl_signal_, dl_denominator_;
    std::size_t n_ul_ = 0;
    std::size_t n_dl_ = 0;
};

/// Expected rates of fixed (p, v) over n_draws fading draws of a fixed large-scale map.
LinkRates expected_rates(const LargeScaleMap& large_scale, const FadingParams& params,
                         const AssociationMatrix& b, const Eigen::VectorXd& p,
                         const BeamformerSet& v, double w, std::size_t n_draws, std::uint64_t seed);

}  // namespace ucsfl
