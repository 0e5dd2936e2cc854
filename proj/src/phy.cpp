// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/phy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ucsfl/random.hpp"

namespace ucsfl {

AssociationMatrix::AssociationMatrix(std::size_t num_aps, std::size_t num_ues, bool value)
    : m_(num_aps), u_(num_ues), b_(num_aps * num_ues, value ? 1 : 0) {}

AssociationMatrix AssociationMatrix::all_ones(std::size_t num_aps, std::size_t num_ues) {
    return AssociationMatrix(num_aps, num_ues, true);
}

std::size_t AssociationMatrix::cluster_size(std::size_t u) const {
    std::size_t c = 0;
    for (std::size_t m = 0; m < m_; ++m) c += b_[m * u_ + u];
    return c;
}

std::size_t AssociationMatrix::ue_cluster_size(std::size_t m) const {
    std::size_t c = 0;
    for (std::size_t u = 0; u < u_; ++u) c += b_[m * u_ + u];
    return c;
}

std::vector<std::size_t> AssociationMatrix::serving_aps(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < m_; ++m)
        if (b_[m * u_ + u]) out.push_back(m);
    return out;
}

std::vector<std::size_t> AssociationMatrix::served_ues(std::size_t m) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < u_; ++u)
        if (b_[m * u_ + u]) out.push_back(u);
    return out;
}

void AssociationMatrix::validate() const {
    if (m_ < 1 || u_ < 1) throw std::invalid_argument("association matrix is empty");
    for (std::size_t u = 0; u < u_; ++u)
        if (cluster_size(u) == 0)
            throw std::invalid_argument("UE " + std::to_string(u) + " has an empty AP cluster");
}

std::string AssociationMatrix::to_string() const {
    std::string s;
    for (std::size_t m = 0; m < m_; ++m) {
        if (m) s += ';';
        for (std::size_t u = 0; u < u_; ++u) s += b_[m * u_ + u] ? '1' : '0';
    }
    return s;
}

double BeamformerSet::ap_power(std::size_t m) const {
    double p = 0.0;
    for (std::size_t u = 0; u < v.size(); ++u) p += block(m, u).squaredNorm();
    return p;
}

std::vector<Eigen::VectorXcd> conjugate_combiner(const ChannelRealization& channel) {
    std::vector<Eigen::VectorXcd> out;
    out.reserve(channel.h.size());
    for (const auto& h : channel.h) {
        const double n = h.norm();
        if (!(n > 0.0)) throw std::invalid_argument("conjugate_combiner: zero-norm channel");
        out.push_back(h / n);
    }
    return out;
}

namespace {

void check_dims(const ChannelRealization& ch, const AssociationMatrix& b) {
    if (b.num_aps() != ch.num_aps || b.num_ues() != ch.num_ues)
        throw std::invalid_argument("association and channel dimensions differ");
}

}  // namespace

Eigen::MatrixXd uplink_gain_matrix(const ChannelRealization& ch, const AssociationMatrix& b) {
    check_dims(ch, b);
    const auto comb = conjugate_combiner(ch);
    const auto U = static_cast<Eigen::Index>(ch.num_ues);
    Eigen::MatrixXd g(U, U);
    for (std::size_t u = 0; u < ch.num_ues; ++u)
        for (std::size_t v = 0; v < ch.num_ues; ++v) {
            std::complex<double> s = 0.0;
            for (std::size_t m = 0; m < ch.num_aps; ++m)
                if (b(m, u)) s += comb[m * ch.num_ues + u].dot(ch.at(m, v));
            g(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = std::norm(s);
        }
    return g;
}

Eigen::VectorXd uplink_sinr(const Eigen::MatrixXd& g, const AssociationMatrix& b,
                            const Eigen::VectorXd& p, double sigma2) {
    const Eigen::Index U = g.rows();
    if (p.size() != U) throw std::invalid_argument("uplink_sinr: power vector size mismatch");
    Eigen::VectorXd xi(U);
    for (Eigen::Index u = 0; u < U; ++u) {
        double interference = 0.0;
        for (Eigen::Index v = 0; v < U; ++v)
            if (v != u) interference += p[v] * g(u, v);
        const double noise = static_cast<double>(b.cluster_size(static_cast<std::size_t>(u))) * sigma2;
        xi[u] = p[u] * g(u, u) / (interference + noise);
    }
    return xi;
}

Eigen::VectorXd uplink_sinr(const ChannelRealization& ch, const AssociationMatrix& b,
                            const Eigen::VectorXd& p, double sigma2) {
    return uplink_sinr(uplink_gain_matrix(ch, b), b, p, sigma2);
}

Eigen::MatrixXcd downlink_amplitudes(const ChannelRealization& ch, const AssociationMatrix& b,
                                     const BeamformerSet& bf) {
    check_dims(ch, b);
    if (bf.v.size() != ch.num_ues || bf.num_aps != ch.num_aps || bf.n_ant != ch.n_ant)
        throw std::invalid_argument("beamformer dimensions do not match the channel");
    const auto U = static_cast<Eigen::Index>(ch.num_ues);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(U, U);
    for (std::size_t u = 0; u < ch.num_ues; ++u)
        for (std::size_t v = 0; v < ch.num_ues; ++v)
            for (std::size_t m = 0; m < ch.num_aps; ++m)
                if (b(m, v))
                    s(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) +=
                        ch.at(m, u).cwiseProduct(bf.block(m, v)).sum();
    return s;
}

Eigen::VectorXd downlink_sinr(const Eigen::MatrixXcd& s, double sigma2) {
    const Eigen::Index U = s.rows();
    Eigen::VectorXd xi(U);
    for (Eigen::Index u = 0; u < U; ++u) {
        const double total = s.row(u).squaredNorm();
        const double useful = std::norm(s(u, u));
        xi[u] = useful / (total - useful + sigma2);
    }
    return xi;
}

Eigen::VectorXd downlink_sinr(const ChannelRealization& ch, const AssociationMatrix& b,
                              const BeamformerSet& v, double sigma2) {
    return downlink_sinr(downlink_amplitudes(ch, b, v), sigma2);
}

Eigen::VectorXd rates(const Eigen::VectorXd& sinr, double w) {
    Eigen::VectorXd r(sinr.size());
    for (Eigen::Index i = 0; i < sinr.size(); ++i) {
        if (!(sinr[i] >= 0.0)) throw std::invalid_argument("rates: negative or NaN SINR");
        r[i] = w * std::log1p(sinr[i]) / std::numbers::ln2;
    }
    return r;
}

RatioOfMeans::RatioOfMeans(std::size_t num_ues)
    : ul_signal_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_ues))),
      ul_denominator_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_ues))),
      dl_signal_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_ues))),
      dl_denominator_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_ues))) {}

void RatioOfMeans::add_uplink(const Eigen::MatrixXd& g, const AssociationMatrix& b,
                              const Eigen::VectorXd& p, double sigma2) {
    for (Eigen::Index u = 0; u < g.rows(); ++u) {
        const double useful = p[u] * g(u, u);
        const double total = g.row(u).dot(p);
        ul_signal_[u] += useful;
        ul_denominator_[u] += total - useful +
                              static_cast<double>(b.cluster_size(static_cast<std::size_t>(u))) * sigma2;
    }
    ++n_ul_;
}

void RatioOfMeans::add_downlink(const Eigen::MatrixXcd& s, double sigma2) {
    for (Eigen::Index u = 0; u < s.rows(); ++u) {
        const double useful = std::norm(s(u, u));
        dl_signal_[u] += useful;
        dl_denominator_[u] += s.row(u).squaredNorm() - useful + sigma2;
    }
    ++n_dl_;
}

LinkRates RatioOfMeans::rates(double w) const {
    LinkRates r;
    r.bandwidth = w;
    r.uplink_sinr = ul_signal_.cwiseQuotient(ul_denominator_);
    r.downlink_sinr = dl_signal_.cwiseQuotient(dl_denominator_);
    r.uplink_rate = ucsfl::rates(r.uplink_sinr, w);
    r.downlink_rate = ucsfl::rates(r.downlink_sinr, w);
    return r;
}

LinkRates expected_rates(const LargeScaleMap& large_scale, const FadingParams& params,
                         const AssociationMatrix& b, const Eigen::VectorXd& p,
                         const BeamformerSet& v, double w, std::size_t n_draws,
                         std::uint64_t seed) {
    if (n_draws < 1) throw std::invalid_argument("expected_rates: n_draws must be >= 1");
    RatioOfMeans acc(large_scale.num_ues);
    for (std::size_t d = 0; d < n_draws; ++d) {
        const ChannelRealization ch = draw_fading(large_scale, params, derive_seed(seed, "draw", d));
        acc.add_uplink(uplink_gain_matrix(ch, b), b, p, params.noise_power);
        acc.add_downlink(downlink_amplitudes(ch, b, v), params.noise_power);
    }
    return acc.rates(w);
}

}  // namespace ucsfl
