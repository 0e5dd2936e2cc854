// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/latency.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ucsfl {

void ComputeConfig::validate() const {
    if (!(f_ue > 0.0) || !(f_dpu > 0.0)) throw std::invalid_argument("compute frequencies must be positive");
    if (!(cycles_per_op > 0.0)) throw std::invalid_argument("cycles per operation must be positive");
    if (!(t_back >= 0.0)) throw std::invalid_argument("t_back must be >= 0");
}

void validate_splits(const SplitProfile& profile, const Splits& splits) {
    if (splits.empty()) throw std::invalid_argument("split vector is empty");
    for (std::size_t l : splits)
        if (l < 1 || l > profile.num_points())
            throw std::out_of_range("split index " + std::to_string(l) + " out of range");
}

double ue_compute_latency(const SplitProfile& profile, const Splits& splits, const ComputeConfig& cfg) {
    validate_splits(profile, splits);
    double t = 0.0;
    for (std::size_t l : splits) t = std::max(t, profile.mac_load(l) * cfg.cycles_per_op / cfg.f_ue);
    return t;
}

namespace {

Eigen::VectorXd transfer_latency(const Splits& splits, const Eigen::VectorXd& rate,
                                 double (SplitProfile::*size)(std::size_t) const,
                                 const SplitProfile& profile, const char* what) {
    validate_splits(profile, splits);
    if (static_cast<std::size_t>(rate.size()) != splits.size())
        throw std::invalid_argument(std::string(what) + ": rate vector size mismatch");
    Eigen::VectorXd t(rate.size());
    for (Eigen::Index u = 0; u < rate.size(); ++u) {
        if (!(rate[u] > 0.0))
            throw std::domain_error(std::string(what) + ": UE " + std::to_string(u) + " has zero rate");
        t[u] = (profile.*size)(splits[static_cast<std::size_t>(u)]) / rate[u];
    }
    return t;
}

}  // namespace

Eigen::VectorXd uplink_latency(const SplitProfile& profile, const Splits& splits, const LinkRates& rates) {
    return transfer_latency(splits, rates.uplink_rate, &SplitProfile::activation_bits, profile,
                            "uplink_latency");
}

Eigen::VectorXd downlink_latency(const SplitProfile& profile, const Splits& splits, const LinkRates& rates) {
    return transfer_latency(splits, rates.downlink_rate, &SplitProfile::submodel_bits, profile,
                            "downlink_latency");
}

double dpu_latency_max(const SplitProfile& profile, const Splits& splits, const ComputeConfig& cfg) {
    validate_splits(profile, splits);
    double t = 0.0;
    for (std::size_t l : splits)
        t = std::max(t, (profile.total_load() - profile.mac_load(l)) * cfg.cycles_per_op / cfg.f_dpu);
    return t;
}

double dpu_latency_ap(const SplitProfile& profile, const Splits& splits, const AssociationMatrix& b,
                      std::size_t m, const ComputeConfig& cfg) {
    validate_splits(profile, splits);
    double t = 0.0;
    for (std::size_t u : b.served_ues(m))
        t = std::max(t, (profile.total_load() - profile.mac_load(splits.at(u))) * cfg.cycles_per_op /
                            cfg.f_dpu);
    return t;
}

LatencyBreakdown total_latency(const SplitProfile& profile, const Splits& splits, const LinkRates& rates,
                               const ComputeConfig& cfg) {
    cfg.validate();
    LatencyBreakdown out;
    out.t_ue = ue_compute_latency(profile, splits, cfg);
    out.t_ul = uplink_latency(profile, splits, rates);
    out.t_ul_max = out.t_ul.maxCoeff();
    out.t_dpu_max = dpu_latency_max(profile, splits, cfg);
    out.t_back = cfg.t_back;
    out.t_dl = downlink_latency(profile, splits, rates);
    const double common = out.t_ue + out.t_ul_max + out.t_dpu_max + out.t_back;
    out.t_total = out.t_dl.array() + common;
    return out;
}

}  // namespace ucsfl
