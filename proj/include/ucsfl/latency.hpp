// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "ucsfl/phy.hpp"
#include "ucsfl/split_profile.hpp"

namespace ucsfl {

using Splits = std::vector<std::size_t>;  // 1-based split point per UE

struct ComputeConfig {
    double f_ue = 1e9;           // Hz
    double f_dpu = 5e9;          // Hz
    double cycles_per_op = 1.0;  // c
    double t_back = 0.5;         // s

    void validate() const;
};

struct LatencyBreakdown {
    double t_ue = 0.0;
    Eigen::VectorXd t_ul;
    double t_ul_max = 0.0;
    double t_dpu_max = 0.0;
    double t_back = 0.0;
    Eigen::VectorXd t_dl;
    Eigen::VectorXd t_total;
};

void validate_splits(const SplitProfile& profile, const Splits& splits);

double ue_compute_latency(const SplitProfile& profile, const Splits& splits, const ComputeConfig& cfg);
Eigen::VectorXd uplink_latency(const SplitProfile& profile, const Splits& splits, const LinkRates& rates);
double dpu_latency_max(const SplitProfile& profile, const Splits& splits, const ComputeConfig& cfg);
/// Forward latency of AP m's DPU over the UEs it serves (0 when it serves none).
double dpu_latency_ap(const SplitProfile& profile, const Splits& splits, const AssociationMatrix& b,
                      std::size_t m, const ComputeConfig& cfg);
Eigen::VectorXd downlink_latency(const SplitProfile& profile, const Splits& splits, const LinkRates& rates);
LatencyBreakdown total_latency(const SplitProfile& profile, const Splits& splits, const LinkRates& rates,
                               const ComputeConfig& cfg);

}  // namespace ucsfl
