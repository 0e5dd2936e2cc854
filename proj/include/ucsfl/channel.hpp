// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ucsfl {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class ApPlacement { uniform, grid };

struct NetworkLayout {
    double radius = 200.0;
    std::vector<Point> ap_positions;
    std::vector<Point> ue_positions;
    bool wrap_around = true;

    std::size_t num_aps() const { return ap_positions.size(); }
    std::size_t num_ues() const { return ue_positions.size(); }
    void validate() const;
};

/// Converts dBm to watts.
double dbm_to_watt(double dbm);

/// Default receiver noise power (-121 dBm).
double default_noise_power();

struct FadingParams {
    double carrier_shift_f = 0.0;  // Hz
    std::size_t num_paths = 1;
    double max_delay = 1e-6;  // s, path delays drawn uniformly in [0, max_delay)
    double shadow_std_db = 4.0;
    double noise_power = default_noise_power();
    std::size_t n_ant = 4;

    void validate() const;
};

/// Pathloss and shadowing for every (m, u) pair; fixed over the fast-fading draws.
struct LargeScaleMap {
    std::size_t num_aps = 0;
    std::size_t num_ues = 0;
    std::vector<double> distance;  // m, indexed m * U + u
    std::vector<double> shadow_db;
    std::vector<double> gain;  // linear

    double at(std::size_t m, std::size_t u) const { return gain[m * num_ues + u]; }
};

struct ChannelRealization {
    std::size_t num_aps = 0;
    std::size_t num_ues = 0;
    std::size_t n_ant = 0;
    std::vector<Eigen::VectorXcd> h;  // indexed m * U + u
    LargeScaleMap large_scale;

    const Eigen::VectorXcd& at(std::size_t m, std::size_t u) const { return h[m * num_ues + u]; }
    Eigen::VectorXcd& at(std::size_t m, std::size_t u) { return h[m * num_ues + u]; }
    void validate() const;
};

NetworkLayout place_network(std::uint64_t seed, std::size_t m, std::size_t u, double radius,
                            ApPlacement placement = ApPlacement::uniform, bool wrap_around = true);

/// Shortest distance on the torus built over the bounding square of side 2r.
double wrapped_distance(Point a, Point b, double radius);
double euclidean_distance(Point a, Point b);
double link_distance(const NetworkLayout& layout, std::size_t m, std::size_t u);

/// -112.4 - 38 log10(d), with d clamped below at 1 m.
double path_loss_db(double distance);
double large_scale_gain(double distance, double shadow_db);

LargeScaleMap draw_large_scale(const NetworkLayout& layout, const FadingParams& params,
                               std::uint64_t seed);

/// Small-scale fading on top of a fixed large-scale map.
ChannelRealization draw_fading(const LargeScaleMap& large_scale, const FadingParams& params,
                               std::uint64_t seed);

/// Shadowing and fading both drawn from `seed`.
ChannelRealization draw_channel(const NetworkLayout& layout, const FadingParams& params,
                                std::uint64_t seed);

void write_layout_csv(std::ostream& os, const NetworkLayout& layout);
void write_channel_csv(std::ostream& os, const ChannelRealization& channel);

}  // namespace ucsfl
