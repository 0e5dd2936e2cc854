// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ucsfl/csv.hpp"
#include "ucsfl/random.hpp"

namespace ucsfl {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double default_noise_power() { return dbm_to_watt(-121.0); }

void NetworkLayout::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("layout radius must be positive");
    if (ap_positions.empty() || ue_positions.empty())
        throw std::invalid_argument("layout needs at least one AP and one UE");
    const double tol = radius * 1e-12;
    for (const auto* pts : {&ap_positions, &ue_positions})
        for (const Point& p : *pts)
            if (std::hypot(p.x, p.y) > radius + tol)
                throw std::invalid_argument("layout point outside the disc");
}

void FadingParams::validate() const {
    if (num_paths < 1) throw std::invalid_argument("num_paths must be >= 1");
    if (!(shadow_std_db >= 0.0)) throw std::invalid_argument("shadow_std_db must be >= 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise_power must be positive");
    if (n_ant < 1) throw std::invalid_argument("n_ant must be >= 1");
    if (!(max_delay >= 0.0)) throw std::invalid_argument("max_delay must be >= 0");
}

void ChannelRealization::validate() const {
    if (h.size() != num_aps * num_ues) throw std::invalid_argument("channel size mismatch");
    for (const auto& v : h) {
        if (static_cast<std::size_t>(v.size()) != n_ant)
            throw std::invalid_argument("channel vector length mismatch");
        if (!v.allFinite()) throw std::invalid_argument("non-finite channel entry");
    }
    for (double g : large_scale.gain)
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::invalid_argument("large-scale gain must be positive");
}

namespace {

Point uniform_in_disc(Rng& rng, double radius) {
    const double r = radius * std::sqrt(uniform01(rng));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    return {r * std::cos(phi), r * std::sin(phi)};
}

// Square grid clipped to the disc; cell count grows until m points fit.
std::vector<Point> grid_in_disc(std::size_t m, double radius) {
    for (std::size_t k = 1;; ++k) {
        std::vector<Point> pts;
        const double step = 2.0 * radius / static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                const Point p{-radius + (i + 0.5) * step, -radius + (j + 0.5) * step};
                if (std::hypot(p.x, p.y) <= radius) pts.push_back(p);
            }
        if (pts.size() >= m) {
            pts.resize(m);
            return pts;
        }
    }
}

}  // namespace

NetworkLayout place_network(std::uint64_t seed, std::size_t m, std::size_t u, double radius,
                            ApPlacement placement, bool wrap_around) {
    if (m < 1 || u < 1) throw std::invalid_argument("place_network: need m >= 1 and u >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("place_network: radius must be positive");
    NetworkLayout layout;
    layout.radius = radius;
    layout.wrap_around = wrap_around;
    Rng ap_rng = make_rng(seed, "placement.ap");
    Rng ue_rng = make_rng(seed, "placement.ue");
    if (placement == ApPlacement::grid) {
        layout.ap_positions = grid_in_disc(m, radius);
    } else {
        for (std::size_t i = 0; i < m; ++i) layout.ap_positions.push_back(uniform_in_disc(ap_rng, radius));
    }
    for (std::size_t i = 0; i < u; ++i) layout.ue_positions.push_back(uniform_in_disc(ue_rng, radius));
    return layout;
}

double euclidean_distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double wrapped_distance(Point a, Point b, double radius) {
    const double side = 2.0 * radius;
    double dx = std::fabs(a.x - b.x);
    double dy = std::fabs(a.y - b.y);
    dx = std::min(dx, side - dx);
    dy = std::min(dy, side - dy);
    return std::hypot(dx, dy);
}

double link_distance(const NetworkLayout& layout, std::size_t m, std::size_t u) {
    const Point a = layout.ap_positions.at(m);
    const Point b = layout.ue_positions.at(u);
    return layout.wrap_around ? wrapped_distance(a, b, layout.radius) : euclidean_distance(a, b);
}

double path_loss_db(double distance) {
    if (std::isnan(distance)) throw std::invalid_argument("path_loss_db: distance is NaN");
    const double d = std::max(distance, 1.0);
    return -112.4 - 38.0 * std::log10(d);
}

double large_scale_gain(double distance, double shadow_db) {
    if (!(distance > 0.0)) throw std::invalid_argument("large_scale_gain: distance must be positive");
    return std::pow(10.0, (path_loss_db(distance) + shadow_db) / 10.0);
}

LargeScaleMap draw_large_scale(const NetworkLayout& layout, const FadingParams& params,
                               std::uint64_t seed) {
    layout.validate();
    params.validate();
    LargeScaleMap map;
    map.num_aps = layout.num_aps();
    map.num_ues = layout.num_ues();
    Rng rng = make_rng(seed, "shadowing");
    std::normal_distribution<double> shadow(0.0, 1.0);
    for (std::size_t m = 0; m < map.num_aps; ++m)
        for (std::size_t u = 0; u < map.num_ues; ++u) {
            const double d = std::max(link_distance(layout, m, u), 1.0);
            const double s = params.shadow_std_db * shadow(rng);
            map.distance.push_back(d);
            map.shadow_db.push_back(s);
            map.gain.push_back(large_scale_gain(d, s));
        }
    return map;
}

ChannelRealization draw_fading(const LargeScaleMap& large_scale, const FadingParams& params,
                               std::uint64_t seed) {
    params.validate();
    ChannelRealization ch;
    ch.num_aps = large_scale.num_aps;
    ch.num_ues = large_scale.num_ues;
    ch.n_ant = params.n_ant;
    ch.large_scale = large_scale;
    ch.h.reserve(ch.num_aps * ch.num_ues);
    Rng rng = make_rng(seed, "fading");
    const bool phased = params.carrier_shift_f != 0.0;
    for (std::size_t k = 0; k < ch.num_aps * ch.num_ues; ++k) {
        const double amp = std::sqrt(large_scale.gain[k]);
        Eigen::VectorXcd h = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(params.n_ant));
        for (std::size_t l = 0; l < params.num_paths; ++l) {
            std::complex<double> phase = 1.0;
            if (phased) {
                const double tau = params.max_delay * uniform01(rng);
                phase = std::polar(1.0, -2.0 * std::numbers::pi * params.carrier_shift_f * tau);
            }
            for (Eigen::Index a = 0; a < h.size(); ++a) h[a] += amp * phase * complex_normal(rng);
        }
        ch.h.push_back(std::move(h));
    }
    return ch;
}

ChannelRealization draw_channel(const NetworkLayout& layout, const FadingParams& params,
                                std::uint64_t seed) {
    return draw_fading(draw_large_scale(layout, params, seed), params, seed);
}

void write_layout_csv(std::ostream& os, const NetworkLayout& layout) {
    os << "kind,index,x_m,y_m\n";
    for (std::size_t i = 0; i < layout.num_aps(); ++i)
        os << "ap," << i << ',' << fmt_num(layout.ap_positions[i].x) << ','
           << fmt_num(layout.ap_positions[i].y) << '\n';
    for (std::size_t i = 0; i < layout.num_ues(); ++i)
        os << "ue," << i << ',' << fmt_num(layout.ue_positions[i].x) << ','
           << fmt_num(layout.ue_positions[i].y) << '\n';
}

void write_channel_csv(std::ostream& os, const ChannelRealization& ch) {
    os << "ap,ue,distance_m,large_scale_db";
    for (std::size_t a = 0; a < ch.n_ant; ++a) os << ",re_" << a << ",im_" << a;
    os << '\n';
    for (std::size_t m = 0; m < ch.num_aps; ++m)
        for (std::size_t u = 0; u < ch.num_ues; ++u) {
            const std::size_t k = m * ch.num_ues + u;
            os << m << ',' << u << ',' << fmt_num(ch.large_scale.distance[k]) << ','
               << fmt_num(10.0 * std::log10(ch.large_scale.gain[k]));
            for (std::size_t a = 0; a < ch.n_ant; ++a)
                os << ',' << fmt_num(ch.h[k][a].real()) << ',' << fmt_num(ch.h[k][a].imag());
            os << '\n';
        }
}

}  // namespace ucsfl
