// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/split_profile.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ucsfl {

void ModelDescriptor::validate() const {
    if (input_channels == 0 || batch == 0) throw std::invalid_argument("model: n_0 and k must be positive");
    if (layers.empty()) throw std::invalid_argument("model has no layers");
    for (const auto& layer : layers) {
        if (layer.filters.empty()) throw std::invalid_argument("model layer without filters");
        for (const auto& f : layer.filters)
            if (!f.kernel_h || !f.kernel_w || !f.out_h || !f.out_w)
                throw std::invalid_argument("model filter dimensions must be positive");
    }
}

namespace {

void check_split(const ModelDescriptor& model, std::size_t split) {
    model.validate();
    if (split < 1 || split > model.layers.size())
        throw std::out_of_range("split index " + std::to_string(split) + " out of range");
}

}  // namespace

double mac_load(const ModelDescriptor& model, std::size_t split) {
    check_split(model, split);
    double total = 0.0;
    double n_prev = static_cast<double>(model.input_channels);
    for (std::size_t i = 0; i < split; ++i) {
        const auto& layer = model.layers[i];
        const double n_i = static_cast<double>(layer.filters.size());
        for (const auto& f : layer.filters)
            total += static_cast<double>(f.kernel_h * f.kernel_w) * n_prev *
                     static_cast<double>(f.out_h * f.out_w) * n_i * static_cast<double>(model.batch);
        n_prev = n_i;
    }
    return total;
}

double activation_elements(const ModelDescriptor& model, std::size_t split) {
    check_split(model, split);
    double total = 0.0;
    for (const auto& f : model.layers[split - 1].filters)
        total += static_cast<double>(f.out_h * f.out_w);
    return total * static_cast<double>(model.batch);
}

double activation_bits(const ModelDescriptor& model, std::size_t split, double bits_per_element) {
    return activation_elements(model, split) * bits_per_element;
}

double parameter_count(const ModelDescriptor& model, std::size_t split) {
    check_split(model, split);
    double total = 0.0;
    double n_prev = static_cast<double>(model.input_channels);
    for (std::size_t i = 0; i < split; ++i) {
        for (const auto& f : model.layers[i].filters)
            total += static_cast<double>(f.kernel_h * f.kernel_w) * n_prev;
        n_prev = static_cast<double>(model.layers[i].filters.size());
    }
    return total;
}

SplitProfile::SplitProfile(std::vector<SplitPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("split profile needs at least one point");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!(p.activation_bits > 0.0) || !(p.submodel_bits > 0.0) || !(p.mac_load > 0.0))
            throw std::invalid_argument("split profile entries must be positive");
        if (i > 0 && !(p.mac_load > points_[i - 1].mac_load))
            throw std::invalid_argument("split profile MAC load must be strictly increasing");
        if (i > 0 && !(p.submodel_bits > points_[i - 1].submodel_bits))
            throw std::invalid_argument("split profile sub-model size must be strictly increasing");
    }
}

const SplitPoint& SplitProfile::at(std::size_t l) const {
    if (l < 1 || l > points_.size())
        throw std::out_of_range("split index " + std::to_string(l) + " out of range");
    return points_[l - 1];
}

double SplitProfile::max_activation_bits() const {
    double m = 0.0;
    for (const auto& p : points_) m = std::max(m, p.activation_bits);
    return m;
}

double SplitProfile::max_submodel_bits() const {
    double m = 0.0;
    for (const auto& p : points_) m = std::max(m, p.submodel_bits);
    return m;
}

SplitProfile vgg16_profile() {
    constexpr double mb = 1e6;
    constexpr double gops = 1e9;
    return SplitProfile({
        {0.8 * mb, 0.039 * mb, 3.87 * gops},
        {0.4 * mb, 0.261 * mb, 9.42 * gops},
        {0.2 * mb, 1.741 * mb, 18.67 * gops},
        {0.1 * mb, 7.641 * mb, 27.92 * gops},
        {0.025 * mb, 14.721 * mb, 30.69 * gops},
        {0.001 * mb, 138.361 * mb, 30.94 * gops},
    });
}

SplitProfile profile_from_model(const ModelDescriptor& model, double bits_per_element,
                                double bits_per_parameter) {
    std::vector<SplitPoint> pts;
    for (std::size_t l = 1; l <= model.layers.size(); ++l)
        pts.push_back({activation_bits(model, l, bits_per_element),
                       parameter_count(model, l) * bits_per_parameter, mac_load(model, l)});
    return SplitProfile(std::move(pts));
}

SplitProfile parse_profile(const std::string& text) {
    std::vector<SplitPoint> pts;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        SplitPoint p;
        if (!(fields >> p.activation_bits)) continue;
        std::string extra;
        if (!(fields >> p.submodel_bits >> p.mac_load) || (fields >> extra))
            throw std::invalid_argument("profile line " + std::to_string(lineno) +
                                        ": expected three numbers");
        pts.push_back(p);
    }
    return SplitProfile(std::move(pts));
}

SplitProfile load_profile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open profile file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_profile(ss.str());
}

}  // namespace ucsfl
