// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ucsfl {

struct FilterShape {
    std::uint64_t kernel_h = 1;  // r
    std::uint64_t kernel_w = 1;  // q
    std::uint64_t out_h = 1;     // h
    std::uint64_t out_w = 1;     // w
};

/// One block of the model; the kernel count n_i is filters.size().
struct LayerDescriptor {
    std::vector<FilterShape> filters;
};

struct ModelDescriptor {
    std::uint64_t input_channels = 1;  // n_0
    std::uint64_t batch = 1;           // k
    std::vector<LayerDescriptor> layers;

    void validate() const;
};

/// Multiply-accumulate count of blocks 1..split (1-based).
double mac_load(const ModelDescriptor& model, std::size_t split);

/// Number of activation elements leaving block `split`.
double activation_elements(const ModelDescriptor& model, std::size_t split);
double activation_bits(const ModelDescriptor& model, std::size_t split, double bits_per_element);

/// Weight count of blocks 1..split.
double parameter_count(const ModelDescriptor& model, std::size_t split);

struct SplitPoint {
    double activation_bits = 0.0;  // D(l)
    double submodel_bits = 0.0;    // D_sub(l)
    double mac_load = 0.0;         // x(l), operations
};

/// Per-split-point statistics; split indices are 1-based.
class SplitProfile {
public:
    SplitProfile() = default;
    explicit SplitProfile(std::vector<SplitPoint> points);

    std::size_t num_points() const { return points_.size(); }
    const SplitPoint& at(std::size_t l) const;
    double activation_bits(std::size_t l) const { return at(l).activation_bits; }
    double submodel_bits(std::size_t l) const { return at(l).submodel_bits; }
    double mac_load(std::size_t l) const { return at(l).mac_load; }
    double total_load() const { return points_.back().mac_load; }
    const std::vector<SplitPoint>& points() const { return points_; }

    double max_activation_bits() const;
    double max_submodel_bits() const;

private:
    std::vector<SplitPoint> points_;
};

/// Six-block VGG16 preset (five convolutional blocks and one dense block).
SplitProfile vgg16_profile();

SplitProfile profile_from_model(const ModelDescriptor& model, double bits_per_element,
                                double bits_per_parameter);

/// Reads "D_bits, D_sub_bits, ops" triples, one split point per line; '#' starts a comment.
SplitProfile load_profile(const std::string& path);
SplitProfile parse_profile(const std::string& text);

}  // namespace ucsfl
