// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "ucsfl/split_profile.hpp"

using namespace ucsfl;

namespace {

ModelDescriptor unit_model(std::size_t layers) {
    ModelDescriptor m;
    for (std::size_t i = 0; i < layers; ++i) m.layers.push_back({{FilterShape{}}});
    return m;
}

// Counts one per innermost iteration of the nest over layer, filter, kernel
// rows and columns, input channels, output pixels, kernel count and batch.
std::uint64_t counted_macs(const ModelDescriptor& model, std::size_t split) {
    std::uint64_t count = 0;
    std::uint64_t n_prev = model.input_channels;
    for (std::size_t i = 0; i < split; ++i) {
        const auto& layer = model.layers[i];
        for (const auto& f : layer.filters)
            for (std::uint64_t r = 0; r < f.kernel_h; ++r)
                for (std::uint64_t q = 0; q < f.kernel_w; ++q)
                    for (std::uint64_t c = 0; c < n_prev; ++c)
                        for (std::uint64_t y = 0; y < f.out_h; ++y)
                            for (std::uint64_t x = 0; x < f.out_w; ++x)
                                for (std::size_t n = 0; n < layer.filters.size(); ++n)
                                    for (std::uint64_t k = 0; k < model.batch; ++k) ++count;
        n_prev = layer.filters.size();
    }
    return count;
}

}  // namespace

TEST_CASE("MAC load of all-ones layers") {
    const ModelDescriptor one = unit_model(1);
    CHECK(mac_load(one, 1) == 1.0);
    CHECK(mac_load(unit_model(2), 2) == 2.0);
    CHECK_THROWS_AS(mac_load(one, 0), std::out_of_range);
    CHECK_THROWS_AS(mac_load(one, 2), std::out_of_range);
}

TEST_CASE("MAC load matches a loop-nest counter on a small conv net") {
    ModelDescriptor net;
    net.input_channels = 3;
    net.batch = 2;
    LayerDescriptor conv1;
    for (int j = 0; j < 4; ++j) conv1.filters.push_back({3, 3, 6, 5});
    LayerDescriptor conv2;
    conv2.filters.push_back({3, 3, 4, 3});
    conv2.filters.push_back({1, 1, 4, 3});
    conv2.filters.push_back({5, 3, 2, 2});
    net.layers = {conv1, conv2};
    for (std::size_t l = 1; l <= 2; ++l) CHECK(mac_load(net, l) == static_cast<double>(counted_macs(net, l)));
}

TEST_CASE("activation size") {
    CHECK(activation_elements(unit_model(1), 1) == 1.0);
    ModelDescriptor m;
    m.batch = 4;
    m.layers.push_back({{{1, 1, 2, 2}, {1, 1, 2, 2}, {1, 1, 2, 2}}});
    CHECK(activation_elements(m, 1) == 48.0);
    CHECK(activation_bits(m, 1, 32.0) == 48.0 * 32.0);
    CHECK(vgg16_profile().activation_bits(1) == doctest::Approx(0.8e6));
}

TEST_CASE("VGG16 preset") {
    const SplitProfile p = vgg16_profile();
    CHECK(p.num_points() == 6);
    CHECK(p.mac_load(6) == doctest::Approx(30.94e9));
    CHECK(p.total_load() == p.mac_load(6));
    CHECK(p.activation_bits(5) == doctest::Approx(0.025e6));
    CHECK(p.submodel_bits(6) == doctest::Approx(138.361e6));
    for (std::size_t l = 2; l <= 6; ++l) {
        CHECK(p.activation_bits(l) < p.activation_bits(l - 1));
        CHECK(p.submodel_bits(l) > p.submodel_bits(l - 1));
        CHECK(p.mac_load(l) > p.mac_load(l - 1));
        CHECK(p.total_load() - p.mac_load(l) >= 0.0);
    }
    CHECK(p.max_activation_bits() == doctest::Approx(0.8e6));
    CHECK(p.max_submodel_bits() == doctest::Approx(138.361e6));
    CHECK_THROWS_AS(p.at(0), std::out_of_range);
    CHECK_THROWS_AS(p.at(7), std::out_of_range);
}

TEST_CASE("profile from a model descriptor") {
    ModelDescriptor net;
    net.input_channels = 1;
    net.layers.push_back({{{3, 3, 4, 4}, {3, 3, 4, 4}}});
    net.layers.push_back({{{3, 3, 2, 2}}});
    const SplitProfile p = profile_from_model(net, 8.0, 16.0);
    CHECK(p.num_points() == 2);
    CHECK(p.activation_bits(1) == 32.0 * 8.0);
    CHECK(p.mac_load(2) == mac_load(net, 2));
    CHECK(p.submodel_bits(2) == parameter_count(net, 2) * 16.0);
    CHECK(parameter_count(net, 1) == 18.0);
    CHECK(parameter_count(net, 2) == 18.0 + 18.0);
}

TEST_CASE("profile parsing") {
    const SplitProfile p = parse_profile("# D, D_sub, ops\n100, 10, 5\n\n50 20 9  # tail\n");
    CHECK(p.num_points() == 2);
    CHECK(p.activation_bits(2) == 50.0);
    CHECK(p.submodel_bits(1) == 10.0);
    CHECK(p.mac_load(2) == 9.0);
    CHECK_THROWS(parse_profile("1, 2\n"));
    CHECK_THROWS(parse_profile("1, 2, 3, 4\n"));
    CHECK_THROWS(parse_profile("# nothing\n"));
    CHECK_THROWS(parse_profile("1, 2, 5\n1, 3, 4\n"));  // load must grow
    CHECK_THROWS(parse_profile("1, 2, 3\n1, 2, 4\n"));  // sub-model must grow

    const std::string path = "split_profile_test.txt";
    {
        std::ofstream f(path);
        f << "8e5, 3.9e4, 3.87e9\n4e5, 2.61e5, 9.42e9\n";
    }
    const SplitProfile q = load_profile(path);
    std::remove(path.c_str());
    CHECK(q.num_points() == 2);
    CHECK(q.mac_load(1) == 3.87e9);
    CHECK_THROWS(load_profile("no/such/profile.txt"));
}
