// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ucsfl {

struct MlpGradients {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;

    MlpGradients& operator+=(const MlpGradients& o);
    MlpGradients& operator*=(double k);
    Eigen::VectorXd flatten() const;
};

/// Fully connected network: tanh on hidden layers, affine output.
class Mlp {
public:
    Mlp() = default;
    /// widths = {input, hidden..., output}. Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
    /// biases zero; the last layer's weights are multiplied by output_scale.
    Mlp(const std::vector<std::size_t>& widths, std::uint64_t seed, double output_scale = 1.0);

    std::size_t input_size() const;
    std::size_t output_size() const;
    std::size_t num_layers() const { return weights.size(); }
    std::size_t num_params() const;

    /// Forward pass; keeps the activations for backward().
    Eigen::VectorXd forward(const Eigen::VectorXd& x);
    /// Forward pass without touching the cache.
    Eigen::VectorXd predict(const Eigen::VectorXd& x) const;
    /// Gradient of upstream . output w.r.t. every parameter, at the last forward() input.
    MlpGradients backward(const Eigen::VectorXd& upstream) const;
    MlpGradients zero_gradients() const;

    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);

    void save(std::ostream& os) const;
    static Mlp load(std::istream& is);

    std::vector<Eigen::MatrixXd> weights;  // layer k maps width k to width k + 1
    std::vector<Eigen::VectorXd> biases;

private:
    std::vector<Eigen::VectorXd> activations_;  // input followed by each hidden output
};

/// Adam with bias correction.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    /// Descends the gradient, or ascends it when maximize is set.
    void step(Mlp& net, const MlpGradients& grads, bool maximize = false);
    long steps() const { return t_; }
    double learning_rate() const { return lr_; }

private:
    double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    long t_ = 0;
    Eigen::VectorXd m_, v_;
};

}  // namespace ucsfl
