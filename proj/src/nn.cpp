// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ucsfl/nn.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <random>
#include <string>
#include <ostream>
#include <stdexcept>

#include "ucsfl/random.hpp"

namespace ucsfl {

MlpGradients& MlpGradients::operator+=(const MlpGradients& o) {
    for (std::size_t k = 0; k < dW.size(); ++k) {
        dW[k] += o.dW[k];
        db[k] += o.db[k];
    }
    return *this;
}

MlpGradients& MlpGradients::operator*=(double s) {
    for (std::size_t k = 0; k < dW.size(); ++k) {
        dW[k] *= s;
        db[k] *= s;
    }
    return *this;
}

Eigen::VectorXd MlpGradients::flatten() const {
    Eigen::Index n = 0;
    for (std::size_t k = 0; k < dW.size(); ++k) n += dW[k].size() + db[k].size();
    Eigen::VectorXd out(n);
    Eigen::Index i = 0;
    for (std::size_t k = 0; k < dW.size(); ++k) {
        out.segment(i, dW[k].size()) = dW[k].reshaped();
        i += dW[k].size();
        out.segment(i, db[k].size()) = db[k];
        i += db[k].size();
    }
    return out;
}

Mlp::Mlp(const std::vector<std::size_t>& widths, std::uint64_t seed, double output_scale) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp needs at least input and output widths");
    for (std::size_t w : widths)
        if (w == 0) throw std::invalid_argument("Mlp widths must be positive");
    Rng rng(seed);
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const auto in = static_cast<Eigen::Index>(widths[k]);
        const auto out = static_cast<Eigen::Index>(widths[k + 1]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Eigen::MatrixXd w(out, in);
        for (Eigen::Index j = 0; j < in; ++j)
            for (Eigen::Index i = 0; i < out; ++i) w(i, j) = dist(rng);
        if (k + 2 == widths.size()) w *= output_scale;
        weights.push_back(std::move(w));
        biases.push_back(Eigen::VectorXd::Zero(out));
    }
}

std::size_t Mlp::input_size() const { return static_cast<std::size_t>(weights.front().cols()); }
std::size_t Mlp::output_size() const { return static_cast<std::size_t>(weights.back().rows()); }

std::size_t Mlp::num_params() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) n += static_cast<std::size_t>(weights[k].size() + biases[k].size());
    return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) {
    if (weights.empty()) throw std::logic_error("Mlp is empty");
    if (static_cast<std::size_t>(x.size()) != input_size())
        throw std::invalid_argument("Mlp::forward: input width mismatch");
    activations_.clear();
    activations_.push_back(x);
    for (std::size_t k = 0; k + 1 < weights.size(); ++k)
        activations_.push_back((weights[k] * activations_.back() + biases[k]).array().tanh().matrix());
    return weights.back() * activations_.back() + biases.back();
}

Eigen::VectorXd Mlp::predict(const Eigen::VectorXd& x) const {
    if (weights.empty()) throw std::logic_error("Mlp is empty");
    if (static_cast<std::size_t>(x.size()) != input_size())
        throw std::invalid_argument("Mlp::predict: input width mismatch");
    Eigen::VectorXd a = x;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) a = (weights[k] * a + biases[k]).array().tanh().matrix();
    return weights.back() * a + biases.back();
}

MlpGradients Mlp::zero_gradients() const {
    MlpGradients g;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        g.dW.push_back(Eigen::MatrixXd::Zero(weights[k].rows(), weights[k].cols()));
        g.db.push_back(Eigen::VectorXd::Zero(biases[k].size()));
    }
    return g;
}

MlpGradients Mlp::backward(const Eigen::VectorXd& upstream) const {
    if (activations_.size() != weights.size()) throw std::logic_error("Mlp::backward called before forward");
    if (static_cast<std::size_t>(upstream.size()) != output_size())
        throw std::invalid_argument("Mlp::backward: upstream width mismatch");
    MlpGradients g = zero_gradients();
    Eigen::VectorXd delta = upstream;
    for (std::size_t k = weights.size(); k-- > 0;) {
        g.dW[k] = delta * activations_[k].transpose();
        g.db[k] = delta;
        if (k == 0) break;
        // activations_[k] = tanh(z_{k-1}); tanh' = 1 - tanh^2
        delta = (weights[k].transpose() * delta).cwiseProduct((1.0 - activations_[k].array().square()).matrix());
    }
    return g;
}

Eigen::VectorXd Mlp::parameters() const {
    MlpGradients view;
    view.dW = weights;
    view.db = biases;
    return view.flatten();
}

void Mlp::set_parameters(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != num_params())
        throw std::invalid_argument("Mlp::set_parameters: size mismatch");
    Eigen::Index i = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        weights[k].reshaped() = flat.segment(i, weights[k].size());
        i += weights[k].size();
        biases[k] = flat.segment(i, biases[k].size());
        i += biases[k].size();
    }
}

void Mlp::save(std::ostream& os) const {
    os << "mlp " << weights.size() + 1 << '\n' << input_size();
    for (const auto& w : weights) os << ' ' << w.rows();
    os << '\n';
    const Eigen::VectorXd p = parameters();
    char buf[40];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", p[i]);
        os << buf;
    }
}

Mlp Mlp::load(std::istream& is) {
    std::string tag;
    std::size_t count = 0;
    if (!(is >> tag >> count) || tag != "mlp" || count < 2) throw std::runtime_error("Mlp::load: bad header");
    std::vector<std::size_t> widths(count);
    for (auto& w : widths)
        if (!(is >> w)) throw std::runtime_error("Mlp::load: bad widths");
    Mlp net(widths, 0);
    Eigen::VectorXd p(static_cast<Eigen::Index>(net.num_params()));
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (!(is >> p[i])) throw std::runtime_error("Mlp::load: truncated parameters");
    net.set_parameters(p);
    return net;
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_params()))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_params()))) {
    if (!(lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
}

void Adam::step(Mlp& net, const MlpGradients& grads, bool maximize) {
    Eigen::VectorXd g = grads.flatten();
    if (g.size() != m_.size()) throw std::invalid_argument("Adam::step: gradient size mismatch");
    if (maximize) g = -g;
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * g;
    v_ = beta2_ * v_ + (1.0 - beta2_) * g.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const Eigen::VectorXd update =
        (lr_ * (m_ / c1).array() / ((v_ / c2).array().sqrt() + eps_)).matrix();
    net.set_parameters(net.parameters() - update);
}

}  // namespace ucsfl
