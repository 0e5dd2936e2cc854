// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>

#include "ucsfl/random.hpp"

namespace ucsfl::test {

inline double rel_err(double a, double b) {
    const double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
}

inline Eigen::VectorXcd random_cvec(Rng& rng, Eigen::Index n, double scale = 1.0) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * complex_normal(rng);
    return v;
}

}  // namespace ucsfl::test
