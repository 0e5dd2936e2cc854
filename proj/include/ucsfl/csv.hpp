// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <string>

namespace ucsfl {

/// Locale-independent, fixed-precision number formatting for CSV output.
inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace ucsfl
