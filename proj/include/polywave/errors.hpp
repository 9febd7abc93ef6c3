// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace polywave {

// Shape or length mismatch between operands.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or non-composing network specification.
struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient surfaced during a numeric run.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-format or filesystem failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace polywave
