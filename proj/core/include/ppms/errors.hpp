// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ppms {

// Tensor/weight dimension mismatches and impossible output shapes.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Out-of-range channel or class ids.
struct IndexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid variant/attention/fusion configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed weight or tensor container files (bad magic, bad dims).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated files, unreadable or unwritable paths.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs that violate the engine's entry contract (e.g. size not /32).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ppms
