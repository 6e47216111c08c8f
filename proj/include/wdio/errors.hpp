// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wdio {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A comparison could not be decided within the configured precision budget.
/// This never means "the answer is unknowable": it means more bits are needed.
struct precision_limited : error {
    explicit precision_limited(const std::string& what) : error("precision_limited: " + what) {}
};

/// An enumeration bound (e.g. ceil(e^t) lattice strata) exceeds the configured budget.
struct scale_overflow : error {
    explicit scale_overflow(const std::string& what) : error("scale_overflow: " + what) {}
};

/// Malformed user input. Carries a character position when it comes from a parser.
struct input_error : error {
    explicit input_error(const std::string& what, long long column = -1)
        : error(column >= 0 ? "input error at column " + std::to_string(column) + ": " + what
                            : "input error: " + what),
          col(column) {}
    long long col;
};

/// An invariant the implementation guarantees has been violated: a bug signal,
/// not a user error.
struct internal_error : error {
    explicit internal_error(const std::string& what) : error("internal error (bug): " + what) {}
};

} // namespace wdio
