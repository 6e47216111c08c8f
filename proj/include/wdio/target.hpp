// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <variant>
#include <vector>

#include "wdio/computable_real.hpp"
#include "wdio/rational.hpp"

namespace wdio {

constexpr unsigned kDefaultPrecisionBits = 256;

/// One coordinate of a target vector: an exact rational, or a computable real
/// refinable to any requested precision.
class Coordinate {
  public:
    Coordinate(Rat v) : value_(std::move(v)) {}            // NOLINT(google-explicit-constructor)
    Coordinate(CReal v) : value_(std::move(v)) {}          // NOLINT(google-explicit-constructor)

    bool is_rational() const { return std::holds_alternative<Rat>(value_); }
    const Rat& rational() const { return std::get<Rat>(value_); }
    const CReal& real() const { return std::get<CReal>(value_); }

    /// Interval of width <= 2^-k (width 0 for rationals).
    RatInterval interval(int k) const {
        if (is_rational()) return {rational(), rational()};
        return real().interval(k);
    }

    /// True when the coordinate is constructed from a form known to be irrational.
    bool known_irrational() const { return !is_rational() && real().irrational(); }

    double to_double() const {
        return is_rational() ? to_double_rat(rational()) : real().to_double();
    }

    std::string spec() const { return is_rational() ? rat_string(rational()) : real().spec(); }

  private:
    static double to_double_rat(const Rat& v) { return v.convert_to<double>(); }
    std::variant<Rat, CReal> value_;
};

/// A point x in R^d with exact or computable-real coordinates at a declared
/// working precision P (bits). Comparisons either resolve with margin ~2^-P
/// or fail loudly as precision_limited.
class TargetVector {
  public:
    explicit TargetVector(std::vector<Coordinate> coords, unsigned precision_bits = kDefaultPrecisionBits)
        : coords_(std::move(coords)), precision_(precision_bits) {
        if (coords_.empty()) throw input_error("target vector must have at least one coordinate");
        if (precision_ < 32) throw input_error("precision must be at least 32 bits");
    }

    int dim() const { return static_cast<int>(coords_.size()); }
    const Coordinate& coord(int i) const { return coords_[static_cast<size_t>(i)]; }
    unsigned precision_bits() const { return precision_; }

    bool all_rational() const {
        for (const Coordinate& c : coords_)
            if (!c.is_rational()) return false;
        return true;
    }

    std::vector<double> to_doubles() const {
        std::vector<double> out;
        out.reserve(coords_.size());
        for (const Coordinate& c : coords_) out.push_back(c.to_double());
        return out;
    }

    std::string spec() const {
        std::string s;
        for (size_t i = 0; i < coords_.size(); ++i) s += (i ? "," : "") + coords_[i].spec();
        return s;
    }

  private:
    std::vector<Coordinate> coords_;
    unsigned precision_;
};

} // namespace wdio
