// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "wdio/rational.hpp"

namespace wdio {

/// A weight: d exact rationals in [0,1] summing to exactly 1.
/// Internally normalized to a common denominator m with integer numerators n_i,
/// which is what makes every quasi-norm comparison an integer comparison.
class Weight {
  public:
    explicit Weight(std::vector<Rat> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw input_error("weight must have at least one entry");
        Rat sum(0);
        Int den(1);
        for (const Rat& w : entries_) {
            if (w < 0 || w > 1) throw input_error("weight entry outside [0,1]: " + rat_string(w));
            sum += w;
            den = boost::multiprecision::lcm(den, denominator(w));
        }
        if (sum != 1) throw input_error("weight entries must sum to 1, got " + rat_string(sum));
        m_ = to_i64(den);
        n_.reserve(entries_.size());
        for (const Rat& w : entries_) n_.push_back(to_i64(numerator(w) * (den / denominator(w))));
    }

    int dim() const { return static_cast<int>(entries_.size()); }
    const std::vector<Rat>& entries() const { return entries_; }
    const Rat& entry(int i) const { return entries_[static_cast<size_t>(i)]; }

    /// Common denominator m: w_i = n_i / m exactly.
    std::int64_t common_den() const { return m_; }
    std::int64_t numerator_of(int i) const { return n_[static_cast<size_t>(i)]; }

    bool is_proper() const {
        for (const Rat& w : entries_)
            if (w <= 0 || w >= 1) return false;
        return true;
    }

    Rat min_entry() const {
        Rat m = entries_[0];
        for (const Rat& w : entries_) if (w < m) m = w;
        return m;
    }
    Rat max_entry() const {
        Rat m = entries_[0];
        for (const Rat& w : entries_) if (w > m) m = w;
        return m;
    }

    bool operator==(const Weight& o) const { return entries_ == o.entries_; }

  private:
    std::vector<Rat> entries_;
    std::int64_t m_ = 1;
    std::vector<std::int64_t> n_;
};

/// Finite nonempty set of weights of equal dimension. Infinite weight families
/// are represented by finite samples (see grid_weights); closure invariance of
/// the singular property justifies this.
class WeightSet {
  public:
    explicit WeightSet(std::vector<Weight> ws) : weights_(std::move(ws)) {
        if (weights_.empty()) throw input_error("weight set must be nonempty");
        const int d = weights_[0].dim();
        for (const Weight& w : weights_)
            if (w.dim() != d) throw input_error("weight set members must share one dimension");
    }

    int dim() const { return weights_[0].dim(); }
    size_t size() const { return weights_.size(); }
    const Weight& operator[](size_t i) const { return weights_[i]; }
    const std::vector<Weight>& weights() const { return weights_; }

    Rat w_min() const {
        Rat m = weights_[0].min_entry();
        for (const Weight& w : weights_) if (w.min_entry() < m) m = w.min_entry();
        return m;
    }
    Rat w_max() const {
        Rat m = weights_[0].max_entry();
        for (const Weight& w : weights_) if (w.max_entry() > m) m = w.max_entry();
        return m;
    }
    bool all_proper() const {
        for (const Weight& w : weights_) if (!w.is_proper()) return false;
        return true;
    }

  private:
    std::vector<Weight> weights_;
};

/// All proper weights on a mesh-(1/g) grid: entries n_i/g with n_i >= 1, sum g.
inline WeightSet grid_weights(int dim, std::int64_t g, size_t max_count = 200000) {
    if (dim < 1 || g < dim) throw input_error("grid mesh too coarse for dimension");
    std::vector<Weight> out;
    std::vector<std::int64_t> parts(static_cast<size_t>(dim));
    std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t rest) {
        if (i == dim - 1) {
            if (rest >= 1) {
                parts[static_cast<size_t>(i)] = rest;
                std::vector<Rat> e;
                e.reserve(static_cast<size_t>(dim));
                for (std::int64_t p : parts) e.emplace_back(p, g);
                out.emplace_back(Weight(std::move(e)));
                if (out.size() > max_count) throw input_error("weight grid too large");
            }
            return;
        }
        for (std::int64_t p = 1; p <= rest - (dim - 1 - i); ++p) {
            parts[static_cast<size_t>(i)] = p;
            rec(i + 1, rest - p);
        }
    };
    rec(0, g);
    return WeightSet(std::move(out));
}

} // namespace wdio
