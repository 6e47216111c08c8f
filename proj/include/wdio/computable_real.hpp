// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wdio/rational.hpp"

namespace wdio {

/// Rational interval [lo, hi], lo <= hi.
struct RatInterval {
    Rat lo, hi;
    Rat width() const { return hi - lo; }
};

namespace detail {

struct RealNode {
    virtual ~RealNode() = default;
    /// Interval of width <= 2^-k containing the value. Need not be nested across
    /// calls; nesting is enforced by the cache in CReal.
    virtual RatInterval approx(int k) const = 0;
    virtual bool irrational() const = 0;
    /// Canonical constructor expression, re-parseable by the input grammar.
    virtual std::string spec() const = 0;

    mutable std::mutex mu;
    mutable int cached_k = -1;
    mutable RatInterval cached{Rat(0), Rat(0)};
};

} // namespace detail

/// A computable real: produces nested rational intervals of width <= 2^-k
/// on demand. Immutable value; refinement is internally synchronized.
class CReal {
  public:
    CReal() = default;
    explicit CReal(std::shared_ptr<detail::RealNode> n) : node_(std::move(n)) {}

    bool valid() const { return static_cast<bool>(node_); }

    RatInterval interval(int k) const {
        std::lock_guard<std::mutex> lock(node_->mu);
        if (node_->cached_k >= k) return node_->cached;
        RatInterval iv = node_->approx(k);
        if (node_->cached_k >= 0) {
            // intersect with the cached interval so that successive intervals nest
            if (iv.lo < node_->cached.lo) iv.lo = node_->cached.lo;
            if (iv.hi > node_->cached.hi) iv.hi = node_->cached.hi;
            if (iv.lo > iv.hi) throw internal_error("computable real produced disjoint refinements");
        }
        node_->cached = iv;
        node_->cached_k = k;
        return iv;
    }

    bool irrational() const { return node_->irrational(); }
    std::string spec() const { return node_->spec(); }
    const detail::RealNode* node() const { return node_.get(); }

    double to_double() const {
        RatInterval iv = interval(64);
        return to_double_rat(iv.lo);
    }

  private:
    static double to_double_rat(const Rat& v) { return v.convert_to<double>(); }
    std::shared_ptr<detail::RealNode> node_;
};

namespace detail {

struct SqrtNode final : RealNode {
    Rat radicand; // >= 0, not a perfect square of a rational (else use the rational directly)
    explicit SqrtNode(Rat r) : radicand(std::move(r)) {}
    RatInterval approx(int k) const override {
        // sqrt(a/b): u = floor(sqrt(a * 2^(2K) / b)) gives u*2^-K <= sqrt <= (u+2)*2^-K
        const int K = k + 2;
        Int scaled = (numerator(radicand) << (2 * K)) / denominator(radicand);
        Int u = boost::multiprecision::sqrt(scaled);
        Rat lo(u, Int(1) << K), hi(u + 2, Int(1) << K);
        return {lo, hi};
    }
    bool irrational() const override { return true; }
    std::string spec() const override { return "sqrt(" + rat_string(radicand) + ")"; }
};

struct LiouvilleNode final : RealNode {
    unsigned base;
    explicit LiouvilleNode(unsigned b) : base(b) {}
    RatInterval approx(int k) const override {
        // sum_{j>=1} base^-j!; tail after J terms < 2 * base^-(J+1)!
        const double lb = std::log2(static_cast<double>(base));
        unsigned long fact = 1;
        unsigned J = 1;
        Rat s(0);
        for (;; ++J) {
            fact *= J;
            s += Rat(1, int_pow(base, fact));
            unsigned long next_fact = fact * (J + 1);
            if (static_cast<double>(next_fact) * lb >= k + 2) {
                Rat tail(2, int_pow(base, next_fact));
                return {s, s + tail};
            }
            if (J > 40) throw internal_error("liouville term budget exceeded");
        }
    }
    bool irrational() const override { return true; }
    std::string spec() const override { return "liouville(" + std::to_string(base) + ")"; }
};

/// Continued fraction [0; a_1, a_2, ...]. The rule yields a_n (>= 1) and may
/// inspect the two preceding convergent denominators (for denominator-driven rules).
struct CFNode final : RealNode {
    using Rule = std::function<Int(int n, const Int& q_prev, const Int& q_prev2)>;
    Rule rule;
    std::string name;
    CFNode(Rule r, std::string n) : rule(std::move(r)), name(std::move(n)) {}
    RatInterval approx(int k) const override {
        // consecutive convergents bracket the value; |x - h/q| < 1/(q q')
        Int h0 = 1, q0 = 0, h1 = 0, q1 = 1; // h1/q1 = 0/1 after a0 = 0
        Int target = Int(1) << (k + 1);
        for (int n = 1; n <= 20000; ++n) {
            Int a = rule(n, q1, q0);
            if (a < 1) throw input_error("continued fraction partial quotient < 1");
            Int h2 = a * h1 + h0, q2 = a * q1 + q0;
            h0 = h1; q0 = q1; h1 = h2; q1 = q2;
            if (n >= 2 && q0 * q1 >= target) {
                Rat c0(h0, q0), c1(h1, q1);
                return c0 < c1 ? RatInterval{c0, c1} : RatInterval{c1, c0};
            }
        }
        throw internal_error("continued fraction did not converge");
    }
    bool irrational() const override { return true; }
    std::string spec() const override { return name; }
};

struct AffineNode final : RealNode {
    Rat mul, add;
    CReal inner;
    AffineNode(Rat m, CReal x, Rat a) : mul(std::move(m)), add(std::move(a)), inner(std::move(x)) {}
    RatInterval approx(int k) const override {
        int extra = 1;
        Rat am = abs(mul);
        while (rat_pow(Rat(2), extra) < am) ++extra;
        RatInterval iv = inner.interval(k + extra + 1);
        Rat a = mul * iv.lo + add, b = mul * iv.hi + add;
        return a <= b ? RatInterval{a, b} : RatInterval{b, a};
    }
    bool irrational() const override { return mul != 0 && inner.irrational(); }
    std::string spec() const override {
        std::string s = "affine(" + rat_string(mul) + "," + inner.spec() + "," + rat_string(add) + ")";
        return s;
    }
};

struct SumNode final : RealNode {
    CReal a, b;
    SumNode(CReal x, CReal y) : a(std::move(x)), b(std::move(y)) {}
    RatInterval approx(int k) const override {
        RatInterval ia = a.interval(k + 2), ib = b.interval(k + 2);
        return {ia.lo + ib.lo, ia.hi + ib.hi};
    }
    bool irrational() const override { return false; } // sum of irrationals can be rational
    std::string spec() const override { return "sum(" + a.spec() + "," + b.spec() + ")"; }
};

struct MulNode final : RealNode {
    CReal a, b;
    MulNode(CReal x, CReal y) : a(std::move(x)), b(std::move(y)) {}
    RatInterval approx(int k) const override {
        RatInterval ca = a.interval(4), cb = b.interval(4);
        auto mag_bits = [](const RatInterval& iv) {
            Rat m = abs(iv.lo) > abs(iv.hi) ? abs(iv.lo) : abs(iv.hi);
            int bits = 1;
            while (rat_pow(Rat(2), bits) < m + 1) ++bits;
            return bits;
        };
        int ka = k + 2 + mag_bits(cb), kb = k + 2 + mag_bits(ca);
        RatInterval ia = a.interval(ka), ib = b.interval(kb);
        Rat p1 = ia.lo * ib.lo, p2 = ia.lo * ib.hi, p3 = ia.hi * ib.lo, p4 = ia.hi * ib.hi;
        Rat lo = std::min(std::min(p1, p2), std::min(p3, p4));
        Rat hi = std::max(std::max(p1, p2), std::max(p3, p4));
        return {lo, hi};
    }
    bool irrational() const override { return false; }
    std::string spec() const override { return "mul(" + a.spec() + "," + b.spec() + ")"; }
};

struct ConstNode final : RealNode {
    Rat v;
    explicit ConstNode(Rat x) : v(std::move(x)) {}
    RatInterval approx(int) const override { return {v, v}; }
    bool irrational() const override { return false; }
    std::string spec() const override { return rat_string(v); }
};

} // namespace detail

inline CReal make_sqrt(const Rat& radicand) {
    if (radicand < 0) throw input_error("sqrt of negative rational");
    Int rn = boost::multiprecision::sqrt(numerator(radicand));
    Int rd = boost::multiprecision::sqrt(denominator(radicand));
    if (rn * rn == numerator(radicand) && rd * rd == denominator(radicand))
        return CReal(std::make_shared<detail::ConstNode>(Rat(rn, rd)));
    return CReal(std::make_shared<detail::SqrtNode>(radicand));
}

inline CReal make_const(const Rat& v) { return CReal(std::make_shared<detail::ConstNode>(v)); }

inline CReal make_affine(const Rat& mul, const CReal& x, const Rat& add) {
    return CReal(std::make_shared<detail::AffineNode>(mul, x, add));
}

/// (sqrt(5) - 1) / 2
inline CReal make_golden() { return make_affine(Rat(1, 2), make_sqrt(Rat(5)), Rat(-1, 2)); }

inline CReal make_liouville(unsigned base) {
    if (base < 2) throw input_error("liouville base must be >= 2");
    return CReal(std::make_shared<detail::LiouvilleNode>(base));
}

inline CReal make_cf(detail::CFNode::Rule rule, const std::string& name) {
    return CReal(std::make_shared<detail::CFNode>(std::move(rule), name));
}

/// Periodic continued fraction [0; a_1, ..., a_p, a_1, ...].
inline CReal make_cf_periodic(const std::vector<Int>& period) {
    if (period.empty()) throw input_error("empty continued fraction rule");
    std::string name = "cf(";
    for (size_t i = 0; i < period.size(); ++i) name += (i ? "," : "") + period[i].str();
    name += ")";
    auto rule = [period](int n, const Int&, const Int&) { return period[(n - 1) % period.size()]; };
    return make_cf(rule, name);
}

inline CReal make_sum(const CReal& a, const CReal& b) {
    return CReal(std::make_shared<detail::SumNode>(a, b));
}

inline CReal make_mul(const CReal& a, const CReal& b) {
    return CReal(std::make_shared<detail::MulNode>(a, b));
}

/// A quadratic irrational u + v sqrt(D) with rational u, v (v != 0) and D >= 2
/// square-free-reduced. Values of this shape admit exact sign decisions.
struct QuadValue {
    Rat u, v;
    Int D;
};

namespace detail {

/// Pulls square factors p^2 (p <= 4096) out of D.
inline void extract_square_factor(Int& D, Int& s) {
    s = 1;
    for (Int p = 2; p <= 4096 && p * p <= D; ++p)
        while (D % (p * p) == 0) {
            D /= p * p;
            s *= p;
        }
}

inline std::optional<QuadValue> as_quadratic_node(const RealNode* n) {
    if (const auto* sq = dynamic_cast<const SqrtNode*>(n)) {
        // sqrt(a/b) = sqrt(a b) / b
        Int D0 = numerator(sq->radicand) * denominator(sq->radicand);
        Int s;
        extract_square_factor(D0, s);
        if (D0 < 2) return std::nullopt; // perfect square; not constructed in practice
        return QuadValue{Rat(0), Rat(s, denominator(sq->radicand)), D0};
    }
    if (const auto* af = dynamic_cast<const AffineNode*>(n)) {
        std::optional<QuadValue> inner = as_quadratic_node(af->inner.node());
        if (!inner) return std::nullopt;
        QuadValue q{af->mul * inner->u + af->add, af->mul * inner->v, inner->D};
        if (q.v == 0) return std::nullopt;
        return q;
    }
    return std::nullopt;
}

} // namespace detail

/// Recognizes coordinates of the shape (rational) + (rational) * sqrt(rational).
inline std::optional<QuadValue> as_quadratic(const CReal& x) {
    return detail::as_quadratic_node(x.node());
}

} // namespace wdio
