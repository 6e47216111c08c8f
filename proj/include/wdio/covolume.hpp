// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>
#include <vector>

#include "wdio/target.hpp"
#include "wdio/weight.hpp"

namespace wdio {

/// High-precision real used where exact rational arithmetic is impossible
/// (flow scalings e^(a t)). 384 mantissa bits covers the default P = 256 with
/// headroom.
using BigFloat = boost::multiprecision::number<
    boost::multiprecision::backends::cpp_bin_float<384, boost::multiprecision::backends::digit_base_2>>;

using IntMatrix = std::vector<std::vector<Int>>;

namespace detail {

/// Row-style Hermite normal form (in place): echelon with positive pivots and
/// entries above each pivot reduced. Returns the rank.
inline int hnf_rows(IntMatrix& m) {
    if (m.empty()) return 0;
    const size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        // gcd-eliminate column c among rows r..end
        for (;;) {
            size_t piv = rows;
            for (size_t i = r; i < rows; ++i)
                if (m[i][c] != 0 && (piv == rows || abs(m[i][c]) < abs(m[piv][c]))) piv = i;
            if (piv == rows) break;
            std::swap(m[r], m[piv]);
            bool clean = true;
            for (size_t i = r + 1; i < rows; ++i) {
                if (m[i][c] == 0) continue;
                Int k = m[i][c] / m[r][c];
                for (size_t j = 0; j < cols; ++j) m[i][j] -= k * m[r][j];
                if (m[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (m[r][c] == 0) continue;
        if (m[r][c] < 0)
            for (size_t j = 0; j < cols; ++j) m[r][j] = -m[r][j];
        for (size_t i = 0; i < r; ++i) {
            Int k = div_floor(m[i][c], m[r][c]);
            if (k != 0)
                for (size_t j = 0; j < cols; ++j) m[i][j] -= k * m[r][j];
        }
        ++r;
    }
    m.resize(r);
    return static_cast<int>(r);
}

template <typename T>
T det_small(std::vector<std::vector<T>> a) {
    const size_t n = a.size();
    T result(1);
    for (size_t c = 0; c < n; ++c) {
        size_t piv = n;
        for (size_t i = c; i < n; ++i)
            if (a[i][c] != 0) { piv = i; break; }
        if (piv == n) return T(0);
        if (piv != c) { std::swap(a[piv], a[c]); result = -result; }
        result *= a[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            T f = a[i][c] / a[c][c];
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return result;
}

inline void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    for (;;) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

} // namespace detail

/// A rank-j submodule of Z^(n+1), stored via its Hermite-normal-form basis.
class SubmoduleBasis {
  public:
    explicit SubmoduleBasis(IntMatrix rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw input_error("submodule basis must be nonempty");
        const size_t cols = rows_[0].size();
        if (cols < 2) throw input_error("ambient dimension must be at least 2");
        for (const auto& r : rows_)
            if (r.size() != cols) throw input_error("ragged basis matrix");
        const int want = static_cast<int>(rows_.size());
        IntMatrix h = rows_;
        int rank = detail::hnf_rows(h);
        if (rank != want)
            throw input_error("rank deficiency: basis has rank " + std::to_string(rank) +
                              " < " + std::to_string(want));
        rows_ = std::move(h);
    }

    int rank() const { return static_cast<int>(rows_.size()); }
    int ambient() const { return static_cast<int>(rows_[0].size()); }
    const IntMatrix& rows() const { return rows_; }

    /// Splits the basis as v = v0 ^ (q e_n - (p, 0)): rows in the
    /// last-coordinate-zero subspace plus (when present) one vector with last
    /// coordinate q = gcd of all last coordinates > 0.
    struct Decomposition {
        IntMatrix v0;            // rank-1 fewer rows, last coordinate 0
        bool has_q = false;
        Int q;                   // > 0 when has_q
        std::vector<Int> p;      // q e_n - (p, 0) is the remaining basis vector
    };

    Decomposition decompose() const {
        const size_t cols = rows_[0].size();
        IntMatrix m = rows_;
        // gcd-eliminate the last column down to a single row
        for (;;) {
            size_t piv = m.size();
            for (size_t i = 0; i < m.size(); ++i)
                if (m[i][cols - 1] != 0 && (piv == m.size() || abs(m[i][cols - 1]) < abs(m[piv][cols - 1])))
                    piv = i;
            if (piv == m.size()) break; // q = 0 branch
            bool clean = true;
            for (size_t i = 0; i < m.size(); ++i) {
                if (i == piv || m[i][cols - 1] == 0) continue;
                Int k = m[i][cols - 1] / m[piv][cols - 1];
                for (size_t j = 0; j < cols; ++j) m[i][j] -= k * m[piv][j];
                if (m[i][cols - 1] != 0) clean = false;
            }
            if (clean) {
                Decomposition dec;
                dec.has_q = true;
                if (m[piv][cols - 1] < 0)
                    for (size_t j = 0; j < cols; ++j) m[piv][j] = -m[piv][j];
                dec.q = m[piv][cols - 1];
                dec.p.resize(cols - 1);
                for (size_t j = 0; j + 1 < cols; ++j) dec.p[j] = -m[piv][j];
                for (size_t i = 0; i < m.size(); ++i)
                    if (i != piv) dec.v0.push_back(m[i]);
                return dec;
            }
        }
        Decomposition dec;
        dec.has_q = false;
        dec.v0 = std::move(m);
        return dec;
    }

  private:
    IntMatrix rows_;
};

/// One exterior-power component of the transformed wedge: the minor over a
/// column set, with the t-coefficient sum of flow exponents for those axes.
struct WedgeComponent {
    std::vector<int> cols;
    BigFloat minor;
    Rat exp_coeff; // covolume term scales by e^(exp_coeff * t)
};

namespace detail {

inline BigFloat bigfloat_of(const Rat& r) {
    return BigFloat(numerator(r).str()) / BigFloat(denominator(r).str());
}

inline BigFloat coordinate_bigfloat(const Coordinate& c, int bits) {
    RatInterval iv = c.interval(bits);
    return bigfloat_of((iv.lo + iv.hi) / 2);
}

/// Rows of the u_x-transformed basis in BigFloat: (u_x v)_i = v_i + x_{i+1} v_n
/// for i < n, (u_x v)_n = v_n.
inline std::vector<std::vector<BigFloat>> ux_rows(const IntMatrix& rows, const TargetVector& x) {
    const size_t cols = rows[0].size();
    const int n = static_cast<int>(cols) - 1;
    if (x.dim() != n) throw input_error("vector dimension must equal ambient - 1");
    std::vector<BigFloat> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<size_t>(i)] = coordinate_bigfloat(x.coord(i), static_cast<int>(x.precision_bits()) + 16);
    std::vector<std::vector<BigFloat>> out(rows.size(), std::vector<BigFloat>(cols));
    for (size_t r = 0; r < rows.size(); ++r) {
        const Int& vn = rows[r][cols - 1];
        for (size_t j = 0; j + 1 < cols; ++j)
            out[r][j] = BigFloat(rows[r][j].str()) + xs[j] * BigFloat(vn.str());
        out[r][cols - 1] = BigFloat(vn.str());
    }
    return out;
}

inline std::vector<WedgeComponent> wedge_components(const std::vector<std::vector<BigFloat>>& rows,
                                                    const Weight& w) {
    const int cols = static_cast<int>(rows[0].size());
    const int n = cols - 1;
    const int j = static_cast<int>(rows.size());
    std::vector<WedgeComponent> comps;
    detail::combinations(cols, j, [&](const std::vector<int>& idx) {
        std::vector<std::vector<BigFloat>> sub(static_cast<size_t>(j), std::vector<BigFloat>(static_cast<size_t>(j)));
        for (int r = 0; r < j; ++r)
            for (int c = 0; c < j; ++c)
                sub[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                    rows[static_cast<size_t>(r)][static_cast<size_t>(idx[static_cast<size_t>(c)])];
        BigFloat m = det_small(sub);
        Rat coeff(0);
        for (int c : idx) coeff += (c < n) ? w.entry(c) : Rat(-1);
        comps.push_back(WedgeComponent{idx, m, coeff});
    });
    return comps;
}

} // namespace detail

/// The t-independent data of g_t^w u_x applied to the wedge of the basis.
inline std::vector<WedgeComponent> transformed_wedge(const SubmoduleBasis& basis,
                                                     const TargetVector& x, const Weight& w) {
    if (w.dim() != basis.ambient() - 1) throw input_error("weight dimension must equal ambient - 1");
    return detail::wedge_components(detail::ux_rows(basis.rows(), x), w);
}

inline BigFloat covolume_from_components(const std::vector<WedgeComponent>& comps, double t) {
    BigFloat sum = 0;
    for (const WedgeComponent& c : comps) {
        BigFloat s = c.minor * exp(detail::bigfloat_of(c.exp_coeff) * BigFloat(t));
        sum += s * s;
    }
    return sqrt(sum);
}

/// Covolume of g_t^w u_x applied to the submodule: Euclidean norm of the
/// transformed wedge (Pluecker coordinates scaled by e^(sum of axis exponents)).
inline BigFloat submodule_covolume(const SubmoduleBasis& basis, const TargetVector& x,
                                   const Weight& w, double t) {
    return covolume_from_components(transformed_wedge(basis, x, w), t);
}

struct CovolumeCheck {
    BigFloat covolume;
    BigFloat part_err;  // ||g_t^w (v0 ^ (q x - p, 0))||
    BigFloat part_q;    // |q| ||g_t^w (v0 ^ e_n)||
    BigFloat max_expr;  // max of the two
    double ratio = 0;   // covolume / max_expr
    bool pass = false;
    bool q_zero_branch = false;
    Int q;
};

/// Verifies covolume within a factor C of the max expression
/// max(||g(v0 ^ (q x - p, 0))||, |q| ||g(v0 ^ e_n)||).
inline CovolumeCheck covolume_decomposition_check(const SubmoduleBasis& basis, const TargetVector& x,
                                                  const Weight& w, double t, double C) {
    if (C < 1) throw input_error("comparability constant must be >= 1");
    CovolumeCheck chk;
    chk.covolume = submodule_covolume(basis, x, w, t);
    SubmoduleBasis::Decomposition dec = basis.decompose();
    const size_t cols = static_cast<size_t>(basis.ambient());
    const int n = static_cast<int>(cols) - 1;
    if (!dec.has_q) {
        // q = 0: v lies in the last-coordinate-zero subspace and M = ||g v||
        chk.q_zero_branch = true;
        chk.q = 0;
        chk.part_err = chk.covolume;
        chk.part_q = 0;
    } else {
        chk.q = dec.q;
        const int bits = static_cast<int>(x.precision_bits()) + 16;
        // rows of v0 plus the error row (q x - p, 0)
        std::vector<std::vector<BigFloat>> err_rows;
        for (const auto& r : dec.v0) {
            std::vector<BigFloat> row(cols);
            for (size_t jx = 0; jx < cols; ++jx) row[jx] = BigFloat(r[jx].str());
            err_rows.push_back(std::move(row));
        }
        std::vector<BigFloat> er(cols);
        for (int i = 0; i < n; ++i)
            er[static_cast<size_t>(i)] =
                BigFloat(dec.q.str()) * detail::coordinate_bigfloat(x.coord(i), bits) -
                detail::bigfloat_of(Rat(dec.p[static_cast<size_t>(i)]));
        er[cols - 1] = 0;
        err_rows.push_back(std::move(er));
        chk.part_err = covolume_from_components(detail::wedge_components(err_rows, w), t);

        std::vector<std::vector<BigFloat>> q_rows;
        for (const auto& r : dec.v0) {
            std::vector<BigFloat> row(cols);
            for (size_t jx = 0; jx < cols; ++jx) row[jx] = BigFloat(r[jx].str());
            q_rows.push_back(std::move(row));
        }
        std::vector<BigFloat> en(cols);
        en[cols - 1] = 1;
        q_rows.push_back(std::move(en));
        chk.part_q = BigFloat(Int(abs(dec.q)).str()) * covolume_from_components(detail::wedge_components(q_rows, w), t);
    }
    chk.max_expr = chk.part_err > chk.part_q ? chk.part_err : chk.part_q;
    if (chk.max_expr == 0)
        throw internal_error("decomposition produced a zero max expression; offending basis is rank-deficient");
    chk.ratio = (chk.covolume / chk.max_expr).convert_to<double>();
    chk.pass = chk.ratio <= C && chk.ratio >= 1.0 / C;
    return chk;
}

} // namespace wdio
