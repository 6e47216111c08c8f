// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "wdio/target.hpp"

namespace wdio {

/// Sparse multivariate polynomial over Q. Exponent vectors are indexed by the
/// owning map's parameter list.
class Poly {
  public:
    explicit Poly(int nvars) : nvars_(nvars) {}
    static Poly constant(const Rat& c, int nvars) {
        Poly p(nvars);
        if (c != 0) p.terms_[std::vector<int>(static_cast<size_t>(nvars), 0)] = c;
        return p;
    }
    static Poly var(int i, int nvars) {
        Poly p(nvars);
        std::vector<int> e(static_cast<size_t>(nvars), 0);
        e[static_cast<size_t>(i)] = 1;
        p.terms_[e] = Rat(1);
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e) s += k;
            if (s > d) d = s;
        }
        return d;
    }
    bool is_affine() const { return degree() <= 1; }

    Poly operator+(const Poly& o) const {
        Poly r = *this;
        for (const auto& [e, c] : o.terms_) add_term(r, e, c);
        return r;
    }
    Poly operator-(const Poly& o) const {
        Poly r = *this;
        for (const auto& [e, c] : o.terms_) add_term(r, e, -c);
        return r;
    }
    Poly operator*(const Poly& o) const {
        Poly r(nvars_);
        for (const auto& [e1, c1] : terms_)
            for (const auto& [e2, c2] : o.terms_) {
                std::vector<int> e(e1);
                for (size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
                add_term(r, e, c1 * c2);
            }
        return r;
    }
    Poly operator*(const Rat& c) const { return *this * constant(c, nvars_); }
    Poly pow(int e) const {
        Poly r = constant(Rat(1), nvars_);
        for (int k = 0; k < e; ++k) r = r * *this;
        return r;
    }
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }

    Rat eval(const std::vector<Rat>& vals) const {
        Rat sum(0);
        for (const auto& [e, c] : terms_) {
            Rat t = c;
            for (size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) t *= vals[i];
            sum += t;
        }
        return sum;
    }

    /// Evaluation over mixed rational / computable-real parameters.
    Coordinate eval(const std::vector<Coordinate>& vals) const {
        bool all_rat = true;
        for (const Coordinate& v : vals)
            if (!v.is_rational()) all_rat = false;
        if (all_rat) {
            std::vector<Rat> rs;
            rs.reserve(vals.size());
            for (const Coordinate& v : vals) rs.push_back(v.rational());
            return Coordinate(eval(rs));
        }
        CReal acc = make_const(Rat(0));
        for (const auto& [e, c] : terms_) {
            CReal t = make_const(c);
            for (size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k)
                    t = vals[i].is_rational() ? make_affine(vals[i].rational(), t, Rat(0))
                                              : make_mul(t, vals[i].real());
            acc = make_sum(acc, t);
        }
        return Coordinate(acc);
    }

    const std::map<std::vector<int>, Rat>& terms() const { return terms_; }

  private:
    static void add_term(Poly& p, const std::vector<int>& e, const Rat& c) {
        auto it = p.terms_.find(e);
        if (it == p.terms_.end()) {
            if (c != 0) p.terms_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0) p.terms_.erase(it);
        }
    }
    int nvars_;
    std::map<std::vector<int>, Rat> terms_;
};

/// A polynomial map R^k -> R^n given as "s,t->s,t,s+t". Subspace specs must be
/// affine; curves are univariate polynomial maps.
struct PolyMap {
    std::vector<std::string> params;
    std::vector<Poly> comps;
    std::string spec;

    int domain_dim() const { return static_cast<int>(params.size()); }
    int range_dim() const { return static_cast<int>(comps.size()); }
    bool is_affine() const {
        for (const Poly& p : comps)
            if (!p.is_affine()) return false;
        return true;
    }
    std::vector<Coordinate> eval(const std::vector<Coordinate>& vals) const {
        std::vector<Coordinate> out;
        out.reserve(comps.size());
        for (const Poly& p : comps) out.push_back(p.eval(vals));
        return out;
    }
};

namespace detail {

class PolyParser {
  public:
    PolyParser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) throw input_error("trailing characters in polynomial", static_cast<long long>(pos_) + 1);
        return p;
    }

  private:
    Poly expr() {
        skip_ws();
        bool neg = false;
        if (peek() == '+' || peek() == '-') neg = (get() == '-');
        Poly p = term();
        if (neg) p = Poly::constant(Rat(-1), nv()) * p;
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                get();
                Poly t = term();
                p = (c == '+') ? p + t : p - t;
            } else break;
        }
        return p;
    }
    Poly term() {
        Poly p = factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') { get(); p = p * factor(); }
            else break;
        }
        return p;
    }
    Poly factor() {
        skip_ws();
        Poly p = atom();
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (st == pos_) throw input_error("expected integer exponent", static_cast<long long>(pos_) + 1);
            p = p.pow(std::stoi(s_.substr(st, pos_ - st)));
        }
        return p;
    }
    Poly atom() {
        skip_ws();
        if (peek() == '(') {
            get();
            Poly p = expr();
            skip_ws();
            if (get() != ')') throw input_error("expected ')'", static_cast<long long>(pos_));
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            size_t st = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/'))
                ++pos_;
            std::string tok = s_.substr(st, pos_ - st);
            try {
                size_t slash = tok.find('/');
                if (slash == std::string::npos) return Poly::constant(Rat(Int(tok)), nv());
                return Poly::constant(Rat(Int(tok.substr(0, slash)), Int(tok.substr(slash + 1))), nv());
            } catch (...) {
                throw input_error("malformed rational '" + tok + "'", static_cast<long long>(st) + 1);
            }
        }
        // identifier
        size_t st = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        if (st == pos_) throw input_error("expected factor", static_cast<long long>(pos_) + 1);
        std::string name = s_.substr(st, pos_ - st);
        for (size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return Poly::var(static_cast<int>(i), nv());
        throw input_error("unknown parameter '" + name + "'", static_cast<long long>(st) + 1);
    }
    int nv() const { return static_cast<int>(vars_.size()); }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }
    void skip_ws() { while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_; }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    size_t pos_ = 0;
};

} // namespace detail

/// Parses "s,t -> s, t, s+t" into a PolyMap.
inline PolyMap parse_poly_map(const std::string& spec) {
    size_t arrow = spec.find("->");
    if (arrow == std::string::npos) throw input_error("map spec needs '->'");
    PolyMap pm;
    pm.spec = spec;
    std::string head = spec.substr(0, arrow);
    size_t st = 0;
    while (st <= head.size()) {
        size_t comma = head.find(',', st);
        std::string v = head.substr(st, comma == std::string::npos ? std::string::npos : comma - st);
        size_t b = v.find_first_not_of(" \t"), e = v.find_last_not_of(" \t");
        if (b == std::string::npos) throw input_error("empty parameter name in map spec");
        pm.params.push_back(v.substr(b, e - b + 1));
        if (comma == std::string::npos) break;
        st = comma + 1;
    }
    // split components at top level commas
    std::string body = spec.substr(arrow + 2);
    int depth = 0;
    size_t start = 0;
    std::vector<std::string> parts;
    for (size_t i = 0; i <= body.size(); ++i) {
        char c = i < body.size() ? body[i] : ',';
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == ',' && depth == 0) {
            parts.push_back(body.substr(start, i - start));
            start = i + 1;
        }
    }
    for (const std::string& part : parts)
        pm.comps.push_back(detail::PolyParser(part, pm.params).parse());
    if (pm.comps.empty()) throw input_error("map spec has no components");
    return pm;
}

/// Checks symbolically that the curve image lies in the affine subspace
/// image(L): solves L.A * sigma(t) = curve(t) - L.b over polynomials and
/// demands zero residual on eliminated rows.
inline bool curve_in_subspace(const PolyMap& subspace, const PolyMap& curve) {
    if (!subspace.is_affine()) throw input_error("subspace spec must be affine");
    if (curve.domain_dim() != 1) throw input_error("curve spec must have one parameter");
    if (subspace.range_dim() != curve.range_dim()) throw input_error("range dimensions differ");
    const int n = subspace.range_dim(), k = subspace.domain_dim();
    // A[i][j] = coefficient of s_j in subspace component i; b[i] = constant term
    std::vector<std::vector<Rat>> A(static_cast<size_t>(n), std::vector<Rat>(static_cast<size_t>(k), Rat(0)));
    std::vector<Rat> b(static_cast<size_t>(n), Rat(0));
    for (int i = 0; i < n; ++i)
        for (const auto& [e, c] : subspace.comps[static_cast<size_t>(i)].terms()) {
            int deg = 0, which = -1;
            for (int j = 0; j < k; ++j)
                if (e[static_cast<size_t>(j)] > 0) { deg += e[static_cast<size_t>(j)]; which = j; }
            if (deg == 0) b[static_cast<size_t>(i)] = c;
            else A[static_cast<size_t>(i)][static_cast<size_t>(which)] = c;
        }
    // rhs_i(t) = curve_i(t) - b_i  (univariate polynomials)
    std::vector<Poly> rhs;
    for (int i = 0; i < n; ++i)
        rhs.push_back(curve.comps[static_cast<size_t>(i)] - Poly::constant(b[static_cast<size_t>(i)], 1));
    // Gaussian elimination on A rows with the polynomial right-hand side
    int row = 0;
    for (int col = 0; col < k && row < n; ++col) {
        int piv = -1;
        for (int i = row; i < n; ++i)
            if (A[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(A[static_cast<size_t>(piv)], A[static_cast<size_t>(row)]);
        std::swap(rhs[static_cast<size_t>(piv)], rhs[static_cast<size_t>(row)]);
        for (int i = 0; i < n; ++i) {
            if (i == row || A[static_cast<size_t>(i)][static_cast<size_t>(col)] == 0) continue;
            Rat f = A[static_cast<size_t>(i)][static_cast<size_t>(col)] /
                    A[static_cast<size_t>(row)][static_cast<size_t>(col)];
            for (int j = 0; j < k; ++j)
                A[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                    f * A[static_cast<size_t>(row)][static_cast<size_t>(j)];
            rhs[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)] - rhs[static_cast<size_t>(row)] * f;
        }
        ++row;
    }
    for (int i = row; i < n; ++i)
        if (!rhs[static_cast<size_t>(i)].is_zero()) return false;
    return true;
}

} // namespace wdio
