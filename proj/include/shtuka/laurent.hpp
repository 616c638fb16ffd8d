#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shtuka/rings.hpp"

namespace shtuka {

/// Truncated Laurent series over a CoeffRing.
///
/// Coefficients are stored densely on the window [ord, prec). Below ord the
/// series is exactly zero. At and above prec the coefficients are unknown —
/// unless `exact` is set, in which case the series is a Laurent polynomial
/// known everywhere (zero above the window too). Operations propagate windows
/// pessimistically; anything that would need an unknown coefficient throws
/// PrecisionError instead of truncating silently.
struct LaurentSeries {
    CoeffRing ring;
    long long ord = 0;
    long long prec = 0;  // exclusive; prec >= ord, equality = empty window
    bool exact = false;
    std::vector<RElem> coef;  // size prec - ord

    LaurentSeries() = default;
    LaurentSeries(CoeffRing r, long long o, long long p, bool ex = false)
        : ring(r), ord(o), prec(p), exact(ex) {
        require(p >= o, "series window must satisfy prec >= ord");
        coef.assign(static_cast<size_t>(p - o), RElem{});
    }

    static LaurentSeries zero(CoeffRing r, long long o, long long p) {
        return LaurentSeries(r, o, p);
    }
    /// Exactly-zero series (Laurent polynomial 0).
    static LaurentSeries exact_zero(CoeffRing r) { return LaurentSeries(r, 0, 0, true); }

    static LaurentSeries monomial(CoeffRing r, long long k, RElem value) {
        LaurentSeries f(r, k, k + 1, true);
        f.coef[0] = value;
        return f;
    }
    static LaurentSeries z_pow(CoeffRing r, long long k) { return monomial(r, k, r_one()); }
    static LaurentSeries constant(CoeffRing r, RElem value) { return monomial(r, 0, value); }

    bool window_empty() const { return prec == ord; }

    /// Coefficient of z^k. Reads above the known range are precision faults.
    RElem at(long long k) const {
        if (k < ord) return RElem{};
        if (k >= prec) {
            if (exact) return RElem{};
            throw PrecisionError("coefficient of z^" + std::to_string(k) +
                                 " requested beyond precision " + std::to_string(prec));
        }
        return coef[static_cast<size_t>(k - ord)];
    }

    void set(long long k, RElem v) {
        require(k >= ord && k < prec, "coefficient outside window");
        coef[static_cast<size_t>(k - ord)] = v;
    }

    /// All coefficients known on the window are zero. For exact series this
    /// certifies the series is zero; otherwise only "zero below prec".
    bool known_zero() const {
        for (const auto& c : coef)
            if (!r_is_zero(c)) return false;
        return true;
    }

    bool is_exact_zero() const { return exact && known_zero(); }

    /// z-valuation: index of the lowest nonzero coefficient.
    /// nullopt means it cannot be certified (all known coefficients vanish on
    /// a truncated window); exact zero series report nullopt as well and are
    /// distinguished by is_exact_zero().
    std::optional<long long> val() const {
        for (size_t i = 0; i < coef.size(); ++i)
            if (!r_is_zero(coef[i])) return ord + static_cast<long long>(i);
        return std::nullopt;
    }

    long long val_or_throw(const char* what) const {
        if (auto v = val()) return *v;
        if (is_exact_zero()) throw NotAUnit(std::string(what) + ": series is exactly zero");
        throw PrecisionError(std::string(what) + ": valuation not certifiable below precision " +
                             std::to_string(prec));
    }

    /// Drop exactness and clip the window to [ord, new_prec).
    LaurentSeries clamped(long long new_prec) const {
        if (!exact && prec <= new_prec) return *this;
        LaurentSeries g(ring, std::min(ord, new_prec), new_prec);
        for (long long k = g.ord; k < g.prec; ++k) g.set(k, at(k));
        return g;
    }

    /// Tighten an exact polynomial to its support (cosmetic; keeps JSON small).
    LaurentSeries trimmed() const {
        if (!exact) return *this;
        long long lo = ord, hi = prec;
        while (lo < hi && r_is_zero(at(lo))) ++lo;
        while (hi > lo && r_is_zero(at(hi - 1))) --hi;
        LaurentSeries g(ring, lo, hi, true);
        for (long long k = lo; k < hi; ++k) g.set(k, at(k));
        return g;
    }

    std::string str() const;
};

inline constexpr long long kPrecInf = 1LL << 40;

namespace detail {
inline long long add_prec(long long a, long long b) {
    // Saturating add for the +infinity sentinel.
    if (a >= kPrecInf || b >= kPrecInf) return kPrecInf;
    return a + b;
}
}  // namespace detail

inline LaurentSeries ls_add(const LaurentSeries& f, const LaurentSeries& g) {
    require(f.ring == g.ring, "coefficient ring mismatch");
    long long pf = f.exact ? kPrecInf : f.prec;
    long long pg = g.exact ? kPrecInf : g.prec;
    long long prec = std::min(pf, pg);
    long long ord = std::min(f.ord, g.ord);
    bool exact = f.exact && g.exact;
    if (exact) prec = std::max(f.prec, g.prec);
    if (prec < ord) prec = ord;
    LaurentSeries r(f.ring, ord, prec, exact);
    for (long long k = ord; k < prec; ++k) r.set(k, r_add(f.ring, f.at(k), g.at(k)));
    return r;
}

inline LaurentSeries ls_neg(const LaurentSeries& f) {
    LaurentSeries r = f;
    for (auto& c : r.coef) c = r_neg(f.ring, c);
    return r;
}

inline LaurentSeries ls_sub(const LaurentSeries& f, const LaurentSeries& g) {
    return ls_add(f, ls_neg(g));
}

/// Newton-product precision: unknown tail of f enters at exponent prec_f +
/// ord_g and vice versa.
inline LaurentSeries ls_mul(const LaurentSeries& f, const LaurentSeries& g) {
    require(f.ring == g.ring, "coefficient ring mismatch");
    if (f.is_exact_zero() || g.is_exact_zero()) return LaurentSeries::exact_zero(f.ring);
    bool exact = f.exact && g.exact;
    long long ord = f.ord + g.ord;
    long long prec;
    if (exact) {
        prec = f.prec + g.prec - 1;
        if (prec < ord) prec = ord;
    } else {
        long long pf = f.exact ? kPrecInf : f.prec;
        long long pg = g.exact ? kPrecInf : g.prec;
        prec = std::min(detail::add_prec(pf, g.ord), detail::add_prec(pg, f.ord));
    }
    LaurentSeries r(f.ring, ord, prec, exact);
    const auto& R = f.ring;
    for (size_t i = 0; i < f.coef.size(); ++i) {
        if (r_is_zero(f.coef[i])) continue;
        long long ki = f.ord + static_cast<long long>(i);
        for (size_t j = 0; j < g.coef.size(); ++j) {
            if (r_is_zero(g.coef[j])) continue;
            long long k = ki + g.ord + static_cast<long long>(j);
            if (k >= r.prec) break;
            r.set(k, r_add(R, r.at(k), r_mul(R, f.coef[i], g.coef[j])));
        }
    }
    return r;
}

inline LaurentSeries ls_scale(const LaurentSeries& f, const RElem& c) {
    LaurentSeries r = f;
    for (auto& x : r.coef) x = r_mul(f.ring, c, x);
    return r;
}

/// Multiply by z^k (window shifts, nothing is lost).
inline LaurentSeries ls_shift(const LaurentSeries& f, long long k) {
    LaurentSeries r = f;
    r.ord += k;
    r.prec += k;
    return r;
}

/// Inverse of a declared unit f = u z^v (1 + h): known modulo z^{prec - 2v}.
/// Exact inputs need an explicit target precision since the inverse is an
/// infinite series whenever f has more than one term.
inline LaurentSeries ls_invert(const LaurentSeries& f, long long want_prec = kPrecInf) {
    auto v = f.val();
    if (!v) {
        if (f.is_exact_zero()) throw NotAUnit("series_invert: zero series");
        throw PrecisionError("series_invert: cannot certify the valuation below precision " +
                             std::to_string(f.prec));
    }
    const auto& R = f.ring;
    RElem lead = f.at(*v);
    if (!r_is_unit(R, lead))
        throw NotAUnit("series_invert: lowest coefficient is not a unit in the ring");

    long long out_prec;
    if (f.exact) {
        require(want_prec < kPrecInf, "series_invert: exact input needs a target precision");
        out_prec = want_prec;
    } else {
        out_prec = std::min(f.prec - 2 * (*v), want_prec);
    }
    long long n = out_prec - (-*v);  // number of output coefficients
    if (n < 1)
        throw PrecisionError("series_invert: no output window at the propagated precision");

    // g = z^{-v} * lead^{-1} * (1 + h)^{-1}, coefficients by the standard
    // recurrence (1+h)^{-1} = 1 - h (1+h)^{-1}.
    RElem lead_inv = r_inv(R, lead);
    std::vector<RElem> b(static_cast<size_t>(n));  // coefficients of (f z^{-v}/lead)^{-1}
    b[0] = r_one();
    for (long long k = 1; k < n; ++k) {
        RElem acc{};
        for (long long j = 1; j <= k; ++j) {
            RElem a_j = r_mul(R, lead_inv, f.at(*v + j));
            acc = r_add(R, acc, r_mul(R, a_j, b[static_cast<size_t>(k - j)]));
        }
        b[static_cast<size_t>(k)] = r_neg(R, acc);
    }
    LaurentSeries g(R, -*v, out_prec);
    for (long long k = 0; k < n; ++k)
        g.set(-*v + k, r_mul(R, lead_inv, b[static_cast<size_t>(k)]));
    return g;
}

inline LaurentSeries ls_frobenius(const LaurentSeries& f) {
    LaurentSeries r = f;
    for (auto& c : r.coef) c = r_frobenius(f.ring, c);
    return r;
}

/// Iterated sigma.
inline LaurentSeries ls_frobenius_iter(LaurentSeries f, int times) {
    for (int i = 0; i < times; ++i) f = ls_frobenius(f);
    return f;
}

/// Equality of the known parts on the overlap window; a test helper, not a
/// mathematical equality of series.
inline bool ls_known_equal(const LaurentSeries& f, const LaurentSeries& g) {
    long long lo = std::min(f.ord, g.ord);
    long long hi = std::min(f.exact ? kPrecInf : f.prec, g.exact ? kPrecInf : g.prec);
    if (hi >= kPrecInf) hi = std::max(f.prec, g.prec);
    for (long long k = lo; k < hi; ++k)
        if (f.at(k) != g.at(k)) return false;
    return true;
}

/// (z - zeta)^k as an exact Laurent polynomial, zeta = eps in a dual-number
/// ring (zero in a field, where this is plainly z^k). Negative k uses
/// (z - eps)^{-1} = sum_{j < e} eps^j z^{-1-j}, finite because eps^e = 0.
inline LaurentSeries ztilde_pow(const CoeffRing& R, long long k) {
    if (R.is_field()) return LaurentSeries::z_pow(R, k);
    LaurentSeries base = LaurentSeries::exact_zero(R);
    if (k >= 0) {
        base = ls_sub(LaurentSeries::z_pow(R, 1),
                      LaurentSeries::constant(R, r_eps(R)));
    } else {
        base = LaurentSeries(R, -static_cast<long long>(R.eps), 0, true);
        RElem epspow = r_one();
        for (int j = 0; j < R.eps; ++j) {
            base.set(-1 - j, epspow);
            epspow = r_mul(R, epspow, r_eps(R));
        }
    }
    LaurentSeries r = LaurentSeries::z_pow(R, 0);
    long long n = k >= 0 ? k : -k;
    for (long long i = 0; i < n; ++i) r = ls_mul(r, base).trimmed();
    return r;
}

inline std::string LaurentSeries::str() const {
    std::string s;
    bool first = true;
    for (long long k = ord; k < prec; ++k) {
        const RElem& c = at(k);
        if (r_is_zero(c)) continue;
        if (!first) s += " + ";
        first = false;
        std::string cs;
        if (ring.eps == 1) {
            cs = std::to_string(c.c[0]);
        } else {
            cs = "(";
            for (int i = 0; i < ring.eps; ++i) {
                if (i) cs += ",";
                cs += std::to_string(c.c[i]);
            }
            cs += ")";
        }
        s += cs + "*z^" + std::to_string(k);
    }
    if (first) s += "0";
    if (!exact) s += " + O(z^" + std::to_string(prec) + ")";
    return s;
}

}  // namespace shtuka
