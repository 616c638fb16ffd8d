#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shtuka/affine_weyl.hpp"
#include "shtuka/laurent.hpp"
#include "shtuka/newton.hpp"

namespace shtuka {

/// r x r matrix over LaurentSeries; the carrier of local shtukas (b sigma*)
/// and of lattice representatives. Immutable by convention: operations return
/// fresh matrices.
struct SeriesMatrix {
    CoeffRing ring;
    int r = 0;
    std::vector<LaurentSeries> e;  // row-major
    int subfield_s = 1;            // declared sigma-stable coefficient subfield F_{q^s}

    static constexpr int kMaxRank = 8;

    SeriesMatrix() = default;
    SeriesMatrix(CoeffRing R, int rr) : ring(R), r(rr) {
        require(r >= 1 && r <= kMaxRank, "matrix rank out of range (engine cap 8)");
        e.assign(static_cast<size_t>(r) * r, LaurentSeries::exact_zero(R));
    }

    LaurentSeries& at(int i, int j) { return e[static_cast<size_t>(i) * r + j]; }
    const LaurentSeries& at(int i, int j) const { return e[static_cast<size_t>(i) * r + j]; }

    static SeriesMatrix identity(CoeffRing R, int r) {
        SeriesMatrix m(R, r);
        for (int i = 0; i < r; ++i) m.at(i, i) = LaurentSeries::z_pow(R, 0);
        return m;
    }

    /// Diagonal z^mu (exact).
    static SeriesMatrix z_mu(CoeffRing R, const IVec& mu) {
        SeriesMatrix m(R, static_cast<int>(mu.size()));
        for (int i = 0; i < m.r; ++i) m.at(i, i) = LaurentSeries::z_pow(R, mu[static_cast<size_t>(i)]);
        return m;
    }

    SeriesMatrix clamped(long long prec) const {
        SeriesMatrix m = *this;
        for (auto& x : m.e) x = x.clamped(prec);
        return m;
    }

    std::string str() const {
        std::string s;
        for (int i = 0; i < r; ++i) {
            s += "[ ";
            for (int j = 0; j < r; ++j) s += at(i, j).str() + (j + 1 < r ? " | " : "");
            s += " ]\n";
        }
        return s;
    }
};

inline SeriesMatrix sm_mul(const SeriesMatrix& a, const SeriesMatrix& b) {
    require(a.ring == b.ring && a.r == b.r, "matrix shape/ring mismatch");
    SeriesMatrix m(a.ring, a.r);
    for (int i = 0; i < a.r; ++i)
        for (int j = 0; j < a.r; ++j) {
            LaurentSeries acc = ls_mul(a.at(i, 0), b.at(0, j));
            for (int k = 1; k < a.r; ++k) acc = ls_add(acc, ls_mul(a.at(i, k), b.at(k, j)));
            m.at(i, j) = std::move(acc);
        }
    return m;
}

/// Known-window equality of all entries (test helper).
inline bool sm_known_equal_all(const SeriesMatrix& a, const SeriesMatrix& b) {
    if (a.r != b.r || a.ring != b.ring) return false;
    for (size_t i = 0; i < a.e.size(); ++i)
        if (!ls_known_equal(a.e[i], b.e[i])) return false;
    return true;
}

inline SeriesMatrix sm_frobenius(const SeriesMatrix& a) {
    SeriesMatrix m = a;
    for (auto& x : m.e) x = ls_frobenius(x);
    return m;
}

inline SeriesMatrix sm_frobenius_iter(SeriesMatrix a, int times) {
    for (int i = 0; i < times; ++i) a = sm_frobenius(a);
    return a;
}

/// Determinant by column-subset dynamic programming (2^r states).
inline LaurentSeries sm_det(const SeriesMatrix& a) {
    int r = a.r;
    size_t full = (size_t{1} << r);
    std::vector<LaurentSeries> dp(full, LaurentSeries::exact_zero(a.ring));
    dp[0] = LaurentSeries::z_pow(a.ring, 0);
    std::vector<LaurentSeries> next(full, LaurentSeries::exact_zero(a.ring));
    for (int row = 0; row < r; ++row) {
        for (auto& x : next) x = LaurentSeries::exact_zero(a.ring);
        for (size_t mask = 0; mask < full; ++mask) {
            if (__builtin_popcountll(mask) != row) continue;
            if (dp[mask].is_exact_zero()) continue;
            for (int c = 0; c < r; ++c) {
                size_t bit = size_t{1} << c;
                if (mask & bit) continue;
                // Laplace sign: parity of the chosen columns below c.
                LaurentSeries term = ls_mul(dp[mask], a.at(row, c));
                if (__builtin_popcountll(mask & (bit - 1)) % 2 == 1) term = ls_neg(term);
                next[mask | bit] = ls_add(next[mask | bit], term);
            }
        }
        dp.swap(next);
    }
    return dp[full - 1];
}

/// Determinant of the square submatrix rows x cols (index lists, same size).
inline LaurentSeries sm_minor(const SeriesMatrix& a, const std::vector<int>& rows,
                              const std::vector<int>& cols) {
    int k = static_cast<int>(rows.size());
    SeriesMatrix sub(a.ring, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub.at(i, j) = a.at(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
    return sm_det(sub);
}

/// Conservative working precision from the entry windows, matching the policy
/// P = 2 r (N + |mu|) + 4 used by the batch drivers: here N and |mu| are
/// estimated from the largest exponent magnitudes present.
inline long long default_precision(const SeriesMatrix& a) {
    long long L = 1;
    for (const auto& x : a.e) {
        LaurentSeries t = x.exact ? x.trimmed() : x;
        if (t.window_empty()) continue;
        L = std::max(L, t.ord < 0 ? -t.ord : t.ord);
        L = std::max(L, t.prec - 1 < 0 ? -(t.prec - 1) : t.prec - 1);
    }
    return 2 * a.r * (L + 1) + 4;
}

namespace detail {
struct PivotScan {
    bool found = false;
    int i = -1, j = -1;
    long long v = 0;
};
}  // namespace detail

/// Hodge polygon: the dominant mu with b in K z^mu K, by Smith normal form
/// over the discrete valuation ring F[[z]] (minimal-valuation pivot with
/// deterministic tie-breaking: lowest row, then column). The sum of the
/// elementary divisors is cross-checked against an independent determinant.
inline IVec hodge_polygon(const SeriesMatrix& b, long long prec = 0) {
    require(b.ring.is_field(), "hodge_polygon requires field coefficients");
    if (prec == 0) prec = default_precision(b);
    SeriesMatrix w = b.clamped(prec);
    int r = b.r;
    std::vector<bool> row_done(static_cast<size_t>(r), false), col_done(static_cast<size_t>(r), false);
    IVec es;
    for (int step = 0; step < r; ++step) {
        // Deterministic pivot: minimal valuation, lowest row, then column.
        detail::PivotScan best;
        for (int i = 0; i < r; ++i) {
            if (row_done[static_cast<size_t>(i)]) continue;
            for (int j = 0; j < r; ++j) {
                if (col_done[static_cast<size_t>(j)]) continue;
                auto v = w.at(i, j).val();
                if (v && (!best.found || *v < best.v)) {
                    best.found = true;
                    best.i = i;
                    best.j = j;
                    best.v = *v;
                }
            }
        }
        if (!best.found) {
            bool all_exact_zero = true;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    if (!row_done[static_cast<size_t>(i)] && !col_done[static_cast<size_t>(j)] &&
                        !w.at(i, j).is_exact_zero())
                        all_exact_zero = false;
            if (all_exact_zero) throw NotInvertible("matrix is singular over the Laurent field");
            throw PrecisionError("hodge_polygon: no pivot certifiable at precision " +
                                 std::to_string(prec));
        }
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                if (!row_done[static_cast<size_t>(i)] && !col_done[static_cast<size_t>(j)]) {
                    const auto& f = w.at(i, j);
                    if (!f.val() && !f.is_exact_zero() && f.prec <= best.v)
                        throw PrecisionError(
                            "hodge_polygon: entry valuation unresolved at precision " +
                            std::to_string(f.prec));
                }

        const LaurentSeries pivot = w.at(best.i, best.j);
        LaurentSeries pinv = ls_invert(pivot, prec);
        for (int i = 0; i < r; ++i) {
            if (i == best.i || row_done[static_cast<size_t>(i)]) continue;
            const LaurentSeries& x = w.at(i, best.j);
            if (x.is_exact_zero() || x.known_zero()) continue;
            LaurentSeries c = ls_mul(x, pinv);  // val >= 0 by pivot minimality
            for (int j = 0; j < r; ++j) {
                if (col_done[static_cast<size_t>(j)]) continue;
                w.at(i, j) = ls_sub(w.at(i, j), ls_mul(c, w.at(best.i, j)));
            }
            w.at(i, best.j) = LaurentSeries::exact_zero(b.ring);
        }
        for (int j = 0; j < r; ++j) {
            if (j == best.j || col_done[static_cast<size_t>(j)]) continue;
            w.at(best.i, j) = LaurentSeries::exact_zero(b.ring);  // row cleared by column ops
        }
        row_done[static_cast<size_t>(best.i)] = true;
        col_done[static_cast<size_t>(best.j)] = true;
        es.push_back(best.v);
    }
    std::sort(es.begin(), es.end(), std::greater<long long>());

    // Independent cross-check: sum of Hodge weights = v_z(det b).
    if (b.r <= 5) {
        auto dv = sm_det(b.clamped(prec)).val();
        long long sum = 0;
        for (auto x : es) sum += x;
        if (dv && *dv != sum)
            throw Error("internal: elementary divisor sum disagrees with det valuation");
    }
    return es;
}

/// Is f in ztilde^m * R[[z]]? Decided by multiplying with the exact Laurent
/// polynomial ztilde^{-m} and certifying the negative coefficients.
inline bool ztilde_divisible(const LaurentSeries& f, long long m) {
    if (f.is_exact_zero()) return true;
    LaurentSeries g = ls_mul(f, ztilde_pow(f.ring, -m));
    if (!g.exact && g.prec < 0)
        throw PrecisionError("divisibility by ztilde^" + std::to_string(m) +
                             " not certifiable at precision " + std::to_string(g.prec));
    for (long long k = g.ord; k < std::min(g.prec, 0LL); ++k)
        if (!r_is_zero(g.at(k))) return false;
    return true;
}

/// Boundedness by mu (descending) per the exterior-power divisibility
/// criterion: every i x i minor lies in ztilde^{d_{r-i+1}+...+d_r} R[[z]] and
/// det b = unit * ztilde^{|mu|} (the i = r equality, which also pins kappa).
/// ztilde = z over a field, z - eps over dual numbers.
enum class BoundMode { Z, ZMinusZeta };

inline bool bounded_by(const SeriesMatrix& b, const IVec& mu, BoundMode mode) {
    require(static_cast<int>(mu.size()) == b.r, "mu length mismatch");
    for (size_t i = 0; i + 1 < mu.size(); ++i)
        require(mu[i] >= mu[i + 1], "mu must be dominant (descending)");
    CoeffRing R = b.ring;
    int r = b.r;
    // Suffix sums m_i = d_{r-i+1} + ... + d_r.
    std::vector<long long> m(static_cast<size_t>(r) + 1, 0);
    for (int i = 1; i <= r; ++i) m[static_cast<size_t>(i)] = m[static_cast<size_t>(i) - 1] + mu[static_cast<size_t>(r - i)];

    auto tilde_pow = [&](long long k) {
        return mode == BoundMode::ZMinusZeta ? ztilde_pow(R, k) : LaurentSeries::z_pow(R, k);
    };

    for (int i = 1; i <= r; ++i) {
        std::vector<std::vector<int>> all;  // size-i index combinations
        std::vector<int> comb(static_cast<size_t>(i));
        auto rec = [&](auto&& self, int pos, int from) -> void {
            if (pos == i) {
                all.push_back(comb);
                return;
            }
            for (int v = from; v < r; ++v) {
                comb[static_cast<size_t>(pos)] = v;
                self(self, pos + 1, v + 1);
            }
        };
        rec(rec, 0, 0);
        for (const auto& rw : all)
            for (const auto& cl : all) {
                LaurentSeries f = sm_minor(b, rw, cl);
                if (i == r) {
                    // det = unit * ztilde^{|mu|}: integral quotient with unit
                    // constant term (this also pins kappa via the det valuation).
                    LaurentSeries g = ls_mul(f, tilde_pow(-m[static_cast<size_t>(r)]));
                    if (!g.exact && g.prec < 1)
                        throw PrecisionError("boundedness: determinant unit test needs z^0");
                    for (long long k = g.ord; k < std::min(g.prec, 0LL); ++k)
                        if (!r_is_zero(g.at(k))) return false;
                    if (!r_is_unit(R, g.at(0))) return false;
                } else if (!ztilde_divisible(f, m[static_cast<size_t>(i)])) {
                    return false;
                }
            }
    }
    return true;
}

/// Matrix inverse over the Laurent field, Gaussian elimination with
/// minimal-valuation row pivoting.
inline SeriesMatrix sm_invert(const SeriesMatrix& a, long long prec = 0) {
    if (prec == 0) prec = default_precision(a);
    int r = a.r;
    SeriesMatrix w = a.clamped(prec);
    SeriesMatrix inv = SeriesMatrix::identity(a.ring, r);
    for (auto& x : inv.e) x = x.clamped(prec);
    for (int t = 0; t < r; ++t) {
        int piv = -1;
        long long pv = 0;
        for (int i = t; i < r; ++i) {
            auto v = w.at(i, t).val();
            if (v && (piv < 0 || *v < pv)) {
                piv = i;
                pv = *v;
            }
        }
        if (piv < 0) {
            bool all_zero = true;
            for (int i = t; i < r; ++i)
                if (!w.at(i, t).is_exact_zero()) all_zero = false;
            if (all_zero) throw NotInvertible("matrix is singular");
            throw PrecisionError("matrix inverse: pivot valuation unresolved");
        }
        for (int i = t; i < r; ++i) {
            const auto& f = w.at(i, t);
            if (!f.val() && !f.is_exact_zero() && f.prec <= pv)
                throw PrecisionError("matrix inverse: column valuations unresolved");
        }
        if (piv != t) {
            for (int j = 0; j < r; ++j) {
                std::swap(w.at(piv, j), w.at(t, j));
                std::swap(inv.at(piv, j), inv.at(t, j));
            }
        }
        LaurentSeries pinv = ls_invert(w.at(t, t), prec);
        for (int j = 0; j < r; ++j) {
            w.at(t, j) = ls_mul(pinv, w.at(t, j));
            inv.at(t, j) = ls_mul(pinv, inv.at(t, j));
        }
        for (int i = 0; i < r; ++i) {
            if (i == t) continue;
            const LaurentSeries c = w.at(i, t);
            if (c.is_exact_zero() || c.known_zero()) continue;
            for (int j = 0; j < r; ++j) {
                w.at(i, j) = ls_sub(w.at(i, j), ls_mul(c, w.at(t, j)));
                inv.at(i, j) = ls_sub(inv.at(i, j), ls_mul(c, inv.at(t, j)));
            }
        }
    }
    return inv;
}

/// g^{-1} b sigma(g).
inline SeriesMatrix sigma_conjugate(const SeriesMatrix& g, const SeriesMatrix& b,
                                    long long prec = 0) {
    require(g.ring == b.ring, "ring mismatch");
    if (prec == 0) prec = std::max(default_precision(g), default_precision(b));
    return sm_mul(sm_mul(sm_invert(g, prec), b), sm_frobenius(g));
}

/// Entries must lie in the sigma^s-fixed subfield F_{q^s}; checked
/// semantically, no embedding machinery.
inline void validate_subfield(const SeriesMatrix& b, int s) {
    for (const auto& x : b.e)
        for (const auto& c : x.coef)
            for (int t = 0; t < b.ring.eps; ++t)
                if (b.ring.field->frobenius_iter(c.c[static_cast<size_t>(t)], s) != c.c[static_cast<size_t>(t)])
                    throw ValidationError(
                        "matrix coefficients are not fixed by sigma^s (not in F_{q^s})");
}

/// (b sigma*)^s norm: b sigma(b) ... sigma^{s-1}(b).
inline SeriesMatrix norm_s(const SeriesMatrix& b, int s) {
    require(s >= 1, "s must be >= 1");
    validate_subfield(b, s);
    SeriesMatrix acc = b;
    SeriesMatrix pw = b;
    for (int i = 1; i < s; ++i) {
        pw = sm_frobenius(pw);
        acc = sm_mul(acc, pw);
    }
    return acc;
}

/// Newton point of b sigma* with entries in F_{q^s}: (1/s) times the slopes of
/// the z-adic Newton polygon of the characteristic polynomial of norm_s(b),
/// sorted descending. Char-poly coefficients by exact expansion of principal
/// minors; the lower hull is certified against every truncated coefficient.
inline QVec newton_point(const SeriesMatrix& b, int s) {
    require(b.ring.is_field(), "newton_point requires field coefficients");
    SeriesMatrix n = norm_s(b, s);
    int r = b.r;

    // c_k = coefficient of T^k in det(T - N): c_{r-i} = (-1)^i e_i(N).
    std::vector<LaurentSeries> coeff(static_cast<size_t>(r) + 1,
                                     LaurentSeries::exact_zero(b.ring));
    coeff[static_cast<size_t>(r)] = LaurentSeries::z_pow(b.ring, 0);
    for (int i = 1; i <= r; ++i) {
        LaurentSeries acc = LaurentSeries::exact_zero(b.ring);
        std::vector<int> comb(static_cast<size_t>(i));
        auto rec = [&](auto&& self, int pos, int from) -> void {
            if (pos == i) {
                acc = ls_add(acc, sm_minor(n, comb, comb));
                return;
            }
            for (int v = from; v < r; ++v) {
                comb[static_cast<size_t>(pos)] = v;
                self(self, pos + 1, v + 1);
            }
        };
        rec(rec, 0, 0);
        coeff[static_cast<size_t>(r - i)] = (i % 2 == 1) ? ls_neg(acc) : acc;
    }

    // Certified points (k, v(c_k)); truncated-zero coefficients must provably
    // lie on or above the hull of the certified ones.
    struct Pt {
        long long x, y;
    };
    std::vector<Pt> pts;
    std::vector<std::pair<long long, long long>> unknown;  // (k, prec)
    for (int k = 0; k <= r; ++k) {
        const auto& c = coeff[static_cast<size_t>(k)];
        if (auto v = c.val()) {
            pts.push_back({k, *v});
        } else if (!c.is_exact_zero()) {
            unknown.push_back({k, c.prec});
        }
    }
    if (pts.empty() || pts.front().x != 0) {
        if (coeff[0].is_exact_zero())
            throw NotInvertible("newton_point: determinant is exactly zero");
        throw PrecisionError("newton_point: det valuation unresolved; raise precision");
    }
    if (pts.back().x != r) throw Error("internal: leading char-poly coefficient lost");

    // Lower convex hull (monotone chain over x-sorted points).
    std::vector<Pt> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b2 = hull[hull.size() - 1];
            // pop b2 if it lies on or above segment a-p
            if ((b2.y - a.y) * (p.x - a.x) >= (p.y - a.y) * (b2.x - a.x))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    auto hull_height = [&](long long x) -> Rational {
        for (size_t i = 0; i + 1 < hull.size(); ++i)
            if (hull[i].x <= x && x <= hull[i + 1].x) {
                Rational t(x - hull[i].x, hull[i + 1].x - hull[i].x);
                return Rational(hull[i].y) + t * Rational(hull[i + 1].y - hull[i].y);
            }
        return Rational(hull.back().y);
    };
    for (auto [k, pr] : unknown)
        if (Rational(pr) < hull_height(k))
            throw PrecisionError(
                "newton_point: coefficient of T^" + std::to_string(k) +
                " only known below the hull; need precision >= " +
                std::to_string(hull_height(k).ceil()) + " (have " + std::to_string(pr) + ")");

    QVec slopes;
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        long long dx = hull[i + 1].x - hull[i].x;
        Rational slope(hull[i].y - hull[i + 1].y, dx);  // eigenvalue valuation
        for (long long t = 0; t < dx; ++t) slopes.push_back(slope / Rational(s));
    }
    if (!glr_descending(slopes)) throw Error("internal: Newton slopes not descending");
    if (!glr_admissible(slopes))
        throw Error("internal: Newton point fails breakpoint integrality");
    return slopes;
}

/// Decency probe: does norm_s(b) equal a monomial cocharacter matrix z^omega
/// exactly (within precision)? Returns omega when it does; nu = omega/s is
/// asserted against newton_point.
inline std::optional<IVec> decency_check(const SeriesMatrix& b, int s) {
    SeriesMatrix n = norm_s(b, s);
    int r = b.r;
    IVec omega(static_cast<size_t>(r), 0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const auto& f = n.at(i, j);
            if (i != j) {
                if (!f.known_zero()) return std::nullopt;
                continue;
            }
            auto v = f.val();
            if (!v) {
                if (f.is_exact_zero()) return std::nullopt;  // zero diagonal: not monomial
                throw PrecisionError("decency_check: diagonal valuation unresolved");
            }
            if (f.at(*v) != r_one()) return std::nullopt;
            for (long long k = *v + 1; k < f.prec; ++k)
                if (!r_is_zero(f.at(k))) return std::nullopt;
            omega[static_cast<size_t>(i)] = *v;
        }
    if (b.ring.is_field()) {
        QVec nu = newton_point(b, s);
        QVec mu(omega.size());
        for (size_t i = 0; i < omega.size(); ++i) mu[i] = Rational(omega[i], s);
        std::sort(mu.begin(), mu.end(), [](const Rational& a, const Rational& b2) { return b2 < a; });
        if (!(mu == nu)) throw Error("internal: decency omega/s disagrees with newton_point");
    }
    return omega;
}

/// Exact monomial matrix of x = t_lambda w (finite part must be a permutation).
inline SeriesMatrix awe_to_matrix(const AffineWeylElement& x, CoeffRing R) {
    int r = static_cast<int>(x.translation.size());
    SeriesMatrix m(R, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            long long v = x.finite.mat[static_cast<size_t>(i)][static_cast<size_t>(j)];
            require(v == 0 || v == 1, "finite part is not a permutation matrix");
            if (v == 1) m.at(i, j) = LaurentSeries::z_pow(R, x.translation[static_cast<size_t>(i)]);
        }
    }
    return m;
}

/// Bruhat-Tits reduction: the unique x in W~ with g in I x I. Gaussian
/// elimination restricted to Iwahori-legal operations; pivots are chosen per
/// step as (smallest column holding the minimum valuation, largest such row in
/// it), which keeps every clearing quotient inside I.
inline AffineWeylElement iwahori_coset(const SeriesMatrix& g, long long prec = 0) {
    require(g.ring.is_field(), "iwahori_coset requires field coefficients");
    if (prec == 0) prec = default_precision(g);
    int r = g.r;
    const RootDatum& d = glr(r);
    SeriesMatrix w = g.clamped(prec);
    std::vector<bool> row_done(static_cast<size_t>(r), false), col_done(static_cast<size_t>(r), false);
    IVec lambda(static_cast<size_t>(r), 0);
    std::vector<int> perm(static_cast<size_t>(r), -1);

    for (int step = 0; step < r; ++step) {
        long long vmin = 0;
        bool found = false;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                if (row_done[static_cast<size_t>(i)] || col_done[static_cast<size_t>(j)]) continue;
                auto v = w.at(i, j).val();
                if (v && (!found || *v < vmin)) {
                    found = true;
                    vmin = *v;
                }
            }
        if (!found) {
            bool all_zero = true;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    if (!row_done[static_cast<size_t>(i)] && !col_done[static_cast<size_t>(j)] &&
                        !w.at(i, j).is_exact_zero())
                        all_zero = false;
            if (all_zero) throw NotInvertible("iwahori_coset: singular matrix");
            throw PrecisionError("iwahori_coset: no pivot certifiable");
        }
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                if (row_done[static_cast<size_t>(i)] || col_done[static_cast<size_t>(j)]) continue;
                const auto& f = w.at(i, j);
                if (!f.val() && !f.is_exact_zero() && f.prec <= vmin)
                    throw PrecisionError("iwahori_coset: entry valuation unresolved");
            }
        int j0 = -1, i0 = -1;
        for (int j = 0; j < r && j0 < 0; ++j) {
            if (col_done[static_cast<size_t>(j)]) continue;
            for (int i = 0; i < r; ++i) {
                if (row_done[static_cast<size_t>(i)]) continue;
                auto v = w.at(i, j).val();
                if (v && *v == vmin) j0 = j;
            }
        }
        for (int i = 0; i < r; ++i) {
            if (row_done[static_cast<size_t>(i)]) continue;
            auto v = w.at(i, j0).val();
            if (v && *v == vmin) i0 = i;  // keep the largest such row
        }

        // Normalize the pivot to exactly z^vmin (row scaling by a unit of I).
        LaurentSeries unit = ls_shift(w.at(i0, j0), -vmin);
        LaurentSeries uinv = ls_invert(unit, prec);
        for (int j = 0; j < r; ++j)
            if (!col_done[static_cast<size_t>(j)]) w.at(i0, j) = ls_mul(uinv, w.at(i0, j));
        w.at(i0, j0) = LaurentSeries::z_pow(g.ring, vmin);

        for (int i = 0; i < r; ++i) {
            if (i == i0 || row_done[static_cast<size_t>(i)]) continue;
            const LaurentSeries& x = w.at(i, j0);
            if (x.is_exact_zero() || x.known_zero()) continue;
            LaurentSeries c = ls_shift(x, -vmin);  // x / z^vmin
            for (int j = 0; j < r; ++j) {
                if (col_done[static_cast<size_t>(j)]) continue;
                w.at(i, j) = ls_sub(w.at(i, j), ls_mul(c, w.at(i0, j)));
            }
            w.at(i, j0) = LaurentSeries::exact_zero(g.ring);
        }
        for (int j = 0; j < r; ++j) {
            if (j == j0 || col_done[static_cast<size_t>(j)]) continue;
            // Column clearing only touches row i0 (its column j0 is clean now).
            w.at(i0, j) = LaurentSeries::exact_zero(g.ring);
        }
        row_done[static_cast<size_t>(i0)] = true;
        col_done[static_cast<size_t>(j0)] = true;
        lambda[static_cast<size_t>(i0)] = vmin;
        perm[static_cast<size_t>(j0)] = i0;
    }
    return AffineWeylElement{lambda, WeylElement::from_permutation(d, perm)};
}

/// kappa(b) = [hodge_polygon(b)] in pi_1; for GL_r this is v_z(det b) under
/// the coordinate-sum identification.
inline Pi1Class kottwitz_point(const SeriesMatrix& b, long long prec = 0) {
    const RootDatum& d = glr(b.r);
    return d.pi1_class(hodge_polygon(b, prec));
}

// ---------------------------------------------------------------------------
// Random sampling (deterministic Rng), used by the invariant suites and the
// perturbation probe.
// ---------------------------------------------------------------------------

/// Random integral series on the window [lo, prec).
inline LaurentSeries random_series(CoeffRing R, long long lo, long long prec, Rng& rng) {
    LaurentSeries f(R, lo, prec);
    for (long long k = lo; k < prec; ++k) f.set(k, r_random(R, rng));
    return f;
}

/// Random element of K = GL_r(F[[z]]): integral entries, unit determinant
/// mod z (resampled until the constant term is invertible).
inline SeriesMatrix random_k_element(CoeffRing R, int r, long long prec, Rng& rng) {
    require(R.is_field(), "sampling needs field coefficients");
    for (int attempt = 0; attempt < 256; ++attempt) {
        SeriesMatrix m(R, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) m.at(i, j) = random_series(R, 0, prec, rng);
        // determinant of the constant part over the field
        std::vector<std::uint32_t> cm(static_cast<size_t>(r) * r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) cm[static_cast<size_t>(i) * r + j] = m.at(i, j).at(0).c[0];
        // Gaussian elimination over F
        const FieldSpec* F = R.field;
        bool invertible = true;
        for (int t = 0; t < r && invertible; ++t) {
            int piv = -1;
            for (int i = t; i < r; ++i)
                if (cm[static_cast<size_t>(i) * r + t]) {
                    piv = i;
                    break;
                }
            if (piv < 0) {
                invertible = false;
                break;
            }
            for (int j = 0; j < r; ++j) std::swap(cm[static_cast<size_t>(piv) * r + j], cm[static_cast<size_t>(t) * r + j]);
            std::uint32_t pinv = F->inv(cm[static_cast<size_t>(t) * r + t]);
            for (int i = t + 1; i < r; ++i) {
                std::uint32_t f = F->mul(cm[static_cast<size_t>(i) * r + t], pinv);
                if (!f) continue;
                for (int j = 0; j < r; ++j)
                    cm[static_cast<size_t>(i) * r + j] = F->sub(
                        cm[static_cast<size_t>(i) * r + j], F->mul(f, cm[static_cast<size_t>(t) * r + j]));
            }
        }
        if (invertible) return m;
    }
    throw Error("random_k_element: failed to sample an invertible constant part");
}

/// Random Iwahori element: upper-triangular invertible mod z.
inline SeriesMatrix random_iwahori_element(CoeffRing R, int r, long long prec, Rng& rng) {
    SeriesMatrix m(R, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (i == j) {
                LaurentSeries f = random_series(R, 0, prec, rng);
                f.set(0, r_from_field(R.field->random_nonzero(rng)));
                m.at(i, j) = std::move(f);
            } else if (i < j) {
                m.at(i, j) = random_series(R, 0, prec, rng);
            } else {
                m.at(i, j) = random_series(R, 1, prec, rng);
            }
        }
    return m;
}

/// Random h in I_n = {g in K : g = 1 mod z^n, g in B mod z^{n+1}} (I_0 is the
/// Iwahori subgroup itself).
inline SeriesMatrix random_In_element(CoeffRing R, int r, int n, long long prec, Rng& rng) {
    require(n >= 0, "I_n needs n >= 0");
    if (n == 0) return random_iwahori_element(R, r, prec, rng);
    require(prec > n + 1, "I_n sampling needs precision beyond n+1");
    SeriesMatrix m = SeriesMatrix::identity(R, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            long long lo = (i <= j) ? n : n + 1;  // z^n coefficient must be upper-triangular
            LaurentSeries tail = random_series(R, lo, prec, rng);
            m.at(i, j) = ls_add(m.at(i, j).clamped(prec), tail);
        }
    return m;
}

/// Random invertible g with entries of valuation >= lo ("window-bounded").
inline SeriesMatrix random_window_matrix(CoeffRing R, int r, long long lo, long long prec,
                                         Rng& rng) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        SeriesMatrix m(R, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) m.at(i, j) = random_series(R, lo, prec, rng);
        try {
            auto dv = sm_det(m).val();
            if (dv) return m;
        } catch (const PrecisionError&) {
        }
    }
    throw Error("random_window_matrix: could not sample an invertible matrix");
}

}  // namespace shtuka
