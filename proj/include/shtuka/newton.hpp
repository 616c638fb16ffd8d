#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shtuka/root_datum.hpp"

namespace shtuka {

/// Cached GL_r data; handles stay valid for the program lifetime.
inline const RootDatum& glr(int r) {
    static std::map<int, RootDatum> cache;
    auto it = cache.find(r);
    if (it == cache.end()) it = cache.emplace(r, glr_datum(r)).first;
    return it->second;
}

// ---------------------------------------------------------------------------
// GL_r Newton points = descending rational slope vectors with integral
// polygon breakpoints. The polygon of nu is the graph of its partial sums.
// ---------------------------------------------------------------------------

inline bool glr_descending(const QVec& s) {
    for (size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] < s[i + 1]) return false;
    return true;
}

/// Slope multiset admissibility: each run of a slope d/h (lowest terms) must
/// have multiplicity divisible by h, equivalently all breakpoints integral.
inline bool glr_admissible(const QVec& s) {
    if (!glr_descending(s)) return false;
    size_t i = 0;
    while (i < s.size()) {
        size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        long long h = s[i].den;
        if ((static_cast<long long>(j - i)) % h != 0) return false;
        i = j;
    }
    return true;
}

/// nu <= mu for GL_r: all partial sums of nu below those of mu, equal total.
inline bool glr_dominance_leq(const QVec& nu, const QVec& mu) {
    require(nu.size() == mu.size(), "rank mismatch");
    Rational acc_n(0), acc_m(0);
    for (size_t k = 0; k < nu.size(); ++k) {
        acc_n += nu[k];
        acc_m += mu[k];
        if (k + 1 == nu.size()) {
            if (acc_n != acc_m) return false;
        } else if (acc_n > acc_m) {
            return false;
        }
    }
    return true;
}

/// def(b) for GL_r from the slope multiset: sum over slope runs of
/// n_j (1 - 1/h_j); zero exactly when all slopes are integral.
inline long long defect_glr(const QVec& slopes) {
    require(glr_admissible(slopes), "inadmissible Newton point for GL_r");
    long long def = 0;
    size_t i = 0;
    while (i < slopes.size()) {
        size_t j = i;
        while (j < slopes.size() && slopes[j] == slopes[i]) ++j;
        long long n = static_cast<long long>(j - i);
        long long h = slopes[i].den;
        def += n - n / h;
        i = j;
    }
    return def;
}

/// The basic (central) point with kappa = d: slopes (d/r, ..., d/r).
inline QVec basic_point(long long d, int r) {
    return QVec(static_cast<size_t>(r), Rational(d, r));
}

/// All admissible nu with nu <= mu (mu integral dominant), by depth-first
/// search over the integral vertices of concave polygons below mu's polygon.
/// Contains the basic point and mu itself; deterministic descending-lex order.
inline std::vector<QVec> newton_points_between(const IVec& mu, int r) {
    require(static_cast<int>(mu.size()) == r, "mu length mismatch");
    for (size_t i = 0; i + 1 < mu.size(); ++i)
        require(mu[i] >= mu[i + 1], "mu must be dominant (descending)");
    std::vector<long long> M(static_cast<size_t>(r) + 1, 0);
    for (int k = 0; k < r; ++k) M[static_cast<size_t>(k) + 1] = M[static_cast<size_t>(k)] + mu[static_cast<size_t>(k)];
    long long total = M[static_cast<size_t>(r)];

    std::vector<QVec> out;
    QVec cur;  // slopes collected so far
    // Vertices (x,y); slopes strictly decrease from segment to segment.
    auto dfs = [&](auto&& self, int x, long long y, std::optional<Rational> prev) -> void {
        if (x == r) {
            out.push_back(cur);
            return;
        }
        for (int x2 = x + 1; x2 <= r; ++x2) {
            long long w = x2 - x;
            // Upper bound: y2 <= M[x2], and slope strictly below prev.
            long long hi = M[static_cast<size_t>(x2)];
            if (prev) {
                // y2 < y + prev*w
                Rational bound = Rational(y) + *prev * Rational(w);
                long long b = bound.is_integer() ? bound.num - 1 : bound.floor();
                hi = std::min(hi, b);
            }
            long long lo;
            if (x2 == r) {
                lo = total;
                if (total > hi) continue;
            } else {
                // Completability: remaining rise total - y2 must be < s*(r-x2),
                // i.e. y2*(r-x) > w*total + (r-x2)*y.
                // lo = smallest integer strictly above the threshold.
                long long num = w * total + static_cast<long long>(r - x2) * y;
                long long den = r - x;
                long long q = num >= 0 ? num / den : -((-num + den - 1) / den);  // floor
                lo = q + 1;
            }
            for (long long y2 = lo; y2 <= hi; ++y2) {
                Rational s(y2 - y, w);
                size_t mark = cur.size();
                for (long long t = 0; t < w; ++t) cur.push_back(s);
                self(self, x2, y2, s);
                cur.resize(mark);
            }
        }
    };
    dfs(dfs, 0, 0, std::nullopt);
    std::sort(out.begin(), out.end(), [](const QVec& a, const QVec& b) {
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return b[i] < a[i];  // descending lex
        }
        return false;
    });
    return out;
}

/// Longest chain nu = nu_n < ... < nu_0 = mu inside the Newton poset of mu,
/// counted in edges. Brute-force longest path over the dominance DAG; the
/// closed ceiling formula is checked against this, never assumed.
inline long long longest_chain(const IVec& mu, const QVec& nu, int r) {
    auto nodes = newton_points_between(mu, r);
    QVec muq = to_qvec(mu);
    size_t target = nodes.size(), start = nodes.size();
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == muq) target = i;
        if (nodes[i] == nu) start = i;
    }
    require(target < nodes.size(), "mu missing from its own poset");
    if (start == nodes.size()) throw ValidationError("nu is not below mu in the Newton poset");
    std::vector<long long> best(nodes.size(), -1);
    best[target] = 0;
    auto visit = [&](auto&& self, size_t i) -> long long {
        if (best[i] >= 0) return best[i];
        long long b = -1;
        for (size_t j = 0; j < nodes.size(); ++j) {
            if (j == i) continue;
            if (glr_dominance_leq(nodes[i], nodes[j])) {
                long long up = self(self, j);
                if (up >= 0) b = std::max(b, 1 + up);
            }
        }
        // Every node below mu reaches mu (mu is the maximum), so b >= 0 here
        // unless i == target, handled above.
        return best[i] = b;
    };
    return visit(visit, start);
}

// ---------------------------------------------------------------------------
// General root-datum arithmetic around eq06.
// ---------------------------------------------------------------------------

/// sum_i ceil(<omega_i, mu - nu>) where omega_i are dual to the simple
/// coroots. Only the coefficients of mu - nu in the coroot basis enter, so no
/// choice of omega_i is ever materialized.
inline long long omega_ceil_sum(const RootDatum& d, const QVec& mu, const QVec& nu) {
    auto c = d.coroot_coordinates(qsub(mu, nu));
    if (!c)
        throw KappaMismatch("mu - nu is not in the Q-span of the simple coroots");
    long long s = 0;
    for (const auto& x : *c) s += x.ceil();
    return s;
}

/// Both sides of eq06: <2rho,mu> - sum ceil(<omega_i,mu-nu>) and
/// <rho,mu+nu> - def/2, as exact rationals, for GL_r.
inline std::pair<Rational, Rational> eq06_both_sides(const IVec& mu, const QVec& nu, int r) {
    const RootDatum& d = glr(r);
    QVec muq = to_qvec(mu);
    Rational lhs = Rational(d.pair_two_rho(mu)) - Rational(omega_ceil_sum(d, muq, nu));
    Rational rhs = d.pair_rho(qadd(muq, nu)) - Rational(defect_glr(nu), 2);
    return {lhs, rhs};
}

inline Pi1Class kottwitz_point(const RootDatum& d, const IVec& mu) { return d.pi1_class(mu); }

/// Mazur inequality nu <= mu in the rational dominance order.
inline bool mazur_check(const RootDatum& d, const QVec& nu, const QVec& mu) {
    return d.dominance_leq(nu, mu, /*integral=*/false);
}

struct SigmaClassInvariants {
    Pi1Class kappa;
    QVec newton;  // dominant
};

/// Kottwitz-Rapoport nonemptiness for split groups: kappa(b) = [mu] in pi_1
/// and nu_b <= mu.
inline bool nonempty_predicate(const RootDatum& d, const SigmaClassInvariants& inv,
                               const IVec& mu) {
    if (!(inv.kappa == d.pi1_class(mu))) return false;
    return mazur_check(d, inv.newton, to_qvec(mu));
}

/// Theorem-1.2 dimension for basic classes: <rho,mu> - def(b)/2. The rational
/// dominance nu <= mu already forces equal pi_1 images, so for GL_r the
/// nonemptiness criterion reduces to the Mazur check.
inline Rational dim_formula_basic(const IVec& mu, const QVec& nu_basic, int r) {
    for (size_t i = 0; i + 1 < nu_basic.size(); ++i)
        require(nu_basic[i] == nu_basic[i + 1], "nu must be central (basic)");
    const RootDatum& d = glr(r);
    if (!mazur_check(d, nu_basic, to_qvec(mu)))
        throw EmptyStratum("X_{<=mu}(b) is empty for this (mu, nu)");
    return d.pair_rho(to_qvec(mu)) - Rational(defect_glr(nu_basic), 2);
}

}  // namespace shtuka
