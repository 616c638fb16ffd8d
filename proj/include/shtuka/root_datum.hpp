#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "shtuka/util.hpp"

namespace shtuka {

using IVec = std::vector<long long>;
using IMat = std::vector<IVec>;
using QVec = std::vector<Rational>;

inline long long dot(const IVec& a, const IVec& b) {
    long long s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline QVec to_qvec(const IVec& a) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Rational(a[i]);
    return r;
}

inline QVec qsub(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline QVec qadd(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Rational qdot_int(const IVec& a, const QVec& b) {
    Rational s(0);
    for (size_t i = 0; i < a.size(); ++i) s += Rational(a[i]) * b[i];
    return s;
}

/// Class in pi_1(G) = X_*(T) / (coroot lattice), in the canonical coordinates
/// derived from the Smith normal form of the coroot matrix: torsion slots
/// carry their modulus d_i >= 2, free slots have modulus 0.
struct Pi1Class {
    std::vector<long long> coords;
    std::vector<long long> moduli;

    bool operator==(const Pi1Class& o) const { return coords == o.coords && moduli == o.moduli; }
    bool operator!=(const Pi1Class& o) const { return !(*this == o); }

    bool is_zero() const {
        for (auto c : coords)
            if (c != 0) return false;
        return true;
    }

    std::string str() const {
        std::string s = "(";
        for (size_t i = 0; i < coords.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(coords[i]);
            if (moduli[i]) s += " mod " + std::to_string(moduli[i]);
        }
        return s + ")";
    }
};

namespace detail {

// Integer Smith normal form U*M*V = diag(d_1..d_s, 0...), tracking U only.
// Matrices here are at most 9x9 with tiny entries.
struct SnfResult {
    IMat U;                 // n x n unimodular
    std::vector<long long> diag;  // d_1 | d_2 | ... | d_s, all >= 1
};

inline SnfResult smith_normal_form(IMat A) {
    size_t n = A.size();
    size_t k = n ? A[0].size() : 0;
    IMat U(n, IVec(n, 0));
    for (size_t i = 0; i < n; ++i) U[i][i] = 1;

    auto row_sub = [&](size_t dst, size_t src, long long c) {
        for (size_t j = 0; j < k; ++j) A[dst][j] -= c * A[src][j];
        for (size_t j = 0; j < n; ++j) U[dst][j] -= c * U[src][j];
    };
    auto col_sub = [&](size_t dst, size_t src, long long c) {
        for (size_t i = 0; i < n; ++i) A[i][dst] -= c * A[i][src];
    };

    std::vector<long long> diag;
    size_t t = 0;
    while (t < n && t < k) {
        // Minimal nonzero |entry| in the trailing submatrix.
        size_t pi = t, pj = t;
        long long best = 0;
        for (size_t i = t; i < n; ++i)
            for (size_t j = t; j < k; ++j) {
                long long v = A[i][j] < 0 ? -A[i][j] : A[i][j];
                if (v != 0 && (best == 0 || v < best)) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break;
        std::swap(A[t], A[pi]);
        std::swap(U[t], U[pi]);
        for (size_t i = 0; i < n; ++i) std::swap(A[i][t], A[i][pj]);

        bool clean = true;
        for (size_t i = t + 1; i < n; ++i)
            if (A[i][t] != 0) {
                row_sub(i, t, A[i][t] / A[t][t]);
                if (A[i][t] != 0) clean = false;
            }
        for (size_t j = t + 1; j < k; ++j)
            if (A[t][j] != 0) {
                col_sub(j, t, A[t][j] / A[t][t]);
                if (A[t][j] != 0) clean = false;
            }
        if (!clean) continue;

        // Divisibility chain: fold any non-multiple into the pivot's row.
        bool fixed = false;
        for (size_t i = t + 1; i < n && !fixed; ++i)
            for (size_t j = t + 1; j < k && !fixed; ++j)
                if (A[i][j] % A[t][t] != 0) {
                    row_sub(t, i, -1);  // row_t += row_i
                    fixed = true;
                }
        if (fixed) continue;

        if (A[t][t] < 0) {
            for (size_t j = 0; j < k; ++j) A[t][j] = -A[t][j];
            for (size_t j = 0; j < n; ++j) U[t][j] = -U[t][j];
        }
        diag.push_back(A[t][t]);
        ++t;
    }
    return SnfResult{std::move(U), std::move(diag)};
}

/// Row Hermite normal form (canonical basis of the row space; positive pivots,
/// entries above a pivot reduced into [0, pivot)).
inline IMat row_hnf(IMat A) {
    size_t n = A.size();
    if (n == 0) return A;
    size_t m = A[0].size();
    size_t r = 0;
    for (size_t c = 0; c < m && r < n; ++c) {
        // Euclid the column below r into a single pivot.
        while (true) {
            size_t nz = n;
            long long best = 0;
            for (size_t i = r; i < n; ++i) {
                long long v = A[i][c] < 0 ? -A[i][c] : A[i][c];
                if (v && (best == 0 || v < best)) {
                    best = v;
                    nz = i;
                }
            }
            if (nz == n) break;  // column clear
            std::swap(A[r], A[nz]);
            bool done = true;
            for (size_t i = r + 1; i < n; ++i)
                if (A[i][c]) {
                    long long q = A[i][c] / A[r][c];
                    for (size_t j = 0; j < m; ++j) A[i][j] -= q * A[r][j];
                    if (A[i][c]) done = false;
                }
            if (done) break;
        }
        if (A[r][c] == 0) continue;
        if (A[r][c] < 0)
            for (size_t j = 0; j < m; ++j) A[r][j] = -A[r][j];
        for (size_t i = 0; i < r; ++i) {
            long long q = A[i][c] / A[r][c];
            if (A[i][c] % A[r][c] < 0) --q;  // reduce into [0, pivot)
            if (q)
                for (size_t j = 0; j < m; ++j) A[i][j] -= q * A[r][j];
        }
        ++r;
    }
    A.resize(r);
    return A;
}

inline long long int_det(IMat a) {
    // Fraction-free Gaussian elimination (Bareiss) on small integer matrices.
    size_t n = a.size();
    long long sign = 1, prev = 1;
    for (size_t t = 0; t < n; ++t) {
        size_t piv = t;
        while (piv < n && a[piv][t] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != t) {
            std::swap(a[piv], a[t]);
            sign = -sign;
        }
        for (size_t i = t + 1; i < n; ++i)
            for (size_t j = t + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) / prev;
        prev = a[t][t];
    }
    return sign * a[n - 1][n - 1];
}

}  // namespace detail

/// Split reductive root datum: simple roots/coroots in Z^n, the generated
/// positive system, 2*rho, and the pi_1 presentation. Frozen after
/// construction; safe to share read-only.
class RootDatum {
  public:
    int rank = 0;
    IMat simple_roots;     // rows in X^*(T) = Z^n
    IMat simple_coroots;   // rows in X_*(T) = Z^n
    IMat positive_roots;
    IMat positive_coroots;  // positive_coroots[i] is the coroot of positive_roots[i]
    IVec two_rho;           // sum of positive roots
    IVec two_rho_cov;       // sum of positive coroots; <alpha, 2rho_cov> > 0 iff alpha > 0
    IMat cartan;            // <alpha_i, alpha_j^vee>
    std::string name;       // optional builtin tag

    static RootDatum from_simple(IMat roots, IMat coroots, std::string name = "");

    /// A split torus of the given rank: no roots, pi_1 = Z^n.
    static RootDatum torus(int n, std::string name = "") {
        RootDatum d;
        d.rank = n;
        d.name = std::move(name);
        d.two_rho.assign(static_cast<size_t>(n), 0);
        d.two_rho_cov.assign(static_cast<size_t>(n), 0);
        d.free_rows_.assign(static_cast<size_t>(n), IVec(static_cast<size_t>(n), 0));
        for (int i = 0; i < n; ++i) d.free_rows_[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
        return d;
    }

    size_t num_simple() const { return simple_roots.size(); }

    long long pair_two_rho(const IVec& cw) const { return dot(two_rho, cw); }
    Rational pair_rho(const QVec& cw) const {
        Rational s(0);
        for (size_t i = 0; i < cw.size(); ++i) s += Rational(two_rho[i]) * cw[i];
        return s / Rational(2);
    }

    bool is_dominant(const IVec& cw) const {
        for (const auto& a : simple_roots)
            if (dot(a, cw) < 0) return false;
        return true;
    }
    bool is_dominant(const QVec& cw) const {
        for (const auto& a : simple_roots)
            if (qdot_int(a, cw) < Rational(0)) return false;
        return true;
    }

    /// Solve target = sum c_j * coroot_j exactly over Q; nullopt if target is
    /// outside the coroot span.
    std::optional<QVec> coroot_coordinates(const QVec& target) const;

    /// mu1 <= mu2 in the dominance order (integral or rational flavor).
    bool dominance_leq(const QVec& a, const QVec& b, bool integral) const {
        auto c = coroot_coordinates(qsub(b, a));
        if (!c) return false;
        for (const auto& x : *c) {
            if (x < Rational(0)) return false;
            if (integral && !x.is_integer()) return false;
        }
        return true;
    }
    bool dominance_leq(const IVec& a, const IVec& b) const {
        return dominance_leq(to_qvec(a), to_qvec(b), true);
    }

    IVec reflect_coweight(size_t j, const IVec& v) const {
        long long c = dot(simple_roots[j], v);
        IVec r = v;
        for (int i = 0; i < rank; ++i) r[i] -= c * simple_coroots[j][i];
        return r;
    }
    QVec reflect_coweight(size_t j, const QVec& v) const {
        Rational c = qdot_int(simple_roots[j], v);
        QVec r = v;
        for (int i = 0; i < rank; ++i) r[i] -= c * Rational(simple_coroots[j][i]);
        return r;
    }

    /// The unique dominant element of the Weyl orbit (repeated reflection on
    /// the smallest negative pairing; terminates).
    template <typename Vec>
    Vec dominant_rep(Vec v) const {
        while (true) {
            bool moved = false;
            for (size_t j = 0; j < num_simple(); ++j) {
                bool neg;
                if constexpr (std::is_same_v<Vec, IVec>)
                    neg = dot(simple_roots[j], v) < 0;
                else
                    neg = qdot_int(simple_roots[j], v) < Rational(0);
                if (neg) {
                    v = reflect_coweight(j, v);
                    moved = true;
                    break;
                }
            }
            if (!moved) return v;
        }
    }

    /// Full Weyl orbit by BFS with visited-set hashing.
    std::vector<IVec> weyl_orbit(const IVec& v, size_t cap = 2000000) const {
        std::set<IVec> seen{v};
        std::vector<IVec> queue{v};
        for (size_t h = 0; h < queue.size(); ++h) {
            for (size_t j = 0; j < num_simple(); ++j) {
                IVec w = reflect_coweight(j, queue[h]);
                if (seen.insert(w).second) {
                    queue.push_back(w);
                    require(queue.size() <= cap, "Weyl orbit exceeds cap");
                }
            }
        }
        return queue;
    }

    Pi1Class pi1_class(const IVec& coweight) const {
        Pi1Class c;
        for (size_t idx = 0; idx < torsion_rows_.size(); ++idx) {
            long long d = torsion_moduli_[idx];
            long long y = dot(torsion_rows_[idx], coweight) % d;
            if (y < 0) y += d;
            c.coords.push_back(y);
            c.moduli.push_back(d);
        }
        for (const auto& row : free_rows_) {
            c.coords.push_back(dot(row, coweight));
            c.moduli.push_back(0);
        }
        return c;
    }

    Pi1Class pi1_add(const Pi1Class& a, const Pi1Class& b) const {
        Pi1Class c = a;
        for (size_t i = 0; i < c.coords.size(); ++i) {
            c.coords[i] += b.coords[i];
            if (c.moduli[i]) c.coords[i] %= c.moduli[i];
        }
        return c;
    }

  private:
    // pi_1 presentation: functionals on X_*(T).
    IMat torsion_rows_;
    std::vector<long long> torsion_moduli_;
    IMat free_rows_;  // canonical row-HNF basis

    void build_pi1();
};

inline std::optional<QVec> RootDatum::coroot_coordinates(const QVec& target) const {
    size_t k = num_simple();
    size_t n = static_cast<size_t>(rank);
    // Columns = simple coroots; rational Gaussian elimination on [M | target].
    std::vector<QVec> m(n, QVec(k + 1));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < k; ++j) m[i][j] = Rational(simple_coroots[j][i]);
        m[i][k] = target[i];
    }
    std::vector<size_t> pivot_col_of_row;
    size_t row = 0;
    for (size_t col = 0; col < k && row < n; ++col) {
        size_t p = row;
        while (p < n && m[p][col] == Rational(0)) ++p;
        if (p == n) continue;
        std::swap(m[p], m[row]);
        Rational inv = Rational(1) / m[row][col];
        for (size_t j = col; j <= k; ++j) m[row][j] = m[row][j] * inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == row) continue;
            Rational f = m[i][col];
            if (f == Rational(0)) continue;
            for (size_t j = col; j <= k; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }
    for (size_t i = row; i < n; ++i)
        if (m[i][k] != Rational(0)) return std::nullopt;  // inconsistent
    QVec c(k, Rational(0));
    for (size_t i = 0; i < row; ++i) c[pivot_col_of_row[i]] = m[i][k];
    // Simple coroots of a finite-type datum are linearly independent, so the
    // solution is unique when it exists.
    return c;
}

inline void RootDatum::build_pi1() {
    size_t n = static_cast<size_t>(rank);
    size_t k = num_simple();
    IMat M(n, IVec(k, 0));
    for (size_t j = 0; j < k; ++j)
        for (size_t i = 0; i < n; ++i) M[i][j] = simple_coroots[j][i];
    auto snf = detail::smith_normal_form(M);
    size_t s = snf.diag.size();
    for (size_t i = 0; i < s; ++i) {
        if (snf.diag[i] >= 2) {
            torsion_rows_.push_back(snf.U[i]);
            torsion_moduli_.push_back(snf.diag[i]);
        }
    }
    IMat free(snf.U.begin() + static_cast<long>(s), snf.U.end());
    free_rows_ = detail::row_hnf(std::move(free));
}

inline RootDatum RootDatum::from_simple(IMat roots, IMat coroots, std::string name) {
    RootDatum d;
    d.name = std::move(name);
    require(roots.size() == coroots.size(), "need equally many simple roots and coroots");
    size_t k = roots.size();
    size_t n = k ? roots[0].size() : 0;
    if (k == 0) throw ValidationError("use RootDatum::torus for data without simple roots");
    for (const auto& r : roots) require(r.size() == n, "simple root length mismatch");
    for (const auto& c : coroots) require(c.size() == n, "simple coroot length mismatch");
    d.rank = static_cast<int>(n);
    d.simple_roots = roots;
    d.simple_coroots = coroots;

    // Generalized Cartan matrix of finite type: diagonal 2, off-diagonal <= 0
    // with matching zero pattern, and every principal minor positive.
    d.cartan.assign(k, IVec(k, 0));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) d.cartan[i][j] = dot(roots[i], coroots[j]);
    for (size_t i = 0; i < k; ++i) {
        require(d.cartan[i][i] == 2, "Cartan diagonal must be 2");
        for (size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            require(d.cartan[i][j] <= 0, "Cartan off-diagonal must be <= 0");
            require((d.cartan[i][j] == 0) == (d.cartan[j][i] == 0),
                    "Cartan zero pattern must be symmetric");
        }
    }
    require(k <= 9, "rank cap exceeded");
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        IMat sub(idx.size(), IVec(idx.size()));
        for (size_t a = 0; a < idx.size(); ++a)
            for (size_t b = 0; b < idx.size(); ++b) sub[a][b] = d.cartan[idx[a]][idx[b]];
        if (detail::int_det(sub) <= 0)
            throw ValidationError(
                "pairing matrix is not of finite type (nonpositive principal minor); "
                "refusing the closure loop");
    }

    // Closure of the simple roots under simple reflections, tracked as
    // (ambient root, simple-root coefficients, ambient coroot).
    struct Entry {
        IVec root, coeffs, coroot;
    };
    std::vector<Entry> pos;
    std::set<IVec> seen;
    for (size_t i = 0; i < k; ++i) {
        IVec c(k, 0);
        c[i] = 1;
        pos.push_back({roots[i], c, coroots[i]});
        seen.insert(roots[i]);
    }
    for (size_t h = 0; h < pos.size(); ++h) {
        for (size_t j = 0; j < k; ++j) {
            long long cj = dot(pos[h].root, coroots[j]);
            IVec nr = pos[h].root, nc = pos[h].coeffs, ncv = pos[h].coroot;
            for (size_t t = 0; t < n; ++t) nr[t] -= cj * roots[j][t];
            nc[j] -= cj;
            long long cj2 = dot(roots[j], pos[h].coroot);
            for (size_t t = 0; t < n; ++t) ncv[t] -= cj2 * coroots[j][t];
            bool positive = true;
            for (auto x : nc)
                if (x < 0) positive = false;
            if (!positive) continue;
            if (seen.insert(nr).second) {
                pos.push_back({nr, nc, ncv});
                require(pos.size() <= 4096, "root closure runaway");
            }
        }
    }
    // Deterministic order: graded lex by height, then by coordinates.
    std::sort(pos.begin(), pos.end(), [](const Entry& a, const Entry& b) {
        long long ha = 0, hb = 0;
        for (auto x : a.coeffs) ha += x;
        for (auto x : b.coeffs) hb += x;
        if (ha != hb) return ha < hb;
        return a.root < b.root;
    });
    d.two_rho.assign(n, 0);
    d.two_rho_cov.assign(n, 0);
    for (const auto& e : pos) {
        d.positive_roots.push_back(e.root);
        d.positive_coroots.push_back(e.coroot);
        for (size_t t = 0; t < n; ++t) {
            d.two_rho[t] += e.root[t];
            d.two_rho_cov[t] += e.coroot[t];
        }
    }
    for (size_t j = 0; j < k; ++j)
        if (dot(d.two_rho, coroots[j]) != 2)
            throw Error("internal: <2rho, alpha_j^vee> != 2 after closure");

    d.build_pi1();
    return d;
}

/// GL_r: X_* = Z^r, simple (co)roots e_i - e_{i+1}. GL_1 degenerates to the
/// rank-one torus.
inline RootDatum glr_datum(int r) {
    require(r >= 1, "GL_r needs r >= 1");
    if (r == 1) return RootDatum::torus(1, "GL1");
    IMat roots, coroots;
    for (int i = 0; i + 1 < r; ++i) {
        IVec v(static_cast<size_t>(r), 0);
        v[static_cast<size_t>(i)] = 1;
        v[static_cast<size_t>(i) + 1] = -1;
        roots.push_back(v);
        coroots.push_back(v);
    }
    return RootDatum::from_simple(roots, coroots, "GL" + std::to_string(r));
}

}  // namespace shtuka
