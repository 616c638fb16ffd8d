#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shtuka/series_matrix.hpp"

namespace shtuka {

/// A coset gK in the window z^N L0 <= L <= z^{-N} L0, represented by its
/// canonical column Hermite normal form: upper triangular, diagonal z^{a_i},
/// entry (i,j) for i<j a Laurent polynomial supported on [-N, a_i).
struct LatticeRep {
    SeriesMatrix m;  // exact entries
    IVec hnf_diag;
    IVec type;  // elementary divisors, descending
};

struct Budget {
    unsigned long long max_lattices = 4'000'000;

    static Budget from_env() {
        Budget b;
        if (const char* e = std::getenv("SHTUKA_BUDGET")) {
            long long v = std::atoll(e);
            if (v > 0) b.max_lattices = static_cast<unsigned long long>(v);
        }
        return b;
    }
};

/// Cardinality of the raw HNF candidate set (before the window filter).
inline unsigned long long window_candidate_estimate(int r, int N, unsigned long long qm) {
    std::vector<long long> diag(static_cast<size_t>(r), -N);
    unsigned long long total = 0;
    while (true) {
        unsigned long long prod = 1;
        bool overflow = false;
        for (int i = 0; i < r && !overflow; ++i)
            for (int j = i + 1; j < r && !overflow; ++j) {
                long long lo = (r == 2) ? std::max<long long>(-N, diag[0] + diag[1] - N) : -N;
                long long len = diag[static_cast<size_t>(i)] - lo;
                if (len < 0) len = 0;
                for (long long t = 0; t < len; ++t) {
                    if (prod > (1ULL << 62) / qm) {
                        overflow = true;
                        break;
                    }
                    prod *= qm;
                }
            }
        total += overflow ? (1ULL << 62) : prod;
        if (total >= (1ULL << 62)) return 1ULL << 62;
        int k = 0;
        while (k < r && diag[static_cast<size_t>(k)] == N) diag[static_cast<size_t>(k++)] = -N;
        if (k == r) break;
        ++diag[static_cast<size_t>(k)];
    }
    return total;
}

/// Visit every lattice in the window exactly once (canonical HNF reps).
/// Candidates are generated per diagonal type with entry-exact coefficient
/// ranges for r = 2 and filtered by the elementary-divisor window condition
/// for r >= 3. Throws BudgetExceeded up front with the estimated cardinality.
inline void for_each_window_lattice(CoeffRing R, int r, int N, const Budget& budget,
                                    const std::function<void(const LatticeRep&)>& fn) {
    require(R.is_field(), "lattice enumeration needs field coefficients");
    require(r >= 1 && r <= 4, "full enumeration supports r <= 4");
    require(N >= 0, "window must be nonnegative");
    unsigned long long est = window_candidate_estimate(r, N, R.field->order);
    if (est > budget.max_lattices)
        throw BudgetExceeded("window enumeration would visit ~" + std::to_string(est) +
                             " candidates (budget " + std::to_string(budget.max_lattices) +
                             "; raise SHTUKA_BUDGET or --max-lattices)");

    long long hodge_prec = 2 * r * (2LL * N + 1) + 4;
    std::vector<long long> diag(static_cast<size_t>(r), -N);
    while (true) {
        // Off-diagonal slots for this diagonal type.
        struct Slot {
            int i, j;
            long long lo, len;  // exponents [lo, lo+len)
        };
        std::vector<Slot> slots;
        unsigned long long combos = 1;
        bool too_many = false;
        for (int i = 0; i < r; ++i)
            for (int j = i + 1; j < r; ++j) {
                long long lo = (r == 2) ? std::max<long long>(-N, diag[0] + diag[1] - N)
                                        : -static_cast<long long>(N);
                long long len = diag[static_cast<size_t>(i)] - lo;
                if (len < 0) len = 0;
                slots.push_back({i, j, lo, len});
                for (long long t = 0; t < len; ++t) {
                    if (combos > (1ULL << 62) / R.field->order) too_many = true;
                    if (too_many) break;
                    combos *= R.field->order;
                }
            }
        require(!too_many, "internal: per-type candidate count overflow");

        // Odometer over all coefficient assignments.
        long long total_coeffs = 0;
        for (const auto& s : slots) total_coeffs += s.len;
        std::vector<std::uint32_t> digits(static_cast<size_t>(total_coeffs), 0);
        while (true) {
            LatticeRep rep;
            rep.m = SeriesMatrix(R, r);
            for (int i = 0; i < r; ++i)
                rep.m.at(i, i) = LaurentSeries::z_pow(R, diag[static_cast<size_t>(i)]);
            size_t pos = 0;
            for (const auto& s : slots) {
                if (s.len > 0) {
                    LaurentSeries f(R, s.lo, s.lo + s.len, true);
                    for (long long t = 0; t < s.len; ++t)
                        f.set(s.lo + t, r_from_field(digits[pos + static_cast<size_t>(t)]));
                    rep.m.at(s.i, s.j) = f.trimmed();
                }
                pos += static_cast<size_t>(s.len);
            }
            rep.hnf_diag = diag;
            rep.type = hodge_polygon(rep.m, hodge_prec);
            bool in_window = true;
            for (auto e : rep.type)
                if (e > N || e < -N) in_window = false;
            if (in_window) fn(rep);

            // advance odometer
            size_t k = 0;
            while (k < digits.size() && digits[k] + 1 == R.field->order) digits[k++] = 0;
            if (k == digits.size()) break;
            ++digits[k];
        }

        int k = 0;
        while (k < r && diag[static_cast<size_t>(k)] == N) diag[static_cast<size_t>(k++)] = -N;
        if (k == r) break;
        ++diag[static_cast<size_t>(k)];
    }
}

inline std::vector<LatticeRep> enumerate_window_lattices(CoeffRing R, int r, int N,
                                                         const Budget& budget = Budget::from_env()) {
    std::vector<LatticeRep> out;
    for_each_window_lattice(R, r, N, budget, [&](const LatticeRep& L) { out.push_back(L); });
    return out;
}

// ---------------------------------------------------------------------------
// Fixtures that sweep over m must embed into every F_{q^m}; prime-field
// integer coefficients do so canonically.
// ---------------------------------------------------------------------------

/// Matrix with prime-field coefficients, realizable over any extension.
struct MatrixTemplate {
    int r = 0;
    int s = 1;  // declared sigma-stable subfield F_{q^s}
    int eps = 1;
    std::vector<std::map<long long, long long>> entries;  // row-major exp -> integer
    std::string name;

    SeriesMatrix realize(CoeffRing R) const {
        require(R.eps == eps, "fixture expects eps order " + std::to_string(eps));
        SeriesMatrix m(R, r);
        m.subfield_s = s;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                const auto& ent = entries[static_cast<size_t>(i) * r + j];
                if (ent.empty()) continue;
                long long lo = ent.begin()->first, hi = ent.rbegin()->first + 1;
                LaurentSeries f(R, lo, hi, true);
                for (auto [k, v] : ent) f.set(k, r_from_field(R.field->from_int(v)));
                m.at(i, j) = f.trimmed();
            }
        return m;
    }
};

/// Built-in fixture presets (CLI names).
inline MatrixTemplate preset_fixture(const std::string& name) {
    MatrixTemplate t;
    t.name = name;
    auto E = [&](int r) {
        t.r = r;
        t.entries.assign(static_cast<size_t>(r) * r, {});
    };
    if (name == "superbasic2") {
        E(2);
        t.entries[1][1] = 1;  // z at (0,1)
        t.entries[2][0] = 1;  // 1 at (1,0)
    } else if (name == "split2") {
        E(2);
        t.entries[0][1] = 1;
        t.entries[3][0] = 1;
    } else if (name == "central2") {
        E(2);
        t.entries[0][1] = 1;
        t.entries[3][1] = 1;
    } else if (name == "superbasic3") {
        E(3);
        t.entries[2][1] = 1;  // z at (0,2)
        t.entries[3][0] = 1;  // 1 at (1,0)
        t.entries[7][0] = 1;  // 1 at (2,1)
    } else if (name == "exunbounded") {
        // GL_1 over F_q[eps]/(eps^2): b = 1 + eps z^{-1}; the eps part is
        // encoded by realize_dual below.
        E(1);
        t.eps = 2;
        t.entries[0][0] = 1;
    } else if (name == "exdefospnotsmooth") {
        // GL_2 over F_q[eps]/(eps^2): diag(z, z - 2 eps).
        E(2);
        t.eps = 2;
        t.entries[0][1] = 1;
        t.entries[3][1] = 1;
    } else {
        throw ValidationError("unknown fixture preset '" + name + "'");
    }
    return t;
}

/// The two dual-number paper fixtures need their eps parts filled in by hand.
inline SeriesMatrix realize_preset(const std::string& name, CoeffRing R) {
    MatrixTemplate t = preset_fixture(name);
    SeriesMatrix m = t.realize(R);
    if (name == "exunbounded") {
        LaurentSeries f(R, -1, 1, true);
        f.set(-1, r_eps(R));
        f.set(0, r_one());
        m.at(0, 0) = f;
    } else if (name == "exdefospnotsmooth") {
        // z - 2 eps at (1,1)
        LaurentSeries f(R, 0, 2, true);
        RElem minus2eps = r_neg(R, r_add(R, r_eps(R), r_eps(R)));
        f.set(0, minus2eps);
        f.set(1, r_one());
        m.at(1, 1) = f;
    }
    return m;
}

// ---------------------------------------------------------------------------
// ADLV counting.
// ---------------------------------------------------------------------------

struct CountTable {
    std::string fixture;
    std::string level;  // "K" or "I"
    int r = 0;
    long long q = 0;
    IVec mu;  // bound (hyperspecial level); Iwahori level stores x instead
    std::string x_str;
    int window = 0;
    int s = 1;
    std::vector<int> m_values;
    std::map<IVec, std::map<int, unsigned long long>> strata;  // stratum -> m -> count
    std::map<int, unsigned long long> rejected;                // mu' not <= mu
    std::map<int, unsigned long long> mazur_violations;        // must stay zero
    std::map<int, unsigned long long> scanned;                 // lattices visited
};

/// GL_r dominance on integral vectors via partial sums.
inline bool glr_leq_int(const IVec& a, const IVec& b) {
    long long sa = 0, sb = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        sa += a[k];
        sb += b[k];
        if (k + 1 == a.size()) return sa == sb;
        if (sa > sb) return false;
    }
    return true;
}

/// Single-field stratum counts for X_{<=mu}(b) at hyperspecial level.
inline void adlv_count_single(const SeriesMatrix& b, const QVec& nu_b, const IVec& mu, int N,
                              int m_key, const Budget& budget, CountTable& out) {
    CoeffRing R = b.ring;
    long long mu_abs = 0;
    for (auto x : mu) mu_abs += x < 0 ? -x : x;
    long long prec = 2 * b.r * (N + mu_abs) + 4;
    SeriesMatrix bc = b.clamped(prec);
    for_each_window_lattice(R, b.r, N, budget, [&](const LatticeRep& L) {
        out.scanned[m_key]++;
        SeriesMatrix h = sm_mul(sm_mul(sm_invert(L.m, prec), bc), sm_frobenius(L.m));
        IVec mu_prime = hodge_polygon(h, prec);
        QVec mu_prime_q = to_qvec(mu_prime);
        if (!glr_dominance_leq(nu_b, mu_prime_q)) {
            out.mazur_violations[m_key]++;
            return;
        }
        if (glr_leq_int(mu_prime, mu))
            out.strata[mu_prime][m_key]++;
        else
            out.rejected[m_key]++;
    });
}

/// Sweep over m: stratified point counts of X_{<=mu}(b)(F_{q^m}) in the window.
inline CountTable adlv_stratum_counts(const MatrixTemplate& tmpl, const IVec& mu, int N,
                                      long long q, const std::vector<int>& m_values,
                                      const Budget& budget = Budget::from_env()) {
    require(tmpl.eps == 1, "ADLV counting needs field fixtures");
    CountTable out;
    out.fixture = tmpl.name;
    out.level = "K";
    out.r = tmpl.r;
    out.q = q;
    out.mu = mu;
    out.window = N;
    out.s = tmpl.s;
    out.m_values = m_values;
    for (int m : m_values) {
        require(m >= 1, "m must be >= 1");
        if (m % tmpl.s != 0)
            throw ValidationError("fixture lives in F_{q^" + std::to_string(tmpl.s) +
                                  "}: need s | m, got m = " + std::to_string(m));
        CoeffRing R = field_ring(make_fqm(q, m));
        SeriesMatrix b = tmpl.realize(R);
        QVec nu_b = newton_point(b, tmpl.s);
        adlv_count_single(b, nu_b, mu, N, m, budget, out);
    }
    return out;
}

/// Schubert-cell counts: lattices per elementary-divisor type in the window.
inline CountTable schubert_counts(int r, int N, long long q, const std::vector<int>& m_values,
                                  const Budget& budget = Budget::from_env()) {
    CountTable out;
    out.fixture = "";
    out.level = "Gr";
    out.r = r;
    out.q = q;
    out.window = N;
    out.m_values = m_values;
    for (int m : m_values) {
        CoeffRing R = field_ring(make_fqm(q, m));
        for_each_window_lattice(R, r, N, budget, [&](const LatticeRep& L) {
            out.scanned[m]++;
            out.strata[L.type][m]++;
        });
    }
    return out;
}

/// Least-squares growth exponent of log_q(count) against m, with the nearest
/// integer verdict and the fit residual |slope - verdict|.
struct DimensionEstimate {
    double slope = 0;
    long long verdict = 0;
    double residual = 0;
    bool nonconverged = false;
};

inline DimensionEstimate dimension_estimate(const std::map<int, unsigned long long>& counts,
                                            long long q) {
    std::vector<std::pair<int, double>> pts;
    for (auto [m, c] : counts)
        if (c > 0) pts.push_back({m, std::log(static_cast<double>(c)) / std::log(static_cast<double>(q))});
    if (pts.size() < 3)
        throw EmptyStratum("dimension estimate needs >= 3 positive counts, have " +
                           std::to_string(pts.size()));
    double n = static_cast<double>(pts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [m, y] : pts) {
        sx += m;
        sy += y;
        sxx += static_cast<double>(m) * m;
        sxy += m * y;
    }
    DimensionEstimate e;
    e.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    e.verdict = std::llround(e.slope);
    e.residual = std::abs(e.slope - static_cast<double>(e.verdict));
    e.nonconverged = e.residual > 0.15;
    return e;
}

// ---------------------------------------------------------------------------
// Iwahori level (GL_2): cosets gI = (lattice, line in L/zL).
// ---------------------------------------------------------------------------

/// K/I coset representatives for GL_2: [[1,0],[c,1]] for c in F and the
/// antidiagonal swap (projective normalization of the line).
inline std::vector<SeriesMatrix> gl2_line_reps(CoeffRing R) {
    std::vector<SeriesMatrix> reps;
    for (std::uint32_t c = 0; c < R.field->order; ++c) {
        SeriesMatrix k = SeriesMatrix::identity(R, 2);
        if (c) k.at(1, 0) = LaurentSeries::constant(R, r_from_field(c));
        reps.push_back(std::move(k));
    }
    SeriesMatrix w(R, 2);
    w.at(0, 1) = LaurentSeries::z_pow(R, 0);
    w.at(1, 0) = LaurentSeries::z_pow(R, 0);
    reps.push_back(std::move(w));
    return reps;
}

inline CountTable adlv_iwahori_counts(const MatrixTemplate& tmpl, const AffineWeylElement& x,
                                      int N, long long q, const std::vector<int>& m_values,
                                      const Budget& budget = Budget::from_env()) {
    if (tmpl.r != 2) throw Unsupported("Iwahori-level enumeration is implemented for GL_2 only");
    CountTable out;
    out.fixture = tmpl.name;
    out.level = "I";
    out.r = 2;
    out.q = q;
    out.window = N;
    out.s = tmpl.s;
    out.x_str = x.str();
    out.m_values = m_values;
    IVec key = x.translation;  // stratum key: the single x
    long long mu_abs = 0;
    for (auto v : x.translation) mu_abs += v < 0 ? -v : v;
    long long prec = 2 * 2 * (N + mu_abs + 1) + 6;
    for (int m : m_values) {
        if (m % tmpl.s != 0)
            throw ValidationError("fixture needs s | m");
        CoeffRing R = field_ring(make_fqm(q, m));
        SeriesMatrix b = tmpl.realize(R).clamped(prec);
        auto lines = gl2_line_reps(R);
        for_each_window_lattice(R, 2, N, budget, [&](const LatticeRep& L) {
            for (const auto& k : lines) {
                out.scanned[m]++;
                SeriesMatrix g = sm_mul(L.m, k);
                SeriesMatrix h = sm_mul(sm_mul(sm_invert(g, prec), b), sm_frobenius(g));
                AffineWeylElement y = iwahori_coset(h, prec);
                if (y == x)
                    out.strata[key][m]++;
            }
        });
        if (out.strata[key].find(m) == out.strata[key].end()) out.strata[key][m] = 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Appendix probe: Newton invariance under right multiplication by I_{d+c}.
// ---------------------------------------------------------------------------

struct ProbeReport {
    IVec hodge;
    QVec newton;
    int d = 0, c_max = 0, trials = 0;
    std::vector<unsigned long long> violations_per_c;  // index c
    std::optional<int> minimal_c;                      // least c with zero violations
};

inline ProbeReport newton_perturbation_probe(const SeriesMatrix& b, int s, int d, int c_max,
                                             int trials, Rng& rng) {
    ProbeReport rep;
    rep.d = d;
    rep.c_max = c_max;
    rep.trials = trials;
    rep.hodge = hodge_polygon(b);
    rep.newton = newton_point(b, s);
    long long mu_abs = 0;
    for (auto v : rep.hodge) mu_abs += v < 0 ? -v : v;
    long long prec = 2 * b.r * (mu_abs + d + c_max + 2) + 6;
    SeriesMatrix bc = b.clamped(prec);
    for (int c = 0; c <= c_max; ++c) {
        unsigned long long bad = 0;
        for (int t = 0; t < trials; ++t) {
            SeriesMatrix h = random_In_element(b.ring, b.r, d + c, prec, rng);
            QVec nu = newton_point(sm_mul(bc, h), s);
            if (!(nu == rep.newton)) ++bad;
        }
        rep.violations_per_c.push_back(bad);
        if (bad == 0 && !rep.minimal_c) rep.minimal_c = c;
    }
    return rep;
}

}  // namespace shtuka
