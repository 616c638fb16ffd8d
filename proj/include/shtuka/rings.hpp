#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "shtuka/fields.hpp"

namespace shtuka {

/// Coefficient ring of a Laurent series: either the field itself (eps == 1)
/// or the dual-number ring F[eps]/(eps^e) for e in [2, kMaxEps]. Dual numbers
/// exist only to drive the z-zeta boundedness tests, so the ring surface is
/// deliberately small: arithmetic, unit test/inverse, Frobenius.
struct CoeffRing {
    const FieldSpec* field = nullptr;
    int eps = 1;  // nilpotency order; eps == 1 means plain field

    static constexpr int kMaxEps = 4;

    bool is_field() const { return eps == 1; }

    bool operator==(const CoeffRing& o) const { return field == o.field && eps == o.eps; }
    bool operator!=(const CoeffRing& o) const { return !(*this == o); }

    std::string describe() const {
        std::string s = field->describe();
        if (eps > 1) s += "[eps]/(eps^" + std::to_string(eps) + ")";
        return s;
    }
};

inline CoeffRing field_ring(const FieldSpec* f) { return CoeffRing{f, 1}; }
inline CoeffRing dual_ring(const FieldSpec* f, int e) {
    require(e >= 2 && e <= CoeffRing::kMaxEps, "dual-number nilpotency order out of range");
    return CoeffRing{f, e};
}

/// Ring element: coefficients of eps^0..eps^{e-1} as field codes. POD with a
/// fixed inline footprint; slots >= e are kept zero.
struct RElem {
    std::array<std::uint32_t, CoeffRing::kMaxEps> c{};

    bool operator==(const RElem& o) const { return c == o.c; }
    bool operator!=(const RElem& o) const { return !(*this == o); }
};

inline RElem r_zero() { return {}; }

inline RElem r_one() {
    RElem x;
    x.c[0] = 1;
    return x;
}

inline RElem r_from_field(std::uint32_t code) {
    RElem x;
    x.c[0] = code;
    return x;
}

inline RElem r_eps(const CoeffRing& R) {
    require(R.eps >= 2, "ring has no eps");
    RElem x;
    x.c[1] = 1;
    return x;
}

inline bool r_is_zero(const RElem& a) {
    for (auto v : a.c)
        if (v) return false;
    return true;
}

/// Units are exactly the elements with invertible eps^0 part.
inline bool r_is_unit(const CoeffRing& R, const RElem& a) {
    (void)R;
    return a.c[0] != 0;
}

inline RElem r_add(const CoeffRing& R, const RElem& a, const RElem& b) {
    RElem r;
    for (int i = 0; i < R.eps; ++i) r.c[i] = R.field->add(a.c[i], b.c[i]);
    return r;
}

inline RElem r_neg(const CoeffRing& R, const RElem& a) {
    RElem r;
    for (int i = 0; i < R.eps; ++i) r.c[i] = R.field->neg(a.c[i]);
    return r;
}

inline RElem r_sub(const CoeffRing& R, const RElem& a, const RElem& b) {
    return r_add(R, a, r_neg(R, b));
}

inline RElem r_mul(const CoeffRing& R, const RElem& a, const RElem& b) {
    if (R.eps == 1) return r_from_field(R.field->mul(a.c[0], b.c[0]));
    RElem r;
    for (int i = 0; i < R.eps; ++i)
        for (int j = 0; i + j < R.eps; ++j)
            r.c[i + j] = R.field->add(r.c[i + j], R.field->mul(a.c[i], b.c[j]));
    return r;
}

inline RElem r_scale(const CoeffRing& R, std::uint32_t f, const RElem& a) {
    RElem r;
    for (int i = 0; i < R.eps; ++i) r.c[i] = R.field->mul(f, a.c[i]);
    return r;
}

inline RElem r_inv(const CoeffRing& R, const RElem& a) {
    if (a.c[0] == 0) throw NotAUnit("ring element with nilpotent constant part is not a unit");
    std::uint32_t u = R.field->inv(a.c[0]);
    if (R.eps == 1) return r_from_field(u);
    // a = a0 (1 + n) with n nilpotent; invert by the finite geometric series.
    RElem n = r_scale(R, u, a);
    n.c[0] = 0;  // n = a/a0 - 1
    RElem acc = r_one();
    RElem term = r_one();
    for (int k = 1; k < R.eps; ++k) {
        term = r_mul(R, term, r_neg(R, n));
        acc = r_add(R, acc, term);
    }
    return r_scale(R, u, acc);
}

inline RElem r_pow(const CoeffRing& R, RElem a, unsigned long long e) {
    RElem r = r_one();
    while (e) {
        if (e & 1) r = r_mul(R, r, a);
        a = r_mul(R, a, a);
        e >>= 1;
    }
    return r;
}

/// sigma on the ring: the q-power map (coefficientwise x^q on the field slot
/// when eps == 1; the honest ring power otherwise).
inline RElem r_frobenius(const CoeffRing& R, const RElem& a) {
    if (R.eps == 1) return r_from_field(R.field->frobenius(a.c[0]));
    return r_pow(R, a, static_cast<unsigned long long>(R.field->q));
}

inline RElem r_random(const CoeffRing& R, Rng& rng) {
    RElem r;
    for (int i = 0; i < R.eps; ++i) r.c[i] = R.field->random_element(rng);
    return r;
}

}  // namespace shtuka
