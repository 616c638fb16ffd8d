#include <catch2/catch_amalgamated.hpp>

#include "shtuka/laurent.hpp"

using namespace shtuka;

namespace {

LaurentSeries random_unit_series(CoeffRing R, long long ord, long long prec, Rng& rng) {
    LaurentSeries f(R, ord, prec);
    for (long long k = ord; k < prec; ++k) f.set(k, r_random(R, rng));
    // force a unit lowest coefficient somewhere in the lower half
    long long v = ord + static_cast<long long>(rng.below(static_cast<std::uint64_t>((prec - ord) / 2 + 1)));
    for (long long k = ord; k < v; ++k) f.set(k, r_zero());
    RElem lead = r_random(R, rng);
    lead.c[0] = R.field->random_nonzero(rng);
    f.set(v, lead);
    return f;
}

}  // namespace

TEST_CASE("series_invert: monomial window shift") {
    CoeffRing R = field_ring(ff_make(2, 1));
    LaurentSeries f(R, 2, 10);  // z^2 known mod z^10
    f.set(2, r_one());
    LaurentSeries g = ls_invert(f);
    CHECK(g.ord == -2);
    CHECK(g.prec == 6);  // prec - 2*val
    CHECK(g.at(-2) == r_one());
    for (long long k = -1; k < g.prec; ++k) CHECK(r_is_zero(g.at(k)));
}

TEST_CASE("series_invert: geometric series for 1+z over F_2") {
    CoeffRing R = field_ring(ff_make(2, 1));
    LaurentSeries f(R, 0, 4);
    f.set(0, r_one());
    f.set(1, r_one());
    LaurentSeries g = ls_invert(f);
    // (1+z)^{-1} = 1 + z + z^2 + z^3 over F_2
    for (long long k = 0; k < 4; ++k) CHECK(g.at(k) == r_one());
    LaurentSeries prod = ls_mul(f, g);
    CHECK(prod.at(0) == r_one());
    for (long long k = 1; k < prod.prec; ++k) CHECK(r_is_zero(prod.at(k)));
}

TEST_CASE("series_invert: nilpotent lowest coefficient is not a unit") {
    CoeffRing R = dual_ring(ff_make(2, 1), 2);
    LaurentSeries f(R, 0, 6, true);  // eps + z
    f.set(0, r_eps(R));
    f.set(1, r_one());
    CHECK_THROWS_AS(ls_invert(f, 6), NotAUnit);
}

TEST_CASE("series_invert: all-zero truncated window is a precision error") {
    CoeffRing R = field_ring(ff_make(2, 1));
    LaurentSeries f(R, 0, 5);  // zero mod z^5, valuation uncertifiable
    CHECK_THROWS_AS(ls_invert(f), PrecisionError);
    CHECK_THROWS_AS(ls_invert(LaurentSeries::exact_zero(R), 4), NotAUnit);
}

TEST_CASE("invert round-trips on random unit series") {
    Rng rng(2024);
    for (CoeffRing R : {field_ring(ff_make(2, 2)), field_ring(ff_make(3, 1)),
                        dual_ring(ff_make(3, 1), 2)}) {
        for (int i = 0; i < 200; ++i) {
            LaurentSeries f = random_unit_series(R, -3, 12, rng);
            LaurentSeries g = ls_invert(f);
            LaurentSeries prod = ls_mul(f, g);
            REQUIRE(prod.at(0) == r_one());
            for (long long k = prod.ord; k < prod.prec; ++k)
                if (k != 0) REQUIRE(r_is_zero(prod.at(k)));
        }
    }
}

TEST_CASE("coefficient reads beyond precision throw") {
    CoeffRing R = field_ring(ff_make(2, 1));
    LaurentSeries f(R, 0, 3);
    CHECK_THROWS_AS(f.at(3), PrecisionError);
    CHECK(r_is_zero(f.at(-5)));  // below ord: exactly zero
    LaurentSeries p = LaurentSeries::z_pow(R, 1);
    CHECK(r_is_zero(p.at(100)));  // exact polynomials are known everywhere
}

TEST_CASE("precision propagation is monotone") {
    CoeffRing R = field_ring(ff_make(2, 2));
    Rng rng_lo(5), rng_hi(5);  // identical streams
    auto pipeline = [&](long long prec, Rng& rng) {
        LaurentSeries f = random_unit_series(R, -2, prec, rng);
        LaurentSeries g = random_unit_series(R, 0, prec, rng);
        return ls_mul(ls_add(ls_mul(f, g), f), ls_invert(g));
    };
    LaurentSeries lo = pipeline(10, rng_lo);
    // Recompute with more precision, but identical low-order randomness: we
    // re-draw with the same seed and extend by zero coefficients.
    Rng rng2(5);
    auto pipeline_ext = [&](long long base_prec, long long extra) {
        LaurentSeries f = random_unit_series(R, -2, base_prec, rng2);
        LaurentSeries g = random_unit_series(R, 0, base_prec, rng2);
        auto extend = [&](const LaurentSeries& s) {
            LaurentSeries t(R, s.ord, s.prec + extra);
            for (long long k = s.ord; k < s.prec; ++k) t.set(k, s.at(k));
            return t;
        };
        LaurentSeries fe = extend(f), ge = extend(g);
        return ls_mul(ls_add(ls_mul(fe, ge), fe), ls_invert(ge));
    };
    LaurentSeries hi = pipeline_ext(10, 5);
    REQUIRE(hi.prec >= lo.prec);
    for (long long k = lo.ord; k < lo.prec; ++k) REQUIRE(lo.at(k) == hi.at(k));
}

TEST_CASE("frobenius acts coefficientwise fixing z") {
    const FieldSpec* F4 = ff_make(2, 2);
    CoeffRing R = field_ring(F4);
    std::uint32_t t = F4->from_coords({0, 1});
    LaurentSeries f(R, -1, 2, true);  // 1 + t z^{-1}
    f.set(-1, r_from_field(t));
    f.set(0, r_one());
    LaurentSeries g = ls_frobenius(f);
    CHECK(g.at(-1) == r_from_field(F4->from_coords({1, 1})));  // t^2 = t+1
    CHECK(g.at(0) == r_one());
}

TEST_CASE("ztilde powers multiply to one exactly") {
    CoeffRing R = dual_ring(ff_make(3, 1), 3);
    for (long long k : {-3LL, -1LL, 0LL, 1LL, 4LL}) {
        LaurentSeries a = ztilde_pow(R, k);
        LaurentSeries b = ztilde_pow(R, -k);
        LaurentSeries prod = ls_mul(a, b).trimmed();
        CHECK(prod.is_exact_zero() == false);
        CHECK(prod.at(0) == r_one());
        CHECK(prod.ord == 0);
        CHECK(prod.prec == 1);
    }
}
