#include <catch2/catch_amalgamated.hpp>

#include "shtuka/json_io.hpp"
#include "shtuka/series_matrix.hpp"
#include "support/oracles.hpp"

using namespace shtuka;

namespace {

CoeffRing f2() { return field_ring(ff_make(2, 1)); }
CoeffRing f3() { return field_ring(ff_make(3, 1)); }
CoeffRing f4() { return field_ring(get_field(2, 2, {}, 2)); }  // F_4 with sigma = x^2

SeriesMatrix mat2(CoeffRing R, const LaurentSeries& a, const LaurentSeries& b,
                  const LaurentSeries& c, const LaurentSeries& d) {
    SeriesMatrix m(R, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

LaurentSeries zp(CoeffRing R, long long k) { return LaurentSeries::z_pow(R, k); }
LaurentSeries zero(CoeffRing R) { return LaurentSeries::exact_zero(R); }

SeriesMatrix random_in_Kzmu(CoeffRing R, const IVec& mu, long long prec, Rng& rng) {
    SeriesMatrix k1 = random_k_element(R, static_cast<int>(mu.size()), prec, rng);
    SeriesMatrix k2 = random_k_element(R, static_cast<int>(mu.size()), prec, rng);
    return sm_mul(sm_mul(k1, SeriesMatrix::z_mu(R, mu)), k2);
}

}  // namespace

TEST_CASE("hodge polygon examples") {
    CoeffRing R = f2();
    CHECK(hodge_polygon(SeriesMatrix::z_mu(R, {2, 0})) == IVec{2, 0});
    CHECK(hodge_polygon(mat2(R, zp(R, 1), zp(R, 0), zero(R), zp(R, 1))) == IVec{2, 0});
    CHECK(hodge_polygon(mat2(R, zero(R), zp(R, 1), zp(R, 0), zero(R))) == IVec{1, 0});
    CHECK_THROWS_AS(hodge_polygon(mat2(R, zp(R, 1), zero(R), zp(R, 2), zero(R))),
                    NotInvertible);
}

TEST_CASE("hodge polygon agrees with the minor-valuation oracle") {
    Rng rng(41);
    for (CoeffRing R : {f2(), f3()}) {
        for (int r : {2, 3}) {
            for (int i = 0; i < 60; ++i) {
                IVec mu;
                for (int t = 0; t < r; ++t) mu.push_back(rng.range(0, 2));
                std::sort(mu.begin(), mu.end(), std::greater<long long>());
                long long prec = 2 * r * (3 + 3) + 4;
                SeriesMatrix b = random_in_Kzmu(R, mu, prec, rng);
                IVec via_snf = hodge_polygon(b, prec);
                CHECK(via_snf == oracles::hodge_via_minors(b));
                CHECK(via_snf == mu);  // K z^mu K membership is preserved
            }
        }
    }
}

TEST_CASE("hodge polygon is K-double-coset invariant (200 trials)") {
    Rng rng(43);
    CoeffRing R = f4();
    std::vector<IVec> fixtures = {{1, 0}, {2, 0}, {1, 1}, {2, -1}};
    for (int trial = 0; trial < 200; ++trial) {
        const IVec& mu = fixtures[trial % fixtures.size()];
        long long prec = 2 * 2 * (3 + 3) + 4;
        SeriesMatrix b = SeriesMatrix::z_mu(R, mu);
        SeriesMatrix k1 = random_k_element(R, 2, prec, rng);
        SeriesMatrix k2 = random_k_element(R, 2, prec, rng);
        REQUIRE(hodge_polygon(sm_mul(sm_mul(k1, b), k2), prec) == mu);
    }
}

TEST_CASE("boundedness: the paper counterexample over dual numbers") {
    // GL_1 over F_q[eps]/(eps^2), b = 1 + eps/z: bounded by no coweight.
    CoeffRing R = dual_ring(ff_make(3, 1), 2);
    SeriesMatrix b = realize_preset("exunbounded", R);
    for (long long d : {0LL, 1LL, -1LL, 2LL, -2LL})
        CHECK_FALSE(bounded_by(b, {d}, BoundMode::ZMinusZeta));
    // In the special fiber (z-mode sees zeta = 0... the mode-z test over the
    // same ring still works with plain z powers): mu = (0) holds there.
    CHECK(bounded_by(b, {0}, BoundMode::Z));
}

TEST_CASE("boundedness: the non-smooth deformation fixture is bounded by (2,0)") {
    CoeffRing R = dual_ring(ff_make(3, 1), 2);
    SeriesMatrix b = realize_preset("exdefospnotsmooth", R);
    CHECK(bounded_by(b, {2, 0}, BoundMode::ZMinusZeta));
    CHECK_FALSE(bounded_by(b, {1, 1}, BoundMode::ZMinusZeta));
}

TEST_CASE("boundedness over a field detects the Hodge polygon") {
    CoeffRing R = f2();
    SeriesMatrix b = SeriesMatrix::z_mu(R, {2, 0});
    CHECK(bounded_by(b, {2, 0}, BoundMode::Z));
    CHECK_FALSE(bounded_by(b, {1, 1}, BoundMode::Z));  // 1x1 minor z^0... fails divisibility
    CHECK(bounded_by(b, {3, -1}, BoundMode::Z));
}

TEST_CASE("bounded_by(b, mu') iff hodge(b) <= mu' (exhaustive window r=2 over F_2)") {
    CoeffRing R = f2();
    const RootDatum& d2 = glr(2);
    // All 2x2 matrices with entries supported on z^{-1}, z^0, z^1.
    std::vector<IVec> mu_candidates = {{0, 0}, {1, 0}, {1, -1}, {2, 0}, {2, -1}, {1, 1}, {2, -2}, {0, -1}, {2, 1}, {3, -1}};
    int checked = 0;
    for (std::uint32_t bits = 0; bits < (1u << 12); ++bits) {
        SeriesMatrix m(R, 2);
        std::uint32_t x = bits;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                LaurentSeries f(R, -1, 2, true);
                for (long long k = -1; k <= 1; ++k) {
                    f.set(k, (x & 1) ? r_one() : r_zero());
                    x >>= 1;
                }
                m.at(i, j) = f.trimmed();
            }
        IVec mu;
        try {
            mu = hodge_polygon(m, 30);
        } catch (const NotInvertible&) {
            continue;
        }
        ++checked;
        for (const auto& mup : mu_candidates) {
            bool lhs = bounded_by(m, mup, BoundMode::Z);
            bool rhs = d2.dominance_leq(mu, mup);
            REQUIRE(lhs == rhs);
        }
    }
    CHECK(checked > 2000);
}

TEST_CASE("bounded_by sampled over F_3 windows agrees with dominance") {
    Rng rng(47);
    CoeffRing R = f3();
    const RootDatum& d2 = glr(2);
    std::vector<IVec> mu_candidates = {{0, 0}, {1, 0}, {1, -1}, {2, 0}, {2, -1}, {1, 1}};
    for (int trial = 0; trial < 500; ++trial) {
        SeriesMatrix m(R, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                LaurentSeries f(R, -1, 2, true);
                for (long long k = -1; k <= 1; ++k) f.set(k, r_from_field(R.field->random_element(rng)));
                m.at(i, j) = f.trimmed();
            }
        IVec mu;
        try {
            mu = hodge_polygon(m, 30);
        } catch (const NotInvertible&) {
            continue;
        }
        for (const auto& mup : mu_candidates)
            REQUIRE(bounded_by(m, mup, BoundMode::Z) == d2.dominance_leq(mu, mup));
    }
}

TEST_CASE("sigma conjugation examples and invariance") {
    CoeffRing R = f4();
    SeriesMatrix b = mat2(R, zero(R), zp(R, 1), zp(R, 0), zero(R));  // superbasic
    long long prec = 24;

    SeriesMatrix id = SeriesMatrix::identity(R, 2);
    SeriesMatrix c = sigma_conjugate(id, b, prec);
    CHECK(hodge_polygon(c, prec) == IVec{1, 0});

    // K-conjugation with F_q entries preserves the Hodge polygon of z^mu.
    Rng rng(53);
    for (int i = 0; i < 50; ++i) {
        SeriesMatrix bmu = SeriesMatrix::z_mu(R, {2, 0});
        SeriesMatrix k(R, 2);
        // constant invertible matrix over F_2 inside F_4 (sigma-fixed)
        const FieldSpec* F = R.field;
        while (true) {
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb)
                    k.at(a, bb) = LaurentSeries::constant(R, r_from_field(static_cast<std::uint32_t>(rng.below(2))));
            std::uint32_t det = F->sub(F->mul(k.at(0, 0).at(0).c[0], k.at(1, 1).at(0).c[0]),
                                       F->mul(k.at(0, 1).at(0).c[0], k.at(1, 0).at(0).c[0]));
            if (det) break;
        }
        CHECK(hodge_polygon(sigma_conjugate(k, bmu, prec), prec) == IVec{2, 0});
    }

    // Newton invariance under random window-bounded g (200 trials). The
    // conjugate lives over F_4 = F_{q^2}, so its slopes come from the s = 2
    // norm; equality with the s = 1 value of b is exactly the invariance.
    QVec nu_b = newton_point(b, 1);
    CHECK(nu_b == QVec{Rational(1, 2), Rational(1, 2)});
    for (int i = 0; i < 200; ++i) {
        SeriesMatrix g = random_window_matrix(R, 2, -2, prec, rng);
        SeriesMatrix h = sigma_conjugate(g, b, prec + 10);
        REQUIRE(newton_point(h, 2) == nu_b);
    }
}

TEST_CASE("norms") {
    CoeffRing R = f2();
    SeriesMatrix b = mat2(R, zero(R), zp(R, 1), zp(R, 0), zero(R));
    CHECK(sm_known_equal_all(norm_s(b, 1), b));
    SeriesMatrix n2 = norm_s(b, 2);
    CHECK(sm_known_equal_all(n2, SeriesMatrix::z_mu(R, {1, 1})));
    SeriesMatrix zmu = SeriesMatrix::z_mu(R, {3, 1});
    CHECK(sm_known_equal_all(norm_s(zmu, 3), SeriesMatrix::z_mu(R, {9, 3})));
}

TEST_CASE("newton point examples") {
    CoeffRing R = f2();
    CHECK(newton_point(SeriesMatrix::z_mu(R, {0, 2, -1}), 1) ==
          QVec{Rational(2), Rational(0), Rational(-1)});

    SeriesMatrix sb = mat2(R, zero(R), zp(R, 1), zp(R, 0), zero(R));
    CHECK(newton_point(sb, 1) == QVec{Rational(1, 2), Rational(1, 2)});
    CHECK(newton_point(sb, 2) == QVec{Rational(1, 2), Rational(1, 2)});  // both paths agree

    SeriesMatrix sb2 = mat2(R, zero(R), zp(R, 2), zp(R, 0), zero(R));
    CHECK(newton_point(sb2, 1) == QVec{Rational(1), Rational(1)});
    CHECK(hodge_polygon(sb2) == IVec{2, 0});  // strict Mazur instance
}

TEST_CASE("mazur inequality on random double-coset samples") {
    Rng rng(59);
    for (CoeffRing R : {f2(), f3()}) {
        for (int trial = 0; trial < 100; ++trial) {
            int r = 2 + static_cast<int>(rng.below(2));
            IVec mu;
            for (int t = 0; t < r; ++t) mu.push_back(rng.range(0, 2));
            std::sort(mu.begin(), mu.end(), std::greater<long long>());
            long long prec = 2 * r * (4 + 4) + 4;
            SeriesMatrix b = random_in_Kzmu(R, mu, prec, rng);
            QVec nu = newton_point(b, 1);
            IVec hp = hodge_polygon(b, prec);
            REQUIRE(glr_dominance_leq(nu, to_qvec(hp)));
            long long slope_sum_num = 0;
            Rational ssum(0);
            for (const auto& s : nu) ssum += s;
            long long hsum = 0;
            for (auto x : hp) hsum += x;
            REQUIRE(ssum == Rational(hsum));  // equal kappa
            (void)slope_sum_num;
        }
    }
}

TEST_CASE("kottwitz points") {
    CoeffRing R = f2();
    // GL_1: b = z^3 (1 + z)
    SeriesMatrix b1(R, 1);
    LaurentSeries f(R, 3, 5, true);
    f.set(3, r_one());
    f.set(4, r_one());
    b1.at(0, 0) = f;
    Pi1Class k1 = kottwitz_point(b1);
    CHECK(k1.coords == std::vector<long long>{3});

    CHECK(kottwitz_point(SeriesMatrix::identity(R, 2)).is_zero());

    SeriesMatrix sb = mat2(R, zero(R), zp(R, 1), zp(R, 0), zero(R));
    CHECK(kottwitz_point(sb).coords == std::vector<long long>{1});  // v_z(det) = v_z(-z)
}

TEST_CASE("decency checks") {
    CoeffRing R = f2();
    auto om = decency_check(SeriesMatrix::z_mu(R, {3, 1}), 1);
    REQUIRE(om.has_value());
    CHECK(*om == IVec{3, 1});

    SeriesMatrix sb = mat2(R, zero(R), zp(R, 1), zp(R, 0), zero(R));
    auto om2 = decency_check(sb, 2);
    REQUIRE(om2.has_value());
    CHECK(*om2 == IVec{1, 1});
    CHECK_FALSE(decency_check(sb, 1).has_value());

    SeriesMatrix ub = mat2(R, zp(R, 1), zp(R, 0), zero(R), zp(R, 0));  // [[z,1],[0,1]]
    CHECK_FALSE(decency_check(ub, 1).has_value());
}

TEST_CASE("iwahori coset examples") {
    CoeffRing R = f2();
    const RootDatum& d = glr(2);

    AffineWeylElement x1 = iwahori_coset(SeriesMatrix::z_mu(R, {1, 0}));
    CHECK(x1 == AffineWeylElement::translation_of(d, {1, 0}));

    SeriesMatrix anti = mat2(R, zero(R), zp(R, 0), zp(R, 1), zero(R));  // [[0,1],[z,0]]
    AffineWeylElement x2 = iwahori_coset(anti);
    CHECK(x2.translation == IVec{0, 1});
    CHECK_FALSE(x2.finite.is_identity());

    // [[1,0],[1,1]] * diag(z,1) = [[z,0],[z,1]]
    SeriesMatrix m = mat2(R, zp(R, 1), zero(R), zp(R, 1), zp(R, 0));
    AffineWeylElement x3 = iwahori_coset(m);
    CHECK(x3 == AffineWeylElement::translation_of(d, {1, 0}));
}

TEST_CASE("iwahori coset round-trips monomial matrices and is I-bi-invariant") {
    Rng rng(61);
    CoeffRing R = f4();
    const RootDatum& d = glr(2);
    long long prec = 24;
    for (int trial = 0; trial < 200; ++trial) {
        // random monomial element
        IVec lam{rng.range(-2, 2), rng.range(-2, 2)};
        std::vector<int> perm = rng.below(2) ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
        AffineWeylElement x{lam, WeylElement::from_permutation(d, perm)};
        SeriesMatrix xm = awe_to_matrix(x, R);
        REQUIRE(iwahori_coset(xm, prec) == x);

        SeriesMatrix i1 = random_iwahori_element(R, 2, prec, rng);
        SeriesMatrix i2 = random_iwahori_element(R, 2, prec, rng);
        REQUIRE(iwahori_coset(sm_mul(sm_mul(i1, xm), i2), prec) == x);
    }
    // invariance on arbitrary g
    for (int trial = 0; trial < 50; ++trial) {
        SeriesMatrix g = random_window_matrix(R, 2, -2, prec, rng);
        AffineWeylElement y = iwahori_coset(g, prec);
        SeriesMatrix i1 = random_iwahori_element(R, 2, prec, rng);
        SeriesMatrix i2 = random_iwahori_element(R, 2, prec, rng);
        REQUIRE(iwahori_coset(sm_mul(sm_mul(i1, g), i2), prec) == y);
    }
}

TEST_CASE("matrix inverse round-trips") {
    Rng rng(67);
    CoeffRing R = f4();
    long long prec = 26;
    for (int trial = 0; trial < 100; ++trial) {
        SeriesMatrix g = random_window_matrix(R, 3, -1, prec, rng);
        SeriesMatrix gi = sm_invert(g, prec);
        SeriesMatrix prod = sm_mul(g, gi);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const auto& f = prod.at(i, j);
                REQUIRE_FALSE(f.window_empty());
                for (long long k = f.ord; k < f.prec; ++k)
                    REQUIRE(f.at(k) == (i == j && k == 0 ? r_one() : r_zero()));
            }
    }
}
