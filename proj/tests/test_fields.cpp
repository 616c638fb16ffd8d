#include <catch2/catch_amalgamated.hpp>

#include "shtuka/fields.hpp"
#include "shtuka/rings.hpp"

using namespace shtuka;

TEST_CASE("deterministic modulus selection") {
    const FieldSpec* f2 = ff_make(2, 1);
    CHECK(f2->modulus == Poly{0, 1});  // t

    const FieldSpec* f4 = ff_make(2, 2);
    CHECK(f4->modulus == Poly{1, 1, 1});  // t^2 + t + 1, the only irreducible quadratic

    const FieldSpec* f8 = ff_make(2, 3);
    CHECK(f8->modulus == Poly{1, 1, 0, 1});  // t^3 + t + 1 in integer-encoding order
}

TEST_CASE("reducible modulus is rejected naming a factor degree") {
    try {
        ff_make(2, 2, {1, 0, 1});  // t^2 + 1 = (t+1)^2
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("degree 1") != std::string::npos);
    }
}

TEST_CASE("frobenius on F_4 over F_2") {
    const FieldSpec* f4 = ff_make(2, 2);  // q = 2
    std::uint32_t t = f4->from_coords({0, 1});
    std::uint32_t t_plus_1 = f4->from_coords({1, 1});
    CHECK(f4->frobenius(t) == t_plus_1);  // t^2 = t + 1 mod t^2+t+1
    CHECK(f4->frobenius(f4->one()) == f4->one());
    CHECK(f4->frobenius(f4->zero()) == f4->zero());
}

TEST_CASE("sigma fixes F_q and generates the Galois group") {
    // F_16 with q = 4: sigma = x^4, sigma^2 = id.
    const FieldSpec* f16 = get_field(2, 4, {}, 4);
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        std::uint32_t x = f16->random_element(rng);
        CHECK(f16->frobenius_iter(x, 2) == x);
    }
    // Elements of F_4 inside F_16 are exactly the sigma-fixed ones; there are 4.
    int fixed = 0;
    for (std::uint32_t x = 0; x < f16->order; ++x)
        if (f16->frobenius(x) == x) ++fixed;
    CHECK(fixed == 4);
}

TEST_CASE("field axioms hold on random samples") {
    std::vector<const FieldSpec*> fields = {
        ff_make(2, 1),  ff_make(2, 2), ff_make(2, 6), ff_make(2, 12),  // up to 4096
        ff_make(3, 1),  ff_make(3, 2), ff_make(3, 7),                  // 2187
        ff_make(5, 4),                                                 // 625
        ff_make(7, 3),                                                 // 343
        ff_make(13, 2),                                                // 169
    };
    Rng rng(42);
    for (const FieldSpec* F : fields) {
        for (int i = 0; i < 1000; ++i) {
            std::uint32_t a = F->random_element(rng), b = F->random_element(rng),
                          c = F->random_element(rng);
            REQUIRE(F->add(F->add(a, b), c) == F->add(a, F->add(b, c)));
            REQUIRE(F->mul(F->mul(a, b), c) == F->mul(a, F->mul(b, c)));
            REQUIRE(F->mul(a, F->add(b, c)) == F->add(F->mul(a, b), F->mul(a, c)));
            REQUIRE(F->add(a, b) == F->add(b, a));
            REQUIRE(F->mul(a, b) == F->mul(b, a));
            REQUIRE(F->add(a, F->neg(a)) == F->zero());
            if (a != 0) REQUIRE(F->mul(a, F->inv(a)) == F->one());
        }
        // Frobenius is a ring homomorphism: (a+b)^q = a^q + b^q.
        for (int i = 0; i < 200; ++i) {
            std::uint32_t a = F->random_element(rng), b = F->random_element(rng);
            REQUIRE(F->frobenius(F->add(a, b)) == F->add(F->frobenius(a), F->frobenius(b)));
            REQUIRE(F->frobenius(F->mul(a, b)) == F->mul(F->frobenius(a), F->frobenius(b)));
        }
    }
}

TEST_CASE("q must be a power of p with e dividing deg") {
    CHECK_THROWS_AS(get_field(2, 3, {}, 4), ValidationError);  // e=2 does not divide 3
    CHECK_THROWS_AS(get_field(3, 2, {}, 2), ValidationError);  // 2 is not a power of 3
    CHECK_NOTHROW(get_field(2, 6, {}, 4));
}

TEST_CASE("dual numbers: nilpotency, units, inverses") {
    CoeffRing R = dual_ring(ff_make(3, 1), 2);
    RElem eps = r_eps(R);
    CHECK(r_is_zero(r_mul(R, eps, eps)));  // eps^2 = 0
    CHECK_FALSE(r_is_unit(R, eps));
    CHECK_THROWS_AS(r_inv(R, eps), NotAUnit);

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        RElem x = r_random(R, rng);
        if (!r_is_unit(R, x)) continue;
        CHECK(r_mul(R, x, r_inv(R, x)) == r_one());
    }

    CoeffRing R3 = dual_ring(ff_make(5, 1), 3);
    RElem e3 = r_eps(R3);
    CHECK_FALSE(r_is_zero(r_mul(R3, e3, e3)));       // eps^2 != 0 when e = 3
    CHECK(r_is_zero(r_mul(R3, r_mul(R3, e3, e3), e3)));  // eps^3 = 0
    for (int i = 0; i < 200; ++i) {
        RElem x = r_random(R3, rng);
        if (!r_is_unit(R3, x)) continue;
        CHECK(r_mul(R3, x, r_inv(R3, x)) == r_one());
    }
}
