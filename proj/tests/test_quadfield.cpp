#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <d4census/quadfield.hpp>

#include <random>
#include <set>

using namespace d4census;

namespace {

const std::vector<long> kFields = {-3, -4, -7, -8, -11, -15, -20, -23, -24,
                                   5,  8,  12, 13, 17,  21,  24,  40,  60};

// oracle: enumerate all ideals of norm m by scanning the canonical form directly
std::vector<QuadIdeal> brute_ideals_of_norm(const QuadField& k, long m) {
    std::vector<QuadIdeal> out;
    for (long s = 1; s * s <= m; ++s) {
        if (m % (s * s) != 0) continue;
        long A = m / (s * s);
        for (long B = -A + 1; B <= A; ++B)
            if ((Int(B) * B - k.delta) % (4 * A) == 0) out.emplace_back(k, s, A, B);
    }
    std::sort(out.begin(), out.end());
    return out;
}

FieldElement rand_elem(std::mt19937_64& rng, long range) {
    return {Rat(long(rng() % (2 * range)) - range), Rat(long(rng() % (2 * range)) - range)};
}

}  // namespace

TEST_CASE("field element arithmetic") {
    QuadField k(Int(-4));
    FieldElement i(-2, 1);  // omega - 2 = (-4 + sqrt(-4))/2 - (-2)... check: sqrt(-1)
    // omega = (-4 + sqrt(-4))/2 = -2 + i, so i = omega + 2
    FieldElement im(2, 1);
    CHECK(norm(k, im) == 1);
    CHECK(trace(k, im) == 0);
    CHECK(mul(k, im, im) == FieldElement(-1, 0));
    (void)i;

    std::mt19937_64 rng(11);
    for (long d : kFields) {
        QuadField f{Int(d)};
        for (int t = 0; t < 50; ++t) {
            FieldElement a = rand_elem(rng, 20), b = rand_elem(rng, 20);
            CHECK(norm(f, mul(f, a, b)) == norm(f, a) * norm(f, b));
            CHECK(mul(f, a, conj(f, a)) == FieldElement(norm(f, a), 0));
            CHECK(add(a, conj(f, a)) == FieldElement(trace(f, a), 0));
            if (!a.is_zero()) CHECK(mul(f, a, inv(f, a)) == FieldElement(1, 0));
        }
    }
}

TEST_CASE("sqrt_in_k") {
    std::mt19937_64 rng(13);
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (int t = 0; t < 60; ++t) {
            FieldElement a = rand_elem(rng, 15);
            if (a.is_zero()) continue;
            FieldElement sq = mul(k, a, a);
            auto r = sqrt_in_k(k, sq);
            REQUIRE(r.has_value());
            CHECK(mul(k, *r, *r) == sq);
            CHECK(is_square_in_k(k, sq));
        }
        // Delta itself: sqrt(Delta) = 2*omega - Delta
        FieldElement D(Rat(d), 0);
        CHECK(is_square_in_k(k, D));
        // a known non-square: 2 is a square only in Q(sqrt(2)) contexts; test via oracle
        FieldElement two(2, 0);
        bool sq2 = is_square_in_k(k, two);
        CHECK(sq2 == (d == 8));
    }
    QuadField k5((Int(5)));
    CHECK_FALSE(is_square_in_k(k5, FieldElement(3, 0)));
    CHECK(is_square_in_k(k5, FieldElement(5, 0)));
    // golden ratio: omega^2 = 5*omega - 5, (omega-2)^2 = omega^2-4omega+4 = omega - 1
    CHECK(is_square_in_k(k5, FieldElement(-1, 1)));
}

TEST_CASE("ideal canonical form and norms") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (long m = 1; m <= 60; ++m) {
            auto got = ideals_of_norm(k, m);
            auto want = brute_ideals_of_norm(k, m);
            CHECK(got == want);
            CHECK(Int(got.size()) == zeta_coefficient(k, m));
            for (auto& I : got) CHECK(I.norm() == m);
        }
    }
}

TEST_CASE("ideal multiplication vs principal ideals") {
    std::mt19937_64 rng(17);
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (int t = 0; t < 40; ++t) {
            FieldElement a = rand_elem(rng, 12), b = rand_elem(rng, 12);
            if (a.is_zero() || b.is_zero()) continue;
            QuadIdeal Ia = element_to_ideal(k, a), Ib = element_to_ideal(k, b);
            CHECK(Ia.norm() == abs(numerator(norm(k, a))));
            QuadIdeal prod = mul(k, Ia, Ib);
            CHECK(prod == element_to_ideal(k, mul(k, a, b)));
            CHECK(prod.norm() == Ia.norm() * Ib.norm());
        }
    }
}

TEST_CASE("I times conjugate is the norm ideal") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (long m = 1; m <= 40; ++m)
            for (auto& I : ideals_of_norm(k, m))
                CHECK(mul(k, I, conj(k, I)) == rational_ideal(k, I.norm()));
    }
}

TEST_CASE("ideal membership") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (long m = 2; m <= 30; ++m) {
            for (auto& I : ideals_of_norm(k, m)) {
                // basis vectors are members
                CHECK(ideal_contains(k, I, FieldElement(Rat(I.content * I.a), 0)));
                FieldElement beta = FieldElement::from_sqrt_basis(
                    k, Rat(I.content * I.b), Rat(I.content));
                CHECK(ideal_contains(k, I, beta));
                CHECK_FALSE(ideal_contains(k, I, FieldElement(1, 0)));
            }
        }
    }
}

TEST_CASE("primes above") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (auto p : primes_upto(60)) {
            auto ps = primes_above(k, Int(p));
            SplitType st = splitting_type(k, Int(p));
            if (st == SplitType::split) {
                REQUIRE(ps.size() == 2);
                CHECK(ps[0].ideal < ps[1].ideal);
                CHECK(mul(k, ps[0].ideal, ps[1].ideal) == rational_ideal(k, Int(p)));
                CHECK(ps[0].ideal != ps[1].ideal);
            } else if (st == SplitType::inert) {
                REQUIRE(ps.size() == 1);
                CHECK(ps[0].ideal == rational_ideal(k, Int(p)));
            } else {
                REQUIRE(ps.size() == 1);
                CHECK(mul(k, ps[0].ideal, ps[0].ideal) == rational_ideal(k, Int(p)));
            }
            for (auto& P : ps) {
                CHECK(P.ideal.norm() == P.norm());
                CHECK(prime_divides(k, P, rational_ideal(k, Int(p))));
            }
        }
    }
}

TEST_CASE("factor_ideal roundtrip") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (long m = 1; m <= 50; ++m) {
            for (auto& I : ideals_of_norm(k, m)) {
                auto f = factor_ideal(k, I);
                QuadIdeal prod = unit_ideal(k);
                for (auto& [P, e] : f.factors) prod = mul(k, prod, pow(k, P.ideal, e));
                CHECK(prod == I);
            }
        }
    }
}

TEST_CASE("phi tau moebius of ideals") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        for (long m = 1; m <= 40; ++m) {
            for (auto& I : ideals_of_norm(k, m)) {
                // tau via explicit divisors
                auto divs = ideal_divisors(k, I);
                CHECK(Int(divs.size()) == tau_ideal(k, I));
                for (size_t i = 1; i < divs.size(); ++i) CHECK(divs[i - 1] < divs[i]);
                // phi: count residues coprime to I brute-force when small
                if (I.norm() <= 36) {
                    ResidueRing R(k, I);
                    CHECK(Int(R.units().size()) == euler_phi_ideal(k, I));
                }
                // sum over divisors of mu is [I == (1)]
                int ms = 0;
                for (auto& D : divs) ms += moebius_ideal(k, D);
                CHECK(ms == (I.is_unit_ideal() ? 1 : 0));
            }
        }
    }
}

TEST_CASE("ideal counting") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        auto sieve = zeta_coefficient_sieve(k, 300);
        Int run = 0;
        for (long m = 1; m <= 300; ++m) {
            CHECK(Int(sieve[m]) == zeta_coefficient(k, m));
            run += sieve[m];
            if (m % 50 == 0) CHECK(count_ideals_upto(k, double(m)) == run);
        }
    }
}

TEST_CASE("fundamental units") {
    QuadField k8((Int(8)));
    auto u8 = fundamental_unit(k8);
    CHECK(u8.value == FieldElement::from_sqrt_basis(k8, 2, 1));  // 1 + sqrt(2)
    CHECK(u8.norm_sign == -1);

    QuadField k5((Int(5)));
    auto u5 = fundamental_unit(k5);
    CHECK(u5.value == FieldElement::from_sqrt_basis(k5, 1, 1));  // (1+sqrt(5))/2
    CHECK(u5.norm_sign == -1);

    QuadField k12((Int(12)));
    auto u12 = fundamental_unit(k12);
    CHECK(u12.value == FieldElement::from_sqrt_basis(k12, 4, 1));  // 2 + sqrt(3)
    CHECK(u12.norm_sign == 1);

    // oracle: smallest (x + y sqrt(D))/2 with x,y > 0 and x^2 - D y^2 = +-4
    for (long d : {5L, 8L, 12L, 13L, 17L, 21L, 24L, 40L, 60L, 21L * 4, 29L}) {
        if (!is_fundamental_discriminant(Int(d))) continue;
        QuadField k((Int(d)));
        auto u = fundamental_unit(k);
        Int X = 2 * numerator(u.value.x) + numerator(u.value.y) * d;
        Int Y = numerator(u.value.y);
        CHECK(X > 0);
        CHECK(Y > 0);
        CHECK(X * X - d * Y * Y == 4 * u.norm_sign);
        bool found_smaller = false;
        for (Int y = 1; y < Y; ++y) {
            Int t = d * y * y;
            for (Int c : {Int(t + 4), Int(t - 4)}) {
                if (c < 0) continue;
                Int x = isqrt(c);
                if (x * x == c && x > 0) found_smaller = true;
            }
        }
        CHECK_FALSE(found_smaller);
    }
    CHECK_THROWS_AS(fundamental_unit(QuadField(Int(-4))), std::invalid_argument);
}

TEST_CASE("residue ring structure") {
    for (long d : kFields) {
        QuadField k((Int(d)));
        // moduli dividing (4)
        QuadIdeal four = rational_ideal(k, 4);
        for (auto& m : ideal_divisors(k, four)) {
            ResidueRing R(k, m);
            CHECK(Int(R.size()) == m.norm());
            auto us = R.units();
            CHECK(Int(us.size()) == euler_phi_ideal(k, m));
            // units closed under multiplication; squares form a subgroup coset check
            auto sq = R.unit_squares();
            for (auto s : sq) CHECK(R.is_unit(s));
            CHECK(us.size() % sq.size() == 0);
        }
    }
}

TEST_CASE("coprimality") {
    for (long d : {-4L, 5L, -23L}) {
        QuadField k((Int(d)));
        for (long m = 1; m <= 20; ++m)
            for (auto& I : ideals_of_norm(k, m))
                for (long n = 1; n <= 20; ++n)
                    for (auto& J : ideals_of_norm(k, n)) {
                        // oracle: coprime iff no prime ideal divides both
                        bool c = true;
                        for (auto& [P, e] : factor_ideal(k, I).factors)
                            if (prime_divides(k, P, J)) c = false;
                        CHECK(coprime(k, I, J) == c);
                    }
    }
}
