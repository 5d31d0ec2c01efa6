#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "torus/core_ring.hpp"

using namespace torus;

namespace {

// Test-side oracle: long division of f by t with the quotient multiplied
// back, so the check does not depend on the library's residue path.
// Returns true iff t divides f exactly.
bool divides_exactly(const Polynomial& t, const Polynomial& f) {
    REQUIRE(!t.is_zero());
    REQUIRE(t.coeffs.back() == 1);  // monic
    std::vector<BigInt> rem = f.coeffs;
    std::vector<BigInt> quot(rem.size(), 0);
    const int dt = t.degree();
    for (int i = static_cast<int>(rem.size()) - 1; i >= dt; --i) {
        BigInt c = rem[i];
        if (c == 0) continue;
        quot[i - dt] = c;
        for (int j = 0; j <= dt; ++j) rem[i - dt + j] -= c * t.coeffs[j];
    }
    Polynomial q(std::move(quot)), r(std::move(rem));
    REQUIRE(q * t + r == f);  // division identity must hold exactly
    return r.is_zero();
}

Polynomial random_poly(std::mt19937& rng, int max_deg, long bound) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<long> coeff(-bound, bound);
    std::vector<BigInt> c(deg(rng) + 1);
    for (auto& x : c) x = coeff(rng);
    return Polynomial(std::move(c));
}

}  // namespace

TEST_CASE("integral_part truncates toward zero") {
    CHECK(integral_part(BigInt(4), BigInt(3)) == 1);
    CHECK(integral_part(BigInt(-4), BigInt(3)) == -1);
    CHECK(integral_part(BigInt(0), BigInt(5)) == 0);
    CHECK(integral_part(BigInt(7), BigInt(-3)) == -2);
    CHECK(integral_part(BigInt(-7), BigInt(-3)) == 2);
    CHECK_THROWS_AS(integral_part(BigInt(1), BigInt(0)), invalid_params);

    std::mt19937 rng(42);
    std::uniform_int_distribution<long> d(-1000, 1000);
    for (int i = 0; i < 500; ++i) {
        BigInt a = d(rng), b = d(rng);
        if (b == 0) continue;
        BigInt k = integral_part(a, b);
        BigInt r = a - k * b;
        CHECK(abs(k * b) <= abs(a));
        CHECK(abs(r) < abs(b));
        if (r != 0) CHECK((r < 0) == (a < 0));  // truncated remainder keeps the dividend sign
    }
}

TEST_CASE("ReprParams validation") {
    CHECK_NOTHROW(ReprParams(1, 3));
    CHECK_NOTHROW(ReprParams(7, -11));
    CHECK_NOTHROW(ReprParams({1, 1}, 5));
    CHECK_THROWS_AS(ReprParams(2, 3), invalid_params);    // 1+2 = 3 is not < 3
    CHECK_THROWS_AS(ReprParams(0, 1), invalid_params);    // |q| >= 2 implied
    CHECK_THROWS_AS(ReprParams({3, 1}, 5), invalid_params);

    CHECK(ReprParams(1, 3).nies_semukhin());
    CHECK(ReprParams(7, -11).nies_semukhin());
    CHECK_FALSE(ReprParams(2, -4).nies_semukhin());

    ReprParams p13(1, 3);
    CHECK(p13.modulus() == std::vector<BigInt>{-3, 1, 1});  // x^2 + x - 3
    CHECK(p13.digit_bound() == 2);
}

TEST_CASE("reduce matches the worked example and edge cases") {
    ReprParams p13(1, 3);
    CHECK(reduce(Polynomial::constant(4), p13) == Polynomial({1, 1, 1}));
    CHECK(reduce(Polynomial{}, p13) == Polynomial{});
    CHECK(reduce(Polynomial({2, -2, 1}), p13) == Polynomial({2, -2, 1}));  // already reduced
}

TEST_CASE("reduce is sound, reduced, and idempotent") {
    std::mt19937 rng(7);
    for (const ReprParams& params : {ReprParams(1, 3), ReprParams(7, -11), ReprParams({1, 1}, 5)}) {
        Polynomial t(params.modulus());
        BigInt absq = abs(params.q);
        for (int i = 0; i < 300; ++i) {
            Polynomial f = random_poly(rng, 6, 500);
            Polynomial g = reduce(f, params);
            for (const auto& c : g.coeffs) CHECK(abs(c) < absq);
            CHECK(divides_exactly(t, f - g));
            CHECK(equivalent(f, g, params));
            CHECK(reduce(g, params) == g);
        }
    }
}

TEST_CASE("reduce strictly decreases coefficient mass on unreduced input") {
    std::mt19937 rng(11);
    ReprParams params(7, -11);
    auto mass = [](const Polynomial& f) {
        BigInt m = 0;
        for (const auto& c : f.coeffs) m += abs(c);
        return m;
    };
    for (int i = 0; i < 200; ++i) {
        Polynomial f = random_poly(rng, 5, 4000);
        bool unreduced = false;
        for (const auto& c : f.coeffs) unreduced = unreduced || abs(c) >= abs(params.q);
        if (!unreduced) continue;
        CHECK(mass(reduce(f, params)) < mass(f));
    }
}

TEST_CASE("residue worked examples") {
    ReprParams p13(1, 3);
    CHECK(residue(Polynomial({1, 1, 1}), p13) == IntVec({4, 0}));
    CHECK(residue(Polynomial({0, 1}), p13) == IntVec({0, 1}));
    CHECK(residue(Polynomial(p13.modulus()), p13) == IntVec::zero(2));
    // x^2 = -x + 3 mod t
    CHECK(residue(Polynomial({0, 0, 1}), p13) == IntVec({3, -1}));
}

TEST_CASE("equivalent agrees with residue equality (dual routes)") {
    ReprParams p13(1, 3);
    CHECK(equivalent(Polynomial::constant(4), Polynomial({1, 1, 1}), p13));
    CHECK_FALSE(equivalent(Polynomial::constant(1), Polynomial({0, 1}), p13));

    // exhaustive at degree <= 1, coefficients in [-10,10]
    for (const ReprParams& params : {ReprParams(1, 3), ReprParams(7, -11)}) {
        std::vector<Polynomial> all;
        for (int a = -10; a <= 10; ++a)
            for (int b = -10; b <= 10; ++b) all.push_back(Polynomial({a, b}));
        for (const auto& f : all) {
            IntVec rf = residue(f, params);
            for (const auto& g : all) {
                bool eq = equivalent(f, g, params);
                CHECK(eq == (rf == residue(g, params)));
            }
        }
    }

    // random at degree <= 4, coefficients in [-10,10], plus reflexivity
    std::mt19937 rng(3);
    ReprParams p115({1, 1}, 5);
    for (int i = 0; i < 2000; ++i) {
        Polynomial f = random_poly(rng, 4, 10), g = random_poly(rng, 4, 10);
        CHECK(equivalent(f, g, p115) == (residue(f, p115) == residue(g, p115)));
        CHECK(equivalent(f, f, p115));
    }
}
