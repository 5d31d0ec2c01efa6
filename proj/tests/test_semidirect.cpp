#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "torus/semidirect.hpp"

using namespace torus;

namespace {

const Presentation& pres13() {
    static const Presentation p = compile_presentation(ReprParams(1, 3));
    return p;
}

// A = matrix of g = x + 2 over (1,3): ((1,1),(3,2)), det -1.
const SemiRepresentation& rep13() {
    static const SemiRepresentation r = build_representation(Mat2{1, 1, 3, 2}, pres13());
    return r;
}

SemiElement random_element(std::mt19937& rng, int n, long bbound, long hbound) {
    std::uniform_int_distribution<long> db(-bbound, bbound), dh(-hbound, hbound);
    std::vector<BigInt> h(n);
    for (auto& x : h) x = dh(rng);
    return {db(rng), IntVec(std::move(h))};
}

// All accepted convolutions of a 2-track automaton, up to a length.
void enumerate_relation(const Dfa& d, int maxlen, const std::function<void(const ConvString&)>& sink) {
    ConvString path;
    std::function<void(std::uint32_t)> walk = [&](std::uint32_t s) {
        if (d.accepting[s]) sink(path);
        if (static_cast<int>(path.size()) == maxlen) return;
        for (const auto& [sym, t] : d.trans[s]) {
            path.push_back(d.alpha.decode(sym));
            walk(t);
            path.pop_back();
        }
    };
    walk(d.initial);
}

}  // namespace

TEST_CASE("multiply and inverse") {
    Mat2 A{-3, 1, -11, 4};
    SemiElement one{1, IntVec::zero(2)}, minus_one{-1, IntVec::zero(2)};
    CHECK(multiply(one, minus_one, A) == SemiElement{0, IntVec::zero(2)});

    SemiElement e1{0, IntVec::unit(2, 0)};
    SemiElement got = multiply(e1, one, A);
    CHECK(got.b == 1);
    CHECK(got.h == mat_apply(A, IntVec::unit(2, 0)));

    SemiElement h1{0, IntVec({3, -2})}, h2{0, IntVec({-1, 5})};
    CHECK(multiply(h1, h2, A) == SemiElement{0, IntVec({2, 3})});  // abelian fiber

    std::mt19937 rng(5);
    for (int i = 0; i < 300; ++i) {
        SemiElement g = random_element(rng, 2, 6, 40);
        SemiElement identity{0, IntVec::zero(2)};
        CHECK(multiply(g, semi_inverse(g, A), A) == identity);
        CHECK(multiply(semi_inverse(g, A), g, A) == identity);
    }
}

TEST_CASE("group axioms hold at the oracle level") {
    Mat2 A{-3, 1, -11, 4};
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        SemiElement x = random_element(rng, 2, 5, 30);
        SemiElement y = random_element(rng, 2, 5, 30);
        SemiElement z = random_element(rng, 2, 5, 30);
        CHECK(multiply(multiply(x, y, A), z, A) == multiply(x, multiply(y, z, A), A));
    }
}

TEST_CASE("integer codec") {
    ZAlphabet za{2};
    CHECK(encode_int(0, za).empty());
    CHECK(encode_int(1, za) == DigitString{za.one()});
    CHECK(encode_int(6, za) == DigitString{za.zero(), za.one(), za.one()});
    CHECK(encode_int(-3, za) == DigitString{za.neg(), za.one(), za.one()});
    for (long v = -200; v <= 200; ++v) CHECK(decode_int(encode_int(v, za), za) == v);
    CHECK_THROWS_AS(decode_int({za.neg()}, za), invalid_params);
    CHECK_THROWS_AS(decode_int({za.one(), za.zero()}, za), invalid_params);  // trailing zero bit
}

TEST_CASE("increment relation matches integer successor exhaustively") {
    ZAlphabet za{2};
    Dfa inc = build_increment_relation(za);
    for (long v = -130; v <= 130; ++v) {
        DigitString u = encode_int(v, za), w = encode_int(v + 1, za);
        CHECK(accepts_tuple(inc, {u, w}));
        CHECK_FALSE(accepts_tuple(inc, {u, u}));
        CHECK_FALSE(accepts_tuple(inc, {w, u}));
    }
    // soundness: every accepted pair decodes to a successor pair
    int seen = 0;
    enumerate_relation(inc, 6, [&](const ConvString& conv) {
        auto tracks = deconvolve(conv, 2);
        CHECK(decode_int(tracks[0], za) + 1 == decode_int(tracks[1], za));
        ++seen;
    });
    CHECK(seen > 50);
}

TEST_CASE("identity relation on Sigma_1") {
    ZAlphabet za{2};
    Dfa id1 = build_identity_sigma1(za);
    for (long v = -40; v <= 40; ++v) {
        DigitString u = encode_int(v, za);
        CHECK(accepts_tuple(id1, {u, u}));
        DigitString w = encode_int(v + 3, za);
        CHECK_FALSE(accepts_tuple(id1, {u, w}));
    }
    CHECK_FALSE(accepts_tuple(id1, {{za.zero()}, {za.zero()}}));  // not canonical
}

TEST_CASE("build_representation validates the matrix") {
    CHECK_THROWS_AS(build_representation(Mat2{1, 0, 1, 1}, pres13()), invalid_params);  // T_1
    CHECK_THROWS_AS(build_representation(Mat2{2, 1, 3, 2}, pres13()), invalid_params);  // wrong shape
    // identity matrix: the direct product Z^2 x Z
    SemiRepresentation trivial = build_representation(Mat2::identity(), pres13());
    CHECK(trivial.g == Polynomial::constant(1));
}

TEST_CASE("element codec round trip") {
    const auto& rep = rep13();
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        SemiElement e = random_element(rng, 2, 6, 40);
        DigitString w = encode_element(e, rep);
        CHECK(decode_element(w, rep) == e);
    }
    CHECK(encode_element(SemiElement{0, IntVec::zero(2)}, rep).empty());
}

TEST_CASE("multipliers agree with the oracle on random elements") {
    const auto& rep = rep13();
    std::mt19937 rng(13);
    for (int i = 0; i < 400; ++i) {
        SemiElement e = random_element(rng, 2, 5, 50);
        for (int gi = 0; gi <= 2; ++gi) {
            SemiElement image = apply_generator(e, gi, rep);
            CHECK(multiply(e, gi == 0 ? SemiElement{1, IntVec::zero(2)} : SemiElement{0, IntVec::unit(2, gi - 1)},
                           rep.A) == image);
            DigitString w = encode_element(e, rep), w2 = encode_element(image, rep);
            CHECK(accepts_tuple(rep.multipliers[gi].dfa, {w, w2}));
            // a wrong image is rejected
            SemiElement wrong{image.b, image.h + IntVec::unit(2, 0)};
            CHECK_FALSE(accepts_tuple(rep.multipliers[gi].dfa, {w, encode_element(wrong, rep)}));
        }
    }
}

TEST_CASE("multiplier soundness: all accepted pairs are generator steps") {
    const auto& rep = rep13();
    for (int gi = 0; gi <= 2; ++gi) {
        int seen = 0;
        enumerate_relation(rep.multipliers[gi].dfa, 4, [&](const ConvString& conv) {
            auto tracks = deconvolve(conv, 2);
            SemiElement from = decode_element(tracks[0], rep);
            SemiElement to = decode_element(tracks[1], rep);
            CHECK(to == apply_generator(from, gi, rep));
            ++seen;
        });
        CHECK(seen > 10);
    }
}

TEST_CASE("multiplier g0 twice equals multiplying by (2, 0)") {
    const auto& rep = rep13();
    std::mt19937 rng(17);
    for (int i = 0; i < 100; ++i) {
        SemiElement e = random_element(rng, 2, 5, 50);
        SemiElement once = apply_generator(e, 0, rep);
        SemiElement twice = apply_generator(once, 0, rep);
        CHECK(twice == multiply(e, SemiElement{2, IntVec::zero(2)}, rep.A));
        CHECK(accepts_tuple(rep.multipliers[0].dfa, {encode_element(once, rep), encode_element(twice, rep)}));
    }
}

TEST_CASE("property a) report") {
    const auto& rep = rep13();
    PropertyAReport report = verify_property_a(rep, 50);
    CHECK(report.l_zn_nonempty);
    CHECK(report.r_a_nonempty);
    CHECK(report.spot_failures == 0);
    CHECK(report.spot_checks == 50);

    // R_A accepts (encode(e1), encode(A e1)) and rejects the identity pair
    IntVec e1 = IntVec::unit(2, 0);
    IntVec img = mat_apply(rep.A, e1);
    CHECK(accepts_tuple(report.r_a.dfa, {encode(e1, rep.pres), encode(img, rep.pres)}));
    CHECK_FALSE(accepts_tuple(report.r_a.dfa, {encode(e1, rep.pres), encode(e1, rep.pres)}));

    // identity matrix: R_A is the identity relation on Dom
    SemiRepresentation trivial = build_representation(Mat2::identity(), pres13());
    PropertyAReport triv_report = verify_property_a(trivial, 20);
    CHECK(triv_report.spot_failures == 0);
    auto dom_strings = enumerate_accepted(pres13().dom, 3);
    for (const auto& w : dom_strings) CHECK(accepts_tuple(triv_report.r_a.dfa, {w, w}));
}
