#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "torus/words.hpp"

using namespace torus;

namespace {
DigitString random_string(std::mt19937& rng, int maxlen, int bound) {
    std::uniform_int_distribution<int> len(0, maxlen), digit(-bound, bound);
    DigitString w(len(rng));
    for (auto& d : w) d = digit(rng);
    return w;
}
}  // namespace

TEST_CASE("string_to_poly basics") {
    CHECK(string_to_poly({1}) == Polynomial::constant(1));    // xi
    CHECK(string_to_poly({0, 1}) == Polynomial({0, 1}));      // eta = x
    CHECK(string_to_poly({}) == Polynomial{});                // epsilon is 0
    CHECK(string_to_poly({1, 0}) == Polynomial::constant(1)); // trailing zeros normalize away
}

TEST_CASE("string/poly round trips") {
    std::mt19937 rng(5);
    for (int i = 0; i < 500; ++i) {
        DigitString w = random_string(rng, 8, 10);
        while (!w.empty() && w.back() == 0) w.pop_back();  // no trailing zeros
        CHECK(poly_to_string(string_to_poly(w)) == w);
        CHECK(string_to_poly(poly_to_string(string_to_poly(w))) == string_to_poly(w));
    }
}

TEST_CASE("llex compare") {
    CHECK(llex_compare({-2, 2, 2}, {1, 1, 1}) == std::strong_ordering::less);
    CHECK(llex_compare({5}, {0, 0}) == std::strong_ordering::less);  // length dominates
    CHECK(llex_compare({1, 2}, {1, 2}) == std::strong_ordering::equal);
    CHECK(llex_compare({}, {0}) == std::strong_ordering::less);  // epsilon is the minimum

    std::mt19937 rng(9);
    for (int i = 0; i < 300; ++i) {
        DigitString a = random_string(rng, 4, 2), b = random_string(rng, 4, 2), c = random_string(rng, 4, 2);
        auto ab = llex_compare(a, b), ba = llex_compare(b, a);
        bool antisym = ab == 0 ? ba == 0 : (ab < 0) == (ba > 0);
        CHECK(antisym);  // antisymmetry
        bool chain = llex_compare(a, b) <= 0 && llex_compare(b, c) <= 0;
        if (chain) CHECK(llex_compare(a, c) <= 0);  // transitivity
        bool eps_min = llex_compare({}, a) <= 0;
        CHECK(eps_min);
    }
}

TEST_CASE("convolution and deconvolution") {
    ConvString s = convolve({1}, {0, 1});
    REQUIRE(s.size() == 2);
    CHECK(s[0] == ConvSymbol{1, 0});
    CHECK(s[1] == ConvSymbol{kPad, 1});

    CHECK(convolve(DigitString{}, DigitString{}).empty());

    std::mt19937 rng(13);
    for (int i = 0; i < 300; ++i) {
        std::vector<DigitString> tracks{random_string(rng, 5, 2), random_string(rng, 5, 2),
                                        random_string(rng, 5, 2)};
        ConvString conv = convolve(tracks);
        std::size_t want = std::max({tracks[0].size(), tracks[1].size(), tracks[2].size()});
        CHECK(conv.size() == want);
        CHECK(deconvolve(conv, 3) == tracks);
        // per track, pads only as a suffix; no all-pad column
        for (std::size_t t = 0; t < 3; ++t) {
            bool padded = false;
            for (const auto& sym : conv) {
                if (padded) CHECK(sym[t] == kPad);
                padded = padded || sym[t] == kPad;
            }
        }
        for (const auto& sym : conv) CHECK((sym[0] != kPad || sym[1] != kPad || sym[2] != kPad));
    }
}

TEST_CASE("bracketed digit syntax") {
    CHECK(format_digits({-2, 2, 2}) == "[-2,2,2]");
    CHECK(format_digits({}) == "[]");
    CHECK(parse_digits("[-2,2,2]") == DigitString{-2, 2, 2});
    CHECK(parse_digits("[]") == DigitString{});
    CHECK(parse_digits(" [ 1 , -10 ] ") == DigitString{1, -10});
    CHECK_THROWS_AS(parse_digits("1,2"), invalid_params);
    CHECK_THROWS_AS(parse_digits("[1,]"), invalid_params);

    std::mt19937 rng(17);
    for (int i = 0; i < 200; ++i) {
        DigitString w = random_string(rng, 6, 15);
        CHECK(parse_digits(format_digits(w)) == w);
    }
}
