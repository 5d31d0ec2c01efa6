#include <catch2/catch_amalgamated.hpp>

#include "torus/evidence.hpp"
#include "torus/automata_io.hpp"

using namespace torus;

namespace {

const Presentation& pres13() {
    static const Presentation p = compile_presentation(ReprParams(1, 3));
    return p;
}

std::vector<DigitString> all_strings(int bound, int maxlen) {
    std::vector<DigitString> out{{}};
    std::vector<DigitString> layer{{}};
    for (int len = 1; len <= maxlen; ++len) {
        std::vector<DigitString> next;
        for (const auto& w : layer)
            for (int d = -bound; d <= bound; ++d) {
                DigitString e = w;
                e.push_back(d);
                next.push_back(e);
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("subgroup sample labels match the decode oracle") {
    const auto& pres = pres13();
    IntVec xi = IntVec::unit(2, 0), eta = IntVec::unit(2, 1);
    LabeledSample sx = subgroup_language_sample(pres, xi, 5);
    LabeledSample se = subgroup_language_sample(pres, eta, 5);

    CHECK(sx.member({1}));
    CHECK(sx.member({2}));
    CHECK_FALSE(sx.member({0, 1}));
    CHECK(se.member({0, 1}));
    CHECK_FALSE(se.member({1}));

    for (const auto& w : all_strings(2, 5)) {
        IntVec v = decode(w, pres);
        bool in_dom = accepts(pres.dom, w);
        bool xi_mult = v.r[1] == 0;  // multiples of (1,0)
        CHECK(sx.member(w) == (in_dom && xi_mult));
        bool eta_mult = v.r[0] == 0;
        CHECK(se.member(w) == (in_dom && eta_mult));
    }

    LabeledSample zero = subgroup_language_sample(pres, IntVec::zero(2), 4);
    for (const auto& w : all_strings(2, 4)) CHECK(zero.member(w) == (accepts(pres.dom, w) && decode(w, pres).is_zero()));
    CHECK(zero.member({}));

    // spec shape: entries are Dom strings with labels
    auto entries = sx.entries(pres.dom, 3);
    for (const auto& [w, label] : entries) {
        CHECK(accepts(pres.dom, w));
        CHECK(label == sx.member(w));
    }
}

TEST_CASE("nerode bound is sound on regular control languages") {
    const auto& pres = pres13();

    LabeledSample dom_sample = dom_language_sample(pres, 8);
    NerodeBound db = nerode_lower_bound(dom_sample, 4);
    CHECK(db.bound <= static_cast<int>(minimize(pres.dom).num_states) + 1);  // +1: the dead class is a state too

    LabeledSample cls = class_language_sample(pres, IntVec({4, 0}), 8);
    Dfa cls_dfa = minimize(fix_track(pres.equiv.dfa, 1, encode(IntVec({4, 0}), pres)));
    NerodeBound cb = nerode_lower_bound(cls, 4);
    CHECK(cb.bound <= static_cast<int>(cls_dfa.num_states) + 1);
}

TEST_CASE("nerode bound is monotone in maxlen and suffix_len") {
    const auto& pres = pres13();
    IntVec xi = IntVec::unit(2, 0);
    int prev = -1;
    for (int maxlen = 4; maxlen <= 8; ++maxlen) {
        LabeledSample s = subgroup_language_sample(pres, xi, maxlen);
        int b = nerode_lower_bound(s, 3).bound;
        CHECK(b >= prev);
        prev = b;
    }
    LabeledSample s8 = subgroup_language_sample(pres, xi, 8);
    prev = -1;
    for (int suffix = 0; suffix <= 4; ++suffix) {
        int b = nerode_lower_bound(s8, suffix).bound;
        CHECK(b >= prev);
        prev = b;
    }
}

TEST_CASE("L_xi residual growth preview") {
    const auto& pres = pres13();
    IntVec xi = IntVec::unit(2, 0);
    LabeledSample small = subgroup_language_sample(pres, xi, 5);
    LabeledSample big = subgroup_language_sample(pres, xi, 8);
    int b_small = nerode_lower_bound(small, 4).bound;
    int b_big = nerode_lower_bound(big, 4).bound;
    CHECK(b_big > b_small);

    // witnesses are pairwise distinguishable prefixes: spot-check the first few
    NerodeBound nb = nerode_lower_bound(big, 4);
    CHECK(static_cast<int>(nb.witnesses.size()) <= nb.bound);
    CHECK(nb.witnesses.size() >= 2);
}

TEST_CASE("zero-prefix witnesses") {
    const auto& pres = pres13();
    for (int k = 1; k <= 5; ++k) {
        DigitString w = zero_prefix_witness(pres, k);
        CHECK(leading_zeros(w) >= k);
        CHECK(accepts(pres.dom, w));
        BigInt qk = 1;
        for (int i = 0; i < k; ++i) qk *= pres.params.q;
        CHECK(decode(w, pres) == IntVec({qk, 0}));
    }
    // k = 0 edge: no zeros required, still well defined
    CHECK(leading_zeros(zero_prefix_witness(pres, 0)) >= 0);

    Presentation pres7 = compile_presentation(ReprParams(7, -11));
    for (int k = 1; k <= 5; ++k) {
        DigitString w = zero_prefix_witness(pres7, k);
        CHECK(leading_zeros(w) >= k);
    }
}

TEST_CASE("divisibility cascade of zero prefixes") {
    const auto& pres = pres13();
    // n = 9 = q * 3: encode(9) starts with m zeros, encode(3) with >= m-1
    DigitString w9 = encode(IntVec({9, 0}), pres);
    DigitString w3 = encode(IntVec({3, 0}), pres);
    int m = leading_zeros(w9);
    CHECK(m > 0);
    CHECK(leading_zeros(w3) >= m - 1);

    // chain q^k -> q^{k-1}
    for (int k = 5; k >= 1; --k) {
        BigInt qk = 1, qk1 = 1;
        for (int i = 0; i < k; ++i) qk *= pres.params.q;
        for (int i = 0; i + 1 < k; ++i) qk1 *= pres.params.q;
        int zk = leading_zeros(encode(IntVec({qk, 0}), pres));
        int zk1 = leading_zeros(encode(IntVec({qk1, 0}), pres));
        CHECK(zk > 0);
        CHECK(zk1 >= zk - 1);
    }
}
