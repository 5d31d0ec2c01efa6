#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "torus/automata.hpp"
#include "torus/automata_io.hpp"

using namespace torus;

namespace {

// Brute-force enumeration of all padding-legal convolution strings up to a
// length, as digit tuples.
std::vector<std::vector<DigitString>> all_tuples(int arity, int bound, int maxlen) {
    std::vector<DigitString> words{{}};
    std::vector<DigitString> layer{{}};
    for (int len = 1; len <= maxlen; ++len) {
        std::vector<DigitString> next;
        for (const auto& w : layer)
            for (int d = -bound; d <= bound; ++d) {
                DigitString e = w;
                e.push_back(d);
                next.push_back(e);
            }
        words.insert(words.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    std::vector<std::vector<DigitString>> out;
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
        std::vector<DigitString> tuple;
        for (int t = 0; t < arity; ++t) tuple.push_back(words[idx[t]]);
        out.push_back(std::move(tuple));
        int t = 0;
        for (; t < arity; ++t) {
            if (++idx[t] < words.size()) break;
            idx[t] = 0;
        }
        if (t == arity) break;
    }
    return out;
}

// A small deterministic "divisibility of digit-sum" language for testing:
// accepts tuples whose per-position digit sum (pads = 0) totals 0 mod m.
Dfa digit_sum_mod(const Alphabet& alpha, int m, int accept_class) {
    Dfa d;
    d.alpha = alpha;
    d.num_states = static_cast<std::uint32_t>(m) * (1u << alpha.arity);
    // state = (sum mod m, padded mask); encode mask * m + sum
    auto id = [&](int sum, unsigned mask) { return static_cast<std::uint32_t>(mask * m + sum); };
    d.initial = id(0, 0);
    d.accepting.assign(d.num_states, false);
    d.trans.assign(d.num_states, {});
    const unsigned full = (1u << alpha.arity) - 1;
    for (unsigned mask = 0; mask < full; ++mask) {
        for (int sum = 0; sum < m; ++sum) {
            for (std::uint32_t sym = 0; sym < alpha.num_symbols(); ++sym) {
                if (sym == alpha.all_pad_symbol()) continue;
                unsigned next_mask = mask;
                int add = 0;
                bool ok = true;
                for (int t = 0; t < alpha.arity && ok; ++t) {
                    int v = alpha.track_value(sym, t);
                    if (mask & (1u << t)) {
                        ok = v == kPad;
                    } else if (v == kPad) {
                        next_mask |= 1u << t;
                    } else {
                        add += v;
                    }
                }
                if (!ok || next_mask == full) continue;
                int next_sum = ((sum + add) % m + m) % m;
                d.trans[id(sum, mask)].push_back({sym, id(next_sum, next_mask)});
            }
            std::sort(d.trans[id(sum, mask)].begin(), d.trans[id(sum, mask)].end());
        }
    }
    for (unsigned mask = 0; mask < full; ++mask) d.accepting[id(accept_class, mask)] = true;
    return d;
}

}  // namespace

TEST_CASE("alphabet symbol codec") {
    Alphabet a{3, 2};
    for (std::uint32_t code = 0; code < a.num_symbols(); ++code) {
        ConvSymbol sym = a.decode(code);
        CHECK(a.encode(sym) == code);
        for (int t = 0; t < 3; ++t) CHECK(a.track_value(code, t) == sym[t]);
    }
    CHECK(a.decode(a.all_pad_symbol()) == ConvSymbol{kPad, kPad, kPad});
}

TEST_CASE("universe accepts exactly the padding-legal strings") {
    Alphabet a{2, 1};
    Dfa u = universe(a);
    for (const auto& tuple : all_tuples(2, 1, 3)) CHECK(accepts_tuple(u, tuple));
    // digits after padding are rejected
    ConvString bad{{kPad, 1}, {1, 1}};
    CHECK_FALSE(accepts(u, bad));
}

TEST_CASE("boolean algebra identities at language level") {
    Alphabet a{2, 2};
    Dfa L = digit_sum_mod(a, 3, 0);
    Dfa M = digit_sum_mod(a, 2, 1);
    Dfa co = complement(L);

    CHECK(is_empty(intersect(L, co)));
    CHECK(equal_language(complement(co), L));
    CHECK(equal_language(union_of(L, Dfa::empty_language(a)), L));
    CHECK(equal_language(union_of(L, M), union_of(M, L)));
    CHECK(equal_language(intersect(L, universe(a)), L));

    // spot-check complement semantics against brute force
    for (const auto& tuple : all_tuples(2, 2, 2)) {
        CHECK(accepts_tuple(co, tuple) == !accepts_tuple(L, tuple));
        CHECK(accepts_tuple(union_of(L, M), tuple) == (accepts_tuple(L, tuple) || accepts_tuple(M, tuple)));
        CHECK(accepts_tuple(intersect(L, M), tuple) == (accepts_tuple(L, tuple) && accepts_tuple(M, tuple)));
    }
}

TEST_CASE("determinize and minimize preserve the language") {
    Alphabet a{1, 2};
    Dfa L = digit_sum_mod(a, 4, 2);
    Nfa n;
    n.alpha = a;
    n.num_states = L.num_states;
    n.initials = {L.initial};
    n.accepting = L.accepting;
    n.trans = L.trans;
    Dfa det = determinize(n);
    Dfa min = minimize(det);
    CHECK(min.num_states <= det.num_states);
    for (const auto& tuple : all_tuples(1, 2, 4)) {
        CHECK(accepts_tuple(det, tuple) == accepts_tuple(L, tuple));
        CHECK(accepts_tuple(min, tuple) == accepts_tuple(L, tuple));
    }
    // language-equal automata minimize to identical canonical forms
    Dfa min2 = minimize(L);
    CHECK(min.num_states == min2.num_states);
    CHECK(min.trans == min2.trans);
    CHECK(min.accepting == min2.accepting);
}

TEST_CASE("projection of the equality relation is everything") {
    Alphabet pair_alpha{2, 1};
    // equality relation {(w,w)}: 1 live state; transitions on equal digit pairs
    Dfa eq;
    eq.alpha = pair_alpha;
    eq.num_states = 1;
    eq.initial = 0;
    eq.accepting = {true};
    eq.trans.assign(1, {});
    for (int d = -1; d <= 1; ++d) eq.trans[0].push_back({pair_alpha.encode({d, d}), 0});
    eq.sort_transitions();

    Dfa all = minimize(determinize(project(eq, 1)));
    for (const auto& tuple : all_tuples(1, 1, 3)) CHECK(accepts_tuple(all, tuple));

    Dfa none = minimize(determinize(project(Dfa::empty_language(pair_alpha), 0)));
    CHECK(is_empty(none));
}

TEST_CASE("projection agrees with brute-force exists") {
    // L = digit-sum of both tracks == 0 mod 3; project track 1
    Alphabet a{2, 1};
    Dfa L = digit_sum_mod(a, 3, 0);
    Dfa proj = minimize(determinize(project(L, 1)));
    auto words = all_tuples(1, 1, 3);
    auto longer = all_tuples(1, 1, 5);
    for (const auto& w : words) {
        bool expect = false;
        for (const auto& v : longer)
            if (accepts_tuple(L, std::vector<DigitString>{w[0], v[0]})) {
                expect = true;
                break;
            }
        CHECK(accepts_tuple(proj, w) == expect);
    }
}

TEST_CASE("fix_track reduces to membership and handles tails") {
    Alphabet a{2, 1};
    Dfa L = digit_sum_mod(a, 3, 0);
    for (const DigitString& w : {DigitString{}, DigitString{1}, DigitString{1, -1, 1}}) {
        Dfa fixed = fix_track(L, 1, w);
        for (const auto& u : all_tuples(1, 1, 4))
            CHECK(accepts_tuple(fixed, u) == accepts_tuple(L, std::vector<DigitString>{u[0], w}));
    }
    CHECK(is_empty(fix_track(Dfa::empty_language(a), 0, {1})));
}

TEST_CASE("llex_least_member") {
    Alphabet a{1, 2};
    // all strings: least is epsilon
    Dfa all;
    all.alpha = a;
    all.num_states = 1;
    all.accepting = {true};
    all.trans.assign(1, {});
    for (int d = -2; d <= 2; ++d) all.trans[0].push_back({a.encode({d}), 0});
    all.sort_transitions();
    CHECK(llex_least_member(all) == DigitString{});

    CHECK_FALSE(llex_least_member(Dfa::empty_language(a)).has_value());

    // sum == 2 mod 4: least must match brute force in llex order
    Dfa L = digit_sum_mod(a, 4, 2);
    auto got = llex_least_member(L);
    REQUIRE(got.has_value());
    std::optional<DigitString> expect;
    for (const auto& t : all_tuples(1, 2, 3)) {
        if (!accepts_tuple(L, t)) continue;
        if (!expect || llex_compare(t[0], *expect) < 0) expect = t[0];
    }
    REQUIRE(expect.has_value());
    CHECK(*got == *expect);
    // nothing llex-smaller is accepted
    for (const auto& t : all_tuples(1, 2, static_cast<int>(got->size())))
        if (llex_compare(t[0], *got) < 0) CHECK_FALSE(accepts_tuple(L, t));
}

TEST_CASE("count_accepted counts") {
    Alphabet a{1, 2};
    Dfa all;
    all.alpha = a;
    all.num_states = 1;
    all.accepting = {true};
    all.trans.assign(1, {});
    for (int d = -2; d <= 2; ++d) all.trans[0].push_back({a.encode({d}), 0});
    all.sort_transitions();
    CHECK(count_accepted(all, 2) == 31);  // 1 + 5 + 25
    CHECK(count_accepted(Dfa::empty_language(a), 5) == 0);
}

TEST_CASE("synchronized product with shared tracks") {
    Alphabet a2{2, 1};
    Alphabet a3{3, 1};
    Dfa L = digit_sum_mod(a2, 2, 0);
    Dfa M = digit_sum_mod(a2, 3, 0);
    // tracks (x,y,z): L on (x,y), M on (y,z)
    Dfa prod = synchronized_product(a3, {{&L, {0, 1}}, {&M, {1, 2}}});
    for (const auto& t : all_tuples(3, 1, 2)) {
        bool expect = accepts_tuple(L, std::vector<DigitString>{t[0], t[1]}) &&
                      accepts_tuple(M, std::vector<DigitString>{t[1], t[2]});
        CHECK(accepts_tuple(prod, t) == expect);
    }
}

TEST_CASE("JSON round trip") {
    Alphabet a{2, 2};
    Dfa L = minimize(digit_sum_mod(a, 3, 1));
    nlohmann::json j = to_json(L);
    Dfa back = dfa_from_json(j);
    CHECK(equal_language(L, back));
    CHECK(back.num_states == L.num_states);

    RelationAutomaton r{L, {"u", "v"}};
    auto rj = to_json(r);
    CHECK(relation_from_json(rj).tracks == r.tracks);

    nlohmann::json broken = j;
    broken.erase("initial");
    CHECK_THROWS_AS(dfa_from_json(broken), invalid_params);
}

TEST_CASE("DOT export mentions all states") {
    Alphabet a{1, 1};
    Dfa L = minimize(digit_sum_mod(a, 2, 0));
    std::string dot = to_dot(L, "mod2");
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("doublecircle") != std::string::npos);
}

TEST_CASE("state budget guard") {
    Alphabet a{1, 2};
    Dfa L = digit_sum_mod(a, 5, 0);
    Nfa n;
    n.alpha = a;
    n.num_states = L.num_states;
    n.initials = {L.initial};
    n.accepting = L.accepting;
    n.trans = L.trans;
    CHECK_THROWS_AS(determinize(n, 2), state_budget_exceeded);
}
