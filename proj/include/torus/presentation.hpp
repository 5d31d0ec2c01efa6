#pragma once

#include <map>

#include "torus/automata.hpp"
#include "torus/core_ring.hpp"
#include "torus/words.hpp"

namespace torus {

// Carry vector (r_0, ..., r_{n-1}) of the positionwise equivalence /
// addition algorithms. Carries fit machine words even when coefficients do
// not.
struct CarryState {
    std::vector<std::int64_t> r;

    bool is_zero() const {
        return std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x == 0; });
    }
    bool operator==(const CarryState&) const = default;
    auto operator<=>(const CarryState&) const = default;
};

namespace detail {

// Machine-word view of the parameters for carry arithmetic.
struct CarryParams {
    int n;
    std::vector<std::int64_t> p;
    std::int64_t q;
    int bound;  // |q| - 1

    static CarryParams of(const ReprParams& params) {
        params.validate();
        CarryParams c;
        c.n = params.degree;
        if (abs(params.q) > 1000000) throw invalid_params("carry machinery requires |q| <= 10^6");
        c.q = to_int64(params.q);
        for (const auto& pi : params.p) c.p.push_back(to_int64(pi));
        c.bound = static_cast<int>(to_int64(abs(params.q))) - 1;
        return c;
    }

    // r_i <- r_{i+1} + p_{i+1} k (i < n-1), r_{n-1} <- k
    CarryState update(const CarryState& s, std::int64_t k) const {
        CarryState t;
        t.r.resize(n);
        for (int i = 0; i + 1 < n; ++i) t.r[i] = s.r[i + 1] + p[i] * k;
        t.r[n - 1] = k;
        return t;
    }
};

}  // namespace detail

// Declared carry bounds: |r_i| <= (|q|-1)(1 + |p_{n-1}| + ... + |p_{i+1}|);
// in particular |r_{n-1}| <= |q|-1 and |r_0| <= (|q|-1)^2.
inline std::vector<std::int64_t> carry_bounds(const ReprParams& params) {
    auto cp = detail::CarryParams::of(params);
    std::vector<std::int64_t> bounds(cp.n);
    std::int64_t running = 1;
    bounds[cp.n - 1] = cp.bound;
    for (int i = cp.n - 2; i >= 0; --i) {
        running += std::abs(cp.p[i]);
        bounds[i] = cp.bound * running;
    }
    return bounds;
}

// One step of the equivalence checker on digit pair (a, b); rejects (dead
// state) unless q divides r_0 + a - b.
inline std::optional<CarryState> equiv_carry_step(const ReprParams& params, const CarryState& s, int a, int b) {
    auto cp = detail::CarryParams::of(params);
    std::int64_t d = s.r[0] + a - b;
    if (d % cp.q != 0) return std::nullopt;
    return cp.update(s, d / cp.q);
}

// One step of the addition transducer on digit pair (a, b): emits the digit
// congruent to r_0 + a + b mod q with the sign of r_0 + a + b, and updates
// the carries.
inline std::pair<int, CarryState> add_carry_step(const ReprParams& params, const CarryState& s, int a, int b) {
    auto cp = detail::CarryParams::of(params);
    std::int64_t sum = s.r[0] + a + b;
    std::int64_t k = sum / cp.q;  // truncation toward zero
    int digit = static_cast<int>(sum - k * cp.q);
    return {digit, cp.update(s, k)};
}

// ---------------------------------------------------------------------------
// The addition transducer: digitwise emission with carry drain after the
// inputs are exhausted.
// ---------------------------------------------------------------------------
class AddTransducer {
public:
    explicit AddTransducer(const ReprParams& params) : params_(params), cp_(detail::CarryParams::of(params)) {}

    const ReprParams& params() const { return params_; }

    DigitString run(const DigitString& u, const DigitString& v) const {
        if (!digits_in_bounds(u, cp_.bound) || !digits_in_bounds(v, cp_.bound))
            throw invalid_params("add_strings: digit outside Sigma_q");
        DigitString out;
        CarryState carries;
        carries.r.assign(cp_.n, 0);
        std::size_t len = std::max(u.size(), v.size());
        for (std::size_t i = 0; i < len; ++i) {
            int a = i < u.size() ? u[i] : 0;
            int b = i < v.size() ? v[i] : 0;
            std::int64_t sum = carries.r[0] + a + b;
            std::int64_t k = sum / cp_.q;
            out.push_back(static_cast<int>(sum - k * cp_.q));
            carries = cp_.update(carries, k);
        }
        std::map<CarryState, int> seen;
        while (!carries.is_zero()) {
            if (!seen.emplace(carries, 1).second)
                throw internal_error("add transducer: carry cycle without reaching zero");
            std::int64_t sum = carries.r[0];
            std::int64_t k = sum / cp_.q;
            out.push_back(static_cast<int>(sum - k * cp_.q));
            carries = cp_.update(carries, k);
        }
        return out;
    }

private:
    ReprParams params_;
    detail::CarryParams cp_;
};

inline AddTransducer build_add_transducer(const ReprParams& params) { return AddTransducer(params); }

inline DigitString add_strings(const DigitString& u, const DigitString& v, const ReprParams& params) {
    return AddTransducer(params).run(u, v);
}

// ---------------------------------------------------------------------------
// Generic carry relation: accepts (w_1, ..., w_m) iff
// sum_i weight_i * poly(w_i) ~ 0. With weights (1,-1) this is the
// equivalence automaton; (1,1,-1) is the graph of +~; (c,-1) is
// multiplication by the constant c. Padding is read as digit 0; pad
// legality is tracked in the state. Acceptance is the zero-closure set:
// states from which the all-zero-digit step iterates to zero carries.
// ---------------------------------------------------------------------------
inline RelationAutomaton build_lincomb_relation(const ReprParams& params, const std::vector<std::int64_t>& weights,
                                                std::vector<std::string> labels,
                                                std::uint64_t budget = default_state_budget()) {
    auto cp = detail::CarryParams::of(params);
    const int m = static_cast<int>(weights.size());
    const int n = cp.n;

    // |k| stays within sum_i |weight_i| * (|q|-1); bounds follow the same
    // chain as the paper's. For (1,-1) the declared carry_bounds are
    // (sharper and) asserted by the callers' tests.
    std::int64_t kmax = 0;
    for (auto w : weights) kmax += std::abs(w) * cp.bound;
    std::vector<std::int64_t> bounds(n);
    std::int64_t running = 1;
    bounds[n - 1] = kmax;
    for (int i = n - 2; i >= 0; --i) {
        running += std::abs(cp.p[i]);
        bounds[i] = kmax * running;
    }

    Alphabet alpha{m, cp.bound};
    MachineBuilder builder(alpha, budget);
    // state layout: [pad flags (m), carries (n)]
    std::vector<int> init(m + n, 0);
    std::uint32_t init_id = builder.intern(init);

    while (auto popped = builder.pop()) {
        std::uint32_t id = *popped;
        const std::vector<int> st = builder.state(id);
        const std::uint32_t nsym = alpha.num_symbols();
        const std::uint32_t all_pad = alpha.all_pad_symbol();
        for (std::uint32_t sym = 0; sym < nsym; ++sym) {
            if (sym == all_pad) continue;
            std::vector<int> next(m + n);
            std::int64_t s = st[m];  // r_0
            bool ok = true;
            for (int t = 0; t < m && ok; ++t) {
                int v = alpha.track_value(sym, t);
                if (v == kPad) {
                    next[t] = 1;
                } else if (st[t]) {
                    ok = false;  // digit after padding
                } else {
                    next[t] = 0;
                    s += weights[t] * v;
                }
            }
            if (!ok || s % cp.q != 0) continue;
            std::int64_t k = s / cp.q;
            CarryState cur;
            cur.r.assign(st.begin() + m, st.end());
            CarryState upd = cp.update(cur, k);
            for (int i = 0; i < n; ++i) {
                if (std::abs(upd.r[i]) > bounds[i])
                    throw internal_error("carry out of declared bounds in lincomb relation");
                next[m + i] = static_cast<int>(upd.r[i]);
            }
            builder.add_transition(id, sym, builder.intern(next));
        }
    }

    // zero-closure acceptance on the carry part
    std::map<std::vector<int>, int> memo;  // carries -> 1 accept, -1 reject
    auto zero_closure = [&](std::vector<int> carries) {
        std::vector<std::vector<int>> path;
        int result = 0;
        while (true) {
            if (std::all_of(carries.begin(), carries.end(), [](int x) { return x == 0; })) {
                result = 1;
                break;
            }
            if (auto it = memo.find(carries); it != memo.end()) {
                result = it->second;
                break;
            }
            if (std::find(path.begin(), path.end(), carries) != path.end()) {
                result = -1;  // cycle without reaching zero
                break;
            }
            path.push_back(carries);
            std::int64_t s = carries[0];
            if (s % cp.q != 0) {
                result = -1;
                break;
            }
            CarryState cur;
            cur.r.assign(carries.begin(), carries.end());
            CarryState upd = cp.update(cur, s / cp.q);
            for (int i = 0; i < n; ++i) carries[i] = static_cast<int>(upd.r[i]);
        }
        for (const auto& c : path) memo[c] = result;
        return result == 1;
    };

    Dfa dfa = builder.finalize(init_id, [&](const std::vector<int>& st) {
        return zero_closure(std::vector<int>(st.begin() + m, st.end()));
    });
    return RelationAutomaton{detail::trim(dfa), std::move(labels)};
}

// Equivalence automaton: accepts (u, v) iff poly(u) ~ poly(v).
inline RelationAutomaton build_equiv_automaton(const ReprParams& params,
                                               std::uint64_t budget = default_state_budget()) {
    return build_lincomb_relation(params, {1, -1}, {"u", "v"}, budget);
}

// The relation {(x, y, z) : poly(x) + poly(y) ~ poly(z)} (the composition
// of the transducer graph R with ~ collapses to this single carry machine).
inline RelationAutomaton build_add_equiv_relation(const ReprParams& params,
                                                  std::uint64_t budget = default_state_budget()) {
    return build_lincomb_relation(params, {1, 1, -1}, {"x", "y", "sum"}, budget);
}

// ---------------------------------------------------------------------------
// The graph R of the addition transducer: for every (u, v) exactly one w is
// accepted, the emitted string itself. The digit on the third track is
// forced (congruent to r_0 + a + b mod q, sign matching); a step from zero
// carries with both inputs already exhausted would extend w with junk and
// is rejected instead.
// ---------------------------------------------------------------------------
inline RelationAutomaton build_add_relation(const ReprParams& params,
                                            std::uint64_t budget = default_state_budget()) {
    auto cp = detail::CarryParams::of(params);
    const int n = cp.n;
    auto bounds = carry_bounds(params);

    Alphabet alpha{3, cp.bound};
    MachineBuilder builder(alpha, budget);
    std::vector<int> init(2 + n, 0);  // [pad_u, pad_v, carries]
    std::uint32_t init_id = builder.intern(init);

    while (auto popped = builder.pop()) {
        std::uint32_t id = *popped;
        const std::vector<int> st = builder.state(id);
        bool carries_zero = std::all_of(st.begin() + 2, st.end(), [](int x) { return x == 0; });
        for (int da = -cp.bound; da <= cp.bound + 1; ++da) {      // bound+1 encodes pad
            for (int db = -cp.bound; db <= cp.bound + 1; ++db) {
                bool pa = da == cp.bound + 1, pb = db == cp.bound + 1;
                if (st[0] && !pa) continue;  // digit after padding
                if (st[1] && !pb) continue;
                if (pa && pb && carries_zero) continue;  // emission already ended
                int a = pa ? 0 : da, b = pb ? 0 : db;
                std::int64_t sum = st[2] + a + b;
                std::int64_t k = sum / cp.q;
                int digit = static_cast<int>(sum - k * cp.q);
                std::vector<int> next(2 + n);
                next[0] = st[0] || pa;
                next[1] = st[1] || pb;
                CarryState cur;
                cur.r.assign(st.begin() + 2, st.end());
                CarryState upd = cp.update(cur, k);
                for (int i = 0; i < n; ++i) {
                    if (std::abs(upd.r[i]) > bounds[i])
                        throw internal_error("carry out of declared bounds in add relation");
                    next[2 + i] = static_cast<int>(upd.r[i]);
                }
                ConvSymbol sym{pa ? kPad : da, pb ? kPad : db, digit};
                builder.add_transition(id, alpha.encode(sym), builder.intern(next));
            }
        }
    }

    Dfa dfa = builder.finalize(init_id, [&](const std::vector<int>& st) {
        return std::all_of(st.begin() + 2, st.end(), [](int x) { return x == 0; });
    });
    return RelationAutomaton{detail::trim(dfa), {"x", "y", "sum"}};
}

// ---------------------------------------------------------------------------
// llex-order tracker over (u, w) pairs: accepts iff u <llex w.
// ---------------------------------------------------------------------------
inline Dfa build_llex_less_tracker(int digit_bound) {
    enum : std::uint32_t { EQ = 0, LT = 1, GT = 2, U_SHORT = 3, W_SHORT = 4 };
    Alphabet alpha{2, digit_bound};
    Dfa d;
    d.alpha = alpha;
    d.num_states = 5;
    d.initial = EQ;
    d.accepting = {false, true, false, true, false};
    d.trans.assign(5, {});
    for (int a = -digit_bound; a <= digit_bound + 1; ++a) {
        for (int b = -digit_bound; b <= digit_bound + 1; ++b) {
            bool pa = a == digit_bound + 1, pb = b == digit_bound + 1;
            if (pa && pb) continue;
            std::uint32_t sym = alpha.encode({pa ? kPad : a, pb ? kPad : b});
            if (pa) {  // u ended first: u is llex-smaller whatever the digits said
                for (std::uint32_t s : {EQ, LT, GT, U_SHORT}) d.trans[s].push_back({sym, U_SHORT});
            } else if (pb) {
                for (std::uint32_t s : {EQ, LT, GT, W_SHORT}) d.trans[s].push_back({sym, W_SHORT});
            } else {
                std::uint32_t from_eq = a < b ? LT : (a > b ? GT : EQ);
                d.trans[EQ].push_back({sym, from_eq});
                d.trans[LT].push_back({sym, LT});
                d.trans[GT].push_back({sym, GT});
            }
        }
    }
    d.sort_transitions();
    return d;
}

// ---------------------------------------------------------------------------
// Dom: the llex-least representative of each ~-class. Build
// {(u,w) : u ~ w and u <llex w}, project away u to get the non-canonical
// strings, then complement among (pad-free) strings.
// ---------------------------------------------------------------------------
inline Dfa build_dom(const ReprParams& params, std::uint64_t budget = default_state_budget()) {
    RelationAutomaton equiv = build_equiv_automaton(params, budget);
    Dfa tracker = build_llex_less_tracker(equiv.dfa.alpha.digit_bound);
    Dfa smaller_equiv =
        synchronized_product(equiv.dfa.alpha, {{&equiv.dfa, {0, 1}}, {&tracker, {0, 1}}}, budget);
    Dfa noncanonical = determinize(project(smaller_equiv, 0), budget);
    return minimize(complement(noncanonical));
}

// ---------------------------------------------------------------------------
// A compiled presentation psi_{p,q}.
// ---------------------------------------------------------------------------
struct Presentation {
    ReprParams params;
    RelationAutomaton equiv;    // arity 2
    RelationAutomaton add_rel;  // arity 3, graph of the transducer
    Dfa dom;

    int digit_bound() const { return equiv.dfa.alpha.digit_bound; }
};

inline Presentation compile_presentation(const ReprParams& params,
                                         std::uint64_t budget = default_state_budget()) {
    Presentation pres;
    pres.params = params;
    pres.equiv = build_equiv_automaton(params, budget);
    pres.add_rel = build_add_relation(params, budget);

    Dfa tracker = build_llex_less_tracker(pres.equiv.dfa.alpha.digit_bound);
    Dfa smaller_equiv =
        synchronized_product(pres.equiv.dfa.alpha, {{&pres.equiv.dfa, {0, 1}}, {&tracker, {0, 1}}}, budget);
    Dfa noncanonical = determinize(project(smaller_equiv, 0), budget);
    pres.dom = minimize(complement(noncanonical));
    return pres;
}

// Add on Dom: {(x,y,z) in Dom^3 : x + y ~ z}, assembled as the spec
// composition: R(x,y,w) and w ~ z, project w, restrict every track to Dom.
inline RelationAutomaton build_add_on_dom(const Presentation& pres,
                                          std::uint64_t budget = default_state_budget()) {
    Alphabet four{4, pres.digit_bound()};
    std::vector<ProductComponent> comps{
        {&pres.add_rel.dfa, {0, 1, 3}}, {&pres.equiv.dfa, {3, 2}},
        {&pres.dom, {0}},               {&pres.dom, {1}},
        {&pres.dom, {2}},
    };
    Dfa joint = synchronized_product(four, comps, budget);
    Dfa add = minimize(determinize(project(joint, 3), budget));
    return RelationAutomaton{std::move(add), {"x", "y", "z"}};
}

// decode = residue of the string's polynomial: the bijection's easy half.
inline IntVec decode(const DigitString& w, const Presentation& pres) {
    if (!digits_in_bounds(w, pres.digit_bound())) throw invalid_params("decode: digit outside Sigma_q");
    return residue(string_to_poly(w), pres.params);
}

// encode = the llex-least member of the class of v: fix the second track of
// the equivalence automaton to a reduced representative and take the least
// accepted string.
inline DigitString encode(const IntVec& v, const Presentation& pres,
                          std::uint64_t budget = default_state_budget()) {
    if (v.n() != pres.params.degree) throw invalid_params("encode: vector length != degree");
    DigitString w0 = poly_to_string(reduce(v.to_poly(), pres.params));
    Dfa cls = fix_track(pres.equiv.dfa, 1, w0, budget);
    auto least = llex_least_member(cls);
    if (!least) throw internal_error("encode: equivalence class has no representative");
    return *least;
}

// All strings accepted by an arity-1 automaton, up to a length, in llex
// order.
inline std::vector<DigitString> enumerate_accepted(const Dfa& d, int maxlen) {
    if (d.alpha.arity != 1) throw invalid_params("enumerate_accepted: arity-1 automaton required");
    std::vector<DigitString> out;
    std::vector<std::pair<DigitString, std::uint32_t>> layer{{DigitString{}, d.initial}};
    if (d.accepting[d.initial]) out.push_back({});
    for (int len = 1; len <= maxlen; ++len) {
        std::vector<std::pair<DigitString, std::uint32_t>> next;
        for (const auto& [w, s] : layer) {
            for (const auto& [sym, t] : d.trans[s]) {
                int digit = d.alpha.track_value(sym, 0);
                if (digit == kPad) continue;
                DigitString e = w;
                e.push_back(digit);
                if (d.accepting[t]) out.push_back(e);
                next.push_back({std::move(e), t});
            }
        }
        layer = std::move(next);
    }
    return out;
}

}  // namespace torus
