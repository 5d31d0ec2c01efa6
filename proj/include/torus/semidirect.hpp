#pragma once

#include <random>

#include "torus/linmaps.hpp"
#include "torus/pell.hpp"

namespace torus {

// ---------------------------------------------------------------------------
// Elements of Z^n x|_A Z: pairs (b, h) with
// (b1, h1)(b2, h2) = (b1 + b2, A^{b2} h1 + h2).
// ---------------------------------------------------------------------------
struct SemiElement {
    BigInt b;
    IntVec h;

    bool operator==(const SemiElement&) const = default;
    std::string str() const { return "(" + b.str() + "," + h.str() + ")"; }
};

inline SemiElement multiply(const SemiElement& g1, const SemiElement& g2, const Mat2& A) {
    return {g1.b + g2.b, mat_apply(A.pow(g2.b), g1.h) + g2.h};
}

inline SemiElement semi_inverse(const SemiElement& g, const Mat2& A) {
    IntVec moved = mat_apply(A.pow(-g.b), g.h);
    return {-g.b, BigInt(-1) * moved};
}

// ---------------------------------------------------------------------------
// psi_1: the Z factor as sign flag + least-significant-first binary
// magnitude, over an alphabet disjoint from Sigma_q. In the combined
// alphabet of digit bound B+3, Sigma_1 = {B+1 (bit 0), B+2 (bit 1),
// B+3 (minus)} and Sigma_2 = [-B, B].
// ---------------------------------------------------------------------------
struct ZAlphabet {
    int base_bound;  // B of the underlying Sigma_q
    int zero() const { return base_bound + 1; }
    int one() const { return base_bound + 2; }
    int neg() const { return base_bound + 3; }
    int combined_bound() const { return base_bound + 3; }
    bool is_sigma1(int d) const { return d >= zero() && d <= neg(); }
    bool is_sigma2(int d) const { return d >= -base_bound && d <= base_bound; }
};

inline DigitString encode_int(const BigInt& value, const ZAlphabet& za) {
    DigitString out;
    if (value == 0) return out;
    if (value < 0) out.push_back(za.neg());
    BigInt m = abs(value);
    while (m > 0) {
        out.push_back((m & 1) != 0 ? za.one() : za.zero());
        m >>= 1;
    }
    return out;
}

inline BigInt decode_int(const DigitString& w, const ZAlphabet& za) {
    std::size_t i = 0;
    bool negative = false;
    if (i < w.size() && w[i] == za.neg()) {
        negative = true;
        ++i;
    }
    if (i == w.size() && negative) throw invalid_params("decode_int: lone sign flag");
    if (i < w.size() && w.back() != za.one())
        throw invalid_params("decode_int: magnitude must end with a one bit");
    BigInt m = 0, bit = 1;
    for (; i < w.size(); ++i) {
        if (w[i] == za.one())
            m += bit;
        else if (w[i] != za.zero())
            throw invalid_params("decode_int: symbol outside Sigma_1");
        bit <<= 1;
    }
    return negative ? BigInt(-m) : m;
}

// Reinterpret a Dfa over digit bound B as one over a wider bound; digits
// keep their values, padding maps to the wider padding.
inline Dfa widen_alphabet(const Dfa& d, int new_bound) {
    if (new_bound < d.alpha.digit_bound) throw invalid_params("widen_alphabet: bound must not shrink");
    Dfa out = d;
    out.alpha = Alphabet{d.alpha.arity, new_bound};
    for (auto& row : out.trans) {
        for (auto& [sym, tgt] : row) {
            ConvSymbol cs = d.alpha.decode(sym);
            sym = out.alpha.encode(cs);
        }
    }
    out.sort_transitions();
    return out;
}

// ---------------------------------------------------------------------------
// The successor relation INC = {(u, v) : psi_1(v) = psi_1(u) + 1} on
// canonical Sigma_1 strings, as a Dfa over the combined alphabet.
// ---------------------------------------------------------------------------
inline Dfa build_increment_relation(const ZAlphabet& za) {
    Alphabet alpha{2, za.combined_bound()};
    // Acceptance requires both tracks to be canonical (magnitudes end with
    // a one bit), so the copy states track the last digit pair.
    enum : std::uint32_t {
        START = 0,     // nothing read
        CARRY = 1,     // positive increment, carry pending
        COPY_ZO = 2,   // copy mode just after the carry resolved (u ended 0 here)
        COPY_ZZ = 3,   // copy mode, last pair (0,0)
        COPY_OO = 4,   // copy mode, last pair (1,1): accept
        NEG_ONE = 5,   // read (neg, pad); u must be exactly minus one
        BORROW0 = 6,   // negative decrement, borrow pending, no digits yet
        BORROW1 = 7,   // borrow pending after at least one digit
        DCOPY_OZ = 8,  // borrow resolved here (v ended 0)
        DCOPY_ZZ = 9,
        DCOPY_OO = 10,  // accept
        FIN = 11,       // accepting sink with no outgoing transitions
        COUNT = 12
    };
    Dfa d;
    d.alpha = alpha;
    d.num_states = COUNT;
    d.initial = START;
    d.accepting.assign(COUNT, false);
    for (std::uint32_t s : {COPY_OO, DCOPY_OO, FIN}) d.accepting[s] = true;
    d.trans.assign(COUNT, {});
    const int Z = za.zero(), O = za.one(), N = za.neg();
    auto add = [&](std::uint32_t from, int a, int b, std::uint32_t to) {
        d.trans[from].push_back({alpha.encode({a, b}), to});
    };
    // value 0 -> 1: u = eps, v = one bit
    add(START, kPad, O, FIN);
    // positive increment (carry starts pending)
    add(START, Z, O, COPY_ZO);
    add(START, O, Z, CARRY);
    add(CARRY, Z, O, COPY_ZO);
    add(CARRY, O, Z, CARRY);
    add(CARRY, kPad, O, FIN);  // carry overflow: v one digit longer
    for (std::uint32_t s : {COPY_ZO, COPY_ZZ, COPY_OO}) {
        add(s, Z, Z, COPY_ZZ);
        add(s, O, O, COPY_OO);
    }
    // minus one -> 0: u = sign + one bit, v = eps
    add(START, N, kPad, NEG_ONE);
    add(NEG_ONE, O, kPad, FIN);
    // negative decrement: -m -> -(m-1), m >= 2
    add(START, N, N, BORROW0);
    add(BORROW0, Z, O, BORROW1);
    add(BORROW0, O, Z, DCOPY_OZ);
    add(BORROW1, Z, O, BORROW1);
    add(BORROW1, O, Z, DCOPY_OZ);
    add(BORROW1, O, kPad, FIN);  // magnitude was a power of two: v one digit shorter
    for (std::uint32_t s : {DCOPY_OZ, DCOPY_ZZ, DCOPY_OO}) {
        add(s, Z, Z, DCOPY_ZZ);
        add(s, O, O, DCOPY_OO);
    }
    d.sort_transitions();
    return d;
}

// Identity relation on canonical Sigma_1 strings.
inline Dfa build_identity_sigma1(const ZAlphabet& za) {
    Alphabet alpha{2, za.combined_bound()};
    enum : std::uint32_t { EMPTY = 0, SIGN = 1, BITS_Z = 2, BITS_O = 3, COUNT = 4 };
    Dfa d;
    d.alpha = alpha;
    d.num_states = COUNT;
    d.initial = EMPTY;
    d.accepting = {true, false, false, true};
    d.trans.assign(COUNT, {});
    const int Z = za.zero(), O = za.one(), N = za.neg();
    auto add = [&](std::uint32_t from, int a, std::uint32_t to) {
        d.trans[from].push_back({alpha.encode({a, a}), to});
    };
    add(EMPTY, N, SIGN);
    for (std::uint32_t s : {EMPTY, SIGN, BITS_Z, BITS_O}) {
        add(s, Z, BITS_Z);
        add(s, O, BITS_O);
    }
    d.sort_transitions();
    return d;
}

// ---------------------------------------------------------------------------
// Concatenation-aware product: accepts (u1 v1, u2 v2) with u's over
// Sigma_1, v's over Sigma_2, iff rel1 accepts (u1, u2) and rel2 accepts
// (v1, v2). The Sigma_2 halves may start at different positions (the
// Sigma_1 halves of a related pair may differ in length); a small buffer
// re-aligns them, capped by the largest length skew rel1 can relate.
// ---------------------------------------------------------------------------
inline Dfa concat_product(const Dfa& rel1, const Dfa& rel2, const ZAlphabet& za, int skew_cap = 2,
                          std::uint64_t budget = default_state_budget()) {
    Alphabet alpha{2, za.combined_bound()};
    if (!(rel1.alpha == alpha) || !(rel2.alpha == alpha))
        throw invalid_params("concat_product: components must share the combined alphabet");

    // state layout: [ph1, ph2, r1 (0 = done), r2, dir, blen, buf0, buf1]
    // phases: 0 = reading Sigma_1, 1 = reading Sigma_2, 2 = ended
    constexpr int IN1 = 0, IN2 = 1, ENDED = 2;
    const int BUFPAD = za.combined_bound() + 1;  // buffered "track ended" marker

    enum Cls { SIG1, SIG2, PAD };
    auto classify = [&](int digit) -> std::optional<Cls> {
        if (digit == kPad) return PAD;
        if (za.is_sigma1(digit)) return SIG1;
        if (za.is_sigma2(digit)) return SIG2;
        return std::nullopt;
    };

    MachineBuilder builder(alpha, budget);
    std::vector<int> init{IN1, IN1, static_cast<int>(rel1.initial) + 1, static_cast<int>(rel2.initial),
                          0,   0,   0,                                  0};
    std::uint32_t init_id = builder.intern(init);

    while (auto popped = builder.pop()) {
        std::uint32_t id = *popped;
        const std::vector<int> st = builder.state(id);
        for (int sa = -alpha.digit_bound; sa <= alpha.digit_bound + 1; ++sa) {
            for (int sb = -alpha.digit_bound; sb <= alpha.digit_bound + 1; ++sb) {
                int a = sa == alpha.digit_bound + 1 ? kPad : sa;
                int b = sb == alpha.digit_bound + 1 ? kPad : sb;
                if (a == kPad && b == kPad) continue;
                auto ca = classify(a), cb = classify(b);
                if (!ca || !cb) continue;
                int ph1 = st[0], ph2 = st[1], r1 = st[2], r2 = st[3];
                int dir = st[4], blen = st[5];
                int buf[2] = {st[6], st[7]};

                // phase legality and update
                auto advance = [&](int ph, Cls c) -> std::optional<int> {
                    if (c == SIG1) return ph == IN1 ? std::optional<int>(IN1) : std::nullopt;
                    if (c == SIG2) return ph == ENDED ? std::nullopt : std::optional<int>(IN2);
                    return std::optional<int>(ENDED);
                };
                auto np1 = advance(ph1, *ca), np2 = advance(ph2, *cb);
                if (!np1 || !np2) continue;

                // feed rel1 while either track is still in its Sigma_1 part
                bool in1a = ph1 == IN1 && *ca == SIG1;
                bool in1b = ph2 == IN1 && *cb == SIG1;
                if (in1a || in1b) {
                    if (r1 == 0) continue;  // Sigma_1 digits after rel1 finished
                    auto t = rel1.step(r1 - 1, alpha.encode({in1a ? a : kPad, in1b ? b : kPad}));
                    if (!t) continue;
                    r1 = static_cast<int>(*t) + 1;
                }
                if (r1 != 0 && *np1 != IN1 && *np2 != IN1) {
                    if (!rel1.accepting[r1 - 1]) continue;
                    r1 = 0;
                }

                // Sigma_2 stream contributions (digit, or BUFPAD once ended)
                std::optional<int> con1, con2;
                if (!(ph1 == IN1 && *ca == SIG1)) con1 = (*ca == SIG2) ? a : BUFPAD;
                if (!(ph2 == IN1 && *cb == SIG1)) con2 = (*cb == SIG2) ? b : BUFPAD;

                auto feed2 = [&](int x, int y) -> bool {  // BUFPAD = padding
                    if (x == BUFPAD && y == BUFPAD) return true;  // beyond rel2's convolution
                    auto t = rel2.step(r2, alpha.encode({x == BUFPAD ? kPad : x, y == BUFPAD ? kPad : y}));
                    if (!t) return false;
                    r2 = static_cast<int>(*t);
                    return true;
                };
                bool ok = true;
                if (con1 && con2) {
                    if (dir == 0) {
                        ok = feed2(*con1, *con2);
                    } else if (dir == 1) {  // track 1 ahead: rotate its queue (size unchanged)
                        int front = buf[0];
                        buf[0] = buf[1];
                        buf[1] = 0;
                        buf[blen - 1] = *con1;
                        ok = feed2(front, *con2);
                    } else {
                        int front = buf[0];
                        buf[0] = buf[1];
                        buf[1] = 0;
                        buf[blen - 1] = *con2;
                        ok = feed2(*con1, front);
                    }
                } else if (con1) {
                    if (dir == 2) {  // track 2 was ahead: consume its oldest
                        ok = feed2(*con1, buf[0]);
                        buf[0] = buf[1];
                        buf[1] = 0;
                        if (--blen == 0) dir = 0;
                    } else {
                        if (blen >= skew_cap) {
                            ok = false;
                        } else {
                            dir = 1;
                            buf[blen++] = *con1;
                        }
                    }
                } else if (con2) {
                    if (dir == 1) {
                        ok = feed2(buf[0], *con2);
                        buf[0] = buf[1];
                        buf[1] = 0;
                        if (--blen == 0) dir = 0;
                    } else {
                        if (blen >= skew_cap) {
                            ok = false;
                        } else {
                            dir = 2;
                            buf[blen++] = *con2;
                        }
                    }
                }
                if (!ok) continue;

                std::vector<int> next{*np1, *np2, r1, r2, dir, blen, buf[0], buf[1]};
                builder.add_transition(id, alpha.encode({a, b}), builder.intern(next));
            }
        }
    }

    Dfa dfa = builder.finalize(init_id, [&](const std::vector<int>& st) {
        int r1 = st[2], r2 = st[3], dir = st[4], blen = st[5];
        if (r1 != 0 && !rel1.accepting[r1 - 1]) return false;  // string ended inside Sigma_1
        // drain the skew buffer against padding on the other side
        std::uint32_t s2 = static_cast<std::uint32_t>(r2);
        for (int i = 0; i < blen; ++i) {
            int x = st[6 + i];
            if (x == BUFPAD) continue;
            ConvSymbol sym = dir == 1 ? ConvSymbol{x, kPad} : ConvSymbol{kPad, x};
            auto t = rel2.step(s2, alpha.encode(sym));
            if (!t) return false;
            s2 = *t;
        }
        return static_cast<bool>(rel2.accepting[s2]);
    });
    return detail::trim(dfa);
}

// ---------------------------------------------------------------------------
// The assembled Cayley automatic representation of Z^2 x|_A Z over a
// Nies-Semukhin presentation psi_2 = psi_{p,q} and the binary psi_1.
// ---------------------------------------------------------------------------
struct SemiRepresentation {
    ReprParams params;
    Mat2 A;
    PolyMap g;  // poly_of_matrix(A)
    Presentation pres;
    ZAlphabet za;
    RelationAutomaton phi_a;                  // phi_g restricted to Dom^2 (Sigma_q alphabet)
    std::vector<RelationAutomaton> multipliers;  // index 0..n for g_0..g_n (combined alphabet)
};

inline DigitString encode_element(const SemiElement& e, const SemiRepresentation& rep) {
    DigitString w = encode_int(e.b, rep.za);
    DigitString tail = encode(e.h, rep.pres);
    w.insert(w.end(), tail.begin(), tail.end());
    return w;
}

inline SemiElement decode_element(const DigitString& w, const SemiRepresentation& rep) {
    std::size_t split = 0;
    while (split < w.size() && rep.za.is_sigma1(w[split])) ++split;
    DigitString left(w.begin(), w.begin() + split), right(w.begin() + split, w.end());
    return {decode_int(left, rep.za), decode(right, rep.pres)};
}

inline SemiRepresentation build_representation(const Mat2& A, const Presentation& pres,
                                               std::uint64_t budget = default_state_budget()) {
    auto g = poly_of_matrix(A, pres.params);
    if (!g)
        throw invalid_params("build_representation: A is not a multiplication matrix for these parameters");
    BigInt d = A.det();
    if (d != 1 && d != -1) throw invalid_params("build_representation: A is not in GL(2,Z)");

    SemiRepresentation rep;
    rep.params = pres.params;
    rep.A = A;
    rep.g = *g;
    rep.pres = pres;
    rep.za = ZAlphabet{pres.digit_bound()};

    RelationAutomaton phi = build_phi_g_relation(*g, pres, budget);
    Alphabet two{2, pres.digit_bound()};
    Dfa phi_dom = minimize(synchronized_product(
        two, {{&phi.dfa, {0, 1}}, {&pres.dom, {0}}, {&pres.dom, {1}}}, budget));
    rep.phi_a = RelationAutomaton{std::move(phi_dom), {"h", "A*h"}};

    const int wide = rep.za.combined_bound();
    Dfa inc = build_increment_relation(rep.za);
    Dfa id1 = build_identity_sigma1(rep.za);
    Dfa phi_wide = widen_alphabet(rep.phi_a.dfa, wide);
    rep.multipliers.push_back(
        RelationAutomaton{concat_product(inc, phi_wide, rep.za, 2, budget), {"g", "g*g0"}});

    RelationAutomaton add_equiv = build_add_equiv_relation(pres.params, budget);
    for (int i = 1; i <= pres.params.degree; ++i) {
        DigitString ei = encode(IntVec::unit(pres.params.degree, i - 1), pres);
        Dfa translated = fix_track(add_equiv.dfa, 1, ei, budget);  // {(x, z) : x + e_i ~ z}
        Dfa on_dom = minimize(synchronized_product(
            two, {{&translated, {0, 1}}, {&pres.dom, {0}}, {&pres.dom, {1}}}, budget));
        Dfa wide_rel = widen_alphabet(on_dom, wide);
        rep.multipliers.push_back(
            RelationAutomaton{concat_product(id1, wide_rel, rep.za, 2, budget),
                              {"g", "g*g" + std::to_string(i)}});
    }
    return rep;
}

inline const RelationAutomaton& build_multiplier(const SemiRepresentation& rep, int generator_index) {
    if (generator_index < 0 || generator_index > rep.params.degree)
        throw invalid_params("build_multiplier: generator index out of range");
    return rep.multipliers[generator_index];
}

// Right multiplication by the generator index i at the oracle level.
inline SemiElement apply_generator(const SemiElement& e, int i, const SemiRepresentation& rep) {
    if (i == 0) return {e.b + 1, mat_apply(rep.A, e.h)};
    return {e.b, e.h + IntVec::unit(rep.params.degree, i - 1)};
}

// ---------------------------------------------------------------------------
// Property a): the subgroup language L_{Z^n} (the b = 0 slice of L) is
// regular, and R_A = {(u, v) : A psi(u) = psi(v)} is FA-recognizable.
// ---------------------------------------------------------------------------
struct PropertyAReport {
    Dfa l_zn;               // over the combined alphabet
    RelationAutomaton r_a;  // over Sigma_q
    bool l_zn_nonempty = false;
    bool r_a_nonempty = false;
    int spot_checks = 0;
    int spot_failures = 0;
};

inline PropertyAReport verify_property_a(const SemiRepresentation& rep, int samples = 100,
                                         std::uint64_t seed = 12345) {
    PropertyAReport report;
    report.l_zn = widen_alphabet(rep.pres.dom, rep.za.combined_bound());
    report.r_a = rep.phi_a;
    report.l_zn_nonempty = !is_empty(report.l_zn);
    report.r_a_nonempty = !is_empty(report.r_a.dfa);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> coord(-30, 30);
    for (int i = 0; i < samples; ++i) {
        IntVec h(std::vector<BigInt>{coord(rng), coord(rng)});
        IntVec image = mat_apply(rep.A, h);
        ++report.spot_checks;
        bool good = accepts_tuple(report.r_a.dfa, {encode(h, rep.pres), encode(image, rep.pres)});
        if (!(image == h)) good = good && !accepts_tuple(report.r_a.dfa, {encode(h, rep.pres), encode(h, rep.pres)});
        if (!good) ++report.spot_failures;
    }
    return report;
}

}  // namespace torus
