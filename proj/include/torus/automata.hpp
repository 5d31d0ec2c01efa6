#pragma once

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "torus/words.hpp"

namespace torus {

// ---------------------------------------------------------------------------
// Alphabet of m-track convolution symbols. Per track, a symbol carries a
// digit in [-B, B] or the padding symbol; the all-pad column is not a legal
// symbol (convolutions never contain it). Symbols are encoded as integers
// in base 2B+2.
// ---------------------------------------------------------------------------
struct Alphabet {
    int arity = 1;
    int digit_bound = 2;  // B

    int stride() const { return 2 * digit_bound + 2; }
    int pad_code() const { return 2 * digit_bound + 1; }

    std::uint32_t num_symbols() const {
        std::uint64_t n = 1;
        for (int i = 0; i < arity; ++i) n *= static_cast<std::uint64_t>(stride());
        return static_cast<std::uint32_t>(n);
    }
    std::uint32_t all_pad_symbol() const {
        std::uint32_t code = 0, mul = 1;
        for (int i = 0; i < arity; ++i) {
            code += static_cast<std::uint32_t>(pad_code()) * mul;
            mul *= stride();
        }
        return code;
    }

    std::uint32_t encode(const ConvSymbol& sym) const {
        if (static_cast<int>(sym.size()) != arity) throw invalid_params("symbol arity mismatch");
        std::uint32_t code = 0, mul = 1;
        for (int t = 0; t < arity; ++t) {
            int v;
            if (sym[t] == kPad) {
                v = pad_code();
            } else {
                if (sym[t] < -digit_bound || sym[t] > digit_bound)
                    throw invalid_params("digit out of alphabet range");
                v = sym[t] + digit_bound;
            }
            code += static_cast<std::uint32_t>(v) * mul;
            mul *= stride();
        }
        return code;
    }
    ConvSymbol decode(std::uint32_t code) const {
        ConvSymbol sym(arity);
        for (int t = 0; t < arity; ++t) {
            int v = static_cast<int>(code % stride());
            code /= stride();
            sym[t] = (v == pad_code()) ? kPad : v - digit_bound;
        }
        return sym;
    }
    // Digit on one track (kPad for padding).
    int track_value(std::uint32_t code, int track) const {
        for (int t = 0; t < track; ++t) code /= stride();
        int v = static_cast<int>(code % stride());
        return v == pad_code() ? kPad : v - digit_bound;
    }

    bool operator==(const Alphabet&) const = default;
};

// Subset-construction / product cap; TORUS_AUTOMATA_STATE_BUDGET overrides.
inline std::uint64_t default_state_budget() {
    static const std::uint64_t value = [] {
        if (const char* env = std::getenv("TORUS_AUTOMATA_STATE_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) return static_cast<std::uint64_t>(v);
        }
        return static_cast<std::uint64_t>(1000000);
    }();
    return value;
}

// ---------------------------------------------------------------------------
// Deterministic automaton. Transitions are stored sparsely, sorted by
// symbol; a missing entry means the (implicit, rejecting) dead state, which
// keeps the function total over the declared alphabet.
// ---------------------------------------------------------------------------
struct Dfa {
    Alphabet alpha;
    std::uint32_t num_states = 1;
    std::uint32_t initial = 0;
    std::vector<bool> accepting{false};
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> trans{{}};

    static Dfa empty_language(const Alphabet& a) {
        Dfa d;
        d.alpha = a;
        return d;
    }

    std::optional<std::uint32_t> step(std::uint32_t state, std::uint32_t symbol) const {
        const auto& row = trans[state];
        auto it = std::lower_bound(row.begin(), row.end(), symbol,
                                   [](const auto& e, std::uint32_t s) { return e.first < s; });
        if (it == row.end() || it->first != symbol) return std::nullopt;
        return it->second;
    }

    void sort_transitions() {
        for (auto& row : trans) std::sort(row.begin(), row.end());
    }

    std::size_t num_transitions() const {
        std::size_t n = 0;
        for (const auto& row : trans) n += row.size();
        return n;
    }
};

struct Nfa {
    Alphabet alpha;
    std::uint32_t num_states = 0;
    std::vector<std::uint32_t> initials;
    std::vector<bool> accepting;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> trans;
};

// A Dfa over convolution symbols together with what each track means.
struct RelationAutomaton {
    Dfa dfa;
    std::vector<std::string> tracks;

    int arity() const { return dfa.alpha.arity; }
};

// ---------------------------------------------------------------------------
// Acceptance and counting
// ---------------------------------------------------------------------------
inline bool accepts(const Dfa& d, const ConvString& word) {
    std::uint32_t s = d.initial;
    for (const auto& sym : word) {
        auto next = d.step(s, d.alpha.encode(sym));
        if (!next) return false;
        s = *next;
    }
    return d.accepting[s];
}

// Acceptance of a tuple of strings, convolved. (ConvString and a vector of
// tracks are the same C++ type; a convolution is column-major, a tuple is
// track-major, so the tuple entry point carries its own name.)
inline bool accepts_tuple(const Dfa& d, const std::vector<DigitString>& tuple) {
    return accepts(d, convolve(tuple));
}

inline bool accepts(const Dfa& d, const DigitString& w) {
    if (d.alpha.arity != 1) throw invalid_params("accepts(DigitString): arity-1 automaton required");
    return accepts_tuple(d, {w});
}

inline bool is_empty(const Dfa& d) {
    std::vector<char> seen(d.num_states, 0);
    std::deque<std::uint32_t> queue{d.initial};
    seen[d.initial] = 1;
    while (!queue.empty()) {
        std::uint32_t s = queue.front();
        queue.pop_front();
        if (d.accepting[s]) return false;
        for (const auto& [sym, t] : d.trans[s])
            if (!seen[t]) {
                seen[t] = 1;
                queue.push_back(t);
            }
    }
    return true;
}

// Number of accepted strings of length <= maxlen (dynamic programming over
// states; exact big-integer counts).
inline BigInt count_accepted(const Dfa& d, int maxlen) {
    std::vector<BigInt> cur(d.num_states), next(d.num_states);
    cur[d.initial] = 1;
    BigInt total = d.accepting[d.initial] ? 1 : 0;
    for (int len = 1; len <= maxlen; ++len) {
        std::fill(next.begin(), next.end(), BigInt(0));
        for (std::uint32_t s = 0; s < d.num_states; ++s) {
            if (cur[s] == 0) continue;
            for (const auto& [sym, t] : d.trans[s]) next[t] += cur[s];
        }
        std::swap(cur, next);
        for (std::uint32_t s = 0; s < d.num_states; ++s)
            if (d.accepting[s]) total += cur[s];
    }
    return total;
}

namespace detail {

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (std::uint32_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Reachable (from initial) and co-reachable (to accepting) states; states
// outside behave as the dead state and are dropped.
inline Dfa trim(const Dfa& d) {
    std::vector<char> reach(d.num_states, 0);
    std::deque<std::uint32_t> queue{d.initial};
    reach[d.initial] = 1;
    while (!queue.empty()) {
        std::uint32_t s = queue.front();
        queue.pop_front();
        for (const auto& [sym, t] : d.trans[s])
            if (!reach[t]) {
                reach[t] = 1;
                queue.push_back(t);
            }
    }
    // reverse edges for co-reachability
    std::vector<std::vector<std::uint32_t>> rev(d.num_states);
    for (std::uint32_t s = 0; s < d.num_states; ++s)
        for (const auto& [sym, t] : d.trans[s]) rev[t].push_back(s);
    std::vector<char> co(d.num_states, 0);
    for (std::uint32_t s = 0; s < d.num_states; ++s)
        if (d.accepting[s] && reach[s]) {
            co[s] = 1;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        std::uint32_t s = queue.front();
        queue.pop_front();
        for (std::uint32_t p : rev[s])
            if (reach[p] && !co[p]) {
                co[p] = 1;
                queue.push_back(p);
            }
    }
    if (!co[d.initial]) return Dfa::empty_language(d.alpha);

    std::vector<std::uint32_t> id(d.num_states, UINT32_MAX);
    std::uint32_t n = 0;
    for (std::uint32_t s = 0; s < d.num_states; ++s)
        if (reach[s] && co[s]) id[s] = n++;
    Dfa out;
    out.alpha = d.alpha;
    out.num_states = n;
    out.initial = id[d.initial];
    out.accepting.assign(n, false);
    out.trans.assign(n, {});
    for (std::uint32_t s = 0; s < d.num_states; ++s) {
        if (id[s] == UINT32_MAX) continue;
        out.accepting[id[s]] = d.accepting[s];
        for (const auto& [sym, t] : d.trans[s])
            if (id[t] != UINT32_MAX) out.trans[id[s]].push_back({sym, id[t]});
        std::sort(out.trans[id[s]].begin(), out.trans[id[s]].end());
    }
    return out;
}

// Canonical BFS renumbering (transitions visited in symbol order). Two
// minimal automata for the same language renumber identically.
inline Dfa canonical_renumber(const Dfa& d) {
    std::vector<std::uint32_t> id(d.num_states, UINT32_MAX);
    std::vector<std::uint32_t> order;
    id[d.initial] = 0;
    order.push_back(d.initial);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& [sym, t] : d.trans[order[i]])
            if (id[t] == UINT32_MAX) {
                id[t] = static_cast<std::uint32_t>(order.size());
                order.push_back(t);
            }
    }
    Dfa out;
    out.alpha = d.alpha;
    out.num_states = static_cast<std::uint32_t>(order.size());
    out.initial = 0;
    out.accepting.assign(out.num_states, false);
    out.trans.assign(out.num_states, {});
    for (std::uint32_t s : order) {
        out.accepting[id[s]] = d.accepting[s];
        for (const auto& [sym, t] : d.trans[s])
            if (id[t] != UINT32_MAX) out.trans[id[s]].push_back({sym, id[t]});
        std::sort(out.trans[id[s]].begin(), out.trans[id[s]].end());
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Padding-legal universe: per track, pads form a suffix, and the all-pad
// column never occurs. States are the proper subsets of already-padded
// tracks; every state is accepting.
// ---------------------------------------------------------------------------
inline Dfa universe(const Alphabet& alpha) {
    const std::uint32_t nstates = (1u << alpha.arity) - 1;  // proper subsets
    Dfa d;
    d.alpha = alpha;
    d.num_states = nstates;
    d.initial = 0;
    d.accepting.assign(nstates, true);
    d.trans.assign(nstates, {});
    const std::uint32_t nsym = alpha.num_symbols();
    const std::uint32_t all_pad = alpha.all_pad_symbol();
    for (std::uint32_t mask = 0; mask < nstates; ++mask) {
        for (std::uint32_t sym = 0; sym < nsym; ++sym) {
            if (sym == all_pad) continue;
            std::uint32_t next = mask;
            bool ok = true;
            for (int t = 0; t < alpha.arity && ok; ++t) {
                bool pad = alpha.track_value(sym, t) == kPad;
                if (mask & (1u << t)) {
                    if (!pad) ok = false;  // digits may not resume after padding
                } else if (pad) {
                    next |= 1u << t;
                }
            }
            if (ok && next < nstates) d.trans[mask].push_back({sym, next});
            // next == full set cannot happen: that would require all-pad
        }
        std::sort(d.trans[mask].begin(), d.trans[mask].end());
    }
    return d;
}

// ---------------------------------------------------------------------------
// Synchronized product. Each component automaton reads the restriction of
// the full symbol to its tracks; a component whose tracks have all gone to
// padding must be accepting at that point and is then suspended. The
// product accepts when every component is accepting or suspended. With all
// components on identical track lists this is plain intersection.
//
// Enumeration is sparse: candidate transitions come from the components'
// stored transitions, filtered for consistency on shared tracks, so the
// cost is proportional to live combinations rather than alphabet size.
// ---------------------------------------------------------------------------
struct ProductComponent {
    const Dfa* dfa;
    std::vector<int> tracks;  // component track i = full-symbol track tracks[i]
};

inline Dfa synchronized_product(const Alphabet& out_alpha, const std::vector<ProductComponent>& comps,
                                std::uint64_t budget = default_state_budget()) {
    const int arity = out_alpha.arity;
    const std::uint32_t kEnded = UINT32_MAX;

    std::vector<char> covered(arity, 0);
    for (const auto& c : comps) {
        if (static_cast<int>(c.tracks.size()) != c.dfa->alpha.arity)
            throw invalid_params("synchronized_product: track list does not match component arity");
        if (c.dfa->alpha.digit_bound != out_alpha.digit_bound)
            throw invalid_params("synchronized_product: digit bound mismatch");
        for (int t : c.tracks) {
            if (t < 0 || t >= arity) throw invalid_params("synchronized_product: bad track index");
            covered[t] = 1;
        }
    }
    for (int t = 0; t < arity; ++t)
        if (!covered[t]) throw invalid_params("synchronized_product: uncovered track");

    // Per component: tracks constrained by earlier components, and an index
    // of its transitions keyed by the digits on those constrained tracks.
    struct CompIndex {
        std::vector<int> constrained;    // positions within the component's tracks
        std::vector<int> unconstrained;  // positions within the component's tracks
        // per state: key -> transitions
        std::vector<std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>> by_key;
    };
    std::vector<CompIndex> index(comps.size());
    {
        std::vector<char> assigned(arity, 0);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const auto& c = comps[i];
            for (std::size_t k = 0; k < c.tracks.size(); ++k)
                (assigned[c.tracks[k]] ? index[i].constrained : index[i].unconstrained).push_back(static_cast<int>(k));
            for (int t : c.tracks) assigned[t] = 1;
            index[i].by_key.resize(c.dfa->num_states);
            const int stride = c.dfa->alpha.stride();
            for (std::uint32_t s = 0; s < c.dfa->num_states; ++s) {
                for (const auto& [sym, tgt] : c.dfa->trans[s]) {
                    std::uint64_t key = 0;
                    for (int k : index[i].constrained) {
                        int v = c.dfa->alpha.track_value(sym, k);
                        key = key * stride + static_cast<std::uint64_t>(v == kPad ? c.dfa->alpha.pad_code()
                                                                                  : v + c.dfa->alpha.digit_bound);
                    }
                    index[i].by_key[s][key].push_back({sym, tgt});
                }
            }
        }
    }

    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::VecHash> ids;
    std::vector<std::vector<std::uint32_t>> states;
    std::deque<std::uint32_t> queue;
    auto intern = [&](const std::vector<std::uint32_t>& st) {
        auto [it, inserted] = ids.emplace(st, static_cast<std::uint32_t>(states.size()));
        if (inserted) {
            states.push_back(st);
            if (states.size() > budget) throw state_budget_exceeded("synchronized_product: state budget exceeded");
            queue.push_back(it->second);
        }
        return it->second;
    };

    std::vector<std::uint32_t> init(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) init[i] = comps[i].dfa->initial;
    intern(init);

    Dfa out;
    out.alpha = out_alpha;
    out.trans.clear();
    out.accepting.clear();

    constexpr int kUnassigned = std::numeric_limits<int>::max();
    std::vector<int> assign(arity, kUnassigned);
    std::vector<std::uint32_t> next(comps.size());

    while (!queue.empty()) {
        std::uint32_t id = queue.front();
        queue.pop_front();
        if (out.trans.size() <= id) out.trans.resize(states.size());
        const std::vector<std::uint32_t> st = states[id];

        std::vector<std::pair<std::uint32_t, std::uint32_t>> row;
        // Recursive sparse enumeration over component transitions.
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == comps.size()) {
                bool all_pad = true;
                std::uint32_t code = 0, mul = 1;
                for (int t = 0; t < arity; ++t) {
                    int v = assign[t];
                    all_pad = all_pad && v == kPad;
                    code += static_cast<std::uint32_t>(v == kPad ? out_alpha.pad_code() : v + out_alpha.digit_bound) * mul;
                    mul *= out_alpha.stride();
                }
                if (all_pad) return;
                row.push_back({code, intern(next)});
                return;
            }
            const auto& c = comps[i];
            const auto& ix = index[i];
            if (st[i] == kEnded) {
                // all component tracks must stay padded
                std::vector<int> touched;
                bool ok = true;
                for (int t : c.tracks) {
                    if (assign[t] == kUnassigned) {
                        assign[t] = kPad;
                        touched.push_back(t);
                    } else if (assign[t] != kPad) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    next[i] = kEnded;
                    rec(i + 1);
                }
                for (int t : touched) assign[t] = kUnassigned;
                return;
            }
            // Option: this component's tracks all end here (suspend); legal
            // only from an accepting state.
            if (c.dfa->accepting[st[i]]) {
                std::vector<int> touched;
                bool ok = true;
                for (int t : c.tracks) {
                    if (assign[t] == kUnassigned) {
                        assign[t] = kPad;
                        touched.push_back(t);
                    } else if (assign[t] != kPad) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    next[i] = kEnded;
                    rec(i + 1);
                }
                for (int t : touched) assign[t] = kUnassigned;
            }
            // Options: consume a live transition consistent with the digits
            // already fixed by earlier components.
            const int stride = c.dfa->alpha.stride();
            std::uint64_t key = 0;
            for (int k : ix.constrained) {
                int v = assign[c.tracks[k]];
                key = key * stride +
                      static_cast<std::uint64_t>(v == kPad ? c.dfa->alpha.pad_code() : v + c.dfa->alpha.digit_bound);
            }
            auto hit = ix.by_key[st[i]].find(key);
            if (hit == ix.by_key[st[i]].end()) return;
            for (const auto& [sym, tgt] : hit->second) {
                bool all_pad = true;
                for (std::size_t k = 0; k < c.tracks.size() && all_pad; ++k)
                    all_pad = c.dfa->alpha.track_value(sym, static_cast<int>(k)) == kPad;
                if (all_pad) continue;  // sub-symbol all-pad is handled by suspension
                std::vector<int> touched;
                for (int k : ix.unconstrained) {
                    int v = c.dfa->alpha.track_value(sym, k);
                    int t = c.tracks[k];
                    assign[t] = v;
                    touched.push_back(t);
                }
                next[i] = tgt;
                rec(i + 1);
                for (int t : touched) assign[t] = kUnassigned;
            }
        };
        rec(0);
        std::sort(row.begin(), row.end());
        if (out.trans.size() < states.size()) out.trans.resize(states.size());
        out.trans[id] = std::move(row);
    }

    out.num_states = static_cast<std::uint32_t>(states.size());
    out.initial = 0;
    out.trans.resize(out.num_states);
    out.accepting.assign(out.num_states, false);
    for (std::uint32_t s = 0; s < out.num_states; ++s) {
        bool acc = true;
        for (std::size_t i = 0; i < comps.size() && acc; ++i)
            acc = states[s][i] == kEnded || comps[i].dfa->accepting[states[s][i]];
        out.accepting[s] = acc;
    }
    return detail::trim(out);
}

inline Dfa intersect(const Dfa& a, const Dfa& b, std::uint64_t budget = default_state_budget()) {
    if (!(a.alpha == b.alpha)) throw invalid_params("intersect: alphabet mismatch");
    std::vector<int> all(a.alpha.arity);
    for (int t = 0; t < a.alpha.arity; ++t) all[t] = t;
    return synchronized_product(a.alpha, {{&a, all}, {&b, all}}, budget);
}

// Complement relative to the padding-legal universe. The result is dense
// over legal symbols; minimize() afterwards if size matters.
inline Dfa complement(const Dfa& d) {
    const std::uint32_t nsym = d.alpha.num_symbols();
    const std::uint32_t all_pad = d.alpha.all_pad_symbol();
    // complete d with an explicit trap, flip acceptance
    Dfa c;
    c.alpha = d.alpha;
    c.num_states = d.num_states + 1;
    const std::uint32_t trap = d.num_states;
    c.initial = d.initial;
    c.accepting.assign(c.num_states, false);
    for (std::uint32_t s = 0; s < d.num_states; ++s) c.accepting[s] = !d.accepting[s];
    c.accepting[trap] = true;
    c.trans.assign(c.num_states, {});
    for (std::uint32_t s = 0; s < c.num_states; ++s) {
        c.trans[s].reserve(nsym - 1);
        std::size_t live = 0;
        const auto* row = s < d.num_states ? &d.trans[s] : nullptr;
        for (std::uint32_t sym = 0; sym < nsym; ++sym) {
            if (row)
                while (live < row->size() && (*row)[live].first < sym) ++live;
            if (sym == all_pad) continue;
            if (row && live < row->size() && (*row)[live].first == sym) {
                c.trans[s].push_back({sym, (*row)[live].second});
            } else {
                c.trans[s].push_back({sym, trap});
            }
        }
    }
    return intersect(c, universe(d.alpha));
}

inline Dfa union_of(const Dfa& a, const Dfa& b) {
    return complement(intersect(complement(a), complement(b)));
}

// ---------------------------------------------------------------------------
// Existential projection: drop one track. Transitions whose remaining
// tracks are all padding only occur in a suffix (the dropped track running
// on alone), so they are folded into the accepting set.
// ---------------------------------------------------------------------------
inline Nfa project(const Dfa& d_in, int track) {
    if (d_in.alpha.arity < 2) throw invalid_params("project: arity >= 2 required");
    if (track < 0 || track >= d_in.alpha.arity) throw invalid_params("project: bad track index");
    Dfa d = detail::trim(d_in);

    Nfa out;
    out.alpha = Alphabet{d.alpha.arity - 1, d.alpha.digit_bound};
    out.num_states = std::max<std::uint32_t>(d.num_states, 1);
    out.initials = {d.initial};
    out.accepting.assign(out.num_states, false);
    out.trans.assign(out.num_states, {});
    for (std::uint32_t s = 0; s < d.num_states; ++s) out.accepting[s] = d.accepting[s];

    std::vector<std::vector<std::uint32_t>> tail_edges(out.num_states);  // reversed
    for (std::uint32_t s = 0; s < d.num_states; ++s) {
        for (const auto& [sym, t] : d.trans[s]) {
            ConvSymbol full = d.alpha.decode(sym);
            bool rest_pad = true;
            ConvSymbol rest;
            rest.reserve(full.size() - 1);
            for (int k = 0; k < d.alpha.arity; ++k) {
                if (k == track) continue;
                rest.push_back(full[k]);
                rest_pad = rest_pad && full[k] == kPad;
            }
            if (rest_pad) {
                tail_edges[t].push_back(s);  // consumes only the dropped track
            } else {
                out.trans[s].push_back({out.alpha.encode(rest), t});
            }
        }
        std::sort(out.trans[s].begin(), out.trans[s].end());
    }
    // accepting' = can reach accepting through dropped-track-only moves
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < out.num_states; ++s)
        if (out.accepting[s]) queue.push_back(s);
    while (!queue.empty()) {
        std::uint32_t s = queue.front();
        queue.pop_front();
        for (std::uint32_t p : tail_edges[s])
            if (!out.accepting[p]) {
                out.accepting[p] = true;
                queue.push_back(p);
            }
    }
    return out;
}

inline Nfa project(const RelationAutomaton& r, int track) { return project(r.dfa, track); }

// ---------------------------------------------------------------------------
// Subset construction.
// ---------------------------------------------------------------------------
inline Dfa determinize(const Nfa& n, std::uint64_t budget = default_state_budget()) {
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::VecHash> ids;
    std::vector<std::vector<std::uint32_t>> subsets;
    std::deque<std::uint32_t> queue;
    auto intern = [&](std::vector<std::uint32_t> subset) {
        std::sort(subset.begin(), subset.end());
        subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
        auto [it, inserted] = ids.emplace(subset, static_cast<std::uint32_t>(subsets.size()));
        if (inserted) {
            subsets.push_back(std::move(subset));
            if (subsets.size() > budget) throw state_budget_exceeded("determinize: state budget exceeded");
            queue.push_back(it->second);
        }
        return it->second;
    };
    intern(n.initials);

    Dfa out;
    out.alpha = n.alpha;
    out.trans.clear();
    std::map<std::uint32_t, std::vector<std::uint32_t>> by_sym;  // ordered: deterministic numbering
    while (!queue.empty()) {
        std::uint32_t id = queue.front();
        queue.pop_front();
        by_sym.clear();
        for (std::uint32_t s : subsets[id])
            for (const auto& [sym, t] : n.trans[s]) by_sym[sym].push_back(t);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> row;
        row.reserve(by_sym.size());
        for (auto& [sym, targets] : by_sym) row.push_back({sym, intern(std::move(targets))});
        std::sort(row.begin(), row.end());
        if (out.trans.size() < subsets.size()) out.trans.resize(subsets.size());
        out.trans[id] = std::move(row);
    }
    out.num_states = static_cast<std::uint32_t>(subsets.size());
    out.trans.resize(out.num_states);
    out.initial = 0;
    out.accepting.assign(out.num_states, false);
    for (std::uint32_t s = 0; s < out.num_states; ++s)
        for (std::uint32_t m : subsets[s])
            if (n.accepting[m]) {
                out.accepting[s] = true;
                break;
            }
    return out;
}

// ---------------------------------------------------------------------------
// Minimization: partition refinement with a virtual dead state, so the
// implicit-dead sparse representation stays intact. Output is trimmed and
// canonically BFS-numbered; language-equal inputs minimize to identical
// automata.
// ---------------------------------------------------------------------------
inline Dfa minimize(const Dfa& d_in) {
    Dfa d = detail::trim(d_in);
    if (d.num_states == 0 || (d.num_states == 1 && !d.accepting[0]))
        return Dfa::empty_language(d.alpha);

    const std::uint32_t n = d.num_states;
    const std::uint32_t dead = n;
    std::vector<std::uint32_t> block(n + 1);
    for (std::uint32_t s = 0; s < n; ++s) block[s] = d.accepting[s] ? 1 : 0;
    block[dead] = 0;

    using Sig = std::vector<std::uint64_t>;
    struct SigHash {
        std::size_t operator()(const Sig& v) const noexcept {
            std::size_t h = 1469598103934665603ull;
            for (std::uint64_t x : v) {
                h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            }
            return h;
        }
    };

    std::size_t num_blocks = 2;
    while (true) {
        std::unordered_map<Sig, std::uint32_t, SigHash> sig_ids;
        std::vector<std::uint32_t> next_block(n + 1);
        std::uint32_t dead_block = block[dead];
        auto classify = [&](std::uint32_t s) {
            Sig sig;
            if (s < n) {
                sig.push_back(block[s]);
                for (const auto& [sym, t] : d.trans[s]) {
                    if (block[t] == dead_block) continue;  // same behavior as missing
                    sig.push_back((static_cast<std::uint64_t>(sym) << 32) | block[t]);
                }
            } else {
                sig.push_back(block[dead]);
            }
            auto [it, inserted] = sig_ids.emplace(std::move(sig), static_cast<std::uint32_t>(sig_ids.size()));
            next_block[s] = it->second;
        };
        classify(dead);
        for (std::uint32_t s = 0; s < n; ++s) classify(s);
        if (sig_ids.size() == num_blocks) break;
        num_blocks = sig_ids.size();
        block = std::move(next_block);
    }

    const std::uint32_t dead_block = block[dead];
    Dfa out;
    out.alpha = d.alpha;
    // map block ids to 0..k-1 skipping the dead block
    std::vector<std::uint32_t> bid(num_blocks, UINT32_MAX);
    std::uint32_t k = 0;
    for (std::uint32_t s = 0; s < n; ++s)
        if (block[s] != dead_block && bid[block[s]] == UINT32_MAX) bid[block[s]] = k++;
    if (bid[block[d.initial]] == UINT32_MAX) return Dfa::empty_language(d.alpha);
    out.num_states = k;
    out.initial = bid[block[d.initial]];
    out.accepting.assign(k, false);
    out.trans.assign(k, {});
    std::vector<char> done(k, 0);
    for (std::uint32_t s = 0; s < n; ++s) {
        std::uint32_t b = bid[block[s]];
        if (b == UINT32_MAX || done[b]) continue;
        done[b] = 1;
        out.accepting[b] = d.accepting[s];
        for (const auto& [sym, t] : d.trans[s])
            if (block[t] != dead_block) out.trans[b].push_back({sym, bid[block[t]]});
        std::sort(out.trans[b].begin(), out.trans[b].end());
    }
    return detail::canonical_renumber(out);
}

// Language equality via canonical minimal form.
inline bool equal_language(const Dfa& a, const Dfa& b) {
    Dfa ma = minimize(a), mb = minimize(b);
    return ma.alpha == mb.alpha && ma.num_states == mb.num_states && ma.initial == mb.initial &&
           ma.accepting == mb.accepting && ma.trans == mb.trans;
}

// ---------------------------------------------------------------------------
// Fix one track of a relation to a concrete string; the result reads the
// remaining tracks. State tracks the position in w, saturating past its
// end (the fixed track then reads padding); acceptance accounts for the
// fixed track possibly running on after the remaining tracks ended.
// ---------------------------------------------------------------------------
inline Dfa fix_track(const Dfa& d, int track, const DigitString& w,
                     std::uint64_t budget = default_state_budget()) {
    if (d.alpha.arity < 2) throw invalid_params("fix_track: arity >= 2 required");
    if (track < 0 || track >= d.alpha.arity) throw invalid_params("fix_track: bad track index");
    if (!digits_in_bounds(w, d.alpha.digit_bound)) throw invalid_params("fix_track: string outside alphabet");

    const std::uint32_t wlen = static_cast<std::uint32_t>(w.size());
    Alphabet rest_alpha{d.alpha.arity - 1, d.alpha.digit_bound};

    // tail acceptance: from (s, pos), feed (pads..., w[pos..]) and test
    std::vector<std::vector<char>> tail(wlen + 1, std::vector<char>(d.num_states, 0));
    for (std::uint32_t s = 0; s < d.num_states; ++s) tail[wlen][s] = d.accepting[s] ? 1 : 0;
    for (std::uint32_t pos = wlen; pos-- > 0;) {
        ConvSymbol sym(d.alpha.arity, kPad);
        sym[track] = w[pos];
        std::uint32_t code = d.alpha.encode(sym);
        for (std::uint32_t s = 0; s < d.num_states; ++s) {
            auto t = d.step(s, code);
            tail[pos][s] = (t && tail[pos + 1][*t]) ? 1 : 0;
        }
    }

    std::unordered_map<std::uint64_t, std::uint32_t> ids;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> states;  // (dfa state, pos)
    std::deque<std::uint32_t> queue;
    auto intern = [&](std::uint32_t s, std::uint32_t pos) {
        std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | pos;
        auto [it, inserted] = ids.emplace(key, static_cast<std::uint32_t>(states.size()));
        if (inserted) {
            states.push_back({s, pos});
            if (states.size() > budget) throw state_budget_exceeded("fix_track: state budget exceeded");
            queue.push_back(it->second);
        }
        return it->second;
    };
    intern(d.initial, 0);

    Dfa out;
    out.alpha = rest_alpha;
    out.trans.clear();
    while (!queue.empty()) {
        std::uint32_t id = queue.front();
        queue.pop_front();
        auto [s, pos] = states[id];
        int fixed_digit = pos < wlen ? w[pos] : kPad;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> row;
        for (const auto& [sym, t] : d.trans[s]) {
            if (d.alpha.track_value(sym, track) != fixed_digit) continue;
            ConvSymbol full = d.alpha.decode(sym);
            ConvSymbol rest;
            rest.reserve(full.size() - 1);
            bool rest_pad = true;
            for (int k = 0; k < d.alpha.arity; ++k) {
                if (k == track) continue;
                rest.push_back(full[k]);
                rest_pad = rest_pad && full[k] == kPad;
            }
            if (rest_pad) continue;  // remaining tracks ended; covered by tail acceptance
            row.push_back({rest_alpha.encode(rest), intern(t, std::min(pos + 1, wlen))});
        }
        std::sort(row.begin(), row.end());
        if (out.trans.size() < states.size()) out.trans.resize(states.size());
        if (out.trans.size() <= id) out.trans.resize(id + 1);
        out.trans[id] = std::move(row);
    }
    out.num_states = static_cast<std::uint32_t>(states.size());
    out.trans.resize(out.num_states);
    out.initial = 0;
    out.accepting.assign(out.num_states, false);
    for (std::uint32_t i = 0; i < out.num_states; ++i) {
        auto [s, pos] = states[i];
        out.accepting[i] = tail[pos][s] != 0;
    }
    return detail::trim(out);
}

inline Dfa fix_track(const RelationAutomaton& r, int track, const DigitString& w,
                     std::uint64_t budget = default_state_budget()) {
    return fix_track(r.dfa, track, w, budget);
}

// ---------------------------------------------------------------------------
// llex-least accepted string of an arity-1 automaton: shortest-length BFS
// (backward layers) fixes the length, then a greedy smallest-digit descent
// through states that can still reach acceptance in the remaining length.
// ---------------------------------------------------------------------------
inline std::optional<DigitString> llex_least_member(const Dfa& d) {
    if (d.alpha.arity != 1) throw invalid_params("llex_least_member: arity-1 automaton required");
    if (d.accepting[d.initial]) return DigitString{};  // epsilon is the llex minimum

    std::vector<std::vector<char>> layer;  // layer[r][s]: accepts some string of length exactly r
    layer.push_back(std::vector<char>(d.num_states, 0));
    for (std::uint32_t s = 0; s < d.num_states; ++s) layer[0][s] = d.accepting[s] ? 1 : 0;
    std::uint32_t len = 0;
    while (true) {
        if (layer[len][d.initial]) break;
        if (len >= d.num_states) return std::nullopt;  // shortest witness needs < num_states steps
        std::vector<char> prev(d.num_states, 0);
        for (std::uint32_t s = 0; s < d.num_states; ++s)
            for (const auto& [sym, t] : d.trans[s])
                if (layer[len][t]) {
                    prev[s] = 1;
                    break;
                }
        layer.push_back(std::move(prev));
        ++len;
    }

    DigitString out;
    std::uint32_t s = d.initial;
    for (std::uint32_t remaining = len; remaining > 0; --remaining) {
        bool found = false;
        // transitions are sorted by symbol code, which is ascending digit order
        for (const auto& [sym, t] : d.trans[s]) {
            if (d.alpha.track_value(sym, 0) == kPad) continue;
            if (layer[remaining - 1][t]) {
                out.push_back(d.alpha.track_value(sym, 0));
                s = t;
                found = true;
                break;
            }
        }
        if (!found) throw internal_error("llex_least_member: layer bookkeeping broken");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builder for carry-style machines: BFS over interned state vectors.
// ---------------------------------------------------------------------------
class MachineBuilder {
public:
    explicit MachineBuilder(Alphabet alpha, std::uint64_t budget = default_state_budget())
        : alpha_(alpha), budget_(budget) {}

    std::uint32_t intern(const std::vector<int>& state) {
        auto [it, inserted] = ids_.emplace(state, static_cast<std::uint32_t>(states_.size()));
        if (inserted) {
            states_.push_back(state);
            trans_.emplace_back();
            if (states_.size() > budget_) throw state_budget_exceeded("MachineBuilder: state budget exceeded");
            queue_.push_back(it->second);
        }
        return it->second;
    }

    std::optional<std::uint32_t> pop() {
        if (queue_.empty()) return std::nullopt;
        std::uint32_t id = queue_.front();
        queue_.pop_front();
        return id;
    }

    const std::vector<int>& state(std::uint32_t id) const { return states_[id]; }
    std::size_t num_states() const { return states_.size(); }
    const Alphabet& alphabet() const { return alpha_; }

    void add_transition(std::uint32_t from, std::uint32_t symbol, std::uint32_t to) {
        trans_[from].push_back({symbol, to});
    }

    Dfa finalize(std::uint32_t initial, const std::function<bool(const std::vector<int>&)>& accept) const {
        Dfa d;
        d.alpha = alpha_;
        d.num_states = static_cast<std::uint32_t>(states_.size());
        d.initial = initial;
        d.accepting.assign(d.num_states, false);
        d.trans = trans_;
        for (std::uint32_t s = 0; s < d.num_states; ++s) d.accepting[s] = accept(states_[s]);
        d.sort_transitions();
        return d;
    }

private:
    Alphabet alpha_;
    std::uint64_t budget_;
    std::map<std::vector<int>, std::uint32_t> ids_;
    std::vector<std::vector<int>> states_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> trans_;
    std::deque<std::uint32_t> queue_;
};

}  // namespace torus
