#pragma once

#include <unordered_set>

#include "torus/presentation.hpp"

namespace torus {

// ---------------------------------------------------------------------------
// Labeled samples of a target language over Sigma_q, with membership
// decided by the exact decode oracle (never by automata). Membership of
// every string up to maxlen is packed into per-length bitsets so the
// distinguishing-prefix search can probe arbitrary extensions in O(1).
// ---------------------------------------------------------------------------
struct LabeledSample {
    enum class Kind { subgroup, dom_control, eq_class };

    std::string descriptor;
    ReprParams params;
    Kind kind;
    IntVec target;  // subgroup generator, or class representative
    int maxlen = 0;
    int digit_bound = 0;
    std::vector<std::vector<bool>> member_bits;  // [length][base-(2B+1) index]

    // index of a string: sum (d_i + B) * (2B+1)^i
    bool member(const DigitString& w) const {
        if (static_cast<int>(w.size()) > maxlen) throw invalid_params("LabeledSample: string longer than maxlen");
        std::uint64_t idx = 0, mul = 1;
        const std::uint64_t g = 2 * digit_bound + 1;
        for (Digit d : w) {
            idx += static_cast<std::uint64_t>(d + digit_bound) * mul;
            mul *= g;
        }
        return member_bits[w.size()][idx];
    }

    // The sample as the spec shape: Dom strings up to a length with labels.
    std::vector<std::pair<DigitString, bool>> entries(const Dfa& dom, int uptolen) const {
        std::vector<std::pair<DigitString, bool>> out;
        for (const auto& w : enumerate_accepted(dom, std::min(uptolen, maxlen))) out.push_back({w, member(w)});
        return out;
    }
};

namespace detail {

inline LabeledSample build_sample(const Presentation& pres, LabeledSample::Kind kind, const IntVec& target,
                                  int maxlen, std::string descriptor) {
    const int n = pres.params.degree;
    const int bound = pres.digit_bound();
    const std::uint64_t g = 2 * static_cast<std::uint64_t>(bound) + 1;
    double total = 0, power = 1;
    for (int len = 0; len <= maxlen; ++len) {
        total += power;
        power *= static_cast<double>(g);
    }
    if (total > 6.0e7) throw invalid_params("sample too large; shrink maxlen or |q|");

    LabeledSample sample;
    sample.descriptor = std::move(descriptor);
    sample.params = pres.params;
    sample.kind = kind;
    sample.target = target;
    sample.maxlen = maxlen;
    sample.digit_bound = bound;
    sample.member_bits.resize(maxlen + 1);

    // residues of x^l as machine words (desk scale)
    std::vector<std::vector<std::int64_t>> xpow(maxlen + 1, std::vector<std::int64_t>(n));
    for (int len = 0; len <= maxlen; ++len) {
        IntVec r = residue(Polynomial::monomial(1, len), pres.params);
        for (int i = 0; i < n; ++i) {
            if (abs(r.r[i]) > (std::int64_t{1} << 40)) throw invalid_params("sample residues exceed machine words");
            xpow[len][i] = to_int64(r.r[i]);
        }
    }
    std::vector<std::int64_t> tgt(n);
    for (int i = 0; i < n; ++i) tgt[i] = to_int64(target.r[i]);
    int pivot = -1;
    for (int i = 0; i < n; ++i)
        if (tgt[i] != 0) {
            pivot = i;
            break;
        }

    auto is_member = [&](const std::vector<std::int64_t>& v, bool in_dom) {
        switch (kind) {
            case LabeledSample::Kind::dom_control:
                return in_dom;
            case LabeledSample::Kind::eq_class:
                return v == tgt;
            case LabeledSample::Kind::subgroup: {
                if (!in_dom) return false;
                if (pivot < 0) return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
                if (v[pivot] % tgt[pivot] != 0) return false;
                std::int64_t k = v[pivot] / tgt[pivot];
                for (int i = 0; i < n; ++i)
                    if (v[i] != k * tgt[i]) return false;
                return true;
            }
        }
        return false;
    };

    for (int len = 0; len <= maxlen; ++len) {
        std::uint64_t count = 1;
        for (int i = 0; i < len; ++i) count *= g;
        sample.member_bits[len].assign(count, false);
    }

    // DFS over all strings, tracking the residue and the Dom automaton state
    struct Frame {
        std::vector<std::int64_t> value;
        std::optional<std::uint32_t> dom_state;
        std::uint64_t index;
        int len;
    };
    std::vector<Frame> stack;
    stack.push_back({std::vector<std::int64_t>(n), pres.dom.initial, 0, 0});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        bool in_dom = f.dom_state && pres.dom.accepting[*f.dom_state];
        sample.member_bits[f.len][f.index] = is_member(f.value, in_dom);
        if (f.len == maxlen) continue;
        std::uint64_t mul = 1;
        for (int i = 0; i < f.len; ++i) mul *= g;
        for (int d = -bound; d <= bound; ++d) {
            Frame child;
            child.value = f.value;
            for (int i = 0; i < n; ++i) child.value[i] += d * xpow[f.len][i];
            child.dom_state = std::nullopt;
            if (f.dom_state) {
                auto t = pres.dom.step(*f.dom_state, pres.dom.alpha.encode({d}));
                if (t) child.dom_state = *t;
            }
            child.index = f.index + static_cast<std::uint64_t>(d + bound) * mul;
            child.len = f.len + 1;
            stack.push_back(std::move(child));
        }
    }
    return sample;
}

}  // namespace detail

inline LabeledSample subgroup_language_sample(const Presentation& pres, const IntVec& generator, int maxlen) {
    if (generator.n() != pres.params.degree) throw invalid_params("subgroup generator has the wrong length");
    return detail::build_sample(pres, LabeledSample::Kind::subgroup, generator, maxlen,
                                "subgroup <" + generator.str() + ">");
}

// Regular control language: Dom itself.
inline LabeledSample dom_language_sample(const Presentation& pres, int maxlen) {
    return detail::build_sample(pres, LabeledSample::Kind::dom_control, IntVec::zero(pres.params.degree), maxlen,
                                "dom");
}

// Regular control language: one ~-class (all strings with a fixed residue).
inline LabeledSample class_language_sample(const Presentation& pres, const IntVec& v, int maxlen) {
    return detail::build_sample(pres, LabeledSample::Kind::eq_class, v, maxlen, "class " + v.str());
}

// ---------------------------------------------------------------------------
// Nerode-style lower bound: prefixes u, u' are distinguished when some
// extension z with |z| <= suffix_len has exactly one of uz, u'z in the
// language. Prefixes are pooled so the full extension window fits inside
// maxlen; distinct membership signatures over the window are then pairwise
// distinguishable, so their count bounds any recognizing Dfa from below.
// Taking the max over window sizes keeps the bound monotone in both
// arguments.
// ---------------------------------------------------------------------------
struct NerodeBound {
    int bound = 0;
    int best_suffix_len = 0;            // window size attaining the bound
    std::vector<DigitString> witnesses;  // one prefix per class, capped
};

inline NerodeBound nerode_lower_bound(const LabeledSample& sample, int suffix_len,
                                      std::size_t witness_cap = 16) {
    const int B = sample.digit_bound;
    const std::uint64_t g = 2 * static_cast<std::uint64_t>(B) + 1;
    NerodeBound best;

    std::vector<std::uint64_t> gpow(sample.maxlen + 1);
    gpow[0] = 1;
    for (int i = 1; i <= sample.maxlen; ++i) gpow[i] = gpow[i - 1] * g;

    for (int s = 0; s <= std::min(suffix_len, sample.maxlen); ++s) {
        // extensions z with |z| <= s, as (length, index) pairs
        std::vector<std::pair<int, std::uint64_t>> exts;
        for (int zl = 0; zl <= s; ++zl)
            for (std::uint64_t zi = 0; zi < gpow[zl]; ++zi) exts.push_back({zl, zi});

        std::unordered_set<std::string> signatures;
        std::vector<DigitString> witnesses;
        const int pool_max = sample.maxlen - s;
        for (int ul = 0; ul <= pool_max; ++ul) {
            for (std::uint64_t ui = 0; ui < gpow[ul]; ++ui) {
                std::string sig(exts.size(), '0');
                for (std::size_t e = 0; e < exts.size(); ++e) {
                    auto [zl, zi] = exts[e];
                    if (sample.member_bits[ul + zl][ui + gpow[ul] * zi]) sig[e] = '1';
                }
                if (signatures.insert(std::move(sig)).second && witnesses.size() < witness_cap) {
                    DigitString u(ul);
                    std::uint64_t rest = ui;
                    for (int i = 0; i < ul; ++i) {
                        u[i] = static_cast<int>(rest % g) - B;
                        rest /= g;
                    }
                    witnesses.push_back(std::move(u));
                }
            }
        }
        if (static_cast<int>(signatures.size()) > best.bound) {
            best.bound = static_cast<int>(signatures.size());
            best.best_suffix_len = s;
            best.witnesses = std::move(witnesses);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Zero-prefix witnesses: the class of q^k is equivalent to
// x^k (x^{n-1} + p_{n-1} x^{n-2} + ... + p_1)^k, so its canonical string
// starts with at least k zeros (equivalent reduced polynomials share
// divisibility by x^k). The postcondition is checked on both routes.
// ---------------------------------------------------------------------------
inline int leading_zeros(const DigitString& w) {
    int k = 0;
    while (k < static_cast<int>(w.size()) && w[k] == 0) ++k;
    return k;
}

inline DigitString zero_prefix_witness(const Presentation& pres, int k) {
    if (k < 0) throw invalid_params("zero_prefix_witness: k >= 0 required");
    const ReprParams& params = pres.params;
    BigInt qk = 1;
    for (int i = 0; i < k; ++i) qk *= params.q;
    IntVec target = IntVec::zero(params.degree);
    target.r[0] = qk;
    DigitString canonical = encode(target, pres);
    if (leading_zeros(canonical) < k)
        throw internal_error("zero_prefix_witness: canonical string lost the zero prefix");

    // the algebraic route: reduce(x^k * u(x)^k) with t = x u - q
    std::vector<BigInt> ucoef(params.degree);  // u = x^{n-1} + p_{n-1} x^{n-2} + ... + p_1
    for (int i = 0; i + 1 < params.degree; ++i) ucoef[i] = params.p[i];
    ucoef[params.degree - 1] = 1;
    Polynomial pow = Polynomial::constant(1);
    Polynomial u(std::move(ucoef));
    for (int i = 0; i < k; ++i) pow = pow * u;
    Polynomial alt = reduce(Polynomial::monomial(1, k) * pow, params);
    if (!alt.is_zero() && leading_zeros(poly_to_string(alt)) < k)
        throw internal_error("zero_prefix_witness: reduced x^k u^k lost the zero prefix");
    if (!equivalent(alt, Polynomial::constant(qk), params))
        throw internal_error("zero_prefix_witness: q^k and x^k u^k are not equivalent");
    return canonical;
}

}  // namespace torus
