#pragma once

#include "torus/presentation.hpp"

namespace torus {

// Multiplier polynomial g; degree <= n-1 suffices since phi_g = phi_{g mod t}.
using PolyMap = Polynomial;

// ---------------------------------------------------------------------------
// 2x2 integer matrices (the n = 2 automorphism bridge).
// ---------------------------------------------------------------------------
struct Mat2 {
    BigInt a11, a12, a21, a22;

    static Mat2 identity() { return {1, 0, 0, 1}; }
    BigInt det() const { return a11 * a22 - a12 * a21; }
    BigInt trace() const { return a11 + a22; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
                x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
    }
    Mat2 operator-() const { return {-a11, -a12, -a21, -a22}; }
    bool operator==(const Mat2&) const = default;

    // Exact inverse; only for det = +-1 (adjugate times det).
    Mat2 inverse() const {
        BigInt d = det();
        if (d != 1 && d != -1) throw invalid_params("Mat2::inverse: determinant must be +-1");
        Mat2 adj{a22, -a12, -a21, a11};
        return {adj.a11 * d, adj.a12 * d, adj.a21 * d, adj.a22 * d};
    }

    Mat2 pow(const BigInt& e) const {
        Mat2 base = e < 0 ? inverse() : *this;
        BigInt k = abs(e);
        Mat2 acc = identity();
        while (k > 0) {
            if ((k & 1) != 0) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    std::string str() const {
        std::ostringstream os;
        os << "((" << a11 << "," << a12 << "),(" << a21 << "," << a22 << "))";
        return os.str();
    }
};

// Basis bridge: h = h_1 x + h_2 corresponds to the IntVec (r_0, r_1) with
// (h_1, h_2) = (r_1, r_0). All matrices in this module use that ordering,
// matching the coordinates of the classification in the n = 2 case.
inline IntVec mat_apply(const Mat2& A, const IntVec& v) {
    if (v.n() != 2) throw invalid_params("mat_apply: n = 2 vectors only");
    BigInt h1 = v.r[1], h2 = v.r[0];
    return IntVec({A.a21 * h1 + A.a22 * h2, A.a11 * h1 + A.a12 * h2});
}

// Multiplication by g = ax + b as a matrix on (h_1, h_2):
// g h = ((b - ap) h_1 + a h_2) x + (aq h_1 + b h_2).
inline Mat2 matrix_of_poly(const PolyMap& g, const ReprParams& params) {
    if (params.degree != 2) throw invalid_params("matrix_of_poly: n = 2 only");
    IntVec r = residue(g, params);
    BigInt b = r.r[0], a = r.r[1];
    return {b - a * params.p[0], a, a * params.q, b};
}

// Inverse of the correspondence: g = ax + b with a = A12, b = A22, provided
// A11 = b - ap and A21 = aq.
inline std::optional<PolyMap> poly_of_matrix(const Mat2& A, const ReprParams& params) {
    if (params.degree != 2) throw invalid_params("poly_of_matrix: n = 2 only");
    BigInt a = A.a12, b = A.a22;
    if (A.a11 != b - a * params.p[0] || A.a21 != a * params.q) return std::nullopt;
    return Polynomial({b, a});
}

// A is an automorphism recognizable w.r.t. psi_{p,q} iff it is a
// multiplication matrix with det +-1 (equivalently c^2 - (p^2+4q) a^2 = +-4
// for c = 2b - ap).
inline bool is_recognizable_automorphism(const Mat2& A, const ReprParams& params) {
    auto g = poly_of_matrix(A, params);
    if (!g) return false;
    BigInt d = A.det();
    return d == 1 || d == -1;
}

// ---------------------------------------------------------------------------
// Shift relation {(u, v) : v ~ x * u}: a one-step delay of u feeding the
// equivalence machine. State = [pad_u, pad_v, buffered u digit, carries];
// acceptance drains the pending buffer through the zero-closure.
// ---------------------------------------------------------------------------
namespace detail {

// Relation {(u, v) : v ~ (a x^j) * u} as one synchronous machine: j delay
// buffers realize the shift iterate, the weight realizes the scalar
// transducer. j = 0 is the plain scalar relation.
inline RelationAutomaton build_monomial_relation(const ReprParams& params, std::int64_t weight, int delay,
                                                 std::uint64_t budget = default_state_budget()) {
    auto cp = CarryParams::of(params);
    const int n = cp.n;

    std::int64_t kmax = (std::abs(weight) + 1) * cp.bound;
    std::vector<std::int64_t> bounds(n);
    std::int64_t running = 1;
    bounds[n - 1] = kmax;
    for (int i = n - 2; i >= 0; --i) {
        running += std::abs(cp.p[i]);
        bounds[i] = kmax * running;
    }

    Alphabet alpha{2, cp.bound};
    MachineBuilder builder(alpha, budget);
    // state layout: [pad_u, pad_v, buf_1..buf_delay (oldest first), carries]
    std::vector<int> init(2 + delay + n, 0);
    std::uint32_t init_id = builder.intern(init);

    while (auto popped = builder.pop()) {
        std::uint32_t id = *popped;
        const std::vector<int> st = builder.state(id);
        for (int du = -cp.bound; du <= cp.bound + 1; ++du) {
            for (int dv = -cp.bound; dv <= cp.bound + 1; ++dv) {
                bool pu = du == cp.bound + 1, pv = dv == cp.bound + 1;
                if (pu && pv) continue;
                if (st[0] && !pu) continue;
                if (st[1] && !pv) continue;
                std::int64_t stream = delay > 0 ? st[2] : (pu ? 0 : du);
                std::int64_t d = st[2 + delay] + weight * stream - (pv ? 0 : dv);
                if (d % cp.q != 0) continue;
                std::vector<int> next(st.size());
                next[0] = st[0] || pu;
                next[1] = st[1] || pv;
                for (int i = 0; i + 1 < delay; ++i) next[2 + i] = st[3 + i];
                if (delay > 0) next[2 + delay - 1] = pu ? 0 : du;
                CarryState cur;
                cur.r.assign(st.begin() + 2 + delay, st.end());
                CarryState upd = cp.update(cur, d / cp.q);
                for (int i = 0; i < n; ++i) {
                    if (std::abs(upd.r[i]) > bounds[i])
                        throw internal_error("carry out of declared bounds in monomial relation");
                    next[2 + delay + i] = static_cast<int>(upd.r[i]);
                }
                ConvSymbol sym{pu ? kPad : du, pv ? kPad : dv};
                builder.add_transition(id, alpha.encode(sym), builder.intern(next));
            }
        }
    }

    // Acceptance: drain the pending buffered digits, then require the
    // carries to iterate to zero under zero inputs.
    std::map<std::vector<int>, int> memo;
    auto drains_to_zero = [&](std::vector<int> core) {  // [buf..., carries...]
        std::vector<std::vector<int>> path;
        int result = 0;
        while (true) {
            bool zero = std::all_of(core.begin(), core.end(), [](int x) { return x == 0; });
            if (zero) {
                result = 1;
                break;
            }
            if (auto it = memo.find(core); it != memo.end()) {
                result = it->second;
                break;
            }
            if (std::find(path.begin(), path.end(), core) != path.end()) {
                result = -1;
                break;
            }
            path.push_back(core);
            std::int64_t stream = delay > 0 ? core[0] : 0;
            std::int64_t d = core[delay] + weight * stream;
            if (d % cp.q != 0) {
                result = -1;
                break;
            }
            for (int i = 0; i + 1 < delay; ++i) core[i] = core[i + 1];
            if (delay > 0) core[delay - 1] = 0;
            CarryState cur;
            cur.r.assign(core.begin() + delay, core.end());
            CarryState upd = cp.update(cur, d / cp.q);
            for (int i = 0; i < n; ++i) core[delay + i] = static_cast<int>(upd.r[i]);
        }
        for (const auto& c : path) memo[c] = result;
        return result == 1;
    };

    Dfa dfa = builder.finalize(init_id, [&](const std::vector<int>& st) {
        return drains_to_zero(std::vector<int>(st.begin() + 2, st.end()));
    });
    return RelationAutomaton{trim(dfa), {"u", "v"}};
}

}  // namespace detail

// {(u, v) : v ~ x * u}, i.e. decode(v) = x * decode(u) in the quotient ring.
inline RelationAutomaton shift_relation(const Presentation& pres,
                                        std::uint64_t budget = default_state_budget()) {
    return detail::build_monomial_relation(pres.params, 1, 1, budget);
}

// ---------------------------------------------------------------------------
// phi_g = {(u, v) : v ~ g * u}: shift iterates s_j ~ x^j u supply the
// monomial images, a weighted addition carry relation ties them to v
// (sum_j a_j s_j ~ v), and the intermediate tracks are projected away.
// ---------------------------------------------------------------------------
inline RelationAutomaton build_phi_g_relation(const PolyMap& g, const Presentation& pres,
                                              std::uint64_t budget = default_state_budget()) {
    const ReprParams& params = pres.params;
    IntVec gr = residue(g, params);
    for (int j = 0; j < params.degree; ++j)
        if (abs(gr.r[j]) > 1000000) throw invalid_params("phi_g: coefficient too large for carry machinery");

    std::vector<int> powers;  // x^j terms needing a shift iterate
    for (int j = 1; j < params.degree; ++j)
        if (gr.r[j] != 0) powers.push_back(j);

    if (powers.empty()) {  // constant g: the scalar relation a_0 u ~ v
        return build_lincomb_relation(params, {to_int64(gr.r[0]), -1}, {"u", "v"}, budget);
    }
    if (powers.size() == 1 && gr.r[0] == 0) {  // single monomial a_j x^j
        RelationAutomaton rel =
            detail::build_monomial_relation(params, to_int64(gr.r[powers[0]]), powers[0], budget);
        rel.dfa = minimize(rel.dfa);
        return rel;
    }

    // tracks: (u, v, s_1, ..., s_k)
    const int k = static_cast<int>(powers.size());
    std::vector<RelationAutomaton> shifts;
    std::vector<Dfa> shift_min;
    for (int i = 0; i < k; ++i) {
        shifts.push_back(detail::build_monomial_relation(params, 1, powers[i], budget));
        shift_min.push_back(minimize(shifts.back().dfa));
    }
    std::vector<std::int64_t> weights(k + 2);
    weights[0] = to_int64(gr.r[0]);  // a_0 acts on u directly
    weights[1] = -1;                 // v
    std::vector<std::string> labels{"u", "v"};
    std::vector<int> lin_tracks{0, 1};
    for (int i = 0; i < k; ++i) {
        weights[2 + i] = to_int64(gr.r[powers[i]]);
        labels.push_back("s" + std::to_string(powers[i]));
        lin_tracks.push_back(2 + i);
    }
    RelationAutomaton lin = build_lincomb_relation(params, weights, labels, budget);
    Dfa lin_min = minimize(lin.dfa);

    Alphabet wide{2 + k, params.digit_bound_int()};
    std::vector<ProductComponent> comps;
    comps.push_back({&lin_min, lin_tracks});
    for (int i = 0; i < k; ++i) comps.push_back({&shift_min[i], {0, 2 + i}});
    Dfa joint = synchronized_product(wide, comps, budget);

    // project the auxiliary tracks, highest first
    Dfa cur = std::move(joint);
    for (int t = 2 + k - 1; t >= 2; --t) cur = minimize(determinize(project(cur, t), budget));
    return RelationAutomaton{std::move(cur), {"u", "v"}};
}

// ---------------------------------------------------------------------------
// Certificates used when treating a relation as the graph of a function on
// Dom.
// ---------------------------------------------------------------------------

// {(u, v) : u != v} as strings.
inline Dfa build_neq_relation(int digit_bound) {
    Alphabet alpha{2, digit_bound};
    Dfa d;
    d.alpha = alpha;
    d.num_states = 2;  // 0 = equal so far, 1 = differ (sticky)
    d.initial = 0;
    d.accepting = {false, true};
    d.trans.assign(2, {});
    for (int a = -digit_bound; a <= digit_bound + 1; ++a) {
        for (int b = -digit_bound; b <= digit_bound + 1; ++b) {
            bool pa = a == digit_bound + 1, pb = b == digit_bound + 1;
            if (pa && pb) continue;
            std::uint32_t sym = alpha.encode({pa ? kPad : a, pb ? kPad : b});
            d.trans[0].push_back({sym, (!pa && !pb && a == b) ? 0u : 1u});
            d.trans[1].push_back({sym, 1u});
        }
    }
    d.sort_transitions();
    return d;
}

struct FunctionCertificate {
    bool total = false;
    bool functional = false;
};

// Checks that rel, restricted to dom x dom, is the graph of a total
// function dom -> dom: no u has two distinct images, and every u has one.
inline FunctionCertificate certify_function_on_dom(const RelationAutomaton& rel, const Dfa& dom,
                                                   std::uint64_t budget = default_state_budget()) {
    FunctionCertificate cert;
    Dfa neq = build_neq_relation(rel.dfa.alpha.digit_bound);
    Alphabet three{3, rel.dfa.alpha.digit_bound};
    Dfa two_images = synchronized_product(three,
                                          {{&rel.dfa, {0, 1}},
                                           {&rel.dfa, {0, 2}},
                                           {&neq, {1, 2}},
                                           {&dom, {0}},
                                           {&dom, {1}},
                                           {&dom, {2}}},
                                          budget);
    cert.functional = is_empty(two_images);

    Dfa rel_on_dom = synchronized_product(
        rel.dfa.alpha, {{&rel.dfa, {0, 1}}, {&dom, {0}}, {&dom, {1}}}, budget);
    Dfa domain = determinize(project(rel_on_dom, 1), budget);
    cert.total = is_empty(intersect(dom, complement(domain)));
    return cert;
}

}  // namespace torus
