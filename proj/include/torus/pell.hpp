#pragma once

#include <set>

#include "torus/linmaps.hpp"

namespace torus {

inline BigInt isqrt(const BigInt& n) {
    if (n < 0) throw invalid_params("isqrt of negative");
    return sqrt(n);
}
inline bool is_square(const BigInt& n) {
    if (n < 0) return false;
    BigInt r = isqrt(n);
    return r * r == n;
}

// ---------------------------------------------------------------------------
// Continued fraction of sqrt(n): a0 followed by the repeating period.
// ---------------------------------------------------------------------------
struct CFExpansion {
    BigInt a0;
    std::vector<BigInt> period;
};

inline CFExpansion continued_fraction_sqrt(const BigInt& n) {
    if (n <= 0 || is_square(n)) throw invalid_params("continued_fraction_sqrt: n must be a positive nonsquare");
    CFExpansion cf;
    cf.a0 = isqrt(n);
    BigInt m = 0, d = 1, a = cf.a0;
    while (true) {
        m = d * a - m;
        d = (n - m * m) / d;
        a = (cf.a0 + m) / d;
        cf.period.push_back(a);
        if (a == 2 * cf.a0) break;
    }
    return cf;
}

// ---------------------------------------------------------------------------
// Pell and Pell-type solutions, exact.
// ---------------------------------------------------------------------------
struct PellSolution {
    BigInt x;  // x (or c for the +-4 equations)
    BigInt y;  // y (or a)
    int rhs;   // +1, -1, +4 or -4
    BigInt n;

    bool valid() const { return x * x - n * y * y == rhs; }
    bool operator==(const PellSolution&) const = default;
};

// Brahmagupta composition; right-hand sides multiply.
inline PellSolution brahmagupta(const PellSolution& s, const PellSolution& t) {
    if (s.n != t.n) throw invalid_params("brahmagupta: mismatched n");
    PellSolution r{s.x * t.x + s.n * s.y * t.y, s.x * t.y + s.y * t.x, s.rhs * t.rhs, s.n};
    if (!r.valid()) throw internal_error("brahmagupta: composition identity broken");
    return r;
}

// The +-4 composition is Brahmagupta divided by 2 (norm form of (c+a*sqrt(n))/2).
inline PellSolution compose4(const PellSolution& s, const PellSolution& t) {
    if (s.n != t.n) throw invalid_params("compose4: mismatched n");
    BigInt cx = s.x * t.x + s.n * s.y * t.y;
    BigInt cy = s.x * t.y + s.y * t.x;
    if (cx % 2 != 0 || cy % 2 != 0) throw internal_error("compose4: composition is not integral");
    PellSolution r{cx / 2, cy / 2, (s.rhs * t.rhs) / 4, s.n};
    if (!r.valid()) throw internal_error("compose4: composition identity broken");
    return r;
}

namespace detail {

// Fundamental solution of x^2 - n y^2 = +-1 via the continued fraction of
// sqrt(n). The negative equation is solvable iff the period length is odd.
inline std::optional<PellSolution> fundamental_unit(const BigInt& n, int rhs) {
    CFExpansion cf = continued_fraction_sqrt(n);
    const std::size_t period = cf.period.size();
    std::size_t need;  // index of the convergent h_{need}/k_{need}
    if (period % 2 == 0) {
        if (rhs == -1) return std::nullopt;
        need = period - 1;
    } else {
        need = (rhs == -1) ? period - 1 : 2 * period - 1;
    }
    BigInt h_prev = 1, h = cf.a0, k_prev = 0, k = 1;  // convergent 0 = a0 / 1
    for (std::size_t i = 1; i <= need; ++i) {
        BigInt ai = cf.period[(i - 1) % period];
        BigInt h_next = ai * h + h_prev;
        BigInt k_next = ai * k + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    PellSolution s{h, k, rhs, n};
    if (!s.valid()) throw internal_error("fundamental_unit: convergent does not solve the equation");
    return s;
}

}  // namespace detail

// Minimal positive solution of x^2 - n y^2 = rhs for rhs in {1,-1,4,-4};
// absent when the equation has no solution (-1 and -4 only).
inline std::optional<PellSolution> fundamental_solution(const BigInt& n, int rhs) {
    if (n <= 0 || is_square(n)) throw invalid_params("fundamental_solution: n must be a positive nonsquare");
    if (rhs == 1 || rhs == -1) return detail::fundamental_unit(n, rhs);
    if (rhs != 4 && rhs != -4) throw invalid_params("fundamental_solution: rhs must be +-1 or +-4");

    std::vector<PellSolution> candidates;
    auto consider = [&](const BigInt& x, const BigInt& y) {
        PellSolution s{x, y, rhs, n};
        if (x > 0 && y > 0 && s.valid()) candidates.push_back(s);
    };

    if (n % 4 == 0) {
        // c must be even: (c/2)^2 - (n/4) a^2 = rhs/4
        BigInt s4 = n / 4;
        if (!is_square(s4)) {
            if (auto f = detail::fundamental_unit(s4, rhs / 4)) consider(2 * f->x, f->y);
        }
    } else {
        // doubled +-1 solutions always qualify
        if (auto f = detail::fundamental_unit(n, rhs / 4)) {
            consider(2 * f->x, 2 * f->y);
            if (n % 4 == 1) {
                // odd (half-integer unit) solutions: the cube of
                // (c + a sqrt(n))/2 equals the +-1 fundamental, so
                // a (n a^2 +- 3) = 2 y1 pins a.
                BigInt target = 2 * f->y;
                for (BigInt a = 1; a * (n * a * a - 3) <= target; ++a) {
                    BigInt v = rhs == 4 ? BigInt(a * (n * a * a + 3)) : BigInt(a * (n * a * a - 3));
                    if (v == target && is_square(n * a * a + rhs)) consider(isqrt(n * a * a + rhs), a);
                }
            }
        }
        // scan a couple of CF periods of convergents as well
        CFExpansion cf = continued_fraction_sqrt(n);
        BigInt h_prev = 1, h = cf.a0, k_prev = 0, k = 1;
        std::size_t limit = 2 * cf.period.size() + 2;
        for (std::size_t i = 0; i <= limit; ++i) {
            if (h * h - n * k * k == rhs) consider(h, k);
            BigInt ai = cf.period[i % cf.period.size()];
            BigInt h_next = ai * h + h_prev, k_next = ai * k + k_prev;
            h_prev = h;
            h = h_next;
            k_prev = k;
            k = k_next;
        }
    }

    if (candidates.empty()) return std::nullopt;
    auto best = candidates[0];
    for (const auto& c : candidates)
        if (c.y < best.y || (c.y == best.y && c.x < best.x)) best = c;
    return best;
}

// count solutions in increasing order, starting from the fundamental one.
inline std::vector<PellSolution> generate_solutions(const PellSolution& fund, int count) {
    if (!fund.valid()) throw invalid_params("generate_solutions: invalid fundamental solution");
    std::vector<PellSolution> out;
    if (count <= 0) return out;
    const bool quarter = fund.rhs == 4 || fund.rhs == -4;
    // step through by the positive-rhs generator (the fundamental composed
    // with itself when the rhs is negative)
    PellSolution step = fund.rhs > 0 ? fund : (quarter ? compose4(fund, fund) : brahmagupta(fund, fund));
    PellSolution cur = fund;
    out.push_back(cur);
    for (int i = 1; i < count; ++i) {
        cur = quarter ? compose4(cur, step) : brahmagupta(cur, step);
        out.push_back(cur);
    }
    return out;
}

// Cayley's lift: an odd fundamental solution (u, v) of c^2 - n a^2 = +-4
// yields the fundamental solution of x^2 - n y^2 = +-1.
inline PellSolution cayley_lift(const PellSolution& odd_fund) {
    if (odd_fund.rhs != 4 && odd_fund.rhs != -4) throw invalid_params("cayley_lift: rhs must be +-4");
    if (odd_fund.x % 2 == 0 || odd_fund.y % 2 == 0) throw invalid_params("cayley_lift: solution must be odd");
    const BigInt& u = odd_fund.x;
    const BigInt& v = odd_fund.y;
    PellSolution out;
    if (odd_fund.rhs == 4)
        out = {(u * u - 3) * u / 2, (u * u - 1) * v / 2, 1, odd_fund.n};
    else
        out = {(u * u + 3) * u / 2, (u * u + 1) * v / 2, -1, odd_fund.n};
    if (!out.valid()) throw internal_error("cayley_lift: lifted pair does not solve the equation");
    return out;
}

// ---------------------------------------------------------------------------
// Theorem-3 style classification: for a given n = p^2 + 4q, the matrices
//   A = ((c-ap)/2, a; aq, (c+ap)/2)
// with 1+|p| < |q|, gcd(p,q) = 1, a != 0 and c^2 - n a^2 = +-4.
// ---------------------------------------------------------------------------
struct ClassifiedFamily {
    BigInt n;
    std::string case_tag;
    BigInt p, q;
    BigInt param;  // the r (or p) indexing the family
    std::vector<PellSolution> solutions;  // the (c, a) pairs used, a > 0
    std::vector<Mat2> matrices;           // closed under both sign choices
};

struct SearchBounds {
    BigInt param_bound = 12;  // |r| (or |p|) limit
    int solution_count = 2;   // Pell solutions instantiated per family
};

struct ClassificationResult {
    std::vector<ClassifiedFamily> families;
    std::vector<std::string> discrepancies;  // theorem-range instances failing the raw predicates
};

namespace detail {

struct Mat2Less {
    bool operator()(const Mat2& a, const Mat2& b) const {
        return std::tie(a.a11, a.a12, a.a21, a.a22) < std::tie(b.a11, b.a12, b.a21, b.a22);
    }
};

// Eq. (1) matrix for (c, a) over (p, q); requires c = ap (mod 2).
inline Mat2 eq1_matrix(const BigInt& p, const BigInt& q, const BigInt& c, const BigInt& a) {
    if ((c - a * p) % 2 != 0) throw internal_error("eq1_matrix: parity violated");
    return {(c - a * p) / 2, a, a * q, (c + a * p) / 2};
}

inline void emit_family(ClassificationResult& out, const BigInt& n, const std::string& tag, const BigInt& p,
                        const BigInt& q, const BigInt& param, const std::vector<PellSolution>& sols) {
    // raw predicates; theorem ranges should already imply them
    auto reject = [&](const std::string& why) {
        std::ostringstream os;
        os << tag << " p=" << p << " q=" << q << ": " << why;
        out.discrepancies.push_back(os.str());
    };
    if (!(1 + abs(p) < abs(q))) return reject("1+|p| < |q| fails");
    if (gcd(p, q) != 1) return reject("gcd(p,q) != 1");
    if (p * p + 4 * q != n) return reject("n != p^2 + 4q");

    ClassifiedFamily fam;
    fam.n = n;
    fam.case_tag = tag;
    fam.p = p;
    fam.q = q;
    fam.param = param;
    std::set<Mat2, Mat2Less> mats;
    for (const auto& s : sols) {
        if (s.y == 0) continue;  // a != 0
        if (!s.valid()) {
            reject("solution fails its Pell-type equation");
            return;
        }
        fam.solutions.push_back(s);
        for (const BigInt& c : {s.x, BigInt(-s.x)}) {
            Mat2 m = eq1_matrix(p, q, c, s.y);
            BigInt d = m.det();
            if (d != 1 && d != -1) {
                reject("det != +-1");
                return;
            }
            mats.insert(m);
            mats.insert(-m);
        }
    }
    if (fam.solutions.empty()) return;
    fam.matrices.assign(mats.begin(), mats.end());
    out.families.push_back(std::move(fam));
}

}  // namespace detail

inline ClassificationResult enumerate_theorem3(const BigInt& n, const SearchBounds& bounds = {}) {
    if (n < -4) throw invalid_params("enumerate_theorem3: nontrivial solutions need n >= -4");
    ClassificationResult out;
    const BigInt& R = bounds.param_bound;

    auto r_range = [&](auto&& admit) {
        for (BigInt r = -R; r <= R; ++r) admit(r);
    };

    if (n == -4) {
        r_range([&](const BigInt& r) {
            if (abs(r) < 4 || r % 2 != 0) return;
            detail::emit_family(out, n, "n=-4", 2 * r, -(r * r + 1), r, {PellSolution{0, 1, 4, n}});
        });
    } else if (n == -3) {
        r_range([&](const BigInt& r) {
            if (!(r <= -3 || r >= 2)) return;
            BigInt m = ((r % 3) + 3) % 3;
            if (m != 0 && m != 2) return;
            detail::emit_family(out, n, "n=-3", 2 * r + 1, -(r * r + r + 1), r, {PellSolution{1, 1, 4, n}});
        });
    } else if (n == 1) {
        r_range([&](const BigInt& r) {
            if (!(r <= -4 || r >= 3)) return;
            detail::emit_family(out, n, "n=1", 2 * r + 1, -(r * r + r), r, {PellSolution{0, 2, -4, n}});
        });
    } else if (n == 4) {
        r_range([&](const BigInt& r) {
            if (abs(r) < 4 || r % 2 != 0) return;
            detail::emit_family(out, n, "n=4", 2 * r, 1 - r * r, r, {PellSolution{0, 1, -4, n}});
        });
    } else if (n > 0 && !is_square(n) && n % 4 == 0) {
        BigInt s = n / 4;
        std::vector<PellSolution> sols;
        for (int rhs : {1, -1}) {
            if (auto f = fundamental_solution(s, rhs)) {
                auto gen = generate_solutions(*f, bounds.solution_count);
                // (c, a) = (2x, a)
                for (const auto& g : gen) sols.push_back(PellSolution{2 * g.x, g.y, 4 * rhs, n});
            }
        }
        r_range([&](const BigInt& r) {
            bool inner = (abs(r) + 1) * (abs(r) + 1) < s;
            bool outer = (abs(r) - 1) * (abs(r) - 1) > s + 2;
            if (!inner && !outer) return;
            if (gcd(r, s) != 1) return;
            if (((r - s) % 2) == 0) return;  // r and s must differ in parity
            detail::emit_family(out, n, "n=4s", 2 * r, s - r * r, r, sols);
        });
    } else if (n > 0 && !is_square(n) && n % 4 == 1) {
        std::vector<PellSolution> sols;
        for (int rhs : {4, -4}) {
            if (auto f = fundamental_solution(n, rhs)) {
                auto gen = generate_solutions(*f, bounds.solution_count);
                sols.insert(sols.end(), gen.begin(), gen.end());
            }
        }
        r_range([&](const BigInt& p) {
            if (((p % 2) + 2) % 2 != 1) return;  // p odd
            bool inner = (abs(p) + 2) * (abs(p) + 2) < n;
            bool outer = (abs(p) - 2) * (abs(p) - 2) > n + 8;
            if (!inner && !outer) return;
            if (gcd(p, n) != 1) return;
            if ((n - p * p) % 4 != 0) return;
            detail::emit_family(out, n, "n=1mod4", p, (n - p * p) / 4, p, sols);
        });
    }
    // n in {0, -1, -2} and perfect squares other than 1, 4: no nontrivial families
    return out;
}

// ---------------------------------------------------------------------------
// S_{p,q} structure report: all Eq. (1) matrices with |c| <= bound,
// closure under multiplication within the bound, element orders, and the
// isomorphism type (Z4, Z6, Z2xZ2 or ZxZ2).
// ---------------------------------------------------------------------------
struct MonoidReport {
    BigInt n;
    std::vector<Mat2> elements;  // includes +-I
    std::vector<int> orders;     // parallel to elements; 0 = infinite order
    bool closed = false;
    std::string iso_type;
};

inline MonoidReport monoid_structure(const BigInt& p, const BigInt& q, const BigInt& trace_bound) {
    ReprParams params(std::vector<BigInt>{p}, q);  // validates 1+|p| < |q|
    if (gcd(p, q) != 1) throw invalid_params("monoid_structure: gcd(p,q) = 1 required");
    BigInt n = p * p + 4 * q;
    if (n < -4 || n == 0 || n == -1 || n == -2 || (n > 4 && is_square(n)))
        throw invalid_params("monoid_structure: n = p^2+4q admits no nontrivial solutions");

    MonoidReport rep;
    rep.n = n;
    std::set<Mat2, detail::Mat2Less> mats;
    for (BigInt c = 0; c <= trace_bound; ++c) {
        for (int rhs : {4, -4}) {
            BigInt num = c * c - rhs;
            if (n == 0 || num % n != 0) continue;
            BigInt a2 = num / n;
            if (a2 < 0 || !is_square(a2)) continue;
            BigInt a = isqrt(a2);
            for (const BigInt& cc : {c, BigInt(-c)})
                for (const BigInt& aa : {a, BigInt(-a)}) mats.insert(detail::eq1_matrix(p, q, cc, aa));
        }
    }
    rep.elements.assign(mats.begin(), mats.end());

    for (const auto& m : rep.elements) {
        int order = 0;
        Mat2 acc = m;
        for (int k = 1; k <= 12; ++k) {
            if (acc == Mat2::identity()) {
                order = k;
                break;
            }
            acc = acc * m;
        }
        rep.orders.push_back(order);
    }

    rep.closed = true;
    for (const auto& a : rep.elements) {
        for (const auto& b : rep.elements) {
            Mat2 prod = a * b;
            if (!is_recognizable_automorphism(prod, params)) rep.closed = false;
            if (abs(prod.trace()) <= trace_bound && !mats.count(prod)) rep.closed = false;
        }
    }

    bool has_infinite = std::any_of(rep.orders.begin(), rep.orders.end(), [](int o) { return o == 0; });
    int max_order = 0;
    for (int o : rep.orders) max_order = std::max(max_order, o);
    if (has_infinite)
        rep.iso_type = "ZxZ2";
    else if (max_order == 6)
        rep.iso_type = "Z6";
    else if (max_order == 4)
        rep.iso_type = "Z4";
    else
        rep.iso_type = "Z2xZ2";
    return rep;
}

}  // namespace torus
