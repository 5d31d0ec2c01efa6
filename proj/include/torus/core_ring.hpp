#pragma once

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <vector>

#include "torus/common.hpp"

namespace torus {

// Truncation toward zero: max{m <= r} for r >= 0, min{m >= r} for r < 0.
// Built-in and cpp_int division both truncate toward zero, so this is a
// checked division.
template <class I>
I integral_part(const I& num, const I& den) {
    if (den == 0) throw invalid_params("integral_part: zero denominator");
    return num / den;
}

inline std::int64_t integral_part_i64(std::int64_t num, std::int64_t den) {
    if (den == 0) throw invalid_params("integral_part: zero denominator");
    return num / den;
}

// Parameters of a presentation psi_{p,q}: the polynomial
// t(x) = x^n + p_{n-1} x^{n-1} + ... + p_1 x - q.
// p[i] is the coefficient of x^{i+1}, so p.size() == n-1.
struct ReprParams {
    int degree = 2;              // n >= 2
    std::vector<BigInt> p;       // <p_1, ..., p_{n-1}>
    BigInt q = 3;

    ReprParams() = default;
    ReprParams(std::vector<BigInt> p_coeffs, BigInt q_val)
        : degree(static_cast<int>(p_coeffs.size()) + 1), p(std::move(p_coeffs)), q(std::move(q_val)) {
        validate();
    }
    // n = 2 shorthand: t(x) = x^2 + p x - q.
    ReprParams(long long p1, long long q_val) : ReprParams(std::vector<BigInt>{p1}, BigInt(q_val)) {}

    void validate() const {
        if (degree < 2 || p.size() != static_cast<std::size_t>(degree - 1))
            throw invalid_params("ReprParams: need degree n >= 2 with n-1 coefficients p_1..p_{n-1}");
        BigInt s = 1;
        for (const auto& pi : p) s += abs(pi);
        if (!(s < abs(q))) {
            std::ostringstream os;
            os << "ReprParams: 1";
            for (std::size_t i = p.size(); i-- > 0;) os << "+|" << p[i] << "|";
            os << " < |" << q << "| fails (1 + sum|p_i| < |q| is required)";
            throw invalid_params(os.str());
        }
    }

    // gcd(p_1, q) = 1 marks the presentations whose cyclic components are
    // provably non-FA-recognizable.
    bool nies_semukhin() const { return gcd(p[0], q) == 1; }

    // |q| - 1, the largest digit magnitude.
    BigInt digit_bound() const { return abs(q) - 1; }
    int digit_bound_int() const { return static_cast<int>(digit_bound()); }

    // Coefficients of t(x), low degree first: (-q, p_1, ..., p_{n-1}, 1).
    std::vector<BigInt> modulus() const {
        std::vector<BigInt> t;
        t.push_back(-q);
        for (const auto& pi : p) t.push_back(pi);
        t.push_back(1);
        return t;
    }

    bool operator==(const ReprParams&) const = default;
};

// Integer polynomial, coefficients low degree first. Normalized form has no
// trailing zero coefficients; the zero polynomial is the empty vector.
struct Polynomial {
    std::vector<BigInt> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<BigInt> c) : coeffs(std::move(c)) { normalize(); }
    static Polynomial constant(BigInt c) { return Polynomial({std::move(c)}); }
    static Polynomial monomial(BigInt c, std::size_t deg) {
        std::vector<BigInt> v(deg + 1);
        v[deg] = std::move(c);
        return Polynomial(std::move(v));
    }

    void normalize() {
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    }
    bool is_zero() const { return coeffs.empty(); }
    // Degree of the zero polynomial is -1 by convention here.
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    const BigInt& operator[](std::size_t i) const {
        static const BigInt zero = 0;
        return i < coeffs.size() ? coeffs[i] : zero;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<BigInt> c(std::max(a.coeffs.size(), b.coeffs.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<BigInt> c(std::max(a.coeffs.size(), b.coeffs.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<BigInt> c(a.coeffs.size() + b.coeffs.size() - 1);
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
        return Polynomial(std::move(c));
    }
    bool operator==(const Polynomial&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? "," : "") << coeffs[i];
        os << "]";
        return os.str();
    }
};

// Residue of a polynomial mod t, identified with an element of Z^n:
// (r_0, ..., r_{n-1}) represents r_{n-1} x^{n-1} + ... + r_0.
struct IntVec {
    std::vector<BigInt> r;

    IntVec() = default;
    explicit IntVec(std::vector<BigInt> v) : r(std::move(v)) {}
    static IntVec zero(int n) { return IntVec(std::vector<BigInt>(n)); }
    // xi = (1,0,...,0); eta_i = e_{i+1} for i = 1..n-1.
    static IntVec unit(int n, int i) {
        IntVec v = zero(n);
        v.r.at(i) = 1;
        return v;
    }

    int n() const { return static_cast<int>(r.size()); }
    bool is_zero() const {
        return std::all_of(r.begin(), r.end(), [](const BigInt& c) { return c == 0; });
    }
    friend IntVec operator+(const IntVec& a, const IntVec& b) {
        IntVec c = a;
        for (std::size_t i = 0; i < c.r.size(); ++i) c.r[i] += b.r[i];
        return c;
    }
    friend IntVec operator-(const IntVec& a, const IntVec& b) {
        IntVec c = a;
        for (std::size_t i = 0; i < c.r.size(); ++i) c.r[i] -= b.r[i];
        return c;
    }
    friend IntVec operator*(const BigInt& k, const IntVec& a) {
        IntVec c = a;
        for (auto& x : c.r) x *= k;
        return c;
    }
    bool operator==(const IntVec&) const = default;

    Polynomial to_poly() const { return Polynomial(r); }
    std::string str() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << ")";
        return os.str();
    }
};

// Reduction sweep from the termination proof: eliminate |a_i| >= |q| via
// x^{i+n} + p_{n-1} x^{i+n-1} + ... + p_1 x^{i+1} ~ q x^i, repeating full
// sweeps until none changes anything. The step budget guards the failure
// mode that appears when the parameter inequality is dropped.
inline Polynomial reduce(const Polynomial& f, const ReprParams& params) {
    params.validate();
    const int n = params.degree;
    const BigInt q = params.q;
    const BigInt absq = abs(q);

    std::vector<BigInt> a = f.coeffs;
    BigInt max_a = 0;
    for (const auto& c : a) {
        BigInt ac = abs(c);
        if (ac > max_a) max_a = ac;
    }
    BigInt budget = BigInt(a.size()) * (1 + max_a);  // (degree+1)*(1+max|a_i|)

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (abs(a[i]) < absq) continue;
            if (budget-- <= 0) throw internal_error("reduce: iteration budget exceeded");
            BigInt k = integral_part(a[i], q);
            a[i] -= k * q;
            if (a.size() < i + n + 1) a.resize(i + n + 1);
            for (int j = 1; j < n; ++j) a[i + j] += k * params.p[j - 1];
            a[i + n] += k;
            changed = true;
        }
    }
    return Polynomial(std::move(a));
}

// Exact remainder of f mod the monic t(x), as an element of Z^n.
inline IntVec residue(const Polynomial& f, const ReprParams& params) {
    params.validate();
    const int n = params.degree;
    std::vector<BigInt> a = f.coeffs;
    if (a.size() < static_cast<std::size_t>(n)) a.resize(n);
    for (std::size_t i = a.size(); i-- > static_cast<std::size_t>(n);) {
        // x^i = x^{i-n} t - p_{n-1} x^{i-1} - ... - p_1 x^{i-n+1} + q x^{i-n}
        BigInt lead = a[i];
        if (lead == 0) continue;
        a[i] = 0;
        for (int j = 1; j < n; ++j) a[i - n + j] -= lead * params.p[j - 1];
        a[i - n] += lead * params.q;
    }
    a.resize(n);
    return IntVec(std::move(a));
}

// f ~ g iff t divides f - g.
inline bool equivalent(const Polynomial& f, const Polynomial& g, const ReprParams& params) {
    return residue(f - g, params).is_zero();
}

}  // namespace torus
