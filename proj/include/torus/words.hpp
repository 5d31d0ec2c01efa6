#pragma once

#include <compare>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torus/core_ring.hpp"

namespace torus {

// A digit of Sigma_q = {-(|q|-1), ..., |q|-1}. Digits fit machine words
// even when polynomial coefficients do not.
using Digit = int;

// The padding symbol used on the shorter tracks of a convolution.
constexpr Digit kPad = std::numeric_limits<int>::min();

// Low-coefficient-first digit string: a_0 ... a_n represents
// a_n x^n + ... + a_0.
using DigitString = std::vector<Digit>;

// One column of a convolution: an m-tuple of digit-or-pad.
using ConvSymbol = std::vector<Digit>;
using ConvString = std::vector<ConvSymbol>;

inline bool digits_in_bounds(const DigitString& w, int digit_bound) {
    for (Digit d : w)
        if (d == kPad || d < -digit_bound || d > digit_bound) return false;
    return true;
}

inline Polynomial string_to_poly(const DigitString& w) {
    std::vector<BigInt> c(w.begin(), w.end());
    return Polynomial(std::move(c));
}

// Inverse of string_to_poly on strings without trailing zeros; only defined
// when every coefficient fits Sigma_q for some q (checked by the caller).
inline DigitString poly_to_string(const Polynomial& f) {
    DigitString w;
    w.reserve(f.coeffs.size());
    for (const auto& c : f.coeffs) w.push_back(static_cast<Digit>(c));
    return w;
}

// Length-lexicographic order with digit order -(|q|-1) < ... < (|q|-1).
inline std::strong_ordering llex_compare(const DigitString& u, const DigitString& v) {
    if (u.size() != v.size()) return u.size() <=> v.size();
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != v[i]) return u[i] <=> v[i];
    return std::strong_ordering::equal;
}

// Stack strings one under another, padding shorter ones with kPad.
inline ConvString convolve(const std::vector<DigitString>& tracks) {
    std::size_t len = 0;
    for (const auto& w : tracks) len = std::max(len, w.size());
    ConvString out(len, ConvSymbol(tracks.size(), kPad));
    for (std::size_t t = 0; t < tracks.size(); ++t)
        for (std::size_t i = 0; i < tracks[t].size(); ++i) out[i][t] = tracks[t][i];
    return out;
}

inline ConvString convolve(const DigitString& a, const DigitString& b) {
    return convolve(std::vector<DigitString>{a, b});
}
inline ConvString convolve(const DigitString& a, const DigitString& b, const DigitString& c) {
    return convolve(std::vector<DigitString>{a, b, c});
}

// Recover the original tuple from a convolution.
inline std::vector<DigitString> deconvolve(const ConvString& s, std::size_t arity) {
    std::vector<DigitString> tracks(arity);
    for (const auto& sym : s)
        for (std::size_t t = 0; t < arity; ++t)
            if (sym.at(t) != kPad) tracks[t].push_back(sym[t]);
    return tracks;
}

// Bracketed decimal syntax, readable for |q| > 10: [-2,2,2]. The empty
// string is [].
inline std::string format_digits(const DigitString& w) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
    os << "]";
    return os.str();
}

inline DigitString parse_digits(const std::string& text) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    if (i >= text.size() || text[i] != '[')
        throw invalid_params("digit string must look like [d0,d1,...]: " + text);
    ++i;
    DigitString w;
    skip_ws();
    if (i < text.size() && text[i] == ']') return w;
    while (true) {
        skip_ws();
        std::size_t end = i;
        if (end < text.size() && (text[end] == '-' || text[end] == '+')) ++end;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == i) throw invalid_params("bad digit in digit string: " + text);
        w.push_back(std::stoi(text.substr(i, end - i)));
        i = end;
        skip_ws();
        if (i >= text.size()) throw invalid_params("unterminated digit string: " + text);
        if (text[i] == ']') break;
        if (text[i] != ',') throw invalid_params("expected ',' or ']' in digit string: " + text);
        ++i;
    }
    return w;
}

}  // namespace torus
