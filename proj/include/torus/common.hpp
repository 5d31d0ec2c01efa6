#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace torus {

using BigInt = boost::multiprecision::cpp_int;

// Thrown when presentation parameters violate 1 + sum|p_i| < |q| (or a
// related precondition). CLI maps this to exit code 1.
class invalid_params : public std::invalid_argument {
public:
    explicit invalid_params(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a subset construction or product exceeds the state budget.
// CLI maps this to exit code 2.
class state_budget_exceeded : public std::runtime_error {
public:
    explicit state_budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// Internal invariant breach (carry out of declared bounds, carry cycle
// without reaching zero, ...). CLI maps this to exit code 3.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

inline std::int64_t to_int64(const BigInt& v) {
    return static_cast<std::int64_t>(v);
}

}  // namespace torus
