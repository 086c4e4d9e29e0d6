#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <stdexcept>
#include <string>

namespace phantom {

using Rat = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Thrown when exact-arithmetic operands outgrow the configured size budget.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::size_t rat_bits(const Rat& x) {
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    const std::size_t nb = num == 0 ? 1 : boost::multiprecision::msb(abs(num)) + 1;
    const std::size_t db = boost::multiprecision::msb(den) + 1;
    return nb > db ? nb : db;
}

inline void check_rat_budget(const Rat& x, std::size_t limit_bits,
                             const char* where) {
    if (rat_bits(x) > limit_bits) {
        throw resource_error(std::string(where) +
                             ": exact rational exceeded the size budget of " +
                             std::to_string(limit_bits) + " bits");
    }
}

}  // namespace phantom
