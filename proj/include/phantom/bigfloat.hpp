#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include "phantom/rational.hpp"

namespace phantom {

// Arbitrary-precision real with runtime-selectable mantissa. The working
// precision is the thread-local default at the point a value is created, so
// kernels set it on entry (see ScopedPrecision) rather than assuming a
// global configuration.
using BigFloat =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                  boost::multiprecision::et_off>;

inline unsigned digits10_for_bits(unsigned bits) {
    // ceil(bits * log10(2)) plus a couple of guard digits
    return static_cast<unsigned>(bits * 0.3010299956639812) + 3;
}

class ScopedPrecision {
  public:
    explicit ScopedPrecision(unsigned bits)
        : saved_(BigFloat::default_precision()) {
        BigFloat::default_precision(digits10_for_bits(bits));
    }
    ~ScopedPrecision() { BigFloat::default_precision(saved_); }
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

  private:
    unsigned saved_;
};

inline BigFloat to_bigfloat(const Rat& x) {
    return BigFloat(boost::multiprecision::numerator(x).str()) /
           BigFloat(boost::multiprecision::denominator(x).str());
}

}  // namespace phantom
