#pragma once

#include <vector>

#include "phantom/rational.hpp"

namespace phantom {

// Exact arithmetic in Q[x]/Phi_{2n}(x), x a primitive 2n-th root of unity.
// cos(m pi j / n) = (x^{jm} + x^{-jm})/2 lives in this field, so the
// alternating trigonometric sums can be evaluated as exact rationals,
// including negative cosine powers (field inversion). Reduction to a
// degree-0 element certifies that a sum is rational.
class CyclotomicField {
  public:
    using Poly = std::vector<Rat>;  // coefficients, low degree first

    explicit CyclotomicField(int two_n);

    int order() const { return two_n_; }
    int degree() const { return static_cast<int>(modulus_.size()) - 1; }

    Poly root_power(int e) const;  // x^e mod Phi
    Poly cosine(int j, int m) const;  // cos(m pi j / n)
    Poly mul(const Poly& a, const Poly& b) const;
    Poly add(const Poly& a, const Poly& b) const;
    Poly sub(const Poly& a, const Poly& b) const;
    Poly scale(const Poly& a, const Rat& s) const;
    Poly inverse(const Poly& a) const;
    Poly power(const Poly& a, long e) const;  // e may be negative

    bool is_rational(const Poly& a) const;
    Rat to_rational(const Poly& a) const;  // throws unless degree 0

    static Poly cyclotomic_polynomial(int m);

  private:
    int two_n_;
    Poly modulus_;  // Phi_{2n}, monic

    Poly reduce(Poly a) const;
};

// f_k(p) = -sum_{j=1}^{n/2-1} (-1)^j cos^p(phi_j) sin(phi_j) sin(k phi_j),
// phi_j = pi j / n, evaluated exactly. Throws if the result is not rational
// (never observed for integer k, p in range).
Rat magic_sum_f_exact(int n, int k, long p);

// h_r(p) = sum_j (-1)^j cos^p(phi_j) cos(r phi_j), exact.
Rat magic_sum_h_exact(int n, int r, long p);

}  // namespace phantom
