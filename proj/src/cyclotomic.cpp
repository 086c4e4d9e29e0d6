#include "phantom/cyclotomic.hpp"

#include <stdexcept>

namespace phantom {

namespace {

using Poly = CyclotomicField::Poly;

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

// quotient of exact polynomial division (remainder must vanish)
Poly divide_exact(Poly num, const Poly& den) {
    Poly q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, Rat(0));
    while (num.size() >= den.size() && !num.empty()) {
        const std::size_t shift = num.size() - den.size();
        const Rat c = num.back() / den.back();
        q[shift] = c;
        for (std::size_t i = 0; i < den.size(); ++i)
            num[shift + i] -= c * den[i];
        trim(num);
    }
    if (!num.empty()) throw std::logic_error("cyclotomic division not exact");
    return q;
}

}  // namespace

CyclotomicField::Poly CyclotomicField::cyclotomic_polynomial(int m) {
    // Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d
    Poly num(m + 1, Rat(0));
    num[0] = -1;
    num[m] = 1;
    for (int d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        num = divide_exact(num, cyclotomic_polynomial(d));
    }
    return num;
}

CyclotomicField::CyclotomicField(int two_n) : two_n_(two_n) {
    if (two_n < 4) throw std::invalid_argument("cyclotomic order must be >= 4");
    modulus_ = cyclotomic_polynomial(two_n);
}

Poly CyclotomicField::reduce(Poly a) const {
    const std::size_t deg = modulus_.size() - 1;
    while (a.size() > deg) {
        const Rat c = a.back();
        const std::size_t shift = a.size() - modulus_.size();
        if (c != 0)
            for (std::size_t i = 0; i < modulus_.size(); ++i)
                a[shift + i] -= c * modulus_[i];
        a.pop_back();
    }
    trim(a);
    return a;
}

Poly CyclotomicField::root_power(int e) const {
    e %= two_n_;
    if (e < 0) e += two_n_;
    Poly a(e + 1, Rat(0));
    a[e] = 1;
    return reduce(std::move(a));
}

Poly CyclotomicField::cosine(int j, int m) const {
    const int n = two_n_ / 2;
    const long e = static_cast<long>(j) * m % two_n_;
    Poly c = add(root_power(static_cast<int>(e)), root_power(static_cast<int>(-e)));
    (void)n;
    return scale(c, Rat(1, 2));
}

Poly CyclotomicField::mul(const Poly& a, const Poly& b) const {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) r[i + j] += a[i] * b[j];
    }
    return reduce(std::move(r));
}

Poly CyclotomicField::add(const Poly& a, const Poly& b) const {
    Poly r = a.size() >= b.size() ? a : b;
    const Poly& s = a.size() >= b.size() ? b : a;
    for (std::size_t i = 0; i < s.size(); ++i) r[i] += s[i];
    trim(r);
    return r;
}

Poly CyclotomicField::sub(const Poly& a, const Poly& b) const {
    Poly r = a;
    if (r.size() < b.size()) r.resize(b.size(), Rat(0));
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

Poly CyclotomicField::scale(const Poly& a, const Rat& s) const {
    Poly r = a;
    for (auto& c : r) c *= s;
    trim(r);
    return r;
}

Poly CyclotomicField::inverse(const Poly& a) const {
    // extended Euclid over Q[x]: u*a + v*Phi = gcd; gcd must be a unit
    Poly r0 = modulus_, r1 = a;
    Poly t0{}, t1{Rat(1)};
    trim(r1);
    if (r1.empty()) throw std::domain_error("cyclotomic inverse of zero");
    while (true) {
        trim(r1);
        if (r1.empty()) throw std::domain_error("element not invertible");
        if (r1.size() == 1) break;
        // r0 = q*r1 + r2
        Poly q(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 1, Rat(0));
        Poly rem = r0;
        while (rem.size() >= r1.size() && !rem.empty()) {
            const std::size_t shift = rem.size() - r1.size();
            const Rat c = rem.back() / r1.back();
            q[shift] = c;
            for (std::size_t i = 0; i < r1.size(); ++i) rem[shift + i] -= c * r1[i];
            trim(rem);
        }
        Poly t2 = t0;
        // t2 = t0 - q*t1
        {
            Poly qt(q.size() + t1.size() - 1, Rat(0));
            for (std::size_t i = 0; i < q.size(); ++i)
                if (q[i] != 0)
                    for (std::size_t j = 0; j < t1.size(); ++j) qt[i + j] += q[i] * t1[j];
            if (t2.size() < qt.size()) t2.resize(qt.size(), Rat(0));
            for (std::size_t i = 0; i < qt.size(); ++i) t2[i] -= qt[i];
            trim(t2);
        }
        r0 = std::move(r1);
        r1 = std::move(rem);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    // r1 is a nonzero constant: inverse = t1 / r1
    Poly inv = t1;
    for (auto& c : inv) c /= r1[0];
    return reduce(std::move(inv));
}

Poly CyclotomicField::power(const Poly& a, long e) const {
    Poly base = a;
    if (e < 0) {
        base = inverse(a);
        e = -e;
    }
    Poly acc{Rat(1)};
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

bool CyclotomicField::is_rational(const Poly& a) const { return a.size() <= 1; }

Rat CyclotomicField::to_rational(const Poly& a) const {
    if (a.empty()) return Rat(0);
    if (a.size() != 1)
        throw std::logic_error("cyclotomic element is not rational");
    return a[0];
}

Rat magic_sum_f_exact(int n, int k, long p) {
    // sin(phi) sin(k phi) = (cos((k-1)phi) - cos((k+1)phi)) / 2
    CyclotomicField F(2 * n);
    Poly acc{};
    for (int j = 1; j <= n / 2 - 1; ++j) {
        Poly c = F.power(F.cosine(j, 1), p);
        Poly s = F.sub(F.cosine(j, k - 1), F.cosine(j, k + 1));
        Poly term = F.scale(F.mul(c, s), Rat(j % 2 == 0 ? 1 : -1, 2));
        acc = F.add(acc, term);
    }
    return F.to_rational(F.scale(acc, Rat(-1)));
}

Rat magic_sum_h_exact(int n, int r, long p) {
    CyclotomicField F(2 * n);
    Poly acc{};
    for (int j = 1; j <= n / 2 - 1; ++j) {
        Poly c = F.power(F.cosine(j, 1), p);
        Poly term = F.scale(F.mul(c, F.cosine(j, r)), Rat(j % 2 == 0 ? 1 : -1));
        acc = F.add(acc, term);
    }
    return F.to_rational(acc);
}

}  // namespace phantom
