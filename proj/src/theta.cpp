#include "phantom/theta.hpp"

#include <cmath>
#include <stdexcept>

namespace phantom {

namespace {

void check_nome(double q) {
    if (!(q >= 0.0) || q >= 1.0)
        throw std::domain_error("theta nome must satisfy 0 <= q < 1");
}

constexpr double kTrunc = 1e-18;
constexpr int kMinTerms = 5;

// mantissa needed so the alternating theta series keep ~30 good digits
unsigned theta_bits_for(double log_q) {
    if (log_q >= 0.0) throw std::domain_error("theta nome must be < 1");
    const double lost_bits = (M_PI * M_PI / 4.0) / (-log_q) * 1.4426950408889634;
    const double bits = 128.0 + lost_bits;
    if (bits > double(1 << 18))
        throw std::domain_error("theta evaluation too close to q = 1");
    return static_cast<unsigned>(bits);
}

}  // namespace

Theta4Eval theta4_dq(double q) {
    check_nome(q);
    Theta4Eval e;
    // alternating cancellation: past q ~ 0.35 evaluate in a wider mantissa
    // and round the results back to double
    if (q > 0.35) {
        ScopedPrecision guard(theta_bits_for(std::log(q)));
        const BigFloat Q(q);
        const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(
            BigFloat::default_precision() * 3.32) + 8);
        BigFloat v(1), d1(0), d2(0);
        int sgn = -1;
        for (int j = 1;; ++j, sgn = -sgn) {
            const BigFloat ex = BigFloat(j) * j;
            const BigFloat t0 = 2 * sgn * pow(Q, ex);
            const BigFloat t1 = 2 * sgn * ex * pow(Q, ex - 1);
            const BigFloat t2 = 2 * sgn * ex * (ex - 1) * pow(Q, ex - 2);
            v += t0;
            d1 += t1;
            d2 += t2;
            e.terms = j;
            if (j >= kMinTerms && abs(t0) < eps * abs(v) && abs(t1) < eps * abs(d1) &&
                abs(t2) < eps * (abs(d2) + abs(d1)))
                break;
            if (j > 2000000) break;
        }
        e.value = static_cast<double>(v);
        e.d1 = static_cast<double>(d1);
        e.d2 = static_cast<double>(d2);
        return e;
    }
    e.value = 1.0;
    double sgn = -1.0;
    for (int j = 1;; ++j, sgn = -sgn) {
        const double ex = double(j) * j;
        const double qe = std::pow(q, ex);
        const double t0 = 2.0 * sgn * qe;
        const double t1 = q > 0.0 ? 2.0 * sgn * ex * std::pow(q, ex - 1) : (j == 1 ? -2.0 : 0.0);
        const double t2 = q > 0.0 ? 2.0 * sgn * ex * (ex - 1) * std::pow(q, ex - 2)
                                  : (j == 1 ? 0.0 : 0.0);
        e.value += t0;
        e.d1 += t1;
        e.d2 += t2;
        e.terms = j;
        if (j >= kMinTerms &&
            std::abs(t0) < kTrunc * std::abs(e.value) &&
            std::abs(t1) < kTrunc * std::max(std::abs(e.d1), 1e-300) &&
            std::abs(t2) < kTrunc * std::max(std::abs(e.d2), 1e-300))
            break;
        if (j > 100000) break;
    }
    return e;
}

Theta1Eval theta1_dq(double z, double q) {
    check_nome(q);
    if (!(z > 0.0) || z >= M_PI)
        throw std::domain_error("theta1 phase must satisfy 0 < z < pi");
    Theta1Eval e;
    if (q == 0.0) return e;  // leading q^{1/4} prefactor vanishes
    if (q > 0.35) {
        ScopedPrecision guard(theta_bits_for(std::log(q)));
        const BigFloat Q(q), zz(z);
        const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(
            BigFloat::default_precision() * 3.32) + 8);
        BigFloat v(0), d1(0);
        int sgn = 1;
        for (int k = 0;; ++k, sgn = -sgn) {
            const BigFloat ex =
                (BigFloat(k) + BigFloat(1) / 2) * (BigFloat(k) + BigFloat(1) / 2);
            const BigFloat s = sin((2 * k + 1) * zz);
            const BigFloat t0 = 2 * sgn * pow(Q, ex) * s;
            const BigFloat t1 = 2 * sgn * ex * pow(Q, ex - 1) * s;
            v += t0;
            d1 += t1;
            e.terms = k + 1;
            if (k + 1 >= kMinTerms && abs(t0) < eps * abs(v) && abs(t1) < eps * abs(d1))
                break;
            if (k > 2000000) break;
        }
        e.value = static_cast<double>(v);
        e.d1 = static_cast<double>(d1);
        return e;
    }
    double sgn = 1.0;
    for (int k = 0;; ++k, sgn = -sgn) {
        const double ex = (k + 0.5) * (k + 0.5);  // k(k+1) + 1/4
        const double s = std::sin((2 * k + 1) * z);
        const double t0 = 2.0 * sgn * std::pow(q, ex) * s;
        const double t1 = 2.0 * sgn * ex * std::pow(q, ex - 1) * s;
        e.value += t0;
        e.d1 += t1;
        e.terms = k + 1;
        if (k + 1 >= kMinTerms &&
            std::abs(t0) < kTrunc * std::max(std::abs(e.value), 1e-300) &&
            std::abs(t1) < kTrunc * std::max(std::abs(e.d1), 1e-300))
            break;
        if (k > 100000) break;
    }
    return e;
}

namespace {

// sum 2 (-1)^j coef(j^2) q^{j^2}, in extended precision past q ~ 0.35
double alternating_theta_sum(double q, double weight_power) {
    const auto coef = [weight_power](double jj) {
        return weight_power == 2 ? -4.0 * jj : 16.0 * jj * jj;
    };
    if (q > 0.35) {
        ScopedPrecision guard(theta_bits_for(std::log(q)));
        const BigFloat Q(q);
        const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(
            BigFloat::default_precision() * 3.32) + 8);
        BigFloat s(0);
        int sgn = -1;
        for (int j = 1;; ++j, sgn = -sgn) {
            const double jj = double(j) * j;
            const BigFloat t = 2 * sgn * BigFloat(coef(jj)) * pow(Q, BigFloat(jj));
            s += t;
            if (j >= kMinTerms && abs(t) < eps * abs(s)) break;
            if (j > 2000000) break;
        }
        return static_cast<double>(s);
    }
    double s = 0.0, sgn = -1.0;
    for (int j = 1;; ++j, sgn = -sgn) {
        const double jj = double(j) * j;
        const double t = 2.0 * sgn * coef(jj) * std::pow(q, jj);
        s += t;
        if (j >= kMinTerms && std::abs(t) < kTrunc * std::max(std::abs(s), 1e-300)) break;
        if (j > 100000) break;
    }
    return s;
}

}  // namespace

double theta4_z2(double q) {
    check_nome(q);
    return alternating_theta_sum(q, 2);
}

double theta4_z4(double q) {
    check_nome(q);
    return alternating_theta_sum(q, 4);
}

double theta1_log_deriv_lattice(double z, double q) {
    check_nome(q);
    double s = 0.0;
    for (int j = 1;; ++j) {
        const double q2j = std::pow(q, 2.0 * j);
        if (q2j == 0.0) break;
        const double t = 16.0 * q2j * std::cos(2.0 * z * j) / ((1 - q2j) * (1 - q2j)) +
                         8.0 * j * q2j / (1 - q2j);
        s += t;
        if (j >= kMinTerms && std::abs(t) < kTrunc * std::max(std::abs(s), 1e-300)) break;
        if (j > 20000000) break;
    }
    return s;
}

BigFloat theta1_log_deriv_lattice_mp(const BigFloat& z, const BigFloat& q) {
    const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(
        BigFloat::default_precision() * 3.32) + 8);
    BigFloat s(0);
    for (long j = 1;; ++j) {
        const BigFloat q2j = pow(q, 2 * j);
        if (q2j == 0) break;
        const BigFloat t = 16 * q2j * cos(2 * z * j) / ((1 - q2j) * (1 - q2j)) +
                           8 * j * q2j / (1 - q2j);
        s += t;
        if (j >= kMinTerms && abs(t) < eps * abs(s)) break;
        if (j > 50000000) throw std::runtime_error("theta1 lattice sum stalled");
    }
    return s;
}

BigFloat theta4_ratio_mp(double log_q) {
    ScopedPrecision guard(theta_bits_for(log_q));
    const BigFloat q = exp(BigFloat(log_q));
    const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(
        BigFloat::default_precision() * 3.32) + 8);
    BigFloat d1(0), d2(0);
    int sgn = -1;
    for (long j = 1;; ++j, sgn = -sgn) {
        const BigFloat ex = BigFloat(j) * j;
        const BigFloat t1 = 2 * sgn * ex * pow(q, ex - 1);
        const BigFloat t2 = 2 * sgn * ex * (ex - 1) * pow(q, ex - 2);
        d1 += t1;
        d2 += t2;
        if (j >= kMinTerms && abs(t1) < eps * abs(d1) && abs(t2) < eps * (abs(d2) + abs(d1)))
            break;
        if (j > 2000000) throw std::runtime_error("theta4 series stalled");
    }
    return d2 / d1;
}

Theta1RatioMP theta1_ratio_mp(double z, double log_q) {
    ScopedPrecision guard(theta_bits_for(log_q));
    const BigFloat q = exp(BigFloat(log_q));
    const BigFloat zz(z);
    const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(
        BigFloat::default_precision() * 3.32) + 8);
    BigFloat v(0), d1(0);
    int sgn = 1;
    for (long k = 0;; ++k, sgn = -sgn) {
        const BigFloat ex = (BigFloat(k) + BigFloat(1) / 2) * (BigFloat(k) + BigFloat(1) / 2);
        const BigFloat s = sin((2 * k + 1) * zz);
        const BigFloat t0 = 2 * sgn * pow(q, ex) * s;
        const BigFloat t1 = 2 * sgn * ex * pow(q, ex - 1) * s;
        v += t0;
        d1 += t1;
        if (k + 1 >= kMinTerms && abs(t0) < eps * abs(v) && abs(t1) < eps * abs(d1)) break;
        if (k > 2000000) throw std::runtime_error("theta1 series stalled");
    }
    return {q * d1 / v};
}

namespace {

Regime classify(const ModelParams& p, long t, double frac) {
    const long tc = p.n - p.k - 1;
    if (t < tc) return Regime::plateau;
    if (double(t) >= frac * double(p.n) * p.n) return Regime::asymptotic;
    return Regime::transition;
}

}  // namespace

RateValue rate_transition_k2(const ModelParams& p, long t) {
    if (p.k != 2) throw std::invalid_argument("rate_transition_k2 needs k = 2");
    const long tc = p.n - p.k - 1;
    if (t < tc) throw std::invalid_argument("rate_transition_k2 needs t >= t_c");
    const double a2 = 2.0 * p.alpha_f();
    const double log_c = std::log(std::cos(M_PI / p.n));
    const double log_q = (2.0 * t - p.n + 4) * log_c;
    RateValue rv;
    rv.regime = classify(p, t, 0.1);
    // theta'_4 is dominated by its -2 leading term once q is tiny; switch to
    // the equivalent long-time closed form before q^2 drowns in underflow.
    if (2.0 * log_q < -600.0) {
        rv.value = asymptote_k2(p, t, AsymRegime::long_time).value;
        return rv;
    }
    BigFloat ratio;
    if (log_q < -1.0) {
        // far from q=1 the double series is exact to ~1e-16
        const double q = std::exp(log_q);
        const Theta4Eval e = theta4_dq(q);
        ratio = BigFloat(e.d2 / e.d1);
    } else {
        ratio = theta4_ratio_mp(log_q);
    }
    const double pref = -a2 * a2 * (M_PI / p.n) * (M_PI / p.n) *
                        std::exp((2.0 * t - p.n + 6) * log_c);
    rv.value = pref * static_cast<double>(ratio);
    return rv;
}

RateValue rate_transition_half(const ModelParams& p, long t) {
    if (p.k != p.n / 2) throw std::invalid_argument("rate_transition_half needs k = n/2");
    const long tc = p.n - p.k - 1;
    if (t < tc) throw std::invalid_argument("rate_transition_half needs t >= t_c");
    const double a2 = 2.0 * p.alpha_f();
    const double log_c = std::log(std::cos(M_PI / p.n));
    const double x0 = 8.0 * t - 2.0 * p.n + 4;
    const double log_q = x0 * log_c;
    RateValue rv;
    rv.regime = classify(p, t, 0.05);
    if (2.0 * log_q < -600.0) {
        rv.value = asymptote_half(p, t, AsymRegime::long_time).value;
        return rv;
    }
    const double pref = a2 * a2 * (M_PI / p.n) * (M_PI / p.n);
    if (log_q < -0.02) {
        rv.value = pref * theta1_log_deriv_lattice(M_PI / p.n, std::exp(log_q));
    } else {
        ScopedPrecision guard(256);
        const BigFloat q = exp(BigFloat(log_q));
        const BigFloat s = theta1_log_deriv_lattice_mp(BigFloat(M_PI) / p.n, q);
        rv.value = pref * static_cast<double>(s);
    }
    return rv;
}

AsymptoteValue asymptote_k2(const ModelParams& p, long t, AsymRegime regime) {
    const double a2 = 2.0 * p.alpha_f();
    AsymptoteValue v;
    if (regime == AsymRegime::short_time) {
        const double r = double(p.n) / double(t);
        v.value = a2 * a2 * 0.25 * r * r;
        v.exp_form = v.value;
    } else {
        const double pref = 12.0 * a2 * a2 * (M_PI / p.n) * (M_PI / p.n);
        v.value = pref * std::exp(6.0 * t * std::log(std::cos(M_PI / p.n)));
        v.exp_form = pref * std::exp(-3.0 * M_PI * M_PI * t / (double(p.n) * p.n));
    }
    return v;
}

AsymptoteValue asymptote_half(const ModelParams& p, long t, AsymRegime regime) {
    const double a2 = 2.0 * p.alpha_f();
    AsymptoteValue v;
    if (regime == AsymRegime::short_time) {
        const double r = double(p.n) / double(t);
        v.value = a2 * a2 * (1.0 / 24.0 + 1.0 / (8.0 * M_PI * M_PI)) * r * r;
        v.exp_form = v.value;
    } else {
        const double pref = 24.0 * a2 * a2 * (M_PI / p.n) * (M_PI / p.n);
        v.value = pref * std::exp(16.0 * t * std::log(std::cos(M_PI / p.n)));
        v.exp_form = pref * std::exp(-8.0 * M_PI * M_PI * t / (double(p.n) * p.n));
    }
    return v;
}

}  // namespace phantom
