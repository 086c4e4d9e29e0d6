#include "phantom/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "phantom/propagator.hpp"

namespace phantom {

namespace {

template <class F>
F pi_value();
template <>
double pi_value<double>() { return M_PI; }
template <>
BigFloat pi_value<BigFloat>() {
    return 4 * atan(BigFloat(1));
}

template <class F>
EigenPairT<F> eigen_pair_impl(const ModelParams& p, int j) {
    using std::cos;
    using std::pow;
    using std::sin;
    if (j < 1 || j > p.n / 2 - 1)
        throw std::invalid_argument("eigen mode index out of range");
    const int n = p.n;
    EigenPairT<F> e;
    e.j = j;
    const F pi = pi_value<F>();
    const F alpha = scalar_from_rat<F>(p.alpha);
    e.phi = pi * j / n;
    const F beta = 2 * alpha * cos(e.phi);  // 2 alpha cos(phi_j)
    e.lambda = beta * beta;
    e.R_tilde.resize(n - 2);
    e.L_tilde.resize(n - 2);
    const F sphi = sin(e.phi);
    for (int k = 1; k <= n - 2; ++k) {
        e.R_tilde[k - 1] = pow(beta, k - 2) * sin((k + 1) * e.phi) / sphi;
        e.L_tilde[k - 1] = pow(beta, n - 3 - k) * sin((n - k) * e.phi) / sphi;
    }
    const F sgn = (j % 2 == 0) ? F(-1) : F(1);
    e.N = sgn * pow(beta, n - 5) * (n * cos(e.phi)) / (2 * sphi * sphi);
    // lift to the propagator
    e.R_A.assign(n, F(0));
    e.L_A.assign(n, F(0));
    for (int k = 1; k <= n - 2; ++k) {
        e.R_A[k] = e.R_tilde[k - 1] / e.N;
        e.L_A[k] = e.L_tilde[k - 1];
    }
    F la1(0), la2(0);
    for (int k = 1; k <= n - 2; ++k)
        la1 += e.L_tilde[k - 1] * pow(alpha, k + 1);
    la2 = e.L_tilde[n - 3] * alpha;
    e.L_A[0] = la1 / (e.lambda - 1);
    e.L_A[n - 1] = la2 / (e.lambda - 1);
    return e;
}

}  // namespace

EigenPair eigen_pair(const ModelParams& p, int j) {
    return eigen_pair_impl<double>(p, j);
}

EigenPairMP eigen_pair_mp(const ModelParams& p, int j) {
    return eigen_pair_impl<BigFloat>(p, j);
}

SteadyVectors steady_state_vectors(const ModelParams& p) {
    SteadyVectors sv;
    sv.R0.assign(p.n, 1.0);
    for (int kp = 2; kp <= p.n - 1; ++kp) {
        const double dn = std::pow(double(p.d), p.n);
        sv.R0[kp - 1] =
            (std::pow(double(p.d), kp) + std::pow(double(p.d), p.n - kp)) / (1.0 + dn);
    }
    sv.L0.assign(p.n, 0.0);
    sv.L0p.assign(p.n, 0.0);
    sv.L0[0] = sv.L0[p.n - 1] = 0.5;
    sv.L0p[0] = 0.5;
    sv.L0p[p.n - 1] = -0.5;
    return sv;
}

namespace {

// f_k(p) is a pure function of (n, k, p) and sweeps re-request the same
// values across t; memoize per thread.
struct FKey {
    std::uint64_t v;
    bool operator==(const FKey& o) const { return v == o.v; }
};
struct FKeyHash {
    std::size_t operator()(const FKey& k) const {
        return std::hash<std::uint64_t>()(k.v * 0x9E3779B97F4A7C15ULL);
    }
};

}  // namespace

MagicSum magic_sum_f(int n, int k, long p) {
    thread_local std::unordered_map<FKey, MagicSum, FKeyHash> cache;
    const FKey key{(static_cast<std::uint64_t>(n) << 48) |
                   (static_cast<std::uint64_t>(k) << 32) |
                   static_cast<std::uint32_t>(p)};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    MagicSum result = [&] {
    MagicSum m;
    if (p >= 0) {
        double sum = 0.0, comp = 0.0, scale = 0.0;
        for (int j = 1; j <= n / 2 - 1; ++j) {
            const double phi = M_PI * j / n;
            const double term = (j % 2 == 0 ? 1.0 : -1.0) *
                                std::pow(std::cos(phi), (double)p) * std::sin(phi) *
                                std::sin(k * phi);
            scale = std::max(scale, std::abs(term));
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        m.value = -sum;
        m.scale = scale;
        // near the transition power the alternating sum cancels through many
        // digits (the difference of two nearby theta values); redo those and
        // all negative powers in extended precision
        if (scale == 0.0 || std::abs(m.value) >= 1e-8 * scale) return m;
    } else {
        m.scale = std::pow(std::sin(M_PI / n), static_cast<double>(p));
    }
    for (unsigned bits : {256u, 1024u}) {
        ScopedPrecision guard(bits);
        const BigFloat v = magic_sum_f_mp(n, k, p);
        m.value = static_cast<double>(v);
        if (std::abs(m.value) >= 1e-30 * m.scale) break;
    }
    return m;
    }();
    if (cache.size() > (1u << 22)) cache.clear();
    cache.emplace(key, result);
    return result;
}

BigFloat magic_sum_f_mp(int n, int k, long p) {
    using std::cos;
    using std::pow;
    using std::sin;
    const BigFloat pi = pi_value<BigFloat>();
    BigFloat sum(0);
    for (int j = 1; j <= n / 2 - 1; ++j) {
        const BigFloat phi = pi * j / n;
        const BigFloat term = (j % 2 == 0 ? BigFloat(1) : BigFloat(-1)) *
                              pow(cos(phi), p) * sin(phi) * sin(k * phi);
        sum += term;
    }
    return -sum;
}

MagicSum magic_sum_h(int n, int r, long p) {
    MagicSum m;
    if (p < 0) {
        ScopedPrecision guard(256);
        const BigFloat pi = pi_value<BigFloat>();
        BigFloat sum(0);
        for (int j = 1; j <= n / 2 - 1; ++j) {
            const BigFloat phi = pi * j / n;
            sum += (j % 2 == 0 ? BigFloat(1) : BigFloat(-1)) *
                   boost::multiprecision::pow(cos(phi), p) * cos(r * phi);
        }
        m.value = static_cast<double>(sum);
        m.scale = std::pow(std::sin(M_PI / n), static_cast<double>(p));
        return m;
    }
    double sum = 0.0, comp = 0.0, scale = 0.0;
    for (int j = 1; j <= n / 2 - 1; ++j) {
        const double phi = M_PI * j / n;
        const double term =
            (j % 2 == 0 ? 1.0 : -1.0) * std::pow(std::cos(phi), (double)p) * std::cos(r * phi);
        scale = std::max(scale, std::abs(term));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    m.value = sum;
    m.scale = scale;
    return m;
}

CoefficientSet coefficients(const ModelParams& p, CoeffMethod method) {
    ScopedPrecision guard(256);
    const int n = p.n, k = p.k;
    CoefficientSet cs;
    cs.c.resize(n / 2 - 1);
    const BigFloat lam_ph = to_bigfloat(lambda_ph_exact(p));
    for (int j = 1; j <= n / 2 - 1; ++j) {
        const EigenPairMP e = eigen_pair_mp(p, j);
        BigFloat c(0), scale(0);
        if (method == CoeffMethod::exact_inner_product) {
            // c_j = [R_A]_k * sum_p [L_A]_p with N from the direct pairing
            BigFloat Ndir(0);
            for (int m = 0; m < n - 2; ++m) Ndir += e.R_tilde[m] * e.L_tilde[m];
            BigFloat lsum(0), lscale(0);
            for (int m = 0; m < n; ++m) {
                lsum += e.L_A[m];
                lscale += abs(e.L_A[m]);
            }
            const BigFloat rk = e.R_tilde[k - 2] / Ndir;  // [R_A]_k, k>=2
            c = rk * lsum;
            scale = abs(e.R_tilde[k - 2] / Ndir) * lscale;
            const BigFloat sk = abs(sin(e.phi * k));
            // reference scale must not itself vanish at the symmetry zeros
            if (sk > 0 && sk < 1) scale /= sk;
        } else {
            const BigFloat bracket =
                1 / (lam_ph - e.lambda) - 1 / (1 - e.lambda);
            c = e.R_tilde[k - 2] / e.N * bracket;
            scale = abs(e.R_tilde[k - 2] / e.N * bracket);
            const BigFloat sk = abs(sin(e.phi * k));
            if (sk > 0 && sk < 1) scale /= sk;
        }
        SignLog sl;
        const BigFloat ac = abs(c);
        if (scale == 0 || ac < BigFloat(1e-13) * scale) {
            sl.sign = 0;
            sl.log10_abs = -std::numeric_limits<double>::infinity();
            sl.value = 0.0;
        } else {
            sl.sign = c > 0 ? 1 : -1;
            sl.log10_abs = static_cast<double>(log10(ac));
            if (sl.log10_abs < 307.0 && sl.log10_abs > -307.0)
                sl.value = static_cast<double>(c);
        }
        cs.c[j - 1] = sl;
    }
    return cs;
}

DeltaDirect spectral_delta_direct(const ModelParams& p, int t) {
    const int n = p.n, k = p.k;
    const double alpha = p.alpha_f();
    const double lam_ph = characteristic_rates(p).lambda_ph;
    const int e = 2 * t + k - n + 1;  // cosine power
    double a = 0.0, b = 0.0, ca = 0.0, cb = 0.0;
    for (int j = 1; j <= n / 2 - 1; ++j) {
        const double phi = M_PI * j / n;
        const double cphi = std::cos(phi);
        const double lam = 4 * alpha * alpha * cphi * cphi;
        // (2a)^{e+1} cos^e = 2a * exp(e * log(2a cos))
        const double base = std::exp(e * std::log(2 * alpha * cphi)) * 2 * alpha;
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        const double trig = std::sin(phi) * std::sin(k * phi);
        const double lam_half = std::exp((n / 2 - 1) * std::log(lam));
        const double ta = -(2.0 / n) * base * sgn * trig *
                          (1.0 - sgn * lam_ph * lam_half) / (lam_ph - lam);
        const double tb = -(2.0 / n) * base * sgn * trig *
                          (1.0 - sgn * lam_half) / (1.0 - lam);
        double y = ta - ca, s = a + y;
        ca = (s - a) - y;
        a = s;
        y = tb - cb;
        s = b + y;
        cb = (s - b) - y;
        b = s;
    }
    return {a - b, a, b};
}

SeriesResult spectral_delta_series(const ModelParams& p, int t, SeriesOptions opt) {
    const int n = p.n, k = p.k;
    const double alpha = p.alpha_f();
    const double log2a = std::log(2 * alpha);
    const double log_lamph = std::log(characteristic_rates(p).lambda_ph);
    const int t_kernel = timescales(p).t_kernel;
    SeriesResult res;
    double sum = 0.0;

    // main alternating-sum series, renormalized start cancels the kernel
    long r = opt.renormalize ? std::max(0, t_kernel - t + 1) : 0;
    long done = 0;
    for (;; ++r, ++done) {
        if (r > opt.r_cap)
            throw std::runtime_error("spectral_delta_series: f-sum did not converge");
        const long pw = 2L * t + 2 * r + k - n + 1;
        const MagicSum f = magic_sum_f(n, k, pw);
        const double w1 = std::exp(pw * log2a - (r + 1) * log_lamph);
        const double w2 = std::exp(pw * log2a);
        const double term = (4 * alpha / n) * f.value * (w1 - w2);
        sum += term;
        if (done >= opt.min_terms && term != 0.0 && sum != 0.0 &&
            std::abs(term) < opt.tol * std::abs(sum))
            break;
        if (w1 == 0.0) break;  // underflowed tail, w1 decreases monotonically
    }
    res.f_terms = done + 1;

    if (opt.exact_tail) {
        // geometric-sum completion: non-alternating sums at power p + n - 2
        double gsum = 0.0;
        long gr = 1, gdone = 0;
        for (;; ++gr, ++gdone) {
            if (gr > opt.r_cap)
                throw std::runtime_error("spectral_delta_series: tail did not converge");
            const long pw = 2L * t + 2 * gr + k - 1;  // p + n - 2
            double s = 0.0, comp = 0.0;
            for (int j = 1; j <= n / 2 - 1; ++j) {
                const double phi = M_PI * j / n;
                const double term = std::exp(pw * std::log(std::cos(phi))) *
                                    std::sin(phi) * std::sin(k * phi);
                const double y = term - comp, u = s + y;
                comp = (u - s) - y;
                s = u;
            }
            const double w1 = std::exp(pw * log2a - gr * log_lamph);
            const double w2 = std::exp(pw * log2a);
            const double term = (4 * alpha / n) * s * (w1 - w2);
            gsum += term;
            if (gdone >= opt.min_terms && term != 0.0 && gsum != 0.0 &&
                std::abs(term) < opt.tol * std::abs(gsum))
                break;
            if (w1 == 0.0) break;
        }
        res.g_terms = gdone + 1;
        sum += gsum;
    }
    res.value = sum;
    return res;
}

double diverging_term_estimate(const ModelParams& p, int t) {
    const double base = 4 * M_PI * p.alpha_f() / p.n;
    return std::pow(base, 2.0 * t);
}

}  // namespace phantom
