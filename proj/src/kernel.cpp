#include "phantom/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "phantom/cyclotomic.hpp"
#include "phantom/spectral.hpp"

namespace phantom {

namespace {

BigInt binom(int a, int b) {
    if (b < 0 || b > a || a < 0) return 0;
    BigInt r(1);
    for (int i = 0; i < b; ++i) {
        r *= a - i;
        r /= i + 1;
    }
    return r;
}

Rat rat_pow(const Rat& x, long e) {
    Rat base = x;
    bool neg = e < 0;
    if (neg) {
        if (x == 0) throw std::domain_error("rat_pow: 0^negative");
        base = 1 / x;
        e = -e;
    }
    Rat acc(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

void require_even(int n) {
    if (n < 6 || n % 2 != 0)
        throw std::invalid_argument("kernel basis needs even n >= 6");
}

}  // namespace

std::vector<std::vector<Rat>> kernel_right_vectors(int n) {
    require_even(n);
    const int m = n / 2 - 1;
    std::vector<std::vector<Rat>> out(m);
    for (int k = 1; k <= m; ++k) {
        std::vector<Rat> v(n - 2, Rat(0));
        for (int p = 0; p <= 2 * k - 1; ++p) {
            BigInt s(0);
            for (int r = 0; r <= p / 2; ++r) {
                const BigInt c = binom(k - r, p - 2 * r);
                s += (r % 2 == 0) ? c : -c;
            }
            const int sign = ((k + p) % 2 == 0) ? -1 : 1;  // -(-1)^{k+p}
            v[2 * k - p - 1] = Rat(sign * s);
        }
        out[k - 1] = std::move(v);
    }
    return out;
}

std::vector<std::vector<Rat>> kernel_right_vectors_recursive(int n) {
    require_even(n);
    const int m = n / 2 - 1;
    std::vector<std::vector<Rat>> out(m);
    std::vector<Rat> v(n - 2, Rat(0));
    v[0] = -1;
    v[1] = 1;
    out[0] = v;
    for (int k = 2; k <= m; ++k) {
        const std::vector<Rat>& prev = out[k - 2];
        std::vector<Rat> cur(n - 2, Rat(0));
        cur[0] = -1;
        cur[1] = prev[0] + 1;
        for (int j = 3; j <= n - 2; ++j) cur[j - 1] = prev[j - 2] - prev[j - 3];
        out[k - 1] = std::move(cur);
    }
    return out;
}

std::vector<std::vector<Rat>> kernel_left_vectors(int n) {
    require_even(n);
    const int m = n / 2 - 1;
    const auto rh = kernel_right_vectors(n);
    const std::vector<Rat>& r_tail = rh[m - 1];  // the only one reaching the tail
    std::vector<std::vector<Rat>> L(m);
    const int sgn = (n / 2) % 2 == 0 ? 1 : -1;
    std::vector<Rat> seed(n - 2, Rat(0));
    seed[n - 4] = Rat(-2 * sgn, n);
    seed[n - 3] = Rat(2 * sgn, n);
    L[m - 1] = seed;
    for (int k = m; k >= 2; --k) {
        const std::vector<Rat>& prev = L[k - 1];
        std::vector<Rat> cur(n - 2, Rat(0));
        for (int j = 1; j <= n - 4; ++j) cur[j - 1] = prev[j] - prev[j + 1];
        // tail system: a + b = [l_k]_{n-2} and <r_{n/2-1}, l_{k-1}> = 0
        Rat known(0);
        for (int j = 1; j <= n - 4; ++j) known += r_tail[j - 1] * cur[j - 1];
        const Rat c1 = r_tail[n - 4], c2 = r_tail[n - 3];
        const Rat det = c1 - c2;
        if (det == 0)
            throw std::runtime_error("kernel_left_vectors: singular tail system at n=" +
                                     std::to_string(n) + ", k=" + std::to_string(k - 1));
        const Rat S = prev[n - 3];
        const Rat a = (-known - c2 * S) / det;
        cur[n - 4] = a;
        cur[n - 3] = S - a;
        L[k - 2] = std::move(cur);
    }
    return L;
}

KernelBasis make_kernel_basis(int n) {
    KernelBasis b;
    b.n = n;
    b.r_hat = kernel_right_vectors(n);
    b.l_hat = kernel_left_vectors(n);
    return b;
}

KernelBasis rescale_alpha(KernelBasis basis, const Rat& alpha) {
    const int n = basis.n;
    const int m = basis.chain_length();
    basis.alpha = alpha;
    basis.r.assign(m, {});
    basis.l.assign(m, {});
    for (int k = 1; k <= m; ++k) {
        std::vector<Rat> rv(n - 2), lv(n - 2);
        for (int j = 1; j <= n - 2; ++j) {
            rv[j - 1] = basis.r_hat[k - 1][j - 1] * rat_pow(alpha, j - 2 * k);
            lv[j - 1] = basis.l_hat[k - 1][j - 1] * rat_pow(alpha, 2 * k - j);
        }
        basis.r[k - 1] = std::move(rv);
        basis.l[k - 1] = std::move(lv);
    }
    return basis;
}

KernelBasis lift_to_A(KernelBasis basis, const ModelParams& p) {
    if (basis.r.empty())
        basis = rescale_alpha(std::move(basis), p.alpha);
    const int m = basis.chain_length();
    basis.b.assign(m + 2, Rat(0));  // b[m+1] == b_{n/2} == 0
    for (int k = m; k >= 1; --k)
        basis.b[k] = basis.b[k + 1] - p.alpha * basis.l[k - 1][basis.n - 3];
    return basis;
}

Rat kernel_power_contribution(const KernelBasis& basis, int k_bip, int t) {
    if (t < 0) throw std::invalid_argument("kernel power needs t >= 0");
    const int m = basis.chain_length();
    if (basis.b.empty())
        throw std::logic_error("kernel basis must be lifted before use");
    Rat total(0);
    for (int q = 1; q <= m - t; ++q) {
        const Rat& rk = basis.r[q - 1][k_bip - 2];  // [r_q^A]_k = [r_q]_{k-1}
        if (rk == 0) continue;
        Rat lsum = basis.b[q + t];
        for (const Rat& x : basis.l[q + t - 1]) lsum += x;
        total += rk * lsum;
    }
    return total;
}

Rat kernel_power_contribution(const ModelParams& p, int t) {
    KernelBasis basis = lift_to_A(make_kernel_basis(p.n), p);
    return kernel_power_contribution(basis, p.k, t);
}

namespace {

CancellationReport check_cell(const ModelParams& p, int t, const KernelBasis& basis,
                              const std::vector<Rat>& delta_rat_t, double tol) {
    const int n = p.n, k = p.k;
    const int t_kernel = timescales(p).t_kernel;
    if (t > t_kernel)
        throw std::invalid_argument("cancellation_check needs t <= t_K");
    CancellationReport rep;
    rep.k = k;
    rep.t = t;
    const Rat kernel_rat = kernel_power_contribution(basis, k, t);
    rep.kernel_exact = kernel_rat.str();
    rep.kernel = static_cast<double>(kernel_rat);

    ScopedPrecision guard(256);
    const BigFloat alpha = to_bigfloat(p.alpha);
    const BigFloat lam_ph = to_bigfloat(lambda_ph_exact(p));
    BigFloat S(0), scale(0);
    for (int r = 0; r <= t_kernel - t; ++r) {
        const long pw = 2L * t + 2 * r + k - n + 1;  // <= 0 by construction
        const BigFloat f = magic_sum_f_mp(n, k, pw);
        const BigFloat term = 4 * alpha / n * pow(2 * alpha, pw) * f *
                              (pow(lam_ph, -(r + 1)) - 1);
        S += term;
        if (abs(term) > scale) scale = abs(term);
    }
    rep.spectral = static_cast<double>(S);
    const BigFloat K = to_bigfloat(kernel_rat);
    BigFloat denom = abs(K);
    if (abs(S) > denom) denom = abs(S);
    if (scale > denom) denom = scale;
    rep.residual_rel =
        denom == 0 ? 0.0 : static_cast<double>(abs(K + S) / denom);
    rep.pass = rep.residual_rel < tol;

    rep.delta_iteration = static_cast<double>(delta_rat_t[k - 1]);
    rep.delta_series = spectral_delta_series(p, t).value;
    const double dmax = std::max(std::abs(rep.delta_iteration), std::abs(rep.delta_series));
    rep.series_rel_err =
        dmax == 0 ? 0.0 : std::abs(rep.delta_iteration - rep.delta_series) / dmax;
    return rep;
}

}  // namespace

CancellationReport cancellation_check(const ModelParams& p, int t, double tol) {
    KernelBasis basis = lift_to_A(make_kernel_basis(p.n), p);
    Trajectory<Rat> traj = iterate_trajectory<Rat>(p, t);
    const std::vector<Rat> inf = steady_state<Rat>(p);
    std::vector<Rat> delta(p.n);
    for (int i = 0; i < p.n; ++i) delta[i] = traj.steps[t][i] - inf[i];
    return check_cell(p, t, basis, delta, tol);
}

std::vector<CancellationReport> cancellation_sweep(int n, int d, double tol) {
    ModelParams base = make_params(n, 2, d);
    KernelBasis basis = lift_to_A(make_kernel_basis(n), base);
    const int t_max = timescales(base).t_kernel;  // largest over k is k=2
    Trajectory<Rat> traj = iterate_trajectory<Rat>(base, t_max);
    const std::vector<Rat> inf = steady_state<Rat>(base);
    std::vector<std::vector<Rat>> deltas(t_max + 1, std::vector<Rat>(n));
    for (int t = 0; t <= t_max; ++t)
        for (int i = 0; i < n; ++i) deltas[t][i] = traj.steps[t][i] - inf[i];
    std::vector<CancellationReport> out;
    for (int k = 2; k <= n - 1; ++k) {
        ModelParams p = make_params(n, k, d);
        const int tk = timescales(p).t_kernel;
        for (int t = 0; t <= tk; ++t)
            out.push_back(check_cell(p, t, basis, deltas[t], tol));
    }
    return out;
}

std::pair<Rat, Rat> cancellation_exact(const ModelParams& p, int t) {
    const int n = p.n, k = p.k;
    const int t_kernel = timescales(p).t_kernel;
    if (t > t_kernel)
        throw std::invalid_argument("cancellation_exact needs t <= t_K");
    KernelBasis basis = lift_to_A(make_kernel_basis(n), p);
    const Rat kernel = kernel_power_contribution(basis, k, t);
    const Rat lam_ph = lambda_ph_exact(p);
    Rat S(0);
    for (int r = 0; r <= t_kernel - t; ++r) {
        const long pw = 2L * t + 2 * r + k - n + 1;
        const Rat f = magic_sum_f_exact(n, k, pw);
        S += Rat(4, n) * p.alpha * rat_pow(2 * p.alpha, pw) * f *
             (rat_pow(lam_ph, -(r + 1)) - 1);
    }
    return {kernel, S};
}

}  // namespace phantom
