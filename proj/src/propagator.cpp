#include "phantom/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace phantom {

namespace {

// alpha^e for the scalar in play, computed from the exact alpha
template <class S>
S alpha_pow(const ModelParams& p, int e) {
    Rat r(1);
    for (int i = 0; i < e; ++i) r *= p.alpha;
    return scalar_from_rat<S>(r);
}

}  // namespace

template <class S>
Mat<S> build_toeplitz(const ModelParams& p) {
    const int m = p.n - 2;
    Mat<S> T(m, m);
    // cache powers alpha^0..alpha^{n-1}
    std::vector<S> pw(p.n);
    for (int e = 0; e < p.n; ++e) pw[e] = alpha_pow<S>(p, e);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j)
            if (j <= i + 1) T(i - 1, j - 1) = pw[i - j + 2];
    return T;
}

template <class S>
Mat<S> build_propagator(const ModelParams& p) {
    const int n = p.n;
    Mat<S> A(n, n);
    std::vector<S> pw(n);
    for (int e = 0; e < n; ++e) pw[e] = alpha_pow<S>(p, e);
    A(0, 0) = S(1);
    A(n - 1, n - 1) = S(1);
    for (int i = 2; i <= n - 1; ++i) {
        const int it = i - 1;  // row of the interior block, 1-based
        A(i - 1, 0) = pw[it + 1];                    // a1
        if (it == n - 2) A(i - 1, n - 1) = pw[1];    // a2
        for (int jt = 1; jt <= n - 2; ++jt)
            if (jt <= it + 1) A(i - 1, jt) = pw[it - jt + 2];
    }
    return A;
}

template <class S>
std::vector<S> steady_state(const ModelParams& p) {
    std::vector<S> v(p.n, S(1));
    const BigInt dn = boost::multiprecision::pow(BigInt(p.d), static_cast<unsigned>(p.n));
    for (int kp = 2; kp <= p.n - 1; ++kp) {
        const BigInt num = boost::multiprecision::pow(BigInt(p.d), static_cast<unsigned>(kp)) +
                           boost::multiprecision::pow(BigInt(p.d), static_cast<unsigned>(p.n - kp));
        v[kp - 1] = scalar_from_rat<S>(Rat(num, 1 + dn));
    }
    return v;
}

void matvec_serial(const Mat<double>& A, const std::vector<double>& x,
                   std::vector<double>& y) {
    const int n = A.rows;
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = &A.a[static_cast<std::size_t>(i) * A.cols];
        for (int j = 0; j < A.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec(const Mat<double>& A, const std::vector<double>& x,
            std::vector<double>& y) {
    const int n = A.rows;
    y.assign(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = &A.a[static_cast<std::size_t>(i) * A.cols];
        for (int j = 0; j < A.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

namespace {

void matvec_rat(const Mat<Rat>& A, const std::vector<Rat>& x, std::vector<Rat>& y,
                std::size_t bit_limit) {
    const int n = A.rows;
    y.assign(n, Rat(0));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        Rat acc(0);
        for (int j = 0; j < A.cols; ++j) {
            const Rat& aij = A(i, j);
            if (aij != 0) acc += aij * x[j];
        }
        y[i] = acc;
    }
    for (int i = 0; i < n; ++i) check_rat_budget(y[i], bit_limit, "iterate_trajectory");
}

}  // namespace

template <class S>
Trajectory<S> iterate_trajectory(const ModelParams& p, int t_max,
                                 std::size_t rat_bit_limit) {
    if (t_max < 0) throw std::invalid_argument("t_max must be >= 0");
    Trajectory<S> traj;
    traj.steps.reserve(t_max + 1);
    std::vector<S> cur(p.n, S(1));
    traj.steps.push_back(cur);
    const Mat<S> A = build_propagator<S>(p);
    std::vector<S> next(p.n);
    for (int t = 1; t <= t_max; ++t) {
        if constexpr (std::is_same_v<S, Rat>) {
            matvec_rat(A, cur, next, rat_bit_limit);
        } else if constexpr (std::is_same_v<S, double>) {
            matvec(A, cur, next);
        } else {
            for (int i = 0; i < p.n; ++i) {
                S acc(0);
                for (int j = 0; j < p.n; ++j) acc += A(i, j) * cur[j];
                next[i] = acc;
            }
        }
        cur = next;
        traj.steps.push_back(cur);
    }
    return traj;
}

template <class S>
std::vector<S> delta_purity(const Trajectory<S>& traj, const ModelParams& p) {
    const std::vector<S> inf = steady_state<S>(p);
    std::vector<S> out;
    out.reserve(traj.steps.size());
    for (const auto& step : traj.steps) out.push_back(step[p.k - 1] - inf[p.k - 1]);
    return out;
}

std::vector<RateEntry> effective_rate(const std::vector<double>& delta_seq) {
    std::vector<RateEntry> out;
    if (delta_seq.size() < 2) return out;
    out.reserve(delta_seq.size() - 1);
    for (std::size_t t = 0; t + 1 < delta_seq.size(); ++t) {
        RateEntry e;
        const double a = delta_seq[t], b = delta_seq[t + 1];
        if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)) {
            e.value = b / a;
            e.defined = std::isfinite(e.value) && e.value > 0.0;
        }
        out.push_back(e);
    }
    return out;
}

std::vector<RateEntry> rate_trajectory(const ModelParams& p, int t_max) {
    const Mat<double> A = build_propagator<double>(p);
    const std::vector<double> inf = steady_state<double>(p);
    std::vector<double> delta(p.n);
    for (int i = 0; i < p.n; ++i) delta[i] = 1.0 - inf[i];
    std::vector<RateEntry> rates;
    rates.reserve(t_max);
    std::vector<double> next(p.n);
    double prev = delta[p.k - 1];
    for (int t = 1; t <= t_max + 1; ++t) {
        matvec(A, delta, next);
        delta.swap(next);
        double mx = 0.0;
        for (double v : delta) mx = std::max(mx, std::abs(v));
        if (mx > 0.0 && mx < 1e-100) {
            const double s = 1.0 / mx;
            for (double& v : delta) v *= s;
            prev *= s;
        }
        const double cur = delta[p.k - 1];
        RateEntry e;
        if (prev > 0.0 && cur > 0.0) {
            e.value = cur / prev;
            e.defined = std::isfinite(e.value) && e.value > 0.0;
        }
        rates.push_back(e);  // rates[t-1] = lambda_eff(t-1)
        prev = cur;
    }
    rates.pop_back();
    return rates;
}

template Mat<Rat> build_toeplitz<Rat>(const ModelParams&);
template Mat<double> build_toeplitz<double>(const ModelParams&);
template Mat<BigFloat> build_toeplitz<BigFloat>(const ModelParams&);
template Mat<Rat> build_propagator<Rat>(const ModelParams&);
template Mat<double> build_propagator<double>(const ModelParams&);
template Mat<BigFloat> build_propagator<BigFloat>(const ModelParams&);
template std::vector<Rat> steady_state<Rat>(const ModelParams&);
template std::vector<double> steady_state<double>(const ModelParams&);
template std::vector<BigFloat> steady_state<BigFloat>(const ModelParams&);
template Trajectory<Rat> iterate_trajectory<Rat>(const ModelParams&, int, std::size_t);
template Trajectory<double> iterate_trajectory<double>(const ModelParams&, int, std::size_t);
template std::vector<Rat> delta_purity<Rat>(const Trajectory<Rat>&, const ModelParams&);
template std::vector<double> delta_purity<double>(const Trajectory<double>&, const ModelParams&);

}  // namespace phantom
