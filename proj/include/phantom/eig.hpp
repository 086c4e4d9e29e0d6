#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phantom/propagator.hpp"

namespace phantom {

// Dense real nonsymmetric eigenvalue solver: radix-2 balancing, Householder
// reduction to upper Hessenberg, Francis double-shift QR with deflation and
// exceptional shifts. Templated so the same code runs in float64 and in
// arbitrary-precision floats; eigenvalues of real matrices come out as real
// values or conjugate pairs.
template <class F>
struct EigComplex {
    F re{}, im{};
};

namespace eig_detail {

template <class F>
F fabs_(const F& x) {
    using std::abs;
    return abs(x);
}

template <class F>
F sqrt_(const F& x) {
    using std::sqrt;
    return sqrt(x);
}

}  // namespace eig_detail

template <class F>
void balance_matrix(Mat<F>& A) {
    using eig_detail::fabs_;
    const int n = A.rows;
    const F radix(2);
    bool done = false;
    int guard = 0;
    while (!done && guard++ < 100) {
        done = true;
        for (int i = 0; i < n; ++i) {
            F c(0), r(0);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += fabs_(A(j, i));
                r += fabs_(A(i, j));
            }
            if (c == 0 || r == 0) continue;
            F f(1);
            const F s = c + r;
            while (c < r / radix) {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while (c >= r * radix) {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r < F(95) / 100 * s && f != 1) {
                done = false;
                const F inv = 1 / f;
                for (int j = 0; j < n; ++j) A(i, j) *= inv;
                for (int j = 0; j < n; ++j) A(j, i) *= f;
            }
        }
    }
}

template <class F>
void hessenberg_reduce(Mat<F>& A) {
    using eig_detail::fabs_;
    using eig_detail::sqrt_;
    const int n = A.rows;
    std::vector<F> v(n);
    for (int k = 0; k < n - 2; ++k) {
        F scale(0);
        for (int i = k + 1; i < n; ++i) scale += fabs_(A(i, k));
        if (scale == 0) continue;
        F ssq(0);
        for (int i = k + 1; i < n; ++i) {
            v[i] = A(i, k) / scale;
            ssq += v[i] * v[i];
        }
        F a0 = v[k + 1];
        F norm = sqrt_(ssq);
        if (a0 > 0) norm = -norm;
        v[k + 1] = a0 - norm;
        const F beta_den = -norm * v[k + 1];
        if (beta_den == 0) continue;
        for (int j = 0; j < n; ++j) {  // left
            F s(0);
            for (int i = k + 1; i < n; ++i) s += v[i] * A(i, j);
            s /= beta_den;
            for (int i = k + 1; i < n; ++i) A(i, j) -= s * v[i];
        }
        for (int i = 0; i < n; ++i) {  // right
            F s(0);
            for (int j = k + 1; j < n; ++j) s += A(i, j) * v[j];
            s /= beta_den;
            for (int j = k + 1; j < n; ++j) A(i, j) -= s * v[j];
        }
        A(k + 1, k) = scale * norm;
        for (int i = k + 2; i < n; ++i) A(i, k) = F(0);
    }
}

template <class F>
std::pair<EigComplex<F>, EigComplex<F>> eig2x2(const F& a, const F& b, const F& c,
                                               const F& d) {
    using eig_detail::sqrt_;
    const F half = F(1) / 2;
    const F p = (a + d) * half;
    const F det = a * d - b * c;
    const F disc = p * p - det;
    EigComplex<F> l1, l2;
    if (disc >= 0) {
        const F r = sqrt_(disc);
        const F s = p >= 0 ? p + r : p - r;
        l1.re = s;
        l2.re = s == 0 ? F(0) : det / s;
    } else {
        l1.re = l2.re = p;
        l1.im = sqrt_(-disc);
        l2.im = -l1.im;
    }
    return {l1, l2};
}

// Eigenvalues of an upper Hessenberg matrix. max_sweep_factor * n bounds the
// total number of QR sweeps; exceeding it throws with a diagnostic.
template <class F>
std::vector<EigComplex<F>> hessenberg_eigenvalues(Mat<F> H, const F& eps,
                                                  int max_sweep_factor = 100) {
    using eig_detail::fabs_;
    using eig_detail::sqrt_;
    const int n = H.rows;
    std::vector<EigComplex<F>> out;
    out.reserve(n);

    F anorm(0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j < n; ++j) anorm += fabs_(H(i, j));
    if (anorm == 0) anorm = F(1);

    int hi = n - 1;
    long sweeps = 0;
    const long sweep_cap = static_cast<long>(max_sweep_factor) * n;
    int stalled = 0;
    F ex_shift(0);

    while (hi >= 0) {
        // deflation scan for the active block [lo, hi]
        int lo = hi;
        while (lo > 0) {
            F s = fabs_(H(lo - 1, lo - 1)) + fabs_(H(lo, lo));
            if (s == 0) s = anorm;
            if (fabs_(H(lo, lo - 1)) <= eps * s) {
                H(lo, lo - 1) = F(0);
                break;
            }
            --lo;
        }
        if (lo == hi) {
            out.push_back({H(hi, hi) + ex_shift, F(0)});
            --hi;
            stalled = 0;
            continue;
        }
        if (lo == hi - 1) {
            auto [l1, l2] =
                eig2x2(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
            l1.re += ex_shift;
            l2.re += ex_shift;
            out.push_back(l1);
            out.push_back(l2);
            hi -= 2;
            stalled = 0;
            continue;
        }

        if (++sweeps > sweep_cap)
            throw std::runtime_error(
                "hessenberg_eigenvalues: QR did not converge after " +
                std::to_string(sweep_cap) + " sweeps (block size " +
                std::to_string(hi - lo + 1) + ")");

        // trailing-2x2 double shift; exceptional shift breaks limit cycles.
        // The exceptional shift moves the whole not-yet-deflated diagonal and
        // accumulates, to be added back at extraction.
        F tr = H(hi - 1, hi - 1) + H(hi, hi);
        F det = H(hi - 1, hi - 1) * H(hi, hi) - H(hi - 1, hi) * H(hi, hi - 1);
        if (++stalled % 11 == 0) {
            const F w = fabs_(H(hi, hi - 1)) + fabs_(H(hi - 1, hi - 2));
            const F s = H(hi, hi);
            ex_shift += s;
            for (int i = 0; i <= hi; ++i) H(i, i) -= s;
            tr = F(3) / 2 * w;
            det = w * w;
        }

        for (int k = lo; k <= hi - 1; ++k) {
            const bool has_z = (k + 2 <= hi);
            F x, y, z;
            if (k == lo) {
                x = H(lo, lo) * H(lo, lo) + H(lo, lo + 1) * H(lo + 1, lo) -
                    tr * H(lo, lo) + det;
                y = H(lo + 1, lo) * (H(lo, lo) + H(lo + 1, lo + 1) - tr);
                z = has_z ? H(lo + 1, lo) * H(lo + 2, lo + 1) : F(0);
            } else {
                x = H(k, k - 1);
                y = H(k + 1, k - 1);
                z = has_z ? H(k + 2, k - 1) : F(0);
            }
            F scale = fabs_(x) + fabs_(y) + fabs_(z);
            if (scale == 0) continue;
            x /= scale;
            y /= scale;
            z /= scale;
            F norm = sqrt_(x * x + y * y + z * z);
            if (x > 0) norm = -norm;
            const F v0 = x - norm;
            const F beta_den = -norm * v0;
            if (beta_den == 0) continue;
            // left: rows k..k+2 over columns max(lo, k-1)..hi
            for (int j = std::max(lo, k - 1); j <= hi; ++j) {
                F sum = v0 * H(k, j) + y * H(k + 1, j);
                if (has_z) sum += z * H(k + 2, j);
                sum /= beta_den;
                H(k, j) -= sum * v0;
                H(k + 1, j) -= sum * y;
                if (has_z) H(k + 2, j) -= sum * z;
            }
            // right: columns k..k+2 over rows lo..min(k+3, hi)
            const int rlim = std::min(k + 3, hi);
            for (int i = lo; i <= rlim; ++i) {
                F sum = v0 * H(i, k) + y * H(i, k + 1);
                if (has_z) sum += z * H(i, k + 2);
                sum /= beta_den;
                H(i, k) -= sum * v0;
                H(i, k + 1) -= sum * y;
                if (has_z) H(i, k + 2) -= sum * z;
            }
            if (k > lo) {
                // the reflector annihilated the bulge in column k-1
                H(k + 1, k - 1) = F(0);
                if (has_z) H(k + 2, k - 1) = F(0);
            }
        }
    }
    return out;
}

template <class F>
std::vector<EigComplex<F>> dense_eigenvalues(Mat<F> A, const F& eps,
                                             int max_sweep_factor = 100) {
    if (A.rows != A.cols) throw std::invalid_argument("dense_eigenvalues: square only");
    balance_matrix(A);
    hessenberg_reduce(A);
    return hessenberg_eigenvalues(std::move(A), eps, max_sweep_factor);
}

}  // namespace phantom
