#pragma once

#include <cstddef>
#include <vector>

#include "phantom/bigfloat.hpp"
#include "phantom/params.hpp"
#include "phantom/rational.hpp"

namespace phantom {

// Dense row-major matrix over an exact or floating scalar.
template <class S>
struct Mat {
    int rows = 0, cols = 0;
    std::vector<S> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, S(0)) {}
    S& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const S& operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * cols + j];
    }
};

template <class S>
S scalar_from_rat(const Rat& q);
template <>
inline Rat scalar_from_rat<Rat>(const Rat& q) { return q; }
template <>
inline double scalar_from_rat<double>(const Rat& q) { return static_cast<double>(q); }
template <>
inline BigFloat scalar_from_rat<BigFloat>(const Rat& q) { return to_bigfloat(q); }

// The n x n purity propagator: pinned first/last rows, Toeplitz interior
// block T with superdiagonal alpha and subdiagonal p filled with alpha^{p+2},
// first column alpha^2..alpha^{n-1}, last column (0,..,0,alpha).
template <class S>
Mat<S> build_propagator(const ModelParams& p);

// Interior (n-2) x (n-2) Toeplitz block alone.
template <class S>
Mat<S> build_toeplitz(const ModelParams& p);

// I_infinity with the pinned-boundary convention.
template <class S>
std::vector<S> steady_state(const ModelParams& p);

// y = A x, OpenMP over rows; the serial variant is the reference kept for
// tests and benchmarks and must produce bit-identical results.
void matvec(const Mat<double>& A, const std::vector<double>& x,
            std::vector<double>& y);
void matvec_serial(const Mat<double>& A, const std::vector<double>& x,
                   std::vector<double>& y);

template <class S>
struct Trajectory {
    std::vector<std::vector<S>> steps;  // steps[t] = I(t), t = 0..t_max
};

// Exact (Rat) or float64 iteration of I(t+1) = A I(t) from the product state.
// Rational mode enforces a size budget on the entries and is the oracle for
// every floating-point path.
template <class S>
Trajectory<S> iterate_trajectory(const ModelParams& p, int t_max,
                                 std::size_t rat_bit_limit = std::size_t(1) << 22);

template <class S>
std::vector<S> delta_purity(const Trajectory<S>& traj, const ModelParams& p);

struct RateEntry {
    double value = 0.0;
    bool defined = false;
};

// One-step ratio lambda_eff(t) = dI(t+1)/dI(t); non-positive or underflowed
// inputs are flagged undefined rather than reported as zero.
std::vector<RateEntry> effective_rate(const std::vector<double>& delta_seq);

// Effective rates from a rescaled delta-vector iteration. Iterating the
// deviation delta(t) = I(t) - I_inf directly (with per-step sup-norm
// renormalisation) avoids both the catastrophic cancellation of forming
// I - I_inf at late times and float underflow, so the rates stay accurate
// out to t ~ n^2 and beyond.
std::vector<RateEntry> rate_trajectory(const ModelParams& p, int t_max);

}  // namespace phantom
