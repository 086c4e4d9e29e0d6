#pragma once

#include <optional>
#include <vector>

#include "phantom/bigfloat.hpp"
#include "phantom/params.hpp"

namespace phantom {

// Closed-form eigen pair of the interior Toeplitz block and its lift to the
// full propagator. Right eigenvectors are localized at the left edge, left
// ones at the right edge; dividing by the exponentially small normalization
// N_j is what blows the expansion coefficients up.
template <class F>
struct EigenPairT {
    int j = 0;
    F phi{};              // pi j / n
    F lambda{};           // (2 alpha cos phi)^2
    std::vector<F> R_tilde, L_tilde;  // length n-2, unnormalized
    F N{};                // <R_tilde, L_tilde>, sign (-1)^{j+1}
    std::vector<F> R_A, L_A;          // length n, biorthonormal pair
};

using EigenPair = EigenPairT<double>;
using EigenPairMP = EigenPairT<BigFloat>;

EigenPair eigen_pair(const ModelParams& p, int j);
EigenPairMP eigen_pair_mp(const ModelParams& p, int j);

struct SteadyVectors {
    std::vector<double> R0;   // (1, I_inf, 1)
    std::vector<double> L0;   // (1/2, 0, .., 0, 1/2)
    std::vector<double> L0p;  // (1/2, 0, .., 0, -1/2)
};
SteadyVectors steady_state_vectors(const ModelParams& p);

// Expansion coefficient of mode j stored as sign + log magnitude; |c_j|
// reaches ~1e30 already at n=40 and overflows float64 near n ~ 150.
struct SignLog {
    int sign = 0;  // 0 flags a symmetry-forbidden exact zero
    double log10_abs = 0.0;
    std::optional<double> value;  // populated when representable
};

enum class CoeffMethod { exact_inner_product, closed_form_approx };

struct CoefficientSet {
    std::vector<SignLog> c;  // index j-1, j = 1..n/2-1
};

CoefficientSet coefficients(const ModelParams& p, CoeffMethod method);

// f_k(p) with compensated summation; `scale` is the largest term magnitude,
// the reference for exact-zero detection. Negative p switches to extended
// precision internally.
struct MagicSum {
    double value = 0.0;
    double scale = 0.0;
    bool zero(double rel_tol = 1e-13) const {
        return scale == 0.0 || std::abs(value) < rel_tol * scale;
    }
};
MagicSum magic_sum_f(int n, int k, long p);
BigFloat magic_sum_f_mp(int n, int k, long p);
// companion sum h_r(p), 2 f_k = h_{k+1} - h_{k-1}
MagicSum magic_sum_h(int n, int r, long p);

// Full j-sum with both resolvent pieces; a is the lambda_ph piece, b the
// steady-state one, value = a - b. The exact geometric-sum numerators are
// kept, so for t > t_K this reproduces the iteration to float accuracy.
struct DeltaDirect {
    double value = 0.0, a = 0.0, b = 0.0;
};
DeltaDirect spectral_delta_direct(const ModelParams& p, int t);

struct SeriesOptions {
    bool renormalize = true;   // start the f-sum at r_min = max(0, t_K - t + 1)
    bool exact_tail = true;    // include the geometric-sum completion
    double tol = 1e-16;
    int min_terms = 8;
    long r_cap = 1000000;
};

struct SeriesResult {
    double value = 0.0;
    long f_terms = 0, g_terms = 0;
};

// Magic-sum series for dI_k(t). With renormalize on, the kernel contribution
// is accounted for by the shifted starting index; with it off the series
// reproduces the divergent kernel-free behaviour at t <= t_K.
SeriesResult spectral_delta_series(const ModelParams& p, int t,
                                   SeriesOptions opt = {});

// (4 pi alpha / n)^{2t}: prefactor-free shape of the kernel-free divergence
double diverging_term_estimate(const ModelParams& p, int t);

}  // namespace phantom
