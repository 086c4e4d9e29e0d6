#pragma once

#include <string>
#include <vector>

#include "phantom/params.hpp"
#include "phantom/propagator.hpp"
#include "phantom/rational.hpp"

namespace phantom {

// Generalized eigenvectors of the Jordan kernel, all in exact rational
// arithmetic. Vectors are 1-based in the math and 0-based in storage; each
// has n-2 components. r_hat/l_hat are the alpha=1 vectors, r/l the
// alpha-rescaled ones, b the lift scalars for the full propagator.
struct KernelBasis {
    int n = 0;
    Rat alpha;  // 0 until rescale_alpha
    std::vector<std::vector<Rat>> r_hat, l_hat;
    std::vector<std::vector<Rat>> r, l;
    std::vector<Rat> b;  // b[k], k = 1..n/2-1 (index 0 unused)

    int chain_length() const { return n / 2 - 1; }
};

// Closed form and recursion for the alpha=1 right vectors; the two must
// agree entrywise exactly.
std::vector<std::vector<Rat>> kernel_right_vectors(int n);
std::vector<std::vector<Rat>> kernel_right_vectors_recursive(int n);

// Downward recursion from l_hat_{n/2-1}; the two tail unknowns of each new
// vector come from an exact 2x2 solve (tail-sum constraint plus
// orthogonality against the one right vector whose support reaches the
// tail). Full biorthonormality holds exactly afterwards.
std::vector<std::vector<Rat>> kernel_left_vectors(int n);

KernelBasis make_kernel_basis(int n);               // r_hat/l_hat only
KernelBasis rescale_alpha(KernelBasis basis, const Rat& alpha);
KernelBasis lift_to_A(KernelBasis basis, const ModelParams& p);

// I_k^{ker}(t), exact. Zero for t > t_K and for t >= n/2-1.
Rat kernel_power_contribution(const KernelBasis& basis, int k_bip, int t);
Rat kernel_power_contribution(const ModelParams& p, int t);

struct CancellationReport {
    int k = 0, t = 0;
    double kernel = 0.0;         // I_k^{ker}(t)
    double spectral = 0.0;       // sum of the non-positive-power series terms
    double residual_rel = 0.0;   // |kernel + spectral| / max(|kernel|,|spectral|,term scale)
    bool pass = false;
    std::string kernel_exact;    // exact rational, for the record
    // consistency of iteration against the renormalized series
    double delta_iteration = 0.0;
    double delta_series = 0.0;
    double series_rel_err = 0.0;
};

// Checks the conjectured identity kernel(t) = -(series terms with p <= 0)
// and reports the iteration/series agreement alongside. Requires t <= t_K.
CancellationReport cancellation_check(const ModelParams& p, int t,
                                      double tol = 1e-10);

// Same sweep over all k in [2, n-1] and t in [0, t_K], sharing the exact
// machinery; used by the CLI and the acceptance suite.
std::vector<CancellationReport> cancellation_sweep(int n, int d,
                                                   double tol = 1e-10);

// Fully exact version of both sides (cyclotomic magic sums); practical for
// moderate n. Returns (kernel, spectral) as exact rationals.
std::pair<Rat, Rat> cancellation_exact(const ModelParams& p, int t);

}  // namespace phantom
