#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "phantom/params.hpp"

namespace phantom {

// Kernel-breakdown experiment: spectra of T + eps*E in configurable
// precision. eps is carried as a decimal exponent (eps = 10^-x) so sweeps
// down to 1e-60 and beyond stay exactly representable in the config.
struct PerturbationConfig {
    ModelParams params;
    std::vector<double> eps_exponents;  // sorted, positive: eps = 10^{-x}
    std::uint64_t seed = 1;
    int realizations = 1;
    unsigned precision_bits = 256;
    double real_threshold = 1e-6;  // relative imaginary-part cutoff
};

struct SpectrumSnapshot {
    double eps_exponent = 0.0;
    int realization = 0;
    std::vector<std::complex<double>> eigenvalues;  // n-2, sorted
    int real_count = 0;
};

// (n-2)x(n-2) standard normals, row-major; counter-based and reproducible
// entry by entry from (seed, realization) alone.
std::vector<double> sample_perturbation(int n, std::uint64_t seed, int realization);

SpectrumSnapshot perturbed_spectrum(const PerturbationConfig& cfg,
                                    double eps_exponent, int realization);

// Continuous theory curve for the number of surviving real eigenvalues,
// (n/pi) * arccos(eps^{1/(n-2)} / (2 alpha)); 0 once the argument exceeds 1.
double theory_real_count(const ModelParams& p, double eps_exponent);

struct SweepSummaryRow {
    double eps_exponent = 0.0;
    int realization = 0;
    int real_count = 0;
    double theory_count = 0.0;
};

struct SweepResult {
    std::vector<SpectrumSnapshot> snapshots;  // eps-major order
    std::vector<SweepSummaryRow> summary;
};

// All (eps, realization) jobs are independent; they run in parallel with
// per-job derived randomness and merge in deterministic order.
SweepResult sweep(const PerturbationConfig& cfg);

}  // namespace phantom
