#include "phantom/pseudospectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phantom/bigfloat.hpp"
#include "phantom/eig.hpp"
#include "phantom/philox.hpp"
#include "phantom/propagator.hpp"

namespace phantom {

namespace {
constexpr std::uint64_t kPerturbTag = 0x70657274ULL;  // stream separation
}

std::vector<double> sample_perturbation(int n, std::uint64_t seed, int realization) {
    const int m = n - 2;
    std::vector<double> E(static_cast<std::size_t>(m) * m);
    for (std::size_t idx = 0; idx < E.size(); ++idx) {
        const auto blk = Philox4x64::block(
            {idx, kPerturbTag, 0, 0}, {seed, static_cast<std::uint64_t>(realization)});
        double z0, z1;
        gaussian_pair(blk, z0, z1);
        E[idx] = z0;
    }
    return E;
}

SpectrumSnapshot perturbed_spectrum(const PerturbationConfig& cfg, double eps_exponent,
                                    int realization) {
    const int n = cfg.params.n;
    const int m = n - 2;
    if (cfg.precision_bits < 53)
        throw std::invalid_argument("precision_bits must be >= 53");
    ScopedPrecision guard(cfg.precision_bits);

    Mat<BigFloat> T = build_toeplitz<BigFloat>(cfg.params);
    const BigFloat eps = pow(BigFloat(10), BigFloat(-eps_exponent));
    BigFloat norm_inf(0);
    for (int i = 0; i < m; ++i) {
        BigFloat row(0);
        for (int j = 0; j < m; ++j) row += abs(T(i, j));
        if (row > norm_inf) norm_inf = row;
    }
    if (eps > 0 && eps < ldexp(norm_inf, -static_cast<int>(cfg.precision_bits)))
        throw std::invalid_argument(
            "perturbed_spectrum: eps = 1e-" + std::to_string(eps_exponent) +
            " is below the resolution of " + std::to_string(cfg.precision_bits) +
            "-bit arithmetic for this matrix; raise precision_bits");

    const std::vector<double> E = sample_perturbation(n, cfg.seed, realization);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            T(i, j) += eps * E[static_cast<std::size_t>(i) * m + j];

    const BigFloat solver_eps = ldexp(BigFloat(1), 6 - static_cast<int>(cfg.precision_bits));
    const auto ev = dense_eigenvalues<BigFloat>(std::move(T), solver_eps, 100);

    SpectrumSnapshot snap;
    snap.eps_exponent = eps_exponent;
    snap.realization = realization;
    snap.eigenvalues.reserve(m);
    // classification scale: the larger of |lambda| and the Poiseux radius
    // eps^{2/(n-2)} of the exploded kernel cloud
    const double poiseux = std::pow(10.0, -2.0 * eps_exponent / (n - 2));
    for (const auto& e : ev) {
        const double re = static_cast<double>(e.re);
        const double im = static_cast<double>(e.im);
        snap.eigenvalues.emplace_back(re, im);
    }
    std::sort(snap.eigenvalues.begin(), snap.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
    snap.real_count = 0;
    for (const auto& z : snap.eigenvalues) {
        const double scale = std::max(std::abs(z), poiseux);
        if (std::abs(z.imag()) < cfg.real_threshold * scale) ++snap.real_count;
    }
    return snap;
}

double theory_real_count(const ModelParams& p, double eps_exponent) {
    // compare in log10 so the all-ejected boundary is decided exactly
    const double log_arg =
        -eps_exponent / (p.n - 2) - std::log10(2.0 * p.alpha_f());
    if (log_arg >= 0.0) return 0.0;
    return p.n / M_PI * std::acos(std::pow(10.0, log_arg));
}

SweepResult sweep(const PerturbationConfig& cfg) {
    const std::size_t ne = cfg.eps_exponents.size();
    const std::size_t jobs = ne * cfg.realizations;
    SweepResult res;
    res.snapshots.resize(jobs);
    std::vector<std::string> errors(jobs);
#pragma omp parallel for schedule(dynamic)
    for (long job = 0; job < static_cast<long>(jobs); ++job) {
        const std::size_t ie = static_cast<std::size_t>(job) / cfg.realizations;
        const int rl = static_cast<int>(job % cfg.realizations);
        try {
            res.snapshots[job] = perturbed_spectrum(cfg, cfg.eps_exponents[ie], rl);
        } catch (const std::exception& ex) {
            errors[job] = ex.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("sweep: " + e);
    res.summary.reserve(jobs);
    for (std::size_t job = 0; job < jobs; ++job) {
        const auto& s = res.snapshots[job];
        res.summary.push_back({s.eps_exponent, s.realization, s.real_count,
                               theory_real_count(cfg.params, s.eps_exponent)});
    }
    return res;
}

}  // namespace phantom
