#include "phantom/haar.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "phantom/philox.hpp"

namespace phantom {

namespace {

constexpr std::uint64_t kGateTag = 0x67617465ULL;

std::size_t pow_int(int d, int n) {
    std::size_t r = 1;
    for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(d);
    return r;
}

double pairwise_sum(const double* x, std::size_t len) {
    if (len <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += x[i];
        return s;
    }
    const std::size_t h = len / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, len - h);
}

}  // namespace

CircuitState product_zero_state(int n, int d) {
    CircuitState s;
    s.n = n;
    s.d = d;
    s.amp.assign(pow_int(d, n), {0.0, 0.0});
    s.amp[0] = {1.0, 0.0};
    return s;
}

double state_norm(const CircuitState& s) {
    double acc = 0.0;
    for (const auto& a : s.amp) acc += std::norm(a);
    return std::sqrt(acc);
}

std::vector<std::complex<double>> sample_haar_gate(int d, const GateCoords& gc) {
    const int dim = d * d;
    Eigen::MatrixXcd G(dim, dim);
    std::uint64_t idx = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j, ++idx) {
            const auto blk = Philox4x64::block(
                {gc.layer, (gc.bond << 32) | idx, kGateTag, gc.realization},
                {gc.seed, gc.realization});
            double z0, z1;
            gaussian_pair(blk, z0, z1);
            G(i, j) = std::complex<double>(z0, z1);
        }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
    Eigen::MatrixXcd Q = qr.householderQ();
    const Eigen::MatrixXcd& R = qr.matrixQR();
    // phase fix: make the R diagonal real positive so U is exactly Haar
    for (int j = 0; j < dim; ++j) {
        const std::complex<double> r = R(j, j);
        const double m = std::abs(r);
        const std::complex<double> ph = m > 0 ? r / m : std::complex<double>(1.0, 0.0);
        Q.col(j) *= ph;
    }
    std::vector<std::complex<double>> U(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) U[static_cast<std::size_t>(i) * dim + j] = Q(i, j);
    return U;
}

namespace {

template <bool Parallel>
void apply_gate_impl(CircuitState& s, int bond,
                     const std::vector<std::complex<double>>& U) {
    const int n = s.n, d = s.d;
    if (bond < 1 || bond > n - 1) throw std::invalid_argument("bond out of range");
    const int dim = d * d;
    if (dim > 64) throw std::invalid_argument("gate kernel supports d <= 8");
    if (U.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("gate dimension mismatch");
    const std::size_t stride = pow_int(d, n - bond - 1);  // inner suffix block
    const std::size_t nprefix = pow_int(d, bond - 1);
    const std::size_t outer = nprefix * stride;

#pragma omp parallel for schedule(static) if (Parallel && outer >= 64)
    for (long o = 0; o < static_cast<long>(outer); ++o) {
        const std::size_t pre = static_cast<std::size_t>(o) / stride;
        const std::size_t suf = static_cast<std::size_t>(o) % stride;
        const std::size_t base = pre * (static_cast<std::size_t>(dim) * stride) + suf;
        std::complex<double> v[64];  // d <= 8 per the memory guard
        for (int ab = 0; ab < dim; ++ab) v[ab] = s.amp[base + ab * stride];
        for (int ab = 0; ab < dim; ++ab) {
            std::complex<double> acc(0.0, 0.0);
            const std::complex<double>* row = &U[static_cast<std::size_t>(ab) * dim];
            for (int cdx = 0; cdx < dim; ++cdx) acc += row[cdx] * v[cdx];
            s.amp[base + ab * stride] = acc;
        }
    }
}

}  // namespace

void apply_gate(CircuitState& s, int bond, const std::vector<std::complex<double>>& U) {
    apply_gate_impl<true>(s, bond, U);
}

void apply_gate_serial(CircuitState& s, int bond,
                       const std::vector<std::complex<double>>& U) {
    apply_gate_impl<false>(s, bond, U);
}

void apply_staircase_layer(CircuitState& s,
                           const std::vector<std::vector<std::complex<double>>>& gates) {
    if (gates.size() != static_cast<std::size_t>(s.n - 1))
        throw std::invalid_argument("apply_staircase_layer: need n-1 gates");
    for (int bond = 1; bond <= s.n - 1; ++bond) apply_gate(s, bond, gates[bond - 1]);
}

namespace {

template <bool Parallel>
double purity_impl(const CircuitState& s, int k) {
    const int n = s.n, d = s.d;
    if (k < 1 || k > n - 1) throw std::invalid_argument("cut index out of range");
    const bool use_rows = k <= n - k;
    const std::size_t rows = pow_int(d, k), cols = pow_int(d, n - k);
    // Gram matrix of the smaller side; purity = squared Frobenius norm.
    // Per-row partials merge with a pairwise sum so the result does not
    // depend on thread scheduling.
    const std::size_t m = use_rows ? rows : cols;
    std::vector<double> row_acc(m, 0.0);
#pragma omp parallel for schedule(dynamic) if (Parallel && m >= 8)
    for (long r = 0; r < static_cast<long>(m); ++r) {
        double acc = 0.0;
        for (std::size_t c = static_cast<std::size_t>(r); c < m; ++c) {
            std::complex<double> g(0.0, 0.0);
            if (use_rows) {
                const std::complex<double>* a = &s.amp[static_cast<std::size_t>(r) * cols];
                const std::complex<double>* b = &s.amp[c * cols];
                for (std::size_t j = 0; j < cols; ++j) g += a[j] * std::conj(b[j]);
            } else {
                for (std::size_t i = 0; i < rows; ++i)
                    g += s.amp[i * cols + static_cast<std::size_t>(r)] *
                         std::conj(s.amp[i * cols + c]);
            }
            const double w = std::norm(g);
            acc += (c == static_cast<std::size_t>(r)) ? w : 2.0 * w;
        }
        row_acc[r] = acc;
    }
    return pairwise_sum(row_acc.data(), row_acc.size());
}

}  // namespace

double purity_of_cut(const CircuitState& s, int k) { return purity_impl<true>(s, k); }
double purity_of_cut_serial(const CircuitState& s, int k) {
    return purity_impl<false>(s, k);
}

MCResult mc_average(int n, int d, int t_max, int realizations, std::uint64_t seed) {
    if (n < 2 || d < 2) throw std::invalid_argument("mc_average: need n >= 2, d >= 2");
    const double log2_dim = n * std::log2(static_cast<double>(d));
    if (log2_dim > 24.0)
        throw std::invalid_argument(
            "mc_average: statevector of 2^" + std::to_string(log2_dim) +
            " amplitudes (~" +
            std::to_string(static_cast<long long>(std::pow(2.0, log2_dim - 16))) +
            " MiB x 16) exceeds the desk-scale guard d^n <= 2^24");
    if (realizations < 100)
        throw std::invalid_argument("mc_average: need at least 100 realizations");
    if (t_max < 0) throw std::invalid_argument("mc_average: t_max must be >= 0");

    const int nk = n - 1;
    const std::size_t cells = static_cast<std::size_t>(nk) * (t_max + 1);
    std::vector<double> samples(cells * realizations);

#pragma omp parallel for schedule(dynamic)
    for (int rl = 0; rl < realizations; ++rl) {
        CircuitState st = product_zero_state(n, d);
        double* mine = &samples[static_cast<std::size_t>(rl) * cells];
        for (int k = 1; k <= nk; ++k) mine[static_cast<std::size_t>(k - 1) * (t_max + 1)] = 1.0;
        std::vector<std::vector<std::complex<double>>> gates(n - 1);
        for (int t = 1; t <= t_max; ++t) {
            for (int bond = 1; bond <= n - 1; ++bond)
                gates[bond - 1] = sample_haar_gate(
                    d, GateCoords{seed, static_cast<std::uint64_t>(rl),
                                  static_cast<std::uint64_t>(t),
                                  static_cast<std::uint64_t>(bond)});
            apply_staircase_layer(st, gates);
            for (int k = 1; k <= nk; ++k)
                mine[static_cast<std::size_t>(k - 1) * (t_max + 1) + t] =
                    purity_of_cut_serial(st, k);
        }
    }

    MCResult res;
    res.n = n;
    res.d = d;
    res.t_max = t_max;
    res.realizations = realizations;
    res.seed = seed;
    res.cells.resize(cells);
    std::vector<double> buf(realizations);
    for (int k = 1; k <= nk; ++k) {
        for (int t = 0; t <= t_max; ++t) {
            const std::size_t c = static_cast<std::size_t>(k - 1) * (t_max + 1) + t;
            for (int rl = 0; rl < realizations; ++rl)
                buf[rl] = samples[static_cast<std::size_t>(rl) * cells + c];
            const double mean = pairwise_sum(buf.data(), buf.size()) / realizations;
            std::vector<double> dev(realizations);
            for (int rl = 0; rl < realizations; ++rl)
                dev[rl] = (buf[rl] - mean) * (buf[rl] - mean);
            const double var =
                realizations > 1
                    ? pairwise_sum(dev.data(), dev.size()) / (realizations - 1)
                    : 0.0;
            res.cells[c] = {k, t, mean, std::sqrt(var / realizations)};
        }
    }
    return res;
}

}  // namespace phantom
