// Serial-vs-OpenMP comparison for the data-parallel kernels. The serial
// reference implementations are the same code paths the tests pin against;
// the parallel variants must match them bitwise.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "phantom/haar.hpp"
#include "phantom/propagator.hpp"
#include "phantom/pseudospectrum.hpp"

using namespace phantom;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void print_row(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx   max|diff| %.1e\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

void bench_matvec() {
    const int n = 2000, iters = 200;
    auto p = make_params(n, 25, 2);
    const auto A = build_propagator<double>(p);
    std::vector<double> x(n), y;
    for (int i = 0; i < n; ++i) x[i] = 1.0 / (i + 1);

    auto xs = x;
    auto t0 = Clock::now();
    for (int it = 0; it < iters; ++it) {
        matvec_serial(A, xs, y);
        xs.swap(y);
    }
    const double serial = ms_since(t0);

    auto xp = x;
    t0 = Clock::now();
    for (int it = 0; it < iters; ++it) {
        matvec(A, xp, y);
        xp.swap(y);
    }
    const double par = ms_since(t0);

    double diff = 0;
    for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(xs[i] - xp[i]));
    print_row("propagator matvec n=2000", serial, par, diff);
}

void bench_purity() {
    const int n = 12, d = 2;
    CircuitState st = product_zero_state(n, d);
    for (std::size_t i = 0; i < st.amp.size(); ++i)
        st.amp[i] = std::complex<double>(std::cos(0.37 * i), std::sin(1.1 * i));
    double nrm = state_norm(st);
    for (auto& a : st.amp) a /= nrm;

    auto t0 = Clock::now();
    double s1 = 0;
    for (int rep = 0; rep < 20; ++rep) s1 = purity_of_cut_serial(st, 6);
    const double serial = ms_since(t0);
    t0 = Clock::now();
    double s2 = 0;
    for (int rep = 0; rep < 20; ++rep) s2 = purity_of_cut(st, 6);
    const double par = ms_since(t0);
    print_row("purity gram n=12 k=6", serial, par, std::abs(s1 - s2));
}

void bench_montecarlo() {
    // realization-parallel sampling; the per-realization streams make the
    // thread count irrelevant to the result
    const int n = 8, d = 2, t_max = 5, reals = 400;
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    auto t0 = Clock::now();
    auto a = mc_average(n, d, t_max, reals, 7);
    const double serial = ms_since(t0);
    omp_set_num_threads(max_threads);
    t0 = Clock::now();
    auto b = mc_average(n, d, t_max, reals, 7);
    const double par = ms_since(t0);
    double diff = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        diff = std::max(diff, std::abs(a.cells[i].mean - b.cells[i].mean));
    print_row("monte carlo n=8 x400", serial, par, diff);
}

void bench_sweep() {
    PerturbationConfig cfg;
    cfg.params = make_params(20, 2, 5);
    cfg.seed = 3;
    cfg.precision_bits = 192;
    for (double x = 6; x <= 20; x += 2) cfg.eps_exponents.push_back(x);
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    auto t0 = Clock::now();
    auto a = sweep(cfg);
    const double serial = ms_since(t0);
    omp_set_num_threads(max_threads);
    t0 = Clock::now();
    auto b = sweep(cfg);
    const double par = ms_since(t0);
    double diff = 0;
    for (std::size_t i = 0; i < a.snapshots.size(); ++i)
        for (std::size_t j = 0; j < a.snapshots[i].eigenvalues.size(); ++j)
            diff = std::max(diff, std::abs(a.snapshots[i].eigenvalues[j] -
                                           b.snapshots[i].eigenvalues[j]));
    print_row("perturbation sweep n=20", serial, par, diff);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");
    bench_matvec();
    bench_purity();
    bench_montecarlo();
    bench_sweep();
    return 0;
}
