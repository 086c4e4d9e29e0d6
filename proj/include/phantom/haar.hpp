#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "phantom/params.hpp"

namespace phantom {

// Brute-force statevector oracle: staircase circuit of Haar-random two-qudit
// gates, exact reduced-density purities, Monte Carlo averaging.
struct CircuitState {
    int n = 0, d = 0;
    std::vector<std::complex<double>> amp;  // length d^n, qudit 1 most significant
};

CircuitState product_zero_state(int n, int d);
double state_norm(const CircuitState& s);

// Identifies one gate's private randomness; any gate is reproducible in
// isolation from these coordinates plus the master seed.
struct GateCoords {
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;
    std::uint64_t layer = 0;
    std::uint64_t bond = 0;  // 1-based, couples qudits (bond, bond+1)
};

// Haar-distributed U(d^2): complex Ginibre then QR with the diagonal phase
// fix (R_ii normalized real positive), row-major d^2 x d^2.
std::vector<std::complex<double>> sample_haar_gate(int d, const GateCoords& gc);

void apply_gate(CircuitState& s, int bond,
                const std::vector<std::complex<double>>& U);
void apply_gate_serial(CircuitState& s, int bond,
                       const std::vector<std::complex<double>>& U);

// One time step: bonds ascending, (1,2) first, (n-1,n) last, fresh gates.
void apply_staircase_layer(CircuitState& s,
                           const std::vector<std::vector<std::complex<double>>>& gates);

// tr rho_k^2 via the Gram matrix of the d^k x d^{n-k} amplitude reshaping
// (the smaller side is used; both give the same spectrum).
double purity_of_cut(const CircuitState& s, int k);
double purity_of_cut_serial(const CircuitState& s, int k);

struct MCCell {
    int k = 0, t = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct MCResult {
    int n = 0, d = 0, t_max = 0, realizations = 0;
    std::uint64_t seed = 0;
    std::vector<MCCell> cells;  // k-major then t; k = 1..n-1, t = 0..t_max

    const MCCell& cell(int k, int t) const {
        return cells[static_cast<std::size_t>(k - 1) * (t_max + 1) + t];
    }
};

// Realizations run in parallel with independent derived streams; the
// accumulation is order-independent (pairwise over a realization-indexed
// buffer), so results do not depend on scheduling.
MCResult mc_average(int n, int d, int t_max, int realizations, std::uint64_t seed);

}  // namespace phantom
