#pragma once

#include <stdexcept>

#include "phantom/rational.hpp"

namespace phantom {

// Staircase-circuit purity model. alpha = d/(d^2+1) carries the entire
// dependence on the local Hilbert-space dimension and is kept exact.
struct ModelParams {
    int n = 0;   // qudit count, even, >= 4
    int k = 0;   // bipartition index, 2 <= k <= n-1
    int d = 0;   // local dimension, >= 2
    Rat alpha;   // d/(d^2+1), exact

    double alpha_f() const { return static_cast<double>(alpha); }
};

struct Timescales {
    int t_kernel = 0;      // last step with a kernel contribution
    int t_transition = 0;  // n-k-1, end of the phantom plateau
    double t_saturation = 0.0;
};

ModelParams make_params(int n, int k, int d);

// lambda_ph = alpha/(1-alpha) and the finite-n lambda_1 = (2 alpha cos(pi/n))^2
struct CharacteristicRates {
    double lambda_ph = 0.0;
    double lambda_1 = 0.0;
};

CharacteristicRates characteristic_rates(const ModelParams& p);
Rat lambda_ph_exact(const ModelParams& p);
Timescales timescales(const ModelParams& p);

}  // namespace phantom
