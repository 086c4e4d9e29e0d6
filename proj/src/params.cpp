#include "phantom/params.hpp"

#include <cmath>
#include <string>

namespace phantom {

ModelParams make_params(int n, int k, int d) {
    if (n < 4) throw std::invalid_argument("n must be >= 4, got " + std::to_string(n));
    if (n % 2 != 0)
        throw std::invalid_argument("n must be even, got " + std::to_string(n));
    if (k < 2 || k > n - 1)
        throw std::invalid_argument("k must satisfy 2 <= k <= n-1, got k=" +
                                    std::to_string(k) + " for n=" + std::to_string(n));
    if (d < 2) throw std::invalid_argument("d must be >= 2, got " + std::to_string(d));
    ModelParams p;
    p.n = n;
    p.k = k;
    p.d = d;
    p.alpha = Rat(d, d * d + 1);
    return p;
}

CharacteristicRates characteristic_rates(const ModelParams& p) {
    CharacteristicRates r;
    const double a = p.alpha_f();
    r.lambda_ph = a / (1.0 - a);
    const double c = std::cos(M_PI / p.n);
    r.lambda_1 = (2.0 * a * c) * (2.0 * a * c);
    return r;
}

Rat lambda_ph_exact(const ModelParams& p) { return p.alpha / (1 - p.alpha); }

Timescales timescales(const ModelParams& p) {
    Timescales t;
    t.t_transition = p.n - p.k - 1;
    t.t_kernel = t.t_transition / 2;
    const double lam_ph = characteristic_rates(p).lambda_ph;
    t.t_saturation =
        std::min(p.k, p.n - p.k) * std::log(static_cast<double>(p.d)) / (-std::log(lam_ph));
    return t;
}

}  // namespace phantom
