#pragma once

#include "phantom/bigfloat.hpp"
#include "phantom/params.hpp"

namespace phantom {

// Jacobi theta_4 at z = 0 with first and second q-derivatives, and theta_1
// with its q-derivative. Truncated series: term below 1e-18 of the partial
// sum, at least five terms.
struct Theta4Eval {
    double value = 0.0, d1 = 0.0, d2 = 0.0;
    int terms = 0;
};
Theta4Eval theta4_dq(double q);

struct Theta1Eval {
    double value = 0.0, d1 = 0.0;
    int terms = 0;
};
Theta1Eval theta1_dq(double z, double q);

// z-derivatives of theta_4 at z = 0 (for the heat-equation identity and the
// equivalent z-derivative form of the k=2 transition curve)
double theta4_z2(double q);
double theta4_z4(double q);

// 1 + theta1''(z)/theta1 as the single lattice sum; well conditioned up to
// q -> 1, unlike the ratio of two series.
double theta1_log_deriv_lattice(double z, double q);
BigFloat theta1_log_deriv_lattice_mp(const BigFloat& z, const BigFloat& q);

// theta4''(q)/theta4'(q) at the precision the argument requires; the
// alternating series lose ~ pi^2/(4(1-q)) nats of cancellation near q -> 1,
// so the working mantissa grows accordingly (hard cap, then domain_error).
BigFloat theta4_ratio_mp(double log_q);
struct Theta1RatioMP {
    BigFloat value;  // q * theta1'(z,q) / theta1(z,q)
};
Theta1RatioMP theta1_ratio_mp(double z, double log_q);

enum class Regime { plateau, transition, asymptotic };

struct RateValue {
    double value = 0.0;
    Regime regime = Regime::transition;
};

// Theory transition curves lambda_eff(t) - lambda_1 for the k=2 and k=n/2
// bipartitions. Valid for t >= t_c; once the nome underflows they switch to
// the long-time closed forms automatically.
RateValue rate_transition_k2(const ModelParams& p, long t);
RateValue rate_transition_half(const ModelParams& p, long t);

enum class AsymRegime { short_time, long_time };

struct AsymptoteValue {
    double value = 0.0;     // cosine-power form
    double exp_form = 0.0;  // exp(-const * t / n^2) shape (long regime)
};
AsymptoteValue asymptote_k2(const ModelParams& p, long t, AsymRegime regime);
AsymptoteValue asymptote_half(const ModelParams& p, long t, AsymRegime regime);

}  // namespace phantom
