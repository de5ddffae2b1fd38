#pragma once

// Characterization laws of the pseudo-weak distribution: the laws of
// U = min(X,Y), N = 1_{X>Y} - 1_{X<Y}, W = (X-U, Y-U) and V = X-Y, plus the
// reconstruction of the survival function from the (U,V) law.

#include <cmath>
#include <functional>
#include <vector>

#include "plom/core.hpp"

namespace plom {

/// P(U >= u) = exp_h(lambda u): U is pseudo-exponential with rate lambda.
inline double u_survival(const PseudoWeakDistribution& d, double u) {
    if (!(u >= 0.0)) throw Error(ErrorCode::domain, "u_survival: u >= 0 required");
    return exp_h(d.generator(), d.lambda(), u);
}

struct NLaw {
    double p_plus;   // P(N = 1)  = P(X > Y)
    double p_zero;   // P(N = 0)  = P(X = Y)
    double p_minus;  // P(N = -1) = P(X < Y)
};

inline NLaw n_law(const PseudoWeakDistribution& d) {
    const double g10 = d.base1().density_at_zero(), g20 = d.base2().density_at_zero();
    const double lam = d.lambda();
    return {1.0 - g10 / lam, (g10 + g20) / lam - 1.0, 1.0 - g20 / lam};
}

/// Joint survival of U and W = (X-U, Y-U); r_i is the hazard of the base
/// marginal Gbar_i.  min(W1,W2) = 0 a.s., so the (w1>0, w2>0) quadrant is null.
inline double uw_joint(const PseudoWeakDistribution& d, double u, double w1, double w2) {
    if (!(u >= 0.0)) throw Error(ErrorCode::domain, "uw_joint: u >= 0 required");
    const Generator& h = d.generator();
    const double lam = d.lambda();
    if (w1 <= 0.0 && w2 <= 0.0) return exp_h(h, lam, u);
    if (w1 > 0.0 && w2 > 0.0) return 0.0;
    const UnivariateSurvival& G = w1 > 0.0 ? d.base1() : d.base2();
    const double w = w1 > 0.0 ? w1 : w2;
    if (G.survival(w) <= 0.0) return 0.0;  // beyond the representable tail
    return h(std::exp(-lam * u) * G.survival(w)) * (1.0 - G.hazard(w) / lam);
}

/// Joint survival of U = min(X,Y) and V = X-Y (eq. Surv_VU).
inline double uv_joint(const PseudoWeakDistribution& d, double u, double v) {
    if (!(u >= 0.0)) throw Error(ErrorCode::domain, "uv_joint: u >= 0 required");
    const Generator& h = d.generator();
    const double lam = d.lambda();
    const double eu = std::exp(-lam * u);
    if (v > 0.0) {
        const double B = d.base1().survival(v);
        if (B <= 0.0) return 0.0;
        return h(eu * B) * (1.0 - d.base1().density(v) / (lam * B));
    }
    const double B = d.base2().survival(-v);
    if (B <= 0.0) return h(eu);  // v below the representable tail: the U marginal
    return h(eu) + h(eu * B) * (d.base2().density(-v) / (lam * B) - 1.0);
}

/// Rebuilds the survival function from the (U,V) law by the four-term
/// probability decomposition of the converse proof; equals survival(x,y).
inline std::function<double(double, double)> reconstruct_from_uv(const PseudoWeakDistribution& d) {
    return [d](double x, double y) -> double {
        const Generator& h = d.generator();
        const double lam = d.lambda();
        const bool below = x <= y;  // reconstruct on 0 <= x <= y, mirror otherwise
        const UnivariateSurvival& G = below ? d.base2() : d.base1();
        const double s = below ? x : y;  // smaller coordinate
        const double t = below ? y : x;  // larger coordinate
        const double z = t - s;
        const double B = G.survival(z);
        const double q = G.density(z) / (lam * B);
        const double q0 = G.density_at_zero() / lam;
        const double et = std::exp(-lam * t), es = std::exp(-lam * s);
        const double term1 = h(et) * q0;                                // P(U > t, V right-signed)
        const double term2 = h(et * B) * (q - 1.0) - h(et) * (q0 - 1.0);  // P(U > t, mid-range V)
        const double term3 = h(es * B) * q - h(et) - h(et * B) * (q - 1.0);
        const double term4 = h(es * B) * (1.0 - q);
        return term1 + term2 + term3 + term4;
    };
}

struct IndependenceReport {
    double max_abs_dev = 0.0;       // max |empirical - product| over the (n,u) grid
    double max_sigma_ratio = 0.0;   // same deviation in MC standard errors
    bool pass = false;              // max_sigma_ratio <= 3
};

}  // namespace plom
