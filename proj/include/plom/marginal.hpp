#pragma once

// Univariate survival functions: the base marginals Gbar_i of the standard
// weak lack-of-memory solution and their distorted counterparts
// Fbar_i = h(Gbar_i), with densities, hazards and inverses.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "plom/generator.hpp"
#include "plom/numerics.hpp"

namespace plom {

enum class TailWeight { light, heavy, unspecified };

class UnivariateSurvival {
public:
    /// `density_prime` and `inverse` may be empty; numeric fallbacks are used.
    /// `density_at_zero` must be the exact g(0): the singularity mass and the
    /// N-law depend on it alone and boundary differentiation is avoided.
    UnivariateSurvival(std::string label, RealFn survival, RealFn density, double density_at_zero,
                       RealFn inverse = {}, RealFn density_prime = {},
                       std::map<std::string, double> params = {},
                       TailWeight tail = TailWeight::unspecified,
                       RealFn squared_hazard_integral = {})
        : label_(std::move(label)),
          survival_(std::move(survival)),
          density_(std::move(density)),
          inverse_(std::move(inverse)),
          density_prime_(std::move(density_prime)),
          sq_hazard_integral_(std::move(squared_hazard_integral)),
          density_at_zero_(density_at_zero),
          params_(std::move(params)),
          tail_(tail) {
        check_invariants();
        x_max_ = this->inverse(1e-12);
    }

    double survival(double x) const { return x <= 0.0 ? 1.0 : survival_(x); }
    double operator()(double x) const { return survival(x); }

    double density(double x) const { return x < 0.0 ? 0.0 : density_(x); }

    double density_prime(double x) const {
        if (density_prime_) return density_prime_(x);
        const double s = std::max(1e-6, 1e-6 * std::abs(x));
        const double lo = std::max(0.0, x - s);
        return (density_(x + s) - density_(lo)) / (x + s - lo);
    }

    double density_at_zero() const { return density_at_zero_; }

    double hazard(double x) const { return density(x) / survival(x); }

    double inverse(double u) const {
        if (u >= 1.0) return 0.0;
        if (inverse_) return inverse_(u);
        double hi = 1.0;
        while (survival_(hi) > u && hi < 1e12) hi *= 2.0;
        return invert_monotone(survival_, u, Bracket{0.0, hi}, Tolerance{1e-12, 1e-14, 400});
    }

    /// J(v) = int_0^{S^{-1}(v)} (g/S)^2 dz.  Closed form for catalog families;
    /// otherwise quadrature in the substituted variable w = S(z), where
    /// J(v) = int_v^1 g(S^{-1}(w)) / w^2 dw.
    double squared_hazard_integral(double v) const {
        if (sq_hazard_integral_) return sq_hazard_integral_(v);
        if (v >= 1.0) return 0.0;
        auto f = [this](double w) { return density(inverse(w)) / (w * w); };
        return integrate(f, v, 1.0, Tolerance{1e-10, 1e-12, 400});
    }

    bool has_closed_hazard_integral() const { return static_cast<bool>(sq_hazard_integral_); }
    bool has_closed_density_prime() const { return static_cast<bool>(density_prime_); }

    /// Truncation point for numeric scans: survival(x_max) <= 1e-12.
    double x_max() const { return x_max_; }

    const std::string& label() const { return label_; }
    const std::map<std::string, double>& params() const { return params_; }
    TailWeight tail_weight() const { return tail_; }

private:
    void check_invariants() const {
        if (std::abs(survival_(0.0) - 1.0) > 1e-9)
            throw Error(ErrorCode::invalid_survival, "UnivariateSurvival '" + label_ + "': S(0) != 1");
        double prev = 1.0;
        for (int i = 1; i <= 64; ++i) {
            const double u = static_cast<double>(i) / 65.0;
            const double x = inverse(u);
            if (std::abs(survival(x) - u) > 1e-10)
                throw Error(ErrorCode::invalid_survival,
                            "UnivariateSurvival '" + label_ + "': S(S^-1(u)) != u at u=" + std::to_string(u));
            if (density_(x) < 0.0)
                throw Error(ErrorCode::invalid_survival,
                            "UnivariateSurvival '" + label_ + "': negative density at x=" + std::to_string(x));
        }
        for (int i = 1; i <= 64; ++i) {
            const double x = 0.25 * i;
            const double s = survival_(x);
            if (s > prev + 1e-12)
                throw Error(ErrorCode::invalid_survival,
                            "UnivariateSurvival '" + label_ + "': not decreasing at x=" + std::to_string(x));
            prev = s;
        }
    }

    std::string label_;
    RealFn survival_, density_, inverse_, density_prime_, sq_hazard_integral_;
    double density_at_zero_;
    double x_max_ = 0.0;
    std::map<std::string, double> params_;
    TailWeight tail_;
};

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

/// S(x) = e^{-alpha x};  J(v) = -alpha ln v.
inline UnivariateSurvival exponential_marginal(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::domain, "exponential_marginal: alpha > 0 required");
    return UnivariateSurvival(
        "exponential", [alpha](double x) { return std::exp(-alpha * x); },
        [alpha](double x) { return alpha * std::exp(-alpha * x); }, alpha,
        [alpha](double u) { return -std::log(u) / alpha; },
        [alpha](double x) { return -alpha * alpha * std::exp(-alpha * x); }, {{"alpha", alpha}},
        TailWeight::light, [alpha](double v) { return -alpha * std::log(v); });
}

/// S(x) = (1+x)^{-alpha} (Pareto type II);  J(v) = alpha^2 (1 - v^{1/alpha}).
inline UnivariateSurvival pareto_ii_marginal(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::domain, "pareto_ii_marginal: alpha > 0 required");
    return UnivariateSurvival(
        "pareto_ii", [alpha](double x) { return std::pow(1.0 + x, -alpha); },
        [alpha](double x) { return alpha * std::pow(1.0 + x, -alpha - 1.0); }, alpha,
        [alpha](double u) { return std::pow(u, -1.0 / alpha) - 1.0; },
        [alpha](double x) { return -alpha * (alpha + 1.0) * std::pow(1.0 + x, -alpha - 2.0); },
        {{"alpha", alpha}}, TailWeight::heavy,
        [alpha](double v) { return alpha * alpha * (1.0 - std::pow(v, 1.0 / alpha)); });
}

/// S(x) = (1 + xi (e^{beta x} - 1))^{-1};  J(v) = (xi-1) beta (1-v) - beta ln v.
inline UnivariateSurvival gompertz_logistic_marginal(double xi, double beta) {
    if (!(xi > 0.0) || !(beta > 0.0))
        throw Error(ErrorCode::domain, "gompertz_logistic_marginal: xi > 0, beta > 0 required");
    auto S = [xi, beta](double x) { return 1.0 / (1.0 + xi * std::expm1(beta * x)); };
    auto g = [xi, beta, S](double x) {
        const double s = S(x);
        return xi * beta * std::exp(beta * x) * s * s;
    };
    return UnivariateSurvival(
        "gompertz_logistic", S, g, xi * beta,
        [xi, beta](double u) { return std::log1p((1.0 / u - 1.0) / xi) / beta; },
        [xi, beta, S, g](double x) {
            const double s = S(x), E = xi * std::exp(beta * x);
            return beta * beta * E * s * s - 2.0 * beta * E * g(x) * s;
        },
        {{"xi", xi}, {"beta", beta}}, TailWeight::light,
        [xi, beta](double v) { return (xi - 1.0) * beta * (1.0 - v) - beta * std::log(v); });
}

/// S(x) = h(e^{-mu x}): a pseudo-exponential used directly as a marginal.
inline UnivariateSurvival pseudo_exponential_marginal(const Generator& g, double mu) {
    if (!(mu > 0.0)) throw Error(ErrorCode::domain, "pseudo_exponential_marginal: mu > 0 required");
    auto S = [g, mu](double x) { return g(std::exp(-mu * x)); };
    auto dens = [g, mu](double x) {
        const double e = std::exp(-mu * x);
        return mu * e * g.prime(e);
    };
    return UnivariateSurvival(
        "pseudo_exponential", S, dens, mu * g.prime(1.0),
        [g, mu](double u) { return -std::log(g.inverse(u)) / mu; },
        [g, mu](double x) {
            const double e = std::exp(-mu * x);
            return -mu * mu * e * (g.second(e) * e + g.prime(e));
        },
        {{"mu", mu}}, TailWeight::unspecified);
}

// ---------------------------------------------------------------------------
// distortion
// ---------------------------------------------------------------------------

/// Fbar = h(Gbar): density f = h'(Gbar) g, inverse Fbar^{-1}(u) = Gbar^{-1}(h^{-1}(u)).
inline UnivariateSurvival distort(const Generator& gen, const UnivariateSurvival& G) {
    auto S = [gen, G](double x) { return gen(G.survival(x)); };
    auto dens = [gen, G](double x) { return gen.prime(G.survival(x)) * G.density(x); };
    return UnivariateSurvival(
        gen.label() + "(" + G.label() + ")", S, dens, gen.prime(1.0) * G.density_at_zero(),
        [gen, G](double u) { return G.inverse(gen.inverse(u)); },
        [gen, G](double x) {
            const double s = G.survival(x), g = G.density(x);
            return gen.prime(s) * G.density_prime(x) - gen.second(s) * g * g;
        },
        G.params());
}

/// Gbar = h^{-1}(Fbar): round-trips with distort.
inline UnivariateSurvival undistort(const Generator& gen, const UnivariateSurvival& F) {
    auto S = [gen, F](double x) { return gen.inverse(F.survival(x)); };
    auto dens = [gen, F, S](double x) { return F.density(x) / gen.prime(S(x)); };
    return UnivariateSurvival(
        gen.label() + "^-1(" + F.label() + ")", S, dens,
        F.density_at_zero() / gen.prime(1.0),
        [gen, F](double u) { return F.inverse(gen(u)); },
        [gen, F, S, dens](double x) {
            const double s = S(x), hp = gen.prime(s), d = dens(x);
            return F.density_prime(x) / hp + F.density(x) * gen.second(s) * d / (hp * hp);
        },
        F.params());
}

/// Generator induced by a survival function (module `generators` operation,
/// placed here so it can accept the marginal type).
inline Generator induced_generator(const UnivariateSurvival& H) {
    return induced_generator([H](double x) { return H.survival(x); },
                             [H](double u) { return H.inverse(u); }, "induced(" + H.label() + ")");
}

}  // namespace plom
