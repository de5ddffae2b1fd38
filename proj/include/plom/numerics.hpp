#pragma once

// Shared numerical kernel: adaptive quadrature, bracketed root finding and
// finite-difference mixed partials, with explicit tolerance contracts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace plom {

enum class ErrorCode {
    domain,
    non_convergence,
    bad_bracket,
    diagonal_stencil,
    invalid_survival,
    on_diagonal,
    rate_domain,
    inversion_failure,
    negative_conditional,
    no_regular_variation,
    unstable,
    quadrature,
    config,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Tolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    int max_iter = 200;

    void check() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1)
            throw Error(ErrorCode::domain, "Tolerance: abs_tol>0, rel_tol>0, max_iter>=1 required");
    }
};

struct Bracket {
    double lo;
    double hi;

    void check() const {
        if (!(lo < hi)) throw Error(ErrorCode::bad_bracket, "Bracket: lo < hi required");
    }
};

using RealFn = std::function<double(double)>;
using RealFn2 = std::function<double(double, double)>;

namespace detail {

struct SimpsonState {
    long evals = 0;
    long budget = 0;
    double worst_lo = 0.0, worst_hi = 0.0, worst_err = 0.0;
};

inline double adaptive_simpson(const RealFn& f, double a, double b, double fa, double fm, double fb,
                               double whole, double eps, int depth, SimpsonState& st) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    st.evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * eps || depth <= 0) {
        if (depth <= 0 && std::abs(err) > st.worst_err) {
            st.worst_err = std::abs(err);
            st.worst_lo = a;
            st.worst_hi = b;
        }
        return left + right + err / 15.0;
    }
    if (st.evals > st.budget) {
        st.worst_err = std::abs(err);
        st.worst_lo = a;
        st.worst_hi = b;
        throw Error(ErrorCode::non_convergence,
                    "integrate: refinement budget exhausted; worst subinterval [" +
                        std::to_string(a) + ", " + std::to_string(b) + "] err=" + std::to_string(err));
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, st) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, st);
}

inline double simpson_piece(const RealFn& f, double a, double b, double eps, SimpsonState& st) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    st.evals += 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 60, st);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a,b].  Interior discontinuities or
/// kinks of the integrand go in `splits`; each resulting piece is refined
/// independently.  Result I satisfies |I - integral| <= abs_tol + rel_tol*|I|
/// under the usual refinement heuristic.
inline double integrate(const RealFn& f, double a, double b, Tolerance tol = {},
                        const std::vector<double>& splits = {}) {
    tol.check();
    if (!(a <= b)) throw Error(ErrorCode::domain, "integrate: a <= b required");
    if (a == b) return 0.0;

    std::vector<double> knots;
    knots.push_back(a);
    for (double s : splits)
        if (s > a && s < b) knots.push_back(s);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());

    detail::SimpsonState st;
    st.budget = 2000L * tol.max_iter;
    const double eps_piece = tol.abs_tol / static_cast<double>(knots.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        total += detail::simpson_piece(f, knots[i], knots[i + 1], eps_piece, st);
    return total;
}

/// Integral of f over [a, +inf) for integrands decaying at least like
/// e^{-rate*x}: substitutes u = e^{-rate*x} so the domain becomes (0, e^{-rate*a}].
inline double integrate_to_inf(const RealFn& f, double a, double rate, Tolerance tol = {}) {
    if (!(rate > 0.0)) throw Error(ErrorCode::domain, "integrate_to_inf: rate > 0 required");
    const double u_hi = std::exp(-rate * a);
    const double u_lo = std::exp(-rate * a - 700.0);  // truncates the (substituted) far tail
    auto g = [&](double u) { return f(-std::log(u) / rate) / (rate * u); };
    return integrate(g, u_lo, u_hi, tol);
}

/// Solve f(x) = target for strictly monotone f on the bracket.  Bisection with
/// Newton acceleration when a derivative is supplied; the bisection fallback
/// guarantees convergence.
inline double invert_monotone(const RealFn& f, double target, Bracket bracket, Tolerance tol = {},
                              const RealFn& deriv = {}) {
    tol.check();
    bracket.check();
    double lo = bracket.lo, hi = bracket.hi;
    double flo = f(lo), fhi = f(hi);
    const bool increasing = flo <= fhi;
    if (target < std::min(flo, fhi) - tol.abs_tol || target > std::max(flo, fhi) + tol.abs_tol)
        throw Error(ErrorCode::bad_bracket, "invert_monotone: target outside f(bracket)");

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < tol.max_iter; ++it) {
        double fx = f(x);
        if (std::abs(fx - target) <= tol.abs_tol) return x;
        const bool go_right = increasing ? (fx < target) : (fx > target);
        if (go_right)
            lo = x;
        else
            hi = x;
        double next = std::numeric_limits<double>::quiet_NaN();
        if (deriv) {
            const double d = deriv(x);
            if (std::isfinite(d) && d != 0.0) {
                const double cand = x - (fx - target) / d;
                if (cand > lo && cand < hi) next = cand;
            }
        }
        x = std::isfinite(next) ? next : 0.5 * (lo + hi);
        if (hi - lo < tol.rel_tol * (std::abs(x) + 1.0)) return x;
    }
    const double fx = f(x);
    if (std::abs(fx - target) <= 1e3 * tol.abs_tol) return x;
    throw Error(ErrorCode::non_convergence, "invert_monotone: max_iter reached, residual " +
                                                std::to_string(fx - target));
}

inline double default_fd_step(double x) { return std::max(1e-5, 1e-5 * std::abs(x)); }

/// Central finite-difference estimate of d^2 F / dx dy at (x, y).  Under the
/// default step rule the 4-point stencil is shrunk so it never straddles the
/// diagonal x = y (where the target distributions kink), and x == y is
/// rejected; an explicitly supplied step asserts smoothness and is used as is.
inline double mixed_partial(const RealFn2& F, double x, double y, double step = 0.0) {
    double s = step;
    if (s <= 0.0) {
        if (x == y) throw Error(ErrorCode::diagonal_stencil, "mixed_partial: x == y");
        s = std::max(default_fd_step(x), default_fd_step(y));
        const double gap = std::abs(x - y);
        if (gap < 2.0 * s) s = 0.25 * gap;
        if (s < 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}))
            throw Error(ErrorCode::diagonal_stencil,
                        "mixed_partial: no admissible step above precision floor");
    }
    const double fpp = F(x + s, y + s), fpm = F(x + s, y - s);
    const double fmp = F(x - s, y + s), fmm = F(x - s, y - s);
    return (fpp - fpm - fmp + fmm) / (4.0 * s * s);
}

}  // namespace plom
