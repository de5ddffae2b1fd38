#pragma once

// Dependence structure: Kendall distribution function (analytic via the
// closed-form assembly and empirical), Kendall's tau, and tail-dependence
// coefficients of the survival copula (closed forms, distortion transfer
// rules and numeric corner limits).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "plom/core.hpp"
#include "plom/rng.hpp"
#include "plom/sampling.hpp"

namespace plom {

enum class CurveKind { analytic, empirical };

struct KendallCurve {
    std::vector<std::pair<double, double>> grid;  // (t, K(t)), t increasing in (0,1]
    CurveKind kind = CurveKind::analytic;
    std::string meta;
    std::size_t sample_size = 0;
};

/// K(s) = s - H(h^{-1}(s)) with H(v) = h'(v) v [2 ln v + (J1(v)+J2(v))/lambda],
/// J_i the squared-hazard integrals of the base marginals.
inline double kendall_value(const PseudoWeakDistribution& d, double t) {
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::domain, "kendall_value: t in (0,1] required");
    if (t == 1.0) return 1.0;
    const Generator& h = d.generator();
    const double v = h.inverse(t);
    double J;
    try {
        J = d.base1().squared_hazard_integral(v) + d.base2().squared_hazard_integral(v);
    } catch (const Error& e) {
        throw Error(ErrorCode::quadrature,
                    "kendall_value: J quadrature failed at t=" + std::to_string(t) + ": " + e.what());
    }
    const double H = h.prime(v) * v * (2.0 * std::log(v) + J / d.lambda());
    return t - H;
}

inline KendallCurve kendall_analytic(const PseudoWeakDistribution& d,
                                     const std::vector<double>& t_grid) {
    KendallCurve c;
    c.kind = CurveKind::analytic;
    c.grid.reserve(t_grid.size());
    for (double t : t_grid) c.grid.emplace_back(t, kendall_value(d, t));
    return c;
}

/// Empirical Kendall function of a batch: Khat(t) = #{Fbar(x_i,y_i) <= t} / n.
inline KendallCurve kendall_empirical(const PseudoWeakDistribution& d, const SampleBatch& batch,
                                      const std::vector<double>& t_grid) {
    std::vector<double> z;
    z.reserve(batch.size());
    for (const auto& p : batch.pairs) z.push_back(d.survival(p.x, p.y));
    std::sort(z.begin(), z.end());
    KendallCurve c;
    c.kind = CurveKind::empirical;
    c.sample_size = batch.size();
    c.grid.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto it = std::upper_bound(z.begin(), z.end(), t);
        c.grid.emplace_back(t, static_cast<double>(it - z.begin()) / z.size());
    }
    return c;
}

inline KendallCurve kendall_empirical(const PseudoWeakDistribution& d, std::size_t n,
                                      const CounterRng& rng, const std::vector<double>& t_grid) {
    if (n < 1000)
        throw Error(ErrorCode::domain, "kendall_empirical: n >= 1000 required for a usable estimate");
    return kendall_empirical(d, sample_structural(d, n, rng), t_grid);
}

/// tau = 3 - 4 int_0^1 K(t) dt, trapezoidal on the curve grid with the
/// endpoints (0,0) and (1,1) appended when absent.
inline double kendall_tau(const KendallCurve& curve) {
    if (curve.grid.size() < 2) throw Error(ErrorCode::domain, "kendall_tau: curve too sparse");
    std::vector<std::pair<double, double>> g = curve.grid;
    if (g.front().first > 0.0) g.insert(g.begin(), {0.0, 0.0});
    if (g.back().first < 1.0) g.emplace_back(1.0, 1.0);
    double I = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        I += 0.5 * (g[i].second + g[i + 1].second) * (g[i + 1].first - g[i].first);
    return 3.0 - 4.0 * I;
}

namespace detail {

// merge sort counting inversions (Knight's method backbone)
inline std::uint64_t count_inversions(std::vector<double>& a, std::vector<double>& buf,
                                      std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t cnt = count_inversions(a, buf, lo, mid) + count_inversions(a, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            cnt += mid - i;
            buf[k++] = a[j++];
        } else {
            buf[k++] = a[i++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
    return cnt;
}

inline std::uint64_t tie_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t s = 0, run = 1;
    for (std::size_t i = 1; i <= v.size(); ++i) {
        if (i < v.size() && v[i] == v[i - 1]) {
            ++run;
        } else {
            s += run * (run - 1) / 2;
            run = 1;
        }
    }
    return s;
}

}  // namespace detail

/// Tie-adjusted concordance estimator (tau-b) in O(n log n); reduces to the
/// plain estimator when no ties occur.
inline double kendall_tau_empirical(const std::vector<std::pair<double, double>>& xy) {
    const std::size_t n = xy.size();
    if (n < 2) throw Error(ErrorCode::domain, "kendall_tau_empirical: need at least two points");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (xy[a].first != xy[b].first) return xy[a].first < xy[b].first;
        return xy[a].second < xy[b].second;
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = xy[idx[i]].second;

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::vector<double> xs(n), ys_copy = ys;
    for (std::size_t i = 0; i < n; ++i) xs[i] = xy[idx[i]].first;
    const std::uint64_t n1 = detail::tie_pairs(xs);
    const std::uint64_t n2 = detail::tie_pairs(ys);
    // joint-tie pairs
    std::vector<std::pair<double, double>> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = xy[idx[i]];
    std::uint64_t n3 = 0, run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            n3 += run * (run - 1) / 2;
            run = 1;
        }
    }
    std::vector<double> buf(n);
    const std::uint64_t swaps = detail::count_inversions(ys, buf, 0, n);

    const double num = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                       static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
    const double den = std::sqrt((static_cast<double>(n0) - static_cast<double>(n1)) *
                                 (static_cast<double>(n0) - static_cast<double>(n2)));
    return num / den;
}

inline double kendall_tau_empirical(const SampleBatch& batch) {
    std::vector<std::pair<double, double>> xy;
    xy.reserve(batch.size());
    for (const auto& p : batch.pairs) xy.emplace_back(p.x, p.y);
    return kendall_tau_empirical(xy);
}

// ---------------------------------------------------------------------------
// tail dependence
// ---------------------------------------------------------------------------

enum class TailDepMethod { closed_form, transfer_rule, numeric_limit, empirical };

struct TailDep {
    double lower = 0.0;
    double upper = 0.0;
    TailDepMethod method = TailDepMethod::closed_form;
    double lower_delta = 0.0;  // last-step delta when a numeric limit was used
    double upper_delta = 0.0;
};

enum class TailSide { lower, upper };

struct NumericLimit {
    double estimate = 0.0;
    double last_delta = 0.0;
    bool stable = false;
};

namespace detail {

// Truncate a geometric-sequence limit at the precision floor, then apply one
// Aitken (order-1 Richardson-style) extrapolation step.
inline NumericLimit geometric_limit(const std::vector<double>& rs) {
    std::size_t last = rs.size() - 1;
    bool any_decrease = false;
    for (std::size_t i = 1; i + 1 < rs.size(); ++i) {
        const double d_prev = std::abs(rs[i] - rs[i - 1]);
        const double d_cur = std::abs(rs[i + 1] - rs[i]);
        if (d_cur < d_prev) any_decrease = true;
        if (d_cur > 1.2 * d_prev + 1e-15) {
            last = i;
            break;
        }
    }
    NumericLimit out;
    out.stable = any_decrease || std::abs(rs[last] - rs[last - 1]) < 1e-12;
    if (last >= 2) {
        const double r0 = rs[last - 2], r1 = rs[last - 1], r2 = rs[last];
        const double d1 = r1 - r0, d2 = r2 - r1;
        out.estimate = std::abs(d2 - d1) > 1e-15 ? r2 - d2 * d2 / (d2 - d1) : r2;
    } else {
        out.estimate = rs[last];
    }
    out.last_delta = std::abs(rs[last] - rs[last - 1]);
    return out;
}

}  // namespace detail

/// Numeric corner limit of a copula's tail coefficient: evaluates the defining
/// ratio at u = 1 - 2^{-k} (upper) or u = 2^{-k} (lower) for k = 4..30 and
/// extrapolates; throws UNSTABLE when the deltas never decrease.
inline NumericLimit taildep_numeric(const RealFn2& copula, TailSide side) {
    std::vector<double> rs;
    rs.reserve(27);
    for (int k = 4; k <= 30; ++k) {
        const double s = std::pow(2.0, -k);
        if (side == TailSide::upper) {
            const double u = 1.0 - s;
            rs.push_back((1.0 - 2.0 * u + copula(u, u)) / s);
        } else {
            rs.push_back(copula(s, s) / s);
        }
    }
    NumericLimit lim = detail::geometric_limit(rs);
    if (!lim.stable)
        throw Error(ErrorCode::unstable, "taildep_numeric: corner ratio sequence does not converge");
    lim.estimate = std::clamp(lim.estimate, 0.0, 1.0);
    return lim;
}

/// Tail coefficients of the base survival copula C^G for identical base
/// marginals: lambda_U = 2 - lambda/g(0) in closed form; lambda_L = 0 for a
/// heavy-tailed base, 1/0 closed-form for the exponential base, and a numeric
/// limit otherwise.
inline TailDep taildep_base(const PseudoWeakDistribution& d) {
    const UnivariateSurvival& G = d.base1();
    if (G.label() != d.base2().label() || !(G.params() == d.base2().params()))
        throw Error(ErrorCode::domain, "taildep_base: identical base marginals required");
    const double lam = d.lambda(), g0 = G.density_at_zero();
    if (!(lam <= 2.0 * g0 + 1e-12))
        throw Error(ErrorCode::domain, "taildep_base: lambda <= 2 g(0) required");
    TailDep td;
    td.method = TailDepMethod::closed_form;
    td.upper = 2.0 - lam / g0;
    if (G.tail_weight() == TailWeight::heavy) {
        td.lower = 0.0;
    } else if (G.label() == "exponential") {
        td.lower = std::abs(lam - g0) < 1e-12 ? 1.0 : 0.0;
    } else {
        const NumericLimit lim =
            taildep_numeric([&d](double u, double v) { return d.base_copula(u, v); }, TailSide::lower);
        td.lower = lim.estimate;
        td.lower_delta = lim.last_delta;
        td.method = TailDepMethod::numeric_limit;
    }
    return td;
}

/// Transfer rule for the distortion C_h = h(C(h^{-1} u, h^{-1} v)):
///   lambda_L(C_h) = lambda_L(C)^{alpha_L}       when h(t)    ~ b t^{alpha_L} at 0,
///   lambda_U(C_h) = 2 - (2-lambda_U(C))^{alpha_U} when 1-h(t) ~ b (1-t)^{alpha_U} at 1.
/// Exponents come from the generator's catalog data or from `rv_override`;
/// otherwise a numeric fit is attempted and NO_REGULAR_VARIATION reported when
/// it does not stabilize.
inline TailDep taildep_distorted(const TailDep& base, const Generator& gen,
                                 const RegularVariation* rv_override = nullptr) {
    RegularVariation rv = rv_override ? *rv_override : gen.regular_variation();
    auto fit_exponent = [&gen](TailSide side) -> double {
        std::vector<double> rs;
        for (int k = 6; k <= 40; ++k) {
            const double t = std::pow(2.0, -k);
            if (side == TailSide::lower)
                rs.push_back(std::log(gen(t)) / std::log(t));
            else
                rs.push_back(std::log(1.0 - gen(1.0 - t)) / std::log(t));
        }
        const NumericLimit lim = detail::geometric_limit(rs);
        if (!lim.stable || !(lim.estimate > 0.0) || !std::isfinite(lim.estimate))
            throw Error(ErrorCode::no_regular_variation,
                        "taildep_distorted: corner exponent fit did not stabilize for generator '" +
                            gen.label() + "'");
        return lim.estimate;
    };
    TailDep out;
    out.method = TailDepMethod::transfer_rule;
    const double aL = rv.alpha_lower ? *rv.alpha_lower : fit_exponent(TailSide::lower);
    const double aU = rv.alpha_upper ? *rv.alpha_upper : fit_exponent(TailSide::upper);
    out.lower = std::pow(base.lower, aL);
    out.upper = 2.0 - std::pow(2.0 - base.upper, aU);
    return out;
}

}  // namespace plom
