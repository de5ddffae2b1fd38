#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "plom/core.hpp"
#include "plom/rng.hpp"
#include "plom/sampling.hpp"

using namespace plom;

namespace {

PseudoWeakDistribution mo_classic() {
    return PseudoWeakDistribution(identity_generator(), exponential_marginal(2.0),
                                  exponential_marginal(3.0), 4.5);
}

// exp_ratio distortion whose distorted marginals are standard exponentials
PseudoWeakDistribution distorted_exp(double theta = 0.01) {
    const Generator g = exp_ratio_generator(theta);
    return PseudoWeakDistribution::from_distorted(g, exponential_marginal(0.5),
                                                  exponential_marginal(0.6), 0.645);
}

// power_exp_ratio distortion of a Pareto base pair (the validity dichotomy case)
PseudoWeakDistribution pareto_power(double lambda = 2.75) {
    return PseudoWeakDistribution(power_exp_ratio_generator(1.0, 2.0), pareto_ii_marginal(2.0),
                                  pareto_ii_marginal(2.0), lambda);
}

}  // namespace

TEST_CASE("pseudo-strong survival: named examples") {
    const PseudoStrongDistribution id(identity_generator(), 1.0, 2.0);
    CHECK(id.survival(0.0, 0.0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(id.survival(1.0, 1.0) == Catch::Approx(std::exp(-3.0)).margin(1e-14));
    const PseudoStrongDistribution re(recip_exp_generator(1.0), 1.0, 1.0);
    const double l2 = std::log(2.0);
    CHECK(re.survival(l2, l2) == Catch::Approx(std::exp(-3.0)).epsilon(1e-12));
}

TEST_CASE("pseudo-strong copula: named examples and the two routes") {
    const PseudoStrongDistribution id(identity_generator(), 1.0, 2.0);
    CHECK(id.copula(1.0, 0.3) == Catch::Approx(0.3).margin(1e-14));
    CHECK(id.copula(0.25, 0.5) == Catch::Approx(0.125).margin(1e-14));
    const PseudoStrongDistribution pw(power_generator(2.0), 1.0, 1.5);
    CHECK(pw.copula(0.25, 0.25) == Catch::Approx(0.0625).margin(1e-12));
    // copula equals survival composed with marginal inverses
    const UnivariateSurvival m1 = pw.marginal1(), m2 = pw.marginal2();
    for (double u : {0.1, 0.35, 0.8})
        for (double v : {0.2, 0.6, 0.95})
            CHECK(pw.copula(u, v) ==
                  Catch::Approx(pw.survival(m1.inverse(u), m2.inverse(v))).margin(1e-10));
    // log-concavity of h^{-1} is enforced at construction
    const Generator sine("sine", [](double x) { return std::sin(1.5707963267948966 * x); },
                         [](double u) { return std::asin(u) / 1.5707963267948966; });
    CHECK_THROWS_AS(PseudoStrongDistribution(sine, 1.0, 1.0), Error);
}

TEST_CASE("pseudo-weak survival: named examples") {
    const PseudoWeakDistribution d = mo_classic();
    CHECK(d.survival(0.0, 0.0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(d.survival(1.0, 1.0) == Catch::Approx(std::exp(-4.5)).epsilon(1e-12));
    CHECK(d.survival(2.0, 1.0) == Catch::Approx(std::exp(-6.5)).epsilon(1e-12));
    // both wedge branches agree on the diagonal
    const PseudoWeakDistribution f = distorted_exp();
    for (double t : {0.2, 1.0, 2.5}) {
        const double lhs = f.generator()(std::exp(-f.lambda() * t) * f.base1().survival(0.0));
        const double rhs = f.generator()(std::exp(-f.lambda() * t) * f.base2().survival(0.0));
        CHECK(lhs == Catch::Approx(rhs).margin(1e-14));
        CHECK(f.survival(t, t) == Catch::Approx(exp_h(f.generator(), f.lambda(), t)).margin(1e-14));
    }
}

TEST_CASE("margins of the weak distribution are the distorted marginals") {
    for (const PseudoWeakDistribution& d : {mo_classic(), distorted_exp(), pareto_power()}) {
        const UnivariateSurvival f1 = d.distorted1(), f2 = d.distorted2();
        for (double x : {0.0, 0.1, 0.7, 2.0, 5.0}) {
            CHECK(d.survival(x, 0.0) == Catch::Approx(f1.survival(x)).margin(1e-12));
            CHECK(d.survival(0.0, x) == Catch::Approx(f2.survival(x)).margin(1e-12));
        }
    }
}

TEST_CASE("pseudo-weak functional equation on random triples") {
    const CounterRng rng(23);
    for (const PseudoWeakDistribution& d : {mo_classic(), distorted_exp(), pareto_power()}) {
        for (int rep = 0; rep < 2000; ++rep) {
            const std::uint64_t c = 4 * rep;
            const double s1 = 3.0 * rng.uniform(c), s2 = 3.0 * rng.uniform(c + 1),
                         t = 2.0 * rng.uniform(c + 2);
            const double lhs = d.survival(s1 + t, s2 + t);
            const double rhs = pseudo_product(d.generator(), d.survival(s1, s2), d.survival(t, t));
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        }
    }
}

TEST_CASE("pseudo-strong functional equation with independent shifts") {
    const PseudoStrongDistribution d(exp_ratio_generator(1.0), 1.0, 2.0);
    const CounterRng rng(29);
    for (int rep = 0; rep < 2000; ++rep) {
        const std::uint64_t c = 4 * rep;
        const double s1 = 2.0 * rng.uniform(c), s2 = 2.0 * rng.uniform(c + 1);
        const double t1 = 2.0 * rng.uniform(c + 2), t2 = 2.0 * rng.uniform(c + 3);
        const double lhs = d.survival(s1 + t1, s2 + t2);
        const double rhs = pseudo_product(d.generator(), d.survival(s1, s2), d.survival(t1, t2));
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
}

TEST_CASE("density: closed form, positivity, finite-difference oracle") {
    const PseudoWeakDistribution d = mo_classic();
    // differentiate e^{-lam y - a1 (x-y)} twice by hand: (lam - a1) a1 e^{-6.5}
    CHECK(d.density(2.0, 1.0) == Catch::Approx(2.5 * 2.0 * std::exp(-6.5)).epsilon(1e-12));
    CHECK_THROWS_AS(d.density(1.0, 1.0), Error);

    const CounterRng rng(31);
    for (const PseudoWeakDistribution& m : {mo_classic(), distorted_exp(), pareto_power()}) {
        for (int rep = 0; rep < 10000; ++rep) {
            const double x = 4.0 * rng.uniform(2 * rep), y = 4.0 * rng.uniform(2 * rep + 1);
            if (x == y) continue;
            CHECK(m.density(x, y) >= 0.0);
        }
        // central-difference cross-check at (0.7, 0.2)
        const double fd = mixed_partial([&m](double x, double y) { return m.survival(x, y); }, 0.7, 0.2);
        CHECK(m.density(0.7, 0.2) == Catch::Approx(fd).epsilon(1e-5));
        const double fd2 = mixed_partial([&m](double x, double y) { return m.survival(x, y); }, 0.2, 0.9);
        CHECK(m.density(0.2, 0.9) == Catch::Approx(fd2).epsilon(1e-4));
    }
}

TEST_CASE("atom mass: named examples") {
    CHECK(PseudoWeakDistribution(identity_generator(), exponential_marginal(2.0),
                                 exponential_marginal(3.0), 5.0)
              .atom_mass() == Catch::Approx(0.0).margin(1e-14));
    CHECK(mo_classic().atom_mass() == Catch::Approx(1.0 / 9.0).margin(1e-14));
    // distorted-exponential model: (gamma1+gamma2)(e^theta - 1)/(theta e^theta) / lambda - 1
    const double th = 0.01;
    const double expected = 1.1 * (std::exp(th) - 1.0) / (th * std::exp(th)) / 0.645 - 1.0;
    CHECK(distorted_exp().atom_mass() == Catch::Approx(expected).margin(1e-12));
    CHECK(expected == Catch::Approx(0.69693).margin(1e-5));
}

TEST_CASE("atom mass does not depend on the generator") {
    const UnivariateSurvival g1 = exponential_marginal(2.0), g2 = pareto_ii_marginal(3.0);
    const double lam = 4.2;
    const double ref =
        PseudoWeakDistribution(identity_generator(), g1, g2, lam).atom_mass();
    for (const Generator& g : {exp_ratio_generator(0.7), recip_exp_generator(2.0),
                               power_exp_ratio_generator(1.0, 2.0)})
        CHECK(PseudoWeakDistribution(g, g1, g2, lam).atom_mass() ==
              Catch::Approx(ref).margin(1e-14));
}

TEST_CASE("atom tail: named examples") {
    const PseudoWeakDistribution d = mo_classic();
    CHECK(d.atom_tail(0.0) == Catch::Approx(d.atom_mass()).margin(1e-14));
    CHECK(d.atom_tail(1.0) == Catch::Approx(std::exp(-4.5) / 9.0).epsilon(1e-12));
    for (double t : {0.1, 0.5, 2.0}) CHECK(d.atom_tail(t) < d.atom_tail(t - 0.05));
    const PseudoWeakDistribution boundary(identity_generator(), exponential_marginal(2.0),
                                          exponential_marginal(3.0), 5.0);
    for (double t : {0.0, 0.5, 2.0}) CHECK(boundary.atom_tail(t) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("validate: classical Marshall-Olkin window") {
    const ValidityReport rep = mo_classic().validate(40);
    CHECK(rep.verdict == Verdict::valid_on_grid);
    CHECK(rep.rate_condition_pass);
    CHECK(rep.rate_margin == Catch::Approx(0.5).margin(1e-12));
    CHECK(rep.density_min >= -1e-9);
    CHECK(rep.atom == Catch::Approx(1.0 / 9.0).margin(1e-12));
    CHECK(rep.gr_sigma_monotone);
}

TEST_CASE("validate: rate condition failure") {
    const PseudoWeakDistribution bad(identity_generator(), exponential_marginal(2.0),
                                     exponential_marginal(3.0), 5.5);
    const ValidityReport rep = bad.validate(24);
    CHECK(rep.verdict == Verdict::invalid);
    CHECK_FALSE(rep.rate_condition_pass);
    CHECK(rep.rate_margin == Catch::Approx(-0.5).margin(1e-12));
}

TEST_CASE("validate: distortion dichotomy (distorted valid, base invalid)") {
    // distorted model is a survival function
    const PseudoWeakDistribution good = pareto_power();
    const ValidityReport rep_f = good.validate(40);
    CHECK(rep_f.verdict == Verdict::valid_on_grid);

    // undistorted base model is not: density tends to -alpha(alpha+1-lambda) < 0 at the origin
    const PseudoWeakDistribution bad(identity_generator(), good.base1(), good.base2(),
                                     good.lambda());
    const ValidityReport rep_g = bad.validate(40);
    CHECK(rep_g.verdict == Verdict::invalid);
    CHECK(rep_g.rate_condition_pass);  // the rate window holds; the density scan fails
    CHECK(rep_g.density_min == Catch::Approx(-2.0 * (3.0 - 2.75)).margin(0.01));
    CHECK(rep_g.density_min_x < 0.01);
    CHECK(rep_g.density_min_y < 0.01);
}

TEST_CASE("validity report serializes to key=value text") {
    const std::string txt = mo_classic().validate(16).to_text();
    CHECK(txt.find("verdict=valid_on_grid") != std::string::npos);
    CHECK(txt.find("rate_condition=pass") != std::string::npos);
    CHECK(txt.find("atom=") != std::string::npos);
    CHECK(txt.find("density_min=") != std::string::npos);
}

TEST_CASE("weak copula: boundary conditions and the closed-form identity") {
    for (const PseudoWeakDistribution& d : {mo_classic(), distorted_exp(), pareto_power()}) {
        for (double u : {0.1, 0.4, 0.9}) {
            CHECK(d.copula(u, 1.0) == Catch::Approx(u).margin(1e-9));
            CHECK(d.copula(1.0, u) == Catch::Approx(u).margin(1e-9));
            CHECK(d.copula(u, 0.0) == Catch::Approx(0.0).margin(1e-14));
            CHECK(d.copula(0.0, u) == Catch::Approx(0.0).margin(1e-14));
        }
        CHECK(d.copula(1.0, 1.0) == Catch::Approx(1.0).margin(1e-14));
        // agreement with survival at marginal inverses
        const UnivariateSurvival f1 = d.distorted1(), f2 = d.distorted2();
        for (double u : {0.15, 0.5, 0.85})
            for (double v : {0.25, 0.6, 0.9})
                CHECK(d.copula(u, v) ==
                      Catch::Approx(d.survival(f1.inverse(u), f2.inverse(v))).margin(1e-9));
    }
}

TEST_CASE("weak copula: comonotone boundary case evaluates by hand") {
    // identity generator, exponential(1) marginals, lambda = 1: Cbar = min(u,v)
    const PseudoWeakDistribution d(identity_generator(), exponential_marginal(1.0),
                                   exponential_marginal(1.0), 1.0);
    CHECK(d.copula(0.3, 0.5) == Catch::Approx(0.3).margin(1e-12));
    CHECK(d.copula(0.5, 0.3) == Catch::Approx(0.3).margin(1e-12));
}

TEST_CASE("weak copula is 2-increasing on a 64x64 grid") {
    for (const PseudoWeakDistribution& d : {mo_classic(), distorted_exp()}) {
        const int n = 64;
        std::vector<std::vector<double>> C(n + 1, std::vector<double>(n + 1));
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                C[i][j] = d.copula(static_cast<double>(i) / n, static_cast<double>(j) / n);
        double min_rect = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                min_rect = std::min(min_rect, C[i + 1][j + 1] - C[i + 1][j] - C[i][j + 1] + C[i][j]);
        CHECK(min_rect >= -1e-9);
    }
}

TEST_CASE("MO-type distribution: named examples") {
    // identity gives the classical Marshall-Olkin survival
    const MOTypeDistribution mo(identity_generator(), 1.5, 2.5, 0.5);
    for (double x : {0.3, 1.0})
        for (double y : {0.2, 1.4})
            CHECK(mo.survival(x, y) ==
                  Catch::Approx(std::exp(-1.5 * x - 2.5 * y - 0.5 * std::max(x, y))).epsilon(1e-12));

    // lambda0 = 0 degenerates to the pseudo-strong (product) case
    const MOTypeDistribution s(exp_ratio_generator(1.0), 1.0, 2.0, 0.0);
    const PseudoStrongDistribution ps(exp_ratio_generator(1.0), 1.0, 2.0);
    for (double x : {0.4, 1.1})
        for (double y : {0.2, 0.8})
            CHECK(s.survival(x, y) == Catch::Approx(ps.survival(x, y)).margin(1e-14));

    // recip_exp(1), lambda1 = lambda2 = 0, lambda0 = 1 at (1,2): h(e^{-2}) = e^{-(e^2-1)}
    const MOTypeDistribution c(recip_exp_generator(1.0), 0.0, 0.0, 1.0);
    CHECK(c.survival(1.0, 2.0) == Catch::Approx(std::exp(-(std::exp(2.0) - 1.0))).epsilon(1e-12));

    CHECK_THROWS_AS(MOTypeDistribution(identity_generator(), 1.0, -0.5, 0.2), Error);
    CHECK_THROWS_AS(MOTypeDistribution(identity_generator(), 0.0, 1.0, 0.0), Error);
}

TEST_CASE("MO-type embeds as a pseudo-weak distribution") {
    const MOTypeDistribution mo(exp_ratio_generator(0.8), 1.2, 0.7, 0.6);
    const PseudoWeakDistribution w = mo.embed();
    CHECK(w.lambda() == Catch::Approx(2.5).margin(1e-14));
    CHECK(w.base1().params().at("alpha") == Catch::Approx(1.8).margin(1e-14));
    CHECK(w.base2().params().at("alpha") == Catch::Approx(1.3).margin(1e-14));
    const CounterRng rng(37);
    for (int rep = 0; rep < 500; ++rep) {
        const double x = 3.0 * rng.uniform(2 * rep), y = 3.0 * rng.uniform(2 * rep + 1);
        CHECK(mo.survival(x, y) == Catch::Approx(w.survival(x, y)).margin(1e-12));
    }
}

TEST_CASE("wedge and total masses by quadrature (identity-exponential)") {
    const PseudoWeakDistribution d = mo_classic();
    // integrate the density over each wedge in (y, z) coordinates
    auto wedge_mass = [&d](bool upper) {
        const UnivariateSurvival& G = upper ? d.base1() : d.base2();
        auto outer = [&](double y) {
            auto inner = [&](double w) {
                const double z = G.inverse(w);
                const double x1 = upper ? y + z : y;
                const double y1 = upper ? y : y + z;
                return d.density(x1, y1) / G.density(z);
            };
            // w = 1 maps to z = 0, i.e. onto the diagonal; stop just short of it
            return integrate(inner, 1e-9, 1.0 - 1e-9, Tolerance{1e-9, 1e-11, 300});
        };
        return integrate_to_inf(outer, 0.0, d.lambda(), Tolerance{1e-8, 1e-10, 300});
    };
    const double m_upper = wedge_mass(true), m_lower = wedge_mass(false);
    CHECK(m_upper == Catch::Approx(1.0 - 2.0 / 4.5).margin(1e-6));
    CHECK(m_lower == Catch::Approx(1.0 - 3.0 / 4.5).margin(1e-6));
    CHECK(m_upper + m_lower + d.atom_mass() == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("density falls back to numeric derivatives for opaque marginals") {
    // same law as mo_classic but the marginal hides its closed-form g'
    const UnivariateSurvival opaque("opaque_exp", [](double x) { return std::exp(-2.0 * x); },
                                    [](double x) { return 2.0 * std::exp(-2.0 * x); }, 2.0,
                                    [](double u) { return -0.5 * std::log(u); });
    REQUIRE_FALSE(opaque.has_closed_density_prime());
    const PseudoWeakDistribution d(exp_ratio_generator(0.7), opaque, exponential_marginal(3.0), 4.5);
    const PseudoWeakDistribution ref(exp_ratio_generator(0.7), exponential_marginal(2.0),
                                     exponential_marginal(3.0), 4.5);
    for (double x : {0.3, 1.1})
        for (double y : {0.1, 0.8}) {
            if (x == y) continue;
            CHECK(d.density(x, y) == Catch::Approx(ref.density(x, y)).epsilon(1e-5));
        }
    // the structural sampler flags the approximate conditional path
    const SampleBatch b = sample_structural(d, 2000, CounterRng(8));
    CHECK(b.approximate_conditionals);
    const SampleBatch br = sample_structural(ref, 2000, CounterRng(8));
    CHECK_FALSE(br.approximate_conditionals);
    std::size_t close = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (std::abs(b.pairs[i].x - br.pairs[i].x) < 1e-5 &&
            std::abs(b.pairs[i].y - br.pairs[i].y) < 1e-5)
            ++close;
    CHECK(close == b.size());  // same law, same seed: draws agree to fallback accuracy
}

TEST_CASE("construction rejects nonpositive lambda") {
    CHECK_THROWS_AS(PseudoWeakDistribution(identity_generator(), exponential_marginal(1.0),
                                           exponential_marginal(1.0), 0.0),
                    Error);
}
