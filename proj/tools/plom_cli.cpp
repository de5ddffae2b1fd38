// Command-line front end: validation, sampling, Kendall curves, Kendall tau,
// tail dependence and atom diagnostics for pseudo lack-of-memory models.
// Output is CSV / key=value text suitable for external plotting.
//
// Exit codes: 0 ok, 1 usage or config error, 2 invalid distribution,
// 3 numeric instability.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "plom/plom.hpp"

namespace {

void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw plom::Error(plom::ErrorCode::config, "cannot open output file " + tmp);
        f << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string fmt(double x, int prec = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    return buf;
}

plom::CounterRng rng_for(const plom::RunConfig& cfg) { return plom::CounterRng(cfg.seed); }

plom::SampleBatch draw(const plom::PseudoWeakDistribution& d, const plom::RunConfig& cfg) {
    const plom::CounterRng rng = rng_for(cfg);
    if (cfg.method == "conditional") return plom::sample_conditional(d, cfg.n, rng);
    return plom::sample_structural(d, cfg.n, rng);
}

int cmd_validate(const plom::RunConfig& cfg, bool undistorted) {
    plom::PseudoWeakDistribution d = plom::build_weak(cfg);
    const plom::PseudoWeakDistribution target =
        undistorted ? plom::PseudoWeakDistribution(plom::identity_generator(), d.base1(), d.base2(),
                                                   d.lambda())
                    : d;
    const plom::ValidityReport rep = target.validate(cfg.grid);
    write_atomic(cfg.out, rep.to_text());
    return rep.verdict == plom::Verdict::invalid ? 2 : 0;
}

int cmd_sample(const plom::RunConfig& cfg) {
    if (cfg.n < 1) throw plom::Error(plom::ErrorCode::config, "sample: n >= 1 required");
    plom::PseudoWeakDistribution d = plom::build_weak(cfg);
    const double p0 = d.atom_mass();
    if (p0 < -1e-12 || p0 > 1.0 + 1e-12) {
        std::cerr << "sample: invalid distribution (atom mass " << p0 << " outside [0,1])\n";
        return 2;
    }
    const plom::SampleBatch batch = draw(d, cfg);
    std::ostringstream os;
    os << "# seed=" << batch.seed << " method=" << cfg.method << " n=" << batch.size()
       << " rng=" << plom::CounterRng::algorithm << "\n";
    os << "x,y,tag\n";
    for (const auto& p : batch.pairs)
        os << fmt(p.x, 17) << "," << fmt(p.y, 17) << "," << plom::tag_name(p.tag) << "\n";
    write_atomic(cfg.out, os.str());
    return 0;
}

int cmd_kendall(const plom::RunConfig& cfg) {
    plom::PseudoWeakDistribution d = plom::build_weak(cfg);
    const std::vector<double> ts = plom::make_t_grid(cfg);
    std::vector<double> emp;
    const bool with_emp = cfg.empirical_n > 0;
    if (with_emp) {
        const plom::KendallCurve ec =
            plom::kendall_empirical(d, cfg.empirical_n, rng_for(cfg), ts);
        for (const auto& p : ec.grid) emp.push_back(p.second);
    }
    std::ostringstream os;
    bool failed = false;
    if (with_emp) os << "# seed=" << cfg.seed << " empirical_n=" << cfg.empirical_n << "\n";
    os << "t,K_analytic" << (with_emp ? ",K_empirical" : "") << "\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        os << fmt(ts[i]) << ",";
        try {
            os << fmt(plom::kendall_value(d, ts[i]));
        } catch (const plom::Error&) {
            failed = true;  // empty cell, nonzero exit at the end
        }
        if (with_emp) os << "," << fmt(emp[i]);
        os << "\n";
    }
    write_atomic(cfg.out, os.str());
    return failed ? 3 : 0;
}

int cmd_tau(const plom::RunConfig& cfg) {
    if (cfg.n < 2) throw plom::Error(plom::ErrorCode::config, "tau: n >= 2 required");
    plom::PseudoWeakDistribution d = plom::build_weak(cfg);
    std::vector<double> ts;
    for (int i = 0; i < 2001; ++i) ts.push_back(5e-4 + (1.0 - 5e-4) * i / 2000.0);
    const double tau_curve = plom::kendall_tau(plom::kendall_analytic(d, ts));
    const plom::SampleBatch batch = draw(d, cfg);
    const double tau_emp = plom::kendall_tau_empirical(batch);
    std::ostringstream os;
    os << "tau_curve=" << fmt(tau_curve) << "\ntau_empirical=" << fmt(tau_emp)
       << "\nn=" << batch.size() << "\nseed=" << cfg.seed << "\n";
    write_atomic(cfg.out, os.str());
    return 0;
}

int cmd_taildep(const plom::RunConfig& cfg) {
    plom::PseudoWeakDistribution d = plom::build_weak(cfg);
    std::ostringstream os;
    int rc = 0;
    const bool identical = d.base1().label() == d.base2().label() &&
                           d.base1().params() == d.base2().params();
    if (identical) {
        try {
            const plom::TailDep base = plom::taildep_base(d);
            const plom::TailDep td = plom::taildep_distorted(base, d.generator());
            os << "lower=" << fmt(td.lower) << "\nupper=" << fmt(td.upper)
               << "\nmethod=transfer_rule\n";
        } catch (const plom::Error& e) {
            os << "transfer=unstable\n";
            std::cerr << "taildep: " << e.what() << "\n";
            rc = 3;
        }
    }
    for (const auto side : {plom::TailSide::lower, plom::TailSide::upper}) {
        const char* name = side == plom::TailSide::lower ? "lower_numeric" : "upper_numeric";
        try {
            const plom::NumericLimit lim = plom::taildep_numeric(
                [&d](double u, double v) { return d.copula(u, v); }, side);
            os << name << "=" << fmt(lim.estimate) << "\n"
               << name << "_delta=" << fmt(lim.last_delta) << "\n";
        } catch (const plom::Error& e) {
            os << name << "=unstable\n";
            std::cerr << "taildep: " << e.what() << "\n";
            rc = 3;
        }
    }
    write_atomic(cfg.out, os.str());
    return rc;
}

int cmd_atom(const plom::RunConfig& cfg) {
    plom::PseudoWeakDistribution d = plom::build_weak(cfg);
    std::ostringstream os;
    os << "atom=" << fmt(d.atom_mass()) << "\n";
    for (double t : cfg.atom_ts)
        os << "atom_tail[" << fmt(t, 6) << "]=" << fmt(d.atom_tail(t)) << "\n";
    write_atomic(cfg.out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo lack-of-memory bivariate distributions toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_flag, method_flag;
    long long seed_flag = -1, n_flag = -1, grid_flag = -1, empirical_flag = -1;
    bool undistorted = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed_flag, "RNG seed (overrides config)");
        sub->add_option("--out", out_flag, "output path (default stdout)");
        sub->add_option("--n", n_flag, "sample size (overrides config)");
        sub->add_option("--grid", grid_flag, "validation grid size (overrides config)");
    };

    CLI::App* validate = app.add_subcommand("validate", "check the validity conditions");
    add_common(validate);
    validate->add_flag("--undistorted", undistorted,
                       "validate the undistorted base model instead of the distorted one");
    CLI::App* sample = app.add_subcommand("sample", "draw samples, CSV x,y,tag");
    add_common(sample);
    sample->add_option("--method", method_flag, "structural | conditional");
    CLI::App* kendall = app.add_subcommand("kendall", "Kendall distribution function, CSV");
    add_common(kendall);
    kendall->add_option("--empirical", empirical_flag, "append an empirical column from n samples");
    CLI::App* tau = app.add_subcommand("tau", "Kendall tau (curve and concordance estimates)");
    add_common(tau);
    CLI::App* taildep = app.add_subcommand("taildep", "tail-dependence coefficients");
    add_common(taildep);
    CLI::App* atom = app.add_subcommand("atom", "diagonal atom mass and tail");
    add_common(atom);

    CLI11_PARSE(app, argc, argv);

    try {
        plom::RunConfig cfg;
        if (!config_path.empty()) cfg = plom::parse_config_file(config_path);
        if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
        if (n_flag >= 0) cfg.n = static_cast<std::size_t>(n_flag);
        if (grid_flag >= 0) cfg.grid = static_cast<int>(grid_flag);
        if (empirical_flag >= 0) cfg.empirical_n = static_cast<std::size_t>(empirical_flag);
        if (!out_flag.empty()) cfg.out = out_flag;
        if (!method_flag.empty()) {
            if (method_flag != "structural" && method_flag != "conditional")
                throw plom::Error(plom::ErrorCode::config, "--method must be structural or conditional");
            cfg.method = method_flag;
        }

        if (validate->parsed()) return cmd_validate(cfg, undistorted);
        if (sample->parsed()) return cmd_sample(cfg);
        if (kendall->parsed()) return cmd_kendall(cfg);
        if (tau->parsed()) return cmd_tau(cfg);
        if (taildep->parsed()) return cmd_taildep(cfg);
        if (atom->parsed()) return cmd_atom(cfg);
        return 1;
    } catch (const plom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case plom::ErrorCode::unstable:
            case plom::ErrorCode::non_convergence:
            case plom::ErrorCode::quadrature:
            case plom::ErrorCode::no_regular_variation:
                return 3;
            case plom::ErrorCode::config:
                return 1;
            default:
                return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
