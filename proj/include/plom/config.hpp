#pragma once

// Plain-text key=value run configuration shared by the CLI and tests: one
// pair per line, '#' comments, later duplicates override earlier ones,
// unknown keys are errors.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "plom/core.hpp"

namespace plom {

struct RunConfig {
    std::string generator = "identity";
    std::map<std::string, double> gen_params;  // theta, beta, gamma, alpha
    std::string marginal1, marginal2;
    std::map<std::string, double> m1_params, m2_params;  // alpha, xi, beta, mu
    double lambda = 0.0;
    bool marginals_are_distorted = false;

    std::uint64_t seed = 1;
    std::size_t n = 10000;
    int grid = 48;
    std::string method = "structural";
    std::string out;
    double t_lo = 0.005, t_hi = 1.0;
    int t_count = 200;
    std::size_t empirical_n = 0;  // kendall: append an empirical column when > 0
    std::vector<double> atom_ts = {0.0, 0.5, 1.0};
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw Error(ErrorCode::config, "config: key '" + key + "' needs a numeric value, got '" + v + "'");
    }
}

inline std::vector<double> to_real_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_real(key, trim(item)));
    if (out.empty()) throw Error(ErrorCode::config, "config: key '" + key + "' needs values");
    return out;
}

}  // namespace detail

inline void apply_config_pair(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::to_real;
    static const std::set<std::string> gen_keys = {"theta", "beta", "gamma", "alpha"};
    static const std::set<std::string> m_keys = {"alpha", "xi", "beta", "mu"};

    if (key == "generator") { cfg.generator = value; return; }
    if (gen_keys.count(key)) { cfg.gen_params[key] = to_real(key, value); return; }
    if (key == "marginal1") { cfg.marginal1 = value; return; }
    if (key == "marginal2") { cfg.marginal2 = value; return; }
    if (key.size() > 1 && (key.back() == '1' || key.back() == '2')) {
        const std::string base = key.substr(0, key.size() - 1);
        if (m_keys.count(base)) {
            (key.back() == '1' ? cfg.m1_params : cfg.m2_params)[base] = to_real(key, value);
            return;
        }
    }
    if (key == "lambda") { cfg.lambda = to_real(key, value); return; }
    if (key == "marginals_are") {
        if (value == "base") cfg.marginals_are_distorted = false;
        else if (value == "distorted") cfg.marginals_are_distorted = true;
        else throw Error(ErrorCode::config, "config: marginals_are must be 'base' or 'distorted'");
        return;
    }
    if (key == "seed") { cfg.seed = static_cast<std::uint64_t>(std::stoull(value)); return; }
    if (key == "n") {
        const double v = to_real(key, value);
        if (v < 0) throw Error(ErrorCode::config, "config: n must be >= 0");
        cfg.n = static_cast<std::size_t>(v);
        return;
    }
    if (key == "grid") { cfg.grid = static_cast<int>(to_real(key, value)); return; }
    if (key == "method") {
        if (value != "structural" && value != "conditional")
            throw Error(ErrorCode::config, "config: method must be 'structural' or 'conditional'");
        cfg.method = value;
        return;
    }
    if (key == "out") { cfg.out = value; return; }
    if (key == "t_grid") {  // lo:hi:count
        std::stringstream ss(value);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
            throw Error(ErrorCode::config, "config: t_grid must be lo:hi:count");
        cfg.t_lo = to_real(key, a);
        cfg.t_hi = to_real(key, b);
        cfg.t_count = static_cast<int>(to_real(key, c));
        if (!(cfg.t_lo > 0.0) || !(cfg.t_hi <= 1.0) || !(cfg.t_lo < cfg.t_hi) || cfg.t_count < 2)
            throw Error(ErrorCode::config, "config: t_grid needs 0 < lo < hi <= 1 and count >= 2");
        return;
    }
    if (key == "empirical") { cfg.empirical_n = static_cast<std::size_t>(to_real(key, value)); return; }
    if (key == "atom_ts") { cfg.atom_ts = detail::to_real_list(key, value); return; }
    throw Error(ErrorCode::config, "config: unknown key '" + key + "'");
}

inline RunConfig parse_config_text(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::config,
                        "config: line " + std::to_string(lineno) + " is not key=value");
        apply_config_pair(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config, "config: cannot open '" + path + "'");
    return parse_config_text(in);
}

inline double require_param(const std::map<std::string, double>& p, const std::string& name,
                            const std::string& what) {
    auto it = p.find(name);
    if (it == p.end())
        throw Error(ErrorCode::config, "config: " + what + " requires parameter '" + name + "'");
    return it->second;
}

inline Generator build_generator(const RunConfig& cfg) {
    const auto& p = cfg.gen_params;
    const std::string& g = cfg.generator;
    if (g == "identity") return identity_generator();
    if (g == "power") return power_generator(require_param(p, "alpha", g));
    if (g == "exp_ratio") return exp_ratio_generator(require_param(p, "theta", g));
    if (g == "power_exp_ratio")
        return power_exp_ratio_generator(require_param(p, "theta", g), require_param(p, "beta", g));
    if (g == "recip_exp") return recip_exp_generator(require_param(p, "gamma", g));
    if (g == "tan_complement")
        return tan_complement_generator(require_param(p, "theta", g), require_param(p, "beta", g));
    if (g == "exp_complement")
        return exp_complement_generator(require_param(p, "theta", g), require_param(p, "beta", g));
    throw Error(ErrorCode::config, "config: unknown generator '" + g + "'");
}

inline UnivariateSurvival build_marginal(const std::string& family,
                                         const std::map<std::string, double>& p,
                                         const Generator& gen) {
    if (family == "exponential") return exponential_marginal(require_param(p, "alpha", family));
    if (family == "pareto_ii") return pareto_ii_marginal(require_param(p, "alpha", family));
    if (family == "gompertz_logistic")
        return gompertz_logistic_marginal(require_param(p, "xi", family),
                                          require_param(p, "beta", family));
    if (family == "pseudo_exponential")
        return pseudo_exponential_marginal(gen, require_param(p, "mu", family));
    throw Error(ErrorCode::config, "config: unknown marginal '" + family + "'");
}

/// Assemble the pseudo-weak model named by a config.  With
/// `marginals_are = distorted` the listed marginals are the Fbar_i and the
/// base pair is recovered as h^{-1}(Fbar_i).
inline PseudoWeakDistribution build_weak(const RunConfig& cfg) {
    if (cfg.marginal1.empty() || cfg.marginal2.empty())
        throw Error(ErrorCode::config, "config: marginal1 and marginal2 are required");
    if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::config, "config: lambda > 0 is required");
    Generator gen = build_generator(cfg);
    UnivariateSurvival m1 = build_marginal(cfg.marginal1, cfg.m1_params, gen);
    UnivariateSurvival m2 = build_marginal(cfg.marginal2, cfg.m2_params, gen);
    if (cfg.marginals_are_distorted)
        return PseudoWeakDistribution::from_distorted(gen, m1, m2, cfg.lambda);
    return PseudoWeakDistribution(gen, std::move(m1), std::move(m2), cfg.lambda);
}

inline std::vector<double> make_t_grid(const RunConfig& cfg) {
    std::vector<double> t;
    t.reserve(cfg.t_count);
    for (int i = 0; i < cfg.t_count; ++i)
        t.push_back(cfg.t_lo + (cfg.t_hi - cfg.t_lo) * i / (cfg.t_count - 1.0));
    return t;
}

}  // namespace plom
