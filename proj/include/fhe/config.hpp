#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fhe/error.hpp"
#include "fhe/format.hpp"
#include "fhe/grid.hpp"
#include "fhe/hardy_constant.hpp"
#include "fhe/weights.hpp"

namespace fhe {

/**
 * Run configuration: flat "key = value" lines grouped under [section]
 * headers. '#' and ';' start comments. Unknown sections or keys are errors.
 *
 *   [problem]  n, alpha, p, mu | mu_fraction (mu = mu_fraction * C_{n,alpha,p})
 *   [domain]   shape = interval | box; interval: a, b, m; box: center = cx,cy,
 *              half_widths = hx,hy, m = mx,my; collar; r_ext (collar >= r_ext)
 *   [weight]   kind = const | example | expression; value (const);
 *              name = W1..W4 (example); expr, v1, v2 (expression); whole_space
 *   [solver]   seed (required), tol, max_iter, trials, k_max, mu_limit, allow_inadmissible
 *   [hardy]    n, alpha, p (comma lists forming a lattice), tol
 *   [scaling]  direction = origin | infinity, base, steps (r_k = base^k), weight_expr
 *   [verify]   growth_ratio, picone_pairs, hardy_trials
 */
struct RunConfig {
    // [problem]
    HardyParams problem{1, 0.4, 2.0};
    std::optional<double> mu;
    std::optional<double> mu_fraction;
    // [domain]
    std::string shape = "interval";
    double a = -1.0, b = 1.0;
    std::array<double, 2> center{0.0, 0.0}, half_widths{1.0, 1.0};
    std::array<std::size_t, 2> m{64, 64};
    double collar = 1.0;
    // [weight]
    std::string weight_kind = "const";
    double weight_value = 1.0;
    std::string weight_name = "W1";
    std::string weight_expr, weight_v1, weight_v2;
    bool whole_space = false;  // admissibility tail probe treats Omega as R^n
    // [solver]
    std::optional<std::uint64_t> seed;
    double tol = 1e-9;
    int max_iter = 50000;
    std::size_t trials = 4;
    std::size_t k_max = 1;
    double mu_limit = 0.95;
    bool allow_inadmissible = false;
    // [hardy]
    std::vector<int> hardy_n{1};
    std::vector<double> hardy_alpha{0.25};
    std::vector<double> hardy_p{2.0};
    double hardy_tol = 1e-9;
    // [scaling]
    std::string scaling_direction = "origin";
    double scaling_base = 0.5;
    int scaling_steps = 8;
    std::string scaling_weight_expr;  // empty: use [weight]
    // [verify]
    double growth_ratio = 5.0;
    std::size_t picone_pairs = 200;
    std::size_t hardy_trials = 200;

    void validate() const {
        problem.validate();
        if (!seed) throw ValidationError("config: [solver] seed is required");
        if (mu && mu_fraction) throw ValidationError("config: give [problem] mu or mu_fraction, not both");
        if (mu && *mu < 0.0) throw ValidationError("config: mu must be >= 0");
        if (mu_fraction && (*mu_fraction < 0.0 || *mu_fraction >= 1.0))
            throw ValidationError("config: mu_fraction must lie in [0, 1)");
        if (shape != "interval" && shape != "box") throw ValidationError("config: domain shape must be interval or box");
        if (shape == "interval" && problem.n != 1) throw ValidationError("config: interval domains need n = 1");
        if (shape == "box" && problem.n != 2) throw ValidationError("config: box domains need n = 2");
        if (weight_kind != "const" && weight_kind != "example" && weight_kind != "expression")
            throw ValidationError("config: weight kind must be const, example or expression");
        if (weight_kind == "expression" && weight_expr.empty()) throw ValidationError("config: weight expr missing");
        if (scaling_direction != "origin" && scaling_direction != "infinity")
            throw ValidationError("config: scaling direction must be origin or infinity");
        if (tol <= 0.0 || max_iter < 1 || trials < 1 || k_max < 1) throw ValidationError("config: bad solver settings");
    }

    /// mu resolved against C_{n,alpha,p} (mu_fraction) or taken as given; 0 by default.
    double resolved_mu() const {
        if (mu) return *mu;
        if (mu_fraction && *mu_fraction > 0.0) return *mu_fraction * hardy_constant(problem, 1e-10).value;
        return 0.0;
    }

    Grid make_grid() const {
        if (shape == "interval") return build_interval_grid(a, b, m[0], collar);
        return build_box_grid(center, half_widths, m, collar);
    }

    Weight make_weight() const {
        if (weight_kind == "const") return Weight::constant(weight_value);
        if (weight_kind == "example") return example_weight(weight_name, problem);
        std::optional<std::string> v1, v2;
        if (!weight_v1.empty() || !weight_v2.empty()) {
            v1 = weight_v1;
            v2 = weight_v2;
        }
        return Weight::from_expression(weight_expr, problem, v1, v2);
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config: expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& is) {
    using detail::split_list;
    RunConfig c;
    std::string line, section;
    int lineno = 0;
    bool have_m_box = false;
    while (std::getline(is, line)) {
        ++lineno;
        // Comments start at '#' or ';' (expressions never use either).
        if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line.erase(pos);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto where = [&] { return "config line " + std::to_string(lineno) + ": "; };
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where() + "malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            static const std::vector<std::string> known = {"problem", "domain", "weight", "solver",
                                                           "hardy",   "scaling", "verify"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ValidationError(where() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where() + "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (section.empty()) throw ValidationError(where() + "key outside any section");
        try {
            bool ok = true;
            if (section == "problem") {
                if (key == "n") c.problem.n = static_cast<int>(parse_int(val));
                else if (key == "alpha") c.problem.alpha = parse_double(val);
                else if (key == "p") c.problem.p = parse_double(val);
                else if (key == "mu") c.mu = parse_double(val);
                else if (key == "mu_fraction") c.mu_fraction = parse_double(val);
                else ok = false;
            } else if (section == "domain") {
                if (key == "shape") c.shape = val;
                else if (key == "a") c.a = parse_double(val);
                else if (key == "b") c.b = parse_double(val);
                else if (key == "center" || key == "half_widths") {
                    auto parts = split_list(val);
                    if (parts.size() != 2) throw ValidationError("expected two comma-separated values");
                    auto& dst = key == "center" ? c.center : c.half_widths;
                    dst = {parse_double(parts[0]), parse_double(parts[1])};
                } else if (key == "m") {
                    auto parts = split_list(val);
                    if (parts.size() == 1) {
                        const auto v = parse_int(parts[0]);
                        if (v < 2) throw ValidationError("m must be >= 2");
                        c.m = {static_cast<std::size_t>(v), static_cast<std::size_t>(v)};
                    } else if (parts.size() == 2) {
                        const auto v0 = parse_int(parts[0]), v1 = parse_int(parts[1]);
                        if (v0 < 2 || v1 < 2) throw ValidationError("m must be >= 2");
                        c.m = {static_cast<std::size_t>(v0), static_cast<std::size_t>(v1)};
                        have_m_box = true;
                    } else {
                        throw ValidationError("m takes one or two values");
                    }
                } else if (key == "collar") c.collar = parse_double(val);
                else if (key == "r_ext") c.collar = std::max(c.collar, parse_double(val));
                else ok = false;
            } else if (section == "weight") {
                if (key == "kind") c.weight_kind = val;
                else if (key == "value") c.weight_value = parse_double(val);
                else if (key == "name") c.weight_name = val;
                else if (key == "expr") c.weight_expr = val;
                else if (key == "v1") c.weight_v1 = val;
                else if (key == "v2") c.weight_v2 = val;
                else if (key == "whole_space") c.whole_space = detail::parse_bool(val);
                else ok = false;
            } else if (section == "solver") {
                if (key == "seed") {
                    const auto v = parse_int(val);
                    if (v < 0) throw ValidationError("seed must be >= 0");
                    c.seed = static_cast<std::uint64_t>(v);
                } else if (key == "tol") c.tol = parse_double(val);
                else if (key == "max_iter") c.max_iter = static_cast<int>(parse_int(val));
                else if (key == "trials") c.trials = static_cast<std::size_t>(std::max<long long>(0, parse_int(val)));
                else if (key == "k_max") c.k_max = static_cast<std::size_t>(std::max<long long>(0, parse_int(val)));
                else if (key == "mu_limit") c.mu_limit = parse_double(val);
                else if (key == "allow_inadmissible") c.allow_inadmissible = detail::parse_bool(val);
                else ok = false;
            } else if (section == "hardy") {
                if (key == "n") {
                    c.hardy_n.clear();
                    for (auto& s : split_list(val)) c.hardy_n.push_back(static_cast<int>(parse_int(s)));
                } else if (key == "alpha") {
                    c.hardy_alpha.clear();
                    for (auto& s : split_list(val)) c.hardy_alpha.push_back(parse_double(s));
                } else if (key == "p") {
                    c.hardy_p.clear();
                    for (auto& s : split_list(val)) c.hardy_p.push_back(parse_double(s));
                } else if (key == "tol") c.hardy_tol = parse_double(val);
                else ok = false;
            } else if (section == "scaling") {
                if (key == "direction") c.scaling_direction = val;
                else if (key == "base") c.scaling_base = parse_double(val);
                else if (key == "steps") c.scaling_steps = static_cast<int>(parse_int(val));
                else if (key == "weight_expr") c.scaling_weight_expr = val;
                else ok = false;
            } else if (section == "verify") {
                if (key == "growth_ratio") c.growth_ratio = parse_double(val);
                else if (key == "picone_pairs") c.picone_pairs = static_cast<std::size_t>(std::max<long long>(1, parse_int(val)));
                else if (key == "hardy_trials") c.hardy_trials = static_cast<std::size_t>(std::max<long long>(1, parse_int(val)));
                else ok = false;
            }
            if (!ok) throw ValidationError("unknown key '" + key + "' in [" + section + "]");
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            throw ValidationError(where() + msg);
        }
    }
    if (c.shape == "interval" && have_m_box) throw ValidationError("config: interval domains take a single m");
    return c;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace fhe
