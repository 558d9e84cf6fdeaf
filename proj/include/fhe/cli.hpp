#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fhe/config.hpp"
#include "fhe/eigensolver.hpp"
#include "fhe/error.hpp"
#include "fhe/format.hpp"
#include "fhe/hardy_constant.hpp"
#include "fhe/nonlocal_form.hpp"
#include "fhe/weights.hpp"

namespace fhe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConvergence = 2;
inline constexpr int kExitVerification = 3;

/// Where a command writes. An empty out_dir sends the primary table to `out`.
struct CommandContext {
    std::string out_dir;
    bool quiet = false;
    std::ostream* out = &std::cout;
    std::ostream* err = &std::cerr;
};

namespace detail {

inline std::ofstream open_output(const CommandContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.out_dir);
    const auto path = std::filesystem::path(ctx.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    return f;
}

// Writes text to out_dir/name, or to ctx.out when no directory is configured.
inline void emit(const CommandContext& ctx, const std::string& name, const std::string& text) {
    if (ctx.out_dir.empty()) {
        *ctx.out << text;
        return;
    }
    auto f = open_output(ctx, name);
    f << text;
}

inline std::ostream* warn_of(const CommandContext& ctx) { return ctx.quiet ? nullptr : ctx.err; }

inline SolverOptions solver_options(const RunConfig& c, std::ostream* warn) {
    SolverOptions o;
    o.seed = *c.seed;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.mu_fraction_limit = c.mu_limit;
    o.allow_inadmissible = c.allow_inadmissible;
    o.hardy_trials = c.hardy_trials;
    o.warn_stream = warn;
    return o;
}

inline FormOptions form_options(std::ostream* warn) {
    FormOptions f;
    f.warn_stream = warn;
    return f;
}

inline std::string node_values_csv(const Grid& g, const FunctionVec& v) {
    std::ostringstream os;
    os << (g.dimension() == 1 ? "index,x,value\n" : "index,x,y,value\n");
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        os << k;
        for (double c : g.interior_node(k)) os << ',' << format_double(c);
        os << ',' << format_double(v[static_cast<Eigen::Index>(k)]) << '\n';
    }
    return os.str();
}

// Smooth bump prod sin^2(pi t_a) over the domain box (t_a in [0, 1]).
inline FunctionVec box_bump(const Grid& g) {
    FunctionVec u(static_cast<Eigen::Index>(g.interior_count()));
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        auto x = g.interior_node(k);
        double v = 1.0;
        for (int a = 0; a < g.dimension(); ++a) {
            const double t = (x[static_cast<std::size_t>(a)] - g.domain_lo(a)) / (g.domain_hi(a) - g.domain_lo(a));
            const double s = std::sin(std::numbers::pi * t);
            v *= s * s;
        }
        u[static_cast<Eigen::Index>(k)] = v;
    }
    return u;
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// CSV lattice n,alpha,p,C,err,status over the configured [hardy] lists.
inline int cmd_hardy_constant(const RunConfig& c, const CommandContext& ctx) {
    std::ostringstream os;
    os << "n,alpha,p,C,err,status\n";
    for (int n : c.hardy_n)
        for (double a : c.hardy_alpha)
            for (double p : c.hardy_p) {
                HardyParams hp{n, a, p};
                os << n << ',' << format_double(a) << ',' << format_double(p) << ',';
                if (hp.is_degenerate()) {
                    os << ",,degenerate\n";
                    if (!ctx.quiet)
                        *ctx.err << "warning: skipping degenerate triple n=" << n << " alpha=" << format_double(a)
                                 << " p=" << format_double(p) << " (p = n/alpha)\n";
                    continue;
                }
                hp.validate();
                const auto r = hardy_constant(hp, c.hardy_tol);
                os << format_double(r.value) << ',' << format_double(r.error) << ",ok\n";
            }
    detail::emit(ctx, "hardy_constant.csv", os.str());
    return kExitOk;
}

/// lambda_1 by descent; for p = 2 and k_max > 1 the (P_k) sequence as well.
inline int cmd_solve(const RunConfig& c, const CommandContext& ctx) {
    c.validate();
    const Grid g = c.make_grid();
    const Weight V = c.make_weight();
    const auto form = NonlocalForm::assemble(g, c.problem, c.resolved_mu(), detail::form_options(detail::warn_of(ctx)));
    const auto opt = detail::solver_options(c, detail::warn_of(ctx));
    const EigenPair ep = solve_lambda1(form, V, opt);

    std::ostringstream tab;
    tab << "k,lambda,constraint_residual,stationarity_residual,iterations,converged,sign_change,method\n";
    auto row = [&](std::size_t k, const EigenPair& e, const std::string& method) {
        tab << k << ',' << format_double(e.lambda) << ',' << format_double(e.constraint_residual) << ','
            << format_double(e.stationarity_residual) << ',' << e.iterations << ',' << (e.converged ? 1 : 0) << ','
            << (changes_sign(e.phi) ? 1 : 0) << ',' << method << '\n';
    };
    // For p != 2 only lambda_1 is an eigenvalue in the variational sense.
    row(1, ep, "descent");
    std::vector<std::pair<std::size_t, FunctionVec>> files{{1, ep.phi}};
    if (c.problem.p == 2.0 && c.k_max > 1) {
        const auto rep = solve_sequence_p2(form, V, c.k_max);
        for (std::size_t k = 1; k < rep.pairs.size(); ++k) {
            row(k + 1, rep.pairs[k], "pencil");
            files.emplace_back(k + 1, rep.pairs[k].phi);
        }
        if (rep.truncated && !ctx.quiet)
            *ctx.err << "warning: only " << rep.available << " positive eigenvalues available (k_max = " << c.k_max << ")\n";
    }
    const std::string out_dir = ctx.out_dir.empty() ? std::string("fhe_out") : ctx.out_dir;
    CommandContext fctx = ctx;
    fctx.out_dir = out_dir;
    detail::emit(fctx, "lambda.csv", tab.str());
    for (const auto& [k, phi] : files) detail::emit(fctx, "phi_" + std::to_string(k) + ".csv", detail::node_values_csv(g, phi));
    if (!ctx.quiet) {
        *ctx.out << "lambda_1 = " << format_double(ep.lambda) << " (iterations " << ep.iterations
                 << ", stationarity " << format_double(ep.stationarity_residual) << ")\n";
        *ctx.out << "wrote " << files.size() << " eigenfunction file(s) to " << out_dir << '\n';
    }
    return kExitOk;
}

/// Admissibility proxies for the configured weight. Exit 0 iff admissible.
inline int cmd_check_weight(const RunConfig& c, const CommandContext& ctx) {
    c.validate();
    const Grid g = c.make_grid();
    const Weight V = c.make_weight();
    SamplingPlan plan;
    plan.whole_space = c.whole_space;
    const ApReport r = check_Ap(V, c.problem, g, plan);
    std::ostringstream os;
    os << "weight=" << V.name() << '\n';
    os << "verdict=" << to_string(r.verdict) << '\n';
    os << "positive_part_nonzero=" << (r.positive_part_nonzero ? 1 : 0) << '\n';
    os << "v1_integrable=" << (r.v1_integrable ? 1 : 0) << " v1_norm_coarse=" << format_double(r.v1_norm_coarse)
       << " v1_norm_fine=" << format_double(r.v1_norm_fine) << '\n';
    os << "v2_local=" << to_string(r.local_status) << '\n';
    os << "v2_tail=" << to_string(r.tail_status) << (r.tail_vacuous ? " (bounded domain, vacuous)" : "") << '\n';
    os << "detail=" << r.detail << '\n';
    std::ostringstream seq;
    seq << "kind,probe,k,value\n";
    for (const auto* set : {&r.local_sequences, &r.tail_sequences}) {
        const char* kind = set == &r.local_sequences ? "local" : "tail";
        for (const auto& s : *set)
            for (std::size_t k = 0; k < s.values.size(); ++k)
                seq << kind << ",\"" << s.probe << "\"," << k << ',' << format_double(s.values[k]) << '\n';
    }
    detail::emit(ctx, "check_weight.txt", os.str());
    if (!ctx.out_dir.empty()) {
        detail::emit(ctx, "check_weight_sequences.csv", seq.str());
        if (!ctx.quiet) *ctx.out << os.str();
    }
    return r.verdict == ApVerdict::Admissible ? kExitOk : kExitVerification;
}

/// Rayleigh quotient of u_r = u0(./r) for r = base^k, k = 1..steps.
inline int cmd_scaling_test(const RunConfig& c, const CommandContext& ctx) {
    c.validate();
    const Grid g = c.make_grid();
    const Weight V = c.scaling_weight_expr.empty()
                         ? c.make_weight()
                         : Weight::from_expression(c.scaling_weight_expr, c.problem);
    const auto form = NonlocalForm::assemble(g, c.problem, c.resolved_mu(), detail::form_options(detail::warn_of(ctx)));
    FunctionVec u0 = detail::box_bump(g);
    const auto dir = c.scaling_direction == "origin" ? ScalingDirection::ToOrigin : ScalingDirection::ToInfinity;
    if (dir == ScalingDirection::ToInfinity) {
        const double rad = 2.0 * g.max_cell_diameter();
        for (std::size_t k = 0; k < g.interior_count(); ++k)
            if (Grid::norm(g.interior_node(k)) <= rad) u0[static_cast<Eigen::Index>(k)] = 0.0;
    }
    std::vector<double> rs;
    for (int k = 1; k <= c.scaling_steps; ++k) rs.push_back(std::pow(c.scaling_base, k));
    const auto t = scaling_collapse_test(form, V, u0, rs, dir, detail::form_options(detail::warn_of(ctx)));
    std::ostringstream os;
    os << "r,energy,psi,quotient\n";
    for (const auto& r : t.rows)
        os << format_double(r.r) << ',' << format_double(r.energy) << ',' << format_double(r.psi) << ','
           << format_double(r.quotient) << '\n';
    detail::emit(ctx, "scaling.csv", os.str());
    if (!ctx.quiet && !ctx.out_dir.empty())
        *ctx.out << "decreasing=" << (t.decreasing ? 1 : 0) << " last_over_base=" << format_double(t.last_over_base)
                 << " min_over_base=" << format_double(t.min_over_base) << '\n';
    return kExitOk;
}

/// One verification line.
struct CheckLine {
    std::string name;
    std::string status;  // PASS, FAIL or SKIP
    std::string detail;
};

/**
 * Full invariant suite on the configured problem. The report has one
 * line per check and a final overall line; it contains no timings, so two
 * runs with the same configuration and seed produce identical bytes.
 */
inline std::vector<CheckLine> run_verification(const RunConfig& c, std::ostream* warn) {
    c.validate();
    const Grid g = c.make_grid();
    const Weight V = c.make_weight();
    const HardyParams& hp = c.problem;
    const double mu = c.resolved_mu();
    const auto fopt = detail::form_options(warn);
    const auto form = NonlocalForm::assemble(g, hp, mu, fopt);
    const auto opt = detail::solver_options(c, warn);
    const auto N = static_cast<Eigen::Index>(form.size());
    const bool p2 = hp.p == 2.0;
    std::vector<CheckLine> lines;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        lines.push_back({name, pass ? "PASS" : "FAIL", detail});
    };
    auto skip = [&](const std::string& name, const std::string& why) { lines.push_back({name, "SKIP", why}); };
    auto fd = [](double v) { return format_double(v); };

    // Sharp constant.
    const auto hc = hardy_constant(hp, c.hardy_tol);
    add("hardy_constant", hc.value > 0.0 && hc.error <= c.hardy_tol, "C=" + fd(hc.value) + " err=" + fd(hc.error));

    // Discrete Hardy inequality over random smooth trials.
    {
        const auto est = discrete_hardy_ratio(form, c.hardy_trials, *c.seed);
        add("discrete_hardy", est.min_ratio > 0.0,
            "min_ratio=" + fd(est.min_ratio) + " ratio_over_C=" + fd(est.min_ratio / hc.value));
    }

    // Gradient against central differences, and the Euler identity.
    {
        auto rng = detail::make_rng(*c.seed, 1);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        double max_err = 0.0, max_euler = 0.0;
        const double h = 1e-5;
        for (int t = 0; t < 3; ++t) {
            FunctionVec u(N);
            for (Eigen::Index i = 0; i < N; ++i) u[i] = U(rng);
            const FunctionVec gr = form.gradient(u);
            const Eigen::Index stride = std::max<Eigen::Index>(1, N / 16);
            for (Eigen::Index i = 0; i < N; i += stride) {
                FunctionVec up = u, um = u;
                up[i] += h;
                um[i] -= h;
                const double fdv = (form.energy(up) - form.energy(um)) / (2.0 * h);
                max_err = std::max(max_err, std::abs(fdv - gr[i]));
            }
            const double J = form.energy(u);
            max_euler = std::max(max_euler, std::abs(gr.dot(u) - hp.p * J) / std::abs(hp.p * J));
        }
        add("gradient_fd", max_err <= 1e-5 && max_euler <= 1e-9, "max_abs_err=" + fd(max_err) + " euler_rel=" + fd(max_euler));
    }

    // Picone: L >= 0 on random pairs; aggregate vanishes exactly for u = k v.
    {
        auto rng = detail::make_rng(*c.seed, 2);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double min_L = INFINITY, min_agg_random = INFINITY;
        for (std::size_t t = 0; t < c.picone_pairs; ++t) {
            FunctionVec u(N), v(N);
            for (Eigen::Index i = 0; i < N; ++i) {
                u[i] = U(rng);
                v[i] = 0.1 + U(rng);
            }
            const auto r = picone_defect(u, v, form);
            min_L = std::min(min_L, r.min_entry);
            min_agg_random = std::min(min_agg_random, r.aggregate);
        }
        FunctionVec v(N);
        for (Eigen::Index i = 0; i < N; ++i) v[i] = 0.1 + U(rng);
        const double agg_eq = std::abs(picone_defect(3.0 * v, v, form).aggregate);
        add("picone_inequality", min_L >= -1e-12 && agg_eq <= 1e-10 && min_agg_random > 1e-10,
            "min_L=" + fd(min_L) + " aggregate_u_eq_3v=" + fd(agg_eq) + " min_aggregate_random=" + fd(min_agg_random));
    }

    // Brezis-Lieb defect decay.
    {
        auto rng = detail::make_rng(*c.seed, 3);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        FunctionVec f(N), gg(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            f[i] = U(rng);
            gg[i] = U(rng);
        }
        const auto r = brezis_lieb_check(form, f, gg, 100);
        const bool ok = std::abs(r.defects[99]) < std::abs(r.defects[9]);
        add("brezis_lieb", ok, "defect_k10=" + fd(r.defects[9]) + " defect_k100=" + fd(r.defects[99]));
    }

    // Zero extension from the right half: child energy equals parent energy.
    const double mid0 = 0.5 * (g.domain_lo(0) + g.domain_hi(0));
    const auto rel = restrict_grid(g, [mid0](Grid::Point x) { return x[0] > mid0; });
    {
        const auto fc = NonlocalForm::assemble(rel.child, hp, mu, fopt);
        auto rng = detail::make_rng(*c.seed, 4);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        FunctionVec uc(static_cast<Eigen::Index>(fc.size()));
        for (Eigen::Index i = 0; i < uc.size(); ++i) uc[i] = U(rng);
        const double Ec = fc.energy(uc), Ep = form.energy(rel.extend_by_zero(uc));
        const double relerr = std::abs(Ec - Ep) / std::abs(Ep);
        add("zero_extension", relerr <= 1e-12, "rel_diff=" + fd(relerr));
    }

    // Configured weight admissibility (only a clear failure fails the check).
    {
        SamplingPlan plan;
        plan.whole_space = c.whole_space;
        const auto r = check_Ap(V, hp, g, plan);
        add("weight_admissible", r.verdict != ApVerdict::Inadmissible, std::string("verdict=") + to_string(r.verdict));
    }

    // lambda_1 is attained by the descent.
    const EigenPair ep = solve_lambda1(form, V, opt);
    {
        const double J = form.energy(ep.phi);
        bool mono = true;
        SolverOptions oh = opt;
        oh.record_history = true;
        const auto eh = solve_lambda1(form, V, oh);
        for (std::size_t k = 1; k < eh.history.size(); ++k)
            if (eh.history[k] > eh.history[k - 1] * (1.0 + 1e-14)) mono = false;
        const double id = std::abs(ep.lambda - J) / std::abs(J);
        add("lambda1_attained", ep.converged && ep.constraint_residual <= 1e-10 && id <= 1e-10 && mono,
            "lambda1=" + fd(ep.lambda) + " constraint_residual=" + fd(ep.constraint_residual) +
                " stationarity=" + fd(ep.stationarity_residual) + " descent_monotone=" + (mono ? "1" : "0"));
    }

    if (p2) {
        const auto sp = solve_pencil_p2(form, V);
        const double relerr = std::abs(ep.lambda - sp.lambdas.at(0)) / sp.lambdas.at(0);
        add("pencil_equivalence", relerr <= 1e-8, "pencil_lambda1=" + fd(sp.lambdas.at(0)) + " rel_diff=" + fd(relerr));
    } else {
        skip("pencil_equivalence", "p != 2");
    }

    // Simplicity.
    {
        const auto s = verify_simplicity(form, V, std::max<std::size_t>(2, c.trials), opt);
        bool ok = s.passes(1e-6, 1e-6);
        std::string d = "trials=" + std::to_string(s.runs.size()) + " min_alignment=" + fd(s.min_alignment) +
                        " lambda_spread=" + fd(s.lambda_spread);
        if (s.picone_applicable) d += " max_picone=" + fd(s.max_picone);
        if (p2) {
            const auto mult = pencil_multiplicity(form, V);
            ok = ok && mult == 1;
            d += " pencil_multiplicity=" + std::to_string(mult);
        }
        add("lambda1_simple", ok, d);
    }

    // Sign properties and growth of the p = 2 sequence.
    if (p2) {
        const std::size_t k = std::max<std::size_t>(10, c.k_max);
        const auto rep = solve_sequence_p2(form, V, k);
        const auto sgn = verify_sign_properties(rep);
        const std::size_t upto = std::min<std::size_t>(5, rep.pairs.size());
        bool ok = sgn.phi1_one_signed && upto == 5;
        for (std::size_t j = 1; j < upto; ++j) ok = ok && sgn.changes[j];
        add("sign_properties", ok,
            std::string("phi1_one_signed=") + (sgn.phi1_one_signed ? "1" : "0") + " higher_change_sign=" +
                (sgn.higher_change_sign ? "1" : "0") + " checked=" + std::to_string(upto));
        const auto gr = lambda_growth_check(rep, c.growth_ratio);
        add("eigenvalue_growth", gr.pass && !rep.truncated,
            "k=" + std::to_string(rep.pairs.size()) + " ratio=" + fd(gr.ratio) + " threshold=" + fd(c.growth_ratio) +
                " nondecreasing=" + (gr.nondecreasing ? "1" : "0"));
    } else {
        add("sign_properties", is_one_signed(ep.phi), "phi1_one_signed only (p != 2)");
        skip("eigenvalue_growth", "p != 2");
    }

    // Weight monotonicity with a bump on the cells around the V+ centroid, and homogeneity.
    {
        std::vector<double> lo, hi;
        for (int a = 0; a < g.dimension(); ++a) {
            const double cen = 0.5 * (g.domain_lo(a) + g.domain_hi(a));
            lo.push_back(cen - 2.0 * g.spacing(a));
            hi.push_back(cen + 2.0 * g.spacing(a));
        }
        const Weight Vb = V + Weight::box_indicator(lo, hi, 1.0);
        const auto m = verify_weight_monotonicity(form, V, Vb, opt);
        const double l2 = solve_lambda1(form, V.scaled(2.0), opt).lambda;
        const double hom = std::abs(l2 - 0.5 * ep.lambda) / (0.5 * ep.lambda);
        add("weight_monotonicity", m.strict && hom <= 1e-10,
            "margin=" + fd(m.margin) + " homogeneity_rel=" + fd(hom));
    }

    // Domain monotonicity: the right half has the larger lambda_1.
    {
        const auto m = verify_domain_monotonicity(rel, V, hp, mu, opt, fopt);
        add("domain_monotonicity", m.strict,
            "lambda_sub=" + fd(m.lambda_small) + " lambda_full=" + fd(m.lambda_big) + " margin=" + fd(m.margin));
    }

    // lambda_1 strictly decreasing in mu.
    if (hp.s() < hp.n) {
        const double top = mu > 0.0 ? mu : 0.2 * hc.value;
        const auto m = verify_mu_monotonicity(form, V, {0.0, 0.5 * top, top}, opt);
        std::string d;
        for (std::size_t k = 0; k < m.mus.size(); ++k)
            d += (k ? " " : "") + std::string("lambda(mu=") + fd(m.mus[k]) + ")=" + fd(m.lambdas[k]);
        add("mu_monotonicity", m.strict, d);
    } else {
        skip("mu_monotonicity", "p*alpha >= n");
    }

    // Scaling collapse for |x|^{-p alpha - 1/2}; W1 as the negative control.
    {
        const FunctionVec u0 = detail::box_bump(g);
        std::vector<double> rs;
        for (int k = 1; k <= 8; ++k) rs.push_back(std::ldexp(1.0, -k));
        const double ex = -hp.s() - 0.5;
        const Weight Vs = Weight::from_function("|x|^(-p*alpha-0.5)", [ex](Grid::Point x) {
            return std::pow(Grid::norm(x), ex);
        });
        const auto t = scaling_collapse_test(form, Vs, u0, rs, ScalingDirection::ToOrigin, fopt);
        const auto w1 = scaling_collapse_test(form, example_weight("W1", hp), u0, rs, ScalingDirection::ToOrigin, fopt);
        add("scaling_collapse", t.decreasing && t.last_over_base <= 0.1 && w1.min_over_base >= 0.5,
            "inadmissible_last_over_base=" + fd(t.last_over_base) + " W1_min_over_base=" + fd(w1.min_over_base));
    }
    return lines;
}

inline std::string format_report(const std::vector<CheckLine>& lines) {
    std::ostringstream os;
    os << "# fhe verify report v1\n";
    std::size_t failed = 0;
    for (const auto& l : lines) {
        os << l.name << ' ' << l.status << ' ' << l.detail << '\n';
        if (l.status == "FAIL") ++failed;
    }
    os << "overall " << (failed ? "FAIL" : "PASS") << " failed=" << failed << '\n';
    return os.str();
}

inline int cmd_verify(const RunConfig& c, const CommandContext& ctx) {
    const auto lines = run_verification(c, detail::warn_of(ctx));
    const std::string rep = format_report(lines);
    detail::emit(ctx, "verify_report.txt", rep);
    if (!ctx.out_dir.empty() && !ctx.quiet) *ctx.out << rep;
    bool failed = false;
    for (const auto& l : lines)
        if (l.status == "FAIL") {
            failed = true;
            *ctx.err << "verification failed: " << l.name << '\n';
        }
    return failed ? kExitVerification : kExitOk;
}

/// Runs a subcommand and maps exceptions onto the exit-code contract.
inline int run_command(const std::string& name, const RunConfig& c, const CommandContext& ctx) {
    try {
        if (name == "hardy-constant") return cmd_hardy_constant(c, ctx);
        if (name == "solve") return cmd_solve(c, ctx);
        if (name == "verify") return cmd_verify(c, ctx);
        if (name == "check-weight") return cmd_check_weight(c, ctx);
        if (name == "scaling-test") return cmd_scaling_test(c, ctx);
        throw ValidationError("unknown command '" + name + "'");
    } catch (const ConvergenceError& e) {
        *ctx.err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const ValidationError& e) {
        *ctx.err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        *ctx.err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace fhe
