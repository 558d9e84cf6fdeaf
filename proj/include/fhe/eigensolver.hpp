#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhe/error.hpp"
#include "fhe/grid.hpp"
#include "fhe/nonlocal_form.hpp"
#include "fhe/parallel.hpp"
#include "fhe/weights.hpp"

namespace fhe {

struct SolverOptions {
    double tol = 1e-9;               // stationarity: ||dJ - lambda dPsi||_inf <= tol ||dJ||_inf
    int max_iter = 50000;
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;
    double perturbation = 0.1;       // relative amplitude of the random start perturbation
    bool check_admissibility = true;
    bool allow_inadmissible = false; // proceed (with a warning) when check_Ap says inadmissible
    double mu_fraction_limit = 0.95; // refuse mu >= limit * C_discrete
    std::size_t hardy_trials = 200;  // random trials for C_discrete when p != 2
    bool record_history = false;
    std::ostream* warn_stream = &std::cerr;
};

struct EigenPair {
    double lambda = NAN;
    FunctionVec phi;
    double constraint_residual = NAN;   // |Psi(phi) - 1|
    double stationarity_residual = NAN; // ||dJ - lambda dPsi||_inf / ||dJ||_inf
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;        // quotient after each accepted step
};

namespace detail {

inline void warn(const SolverOptions& o, const std::string& msg) {
    if (o.warn_stream) *o.warn_stream << "warning: " << msg << '\n';
}

// Sum w phi >= 0; if that sum is negligible, the first significant node is made positive.
inline void normalize_sign(const Grid& g, FunctionVec& phi) {
    double s = 0.0, a = 0.0;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        s += g.interior_weight(k) * phi[static_cast<Eigen::Index>(k)];
        a += g.interior_weight(k) * std::abs(phi[static_cast<Eigen::Index>(k)]);
    }
    if (std::abs(s) <= 1e-10 * a) {
        const double mx = phi.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            if (std::abs(phi[i]) > 1e-6 * mx) {
                s = phi[i];
                break;
            }
    }
    if (s < 0.0) phi = -phi;
}

inline Eigen::Index first_significant(const FunctionVec& phi) {
    const double mx = phi.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        if (std::abs(phi[i]) > 1e-6 * mx) return i;
    return phi.size();
}

inline FunctionVec signed_pow_vec(const FunctionVec& u, double p) {
    FunctionVec out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = signed_pow(u[i], p);
    return out;
}

// Positive bump at the V+ centroid plus seeded noise.
inline FunctionVec initial_guess(const NonlocalForm& form, const Eigen::VectorXd& wv, const SolverOptions& o, double amp) {
    const Grid& g = form.grid();
    const int n = g.dimension();
    std::array<double, 2> c{0.0, 0.0};
    double mass = 0.0;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        const double m = std::max(wv[static_cast<Eigen::Index>(k)], 0.0);
        auto x = g.interior_node(k);
        for (int a = 0; a < n; ++a) c[static_cast<std::size_t>(a)] += m * x[static_cast<std::size_t>(a)];
        mass += m;
    }
    for (int a = 0; a < n; ++a) c[static_cast<std::size_t>(a)] /= mass;
    double sigma = INFINITY;
    for (int a = 0; a < n; ++a) sigma = std::min(sigma, 0.25 * (g.domain_hi(a) - g.domain_lo(a)));
    std::seed_seq seq{static_cast<std::uint32_t>(o.seed & 0xffffffffu), static_cast<std::uint32_t>(o.seed >> 32),
                      static_cast<std::uint32_t>(o.trial & 0xffffffffu), static_cast<std::uint32_t>(o.trial >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> N01(0.0, 1.0);
    FunctionVec u(static_cast<Eigen::Index>(g.interior_count()));
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        auto x = g.interior_node(k);
        double d2 = 0.0;
        for (int a = 0; a < n; ++a) d2 += std::pow(x[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)], 2);
        u[static_cast<Eigen::Index>(k)] = std::exp(-0.5 * d2 / (sigma * sigma));
    }
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += amp * N01(rng);
    return u;
}

}  // namespace detail

/// Discrete Hardy constant used by the mu guard: exact for p = 2, a random-trial upper estimate otherwise.
inline double discrete_hardy_constant(const NonlocalForm& form, std::size_t trials = 200, std::uint64_t seed = 12345) {
    if (form.p() == 2.0) return discrete_hardy_constant_p2(form);
    return discrete_hardy_ratio(form, trials, seed).min_ratio;
}

/**
 * lambda_1 = inf { J(u) : Psi(u) = sum w V |u|^p = 1 } by projected gradient
 * descent on the Rayleigh quotient J/Psi.
 *
 * Direction: -P (dJ - lambda dPsi) with the diagonal preconditioner
 * P = 1 / (2p (row sum K + e)). Step: Barzilai-Borwein guess, then Armijo
 * backtracking on the quotient; trial points with Psi <= 1/2 are rejected.
 * Every accepted point is rescaled to Psi = 1.
 */
inline EigenPair solve_lambda1(const NonlocalForm& form, const Weight& V, const SolverOptions& opt = {}) {
    const double p = form.p();
    detail::require(p >= 2.0, "solve_lambda1: p must be >= 2");
    detail::require(form.params().s() < form.grid().dimension(), "solve_lambda1: requires p*alpha < n");
    const Eigen::VectorXd wv = form.mass(V);
    if (!(wv.maxCoeff() > 0.0)) throw InadmissibleWeightError("solve_lambda1: V+ vanishes on the grid");

    if (opt.check_admissibility) {
        const ApReport rep = check_Ap(V, form.params(), form.grid());
        if (rep.verdict == ApVerdict::Inadmissible) {
            if (!opt.allow_inadmissible)
                throw InadmissibleWeightError("solve_lambda1: weight '" + V.name() + "' is inadmissible: " + rep.detail);
            detail::warn(opt, "weight '" + V.name() + "' is inadmissible (" + rep.detail + "); proceeding on override");
        } else if (rep.verdict == ApVerdict::Inconclusive) {
            detail::warn(opt, "admissibility of weight '" + V.name() + "' is inconclusive (" + rep.detail + ")");
        }
    }
    if (form.mu() > 0.0) {
        const double cd = discrete_hardy_constant(form, opt.hardy_trials, opt.seed);
        if (form.mu() >= opt.mu_fraction_limit * cd)
            throw ValidationError("solve_lambda1: mu = " + format_double(form.mu()) + " is not below " +
                                  format_double(opt.mu_fraction_limit) + " * C_discrete = " +
                                  format_double(opt.mu_fraction_limit * cd));
    }

    const auto N = static_cast<Eigen::Index>(form.size());
    Eigen::VectorXd prec(N);
    for (Eigen::Index i = 0; i < N; ++i) prec[i] = 1.0 / (2.0 * p * (form.kernel().row(i).sum() + form.exterior()[i]));

    FunctionVec u;
    double psi = 0.0;
    double amp = opt.perturbation;
    for (int attempt = 0; attempt < 12; ++attempt, amp *= 0.5) {
        u = detail::initial_guess(form, wv, opt, amp);
        psi = form.psi(wv, u);
        if (psi > 0.0) break;
    }
    if (!(psi > 0.0)) throw ValidationError("solve_lambda1: could not find a starting point with Psi > 0");
    u /= std::pow(psi, 1.0 / p);

    EigenPair out;
    double lambda = form.energy(u);
    FunctionVec gJ = form.gradient(u);
    FunctionVec r = gJ - lambda * p * wv.cwiseProduct(detail::signed_pow_vec(u, p));
    FunctionVec u_prev, r_prev;
    double step = 0.0;
    int it = 0;
    bool stalled = false;
    for (; it < opt.max_iter; ++it) {
        const double gnorm = gJ.cwiseAbs().maxCoeff();
        const double stat = r.cwiseAbs().maxCoeff() / (gnorm > 0.0 ? gnorm : 1.0);
        out.stationarity_residual = stat;
        if (stat <= opt.tol) {
            out.converged = true;
            break;
        }
        const FunctionVec d = -prec.cwiseProduct(r);
        const double slope = r.dot(d);  // < 0
        if (it == 0 || u_prev.size() == 0) {
            step = 0.1 * u.cwiseAbs().maxCoeff() / d.cwiseAbs().maxCoeff();
        } else {
            const FunctionVec s = u - u_prev;
            const FunctionVec y = r - r_prev;
            const double sy = s.dot(y);
            const double ss = s.cwiseProduct(prec.cwiseInverse()).dot(s);
            step = (sy > 0.0 && std::isfinite(ss / sy)) ? ss / sy : 2.0 * step;
        }
        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt, step *= 0.5) {
            const FunctionVec du = step * d;
            double dpsi = 0.0;
            for (Eigen::Index i = 0; i < N; ++i) dpsi += wv[i] * detail::pow_increment(u[i], du[i], p);
            if (1.0 + dpsi <= 0.5) continue;
            const double dJ = form.energy_change(u, du);
            const double dQ = (dJ - lambda * dpsi) / (1.0 + dpsi);
            if (dQ <= 1e-4 * step * slope) {
                u_prev = u;
                r_prev = r;
                u += du;
                u /= std::pow(1.0 + dpsi, 1.0 / p);
                // Psi drifts by rounding only; renormalize against the full sum.
                u /= std::pow(form.psi(wv, u), 1.0 / p);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        lambda = form.energy(u);
        gJ = form.gradient(u);
        r = gJ - lambda * p * wv.cwiseProduct(detail::signed_pow_vec(u, p));
        if (opt.record_history) out.history.push_back(lambda);
    }
    if (!out.converged) {
        const double gnorm = gJ.cwiseAbs().maxCoeff();
        out.stationarity_residual = r.cwiseAbs().maxCoeff() / (gnorm > 0.0 ? gnorm : 1.0);
        out.converged = out.stationarity_residual <= opt.tol;
    }
    out.iterations = it;
    detail::normalize_sign(form.grid(), u);
    out.phi = u;
    out.lambda = form.energy(u);
    out.constraint_residual = std::abs(form.psi(wv, u) - 1.0);
    if (!out.converged)
        throw ConvergenceError("solve_lambda1: " + std::string(stalled ? "line search stalled" : "max_iter reached") +
                               " with stationarity residual " + format_double(out.stationarity_residual) + " after " +
                               std::to_string(it) + " iterations");
    return out;
}

/// Positive eigenvalues (ascending lambda = 1/nu) of the p = 2 pencil A phi = lambda B phi, B = diag(w V).
struct PencilSpectrum {
    std::vector<double> lambdas;
    std::vector<FunctionVec> phis;  // Psi(phi) = 1
};

namespace detail {

struct PencilFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::MatrixXd C;  // L^{-1} B L^{-T}
};

inline PencilFactor factor_pencil(const NonlocalForm& form, const Eigen::VectorXd& wv) {
    PencilFactor f;
    f.llt.compute(form.quadratic_matrix());
    if (f.llt.info() != Eigen::Success)
        throw ValidationError("pencil: energy matrix is not positive definite (mu too close to the discrete constant)");
    const auto L = f.llt.matrixL();
    const Eigen::MatrixXd T = L.solve(Eigen::MatrixXd(wv.asDiagonal()));
    Eigen::MatrixXd C = L.solve(T.transpose());
    f.C = 0.5 * (C + C.transpose());
    return f;
}

inline FunctionVec pencil_vector(const PencilFactor& f, const Eigen::VectorXd& y, double nu) {
    FunctionVec phi = f.llt.matrixU().solve(y);
    return phi / std::sqrt(nu);
}

}  // namespace detail

inline PencilSpectrum solve_pencil_p2(const NonlocalForm& form, const Weight& V) {
    detail::require(form.p() == 2.0, "solve_pencil_p2: p must be 2");
    const Eigen::VectorXd wv = form.mass(V);
    const auto f = detail::factor_pencil(form, wv);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.C);
    const auto& nu = es.eigenvalues();
    const double top = nu.cwiseAbs().maxCoeff();
    PencilSpectrum out;
    for (Eigen::Index k = nu.size() - 1; k >= 0; --k) {
        if (!(nu[k] > 1e-12 * top)) break;
        out.lambdas.push_back(1.0 / nu[k]);
        FunctionVec phi = detail::pencil_vector(f, es.eigenvectors().col(k), nu[k]);
        detail::normalize_sign(form.grid(), phi);
        out.phis.push_back(phi);
    }
    return out;
}

/// Number of pencil eigenvalues within rel_tol of the smallest positive one.
inline std::size_t pencil_multiplicity(const NonlocalForm& form, const Weight& V, double rel_tol = 1e-8) {
    const auto sp = solve_pencil_p2(form, V);
    detail::require(!sp.lambdas.empty(), "pencil_multiplicity: no positive eigenvalue");
    std::size_t m = 0;
    for (double l : sp.lambdas)
        if (std::abs(l - sp.lambdas[0]) <= rel_tol * sp.lambdas[0]) ++m;
    return m;
}

inline bool is_one_signed(const FunctionVec& phi, double rel = 1e-10) {
    const double mx = phi.cwiseAbs().maxCoeff();
    return phi.minCoeff() * phi.maxCoeff() >= -rel * mx * mx;
}

inline bool changes_sign(const FunctionVec& phi, double thr = 1e-10) {
    return phi.maxCoeff() > thr && phi.minCoeff() < -thr;
}

struct SpectrumReport {
    std::vector<EigenPair> pairs;     // ascending lambda
    std::vector<bool> sign_change;
    std::size_t requested = 0;
    std::size_t available = 0;        // positive pencil eigenvalues found
    bool truncated = false;           // requested > available
    std::size_t lambda1_multiplicity = 0;
    std::vector<double> pencil_lambdas;  // 1/nu from the deflated pencil, for cross-checks
};

/**
 * (P_k) for p = 2: successive minimization of J over Psi = 1 with
 * orthogonality to phi_1..phi_{k-1} in the energy inner product u^T A v.
 * In the Cholesky frame A = L L^T this becomes the top eigenvector of
 * P C P with C = L^{-1} B L^{-T} and P = I - Y Y^T projecting out the
 * frame vectors found so far.
 */
inline SpectrumReport solve_sequence_p2(const NonlocalForm& form, const Weight& V, std::size_t k_max) {
    detail::require(form.p() == 2.0, "solve_sequence_p2: p must be 2");
    detail::require(k_max >= 1, "solve_sequence_p2: k_max must be >= 1");
    const Eigen::VectorXd wv = form.mass(V);
    if (!(wv.maxCoeff() > 0.0)) throw InadmissibleWeightError("solve_sequence_p2: V+ vanishes on the grid");
    const auto f = detail::factor_pencil(form, wv);
    const auto N = f.C.rows();
    SpectrumReport rep;
    rep.requested = k_max;
    Eigen::MatrixXd Y(N, 0);
    double top = 0.0;
    for (std::size_t k = 0; k < k_max && static_cast<Eigen::Index>(k) < N; ++k) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(N, N) - Y * Y.transpose();
        Eigen::MatrixXd M = P * f.C * P;
        M = 0.5 * (M + M.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        const double nu = es.eigenvalues()[N - 1];
        if (k == 0) top = std::abs(nu);
        if (!(nu > 1e-12 * top)) break;
        Eigen::VectorXd y = es.eigenvectors().col(N - 1);
        y -= Y * (Y.transpose() * y);
        y.normalize();
        EigenPair ep;
        ep.phi = detail::pencil_vector(f, y, nu);
        detail::normalize_sign(form.grid(), ep.phi);
        ep.lambda = form.energy(ep.phi);
        ep.constraint_residual = std::abs(form.psi(wv, ep.phi) - 1.0);
        const FunctionVec gJ = form.gradient(ep.phi);
        const FunctionVec r = gJ - ep.lambda * 2.0 * wv.cwiseProduct(ep.phi);
        ep.stationarity_residual = r.cwiseAbs().maxCoeff() / gJ.cwiseAbs().maxCoeff();
        ep.converged = true;
        rep.pairs.push_back(std::move(ep));
        rep.pencil_lambdas.push_back(1.0 / nu);
        Y.conservativeResize(N, Y.cols() + 1);
        Y.col(Y.cols() - 1) = y;
    }
    // Ties within 1e-9 relative: order by the first significant node.
    for (std::size_t a = 0; a < rep.pairs.size();) {
        std::size_t b = a + 1;
        while (b < rep.pairs.size() &&
               std::abs(rep.pairs[b].lambda - rep.pairs[a].lambda) <= 1e-9 * std::abs(rep.pairs[a].lambda))
            ++b;
        std::stable_sort(rep.pairs.begin() + static_cast<std::ptrdiff_t>(a), rep.pairs.begin() + static_cast<std::ptrdiff_t>(b),
                         [](const EigenPair& x, const EigenPair& y) {
                             return detail::first_significant(x.phi) < detail::first_significant(y.phi);
                         });
        a = b;
    }
    rep.available = rep.pairs.size();
    rep.truncated = rep.available < k_max;
    for (const auto& ep : rep.pairs) rep.sign_change.push_back(changes_sign(ep.phi));
    if (!rep.pairs.empty()) {
        for (const auto& ep : rep.pairs)
            if (std::abs(ep.lambda - rep.pairs[0].lambda) <= 1e-8 * rep.pairs[0].lambda) ++rep.lambda1_multiplicity;
    }
    return rep;
}

struct SimplicityReport {
    std::vector<EigenPair> runs;
    double min_alignment = NAN;   // min |cos| between normalized eigenfunctions
    double lambda_spread = NAN;   // (max - min) / mean
    double max_picone = NAN;      // max aggregate Picone functional over ordered pairs
    bool picone_applicable = false;
    bool passes(double align_tol, double spread_tol) const {
        return min_alignment >= 1.0 - align_tol && lambda_spread <= spread_tol;
    }
};

inline double alignment(const Grid& g, const FunctionVec& a, const FunctionVec& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        const double w = g.interior_weight(k);
        const auto i = static_cast<Eigen::Index>(k);
        ab += w * a[i] * b[i];
        aa += w * a[i] * a[i];
        bb += w * b[i] * b[i];
    }
    return std::abs(ab) / std::sqrt(aa * bb);
}

/// lambda_1 from `trials` independent random starts; all must converge.
inline SimplicityReport verify_simplicity(const NonlocalForm& form, const Weight& V, std::size_t trials,
                                          SolverOptions opt = {}) {
    detail::require(trials >= 2, "verify_simplicity: need at least 2 trials");
    SimplicityReport rep;
    rep.runs = parallel_map(trials, [&](std::size_t t) {
        SolverOptions o = opt;
        o.trial = opt.trial + t;
        return solve_lambda1(form, V, o);
    });
    double lo = INFINITY, hi = -INFINITY, mean = 0.0;
    for (const auto& r : rep.runs) {
        lo = std::min(lo, r.lambda);
        hi = std::max(hi, r.lambda);
        mean += r.lambda / static_cast<double>(trials);
    }
    rep.lambda_spread = (hi - lo) / std::abs(mean);
    rep.min_alignment = 1.0;
    rep.picone_applicable = true;
    for (const auto& r : rep.runs)
        if (!(r.phi.minCoeff() > 0.0)) rep.picone_applicable = false;
    rep.max_picone = rep.picone_applicable ? 0.0 : NAN;
    for (std::size_t a = 0; a < trials; ++a)
        for (std::size_t b = a + 1; b < trials; ++b) {
            rep.min_alignment = std::min(rep.min_alignment, alignment(form.grid(), rep.runs[a].phi, rep.runs[b].phi));
            if (rep.picone_applicable) {
                rep.max_picone = std::max(rep.max_picone, picone_defect(rep.runs[a].phi, rep.runs[b].phi, form).aggregate);
                rep.max_picone = std::max(rep.max_picone, picone_defect(rep.runs[b].phi, rep.runs[a].phi, form).aggregate);
            }
        }
    return rep;
}

struct SignReport {
    bool phi1_one_signed = false;
    bool higher_change_sign = false;    // every phi_k with lambda_k > lambda_1 changes sign
    std::vector<bool> changes;          // per pair
};

inline SignReport verify_sign_properties(const SpectrumReport& rep) {
    SignReport s;
    if (rep.pairs.empty()) return s;
    s.phi1_one_signed = is_one_signed(rep.pairs[0].phi);
    s.higher_change_sign = true;
    const double l1 = rep.pairs[0].lambda;
    for (std::size_t k = 0; k < rep.pairs.size(); ++k) {
        const bool c = changes_sign(rep.pairs[k].phi);
        s.changes.push_back(c);
        if (k > 0 && rep.pairs[k].lambda > l1 * (1.0 + 1e-9) && !c) s.higher_change_sign = false;
    }
    return s;
}

struct MonotonicityReport {
    double lambda_small = NAN;  // lambda_1 of the smaller weight / smaller domain side
    double lambda_big = NAN;
    double margin = NAN;        // lambda(first) - lambda(second)
    bool strict = false;        // margin > 1e-9 relative
};

/// lambda_1(V_big) < lambda_1(V_small) when V_small <= V_big with strict inequality somewhere.
inline MonotonicityReport verify_weight_monotonicity(const NonlocalForm& form, const Weight& V_small, const Weight& V_big,
                                                     const SolverOptions& opt = {}) {
    const auto ord = pointwise_compare(V_small, V_big, form.grid());
    if (!ord.ordered) throw ValidationError("verify_weight_monotonicity: V_small <= V_big fails at some node");
    MonotonicityReport r;
    r.lambda_small = solve_lambda1(form, V_small, opt).lambda;
    r.lambda_big = solve_lambda1(form, V_big, opt).lambda;
    r.margin = r.lambda_small - r.lambda_big;
    r.strict = ord.strict && r.margin > 1e-9 * std::abs(r.lambda_small);
    return r;
}

/// lambda_1(parent) < lambda_1(child); lambda_small is the child value (the smaller domain).
inline MonotonicityReport verify_domain_monotonicity(const SubdomainRelation& rel, const Weight& V, const HardyParams& hp,
                                                     double mu, const SolverOptions& opt = {},
                                                     const FormOptions& fopt = {}) {
    const auto fp = NonlocalForm::assemble(rel.parent, hp, mu, fopt);
    const auto fc = NonlocalForm::assemble(rel.child, hp, mu, fopt);
    MonotonicityReport r;
    r.lambda_small = solve_lambda1(fc, V, opt).lambda;
    r.lambda_big = solve_lambda1(fp, V, opt).lambda;
    r.margin = r.lambda_small - r.lambda_big;
    r.strict = r.margin > 1e-9 * std::abs(r.lambda_small);
    return r;
}

/// lambda_1 at each mu (ascending); strict = strictly decreasing.
struct MuMonotonicityReport {
    std::vector<double> mus, lambdas;
    bool strict = false;
};

inline MuMonotonicityReport verify_mu_monotonicity(const NonlocalForm& form, const Weight& V, std::vector<double> mus,
                                                   const SolverOptions& opt = {}) {
    std::sort(mus.begin(), mus.end());
    MuMonotonicityReport r;
    r.mus = mus;
    for (double m : mus) r.lambdas.push_back(solve_lambda1(form.with_mu(m), V, opt).lambda);
    r.strict = true;
    for (std::size_t k = 1; k < r.lambdas.size(); ++k)
        if (!(r.lambdas[k] < r.lambdas[k - 1])) r.strict = false;
    return r;
}

enum class ScalingDirection { ToOrigin, ToInfinity };

struct ScalingRow {
    double r = 1.0, energy = 0.0, psi = 0.0, quotient = 0.0;
};
struct ScalingTable {
    std::vector<ScalingRow> rows;
    bool decreasing = false;      // strictly decreasing along the sequence
    double base_quotient = NAN;   // quotient at r = 1
    double last_over_base = NAN;  // quotient(last) / quotient(1)
    double min_over_base = NAN;   // min_r quotient(r) / quotient(1)
};

/**
 * Rayleigh quotient of u_r(x) = u0(x / r) for each r. The base grid is
 * rescaled by r (nodes r x_i, weights r^n w_i) and the form reassembled, so
 * u_r takes the same node values as u0. r = 1 is always evaluated first as
 * the reference.
 */
inline ScalingTable scaling_collapse_test(const NonlocalForm& base, const Weight& V, const FunctionVec& u0,
                                          const std::vector<double>& r_sequence, ScalingDirection dir,
                                          const FormOptions& fopt = {}) {
    detail::require(static_cast<std::size_t>(u0.size()) == base.size(), "scaling_collapse_test: u0 size mismatch");
    const Grid& g = base.grid();
    if (dir == ScalingDirection::ToInfinity) {
        const double rad = g.max_cell_diameter();
        for (std::size_t k = 0; k < g.interior_count(); ++k)
            if (Grid::norm(g.interior_node(k)) <= rad && u0[static_cast<Eigen::Index>(k)] != 0.0)
                throw ValidationError("scaling_collapse_test: u0 must vanish near the origin for the |x| -> infinity direction");
    }
    auto eval = [&](double r) {
        const NonlocalForm f = r == 1.0 ? base : NonlocalForm::assemble(g.scaled(r), base.params(), base.mu(), fopt);
        const Eigen::VectorXd wv = f.mass(V);
        ScalingRow row;
        row.r = r;
        row.energy = f.energy(u0);
        row.psi = f.psi(wv, u0);
        if (!(row.psi > 0.0)) throw ValidationError("scaling_collapse_test: Psi(u_r) <= 0");
        row.quotient = row.energy / row.psi;
        return row;
    };
    ScalingTable t;
    const ScalingRow b = eval(1.0);
    t.base_quotient = b.quotient;
    t.rows.push_back(b);
    for (double r : r_sequence) {
        detail::require(r > 0.0, "scaling_collapse_test: scale factors must be positive");
        if (r == 1.0) continue;
        t.rows.push_back(eval(r));
    }
    t.decreasing = true;
    t.min_over_base = 1.0;
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
        if (!(t.rows[k].quotient < t.rows[k - 1].quotient)) t.decreasing = false;
        t.min_over_base = std::min(t.min_over_base, t.rows[k].quotient / t.base_quotient);
    }
    t.last_over_base = t.rows.back().quotient / t.base_quotient;
    return t;
}

struct GrowthReport {
    bool nondecreasing = false;
    double ratio = NAN;  // lambda_kmax / lambda_1
    bool pass = false;
};

inline GrowthReport lambda_growth_check(const SpectrumReport& rep, double ratio_threshold) {
    GrowthReport g;
    detail::require(!rep.pairs.empty(), "lambda_growth_check: empty spectrum");
    g.nondecreasing = true;
    for (std::size_t k = 1; k < rep.pairs.size(); ++k)
        if (rep.pairs[k].lambda < rep.pairs[k - 1].lambda * (1.0 - 1e-12)) g.nondecreasing = false;
    g.ratio = rep.pairs.back().lambda / rep.pairs.front().lambda;
    g.pass = g.nondecreasing && (rep.pairs.size() == 1 || g.ratio >= ratio_threshold);
    return g;
}

struct StabilityReport {
    std::vector<double> rel_change;  // |lambda_k(fine) - lambda_k(coarse)| / lambda_k(fine)
    double max_rel_change = 0.0;
    bool pass = false;
};

inline StabilityReport refinement_stability(const SpectrumReport& coarse, const SpectrumReport& fine, std::size_t k,
                                            double tol) {
    detail::require(coarse.pairs.size() >= k && fine.pairs.size() >= k, "refinement_stability: not enough eigenvalues");
    StabilityReport s;
    for (std::size_t j = 0; j < k; ++j) {
        const double c = std::abs(fine.pairs[j].lambda - coarse.pairs[j].lambda) / std::abs(fine.pairs[j].lambda);
        s.rel_change.push_back(c);
        s.max_rel_change = std::max(s.max_rel_change, c);
    }
    s.pass = s.max_rel_change <= tol;
    return s;
}

}  // namespace fhe
