#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhe/error.hpp"
#include "fhe/format.hpp"
#include "fhe/grid.hpp"
#include "fhe/hardy_constant.hpp"
#include "fhe/quadrature.hpp"
#include "fhe/weights.hpp"

namespace fhe {

struct FormOptions {
    // Exact cell-pair factor for neighbouring cells (1D only).
    bool near_diagonal_correction = true;
    double hardy_tol = 1e-10;
    bool warn = true;
    std::ostream* warn_stream = &std::cerr;
};

namespace detail {

// |a + d|^p - |a|^p without cancellation when d is small relative to a.
inline double pow_increment(double a, double d, double p) {
    if (p == 2.0) return d * (2.0 * a + d);
    const double b = a + d;
    if (a != 0.0 && ((a > 0.0) == (b > 0.0)) && b != 0.0)
        return std::pow(std::abs(a), p) * std::expm1(p * std::log1p(d / a));
    return std::pow(std::abs(b), p) - std::pow(std::abs(a), p);
}

inline double abs_pow(double x, double p) { return p == 2.0 ? x * x : std::pow(std::abs(x), p); }

// |x|^{p-2} x, with the value 0 at x = 0.
inline double signed_pow(double x, double p) {
    if (p == 2.0) return x;
    if (x == 0.0) return 0.0;
    return std::pow(std::abs(x), p - 2.0) * x;
}

// Neighbour-cell factor: the exact integral of |x - y|^{p - 1 - s} over two adjacent
// cells, plus half the self-cell integral, divided by the midpoint value.
inline double adjacent_factor(double p, double s) {
    const double q = p - s;
    return (std::pow(2.0, q + 1.0) - 2.0) / (q * (q + 1.0)) + 1.0 / (q * (q + 1.0));
}

// Signed antiderivative of |x|^{-s} in 1D (s < 1).
inline double hardy_antiderivative_1d(double x, double s) {
    const double v = std::pow(std::abs(x), 1.0 - s) / (1.0 - s);
    return x < 0.0 ? -v : v;
}

// Integral of |x|^{-s} over [0, A] x [0, B] (s < 2).
inline double hardy_rect_2d(double A, double B, double s) {
    if (A <= 0.0 || B <= 0.0) return 0.0;
    const double th = std::atan2(B, A);
    auto secpow = [s](double t) { return std::pow(std::cos(t), s - 2.0); };
    auto i1 = integrate_adaptive(secpow, 0.0, th, 0.0, 1e-13);
    auto i2 = integrate_adaptive(secpow, 0.0, 0.5 * std::numbers::pi - th, 0.0, 1e-13);
    return (std::pow(A, 2.0 - s) * i1.value + std::pow(B, 2.0 - s) * i2.value) / (2.0 - s);
}

inline double hardy_corner_2d(double X, double Y, double s) {
    const double sg = (X < 0.0 ? -1.0 : 1.0) * (Y < 0.0 ? -1.0 : 1.0);
    return sg * hardy_rect_2d(std::abs(X), std::abs(Y), s);
}

// (1/s) int_0^{2 pi} rho(theta)^{-s} d theta, rho = distance from x to the box boundary along theta.
inline double box_tail(double x, double y, double lox, double hix, double loy, double hiy, double s) {
    const double dx1 = hix - x, dx0 = x - lox, dy1 = hiy - y, dy0 = y - loy;
    auto rho = [&](double t) {
        const double c = std::cos(t), sn = std::sin(t);
        double r = INFINITY;
        if (c > 0.0) r = std::min(r, dx1 / c);
        if (c < 0.0) r = std::min(r, -dx0 / c);
        if (sn > 0.0) r = std::min(r, dy1 / sn);
        if (sn < 0.0) r = std::min(r, -dy0 / sn);
        return r;
    };
    auto f = [&](double t) { return std::pow(rho(t), -s); };
    std::vector<double> cuts = {std::atan2(dy1, dx1), std::atan2(dy1, -dx0), std::atan2(-dy0, -dx0) + 2.0 * std::numbers::pi,
                                std::atan2(-dy0, dx1) + 2.0 * std::numbers::pi};
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    double prev = cuts.back() - 2.0 * std::numbers::pi;
    for (double c : cuts) {
        total += integrate_adaptive(f, prev, c, 0.0, 1e-12).value;
        prev = c;
    }
    return total / s;
}

}  // namespace detail

/**
 * Assembled discrete energy
 *
 *   J(u) = sum_{i != j} K_ij |u_i - u_j|^p + 2 sum_i e_i |u_i|^p - sum_i h_i |u_i|^p
 *
 * over the interior nodes, with K_ij = w_i w_j |x_i - x_j|^{-(n + p alpha)},
 * e_i the interaction with the zero exterior (collar nodes plus the analytic
 * tail beyond the collar) and h_i = mu int_{cell i} |x|^{-p alpha} dx.
 * The gradient is dJ/du (factor 2p on the double sum).
 */
class NonlocalForm {
public:
    static NonlocalForm assemble(const Grid& grid, const HardyParams& hp, double mu, const FormOptions& opt = {}) {
        hp.validate();
        detail::require(std::isfinite(mu) && mu >= 0.0, "NonlocalForm: mu must be >= 0");
        NonlocalForm f(grid);
        f.hp_ = hp;
        f.mu_ = mu;
        f.opt_ = opt;
        const double s = hp.s();
        const int n = grid.dimension();
        if (mu > 0.0) {
            detail::require(s < n, "NonlocalForm: a Hardy term needs p*alpha < n");
            f.C_ = hardy_constant(hp, opt.hardy_tol).value;
            if (mu >= f.C_) {
                const std::string msg = "NonlocalForm: mu = " + format_double(mu) +
                                        " is not below the Hardy constant " + format_double(f.C_);
                if (opt.warn && opt.warn_stream) *opt.warn_stream << "warning: " << msg << '\n';
                throw ValidationError(msg);
            }
        }
        f.build_kernel();
        if (s < n) f.build_hardy();
        return f;
    }

    const Grid& grid() const { return grid_; }
    const HardyParams& params() const { return hp_; }
    double mu() const { return mu_; }
    double p() const { return hp_.p; }
    std::size_t size() const { return grid_.interior_count(); }
    /// C_{n,alpha,p}, computed when mu > 0 (NaN otherwise).
    double hardy_constant_value() const { return C_; }

    const Eigen::MatrixXd& kernel() const { return K_; }
    const Eigen::VectorXd& exterior() const { return e_; }
    const Eigen::VectorXd& tail() const { return tail_; }
    const Eigen::VectorXd& hardy_unit() const {
        detail::require(hu_.size() == static_cast<Eigen::Index>(size()), "NonlocalForm: no Hardy vector (p*alpha >= n)");
        return hu_;
    }
    Eigen::VectorXd hardy() const { return hu_.size() ? Eigen::VectorXd(mu_ * hu_) : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size())); }

    /// Same grid and exponents with another mu.
    NonlocalForm with_mu(double mu) const {
        detail::require(std::isfinite(mu) && mu >= 0.0, "NonlocalForm: mu must be >= 0");
        NonlocalForm f = *this;
        if (mu > 0.0) {
            detail::require(hu_.size() > 0, "NonlocalForm: a Hardy term needs p*alpha < n");
            if (!std::isfinite(f.C_)) f.C_ = hardy_constant(hp_, opt_.hardy_tol).value;
            if (mu >= f.C_) {
                const std::string msg = "NonlocalForm: mu = " + format_double(mu) +
                                        " is not below the Hardy constant " + format_double(f.C_);
                if (opt_.warn && opt_.warn_stream) *opt_.warn_stream << "warning: " << msg << '\n';
                throw ValidationError(msg);
            }
        }
        f.mu_ = mu;
        return f;
    }

    /// Double sum plus exterior part (the mu = 0 energy).
    double gagliardo(const FunctionVec& u) const {
        check(u);
        const double p = hp_.p;
        const auto N = static_cast<Eigen::Index>(size());
        double total = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < N; ++j)
                if (j != i) row += K_(i, j) * detail::abs_pow(u[i] - u[j], p);
            total += row + 2.0 * e_[i] * detail::abs_pow(u[i], p);
        }
        return total;
    }

    /// sum_i hbar_i |u_i|^p with the mu = 1 Hardy vector.
    double hardy_unit_term(const FunctionVec& u) const {
        check(u);
        const auto& hu = hardy_unit();
        double t = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) t += hu[i] * detail::abs_pow(u[i], hp_.p);
        return t;
    }

    double energy(const FunctionVec& u) const {
        const double g = gagliardo(u);
        return mu_ > 0.0 ? g - mu_ * hardy_unit_term(u) : g;
    }

    FunctionVec gradient(const FunctionVec& u) const {
        check(u);
        const double p = hp_.p;
        const auto N = static_cast<Eigen::Index>(size());
        FunctionVec g(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < N; ++j)
                if (j != i) row += K_(i, j) * detail::signed_pow(u[i] - u[j], p);
            double diag = 2.0 * e_[i];
            if (mu_ > 0.0) diag -= mu_ * hu_[i];
            g[i] = 2.0 * p * row + p * diag * detail::signed_pow(u[i], p);
        }
        return g;
    }

    /// J(u + du) - J(u), summed term by term without cancellation.
    double energy_change(const FunctionVec& u, const FunctionVec& du) const {
        check(u);
        check(du);
        const double p = hp_.p;
        const auto N = static_cast<Eigen::Index>(size());
        double total = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < N; ++j)
                if (j != i) row += K_(i, j) * detail::pow_increment(u[i] - u[j], du[i] - du[j], p);
            double diag = 2.0 * e_[i];
            if (mu_ > 0.0) diag -= mu_ * hu_[i];
            total += row + diag * detail::pow_increment(u[i], du[i], p);
        }
        return total;
    }

    /// J(u)^{1/p}; for mu = 0 this is the discrete X_0 norm.
    double r_functional(const FunctionVec& u, double tol = 1e-12) const {
        const double J = energy(u);
        const double scale = gagliardo(u);
        if (J < -tol * std::max(1.0, scale))
            throw ValidationError("r_functional: J_mu(u) < 0, coercivity lost (mu too close to the discrete constant)");
        return std::pow(std::max(J, 0.0), 1.0 / hp_.p);
    }

    /// (Gagliardo + sum_i w_i V-(x_i) |u_i|^p)^{1/p}.
    double x_norm(const Weight& V, const FunctionVec& u) const {
        check(u);
        double t = gagliardo(u);
        for (std::size_t k = 0; k < size(); ++k) {
            const auto ki = static_cast<Eigen::Index>(k);
            t += grid_.interior_weight(k) * V.minus(grid_.interior_node(k)) * detail::abs_pow(u[ki], hp_.p);
        }
        return std::pow(t, 1.0 / hp_.p);
    }

    /// A_t(u) = gradient(u)/p + t w V- |u|^{p-2} u, so <A_t(u), u> = J(u) + t sum w V- |u|^p.
    FunctionVec apply_At(const Weight& V, double t, const FunctionVec& u) const {
        detail::require(t > 0.0, "apply_At: t must be positive");
        FunctionVec g = gradient(u) / hp_.p;
        for (std::size_t k = 0; k < size(); ++k) {
            const auto ki = static_cast<Eigen::Index>(k);
            g[ki] += t * grid_.interior_weight(k) * V.minus(grid_.interior_node(k)) * detail::signed_pow(u[ki], hp_.p);
        }
        return g;
    }

    /// Symmetric matrix A with J(u) = u^T A u (p = 2 only).
    Eigen::MatrixXd quadratic_matrix() const {
        detail::require(hp_.p == 2.0, "quadratic_matrix: p must be 2");
        const auto N = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd A = -2.0 * K_;
        for (Eigen::Index i = 0; i < N; ++i) {
            A(i, i) = 2.0 * K_.row(i).sum() + 2.0 * e_[i];
            if (mu_ > 0.0) A(i, i) -= mu_ * hu_[i];
        }
        return A;
    }

    /// Interior cell weights times V at the interior nodes.
    Eigen::VectorXd mass(const Weight& V) const {
        Eigen::VectorXd b = V.sample(grid_);
        for (std::size_t k = 0; k < size(); ++k) b[static_cast<Eigen::Index>(k)] *= grid_.interior_weight(k);
        return b;
    }

    /// Psi(u) = sum_i w_i V(x_i) |u_i|^p for a precomputed mass vector.
    double psi(const Eigen::VectorXd& wv, const FunctionVec& u) const {
        check(u);
        double t = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) t += wv[i] * detail::abs_pow(u[i], hp_.p);
        return t;
    }

    /// CSV dump: index, coordinates, interior row sum of K, e_i, tail_i, h_i.
    void write_row_sums_csv(std::ostream& os) const {
        os << (grid_.dimension() == 1 ? "index,x,k_row_sum,exterior,tail,hardy\n" : "index,x,y,k_row_sum,exterior,tail,hardy\n");
        const Eigen::VectorXd h = hardy();
        for (std::size_t k = 0; k < size(); ++k) {
            const auto ki = static_cast<Eigen::Index>(k);
            os << k;
            for (double c : grid_.interior_node(k)) os << ',' << format_double(c);
            os << ',' << format_double(K_.row(ki).sum()) << ',' << format_double(e_[ki]) << ','
               << format_double(tail_[ki]) << ',' << format_double(h[ki]) << '\n';
        }
    }

private:
    void check(const FunctionVec& u) const {
        if (static_cast<std::size_t>(u.size()) != size())
            throw ValidationError("NonlocalForm: vector has " + std::to_string(u.size()) + " entries, grid has " +
                                  std::to_string(size()) + " interior nodes");
    }

    void build_kernel() {
        const int n = grid_.dimension();
        const double a = static_cast<double>(n) + hp_.s();
        const bool corr = opt_.near_diagonal_correction && n == 1;
        const double cf = corr ? detail::adjacent_factor(hp_.p, hp_.s()) : 1.0;
        const double h0 = grid_.spacing(0);
        const auto& idx = grid_.interior_indices();
        const auto N = static_cast<Eigen::Index>(idx.size());

        auto kern = [&](std::size_t i, std::size_t j) {
            auto xi = grid_.node(i);
            auto xj = grid_.node(j);
            double d2 = 0.0;
            for (int c = 0; c < n; ++c) d2 += (xi[static_cast<std::size_t>(c)] - xj[static_cast<std::size_t>(c)]) *
                                              (xi[static_cast<std::size_t>(c)] - xj[static_cast<std::size_t>(c)]);
            const double d = std::sqrt(d2);
            double k = grid_.weight(i) * grid_.weight(j) * std::pow(d, -a);
            if (corr && std::abs(d - h0) <= 1e-9 * h0) k *= cf;
            return k;
        };

        K_ = Eigen::MatrixXd::Zero(N, N);
        for (Eigen::Index r = 0; r < N; ++r)
            for (Eigen::Index c = r + 1; c < N; ++c) {
                const double k = kern(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
                K_(r, c) = k;
                K_(c, r) = k;
            }

        e_ = Eigen::VectorXd::Zero(N);
        tail_ = Eigen::VectorXd::Zero(N);
        const auto& ext = grid_.exterior_indices();
        const double s = hp_.s();
        for (Eigen::Index r = 0; r < N; ++r) {
            const std::size_t i = idx[static_cast<std::size_t>(r)];
            double acc = 0.0;
            for (std::size_t j : ext) acc += kern(i, j);
            auto x = grid_.node(i);
            double t;
            if (n == 1) {
                t = grid_.weight(i) * (std::pow(x[0] - grid_.outer_lo(0), -s) + std::pow(grid_.outer_hi(0) - x[0], -s)) / s;
            } else {
                t = grid_.weight(i) * detail::box_tail(x[0], x[1], grid_.outer_lo(0), grid_.outer_hi(0), grid_.outer_lo(1),
                                                       grid_.outer_hi(1), s);
            }
            tail_[r] = t;
            e_[r] = acc + t;
        }
    }

    void build_hardy() {
        const double s = hp_.s();
        const auto N = static_cast<Eigen::Index>(size());
        hu_ = Eigen::VectorXd::Zero(N);
        for (Eigen::Index r = 0; r < N; ++r) {
            auto x = grid_.interior_node(static_cast<std::size_t>(r));
            if (grid_.dimension() == 1) {
                const double hh = 0.5 * grid_.spacing(0);
                hu_[r] = detail::hardy_antiderivative_1d(x[0] + hh, s) - detail::hardy_antiderivative_1d(x[0] - hh, s);
            } else {
                const double hx = 0.5 * grid_.spacing(0), hy = 0.5 * grid_.spacing(1);
                const double x0 = x[0] - hx, x1 = x[0] + hx, y0 = x[1] - hy, y1 = x[1] + hy;
                hu_[r] = detail::hardy_corner_2d(x1, y1, s) - detail::hardy_corner_2d(x0, y1, s) -
                         detail::hardy_corner_2d(x1, y0, s) + detail::hardy_corner_2d(x0, y0, s);
            }
        }
    }

    Grid grid_;
    HardyParams hp_;
    double mu_ = 0.0;
    double C_ = NAN;
    FormOptions opt_;
    Eigen::MatrixXd K_;
    Eigen::VectorXd e_, tail_, hu_;

    explicit NonlocalForm(Grid g) : grid_(std::move(g)) {}
};

/// Pairwise Picone functional L(u, v) on interior pairs (diagonal left at 0).
struct PiconeReport {
    Eigen::MatrixXd L;
    double min_entry = 0.0;
    double aggregate = 0.0;  // sum_{i != j} K_ij L_ij
};

inline PiconeReport picone_defect(const FunctionVec& u, const FunctionVec& v, const NonlocalForm& form) {
    const auto N = static_cast<Eigen::Index>(form.size());
    detail::require(u.size() == N && v.size() == N, "picone_defect: size mismatch");
    for (Eigen::Index i = 0; i < N; ++i) {
        if (!(v[i] > 0.0)) throw ValidationError("picone_defect: v must be positive at every interior node");
        if (u[i] < 0.0) throw ValidationError("picone_defect: u must be nonnegative");
    }
    const double p = form.p();
    Eigen::VectorXd q(N);
    for (Eigen::Index i = 0; i < N; ++i) q[i] = std::pow(u[i], p) / std::pow(v[i], p - 1.0);
    PiconeReport r;
    r.L = Eigen::MatrixXd::Zero(N, N);
    r.min_entry = INFINITY;
    const auto& K = form.kernel();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) {
            if (i == j) continue;
            const double L = detail::abs_pow(u[i] - u[j], p) - detail::signed_pow(v[i] - v[j], p) * (q[i] - q[j]);
            r.L(i, j) = L;
            r.min_entry = std::min(r.min_entry, L);
            r.aggregate += K(i, j) * L;
        }
    if (N < 2) r.min_entry = 0.0;
    return r;
}

struct BrezisLiebReport {
    std::vector<double> defects;  // defects[k-1] for k = 1..k_max
    bool monotone = false;        // |defect| nonincreasing in k
    bool decreasing = false;      // |defect(k_max)| < |defect(1)| (or all zero)
};

/// Defect ||f_k||^p - ||f_k - f||^p - ||f||^p with f_k = f + g/k in weighted l^p.
inline BrezisLiebReport brezis_lieb_check(const Eigen::VectorXd& w, double p, const FunctionVec& f, const FunctionVec& g,
                                          int k_max) {
    detail::require(w.size() == f.size() && f.size() == g.size(), "brezis_lieb_check: size mismatch");
    detail::require(k_max >= 1, "brezis_lieb_check: k_max must be >= 1");
    auto norm_p = [&](const Eigen::VectorXd& x) {
        double t = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) t += w[i] * detail::abs_pow(x[i], p);
        return t;
    };
    const double nf = norm_p(f);
    BrezisLiebReport r;
    for (int k = 1; k <= k_max; ++k) {
        const Eigen::VectorXd gk = g / static_cast<double>(k);
        const Eigen::VectorXd fk = f + gk;
        r.defects.push_back(norm_p(fk) - norm_p(gk) - nf);
    }
    r.monotone = true;
    for (std::size_t k = 1; k < r.defects.size(); ++k)
        if (std::abs(r.defects[k]) > std::abs(r.defects[k - 1])) r.monotone = false;
    r.decreasing = std::abs(r.defects.back()) < std::abs(r.defects.front()) ||
                   (r.defects.front() == 0.0 && r.defects.back() == 0.0);
    return r;
}

inline BrezisLiebReport brezis_lieb_check(const NonlocalForm& form, const FunctionVec& f, const FunctionVec& g, int k_max) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(form.size()));
    for (std::size_t k = 0; k < form.size(); ++k) w[static_cast<Eigen::Index>(k)] = form.grid().interior_weight(k);
    return brezis_lieb_check(w, form.p(), f, g, k_max);
}

/**
 * Random smooth trial function on the grid's box:
 *   u = cutoff(x) (m |x|^2 + eps^2)^{-gamma/2} mixed with a random sine series,
 * cutoff = prod cos^2(pi (x_a - c_a) / (2 half_a)), eps in [0.1, 0.5],
 * gamma in (0, (n - p alpha)/p], six modes with N(0,1)/k^2 coefficients.
 * Defined in continuum terms, so the same draw is comparable across meshes.
 */
struct TrialDraw {
    double mix = 0.5, eps = 0.25, gamma = 0.1;
    std::vector<double> coeff;
};

inline TrialDraw draw_trial(const HardyParams& hp, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> Nrm(0.0, 1.0);
    TrialDraw d;
    d.mix = U(rng);
    d.eps = 0.1 + 0.4 * U(rng);
    const double gmax = std::max(hp.gamma(), 1e-3);
    d.gamma = gmax * (1.0 - U(rng));
    for (int k = 1; k <= 6; ++k) d.coeff.push_back(Nrm(rng));
    return d;
}

inline FunctionVec evaluate_trial(const Grid& g, const TrialDraw& d) {
    const int n = g.dimension();
    static constexpr int kModes2[6][2] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 1}, {1, 3}};
    FunctionVec u(static_cast<Eigen::Index>(g.interior_count()));
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        auto x = g.interior_node(k);
        double cut = 1.0, r2 = 0.0;
        std::array<double, 2> xi{};
        for (int a = 0; a < n; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            const double lo = g.domain_lo(a), hi = g.domain_hi(a);
            const double t = (x[ua] - lo) / (hi - lo);
            xi[ua] = t;
            const double c = std::sin(std::numbers::pi * t);
            cut *= c * c;
            r2 += x[ua] * x[ua];
        }
        double series = 0.0;
        for (int m = 0; m < 6; ++m) {
            if (n == 1) {
                const double kk = m + 1;
                series += d.coeff[static_cast<std::size_t>(m)] / (kk * kk) * std::sin(kk * std::numbers::pi * xi[0]);
            } else {
                const double k1 = kModes2[m][0], k2 = kModes2[m][1];
                const double ke = 0.5 * (k1 * k1 + k2 * k2);
                series += d.coeff[static_cast<std::size_t>(m)] / ke * std::sin(k1 * std::numbers::pi * xi[0]) *
                          std::sin(k2 * std::numbers::pi * xi[1]);
            }
        }
        const double prof = std::pow(r2 + d.eps * d.eps, -0.5 * d.gamma);
        u[static_cast<Eigen::Index>(k)] = cut * (d.mix * prof + (1.0 - d.mix) * series);
    }
    return u;
}

struct DiscreteHardyEstimate {
    double min_ratio = INFINITY;
    std::size_t argmin = 0;
    std::size_t trials = 0;
};

/// Minimum of Gagliardo/Hardy (mu = 1) over seeded random smooth trials.
inline DiscreteHardyEstimate discrete_hardy_ratio(const NonlocalForm& form, std::size_t trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DiscreteHardyEstimate est;
    est.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto d = draw_trial(form.params(), rng);
        const FunctionVec u = evaluate_trial(form.grid(), d);
        const double den = form.hardy_unit_term(u);
        if (!(den > 0.0)) continue;
        const double r = form.gagliardo(u) / den;
        if (r < est.min_ratio) {
            est.min_ratio = r;
            est.argmin = t;
        }
    }
    return est;
}

/// Exact discrete constant for p = 2: smallest eigenvalue of the pencil (A_gag, diag(hbar)).
inline double discrete_hardy_constant_p2(const NonlocalForm& form) {
    detail::require(form.p() == 2.0, "discrete_hardy_constant_p2: p must be 2");
    const NonlocalForm f0 = form.mu() == 0.0 ? form : form.with_mu(0.0);
    const Eigen::MatrixXd A = f0.quadratic_matrix();
    const Eigen::VectorXd hb = form.hardy_unit();
    // Symmetric scaling D^{-1/2} A D^{-1/2} with D = diag(hbar) > 0.
    const Eigen::VectorXd s = hb.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd M = s.asDiagonal() * A * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

}  // namespace fhe
