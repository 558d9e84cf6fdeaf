#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fhe/error.hpp"
#include "fhe/quadrature.hpp"

namespace fhe {

enum class HardyRegime { Subcritical, Supercritical };

/**
 * Parameters (n, alpha, p) of the fractional Hardy inequality
 *
 *   int int |u(x)-u(y)|^p / |x-y|^(n + p alpha) >= C_{n,alpha,p} int |u|^p / |x|^(p alpha).
 *
 * p = n / alpha is rejected: the weight |1 - r^((n - p alpha)/p)|^p in the
 * constant vanishes identically there.
 */
struct HardyParams {
    int n = 1;
    double alpha = 0.25;
    double p = 2.0;

    static HardyParams make(int n, double alpha, double p) {
        HardyParams hp{n, alpha, p};
        hp.validate();
        return hp;
    }

    // Ranges only; the radial kernel is defined at p = n/alpha too.
    void validate_ranges() const {
        detail::require(n >= 1, "HardyParams: dimension n must be >= 1");
        detail::require(alpha > 0.0 && alpha < 1.0, "HardyParams: alpha must lie in (0,1)");
        detail::require(p >= 1.0 && std::isfinite(p), "HardyParams: p must be >= 1");
    }

    void validate() const {
        validate_ranges();
        if (is_degenerate())
            throw ValidationError("HardyParams: p = n/alpha is degenerate (the Hardy constant vanishes)");
    }

    bool is_degenerate() const { return std::abs(p * alpha - static_cast<double>(n)) <= 1e-12 * n; }
    double s() const { return p * alpha; }  // kernel order p*alpha
    HardyRegime regime() const { return s() < n ? HardyRegime::Subcritical : HardyRegime::Supercritical; }
    // Exponent (n - p alpha)/p of the radial profile.
    double gamma() const { return (static_cast<double>(n) - s()) / p; }
};

/// Surface measure of the unit sphere S^k in R^(k+1); |S^0| = 2 (two points, counting measure).
inline double sphere_area(int k) {
    const double d = static_cast<double>(k + 1);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace detail {

inline constexpr double kInnerRelTol = 2e-14;

// log | 1 - r^gamma | given log r and log(-log r) (the latter stays accurate as r -> 1).
inline double log_abs_one_minus_pow(double gamma, double log_r, double log_neg_log_r) {
    const double z = gamma * log_r;
    if (std::abs(z) < 1e-8) return std::log(std::abs(gamma)) + log_neg_log_r + std::log1p(0.5 * z);
    if (z > 0.0) return z + std::log(-std::expm1(-z));
    return std::log(-std::expm1(z));
}

// The angular integral left after removing the sphere weight with t = cos(phi) and
// substituting tan(phi/2) = ((1-r)/(1+r)) tan(psi):
//   I_n(kappa) = int_0^{pi/2} sin^{n-2} cos^{n-2} (cos^2 + kappa^2 sin^2)^{(p alpha - n + 2)/2} dpsi.
// The integrand is bounded for every kappa in (0, 1], so the r -> 1 peak is gone.
inline double angular_integral(const HardyParams& hp, double kappa) {
    const double e = 0.5 * (hp.s() - hp.n + 2.0);
    const int k = hp.n - 2;
    const double k2 = kappa * kappa;
    auto f = [&](double psi) {
        const double sn = std::sin(psi), cs = std::cos(psi);
        double v = std::pow(cs * cs + k2 * sn * sn, e);
        if (k > 0) v *= std::pow(sn * cs, k);
        return v;
    };
    auto res = integrate_adaptive(f, 0.0, 0.5 * std::numbers::pi, 0.0, kInnerRelTol, 20000);
    if (!res.converged) throw ConvergenceError("angular integral did not meet its tolerance");
    return res.value;
}

// log Phi_{n,alpha,p}(r), with log(1 - r) supplied separately for accuracy near r = 1.
inline double log_phi(const HardyParams& hp, double r, double log1m_r) {
    const double a = 1.0 + hp.s();
    const double log1p_r = std::log1p(r);
    if (hp.n == 1) return -a * log1m_r + std::log1p(std::exp(a * (log1m_r - log1p_r)));
    const double kappa = std::exp(log1m_r - log1p_r);
    const double nm1 = static_cast<double>(hp.n - 1);
    return std::log(sphere_area(hp.n - 2)) + nm1 * std::numbers::ln2 - a * log1m_r - nm1 * log1p_r +
           std::log(angular_integral(hp, kappa));
}

}  // namespace detail

/**
 * Radial kernel Phi_{n,alpha,p}(r) for 0 < r < 1.
 *
 * n = 1: (1-r)^-(1+p alpha) + (1+r)^-(1+p alpha).
 * n >= 2: |S^{n-2}| int_{-1}^{1} (1-t^2)^{(n-3)/2} (1 - 2rt + r^2)^{-(n + p alpha)/2} dt,
 * evaluated through the bounded angular integral above.
 */
inline double phi(const HardyParams& hp, double r) {
    hp.validate_ranges();
    detail::require(r > 0.0 && r < 1.0, "phi: r must lie in (0,1)");
    return std::exp(detail::log_phi(hp, r, std::log1p(-r)));
}

/**
 * Sharp constant C_{n,alpha,p} = 2 int_0^1 r^{p alpha - 1} |1 - r^{(n - p alpha)/p}|^p Phi(r) dr.
 *
 * [0, 1/2] is integrated in u = r^q with q = min(p alpha, n), which absorbs
 * the algebraic factor at r = 0 in both regimes. [1/2, 1) is integrated in
 * s = -log(1 - r); the integrand decays like exp(-p (1 - alpha) s) there.
 * All factors are combined in log space.
 */
inline QuadratureResult hardy_constant(const HardyParams& hp, double tol) {
    hp.validate();
    detail::require(tol > 0.0, "hardy_constant: tolerance must be positive");
    const double s = hp.s();
    const double g = hp.gamma();
    const double q = std::min(s, static_cast<double>(hp.n));

    auto left = [&](double u) {
        const double log_r = std::log(u) / q;
        const double r = std::exp(log_r);
        const double log_neg_log_r = std::log(-log_r);
        const double lf = (s - q) * log_r + hp.p * detail::log_abs_one_minus_pow(g, log_r, log_neg_log_r) +
                          detail::log_phi(hp, r, std::log1p(-r));
        return std::exp(lf) / q;
    };
    auto right = [&](double t) {
        const double e = std::exp(-t);
        const double r = -std::expm1(-t);
        const double log_r = std::log1p(-e);
        // -log r = e (1 + e/2 + e^2/3 + ...)
        const double log_neg_log_r = t > 20.0 ? -t + std::log1p(0.5 * e) : std::log(-log_r);
        const double lf = -t + (s - 1.0) * log_r + hp.p * detail::log_abs_one_minus_pow(g, log_r, log_neg_log_r) +
                          detail::log_phi(hp, r, -t);
        return std::exp(lf);
    };

    const double decay = hp.p * (1.0 - hp.alpha);
    const double t_max = std::numbers::ln2 + 40.0 * std::numbers::ln10 / decay;
    const double piece_tol = 0.25 * tol;
    auto a = integrate_adaptive(left, 0.0, std::pow(0.5, q), piece_tol);
    auto b = integrate_adaptive(right, std::numbers::ln2, t_max, piece_tol);

    QuadratureResult out;
    out.value = 2.0 * (a.value + b.value);
    // Inner angular integrals carry a relative error of about kInnerRelTol.
    out.error = 2.0 * (a.error + b.error) + 4.0 * detail::kInnerRelTol * std::abs(out.value);
    out.evaluations = a.evaluations + b.evaluations;
    out.converged = a.converged && b.converged && out.error <= tol;
    if (!out.converged)
        throw ConvergenceError("hardy_constant: tolerance " + std::to_string(tol) + " not met (estimate " +
                               std::to_string(out.error) + ")");
    return out;
}

}  // namespace fhe
