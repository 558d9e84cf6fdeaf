#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <queue>
#include <vector>

namespace fhe {

/// Integral value, estimated absolute error, and integrand evaluations spent.
struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

template <class F>
Panel kronrod_panel(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    const double fc = f(c);
    double k = kKronrodWeights[7] * fc;
    double g = kGaussWeights[3] * fc;
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = r * kKronrodNodes[j];
        const double s = f(c - dx) + f(c + dx);
        k += kKronrodWeights[j] * s;
        if (j % 2 == 1) g += kGaussWeights[j / 2] * s;
    }
    k *= r;
    g *= r;
    double err = std::abs(k - g);
    // Guard against a lucky Gauss/Kronrod agreement on coarse panels.
    err = std::max(err, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(k));
    return {a, b, k, err};
}

}  // namespace detail

/**
 * Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
 *
 * Bisects the panel with the largest error estimate until the summed
 * estimate falls below max(abs_tol, rel_tol * |value|) or max_panels is hit.
 * The returned state is the one with the smallest error estimate seen, so a
 * tighter tolerance never reports a larger error. Endpoints are never
 * evaluated.
 */
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                                    std::size_t max_panels = 4000) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    const double sign = a < b ? 1.0 : -1.0;
    if (a > b) std::swap(a, b);

    std::vector<detail::Panel> panels;
    std::vector<char> active;
    using Entry = std::pair<double, std::size_t>;  // (error, panel index)
    std::priority_queue<Entry> heap;
    auto add = [&](const detail::Panel& p) {
        panels.push_back(p);
        active.push_back(1);
        heap.emplace(p.error, panels.size() - 1);
    };
    add(detail::kronrod_panel(f, a, b));
    double total = panels[0].value;
    double total_err = panels[0].error;
    std::size_t splits = 0;

    double best_value = total, best_err = total_err;
    auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
    while (total_err > target() && splits + 1 < max_panels) {
        const std::size_t idx = heap.top().second;
        const auto worst = panels[idx];
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further in floating point
        heap.pop();
        active[idx] = 0;
        add(detail::kronrod_panel(f, worst.a, mid));
        add(detail::kronrod_panel(f, mid, worst.b));
        ++splits;
        // Fixed summation order (panel creation order) keeps results deterministic.
        total = 0.0;
        total_err = 0.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            if (!active[i]) continue;
            total += panels[i].value;
            total_err += panels[i].error;
        }
        if (total_err < best_err) {
            best_err = total_err;
            best_value = total;
        }
    }
    out.value = sign * best_value;
    out.error = best_err;
    out.evaluations = panels.size() * 15;
    out.converged = best_err <= std::max(abs_tol, rel_tol * std::abs(best_value));
    return out;
}

}  // namespace fhe
