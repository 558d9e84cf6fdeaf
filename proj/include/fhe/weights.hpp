#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fhe/error.hpp"
#include "fhe/expression.hpp"
#include "fhe/grid.hpp"
#include "fhe/hardy_constant.hpp"

namespace fhe {

/**
 * Weight V on Omega with an optional declared decomposition V+ = V1 + V2.
 *
 * V1 is the part expected in L^{n/(p alpha)}; V2 is the part controlled by
 * |x - y|^{p alpha} V2 -> 0 locally and |x|^{p alpha} V2 -> 0 at infinity.
 * Declared singular points are added to the admissibility probe set and are
 * never used as evaluation points.
 */
class Weight {
public:
    using Fn = std::function<double(Grid::Point)>;

    Weight() = default;

    static Weight from_function(std::string name, Fn v) {
        Weight w;
        w.name_ = std::move(name);
        w.v_ = std::move(v);
        return w;
    }
    static Weight from_function(std::string name, Fn v, Fn v1, Fn v2) {
        Weight w = from_function(std::move(name), std::move(v));
        w.v1_ = std::move(v1);
        w.v2_ = std::move(v2);
        return w;
    }

    /// V from an expression; V1/V2 optional expressions. Constants alpha, p, n are bound.
    static Weight from_expression(const std::string& v, const HardyParams& hp, const std::optional<std::string>& v1 = {},
                                  const std::optional<std::string>& v2 = {}) {
        const std::map<std::string, double> consts = {
            {"alpha", hp.alpha}, {"p", hp.p}, {"n", static_cast<double>(hp.n)}};
        auto wrap = [&](const std::string& text) -> Fn {
            auto e = std::make_shared<Expression>(Expression::parse(text, consts));
            return [e](Grid::Point x) { return (*e)(x); };
        };
        Weight w = from_function(v, wrap(v));
        if (v1.has_value() != v2.has_value())
            throw ValidationError("weight: declare both V1 and V2 or neither");
        if (v1) {
            w.v1_ = wrap(*v1);
            w.v2_ = wrap(*v2);
        }
        return w;
    }

    /// V = c, declared V1 = max(c, 0), V2 = 0 (bounded, hence integrable on bounded domains).
    static Weight constant(double c) {
        Weight w = from_function(
            "const(" + format_double(c) + ")", [c](Grid::Point) { return c; },
            [c](Grid::Point) { return std::max(c, 0.0); }, [](Grid::Point) { return 0.0; });
        return w;
    }

    /// Indicator of an axis-aligned box scaled by height; lo/hi per axis.
    static Weight box_indicator(std::vector<double> lo, std::vector<double> hi, double height) {
        detail::require(lo.size() == hi.size() && !lo.empty(), "box_indicator: bad bounds");
        auto f = [lo, hi, height](Grid::Point x) {
            for (std::size_t a = 0; a < x.size() && a < lo.size(); ++a)
                if (x[a] < lo[a] || x[a] > hi[a]) return 0.0;
            return height;
        };
        auto pos = [f](Grid::Point x) { return std::max(f(x), 0.0); };
        return from_function("box", f, pos, [](Grid::Point) { return 0.0; });
    }

    bool has_decomposition() const { return static_cast<bool>(v1_) && static_cast<bool>(v2_); }
    const std::string& name() const { return name_; }
    const std::vector<std::vector<double>>& singular_points() const { return singular_; }
    Weight& with_singular_point(std::vector<double> y) {
        singular_.push_back(std::move(y));
        return *this;
    }
    Weight& with_name(std::string n) {
        name_ = std::move(n);
        return *this;
    }

    double operator()(Grid::Point x) const { return v_(x); }
    double plus(Grid::Point x) const { return std::max(v_(x), 0.0); }
    double minus(Grid::Point x) const { return std::max(-v_(x), 0.0); }
    double v1(Grid::Point x) const {
        require_decomposition();
        return v1_(x);
    }
    double v2(Grid::Point x) const {
        require_decomposition();
        return v2_(x);
    }

    /// c V, c > 0, with the decomposition scaled alongside.
    Weight scaled(double c) const {
        detail::require(c > 0.0, "weight: scale must be positive");
        Weight w;
        w.name_ = format_double(c) + "*(" + name_ + ")";
        auto v = v_;
        w.v_ = [v, c](Grid::Point x) { return c * v(x); };
        if (has_decomposition()) {
            auto a = v1_, b = v2_;
            w.v1_ = [a, c](Grid::Point x) { return c * a(x); };
            w.v2_ = [b, c](Grid::Point x) { return c * b(x); };
        }
        w.singular_ = singular_;
        return w;
    }

    /// V2 replaced by c V2 and V by V + (c - 1) V2, so V+ = V1 + c V2 still holds.
    Weight with_v2_scaled(double c) const {
        require_decomposition();
        detail::require(c > 0.0, "weight: scale must be positive");
        Weight w = *this;
        auto v = v_, b = v2_;
        w.name_ = name_ + "[V2*" + format_double(c) + "]";
        w.v_ = [v, b, c](Grid::Point x) { return v(x) + (c - 1.0) * b(x); };
        w.v2_ = [b, c](Grid::Point x) { return c * b(x); };
        return w;
    }

    /// Pointwise sum. The decomposition is summed, which is valid when both parts are nonnegative.
    friend Weight operator+(const Weight& a, const Weight& b) {
        Weight w;
        w.name_ = a.name_ + "+" + b.name_;
        auto fa = a.v_, fb = b.v_;
        w.v_ = [fa, fb](Grid::Point x) { return fa(x) + fb(x); };
        if (a.has_decomposition() && b.has_decomposition()) {
            auto a1 = a.v1_, a2 = a.v2_, b1 = b.v1_, b2 = b.v2_;
            w.v1_ = [a1, b1](Grid::Point x) { return a1(x) + b1(x); };
            w.v2_ = [a2, b2](Grid::Point x) { return a2(x) + b2(x); };
        }
        w.singular_ = a.singular_;
        w.singular_.insert(w.singular_.end(), b.singular_.begin(), b.singular_.end());
        return w;
    }

    /// |V|; the decomposition becomes V1 = |V|, V2 = 0 and singular points carry over.
    Weight absolute() const {
        Weight w;
        auto v = v_;
        w.name_ = "|" + name_ + "|";
        w.v_ = [v](Grid::Point x) { return std::abs(v(x)); };
        w.v1_ = w.v_;
        w.v2_ = [](Grid::Point) { return 0.0; };
        w.singular_ = singular_;
        return w;
    }

    /// Values of V at the interior nodes of a grid.
    FunctionVec sample(const Grid& g) const {
        FunctionVec out(static_cast<Eigen::Index>(g.interior_count()));
        for (std::size_t k = 0; k < g.interior_count(); ++k) {
            const double v = v_(g.interior_node(k));
            if (!std::isfinite(v))
                throw ValidationError("weight '" + name_ + "' is not finite at interior node " + std::to_string(k));
            out[static_cast<Eigen::Index>(k)] = v;
        }
        return out;
    }

private:
    void require_decomposition() const {
        if (!has_decomposition()) throw ValidationError("weight '" + name_ + "': decomposition V+ = V1 + V2 not declared");
    }

    std::string name_;
    Fn v_, v1_, v2_;
    std::vector<std::vector<double>> singular_;
};

/**
 * The four example weights, written with the exponent 2 alpha:
 *   W1 = 1 / ((1 + |x|^{2a}) log(2 + |x|^{2a})^{2a/n})
 *   W2 = 1 / (|x|^{2a} (1 + |x|^{2a}) log(2 + |x|^{-2a})^{2a/n})
 *   W3 = 1 / (1 + |x|^{2a})
 *   W4 = 1 / (|x|^{2a} (1 + |x|^{2a}))
 * Each is declared with V1 = 0, V2 = W. W2 and W4 are singular at the origin.
 */
inline Weight example_weight(const std::string& name, const HardyParams& hp) {
    const double a2 = 2.0 * hp.alpha;
    const double ex = a2 / static_cast<double>(hp.n);
    Weight::Fn f;
    bool singular = false;
    if (name == "W1") {
        f = [a2, ex](Grid::Point x) {
            const double t = std::pow(Grid::norm(x), a2);
            return 1.0 / ((1.0 + t) * std::pow(std::log(2.0 + t), ex));
        };
    } else if (name == "W2") {
        f = [a2, ex](Grid::Point x) {
            const double t = std::pow(Grid::norm(x), a2);
            return 1.0 / (t * (1.0 + t) * std::pow(std::log(2.0 + 1.0 / t), ex));
        };
        singular = true;
    } else if (name == "W3") {
        f = [a2](Grid::Point x) { return 1.0 / (1.0 + std::pow(Grid::norm(x), a2)); };
    } else if (name == "W4") {
        f = [a2](Grid::Point x) {
            const double t = std::pow(Grid::norm(x), a2);
            return 1.0 / (t * (1.0 + t));
        };
        singular = true;
    } else {
        throw ValidationError("example_weight: unknown weight '" + name + "' (expected W1..W4)");
    }
    Weight w = Weight::from_function(name, f, [](Grid::Point) { return 0.0; }, f);
    if (singular) w.with_singular_point(std::vector<double>(static_cast<std::size_t>(hp.n), 0.0));
    return w;
}

enum class ProxyStatus { Vanishing, NonVanishing, Inconclusive };
enum class ApVerdict { Admissible, Inadmissible, Inconclusive };

inline const char* to_string(ProxyStatus s) {
    switch (s) {
        case ProxyStatus::Vanishing: return "vanishing";
        case ProxyStatus::NonVanishing: return "non-vanishing";
        case ProxyStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}
inline const char* to_string(ApVerdict v) {
    switch (v) {
        case ApVerdict::Admissible: return "admissible";
        case ApVerdict::Inadmissible: return "inadmissible";
        case ApVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Sampled limit sequence a_k for one probe (a base point and a direction, or a tail ray).
struct ProxySequence {
    std::string probe;
    std::vector<double> values;
    double supremum = 0.0;
    ProxyStatus status = ProxyStatus::Inconclusive;
};

/**
 * Sampling plan for the admissibility proxies.
 *
 * Local: a_k = rho_k^{p alpha} V2(y + rho_k d), rho_k = rho_0 2^{-k}, k < local_steps,
 * rho_0 = max cell diameter, d over the signed coordinate axes.
 * Tail: b_k = |x_k|^{p alpha} V2(x_k) with |x_k| = 2^k along the same axes.
 * On a bounded domain there are no points with |x| -> infinity, so the tail
 * condition holds vacuously unless whole_space is set, in which case the rays
 * run out to 2^tail_max_exponent (the truncated stand-in for Omega = R^n).
 */
struct SamplingPlan {
    int local_steps = 40;
    bool whole_space = false;
    int tail_max_exponent = 60;
    // Sequence classification on its second half [K/2, K):
    double zero_rel = 1e-3;      // last <= zero_rel * sup: vanishing
    double decay_factor = 0.95;  // monotone decrease with last <= decay_factor * mid: vanishing
    double stall_factor = 0.999; // last >= stall_factor * mid: non-vanishing
    bool probe_grid_nodes = true;
    std::size_t max_grid_probes = 512;
    double v1_stability = 0.10;
};

struct ApReport {
    bool positive_part_nonzero = false;
    bool v1_integrable = false;
    bool v2_local = false;
    bool v2_tail = false;
    ProxyStatus local_status = ProxyStatus::Inconclusive;
    ProxyStatus tail_status = ProxyStatus::Inconclusive;
    bool v1_stable = false;
    double v1_norm_coarse = 0.0;
    double v1_norm_fine = 0.0;
    bool tail_vacuous = false;
    std::vector<ProxySequence> local_sequences;
    std::vector<ProxySequence> tail_sequences;
    ApVerdict verdict = ApVerdict::Inconclusive;
    std::string detail;
};

namespace detail {

inline ProxyStatus classify_sequence(const std::vector<double>& a, const SamplingPlan& plan) {
    double sup = 0.0;
    for (double v : a) sup = std::max(sup, std::abs(v));
    if (sup == 0.0) return ProxyStatus::Vanishing;
    const std::size_t K = a.size();
    const std::size_t mid = K / 2;
    const double last = std::abs(a[K - 1]);
    const double half = std::abs(a[mid]);
    if (last <= plan.zero_rel * sup) return ProxyStatus::Vanishing;
    if (last >= plan.stall_factor * half) return ProxyStatus::NonVanishing;
    bool monotone = true;
    for (std::size_t k = mid + 1; k < K; ++k)
        if (std::abs(a[k]) > std::abs(a[k - 1])) monotone = false;
    if (monotone && last <= plan.decay_factor * half) return ProxyStatus::Vanishing;
    return ProxyStatus::Inconclusive;
}

inline ProxyStatus combine(const std::vector<ProxySequence>& seqs) {
    bool any_inconclusive = false;
    for (const auto& s : seqs) {
        if (s.status == ProxyStatus::NonVanishing) return ProxyStatus::NonVanishing;
        if (s.status == ProxyStatus::Inconclusive) any_inconclusive = true;
    }
    return any_inconclusive ? ProxyStatus::Inconclusive : ProxyStatus::Vanishing;
}

inline std::string point_label(const std::vector<double>& y) {
    std::string s = "(";
    for (std::size_t a = 0; a < y.size(); ++a) s += (a ? "," : "") + format_double(y[a]);
    return s + ")";
}

// Discrete L^q norm of V1 on the grid cells, with each cell sampled at sub^n midpoints.
inline double v1_norm(const Weight& V, const Grid& g, double q, int sub) {
    const int n = g.dimension();
    double acc = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n));
    const int per = n == 1 ? sub : sub * sub;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        auto c = g.interior_node(k);
        const double w = g.interior_weight(k) / per;
        for (int s = 0; s < per; ++s) {
            int idx = s;
            for (int a = 0; a < n; ++a) {
                const int j = idx % sub;
                idx /= sub;
                const double h = g.spacing(a);
                x[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] - 0.5 * h + (j + 0.5) * h / sub;
            }
            const double v = V.v1(Grid::Point(x));
            if (!std::isfinite(v)) return INFINITY;
            acc += w * std::pow(std::abs(v), q);
        }
    }
    return std::pow(acc, 1.0 / q);
}

}  // namespace detail

/**
 * Sampled check of the admissibility condition (A_p) for V on the given grid.
 *
 * Verdict: admissible iff V+ is nonzero somewhere, all proxies pass;
 * inadmissible if V+ vanishes on the grid or some proxy sequence clearly
 * does not vanish; inconclusive otherwise.
 */
inline ApReport check_Ap(const Weight& V, const HardyParams& hp, const Grid& grid, const SamplingPlan& plan = {}) {
    if (!V.has_decomposition())
        throw ValidationError("check_Ap: weight '" + V.name() + "' has no declared decomposition V+ = V1 + V2");
    detail::require(plan.local_steps >= 4, "check_Ap: local_steps must be >= 4");
    const int n = grid.dimension();
    const double s = hp.s();
    ApReport rep;

    // Decomposition consistency at the interior nodes.
    for (std::size_t k = 0; k < grid.interior_count(); ++k) {
        auto x = grid.interior_node(k);
        const double v = V(x), a = V.v1(x), b = V.v2(x);
        if (!std::isfinite(v) || !std::isfinite(a) || !std::isfinite(b))
            throw ValidationError("check_Ap: evaluation failure at interior node " + std::to_string(k));
        if (a < 0.0 || b < 0.0) throw ValidationError("check_Ap: V1 and V2 must be nonnegative");
        const double vp = std::max(v, 0.0);
        if (std::abs(vp - (a + b)) > 1e-12 * std::max(1.0, vp))
            throw ValidationError("check_Ap: V+ != V1 + V2 at interior node " + std::to_string(k));
        if (v > 0.0) rep.positive_part_nonzero = true;
    }
    if (!rep.positive_part_nonzero) {
        rep.verdict = ApVerdict::Inadmissible;
        rep.detail = "V+ vanishes at every interior node";
        return rep;
    }

    // Build the probe set: (subsampled) interior nodes and declared singular points.
    std::vector<std::vector<double>> probes;
    if (plan.probe_grid_nodes) {
        const std::size_t N = grid.interior_count();
        const std::size_t stride = std::max<std::size_t>(1, (N + plan.max_grid_probes - 1) / plan.max_grid_probes);
        for (std::size_t k = 0; k < N; k += stride) {
            auto x = grid.interior_node(k);
            probes.emplace_back(x.begin(), x.end());
        }
    }
    for (const auto& y : V.singular_points()) {
        detail::require(static_cast<int>(y.size()) == n, "check_Ap: singular point dimension mismatch");
        probes.push_back(y);
    }

    std::vector<std::vector<double>> dirs;
    for (int a = 0; a < n; ++a)
        for (double sg : {1.0, -1.0}) {
            std::vector<double> d(static_cast<std::size_t>(n), 0.0);
            d[static_cast<std::size_t>(a)] = sg;
            dirs.push_back(d);
        }

    // Non-dyadic start so probes from cell centres never land on a singular point.
    const double rho0 = grid.max_cell_diameter() / std::numbers::sqrt2;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (const auto& y : probes) {
        for (const auto& d : dirs) {
            ProxySequence seq;
            seq.probe = "y=" + detail::point_label(y) + " dir=" + detail::point_label(d);
            for (int k = 0; k < plan.local_steps; ++k) {
                const double rho = std::ldexp(rho0, -k);
                for (int a = 0; a < n; ++a)
                    x[static_cast<std::size_t>(a)] = y[static_cast<std::size_t>(a)] + rho * d[static_cast<std::size_t>(a)];
                const double v2 = V.v2(Grid::Point(x));
                if (!std::isfinite(v2))
                    throw ValidationError("check_Ap: V2 not finite at probe " + detail::point_label(x));
                const double val = std::pow(rho, s) * v2;
                seq.values.push_back(val);
                seq.supremum = std::max(seq.supremum, std::abs(val));
            }
            seq.status = detail::classify_sequence(seq.values, plan);
            rep.local_sequences.push_back(std::move(seq));
        }
    }
    rep.local_status = detail::combine(rep.local_sequences);
    rep.v2_local = rep.local_status == ProxyStatus::Vanishing;

    if (!plan.whole_space) {
        rep.tail_vacuous = true;
        rep.tail_status = ProxyStatus::Vanishing;
    } else {
        const double rmax = std::max(1.0, std::sqrt(static_cast<double>(n)) * [&] {
            double m = 0.0;
            for (int a = 0; a < n; ++a) m = std::max({m, std::abs(grid.domain_lo(a)), std::abs(grid.domain_hi(a))});
            return m;
        }());
        const int k0 = static_cast<int>(std::ceil(std::log2(rmax)));
        for (const auto& d : dirs) {
            ProxySequence seq;
            seq.probe = "tail dir=" + detail::point_label(d);
            for (int k = k0; k <= plan.tail_max_exponent; ++k) {
                const double R = std::ldexp(1.0, k);
                for (int a = 0; a < n; ++a) x[static_cast<std::size_t>(a)] = R * d[static_cast<std::size_t>(a)];
                const double v2 = V.v2(Grid::Point(x));
                if (!std::isfinite(v2))
                    throw ValidationError("check_Ap: V2 not finite at tail probe " + detail::point_label(x));
                const double val = std::pow(R, s) * v2;
                seq.values.push_back(val);
                seq.supremum = std::max(seq.supremum, std::abs(val));
            }
            if (seq.values.size() < 4)
                throw ValidationError("check_Ap: tail_max_exponent too small for the domain size");
            seq.status = detail::classify_sequence(seq.values, plan);
            rep.tail_sequences.push_back(std::move(seq));
        }
        rep.tail_status = detail::combine(rep.tail_sequences);
    }
    rep.v2_tail = rep.tail_status == ProxyStatus::Vanishing;

    // V1 proxy: discrete L^{n/(p alpha)} norm, stable under one refinement of the cells.
    const double q = static_cast<double>(n) / s;
    rep.v1_norm_coarse = detail::v1_norm(V, grid, q, 1);
    rep.v1_norm_fine = detail::v1_norm(V, grid, q, 2);
    const bool finite = std::isfinite(rep.v1_norm_coarse) && std::isfinite(rep.v1_norm_fine);
    if (finite && rep.v1_norm_coarse == 0.0 && rep.v1_norm_fine == 0.0) {
        rep.v1_stable = true;
    } else if (finite && rep.v1_norm_coarse > 0.0) {
        rep.v1_stable = std::abs(rep.v1_norm_fine / rep.v1_norm_coarse - 1.0) <= plan.v1_stability;
    }
    rep.v1_integrable = finite && rep.v1_stable;

    if (rep.v1_integrable && rep.v2_local && rep.v2_tail) {
        rep.verdict = ApVerdict::Admissible;
        rep.detail = "all proxies vanish";
    } else if (rep.local_status == ProxyStatus::NonVanishing || rep.tail_status == ProxyStatus::NonVanishing) {
        rep.verdict = ApVerdict::Inadmissible;
        rep.detail = rep.local_status == ProxyStatus::NonVanishing ? "|x-y|^{p alpha} V2 does not vanish locally"
                                                                   : "|x|^{p alpha} V2 does not vanish at infinity";
    } else {
        rep.verdict = ApVerdict::Inconclusive;
        rep.detail = !rep.v1_integrable ? "V1 norm not stable under refinement" : "limit sequences not stabilized";
    }
    return rep;
}

struct OrderingReport {
    bool ordered = false;          // V1 <= V2 at every interior node
    bool strict = false;           // V1 < V2 at >= 1 node
    std::size_t strict_nodes = 0;
    double strict_measure = 0.0;   // sum of cell weights where V1 < V2
};

inline OrderingReport pointwise_compare(const Weight& a, const Weight& b, const Grid& g) {
    OrderingReport r;
    r.ordered = true;
    for (std::size_t k = 0; k < g.interior_count(); ++k) {
        auto x = g.interior_node(k);
        const double va = a(x), vb = b(x);
        if (!std::isfinite(va) || !std::isfinite(vb))
            throw ValidationError("pointwise_compare: evaluation failure at interior node " + std::to_string(k));
        if (va > vb) r.ordered = false;
        if (va < vb) {
            ++r.strict_nodes;
            r.strict_measure += g.interior_weight(k);
        }
    }
    r.strict = r.strict_nodes > 0;
    return r;
}

}  // namespace fhe
