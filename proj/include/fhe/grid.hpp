#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fhe/error.hpp"
#include "fhe/format.hpp"

namespace fhe {

// Values at the interior nodes of a Grid; exterior nodes are implicitly zero.
using FunctionVec = Eigen::VectorXd;

/**
 * Uniform cell-centred discretization of a domain in R^n (n = 1 or 2).
 *
 * Nodes cover the domain cells plus an exterior collar of zero cells of
 * width r_ext on every side. Node storage is node-major, one coordinate per
 * axis. A Grid is immutable once built; builders are the free functions
 * below.
 */
class Grid {
public:
    using Point = std::span<const double>;

    int dimension() const { return dim_; }
    std::size_t node_count() const { return weights_.size(); }
    std::size_t interior_count() const { return interior_idx_.size(); }

    Point node(std::size_t i) const {
        return Point(coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
    }
    double weight(std::size_t i) const { return weights_[i]; }
    bool is_interior(std::size_t i) const { return interior_[i] != 0; }

    // Node index of the k-th interior node (interior ordinal -> node index).
    const std::vector<std::size_t>& interior_indices() const { return interior_idx_; }
    const std::vector<std::size_t>& exterior_indices() const { return exterior_idx_; }
    Point interior_node(std::size_t k) const { return node(interior_idx_[k]); }
    double interior_weight(std::size_t k) const { return weights_[interior_idx_[k]]; }

    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double cell_measure() const {
        double w = 1.0;
        for (int a = 0; a < dim_; ++a) w *= spacing(a);
        return w;
    }
    // Axis-aligned box bounding the interior cells.
    double domain_lo(int axis) const { return domain_lo_[static_cast<std::size_t>(axis)]; }
    double domain_hi(int axis) const { return domain_hi_[static_cast<std::size_t>(axis)]; }
    // Outer edge of the collar; beyond it the kernel tail is integrated analytically.
    double outer_lo(int axis) const { return outer_lo_[static_cast<std::size_t>(axis)]; }
    double outer_hi(int axis) const { return outer_hi_[static_cast<std::size_t>(axis)]; }
    double r_ext() const { return r_ext_; }
    bool origin_excluded() const { return origin_excluded_; }

    double interior_measure() const {
        double s = 0.0;
        for (auto i : interior_idx_) s += weights_[i];
        return s;
    }
    double diameter() const {
        double d2 = 0.0;
        for (int a = 0; a < dim_; ++a) d2 += std::pow(domain_hi(a) - domain_lo(a), 2);
        return std::sqrt(d2);
    }
    double max_cell_diameter() const {
        double d2 = 0.0;
        for (int a = 0; a < dim_; ++a) d2 += spacing(a) * spacing(a);
        return std::sqrt(d2);
    }
    double min_node_norm() const {
        double best = INFINITY;
        for (std::size_t i = 0; i < node_count(); ++i) best = std::min(best, norm(node(i)));
        return best;
    }

    // Same node set scaled by r about the origin: coordinates * r, weights * r^n.
    Grid scaled(double r) const {
        detail::require(r > 0.0 && std::isfinite(r), "Grid::scaled: factor must be positive");
        Grid g = *this;
        for (auto& c : g.coords_) c *= r;
        for (auto& w : g.weights_) w *= std::pow(r, dim_);
        for (std::size_t a = 0; a < 2; ++a) {
            g.spacing_[a] *= r;
            g.domain_lo_[a] *= r;
            g.domain_hi_[a] *= r;
            g.outer_lo_[a] *= r;
            g.outer_hi_[a] *= r;
        }
        g.r_ext_ *= r;
        return g;
    }

    static double norm(Point x) {
        double s = 0.0;
        for (double c : x) s += c * c;
        return std::sqrt(s);
    }

    // Plain-text node table: '#' header lines, then "index x [y] weight interior".
    void write_node_table(std::ostream& os) const {
        os << "# fhe grid node table v1\n";
        os << "# dim=" << dim_ << " nodes=" << node_count() << " interior=" << interior_count()
           << " r_ext=" << format_double(r_ext_) << " origin_excluded=" << (origin_excluded_ ? 1 : 0) << '\n';
        os << "# spacing=";
        for (int a = 0; a < dim_; ++a) os << (a ? "," : "") << format_double(spacing(a));
        os << " domain=";
        for (int a = 0; a < dim_; ++a)
            os << (a ? "," : "") << format_double(domain_lo(a)) << ':' << format_double(domain_hi(a));
        os << " outer=";
        for (int a = 0; a < dim_; ++a)
            os << (a ? "," : "") << format_double(outer_lo(a)) << ':' << format_double(outer_hi(a));
        os << '\n';
        os << "# columns: index " << (dim_ == 1 ? "x" : "x y") << " weight interior\n";
        for (std::size_t i = 0; i < node_count(); ++i) {
            os << i;
            for (double c : node(i)) os << ' ' << format_double(c);
            os << ' ' << format_double(weights_[i]) << ' ' << (interior_[i] ? 1 : 0) << '\n';
        }
    }

    static Grid read_node_table(std::istream& is);

    // Low-level constructor used by the builders; validates the invariants.
    Grid(int dim, std::vector<double> coords, std::vector<double> weights, std::vector<char> interior,
         std::array<double, 2> spacing, std::array<double, 2> domain_lo, std::array<double, 2> domain_hi,
         std::array<double, 2> outer_lo, std::array<double, 2> outer_hi, double r_ext, bool origin_excluded)
        : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)), interior_(std::move(interior)),
          spacing_(spacing), domain_lo_(domain_lo), domain_hi_(domain_hi), outer_lo_(outer_lo),
          outer_hi_(outer_hi), r_ext_(r_ext), origin_excluded_(origin_excluded) {
        detail::require(dim_ == 1 || dim_ == 2, "Grid: dimension must be 1 or 2");
        detail::require(coords_.size() == weights_.size() * static_cast<std::size_t>(dim_) &&
                            interior_.size() == weights_.size(),
                        "Grid: inconsistent array sizes");
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            detail::require(weights_[i] > 0.0, "Grid: cell weights must be positive");
            (interior_[i] ? interior_idx_ : exterior_idx_).push_back(i);
        }
        detail::require(!interior_idx_.empty(), "Grid: no interior nodes");
        if (origin_excluded_) {
            const double tiny = 1e-12 * max_cell_diameter();
            for (std::size_t i = 0; i < node_count(); ++i)
                if (norm(node(i)) <= tiny)
                    throw ValidationError("Grid: a node coincides with the origin; choose a node count that "
                                          "puts 0 on a cell face");
        }
    }

private:
    int dim_;
    std::vector<double> coords_;
    std::vector<double> weights_;
    std::vector<char> interior_;
    std::array<double, 2> spacing_;
    std::array<double, 2> domain_lo_;
    std::array<double, 2> domain_hi_;
    std::array<double, 2> outer_lo_;
    std::array<double, 2> outer_hi_;
    double r_ext_;
    bool origin_excluded_;
    std::vector<std::size_t> interior_idx_;
    std::vector<std::size_t> exterior_idx_;
};

namespace detail {

inline std::size_t collar_cells(double collar, double h) {
    return static_cast<std::size_t>(std::ceil(collar / h - 1e-9));
}

}  // namespace detail

/// Cell-centred grid on (a, b) with m cells and a zero collar of width >= collar on each side.
inline Grid build_interval_grid(double a, double b, std::size_t m, double collar, bool exclude_origin = true) {
    detail::require(a < b, "build_interval_grid: need a < b");
    detail::require(m >= 2, "build_interval_grid: need at least 2 cells");
    detail::require(collar > 0.0, "build_interval_grid: collar width must be positive");
    const double h = (b - a) / static_cast<double>(m);
    const std::size_t nc = detail::collar_cells(collar, h);
    const std::size_t total = m + 2 * nc;
    std::vector<double> x(total), w(total, h);
    std::vector<char> in(total, 0);
    const double lo = a - static_cast<double>(nc) * h;
    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t j = k;
        // Compute centres from the nearer domain end to keep them symmetric.
        if (j < nc + m / 2)
            x[k] = a + (static_cast<double>(j) - static_cast<double>(nc) + 0.5) * h;
        else
            x[k] = b + (static_cast<double>(j) - static_cast<double>(nc + m) + 0.5) * h;
        in[k] = (j >= nc && j < nc + m) ? 1 : 0;
    }
    const double hi = b + static_cast<double>(nc) * h;
    return Grid(1, std::move(x), std::move(w), std::move(in), {h, 0.0}, {a, 0.0}, {b, 0.0}, {lo, 0.0}, {hi, 0.0},
                static_cast<double>(nc) * h, exclude_origin);
}

/// Cell-centred grid on the box center +- half_widths with m_per_axis cells per axis.
inline Grid build_box_grid(std::array<double, 2> center, std::array<double, 2> half_widths,
                           std::array<std::size_t, 2> m_per_axis, double collar, bool exclude_origin = true) {
    detail::require(half_widths[0] > 0.0 && half_widths[1] > 0.0, "build_box_grid: half widths must be positive");
    detail::require(m_per_axis[0] >= 2 && m_per_axis[1] >= 2, "build_box_grid: need at least 2 cells per axis");
    detail::require(collar > 0.0, "build_box_grid: collar width must be positive");
    std::array<double, 2> h{}, lo{}, hi{}, olo{}, ohi{};
    std::array<std::size_t, 2> nc{}, tot{};
    for (std::size_t a = 0; a < 2; ++a) {
        lo[a] = center[a] - half_widths[a];
        hi[a] = center[a] + half_widths[a];
        h[a] = 2.0 * half_widths[a] / static_cast<double>(m_per_axis[a]);
        nc[a] = detail::collar_cells(collar, h[a]);
        tot[a] = m_per_axis[a] + 2 * nc[a];
        olo[a] = lo[a] - static_cast<double>(nc[a]) * h[a];
        ohi[a] = hi[a] + static_cast<double>(nc[a]) * h[a];
    }
    const double r_ext = std::min(static_cast<double>(nc[0]) * h[0], static_cast<double>(nc[1]) * h[1]);
    auto centre = [&](std::size_t a, std::size_t j) {
        const std::size_t m = m_per_axis[a];
        if (j < nc[a] + m / 2) return lo[a] + (static_cast<double>(j) - static_cast<double>(nc[a]) + 0.5) * h[a];
        return hi[a] + (static_cast<double>(j) - static_cast<double>(nc[a] + m) + 0.5) * h[a];
    };
    std::vector<double> xy;
    std::vector<double> w;
    std::vector<char> in;
    xy.reserve(2 * tot[0] * tot[1]);
    for (std::size_t jy = 0; jy < tot[1]; ++jy) {
        for (std::size_t jx = 0; jx < tot[0]; ++jx) {
            xy.push_back(centre(0, jx));
            xy.push_back(centre(1, jy));
            w.push_back(h[0] * h[1]);
            const bool inside = jx >= nc[0] && jx < nc[0] + m_per_axis[0] && jy >= nc[1] && jy < nc[1] + m_per_axis[1];
            in.push_back(inside ? 1 : 0);
        }
    }
    return Grid(2, std::move(xy), std::move(w), std::move(in), h, lo, hi, olo, ohi, r_ext, exclude_origin);
}

/// Parent grid, a child whose interior is a proper subset, and the interior injection map.
struct SubdomainRelation {
    Grid parent;
    Grid child;
    // injection[k] = parent interior ordinal of the child's k-th interior node.
    std::vector<std::size_t> injection;

    // Zero extension of a child function to the parent interior.
    FunctionVec extend_by_zero(const FunctionVec& child_values) const {
        detail::require(static_cast<std::size_t>(child_values.size()) == injection.size(),
                        "extend_by_zero: size mismatch");
        FunctionVec out = FunctionVec::Zero(static_cast<Eigen::Index>(parent.interior_count()));
        for (std::size_t k = 0; k < injection.size(); ++k)
            out[static_cast<Eigen::Index>(injection[k])] = child_values[static_cast<Eigen::Index>(k)];
        return out;
    }
};

/// Keeps the interior nodes satisfying keep(x); dropped interior nodes join the exterior.
inline SubdomainRelation restrict_grid(const Grid& parent, const std::function<bool(Grid::Point)>& keep) {
    std::vector<char> in(parent.node_count(), 0);
    std::vector<std::size_t> injection;
    const auto& pidx = parent.interior_indices();
    for (std::size_t k = 0; k < pidx.size(); ++k) {
        if (keep(parent.node(pidx[k]))) {
            in[pidx[k]] = 1;
            injection.push_back(k);
        }
    }
    if (injection.empty()) throw ValidationError("restrict: predicate keeps no interior node");
    if (injection.size() == pidx.size())
        throw ValidationError("restrict: predicate keeps every interior node (subdomain must be proper)");

    std::array<double, 2> lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
    for (std::size_t k : injection) {
        auto x = parent.node(pidx[k]);
        for (int a = 0; a < parent.dimension(); ++a) {
            const auto ua = static_cast<std::size_t>(a);
            lo[ua] = std::min(lo[ua], x[ua] - 0.5 * parent.spacing(a));
            hi[ua] = std::max(hi[ua], x[ua] + 0.5 * parent.spacing(a));
        }
    }
    if (parent.dimension() == 1) lo[1] = hi[1] = 0.0;
    std::vector<double> coords;
    std::vector<double> weights;
    coords.reserve(parent.node_count() * static_cast<std::size_t>(parent.dimension()));
    for (std::size_t i = 0; i < parent.node_count(); ++i) {
        for (double c : parent.node(i)) coords.push_back(c);
        weights.push_back(parent.weight(i));
    }
    Grid child(parent.dimension(), std::move(coords), std::move(weights), std::move(in),
               {parent.spacing(0), parent.dimension() == 2 ? parent.spacing(1) : 0.0}, lo, hi,
               {parent.outer_lo(0), parent.dimension() == 2 ? parent.outer_lo(1) : 0.0},
               {parent.outer_hi(0), parent.dimension() == 2 ? parent.outer_hi(1) : 0.0}, parent.r_ext(),
               parent.origin_excluded());
    return SubdomainRelation{parent, std::move(child), std::move(injection)};
}

inline Grid Grid::read_node_table(std::istream& is) {
    std::string line;
    int dim = 0;
    bool origin_excluded = true;
    double r_ext = 0.0;
    std::array<double, 2> h{}, lo{}, hi{}, olo{}, ohi{};
    std::vector<double> coords, weights;
    std::vector<char> in;
    auto parse_kv = [](const std::string& hdr, const std::string& key) -> std::string {
        auto pos = hdr.find(key + "=");
        if (pos == std::string::npos) throw ValidationError("node table: missing header key " + key);
        pos += key.size() + 1;
        auto end = hdr.find(' ', pos);
        return hdr.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    };
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, sep)) out.push_back(tok);
        return out;
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("dim=") != std::string::npos) {
                dim = static_cast<int>(parse_int(parse_kv(line, "dim")));
                r_ext = parse_double(parse_kv(line, "r_ext"));
                origin_excluded = parse_int(parse_kv(line, "origin_excluded")) != 0;
            } else if (line.find("spacing=") != std::string::npos) {
                auto sp = split(parse_kv(line, "spacing"), ',');
                auto dm = split(parse_kv(line, "domain"), ',');
                auto ou = split(parse_kv(line, "outer"), ',');
                for (std::size_t a = 0; a < sp.size() && a < 2; ++a) {
                    h[a] = parse_double(sp[a]);
                    auto d = split(dm[a], ':');
                    auto o = split(ou[a], ':');
                    lo[a] = parse_double(d.at(0));
                    hi[a] = parse_double(d.at(1));
                    olo[a] = parse_double(o.at(0));
                    ohi[a] = parse_double(o.at(1));
                }
            }
            continue;
        }
        detail::require(dim == 1 || dim == 2, "node table: header missing before data");
        auto tok = split(line, ' ');
        detail::require(tok.size() == static_cast<std::size_t>(dim) + 3, "node table: bad row '" + line + "'");
        for (int a = 0; a < dim; ++a) coords.push_back(parse_double(tok[1 + static_cast<std::size_t>(a)]));
        weights.push_back(parse_double(tok[1 + static_cast<std::size_t>(dim)]));
        in.push_back(parse_int(tok[2 + static_cast<std::size_t>(dim)]) ? 1 : 0);
    }
    return Grid(dim, std::move(coords), std::move(weights), std::move(in), h, lo, hi, olo, ohi, r_ext,
                origin_excluded);
}

}  // namespace fhe
