#include "otlab/geolines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otlab/rng.hpp"

namespace otlab {

namespace {

constexpr double kGeomEps = 1e-12;

bool point_in_circle(const Circle& c, const Eigen::Vector2d& p) {
    return (p - c.center).squaredNorm() <= c.radius * c.radius;
}

// crossing-number test; points within kGeomEps of an edge count as inside
bool point_in_polygon(const Polygon& poly, const Eigen::Vector2d& p) {
    const auto& v = poly.vertices;
    const int n = static_cast<int>(v.size());
    bool inside = false;
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = v[j];
        const auto& b = v[i];
        if (((b[1] > p[1]) != (a[1] > p[1]))) {
            const double xint = b[0] + (p[1] - b[1]) * (a[0] - b[0]) / (a[1] - b[1]);
            if (p[0] < xint) inside = !inside;
        }
    }
    return inside;
}

std::vector<Eigen::Vector2d> world_offsets(FlatWorld world) {
    if (world == FlatWorld::square) return {{0.0, 0.0}};
    std::vector<Eigen::Vector2d> off;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) off.push_back({static_cast<double>(i), static_cast<double>(j)});
    return off;
}

double point_shape_distance(const FlatDomain& dom, const Eigen::Vector2d& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& off : world_offsets(dom.world)) {
        if (std::holds_alternative<Circle>(dom.shape)) {
            const Circle& c = std::get<Circle>(dom.shape);
            best = std::min(best, std::max(0.0, (p - (c.center + off)).norm() - c.radius));
        } else {
            const Polygon& poly = std::get<Polygon>(dom.shape);
            Polygon moved = poly;
            for (auto& q : moved.vertices) q += off;
            if (point_in_polygon(moved, p)) return 0.0;
            const auto& v = moved.vertices;
            for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
                const Eigen::Vector2d d = v[i] - v[j];
                const double t = std::clamp((p - v[j]).dot(d) / d.squaredNorm(), 0.0, 1.0);
                best = std::min(best, (p - (v[j] + t * d)).norm());
            }
        }
    }
    return best;
}

double compute_area_s1(const FlatDomain& dom) {
    if (dom.world == FlatWorld::torus) return 1.0;  // torus diameter < 1
    const int q = 1024;
    long hits = 0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            const Eigen::Vector2d p((i + 0.5) / q, (j + 0.5) / q);
            if (point_shape_distance(dom, p) <= 1.0) ++hits;
        }
    return static_cast<double>(hits) / (static_cast<double>(q) * q);
}

struct Hit {
    double s;
    bool degenerate;
};

void circle_hits(const Circle& c, const Eigen::Vector2d& x, const Eigen::Vector2d& v,
                 std::vector<Hit>& hits) {
    // |x + s v - c|^2 = r^2, |v| = 1
    const Eigen::Vector2d d = x - c.center;
    const double b = 2.0 * d.dot(v);
    const double cc = d.squaredNorm() - c.radius * c.radius;
    const double disc = b * b - 4.0 * cc;
    if (disc < -kGeomEps) return;
    if (disc <= kGeomEps) {
        hits.push_back({-b / 2.0, true});  // tangential graze, flagged
        return;
    }
    const double root = std::sqrt(disc);
    hits.push_back({(-b - root) / 2.0, false});
    hits.push_back({(-b + root) / 2.0, false});
}

void polygon_hits(const Polygon& poly, const Eigen::Vector2d& x, const Eigen::Vector2d& v,
                  std::vector<Hit>& hits) {
    const auto& w = poly.vertices;
    for (std::size_t i = 0, j = w.size() - 1; i < w.size(); j = i++) {
        const Eigen::Vector2d e = w[i] - w[j];
        const double denom = v[0] * e[1] - v[1] * e[0];
        const Eigen::Vector2d rel = w[j] - x;
        if (std::abs(denom) < kGeomEps) {
            // parallel; collinear overlap is a degenerate grazing
            if (std::abs(rel[0] * v[1] - rel[1] * v[0]) < kGeomEps) hits.push_back({0.0, true});
            continue;
        }
        const double s = (rel[0] * e[1] - rel[1] * e[0]) / denom;
        const double u = (rel[0] * v[1] - rel[1] * v[0]) / denom;
        if (u < -kGeomEps || u > 1.0 + kGeomEps) continue;
        const bool endpoint = (u < kGeomEps || u > 1.0 - kGeomEps);
        hits.push_back({s, endpoint});
    }
}

}  // namespace

FlatDomain make_flat_domain(FlatWorld world, Circle circle) {
    if (!(circle.radius > 0.0)) throw std::invalid_argument("make_flat_domain: radius must be positive");
    if (world == FlatWorld::torus && circle.radius >= 0.5)
        throw std::invalid_argument("make_flat_domain: torus disk must have radius < 1/2");
    FlatDomain d;
    d.world = world;
    d.shape = circle;
    d.perimeter = 2.0 * M_PI * circle.radius;
    d.area_s1 = compute_area_s1(d);
    return d;
}

FlatDomain make_flat_domain(FlatWorld world, Polygon polygon) {
    if (polygon.vertices.size() < 3)
        throw std::invalid_argument("make_flat_domain: polygon needs >= 3 vertices");
    FlatDomain d;
    d.world = world;
    d.shape = polygon;
    double per = 0.0;
    const auto& v = polygon.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) per += (v[i] - v[j]).norm();
    d.perimeter = per;
    d.area_s1 = compute_area_s1(d);
    return d;
}

bool domain_contains(const FlatDomain& domain, const Eigen::Vector2d& p) {
    for (const auto& off : world_offsets(domain.world)) {
        if (std::holds_alternative<Circle>(domain.shape)) {
            Circle c = std::get<Circle>(domain.shape);
            c.center += off;
            if (point_in_circle(c, p)) return true;
        } else {
            Polygon poly = std::get<Polygon>(domain.shape);
            for (auto& q : poly.vertices) q += off;
            if (point_in_polygon(poly, p)) return true;
        }
    }
    return false;
}

std::vector<PosDir> sample_liouville(const FlatDomain& domain, long count, std::uint64_t seed) {
    (void)domain;
    if (count < 1) throw std::invalid_argument("sample_liouville: count must be >= 1");
    Rng rng(seed);
    std::vector<PosDir> out;
    out.reserve(count);
    for (long i = 0; i < count; ++i) {
        PosDir pd;
        pd.x = {rng.uniform(), rng.uniform()};
        const double theta = 2.0 * M_PI * rng.uniform();
        pd.v = {std::cos(theta), std::sin(theta)};
        out.push_back(pd);
    }
    return out;
}

LineTrace trace_line(const FlatDomain& domain, const Eigen::Vector2d& x,
                     const Eigen::Vector2d& v) {
    LineTrace tr;
    tr.x = x;
    tr.v = v;
    std::vector<Hit> hits;
    for (const auto& off : world_offsets(domain.world)) {
        if (std::holds_alternative<Circle>(domain.shape)) {
            Circle c = std::get<Circle>(domain.shape);
            c.center += off;
            circle_hits(c, x, v, hits);
        } else {
            Polygon poly = std::get<Polygon>(domain.shape);
            for (auto& q : poly.vertices) q += off;
            polygon_hits(poly, x, v, hits);
        }
    }
    std::vector<double> cuts;
    for (const Hit& h : hits) {
        if (h.degenerate) tr.degenerate = true;
        if (h.s > kGeomEps && h.s < 1.0 - kGeomEps && !h.degenerate) cuts.push_back(h.s);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < kGeomEps; }),
               cuts.end());

    // membership per cell between consecutive cuts, probed at midpoints
    std::vector<double> knots;
    knots.push_back(0.0);
    knots.insert(knots.end(), cuts.begin(), cuts.end());
    knots.push_back(1.0);
    bool prev_inside = false;
    double open_start = 0.0;
    for (std::size_t c = 0; c + 1 < knots.size(); ++c) {
        const double mid = 0.5 * (knots[c] + knots[c + 1]);
        const bool inside = domain_contains(domain, x + mid * v);
        if (inside && !prev_inside) open_start = knots[c];
        if (!inside && prev_inside) tr.components.push_back({open_start, knots[c]});
        if (c > 0 && inside != prev_inside) ++tr.jumps;
        prev_inside = inside;
    }
    if (prev_inside) tr.components.push_back({open_start, 1.0});
    return tr;
}

CrossingCount crossing_count(const LineTrace& trace) {
    CrossingCount cc;
    cc.components = static_cast<int>(trace.components.size());
    cc.total_variation = static_cast<double>(trace.jumps);
    cc.flagged = trace.degenerate;
    cc.bound_ok = cc.components <= 1.0 + 0.5 * cc.total_variation;
    return cc;
}

CrossingAverage crossing_average(const FlatDomain& domain, long samples, std::uint64_t seed) {
    if (samples < 10000) throw std::invalid_argument("crossing_average: need >= 10^4 samples");
    const auto pts = sample_liouville(domain, samples, seed);
    double sum = 0.0, sumsq = 0.0;
    for (const PosDir& pd : pts) {
        const LineTrace tr = trace_line(domain, pd.x, pd.v);
        const double c = static_cast<double>(tr.components.size());
        sum += c;
        sumsq += c * c;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    CrossingAverage ca;
    ca.samples = samples;
    ca.mean_scaled = kLiouvilleCn * mean;
    ca.se_scaled = kLiouvilleCn * std::sqrt(var / n);
    ca.bound = kLiouvilleCn * (domain.area_s1 + 0.5 * domain.perimeter);
    ca.pass = ca.mean_scaled + 3.0 * ca.se_scaled <= ca.bound;
    return ca;
}

SemiconcavityReport semiconcavity_check(const std::vector<double>& u, double ds, double zeta,
                                        double tol) {
    if (u.size() < 3) throw std::invalid_argument("semiconcavity_check: need >= 3 samples");
    SemiconcavityReport rep;
    rep.max_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double second = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (ds * ds) - 2.0 * zeta;
        rep.max_value = std::max(rep.max_value, second);
    }
    rep.pass = rep.max_value <= tol;
    return rep;
}

DerivStability deriv_stability_1d(const std::vector<double>& u, const std::vector<double>& v,
                                  double a, double b) {
    const int n = static_cast<int>(u.size());
    if (n < 3 || v.size() != u.size())
        throw std::invalid_argument("deriv_stability_1d: need matching grids with >= 3 samples");
    if (!(b > a)) throw std::invalid_argument("deriv_stability_1d: empty interval");
    const double h = (b - a) / (n - 1);
    auto check_convex = [&](const std::vector<double>& f, const char* name) {
        double scale = 1.0;
        for (double x : f) scale = std::max(scale, std::abs(x));
        for (int i = 1; i + 1 < n; ++i)
            if (f[i + 1] - 2.0 * f[i] + f[i - 1] < -1e-12 * scale)
                throw std::invalid_argument(std::string("deriv_stability_1d: ") + name +
                                            " is not convex on the grid");
    };
    check_convex(u, "u");
    check_convex(v, "v");

    auto slopes = [&](const std::vector<double>& f) {
        std::vector<double> d(n - 1);
        for (int i = 0; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i]) / h;
        return d;
    };
    const auto du = slopes(u), dv = slopes(v);
    double lhs = 0.0;
    for (int i = 0; i + 1 < n; ++i) lhs += h * (du[i] - dv[i]) * (du[i] - dv[i]);

    auto sup_deriv = [&](const std::vector<double>& f, const std::vector<double>& d) {
        // convex => sup |f'| at an endpoint; 3-point one-sided estimates are
        // exact for quadratics and upper bounds for piecewise-linear data
        double s = std::max(std::abs((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)),
                            std::abs((3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)));
        for (double x : d) s = std::max(s, std::abs(x));
        return s;
    };
    double l2 = 0.5 * (u[0] - v[0]) * (u[0] - v[0]) + 0.5 * (u[n - 1] - v[n - 1]) * (u[n - 1] - v[n - 1]);
    for (int i = 1; i + 1 < n; ++i) l2 += (u[i] - v[i]) * (u[i] - v[i]);
    l2 *= h;

    DerivStability ds;
    ds.lhs = lhs;
    ds.rhs = 8.0 * std::pow(sup_deriv(u, du) + sup_deriv(v, dv), 4.0 / 3.0) * std::cbrt(l2);
    ds.pass = ds.lhs <= ds.rhs + 1e-12;
    ds.slack = ds.rhs - ds.lhs;
    return ds;
}

GradDiscrepancy grad_potential_discrepancy(int k, double h, const Eigen::VectorXd& phi_mu,
                                           const Eigen::VectorXd& phi_nu,
                                           const Eigen::VectorXd& rho,
                                           const std::vector<char>& in_S) {
    if (phi_mu.size() != k * k || phi_nu.size() != k * k || rho.size() != k * k ||
        static_cast<int>(in_S.size()) != k * k)
        throw std::invalid_argument("grad_potential_discrepancy: size mismatch");
    auto grad = [&](const Eigen::VectorXd& f, int r, int c, int dr, int dc) {
        const int i = r * k + c;
        const int ip = (r + dr) * k + (c + dc);
        const int im = (r - dr) * k + (c - dc);
        const bool has_p = (r + dr >= 0 && r + dr < k && c + dc >= 0 && c + dc < k && in_S[ip]);
        const bool has_m = (r - dr >= 0 && r - dr < k && c - dc >= 0 && c - dc < k && in_S[im]);
        if (has_p && has_m) return (f[ip] - f[im]) / (2.0 * h);
        if (has_p) return (f[ip] - f[i]) / h;
        if (has_m) return (f[i] - f[im]) / h;
        return 0.0;
    };
    GradDiscrepancy gd;
    double l2 = 0.0;
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            const int i = r * k + c;
            if (!in_S[i] || rho[i] == 0.0) continue;
            const double gx = grad(phi_mu, r, c, 0, 1) - grad(phi_nu, r, c, 0, 1);
            const double gy = grad(phi_mu, r, c, 1, 0) - grad(phi_nu, r, c, 1, 0);
            gd.lhs += rho[i] * (gx * gx + gy * gy);
            l2 += rho[i] * (phi_mu[i] - phi_nu[i]) * (phi_mu[i] - phi_nu[i]);
        }
    gd.rhs_base = std::cbrt(l2);
    return gd;
}

}  // namespace otlab
