#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

namespace otlab {

enum class FlatWorld { torus, square };

struct Circle {
    Eigen::Vector2d center;
    double radius = 0.0;
};

struct Polygon {
    std::vector<Eigen::Vector2d> vertices;  // counterclockwise
};

struct FlatDomain {
    FlatWorld world = FlatWorld::torus;
    std::variant<Circle, Polygon> shape;
    double perimeter = 0.0;
    double area_s1 = 0.0;  // area of the 1-neighborhood of S clipped to the world
};

FlatDomain make_flat_domain(FlatWorld world, Circle circle);
FlatDomain make_flat_domain(FlatWorld world, Polygon polygon);

inline constexpr double kLiouvilleCn = 6.283185307179586476925286766559;  // c_2 = H^1(S^1)

struct PosDir {
    Eigen::Vector2d x;
    Eigen::Vector2d v;  // unit
};

std::vector<PosDir> sample_liouville(const FlatDomain& domain, long count, std::uint64_t seed);

// unit-speed straight trace b_s = x + s v on [0,1]; components of {s : b_s in S}
struct LineTrace {
    Eigen::Vector2d x;
    Eigen::Vector2d v;
    std::vector<std::pair<double, double>> components;
    int jumps = 0;           // boundary crossings in (0,1)
    bool degenerate = false; // tangential/grazing intersection flagged
};

LineTrace trace_line(const FlatDomain& domain, const Eigen::Vector2d& x,
                     const Eigen::Vector2d& v);

bool domain_contains(const FlatDomain& domain, const Eigen::Vector2d& p);

struct CrossingCount {
    int components = 0;
    double total_variation = 0.0;
    bool bound_ok = true;  // components <= 1 + total_variation / 2
    bool flagged = false;
};

CrossingCount crossing_count(const LineTrace& trace);

struct CrossingAverage {
    double mean_scaled = 0.0;  // c_n * E[#I_S]
    double se_scaled = 0.0;
    double bound = 0.0;        // c_n (area_S1 + Per(S)/2)
    bool pass = false;
    long samples = 0;
};

CrossingAverage crossing_average(const FlatDomain& domain, long samples, std::uint64_t seed);

struct SemiconcavityReport {
    double max_value = 0.0;  // largest centered second difference of u - zeta s^2, per ds^2
    bool pass = false;
};

SemiconcavityReport semiconcavity_check(const std::vector<double>& u, double ds, double zeta,
                                        double tol = 1e-9);

struct DerivStability {
    double lhs = 0.0;   // || u' - v' ||_{L2}^2
    double rhs = 0.0;   // 8 (||u'||_inf + ||v'||_inf)^{4/3} ||u - v||_{L2}^{2/3}
    bool pass = false;
    double slack = 0.0;
};

// u, v convex samples on a uniform grid of [a, b]; throws on non-convex input
DerivStability deriv_stability_1d(const std::vector<double>& u, const std::vector<double>& v,
                                  double a, double b);

struct GradDiscrepancy {
    double lhs = 0.0;       // int_S |grad phi_mu - grad phi_nu|^2 drho
    double rhs_base = 0.0;  // (int_S |phi_mu - phi_nu|^2 drho)^{1/3}
};

// potentials on a k x k planar grid with spacing h; central differences with
// one-sided fallback at the S-boundary; rho are dense weights on the grid
GradDiscrepancy grad_potential_discrepancy(int k, double h, const Eigen::VectorXd& phi_mu,
                                           const Eigen::VectorXd& phi_nu,
                                           const Eigen::VectorXd& rho,
                                           const std::vector<char>& in_S);

}  // namespace otlab
