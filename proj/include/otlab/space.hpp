#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace otlab {

struct CurvatureMeta {
    double K = 0.0;
    double N = 1.0;
};

struct Edge {
    int u = 0;
    int v = 0;
    double length = 1.0;
};

// Finite metric measure space: weighted graph, shortest-path metric,
// positive reference weights m.
struct Space {
    int n = 0;
    std::vector<Edge> edges;
    Eigen::MatrixXd dist;               // n x n shortest-path distances
    Eigen::VectorXd m;                  // reference measure weights, all > 0
    CurvatureMeta curvature;
    std::vector<std::vector<int>> adj;  // neighbor lists (indices into edges)

    double total_mass() const { return m.sum(); }
    bool adjacent(int a, int b) const;
    double edge_length(int a, int b) const;  // throws if not adjacent
    double min_edge_length() const;
};

struct DomainPair {
    std::vector<int> S;   // open-domain proxy
    std::vector<int> Y;   // compact target proxy
    double D = 0.0;       // diam(S u Y)
    std::vector<int> S1;  // {x : d(x, S) <= 1}
    std::optional<int> john_center;
    double eta = 0.0;
};

struct ProbMeasure {
    std::vector<int> support;
    std::vector<double> weights;
    std::optional<std::pair<double, double>> density_bounds;  // (a1, a2) vs m

    double total() const;
    // throws if weights do not sum to 1 (1e-12) or density bounds fail
    void validate(const Space& space) const;
    // dense vector of length space.n
    Eigen::VectorXd dense(int n) const;
};

Space build_space(const std::vector<Edge>& edges, const Eigen::VectorXd& m,
                  CurvatureMeta curvature = {});

// closed ball {i : dist(center, i) <= r}
std::vector<int> ball(const Space& space, int center, double r);

DomainPair make_domain_pair(const Space& space, std::vector<int> S, std::vector<int> Y,
                            std::optional<int> john_center = std::nullopt, double eta = 0.0);

// rho on S with a1*m <= rho <= a2*m, sum 1, deterministic in seed
ProbMeasure make_density(const Space& space, const std::vector<int>& S, double a1, double a2,
                         std::uint64_t seed);

}  // namespace otlab
