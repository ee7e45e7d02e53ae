#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "otlab/space.hpp"

namespace otlab {

enum class CostKind { half_squared, distance };

struct CostMatrix {
    CostKind kind = CostKind::half_squared;
    std::vector<int> rows;  // S indices
    std::vector<int> cols;  // Y indices
    Eigen::MatrixXd c;
};

CostMatrix make_cost(const Space& space, const std::vector<int>& S, const std::vector<int>& Y,
                     CostKind kind);

// Dual potentials with the optimal plan. phi is fixed to (psi)^c and shifted
// so that E_rho(phi) = 0 (psi shifted oppositely to keep feasibility tight).
struct PotentialPair {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> phi;   // on rows
    std::vector<double> psi;   // on cols
    Eigen::MatrixXd plan;
    double value = 0.0;
    std::optional<double> w1;  // set for distance-kind cost
};

struct TransportMap {
    std::vector<int> assignment;  // space index of T(x) per row
    double split_mass = 0.0;
};

inline constexpr long kDeskScaleCap = 250000;  // |S| * |Y| limit per solve

// Exact LP optimum via successive shortest augmenting paths with potentials;
// deterministic for fixed input.
PotentialPair solve_kantorovich(const ProbMeasure& rho, const ProbMeasure& target,
                                const CostMatrix& cost);

struct CTransform {
    std::vector<double> values;            // psi^c on rows
    std::vector<std::vector<int>> argmin;  // minimizing col positions per row
};

// psi^c(x) = min_{y in cols} { c(x,y) - psi(y) }
CTransform c_transform(const std::vector<double>& psi, const CostMatrix& cost);

double wasserstein1(const ProbMeasure& mu, const ProbMeasure& nu, const Space& space);

TransportMap extract_map(const PotentialPair& pair, double tolerance, bool strict = false);

// int d^2(T_mu(x), T_nu(x)) drho
double map_discrepancy(const TransportMap& map_mu, const TransportMap& map_nu,
                       const ProbMeasure& rho, const Space& space);

}  // namespace otlab
