#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "otlab/fixtures.hpp"
#include "otlab/heat.hpp"
#include "otlab/space.hpp"
#include "otlab/transport.hpp"

namespace otlab {

// McShane extension of psi from Y to all of X, plus the decay-corrected
// psi_star = psi_bar - Lambda * d(., Y) with Lambda = D + Lip(psi) + 1.
struct ExtendedPotential {
    std::vector<double> psi;  // on domain.Y
    Eigen::VectorXd psi_bar;  // on X
    Eigen::VectorXd psi_star; // on X
    double lip = 0.0;
    double lambda = 0.0;
};

ExtendedPotential mcshane_extend(const std::vector<double>& psi, const DomainPair& domain,
                                 const Space& space);

// Conditionals mu_x^t[phi](y) ~ e^{phi(y)/t} p_{t/2}(x,y) m_y and the
// rho-mixture marginal.
struct GibbsSystem {
    double t = 0.0;
    Eigen::VectorXd phi;
    Eigen::MatrixXd mu_x;      // row x = mu_x^t[phi]
    Eigen::VectorXd marginal;  // mu^t[phi] = sum_x rho_x mu_x
};

// Phi_t[phi](x) = -t log sum_y e^{phi(y)/t} p_{t/2}(x,y) m_y, stabilized
// log-sum-exp. kernel.t must equal t/2.
double phi_t(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
             const Eigen::VectorXd& m, int x);
Eigen::VectorXd phi_t_all(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                          const Eigen::VectorXd& m);

// K_t[phi] = sum_x rho_x Phi_t[phi](x)
double k_t(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
           const Eigen::VectorXd& m, const ProbMeasure& rho);

GibbsSystem gibbs(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                  const Eigen::VectorXd& m, const ProbMeasure& rho);

// d/ds K_t[phi + s v] at s=0, equals -E_{mu^t[phi]}(v)
double first_variation(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                       const Eigen::VectorXd& m, const ProbMeasure& rho,
                       const Eigen::VectorXd& v);

// d^2/ds^2 K_t[phi + s v] at s=0, equals -(1/t) sum_x rho_x Var_{mu_x}(v) <= 0
double second_variation(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                        const Eigen::VectorXd& m, const ProbMeasure& rho,
                        const Eigen::VectorXd& v);

struct CovarianceCheck {
    double lhs = 0.0;       // E_{mu_x'}(v) - E_{mu_x}(v)
    double rhs = 0.0;       // Cov_{mu_x}(v, e^w) / E_{mu_x}(e^w), w = log kernel ratio
    double residual = 0.0;  // |lhs - rhs|
};

// exact discrete covariance identity along the edge (x, x'); throws if the
// pair is not adjacent
CovarianceCheck covariance_identity_check(const Eigen::VectorXd& phi, double t,
                                          const HeatKernel& kernel, const Eigen::VectorXd& m,
                                          const Eigen::VectorXd& v, const Space& space, int x,
                                          int xp);

struct LimitRow {
    double h = 0.0;
    double t = 0.0;
    double sup_gap = 0.0;
};

// sup_{x in S} |Phi_t[psi_*](x) - psi^c(x)| along an interval refinement
// family; S, Y are coordinate ranges, psi is a function of the coordinate.
std::vector<LimitRow> ctransform_limit(const std::vector<RefinementLevel>& family,
                                       const TRule& t_rule, double s_lo, double s_hi,
                                       double y_lo, double y_hi,
                                       const std::function<double(double)>& psi_of_coord);

struct MarginalAtom {
    double coord = 0.0;
    double weight = 0.0;
};

// |E_{mu^t[phi_*]}(v) - E_nu(v)| along the family, with phi the Y-side
// Kantorovich potential of the solve rho -> nu at each level.
std::vector<LimitRow> marginal_limit(const std::vector<RefinementLevel>& family,
                                     const TRule& t_rule, double s_lo, double s_hi,
                                     const std::vector<MarginalAtom>& nu,
                                     const std::function<double(double)>& v_of_coord);

}  // namespace otlab
