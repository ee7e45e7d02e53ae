#pragma once

#include <Eigen/Dense>
#include <vector>

#include "otlab/regularize.hpp"
#include "otlab/space.hpp"

namespace otlab {

struct CoverBall {
    int center = 0;
    double radius = 0.0;
    std::vector<int> points;  // closed-ball membership in the space
};

struct BomanCover {
    std::vector<CoverBall> balls;
    int central_index = 0;
    std::vector<std::vector<int>> chains;  // per ball: B0, ..., BN = ball
    double E = 1.0;                        // overlap bound for the 2B family
    double F = 1.0;                        // chain dilation bound
    double G = 1.0;                        // consecutive-overlap measure bound
    double beta = 1.0;                     // dyadic doubling bound of rho on cover balls
};

struct PoincareResult {
    double constant = 0.0;
    Eigen::VectorXd witness;  // on the ball's points
    double duality_gap = 0.0;
};

inline constexpr int kPoincareBallCap = 18;

// smallest C with int_B |f - E_{rho_B} f| drho_B <= C r0 int_B |grad f| drho_B,
// computed exactly: one small LP per sign pattern of f - mean (the objective
// is a convex max, so the optimum is scanned over orthants). Gradient is the
// max-incident-edge-slope convention restricted to edges inside B.
PoincareResult local_poincare_constant(const Space& space, const ProbMeasure& rho,
                                       const std::vector<int>& B, double r0);

// Whitney-style greedy ball cover of S with chains toward the John center
// along shortest paths in the ball-overlap graph; constants are certified
// maxima, re-verified exhaustively before return.
BomanCover boman_cover(const Space& space, const std::vector<int>& S, const ProbMeasure& rho,
                       int john_center, double eta);

struct GluingReport {
    double lhs = 0.0;
    double rhs_sum = 0.0;
    double C5 = 0.0;  // 2 (1 + 2 beta^2 E F^{log beta / log 2} G)
    double slack = 0.0;
    bool pass = false;
};

GluingReport gluing_check(const BomanCover& cover, const ProbMeasure& rho,
                          const Eigen::VectorXd& f);

struct ConcavityProbe {
    double lhs = 0.0;       // int_S |E_{mu_x}(v) - E_{mu^t}(v)| drho
    double rhs_base = 0.0;  // (1/sqrt t) (int_S Var_{mu_x}(v) drho)^{1/2}
    double ratio = 0.0;     // lhs / rhs_base (the empirical kappa for this v)
};

ConcavityProbe global_concavity_probe(const GibbsSystem& gs, const ProbMeasure& rho,
                                      const Eigen::VectorXd& v);

}  // namespace otlab
