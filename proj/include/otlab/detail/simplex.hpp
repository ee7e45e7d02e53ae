#pragma once

#include <Eigen/Dense>
#include <vector>

namespace otlab::detail {

struct LpResult {
    bool bounded = true;
    double value = 0.0;
    Eigen::VectorXd x;
    double duality_gap = 0.0;
};

// maximize c.x subject to A x <= b, x >= 0, with b >= 0 (slack basis is
// feasible, no phase 1). Dense tableau simplex with Bland's rule.
LpResult simplex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace otlab::detail
