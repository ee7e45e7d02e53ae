#include "otlab/detail/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otlab::detail {

LpResult simplex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.minCoeff() < 0.0) throw std::invalid_argument("simplex_max: b must be nonnegative");

    // tableau: rows 0..m-1 constraints, row m objective; cols 0..n-1 vars,
    // n..n+m-1 slacks, last col rhs
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    T.block(0, 0, m, n) = A;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.block(0, n + m, m, 1) = b;
    T.block(m, 0, 1, n) = -c.transpose();

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    const double eps = 1e-11;
    const long max_iter = 20000L + 50L * (m + n);
    for (long it = 0; it < max_iter; ++it) {
        // Bland: entering = lowest-index column with negative reduced cost
        int col = -1;
        for (int j = 0; j < n + m; ++j)
            if (T(m, j) < -eps) {
                col = j;
                break;
            }
        if (col < 0) {
            LpResult r;
            r.x = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i)
                if (basis[i] < n) r.x[basis[i]] = T(i, n + m);
            r.value = T(m, n + m);
            // duals are the slack reduced costs; gap certifies optimality
            double dual = 0.0;
            for (int i = 0; i < m; ++i) dual += T(m, n + i) * b[i];
            r.duality_gap = std::abs(dual - r.value);
            return r;
        }
        // ratio test, ties broken by lowest basis index (Bland)
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
            if (T(i, col) > eps) {
                const double ratio = T(i, n + m) / T(i, col);
                if (ratio < best - 1e-12 || (ratio < best + 1e-12 && (row < 0 || basis[i] < basis[row]))) {
                    best = ratio;
                    row = i;
                }
            }
        if (row < 0) {
            LpResult r;
            r.bounded = false;
            return r;
        }
        T.row(row) /= T(row, col);
        for (int i = 0; i <= m; ++i)
            if (i != row && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(row);
        basis[row] = col;
    }
    throw std::runtime_error("simplex_max: iteration budget exceeded");
}

}  // namespace otlab::detail
