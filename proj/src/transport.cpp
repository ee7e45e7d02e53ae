#include "otlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace otlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Lp {
    Eigen::MatrixXd plan;
    Eigen::VectorXd u, v;
    double value = 0.0;
};

// Successive shortest augmenting paths with node potentials on the dense
// bipartite transportation graph. Reduced costs stay nonnegative, backward
// arcs (plan support) stay tight, so on termination the duals certify
// optimality: u_i + v_j <= c_ij with equality on the support.
Lp solve_transportation(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                        const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(supply.size());
    const int m = static_cast<int>(demand.size());
    Lp lp;
    lp.plan = Eigen::MatrixXd::Zero(n, m);
    lp.u.resize(n);
    lp.v = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < n; ++i) lp.u[i] = cost.row(i).minCoeff();

    Eigen::VectorXd rs = supply;  // residual supply
    Eigen::VectorXd rd = demand;  // residual demand
    double remaining = supply.sum();

    // node ids: 0..n-1 sources, n..n+m-1 sinks
    const int V = n + m;
    std::vector<double> dist(V);
    std::vector<int> prev(V);  // predecessor node, -1 at roots
    std::vector<char> done(V);

    const long max_aug = 8L * (n + m) + 256;
    long aug = 0;
    while (remaining > 1e-15) {
        if (++aug > max_aug)
            throw std::runtime_error("solve_transportation: augmentation budget exceeded");
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(prev.begin(), prev.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (int i = 0; i < n; ++i)
            if (rs[i] > 1e-15) dist[i] = 0.0;
        int sink = -1;
        while (true) {
            int w = -1;
            double best = kInf;
            for (int z = 0; z < V; ++z)
                if (!done[z] && dist[z] < best) {
                    best = dist[z];
                    w = z;
                }
            if (w < 0) break;
            done[w] = 1;
            if (w >= n && rd[w - n] > 1e-15) {
                sink = w - n;
                break;
            }
            if (w < n) {
                const int i = w;
                for (int j = 0; j < m; ++j) {
                    const double rc = std::max(0.0, cost(i, j) - lp.u[i] - lp.v[j]);
                    if (dist[i] + rc < dist[n + j]) {
                        dist[n + j] = dist[i] + rc;
                        prev[n + j] = i;
                    }
                }
            } else {
                const int j = w - n;
                for (int i = 0; i < n; ++i)
                    if (lp.plan(i, j) > 0.0 && dist[n + j] < dist[i]) {
                        dist[i] = dist[n + j];  // backward arcs are tight
                        prev[i] = n + j;
                    }
            }
        }
        if (sink < 0) throw std::runtime_error("solve_transportation: no augmenting path");
        const double dstar = dist[n + sink];

        // potential update keeps reduced costs nonnegative and zeroes the path;
        // unfinalized nodes sit at min(d, dstar) = dstar, which is what makes
        // stopping at the first deficit sink safe
        for (int i = 0; i < n; ++i) lp.u[i] += dstar - std::min(dist[i], dstar);
        for (int j = 0; j < m; ++j) lp.v[j] -= dstar - std::min(dist[n + j], dstar);

        // bottleneck along the path
        double delta = rd[sink];
        for (int z = n + sink; prev[z] != -1; z = prev[z]) {
            const int p = prev[z];
            if (z < n) delta = std::min(delta, lp.plan(z, p - n));  // backward arc
            if (p < n && prev[p] == -1) delta = std::min(delta, rs[p]);
        }
        for (int z = n + sink; prev[z] != -1; z = prev[z]) {
            const int p = prev[z];
            if (z >= n)
                lp.plan(p, z - n) += delta;
            else
                lp.plan(z, p - n) -= delta;
            if (p < n && prev[p] == -1) rs[p] -= delta;
        }
        rd[sink] -= delta;
        remaining -= delta;
    }
    lp.value = (lp.plan.array() * cost.array()).sum();
    return lp;
}

int find_position(const std::vector<int>& ids, int id, const char* what) {
    for (std::size_t k = 0; k < ids.size(); ++k)
        if (ids[k] == id) return static_cast<int>(k);
    throw std::invalid_argument(std::string("measure support index ") + std::to_string(id) +
                                " missing from cost " + what);
}

}  // namespace

CostMatrix make_cost(const Space& space, const std::vector<int>& S, const std::vector<int>& Y,
                     CostKind kind) {
    if (static_cast<long>(S.size()) * static_cast<long>(Y.size()) > kDeskScaleCap)
        throw std::invalid_argument(
            "make_cost: |S|*|Y| exceeds the desk-scale cap; split the instance or coarsen the "
            "fixture");
    CostMatrix cm;
    cm.kind = kind;
    cm.rows = S;
    cm.cols = Y;
    cm.c.resize(S.size(), Y.size());
    for (std::size_t a = 0; a < S.size(); ++a)
        for (std::size_t b = 0; b < Y.size(); ++b) {
            const double d = space.dist(S[a], Y[b]);
            cm.c(a, b) = (kind == CostKind::half_squared) ? 0.5 * d * d : d;
        }
    return cm;
}

PotentialPair solve_kantorovich(const ProbMeasure& rho, const ProbMeasure& target,
                                const CostMatrix& cost) {
    const int R = static_cast<int>(cost.rows.size());
    const int C = static_cast<int>(cost.cols.size());
    if (rho.support.empty() || target.support.empty())
        throw std::invalid_argument("solve_kantorovich: degenerate zero-support measure");

    Eigen::VectorXd supply = Eigen::VectorXd::Zero(R);
    for (std::size_t k = 0; k < rho.support.size(); ++k)
        supply[find_position(cost.rows, rho.support[k], "rows")] += rho.weights[k];
    Eigen::VectorXd demand = Eigen::VectorXd::Zero(C);
    for (std::size_t k = 0; k < target.support.size(); ++k)
        demand[find_position(cost.cols, target.support[k], "cols")] += target.weights[k];
    if (supply.sum() < 1e-14 || demand.sum() < 1e-14)
        throw std::invalid_argument("solve_kantorovich: degenerate zero-support measure");

    // active rows/cols (positive mass) enter the LP
    std::vector<int> ar, ac;
    for (int i = 0; i < R; ++i)
        if (supply[i] > 0.0) ar.push_back(i);
    for (int j = 0; j < C; ++j)
        if (demand[j] > 0.0) ac.push_back(j);
    Eigen::VectorXd s(ar.size()), d(ac.size());
    Eigen::MatrixXd sub(ar.size(), ac.size());
    for (std::size_t a = 0; a < ar.size(); ++a) {
        s[a] = supply[ar[a]];
        for (std::size_t b = 0; b < ac.size(); ++b) sub(a, b) = cost.c(ar[a], ac[b]);
    }
    for (std::size_t b = 0; b < ac.size(); ++b) d[b] = demand[ac[b]];

    const Lp lp = solve_transportation(s, d, sub);

    PotentialPair pp;
    pp.rows = cost.rows;
    pp.cols = cost.cols;
    pp.plan = Eigen::MatrixXd::Zero(R, C);
    for (std::size_t a = 0; a < ar.size(); ++a)
        for (std::size_t b = 0; b < ac.size(); ++b) pp.plan(ar[a], ac[b]) = lp.plan(a, b);
    pp.value = lp.value;

    pp.psi.assign(C, 0.0);
    for (std::size_t b = 0; b < ac.size(); ++b) pp.psi[ac[b]] = lp.v[b];
    // inactive cols: tight-free extension psi(y) = min_x (c - phi) keeps feasibility
    for (int j = 0; j < C; ++j)
        if (demand[j] <= 0.0) {
            double best = kInf;
            for (std::size_t a = 0; a < ar.size(); ++a)
                best = std::min(best, cost.c(ar[a], j) - lp.u[a]);
            pp.psi[j] = best;
        }

    // representative duals: phi := (psi)^c, then mean-zero under rho
    pp.phi.assign(R, 0.0);
    for (int i = 0; i < R; ++i) {
        double best = kInf;
        for (int j = 0; j < C; ++j) best = std::min(best, cost.c(i, j) - pp.psi[j]);
        pp.phi[i] = best;
    }
    double mean = 0.0;
    for (int i = 0; i < R; ++i) mean += supply[i] * pp.phi[i];
    for (auto& f : pp.phi) f -= mean;
    for (auto& g : pp.psi) g += mean;
    if (cost.kind == CostKind::distance) pp.w1 = pp.value;
    return pp;
}

CTransform c_transform(const std::vector<double>& psi, const CostMatrix& cost) {
    const int R = static_cast<int>(cost.rows.size());
    const int C = static_cast<int>(cost.cols.size());
    if (static_cast<int>(psi.size()) != C)
        throw std::invalid_argument("c_transform: psi size mismatch");
    CTransform ct;
    ct.values.assign(R, 0.0);
    ct.argmin.assign(R, {});
    for (int i = 0; i < R; ++i) {
        double best = kInf;
        for (int j = 0; j < C; ++j) best = std::min(best, cost.c(i, j) - psi[j]);
        ct.values[i] = best;
        for (int j = 0; j < C; ++j)
            if (cost.c(i, j) - psi[j] <= best + 1e-12) ct.argmin[i].push_back(j);
    }
    return ct;
}

double wasserstein1(const ProbMeasure& mu, const ProbMeasure& nu, const Space& space) {
    const CostMatrix cm = make_cost(space, mu.support, nu.support, CostKind::distance);
    ProbMeasure muc = mu, nuc = nu;  // positions align with supports by construction
    const PotentialPair pp = solve_kantorovich(muc, nuc, cm);
    return pp.value;
}

TransportMap extract_map(const PotentialPair& pair, double tolerance, bool strict) {
    const int R = static_cast<int>(pair.rows.size());
    TransportMap tm;
    tm.assignment.assign(R, -1);
    double kept = 0.0;
    for (int i = 0; i < R; ++i) {
        int best = 0;
        for (int j = 1; j < static_cast<int>(pair.cols.size()); ++j)
            if (pair.plan(i, j) > pair.plan(i, best)) best = j;
        tm.assignment[i] = pair.cols[best];
        kept += pair.plan(i, best);
    }
    tm.split_mass = std::max(0.0, 1.0 - kept);
    if (strict && tm.split_mass > tolerance)
        throw std::runtime_error("extract_map: plan not deterministic (split mass " +
                                 std::to_string(tm.split_mass) + ")");
    return tm;
}

double map_discrepancy(const TransportMap& map_mu, const TransportMap& map_nu,
                       const ProbMeasure& rho, const Space& space) {
    if (map_mu.assignment.size() != map_nu.assignment.size())
        throw std::invalid_argument("map_discrepancy: map size mismatch");
    if (rho.support.size() != map_mu.assignment.size())
        throw std::invalid_argument("map_discrepancy: rho support does not match map rows");
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k) {
        const double d = space.dist(map_mu.assignment[k], map_nu.assignment[k]);
        acc += rho.weights[k] * d * d;
    }
    return acc;
}

}  // namespace otlab
