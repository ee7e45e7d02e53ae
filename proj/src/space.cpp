#include "otlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "otlab/rng.hpp"

namespace otlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dijkstra with deterministic tie-breaking: lowest-index predecessor wins.
Eigen::VectorXd shortest_paths_from(const Space& space, int src) {
    const int n = space.n;
    Eigen::VectorXd out = Eigen::VectorXd::Constant(n, kInf);
    out[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, src);
    std::vector<char> done(n, 0);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (int ei : space.adj[u]) {
            const Edge& e = space.edges[ei];
            const int v = (e.u == u) ? e.v : e.u;
            const double nd = d + e.length;
            if (nd < out[v]) {
                out[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return out;
}

}  // namespace

bool Space::adjacent(int a, int b) const {
    for (int ei : adj[a]) {
        const Edge& e = edges[ei];
        if (e.u + e.v - a == b) return true;
    }
    return false;
}

double Space::edge_length(int a, int b) const {
    for (int ei : adj[a]) {
        const Edge& e = edges[ei];
        if (e.u + e.v - a == b) return e.length;
    }
    throw std::invalid_argument("edge_length: points not adjacent");
}

double Space::min_edge_length() const {
    double h = kInf;
    for (const Edge& e : edges) h = std::min(h, e.length);
    return h;
}

Space build_space(const std::vector<Edge>& edges, const Eigen::VectorXd& m,
                  CurvatureMeta curvature) {
    Space sp;
    sp.n = static_cast<int>(m.size());
    sp.edges = edges;
    sp.m = m;
    sp.curvature = curvature;
    if (sp.n <= 0) throw std::invalid_argument("build_space: empty space");
    for (int i = 0; i < sp.n; ++i)
        if (!(m[i] > 0.0)) throw std::invalid_argument("build_space: nonpositive mass at " + std::to_string(i));
    sp.adj.assign(sp.n, {});
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        if (e.u < 0 || e.u >= sp.n || e.v < 0 || e.v >= sp.n || e.u == e.v)
            throw std::invalid_argument("build_space: bad edge endpoints");
        if (!(e.length > 0.0)) throw std::invalid_argument("build_space: nonpositive edge length");
        sp.adj[e.u].push_back(static_cast<int>(k));
        sp.adj[e.v].push_back(static_cast<int>(k));
    }
    sp.dist.resize(sp.n, sp.n);
    for (int i = 0; i < sp.n; ++i) sp.dist.row(i) = shortest_paths_from(sp, i).transpose();
    for (int i = 0; i < sp.n; ++i)
        for (int j = 0; j < sp.n; ++j)
            if (!std::isfinite(sp.dist(i, j)))
                throw std::invalid_argument("build_space: disconnected graph, metric undefined");
    // enforce exact symmetry against per-source roundoff
    sp.dist = ((sp.dist + sp.dist.transpose()) * 0.5).eval();
    return sp;
}

std::vector<int> ball(const Space& space, int center, double r) {
    if (r < 0.0) throw std::invalid_argument("ball: negative radius");
    std::vector<int> out;
    for (int i = 0; i < space.n; ++i)
        if (space.dist(center, i) <= r) out.push_back(i);
    return out;
}

DomainPair make_domain_pair(const Space& space, std::vector<int> S, std::vector<int> Y,
                            std::optional<int> john_center, double eta) {
    if (S.empty() || Y.empty()) throw std::invalid_argument("make_domain_pair: empty S or Y");
    DomainPair d;
    d.S = std::move(S);
    d.Y = std::move(Y);
    d.john_center = john_center;
    d.eta = eta;
    double D = 0.0;
    std::vector<int> su;
    su.insert(su.end(), d.S.begin(), d.S.end());
    su.insert(su.end(), d.Y.begin(), d.Y.end());
    for (int a : su)
        for (int b : su) D = std::max(D, space.dist(a, b));
    d.D = D;
    for (int i = 0; i < space.n; ++i) {
        double ds = kInf;
        for (int s : d.S) ds = std::min(ds, space.dist(i, s));
        if (ds <= 1.0) d.S1.push_back(i);
    }
    return d;
}

double ProbMeasure::total() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

Eigen::VectorXd ProbMeasure::dense(int n) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < support.size(); ++k) v[support[k]] += weights[k];
    return v;
}

void ProbMeasure::validate(const Space& space) const {
    if (support.size() != weights.size())
        throw std::invalid_argument("ProbMeasure: support/weight size mismatch");
    for (double w : weights)
        if (w < 0.0) throw std::invalid_argument("ProbMeasure: negative weight");
    if (std::abs(total() - 1.0) > 1e-12) throw std::invalid_argument("ProbMeasure: weights do not sum to 1");
    if (density_bounds) {
        const auto [a1, a2] = *density_bounds;
        for (std::size_t k = 0; k < support.size(); ++k) {
            const double mi = space.m[support[k]];
            if (weights[k] < a1 * mi - 1e-12 || weights[k] > a2 * mi + 1e-12)
                throw std::invalid_argument("ProbMeasure: density bound violated at index " +
                                            std::to_string(support[k]));
        }
    }
}

ProbMeasure make_density(const Space& space, const std::vector<int>& S, double a1, double a2,
                         std::uint64_t seed) {
    if (S.empty()) throw std::invalid_argument("make_density: empty support");
    if (a1 > a2) throw std::invalid_argument("make_density: a1 > a2");
    double mS = 0.0;
    for (int i : S) mS += space.m[i];
    if (a1 * mS > 1.0 + 1e-12)
        throw std::invalid_argument("make_density: lower bound infeasible, a1*m(S) > 1");
    if (a2 * mS < 1.0 - 1e-12)
        throw std::invalid_argument("make_density: upper bound infeasible, a2*m(S) < 1");

    const std::size_t k = S.size();
    Rng rng(seed);
    std::vector<double> u(k);
    for (auto& x : u) x = rng.uniform();

    // w_i = a1 m_i + theta * u_i (a2-a1) m_i, theta chosen so the total is 1;
    // if that needs theta > 1, move down from the a2 side instead.
    ProbMeasure rho;
    rho.support = S;
    rho.weights.assign(k, 0.0);
    rho.density_bounds = std::make_pair(a1, a2);
    double span = 0.0;
    for (std::size_t j = 0; j < k; ++j) span += u[j] * (a2 - a1) * space.m[S[j]];
    const double need_up = 1.0 - a1 * mS;
    if (span >= need_up && span > 0.0) {
        const double theta = need_up / span;
        for (std::size_t j = 0; j < k; ++j)
            rho.weights[j] = a1 * space.m[S[j]] + theta * u[j] * (a2 - a1) * space.m[S[j]];
    } else {
        double span_dn = 0.0;
        for (std::size_t j = 0; j < k; ++j) span_dn += (1.0 - u[j]) * (a2 - a1) * space.m[S[j]];
        const double need_dn = a2 * mS - 1.0;
        const double theta = (span_dn > 0.0) ? need_dn / span_dn : 0.0;
        for (std::size_t j = 0; j < k; ++j)
            rho.weights[j] = a2 * space.m[S[j]] - theta * (1.0 - u[j]) * (a2 - a1) * space.m[S[j]];
    }
    return rho;
}

}  // namespace otlab
