#include "otlab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "otlab/detail/simplex.hpp"

namespace otlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double measure_of(const ProbMeasure& rho, const std::vector<int>& pts) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k)
        if (std::find(pts.begin(), pts.end(), rho.support[k]) != pts.end()) acc += rho.weights[k];
    return acc;
}

double measure_intersect(const ProbMeasure& rho, const std::vector<int>& a,
                         const std::vector<int>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k) {
        const int i = rho.support[k];
        if (std::find(a.begin(), a.end(), i) != a.end() &&
            std::find(b.begin(), b.end(), i) != b.end())
            acc += rho.weights[k];
    }
    return acc;
}

}  // namespace

PoincareResult local_poincare_constant(const Space& space, const ProbMeasure& rho,
                                       const std::vector<int>& B, double r0) {
    const int k = static_cast<int>(B.size());
    if (k < 2) throw std::invalid_argument("local_poincare_constant: Poincaré undefined on a singleton ball");
    if (k > kPoincareBallCap)
        throw std::invalid_argument(
            "local_poincare_constant: ball exceeds the exact-LP cap (" +
            std::to_string(kPoincareBallCap) + " points); use a smaller ball");
    if (!(r0 > 0.0)) throw std::invalid_argument("local_poincare_constant: r0 must be positive");

    // normalized rho_B
    Eigen::VectorXd w(k);
    for (int a = 0; a < k; ++a) {
        double v = 0.0;
        for (std::size_t j = 0; j < rho.support.size(); ++j)
            if (rho.support[j] == B[a]) v += rho.weights[j];
        w[a] = v;
    }
    const double wsum = w.sum();
    if (wsum <= 0.0) throw std::invalid_argument("local_poincare_constant: rho vanishes on the ball");
    w /= wsum;

    // edges inside B
    struct E2 {
        int a, b;
        double len;
    };
    std::vector<E2> edges;
    for (const Edge& e : space.edges) {
        auto ia = std::find(B.begin(), B.end(), e.u);
        auto ib = std::find(B.begin(), B.end(), e.v);
        if (ia != B.end() && ib != B.end())
            edges.push_back({static_cast<int>(ia - B.begin()), static_cast<int>(ib - B.begin()),
                             e.length});
    }

    // LP variables: f split into fp, fn for points 1..k-1 (f_0 = 0), plus g_a >= 0.
    // Constraints: +-(f_b - f_a)/len - g_a <= 0 per directed edge end, and
    // sum_a w_a g_a <= 1. Objective per sign vector sigma: sum_a w_a (sigma_a - sbar) f_a.
    const int nf = k - 1;
    const int nvar = 2 * nf + k;
    const int ncon = 4 * static_cast<int>(edges.size()) + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ncon, nvar);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ncon);
    auto fp = [&](int a) { return a - 1; };        // valid for a >= 1
    auto fn = [&](int a) { return nf + a - 1; };
    auto gv = [&](int a) { return 2 * nf + a; };
    int r = 0;
    // sign * (f_hi - f_lo)/len - g_at <= 0
    auto add_slope = [&](int at, int lo, int hi, double len, double sign) {
        if (hi >= 1) {
            A(r, fp(hi)) += sign / len;
            A(r, fn(hi)) -= sign / len;
        }
        if (lo >= 1) {
            A(r, fp(lo)) -= sign / len;
            A(r, fn(lo)) += sign / len;
        }
        A(r, gv(at)) = -1.0;
        ++r;
    };
    for (const E2& e : edges)
        for (double sign : {1.0, -1.0}) {
            add_slope(e.a, e.a, e.b, e.len, sign);
            add_slope(e.b, e.a, e.b, e.len, sign);
        }
    for (int a = 0; a < k; ++a) A(r, gv(a)) = w[a];
    b[r] = 1.0;
    ++r;

    PoincareResult best;
    best.constant = -kInf;
    const std::uint64_t patterns = 1ULL << (k - 1);  // sigma_0 fixed by symmetry
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        Eigen::VectorXd sigma(k);
        sigma[0] = 1.0;
        for (int a = 1; a < k; ++a) sigma[a] = (mask >> (a - 1)) & 1 ? 1.0 : -1.0;
        const double sbar = w.dot(sigma);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
        for (int a = 1; a < k; ++a) {
            const double coef = w[a] * (sigma[a] - sbar);
            c[fp(a)] = coef;
            c[fn(a)] = -coef;
        }
        const detail::LpResult lr = detail::simplex_max(c, A, b);
        if (!lr.bounded) throw std::runtime_error("local_poincare_constant: unbounded LP");
        if (lr.value > best.constant) {
            best.constant = lr.value;
            best.duality_gap = lr.duality_gap;
            best.witness.resize(k);
            best.witness[0] = 0.0;
            for (int a = 1; a < k; ++a) best.witness[a] = lr.x[fp(a)] - lr.x[fn(a)];
        }
    }
    best.constant /= r0;
    return best;
}

BomanCover boman_cover(const Space& space, const std::vector<int>& S, const ProbMeasure& rho,
                       int john_center, double eta) {
    if (S.empty()) throw std::invalid_argument("boman_cover: empty S");
    if (std::find(S.begin(), S.end(), john_center) == S.end())
        throw std::invalid_argument("boman_cover: john_center not in S");
    BomanCover cover;
    const double h = space.min_edge_length();

    std::vector<char> in_S(space.n, 0);
    for (int i : S) in_S[i] = 1;
    auto whitney_radius = [&](int x) {
        double dc = kInf;
        for (int i = 0; i < space.n; ++i)
            if (!in_S[i]) dc = std::min(dc, space.dist(x, i));
        const double r = std::isfinite(dc) ? std::max(h, dc / 10.0) : 1.0;
        return std::min(1.0, r);
    };

    // greedy subcover: the John center's ball first, then lowest-index
    // uncovered points of S
    std::vector<char> covered(space.n, 0);
    auto add_ball = [&](int c) {
        CoverBall cb;
        cb.center = c;
        cb.radius = whitney_radius(c);
        cb.points = ball(space, c, cb.radius);
        for (int p : cb.points) covered[p] = 1;
        cover.balls.push_back(cb);
    };
    add_ball(john_center);
    cover.central_index = 0;
    for (int i : S)
        if (!covered[i]) add_ball(i);

    const int nb = static_cast<int>(cover.balls.size());

    // ball-overlap graph (edges where the rho-measure of the intersection is
    // positive), weighted by center distance; chains = shortest paths to B0
    std::vector<std::vector<std::pair<int, double>>> bg(nb);
    std::vector<double> ball_rho(nb);
    for (int i = 0; i < nb; ++i) ball_rho[i] = measure_of(rho, cover.balls[i].points);
    std::vector<std::vector<double>> inter(nb, std::vector<double>(nb, 0.0));
    for (int i = 0; i < nb; ++i)
        for (int j = i + 1; j < nb; ++j) {
            const double mij = measure_intersect(rho, cover.balls[i].points, cover.balls[j].points);
            inter[i][j] = inter[j][i] = mij;
            if (mij > 0.0) {
                const double d = space.dist(cover.balls[i].center, cover.balls[j].center);
                bg[i].push_back({j, d});
                bg[j].push_back({i, d});
            }
        }

    // Dijkstra from B0 with lowest-index tie-breaking
    std::vector<double> dist(nb, kInf);
    std::vector<int> prev(nb, -1);
    std::vector<char> done(nb, 0);
    dist[0] = 0.0;
    for (int it = 0; it < nb; ++it) {
        int u = -1;
        double bd = kInf;
        for (int i = 0; i < nb; ++i)
            if (!done[i] && dist[i] < bd) {
                bd = dist[i];
                u = i;
            }
        if (u < 0) break;
        done[u] = 1;
        for (auto [v, wgt] : bg[u])
            if (dist[u] + wgt < dist[v] - 1e-15 ||
                (std::abs(dist[u] + wgt - dist[v]) <= 1e-15 && (prev[v] == -1 || u < prev[v]))) {
                dist[v] = dist[u] + wgt;
                prev[v] = u;
            }
    }
    cover.chains.assign(nb, {});
    for (int i = 0; i < nb; ++i) {
        if (!std::isfinite(dist[i]))
            throw std::runtime_error(
                "boman_cover: chain condition violated, ball " + std::to_string(i) +
                " (center " + std::to_string(cover.balls[i].center) +
                ") is not connected to the central ball through positive-measure overlaps");
        std::vector<int> chain;
        for (int u = i; u != -1; u = prev[u]) chain.push_back(u);
        std::reverse(chain.begin(), chain.end());
        cover.chains[i] = chain;
    }

    // certified constants
    double E = 1.0;
    for (int x : S) {
        int cnt = 0;
        for (const CoverBall& cb : cover.balls)
            if (space.dist(cb.center, x) <= 2.0 * cb.radius) ++cnt;
        E = std::max(E, static_cast<double>(cnt));
    }
    double F = 1.0;
    for (int i = 0; i < nb; ++i) {
        const auto& chain = cover.chains[i];
        for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
            const CoverBall& bj = cover.balls[chain[j]];
            for (int p : cover.balls[i].points)
                F = std::max(F, space.dist(bj.center, p) / bj.radius);
        }
    }
    double G = 1.0;
    for (int i = 0; i < nb; ++i) {
        const auto& chain = cover.chains[i];
        for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
            const double over = inter[chain[j]][chain[j + 1]];
            const double mx = std::max(ball_rho[chain[j]], ball_rho[chain[j + 1]]);
            if (over <= 0.0)
                throw std::runtime_error("boman_cover: consecutive chain balls do not overlap");
            G = std::max(G, mx / over);
        }
    }
    // dyadic doubling along all scales the gluing argument dilates through
    double beta = 1.0;
    const int jmax = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(F, 2.0)))));
    for (const CoverBall& cb : cover.balls) {
        double prev_mass = ball_rho[&cb - cover.balls.data()];
        for (int j = 1; j <= jmax; ++j) {
            const double mass = measure_of(rho, ball(space, cb.center, cb.radius * std::pow(2.0, j)));
            if (prev_mass > 0.0) beta = std::max(beta, mass / prev_mass);
            prev_mass = mass;
        }
    }
    cover.E = E;
    cover.F = F;
    cover.G = G;
    cover.beta = beta;
    (void)eta;

    // exhaustive re-verification of the certified conditions
    for (int x : S) {
        bool in_cover = false;
        for (const CoverBall& cb : cover.balls)
            if (space.dist(cb.center, x) <= cb.radius) in_cover = true;
        if (!in_cover)
            throw std::runtime_error("boman_cover: point " + std::to_string(x) + " left uncovered");
    }
    for (int i = 0; i < nb; ++i) {
        const auto& chain = cover.chains[i];
        if (chain.front() != cover.central_index || chain.back() != i)
            throw std::runtime_error("boman_cover: malformed chain");
        for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
            const CoverBall& bj = cover.balls[chain[j]];
            for (int p : cover.balls[i].points)
                if (space.dist(bj.center, p) > F * bj.radius + 1e-12)
                    throw std::runtime_error("boman_cover: chain dilation bound violated");
        }
    }
    return cover;
}

GluingReport gluing_check(const BomanCover& cover, const ProbMeasure& rho,
                          const Eigen::VectorXd& f) {
    GluingReport rep;
    double mean = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k) mean += rho.weights[k] * f[rho.support[k]];
    for (std::size_t k = 0; k < rho.support.size(); ++k)
        rep.lhs += rho.weights[k] * std::abs(f[rho.support[k]] - mean);

    for (const CoverBall& cb : cover.balls) {
        double mb = 0.0, meanb = 0.0;
        for (std::size_t k = 0; k < rho.support.size(); ++k)
            if (std::find(cb.points.begin(), cb.points.end(), rho.support[k]) != cb.points.end()) {
                mb += rho.weights[k];
                meanb += rho.weights[k] * f[rho.support[k]];
            }
        if (mb <= 0.0) continue;
        meanb /= mb;
        double osc = 0.0;
        for (std::size_t k = 0; k < rho.support.size(); ++k)
            if (std::find(cb.points.begin(), cb.points.end(), rho.support[k]) != cb.points.end())
                osc += rho.weights[k] * std::abs(f[rho.support[k]] - meanb);
        rep.rhs_sum += osc;  // rho(B) * int |f - mean_B| drho_B == int_B |f - mean_B| drho
    }
    rep.C5 = 2.0 * (1.0 + 2.0 * cover.beta * cover.beta * cover.E *
                              std::pow(cover.F, std::log(cover.beta) / std::log(2.0)) * cover.G);
    rep.slack = rep.C5 * rep.rhs_sum - rep.lhs;
    rep.pass = rep.lhs <= rep.C5 * rep.rhs_sum + 1e-12;
    return rep;
}

ConcavityProbe global_concavity_probe(const GibbsSystem& gs, const ProbMeasure& rho,
                                      const Eigen::VectorXd& v) {
    ConcavityProbe pr;
    const double ev_marginal = gs.marginal.dot(v);
    double var_sum = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k) {
        const auto mu = gs.mu_x.row(rho.support[k]);
        const double mean = mu.dot(v);
        pr.lhs += rho.weights[k] * std::abs(mean - ev_marginal);
        double var = 0.0;
        for (int y = 0; y < v.size(); ++y) var += mu[y] * (v[y] - mean) * (v[y] - mean);
        var_sum += rho.weights[k] * var;
    }
    pr.rhs_base = std::sqrt(var_sum) / std::sqrt(gs.t);
    pr.ratio = (pr.rhs_base > 0.0) ? pr.lhs / pr.rhs_base : 0.0;
    return pr;
}

}  // namespace otlab
