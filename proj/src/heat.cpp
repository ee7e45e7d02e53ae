#include "otlab/heat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otlab {

namespace {

// e^{tL} by uniformization: shift L so all entries are nonnegative, truncated
// Taylor on the scaled matrix, then repeated squaring. Every intermediate is
// a sum of nonnegative terms, so entries stay exactly nonnegative and tiny
// entries keep full relative accuracy (unlike the spectral sum, which leaves
// O(eps) cancellation noise on entries below machine precision).
Eigen::MatrixXd expm_uniformized(const Eigen::MatrixXd& L, double t) {
    const int n = static_cast<int>(L.rows());
    const double c = (-L.diagonal()).maxCoeff();
    int s = 0;
    if (t * c > 0.5) s = static_cast<int>(std::ceil(std::log2(t * c / 0.5)));
    const double eps = t / static_cast<double>(1ULL << s);
    Eigen::MatrixXd shifted = eps * L + (eps * c) * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 60; ++k) {
        term = (term * shifted / static_cast<double>(k)).eval();
        acc += term;
        if (k > 3 && term.maxCoeff() < 1e-18 * acc.maxCoeff()) break;
    }
    acc *= std::exp(-eps * c);
    for (int i = 0; i < s; ++i) acc = (acc * acc).eval();
    return acc;
}

}  // namespace

Generator build_generator(const Space& space, ConductanceRule rule) {
    Generator gen;
    const int n = space.n;
    gen.m = space.m;
    gen.curvature = space.curvature;
    gen.L = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : space.edges) {
        double w = 1.0;
        if (rule == ConductanceRule::inv_length_squared)
            w = std::sqrt(space.m[e.u] * space.m[e.v]) / (e.length * e.length);
        gen.L(e.u, e.v) += w / space.m[e.u];
        gen.L(e.v, e.u) += w / space.m[e.v];
    }
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) row += gen.L(i, j);
        gen.L(i, i) = -row;
    }
    if (n <= kSpectralThreshold) {
        const Eigen::VectorXd s = gen.m.array().sqrt();
        Eigen::MatrixXd A = gen.L.array().colwise() * s.array();
        A = A.array().rowwise() / s.transpose().array();
        A = (0.5 * (A + A.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        gen.eigenvalues = es.eigenvalues();
        gen.eigenvectors = es.eigenvectors().array().colwise() / s.array();
    }
    return gen;
}

HeatKernel heat_kernel(const Generator& gen, double t, KernelBackend backend) {
    if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be positive");
    if (backend == KernelBackend::automatic)
        backend = gen.has_spectral() ? KernelBackend::spectral : KernelBackend::expm;
    HeatKernel k;
    k.t = t;
    if (backend == KernelBackend::spectral) {
        if (!gen.has_spectral()) throw std::invalid_argument("heat_kernel: spectral data not cached");
        const Eigen::VectorXd half = (0.5 * t * gen.eigenvalues.array()).exp();
        const Eigen::MatrixXd G = gen.eigenvectors.array().rowwise() * half.transpose().array();
        k.p = G * G.transpose();
    } else {
        k.p = expm_uniformized(gen.L, t).array().rowwise() / gen.m.transpose().array();
    }
    k.p = (0.5 * (k.p + k.p.transpose())).eval();
    return k;
}

double HeatKernel::symmetry_residual() const { return (p - p.transpose()).cwiseAbs().maxCoeff(); }

double HeatKernel::mass_residual(const Eigen::VectorXd& m) const {
    return ((p * m).array() - 1.0).abs().maxCoeff();
}

void HeatKernel::validate(const Eigen::VectorXd& m) const {
    if (symmetry_residual() > 1e-10) throw std::runtime_error("HeatKernel: symmetry violated");
    if (mass_residual(m) > 1e-10) throw std::runtime_error("HeatKernel: row mass violated");
    if (!(p.minCoeff() > 0.0)) throw std::runtime_error("HeatKernel: positivity violated");
}

double semigroup_residual(const HeatKernel& a, const HeatKernel& b, const HeatKernel& ab,
                          const Eigen::VectorXd& m) {
    // (p_t .m) compose (p_s .m): sum_z p_t(x,z) m_z p_s(z,y)
    const Eigen::MatrixXd comp = a.p * m.asDiagonal() * b.p;
    return (comp - ab.p).cwiseAbs().maxCoeff();
}

std::vector<VaradhanRow> varadhan_gap(const std::vector<RefinementLevel>& family,
                                      const TRule& t_rule, double x, double y,
                                      ConductanceRule rule) {
    std::vector<VaradhanRow> rows;
    for (const RefinementLevel& lvl : family) {
        const int ix = lvl.index_of(x);
        const int iy = lvl.index_of(y);
        const double t = t_rule(lvl.h);
        const Generator gen = build_generator(lvl.space, rule);
        // expm backend: small-t entries need relative accuracy under the log
        const HeatKernel k = heat_kernel(gen, t / 2.0, KernelBackend::expm);
        const double d = lvl.space.dist(ix, iy);
        VaradhanRow row;
        row.h = lvl.h;
        row.t = t;
        row.x = x;
        row.y = y;
        row.gap = std::abs(-t * std::log(k.p(ix, iy)) - 0.5 * d * d);
        rows.push_back(row);
    }
    return rows;
}

double discrete_gradient_at(const Space& space, const Eigen::VectorXd& f, int x) {
    double g = 0.0;
    for (int ei : space.adj[x]) {
        const Edge& e = space.edges[ei];
        const int v = e.u + e.v - x;
        g = std::max(g, std::abs(f[v] - f[x]) / e.length);
    }
    return g;
}

LiYauReport li_yau_diagnostic(const Space& space, const Generator& gen, const HeatKernel& kernel,
                              int x) {
    const int n = gen.n();
    const double t = 2.0 * kernel.t;  // estimate parameter; kernel holds p_{t/2}
    const double K = gen.curvature.K;
    const double N = gen.curvature.N;
    double dim_term;
    if (std::abs(K) < 1e-14) {
        dim_term = N / t;  // K -> 0 limit of (NK/3) e^{-2Kt/3} / (1 - e^{-Kt/3})
    } else {
        dim_term = (N * K / 3.0) * std::exp(-2.0 * K * t / 3.0) / (1.0 - std::exp(-K * t / 3.0));
    }
    const double curv_factor = std::exp(-K * t / 3.0);
    (void)n;
    // field u = p_{t/2}(., x) evaluated at its own source
    LiYauReport rep;
    double g = 0.0;
    for (int ei : space.adj[x]) {
        const Edge& e = space.edges[ei];
        const int xp = e.u + e.v - x;
        g = std::max(g, std::abs(std::log(kernel.p(xp, x)) - std::log(kernel.p(x, x))) / e.length);
    }
    rep.lhs = g * g;
    rep.rhs = curv_factor * gen.L.row(x).dot(kernel.p.col(x)) / kernel.p(x, x) + dim_term;
    rep.margin = rep.rhs - rep.lhs;
    return rep;
}

}  // namespace otlab
