#include "otlab/regularize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_kernel_time(double t, const HeatKernel& kernel) {
    if (std::abs(kernel.t - 0.5 * t) > 1e-12 * std::max(1.0, t))
        throw std::invalid_argument("kernel time mismatch: expected t/2");
}

// exponents phi(y)/t + log p(x,y) + log m_y for one x; entries with p <= 0
// (spectral roundoff on sub-eps kernel values) drop out of the sum
Eigen::VectorXd gibbs_exponent(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                               const Eigen::VectorXd& m, int x) {
    const int n = static_cast<int>(m.size());
    Eigen::VectorXd e(n);
    for (int y = 0; y < n; ++y) {
        const double p = kernel.p(x, y);
        e[y] = (p > 0.0) ? phi[y] / t + std::log(p) + std::log(m[y]) : -kInf;
    }
    return e;
}

double log_sum_exp(const Eigen::VectorXd& e) {
    const double c = e.maxCoeff();
    if (!std::isfinite(c)) return c;
    double acc = 0.0;
    for (int i = 0; i < e.size(); ++i) acc += std::exp(e[i] - c);
    return c + std::log(acc);
}

}  // namespace

ExtendedPotential mcshane_extend(const std::vector<double>& psi, const DomainPair& domain,
                                 const Space& space) {
    if (domain.Y.empty()) throw std::invalid_argument("mcshane_extend: empty Y");
    if (psi.size() != domain.Y.size())
        throw std::invalid_argument("mcshane_extend: psi size mismatch");
    ExtendedPotential ext;
    ext.psi = psi;
    double lip = 0.0;
    for (std::size_t a = 0; a < psi.size(); ++a)
        for (std::size_t b = a + 1; b < psi.size(); ++b) {
            const double d = space.dist(domain.Y[a], domain.Y[b]);
            if (d > 0.0) lip = std::max(lip, std::abs(psi[a] - psi[b]) / d);
        }
    ext.lip = lip;
    ext.lambda = domain.D + lip + 1.0;
    ext.psi_bar.resize(space.n);
    ext.psi_star.resize(space.n);
    for (int x = 0; x < space.n; ++x) {
        double best = -kInf;
        double dY = kInf;
        for (std::size_t k = 0; k < domain.Y.size(); ++k) {
            const double d = space.dist(domain.Y[k], x);
            best = std::max(best, psi[k] - lip * d);
            dY = std::min(dY, d);
        }
        ext.psi_bar[x] = best;
        ext.psi_star[x] = best - ext.lambda * dY;
    }
    return ext;
}

double phi_t(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
             const Eigen::VectorXd& m, int x) {
    if (!(t > 0.0)) throw std::domain_error("phi_t: t must be positive");
    require_kernel_time(t, kernel);
    return -t * log_sum_exp(gibbs_exponent(phi, t, kernel, m, x));
}

Eigen::VectorXd phi_t_all(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                          const Eigen::VectorXd& m) {
    if (!(t > 0.0)) throw std::domain_error("phi_t: t must be positive");
    require_kernel_time(t, kernel);
    const int n = static_cast<int>(m.size());
    Eigen::VectorXd out(n);
    for (int x = 0; x < n; ++x) out[x] = -t * log_sum_exp(gibbs_exponent(phi, t, kernel, m, x));
    return out;
}

double k_t(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
           const Eigen::VectorXd& m, const ProbMeasure& rho) {
    if (!(t > 0.0)) throw std::domain_error("k_t: t must be positive");
    require_kernel_time(t, kernel);
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k)
        acc += rho.weights[k] * (-t * log_sum_exp(gibbs_exponent(phi, t, kernel, m, rho.support[k])));
    return acc;
}

GibbsSystem gibbs(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                  const Eigen::VectorXd& m, const ProbMeasure& rho) {
    if (!(t > 0.0)) throw std::domain_error("gibbs: t must be positive");
    require_kernel_time(t, kernel);
    const int n = static_cast<int>(m.size());
    GibbsSystem gs;
    gs.t = t;
    gs.phi = phi;
    gs.mu_x.resize(n, n);
    for (int x = 0; x < n; ++x) {
        const Eigen::VectorXd e = gibbs_exponent(phi, t, kernel, m, x);
        const double c = e.maxCoeff();
        double z = 0.0;
        for (int y = 0; y < n; ++y) {
            const double w = std::isfinite(e[y]) ? std::exp(e[y] - c) : 0.0;
            gs.mu_x(x, y) = w;
            z += w;
        }
        gs.mu_x.row(x) /= z;
    }
    gs.marginal = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < rho.support.size(); ++k)
        gs.marginal += rho.weights[k] * gs.mu_x.row(rho.support[k]).transpose();
    return gs;
}

double first_variation(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                       const Eigen::VectorXd& m, const ProbMeasure& rho,
                       const Eigen::VectorXd& v) {
    const GibbsSystem gs = gibbs(phi, t, kernel, m, rho);
    return -gs.marginal.dot(v);
}

double second_variation(const Eigen::VectorXd& phi, double t, const HeatKernel& kernel,
                        const Eigen::VectorXd& m, const ProbMeasure& rho,
                        const Eigen::VectorXd& v) {
    const GibbsSystem gs = gibbs(phi, t, kernel, m, rho);
    double acc = 0.0;
    for (std::size_t k = 0; k < rho.support.size(); ++k) {
        const auto mu = gs.mu_x.row(rho.support[k]);
        const double mean = mu.dot(v);
        double var = 0.0;
        for (int y = 0; y < v.size(); ++y) var += mu[y] * (v[y] - mean) * (v[y] - mean);
        acc += rho.weights[k] * var;
    }
    return -acc / t;
}

CovarianceCheck covariance_identity_check(const Eigen::VectorXd& phi, double t,
                                          const HeatKernel& kernel, const Eigen::VectorXd& m,
                                          const Eigen::VectorXd& v, const Space& space, int x,
                                          int xp) {
    if (x == xp) {
        CovarianceCheck c;
        return c;  // both sides vanish
    }
    if (!space.adjacent(x, xp))
        throw std::invalid_argument("covariance_identity_check: points not adjacent");
    require_kernel_time(t, kernel);
    const int n = static_cast<int>(m.size());
    ProbMeasure dx;
    dx.support = {x};
    dx.weights = {1.0};
    const GibbsSystem gs = gibbs(phi, t, kernel, m, dx);
    const Eigen::VectorXd mu = gs.mu_x.row(x).transpose();
    const Eigen::VectorXd mup = gs.mu_x.row(xp).transpose();

    // w(y) = log p(x',y) - log p(x,y); ratio statistics with max-subtraction
    Eigen::VectorXd w(n);
    for (int y = 0; y < n; ++y) w[y] = std::log(kernel.p(xp, y)) - std::log(kernel.p(x, y));
    const double wmax = w.maxCoeff();
    Eigen::VectorXd ew = (w.array() - wmax).exp();

    const double Eew = mu.dot(ew);
    const double Ev = mu.dot(v);
    double cov = 0.0;
    for (int y = 0; y < n; ++y) cov += mu[y] * (v[y] - Ev) * ew[y];

    CovarianceCheck c;
    c.lhs = mup.dot(v) - Ev;
    c.rhs = cov / Eew;  // scale e^{wmax} cancels in the ratio
    c.residual = std::abs(c.lhs - c.rhs);
    return c;
}

std::vector<LimitRow> ctransform_limit(const std::vector<RefinementLevel>& family,
                                       const TRule& t_rule, double s_lo, double s_hi,
                                       double y_lo, double y_hi,
                                       const std::function<double(double)>& psi_of_coord) {
    std::vector<LimitRow> rows;
    for (const RefinementLevel& lvl : family) {
        const Space& sp = lvl.space;
        std::vector<int> S, Y;
        for (int i = 0; i < sp.n; ++i) {
            const double c = lvl.coords[i][0];
            if (c >= s_lo - 1e-12 && c <= s_hi + 1e-12) S.push_back(i);
            if (c >= y_lo - 1e-12 && c <= y_hi + 1e-12) Y.push_back(i);
        }
        const DomainPair dom = make_domain_pair(sp, S, Y);
        std::vector<double> psi(Y.size());
        for (std::size_t k = 0; k < Y.size(); ++k) psi[k] = psi_of_coord(lvl.coords[Y[k]][0]);
        const ExtendedPotential ext = mcshane_extend(psi, dom, sp);

        const double t = t_rule(lvl.h);
        const Generator gen = build_generator(sp, ConductanceRule::inv_length_squared);
        const HeatKernel kernel = heat_kernel(gen, t / 2.0, KernelBackend::expm);
        const CostMatrix cost = make_cost(sp, S, Y, CostKind::half_squared);
        const CTransform exact = c_transform(psi, cost);

        double sup = 0.0;
        for (std::size_t a = 0; a < S.size(); ++a) {
            const double approx = phi_t(ext.psi_star, t, kernel, sp.m, S[a]);
            sup = std::max(sup, std::abs(approx - exact.values[a]));
        }
        rows.push_back({lvl.h, t, sup});
    }
    return rows;
}

std::vector<LimitRow> marginal_limit(const std::vector<RefinementLevel>& family,
                                     const TRule& t_rule, double s_lo, double s_hi,
                                     const std::vector<MarginalAtom>& nu,
                                     const std::function<double(double)>& v_of_coord) {
    std::vector<LimitRow> rows;
    for (const RefinementLevel& lvl : family) {
        const Space& sp = lvl.space;
        std::vector<int> S;
        for (int i = 0; i < sp.n; ++i) {
            const double c = lvl.coords[i][0];
            if (c >= s_lo - 1e-12 && c <= s_hi + 1e-12) S.push_back(i);
        }
        ProbMeasure target;
        for (const MarginalAtom& atom : nu) {
            target.support.push_back(lvl.index_of(atom.coord));
            target.weights.push_back(atom.weight);
        }
        ProbMeasure rho;
        rho.support = S;
        double mS = 0.0;
        for (int i : S) mS += sp.m[i];
        for (int i : S) rho.weights.push_back(sp.m[i] / mS);

        const CostMatrix cost = make_cost(sp, S, target.support, CostKind::half_squared);
        const PotentialPair pair = solve_kantorovich(rho, target, cost);

        const DomainPair dom = make_domain_pair(sp, S, target.support);
        const ExtendedPotential ext = mcshane_extend(pair.psi, dom, sp);

        const double t = t_rule(lvl.h);
        const Generator gen = build_generator(sp, ConductanceRule::inv_length_squared);
        const HeatKernel kernel = heat_kernel(gen, t / 2.0, KernelBackend::expm);
        const GibbsSystem gs = gibbs(ext.psi_star, t, kernel, sp.m, rho);

        Eigen::VectorXd v(sp.n);
        for (int i = 0; i < sp.n; ++i) v[i] = v_of_coord(lvl.coords[i][0]);
        double ev_nu = 0.0;
        for (const MarginalAtom& atom : nu) ev_nu += atom.weight * v_of_coord(atom.coord);

        rows.push_back({lvl.h, t, std::abs(gs.marginal.dot(v) - ev_nu)});
    }
    return rows;
}

}  // namespace otlab
