#pragma once

#include <Eigen/Dense>
#include <vector>

#include "otlab/fixtures.hpp"
#include "otlab/space.hpp"

namespace otlab {

enum class ConductanceRule { unit, inv_length_squared };
enum class KernelBackend { automatic, spectral, expm };

// Measured graph Laplacian L_ij = w_ij / m_i, self-adjoint in the m-weighted
// inner product. Spectral data is cached for n <= kSpectralThreshold.
struct Generator {
    Eigen::MatrixXd L;
    Eigen::VectorXd m;
    CurvatureMeta curvature;
    Eigen::VectorXd eigenvalues;   // empty when spectral data not cached
    Eigen::MatrixXd eigenvectors;  // columns of M^{-1/2} U (m-orthonormal)

    int n() const { return static_cast<int>(m.size()); }
    bool has_spectral() const { return eigenvalues.size() > 0; }
};

inline constexpr int kSpectralThreshold = 512;

// Heat kernel p_t(x,y): transition density relative to m, (e^{tL})_xy = p_t(x,y) m_y.
struct HeatKernel {
    double t = 0.0;
    Eigen::MatrixXd p;

    // symmetry / stochastic completeness / positivity; throws on violation
    void validate(const Eigen::VectorXd& m) const;
    double symmetry_residual() const;
    double mass_residual(const Eigen::VectorXd& m) const;
    double min_entry() const { return p.minCoeff(); }
};

Generator build_generator(const Space& space, ConductanceRule rule);

HeatKernel heat_kernel(const Generator& gen, double t,
                       KernelBackend backend = KernelBackend::automatic);

// residual of p_{t+s} == composition of p_t and p_s against m
double semigroup_residual(const HeatKernel& a, const HeatKernel& b, const HeatKernel& ab,
                          const Eigen::VectorXd& m);

struct VaradhanRow {
    double h = 0.0;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double gap = 0.0;  // | -t log p_{t/2}(x,y) - d(x,y)^2/2 |
};

// Two-parameter refinement check of the short-time kernel asymptotics; rows
// ordered coarse-to-fine (h descending).
std::vector<VaradhanRow> varadhan_gap(const std::vector<RefinementLevel>& family,
                                      const TRule& t_rule, double x, double y,
                                      ConductanceRule rule = ConductanceRule::inv_length_squared);

struct LiYauReport {
    double lhs = 0.0;     // max_y |grad_x log p_{t/2}(x,y)|^2 at the worst y
    double rhs = 0.0;     // curvature-dimension bound at the same y
    double margin = 0.0;  // min over y of (rhs - lhs)
};

// Report-only check of the gradient bound for the kernel at the given kernel
// time (kernel.t == t/2 for estimate parameter t = 2 * kernel.t).
LiYauReport li_yau_diagnostic(const Space& space, const Generator& gen, const HeatKernel& kernel,
                              int x);

// max over incident edges of |f(x') - f(x)| / length (upper gradient proxy,
// shared convention across modules)
double discrete_gradient_at(const Space& space, const Eigen::VectorXd& f, int x);

}  // namespace otlab
