#pragma once

#include <functional>
#include <vector>

#include "otlab/space.hpp"

namespace otlab {

// One level of a refinement family discretizing a fixed continuum domain.
struct RefinementLevel {
    Space space;
    double h = 0.0;                        // mesh size
    std::vector<Eigen::Vector2d> coords;   // embedded coordinates (y == 0 in 1d)

    // index of the grid point at the given coordinate; throws if absent
    int index_of(double x, double y = 0.0) const;
};

using TRule = std::function<double(double)>;  // mesh h -> time t

inline TRule t_equals_h() { return [](double h) { return h; }; }
inline TRule t_equals_c_h(double c) { return [c](double h) { return c * h; }; }
inline TRule t_equals_sqrt_h() { return [](double h) { return std::sqrt(h); }; }

// [0,1] with n cells (n+1 points), spacing h=1/n, m_i = h, edge conductances
// chosen by the generator rule; curvature meta (K=0, N=1).
RefinementLevel interval_level(int cells);
std::vector<RefinementLevel> interval_family(const std::vector<int>& cells);

// [0,1]^2 with n cells per side ((n+1)^2 points), 4-neighbor, spacing h=1/n,
// m_i = h^2; curvature meta (K=0, N=2).
RefinementLevel grid2d_level(int cells);

// q x q grid patch with unit spacing scaled by h, masses h^2 (helper for
// covers and small tests). Indices row-major.
Space grid_patch(int q, double h = 1.0);

// Cusp strip: columns i = 0..depth with half-width ~ round(alpha*i^2)+... in
// cells, grid spacing h. Returns the space and the S index set (the cusp).
struct CuspFixture {
    Space space;
    std::vector<int> S;
    int mouth_center = 0;  // index of the widest column's center (John center)
};
CuspFixture cusp_fixture(int depth, double sharpness);

}  // namespace otlab
