#include "otlab/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace otlab {

int RefinementLevel::index_of(double x, double y) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (std::abs(coords[i][0] - x) < 1e-9 * std::max(1.0, std::abs(x)) + 1e-12 &&
            std::abs(coords[i][1] - y) < 1e-9 * std::max(1.0, std::abs(y)) + 1e-12)
            return static_cast<int>(i);
    throw std::invalid_argument("index_of: coordinate missing from this refinement level");
}

RefinementLevel interval_level(int cells) {
    if (cells < 1) throw std::invalid_argument("interval_level: cells < 1");
    const double h = 1.0 / cells;
    const int n = cells + 1;
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, h});
    Eigen::VectorXd m = Eigen::VectorXd::Constant(n, h);
    RefinementLevel lvl;
    lvl.space = build_space(edges, m, CurvatureMeta{0.0, 1.0});
    lvl.h = h;
    lvl.coords.resize(n);
    for (int i = 0; i < n; ++i) lvl.coords[i] = {i * h, 0.0};
    return lvl;
}

std::vector<RefinementLevel> interval_family(const std::vector<int>& cells) {
    std::vector<RefinementLevel> fam;
    fam.reserve(cells.size());
    for (int c : cells) fam.push_back(interval_level(c));
    return fam;
}

RefinementLevel grid2d_level(int cells) {
    if (cells < 1) throw std::invalid_argument("grid2d_level: cells < 1");
    const double h = 1.0 / cells;
    const int k = cells + 1;
    const int n = k * k;
    std::vector<Edge> edges;
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            const int i = r * k + c;
            if (c + 1 < k) edges.push_back({i, i + 1, h});
            if (r + 1 < k) edges.push_back({i, i + k, h});
        }
    Eigen::VectorXd m = Eigen::VectorXd::Constant(n, h * h);
    RefinementLevel lvl;
    lvl.space = build_space(edges, m, CurvatureMeta{0.0, 2.0});
    lvl.h = h;
    lvl.coords.resize(n);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) lvl.coords[r * k + c] = {c * h, r * h};
    return lvl;
}

Space grid_patch(int q, double h) {
    const int n = q * q;
    std::vector<Edge> edges;
    for (int r = 0; r < q; ++r)
        for (int c = 0; c < q; ++c) {
            const int i = r * q + c;
            if (c + 1 < q) edges.push_back({i, i + 1, h});
            if (r + 1 < q) edges.push_back({i, i + q, h});
        }
    Eigen::VectorXd m = Eigen::VectorXd::Constant(n, h * h);
    return build_space(edges, m, CurvatureMeta{0.0, 2.0});
}

CuspFixture cusp_fixture(int depth, double sharpness) {
    // Columns i = 0 (mouth) .. depth (tip); half-width shrinks like
    // max(0, round(w0 * (1 - (i/depth))^... )) -- width proportional to the
    // square of the distance from the tip.
    if (depth < 2) throw std::invalid_argument("cusp_fixture: depth < 2");
    const double h = 1.0 / depth;
    const int w0 = depth / 2;
    std::vector<int> halfw(depth + 1);
    for (int i = 0; i <= depth; ++i) {
        const double s = 1.0 - static_cast<double>(i) / depth;  // 1 at mouth, 0 at tip
        halfw[i] = static_cast<int>(std::floor(w0 * sharpness * s * s + 1e-9));
    }
    // Build on a bounding grid, S = cusp nodes; keep one padding ring so that
    // d(x, S^c) is finite for every x in S.
    const int rows = 2 * (w0 + 2) + 1;
    const int cols = depth + 3;
    const int mid = w0 + 2;
    auto id = [cols](int r, int c) { return r * cols + c; };
    std::vector<Edge> edges;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), h});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), h});
        }
    Eigen::VectorXd m = Eigen::VectorXd::Constant(rows * cols, h * h);
    CuspFixture fx;
    fx.space = build_space(edges, m, CurvatureMeta{0.0, 2.0});
    for (int i = 0; i <= depth; ++i)
        for (int dr = -halfw[i]; dr <= halfw[i]; ++dr) fx.S.push_back(id(mid + dr, 1 + i));
    fx.mouth_center = id(mid, 1);
    return fx;
}

}  // namespace otlab
