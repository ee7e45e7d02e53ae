#include <doctest.h>

#include <cmath>

#include "otlab/fixtures.hpp"
#include "otlab/heat.hpp"
#include "otlab/rng.hpp"

using namespace otlab;

namespace {

Space two_point() {
    Eigen::VectorXd m = Eigen::VectorXd::Ones(2);
    return build_space({{0, 1, 1.0}}, m);
}

Space cycle(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    Eigen::VectorXd m = Eigen::VectorXd::Ones(n);
    return build_space(edges, m);
}

// continuum Neumann heat kernel on [0,1] for e^{s d^2/dx^2}, by image sums
double reflected_gaussian(double x, double y, double s) {
    double acc = 0.0;
    for (int k = -20; k <= 20; ++k) {
        const double a = x - y - 2.0 * k;
        const double b = x + y - 2.0 * k;
        acc += std::exp(-a * a / (4.0 * s)) + std::exp(-b * b / (4.0 * s));
    }
    return acc / std::sqrt(4.0 * M_PI * s);
}

}  // namespace

TEST_CASE("two-point generator matrix") {
    const Generator gen = build_generator(two_point(), ConductanceRule::unit);
    CHECK(gen.L(0, 0) == doctest::Approx(-1.0));
    CHECK(gen.L(0, 1) == doctest::Approx(1.0));
    CHECK(gen.L(1, 0) == doctest::Approx(1.0));
    CHECK(gen.L(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("uniform 1d grid: inverse-length-squared rule gives 1/h^2 off-diagonals") {
    const RefinementLevel lvl = interval_level(8);
    const Generator gen = build_generator(lvl.space, ConductanceRule::inv_length_squared);
    const double h = lvl.h;
    CHECK(gen.L(3, 4) == doctest::Approx(1.0 / (h * h)).epsilon(1e-12));
    CHECK(gen.L(4, 3) == doctest::Approx(1.0 / (h * h)).epsilon(1e-12));
}

TEST_CASE("detailed balance on random weighted graphs, 50 seeds") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const int n = 6 + static_cast<int>(rng.below(6));
        std::vector<Edge> edges;
        for (int i = 0; i + 1 < n; ++i) edges.push_back(Edge{i, i + 1, rng.uniform(0.5, 1.5)});
        edges.push_back(Edge{0, n - 1, rng.uniform(0.5, 1.5)});
        Eigen::VectorXd m(n);
        for (int i = 0; i < n; ++i) m[i] = rng.uniform(0.5, 2.0);
        const Space sp = build_space(edges, m);
        for (auto rule : {ConductanceRule::unit, ConductanceRule::inv_length_squared}) {
            const Generator gen = build_generator(sp, rule);
            for (int i = 0; i < n; ++i) {
                CHECK(std::abs(gen.L.row(i).sum()) < 1e-12);
                for (int j = 0; j < n; ++j)
                    CHECK(m[i] * gen.L(i, j) == doctest::Approx(m[j] * gen.L(j, i)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("two-point closed form") {
    const Generator gen = build_generator(two_point(), ConductanceRule::unit);
    for (double t : {0.05, 0.3, 1.0, 4.0}) {
        const HeatKernel k = heat_kernel(gen, t);
        CHECK(k.p(0, 1) == doctest::Approx(0.5 * (1.0 - std::exp(-2.0 * t))).epsilon(1e-12));
        CHECK(k.p(0, 0) == doctest::Approx(0.5 * (1.0 + std::exp(-2.0 * t))).epsilon(1e-12));
    }
}

TEST_CASE("kernel invariants on shipped fixtures") {
    for (double t : {0.1, 0.7}) {
        for (const Space& sp : {two_point(), cycle(16), interval_level(32).space,
                                grid2d_level(7).space}) {
            const Generator gen = build_generator(sp, ConductanceRule::inv_length_squared);
            const HeatKernel k = heat_kernel(gen, t);
            CHECK_NOTHROW(k.validate(sp.m));
            CHECK(k.symmetry_residual() < 1e-10);
            CHECK(k.mass_residual(sp.m) < 1e-10);
            CHECK(k.min_entry() > 0.0);
        }
    }
}

TEST_CASE("semigroup property p_{0.3} = p_{0.1} o p_{0.2} on a 16-cycle") {
    const Generator gen = build_generator(cycle(16), ConductanceRule::unit);
    const HeatKernel a = heat_kernel(gen, 0.1);
    const HeatKernel b = heat_kernel(gen, 0.2);
    const HeatKernel ab = heat_kernel(gen, 0.3);
    CHECK(semigroup_residual(a, b, ab, gen.m) < 1e-8);
}

TEST_CASE("spectral and exponential backends agree") {
    const RefinementLevel lvl = interval_level(48);
    const Generator gen = build_generator(lvl.space, ConductanceRule::inv_length_squared);
    for (double t : {0.05, 0.4}) {
        const HeatKernel s = heat_kernel(gen, t, KernelBackend::spectral);
        const HeatKernel e = heat_kernel(gen, t, KernelBackend::expm);
        CHECK((s.p - e.p).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("t <= 0 rejected") {
    const Generator gen = build_generator(two_point(), ConductanceRule::unit);
    CHECK_THROWS_AS(heat_kernel(gen, 0.0), std::domain_error);
    CHECK_THROWS_AS(heat_kernel(gen, -1.0), std::domain_error);
}

TEST_CASE("discrete kernel approaches the reflected Gaussian on the interval") {
    // oracle for the refinement protocol: at fixed (x, y, t) the lattice kernel
    // converges to the continuum Neumann kernel
    const double x = 0.25, y = 0.75, t = 0.05;
    double prev_err = 1e9;
    for (int cells : {32, 64, 128}) {
        const RefinementLevel lvl = interval_level(cells);
        const Generator gen = build_generator(lvl.space, ConductanceRule::inv_length_squared);
        const HeatKernel k = heat_kernel(gen, t);
        const double disc = k.p(lvl.index_of(x), lvl.index_of(y));
        const double cont = reflected_gaussian(x, y, t);
        const double err = std::abs(disc - cont) / cont;
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 5e-3);
}

TEST_CASE("varadhan gap decreases along the canonical refinement with t = h") {
    const auto family = interval_family({32, 64, 128, 256});
    const auto rows = varadhan_gap(family, t_equals_h(), 0.25, 0.75);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i + 1].gap < rows[i].gap);
    CHECK(rows[0].h > rows.back().h);
}

TEST_CASE("varadhan diagonal case tends to zero") {
    const auto family = interval_family({64, 256});
    const auto rows = varadhan_gap(family, t_equals_h(), 0.25, 0.25);
    CHECK(rows[1].gap < rows[0].gap);
    CHECK(rows[1].gap < 0.01);  // -t log p_{t/2}(x,x) -> 0 like t log(1/sqrt t)
}

TEST_CASE("varadhan negative control: fixed graph, t -> 0 stalls") {
    const RefinementLevel lvl = interval_level(32);
    const Generator gen = build_generator(lvl.space, ConductanceRule::inv_length_squared);
    const int ix = lvl.index_of(0.25), iy = lvl.index_of(0.75);
    const double target = 0.5 * 0.5 * 0.5;
    double last_gap = 0.0;
    for (double t : {0.02, 0.01, 0.005}) {
        const HeatKernel k = heat_kernel(gen, t / 2.0, KernelBackend::expm);
        last_gap = std::abs(-t * std::log(k.p(ix, iy)) - target);
    }
    CHECK(last_gap > 0.01);  // does not vanish on a fixed graph
}

TEST_CASE("varadhan errors when the coordinate is missing") {
    const auto family = interval_family({10});
    CHECK_THROWS_AS(varadhan_gap(family, t_equals_h(), 0.25, 0.333), std::invalid_argument);
}

TEST_CASE("li-yau margin at the source turns positive under refinement") {
    const double t = 0.05;
    double prev = -1e9;
    for (int cells : {32, 64, 128}) {
        const RefinementLevel lvl = interval_level(cells);
        const Generator gen = build_generator(lvl.space, ConductanceRule::inv_length_squared);
        const HeatKernel k = heat_kernel(gen, t / 2.0);
        const LiYauReport rep = li_yau_diagnostic(lvl.space, gen, k, lvl.index_of(0.5));
        CHECK(std::isfinite(rep.lhs));
        CHECK(rep.margin > prev);
        prev = rep.margin;
    }
    CHECK(prev > 0.0);  // flat case: rhs carries the N/t term
}

TEST_CASE("li-yau at equilibrium: both sides near zero") {
    const Generator gen = build_generator(cycle(8), ConductanceRule::unit);
    const double t = 80.0;  // much larger than diam^2
    const HeatKernel k = heat_kernel(gen, t / 2.0);
    const LiYauReport rep = li_yau_diagnostic(cycle(8), gen, k, 0);
    CHECK(std::abs(rep.lhs) < 1e-6);
    CHECK(std::abs(rep.rhs) < 0.3);  // dominated by N/t
}
