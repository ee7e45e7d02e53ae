#include <doctest.h>

#include <cmath>

#include "otlab/fixtures.hpp"
#include "otlab/poincare.hpp"
#include "otlab/rng.hpp"

using namespace otlab;

namespace {

ProbMeasure uniform_rho(const Space& sp, const std::vector<int>& S) {
    ProbMeasure rho;
    rho.support = S;
    double mS = 0.0;
    for (int i : S) mS += sp.m[i];
    for (int i : S) rho.weights.push_back(sp.m[i] / mS);
    return rho;
}

std::vector<int> all_of(const Space& sp) {
    std::vector<int> v(sp.n);
    for (int i = 0; i < sp.n; ++i) v[i] = i;
    return v;
}

// bottleneck fixture: two unit-length cliques joined by one edge of length L;
// widening L starves the gradient budget and the constant grows
Space dumbbell(double bridge_len) {
    Eigen::VectorXd m = Eigen::VectorXd::Ones(6);
    std::vector<Edge> edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, bridge_len},
                               {3, 4, 1.0}, {4, 5, 1.0}};
    return build_space(edges, m);
}

}  // namespace

TEST_CASE("two-point ball closed form") {
    Eigen::VectorXd m = Eigen::VectorXd::Ones(2);
    const Space sp = build_space({{0, 1, 1.0}}, m);
    const ProbMeasure rho = uniform_rho(sp, {0, 1});
    const PoincareResult pr = local_poincare_constant(sp, rho, {0, 1}, 1.0);
    // f = (-1/2, 1/2) saturates sum w g = 1 and gives objective 1/2
    CHECK(pr.constant == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pr.duality_gap <= 1e-9);
}

TEST_CASE("witness achieves the reported constant") {
    const Space sp = dumbbell(1.0);
    const ProbMeasure rho = uniform_rho(sp, all_of(sp));
    const std::vector<int> B = all_of(sp);
    const PoincareResult pr = local_poincare_constant(sp, rho, B, 1.0);
    const Eigen::VectorXd& f = pr.witness;
    // recompute both sides of the inequality from the witness
    Eigen::VectorXd w(B.size());
    for (std::size_t a = 0; a < B.size(); ++a) w[a] = 1.0 / static_cast<double>(B.size());
    const double mean = w.dot(f);
    double osc = 0.0;
    for (int a = 0; a < f.size(); ++a) osc += w[a] * std::abs(f[a] - mean);
    double grad = 0.0;
    for (int a = 0; a < f.size(); ++a) {
        double g = 0.0;
        for (int b = 0; b < f.size(); ++b)
            if (sp.adjacent(B[a], B[b]))
                g = std::max(g, std::abs(f[b] - f[a]) / sp.edge_length(B[a], B[b]));
        grad += w[a] * g;
    }
    CHECK(osc == doctest::Approx(pr.constant * grad).epsilon(1e-9));
}

TEST_CASE("bottleneck makes the constant grow") {
    double prev = 0.0;
    for (double bridge : {1.0, 2.0, 4.0, 8.0}) {
        const Space sp = dumbbell(bridge);
        const ProbMeasure rho = uniform_rho(sp, all_of(sp));
        const PoincareResult pr = local_poincare_constant(sp, rho, all_of(sp), 1.0);
        CHECK(pr.constant > prev);
        prev = pr.constant;
    }
}

TEST_CASE("monotone under ball enlargement on nested path fixtures") {
    Eigen::VectorXd m = Eigen::VectorXd::Ones(8);
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < 8; ++i) edges.push_back(Edge{i, i + 1, 1.0});
    const Space sp = build_space(edges, m);
    const ProbMeasure rho = uniform_rho(sp, all_of(sp));
    double prev = 0.0;
    for (int hi : {1, 3, 5, 7}) {
        std::vector<int> B;
        for (int i = 0; i <= hi; ++i) B.push_back(i);
        const PoincareResult pr = local_poincare_constant(sp, rho, B, 1.0);
        CHECK(pr.constant >= prev - 1e-12);
        prev = pr.constant;
    }
}

TEST_CASE("singleton and oversized balls rejected") {
    const Space sp = dumbbell(1.0);
    const ProbMeasure rho = uniform_rho(sp, all_of(sp));
    CHECK_THROWS_WITH_AS(local_poincare_constant(sp, rho, {0}, 1.0),
                         doctest::Contains("Poincaré undefined"), std::invalid_argument);
    const RefinementLevel big = interval_level(30);
    const ProbMeasure rho2 = uniform_rho(big.space, all_of(big.space));
    CHECK_THROWS_AS(local_poincare_constant(big.space, rho2, all_of(big.space), 1.0),
                    std::invalid_argument);
}

TEST_CASE("single-ball cover of a small S") {
    const Space sp = grid_patch(6, 1.0 / 5.0);
    // S = one Whitney ball around the center of the patch
    const int c = 2 * 6 + 2;
    std::vector<int> S = ball(sp, c, 1.0 / 5.0);
    const ProbMeasure rho = uniform_rho(sp, S);
    const BomanCover cover = boman_cover(sp, S, rho, c, 0.0);
    CHECK(cover.balls.size() == 1);
    CHECK(cover.chains[0] == std::vector<int>{0});
    CHECK(cover.E >= 1.0);
}

TEST_CASE("16x16 grid cover is certified and glues") {
    const Space sp = grid_patch(16, 1.0 / 15.0);
    // S = interior 14x14 block, John center in the middle
    std::vector<int> S;
    for (int r = 1; r < 15; ++r)
        for (int c = 1; c < 15; ++c) S.push_back(r * 16 + c);
    const ProbMeasure rho = uniform_rho(sp, S);
    const int center = 8 * 16 + 8;
    const BomanCover cover = boman_cover(sp, S, rho, center, 0.5);
    CHECK(cover.E >= 1.0);
    CHECK(cover.F >= 1.0);
    CHECK(cover.G >= 1.0);
    CHECK(cover.beta >= 1.0);
    CHECK(cover.balls.size() > 10);

    SUBCASE("constant f gives zero on both sides") {
        const GluingReport rep = gluing_check(cover, rho, Eigen::VectorXd::Constant(sp.n, 3.3));
        CHECK(rep.lhs == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rep.rhs_sum == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rep.pass);
    }

    SUBCASE("200 random f all pass with the explicit C5") {
        Rng rng(123);
        double worst = 1e300;
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::VectorXd f(sp.n);
            for (int i = 0; i < sp.n; ++i) f[i] = rng.uniform(-1.0, 1.0);
            const GluingReport rep = gluing_check(cover, rho, f);
            CHECK(rep.pass);
            if (rep.rhs_sum > 0.0) worst = std::min(worst, rep.slack / rep.rhs_sum);
        }
        CHECK(worst > 0.0);
    }

    SUBCASE("indicator-like split across the central ball passes") {
        Eigen::VectorXd f(sp.n);
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c) f[r * 16 + c] = (c < 8) ? -1.0 : 1.0;
        const GluingReport rep = gluing_check(cover, rho, f);
        CHECK(rep.pass);
        CHECK(rep.slack >= 0.0);
    }
}

TEST_CASE("cusp family: certified G grows as the throat sharpens") {
    double prev_g = 0.0;
    for (double sharp : {0.4, 0.7, 1.0}) {
        const CuspFixture fx = cusp_fixture(12, sharp);
        const ProbMeasure rho = uniform_rho(fx.space, fx.S);
        const BomanCover cover = boman_cover(fx.space, fx.S, rho, fx.mouth_center, 0.1);
        CHECK(cover.G >= prev_g);
        prev_g = cover.G;
    }
    CHECK(prev_g > 1.0);
}

TEST_CASE("global concavity probe") {
    const RefinementLevel lvl = interval_level(24);
    const Space& sp = lvl.space;
    const Generator gen = build_generator(sp, ConductanceRule::inv_length_squared);
    std::vector<int> S;
    for (int i = 0; i <= 10; ++i) S.push_back(i);
    const ProbMeasure rho = uniform_rho(sp, S);
    const double t = 0.1;
    const HeatKernel kernel = heat_kernel(gen, t / 2.0);
    Rng rng(5);
    Eigen::VectorXd phi(sp.n);
    for (int i = 0; i < sp.n; ++i) phi[i] = rng.uniform(-0.5, 0.5);
    const GibbsSystem gs = gibbs(phi, t, kernel, sp.m, rho);

    SUBCASE("constant v has zero ratio") {
        const ConcavityProbe pr = global_concavity_probe(gs, rho, Eigen::VectorXd::Ones(sp.n));
        CHECK(pr.lhs == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(pr.ratio == 0.0);
    }

    SUBCASE("batch of 100 random Lipschitz v gives a finite kappa-hat") {
        double kappa = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd v(sp.n);
            v[0] = rng.uniform(-1.0, 1.0);
            for (int i = 1; i < sp.n; ++i)
                v[i] = v[i - 1] + lvl.h * rng.uniform(-1.0, 1.0);  // 1-Lipschitz
            const ConcavityProbe pr = global_concavity_probe(gs, rho, v);
            CHECK(std::isfinite(pr.ratio));
            kappa = std::max(kappa, pr.ratio);
        }
        CHECK(kappa > 0.0);
        CHECK(kappa < 10.0);
    }

    SUBCASE("kappa-hat stable within 2x across t in {h, 2h, 4h}") {
        std::vector<double> kappas;
        for (double mult : {1.0, 2.0, 4.0}) {
            const double tt = mult * lvl.h;
            const HeatKernel k2 = heat_kernel(gen, tt / 2.0, KernelBackend::expm);
            const GibbsSystem g2 = gibbs(phi, tt, k2, sp.m, rho);
            double kappa = 0.0;
            Rng rng2(9);
            for (int trial = 0; trial < 40; ++trial) {
                Eigen::VectorXd v(sp.n);
                v[0] = rng2.uniform(-1.0, 1.0);
                for (int i = 1; i < sp.n; ++i) v[i] = v[i - 1] + lvl.h * rng2.uniform(-1.0, 1.0);
                kappa = std::max(kappa, global_concavity_probe(g2, rho, v).ratio);
            }
            kappas.push_back(kappa);
        }
        for (double k2 : kappas) {
            CHECK(k2 <= 2.0 * kappas[0] + 1e-12);
            CHECK(k2 >= 0.5 * kappas[0] - 1e-12);
        }
    }
}
