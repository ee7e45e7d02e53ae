#include "otlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "otlab/fixtures.hpp"
#include "otlab/geolines.hpp"
#include "otlab/regularize.hpp"
#include "otlab/rng.hpp"
#include "otlab/transport.hpp"

namespace otlab {

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

TRule t_rule_by_name(const std::string& name) {
    if (name == "h") return t_equals_h();
    if (name == "2h") return t_equals_c_h(2.0);
    if (name == "4h") return t_equals_c_h(4.0);
    if (name == "sqrt_h") return t_equals_sqrt_h();
    throw std::invalid_argument("unknown t rule: " + name);
}

// canonical four-atom target on the unit square, shiftable along +x with
// sub-cell mass splitting (keeps W1(mu, nu_eps) = eps exactly)
constexpr double kAtomX[2] = {0.125, 0.375};
constexpr double kAtomY[2] = {0.25, 0.75};

ProbMeasure atom_measure(const RefinementLevel& lvl, double shift) {
    const int k = static_cast<int>(std::lround(1.0 / lvl.h)) + 1;
    ProbMeasure pm;
    auto add = [&](int ix, int iy, double w) {
        if (w <= 0.0) return;
        pm.support.push_back(iy * k + ix);
        pm.weights.push_back(w);
    };
    for (double ax : kAtomX)
        for (double ay : kAtomY) {
            const double gx = (ax + shift) / lvl.h;
            const int g0 = static_cast<int>(std::floor(gx + 1e-9));
            const double th = gx - g0;
            const int iy = static_cast<int>(std::lround(ay / lvl.h));
            if (th < 1e-9) {
                add(g0, iy, 0.25);
            } else {
                add(g0, iy, 0.25 * (1.0 - th));
                add(g0 + 1, iy, 0.25 * th);
            }
        }
    return pm;
}

ProbMeasure uniform_on(const Space& space, const std::vector<int>& S) {
    ProbMeasure rho;
    rho.support = S;
    double mS = 0.0;
    for (int i : S) mS += space.m[i];
    for (int i : S) rho.weights.push_back(space.m[i] / mS);
    return rho;
}

std::vector<int> all_indices(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

// target measure for one family step of the configured pair generator
ProbMeasure pair_target(const ExperimentConfig& cfg, const RefinementLevel& lvl, int j) {
    const double eps = std::pow(2.0, -static_cast<double>(j));
    if (cfg.pair_kind == "slide") return atom_measure(lvl, eps);
    if (cfg.pair_kind == "split") {
        // move a 2^-j fraction of the first atom to the second atom site
        ProbMeasure nu = atom_measure(lvl, 0.0);
        const double moved = 0.25 * eps;
        nu.weights[0] -= moved;
        nu.weights[1] += moved;
        return nu;
    }
    if (cfg.pair_kind == "random") {
        ProbMeasure nu = atom_measure(lvl, 0.0);
        Rng rng(cfg.seed + 1000 * j);
        double tot = 0.0;
        for (auto& w : nu.weights) {
            w *= 1.0 + eps * (rng.uniform() - 0.5);
            tot += w;
        }
        for (auto& w : nu.weights) w /= tot;
        return nu;
    }
    throw std::invalid_argument("unknown pair kind: " + cfg.pair_kind);
}

std::string env_stamp(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "otlab " << kOtlabVersion << "\n";
    os << "seed " << cfg.seed << "\n";
    os << "fixture " << cfg.fixture << "\n";
    os << "t_rule " << cfg.t_rule << "\n";
    os << "pair_kind " << cfg.pair_kind << "\n";
    return os.str();
}

}  // namespace

ExperimentConfig config_from_map(const ConfigMap& map) {
    ExperimentConfig cfg;
    auto get = [&](const std::string& key, const std::string& dflt) {
        auto it = map.find(key);
        return it == map.end() ? dflt : it->second;
    };
    cfg.fixture = get("fixture.kind", cfg.fixture);
    cfg.sizes = parse_int_list(get("fixture.sizes", "8,16,24"));
    cfg.t_rule = get("fixture.t_rule", cfg.t_rule);
    cfg.pair_kind = get("pairs.kind", cfg.pair_kind);
    cfg.pair_count = std::stoi(get("pairs.count", "6"));
    cfg.seed = std::stoull(get("pairs.seed", "0"));
    cfg.out_dir = get("output.dir", cfg.out_dir);
    for (const auto& [k, v] : map)
        if (k.rfind("tolerances.", 0) == 0) cfg.tolerances[k.substr(11)] = std::stod(v);
    if (cfg.sizes.empty()) throw std::invalid_argument("config: sizes must be nonempty");
    for (std::size_t i = 1; i < cfg.sizes.size(); ++i)
        if (cfg.sizes[i] <= cfg.sizes[i - 1])
            throw std::invalid_argument("config: sizes must be strictly increasing");
    return cfg;
}

ExperimentReport run_potential_stability(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.env = env_stamp(cfg);
    std::vector<std::pair<double, double>> finest_xy;
    for (int size : cfg.sizes) {
        const RefinementLevel lvl = grid2d_level(size);
        const Space& sp = lvl.space;
        const ProbMeasure rho = uniform_on(sp, all_indices(sp.n));
        const ProbMeasure mu = atom_measure(lvl, 0.0);
        // one common column set per level so both potentials share rows/cols
        double chat = 0.0;
        std::vector<ReportRow> level_rows;
        for (int j = 1; j <= cfg.pair_count; ++j) {
            const ProbMeasure nu = pair_target(cfg, lvl, j);
            std::vector<int> ycols = mu.support;
            for (int i : nu.support)
                if (std::find(ycols.begin(), ycols.end(), i) == ycols.end()) ycols.push_back(i);
            const CostMatrix cost = make_cost(sp, all_indices(sp.n), ycols, CostKind::half_squared);
            const PotentialPair pm = solve_kantorovich(rho, mu, cost);
            const PotentialPair pn = solve_kantorovich(rho, nu, cost);
            const double w1 = wasserstein1(mu, nu, sp);
            ReportRow row;
            row.kind = "potential";
            row.size = size;
            row.eps = std::pow(2.0, -j);
            row.w1 = w1;
            double l1 = 0.0, l2 = 0.0;
            for (std::size_t a = 0; a < rho.support.size(); ++a) {
                const double d = pm.phi[a] - pn.phi[a];
                l1 += rho.weights[a] * std::abs(d);
                l2 += rho.weights[a] * d * d;
            }
            row.l1_gap = l1;
            row.l2_gap = std::sqrt(l2);
            row.ratio = (w1 > 0.0) ? l1 / std::sqrt(w1) : 0.0;
            chat = std::max(chat, row.ratio);
            level_rows.push_back(row);
        }
        rep.constants["Chat_" + std::to_string(size)] = chat;
        if (size == cfg.sizes.back())
            for (const auto& r : level_rows)
                if (r.w1 > 0.0 && r.l1_gap > 0.0) finest_xy.push_back({r.w1, r.l1_gap});
        rep.rows.insert(rep.rows.end(), level_rows.begin(), level_rows.end());
    }
    rep.fits["l1_vs_w1"] = fit_exponent(finest_xy);
    return rep;
}

ExperimentReport run_functional_stability(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.env = env_stamp(cfg);
    const TRule rule = t_rule_by_name(cfg.t_rule);
    double kappa_like = 0.0;
    for (int size : cfg.sizes) {
        const RefinementLevel lvl = interval_level(size);
        const Space& sp = lvl.space;
        std::vector<int> S;
        for (int i = 0; i < sp.n; ++i)
            if (lvl.coords[i][0] <= 0.4 + 1e-12) S.push_back(i);
        const ProbMeasure rho = uniform_on(sp, S);
        // two-atom targets; both solved against a shared column set
        auto atom = [&](double c, double w) { return MarginalAtom{c, w}; };
        const std::vector<MarginalAtom> mu_atoms = {atom(0.5, 0.5), atom(0.75, 0.5)};
        const std::vector<MarginalAtom> nu_atoms = {atom(0.5, 0.35), atom(0.75, 0.65)};
        std::vector<int> ycols;
        ProbMeasure mu, nu;
        for (const auto& a : mu_atoms) {
            mu.support.push_back(lvl.index_of(a.coord));
            mu.weights.push_back(a.weight);
        }
        for (const auto& a : nu_atoms) {
            nu.support.push_back(lvl.index_of(a.coord));
            nu.weights.push_back(a.weight);
        }
        ycols = mu.support;
        for (int i : nu.support)
            if (std::find(ycols.begin(), ycols.end(), i) == ycols.end()) ycols.push_back(i);
        const CostMatrix cost = make_cost(sp, S, ycols, CostKind::half_squared);
        const PotentialPair pm = solve_kantorovich(rho, mu, cost);
        const PotentialPair pn = solve_kantorovich(rho, nu, cost);
        const DomainPair dom = make_domain_pair(sp, S, ycols);
        const ExtendedPotential phext = mcshane_extend(pm.psi, dom, sp);
        const ExtendedPotential psext = mcshane_extend(pn.psi, dom, sp);
        const Generator gen = build_generator(sp, ConductanceRule::inv_length_squared);
        for (double mult : {1.0, 2.0, 4.0}) {
            const double t = mult * rule(lvl.h);
            const HeatKernel kernel = heat_kernel(gen, t / 2.0, KernelBackend::expm);
            const Eigen::VectorXd fs = phi_t_all(phext.psi_star, t, kernel, sp.m);
            const Eigen::VectorXd gsv = phi_t_all(psext.psi_star, t, kernel, sp.m);
            const double kf = k_t(phext.psi_star, t, kernel, sp.m, rho);
            const double kg = k_t(psext.psi_star, t, kernel, sp.m, rho);
            double lhs = 0.0;
            for (std::size_t a = 0; a < rho.support.size(); ++a)
                lhs += rho.weights[a] *
                       std::abs((fs[rho.support[a]] - kf) - (gsv[rho.support[a]] - kg));
            const GibbsSystem g1 = gibbs(phext.psi_star, t, kernel, sp.m, rho);
            const GibbsSystem g2 = gibbs(psext.psi_star, t, kernel, sp.m, rho);
            const Eigen::VectorXd diff = phext.psi_star - psext.psi_star;
            const double pairing = (g1.marginal - g2.marginal).dot(diff);
            ReportRow row;
            row.kind = "functional";
            row.size = size;
            row.t = t;
            row.l1_gap = lhs;
            row.w1 = std::sqrt(std::abs(pairing));  // rhs base
            if (row.w1 > 1e-12) {
                row.ratio = lhs / row.w1;
                kappa_like = std::max(kappa_like, row.ratio);
            } else if (lhs > 1e-9) {
                row.note = "flagged: rhs_base vanished with lhs > tol";
            }
            rep.rows.push_back(row);
        }
    }
    rep.constants["C6_hat"] = kappa_like;
    return rep;
}

ExperimentReport run_map_stability(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.env = env_stamp(cfg);
    std::vector<std::pair<double, double>> finest_map_xy;
    for (int size : cfg.sizes) {
        const RefinementLevel lvl = grid2d_level(size);
        const Space& sp = lvl.space;
        const int k = static_cast<int>(std::lround(1.0 / lvl.h)) + 1;
        const ProbMeasure rho = uniform_on(sp, all_indices(sp.n));
        const ProbMeasure mu = atom_measure(lvl, 0.0);
        double chat_map = 0.0, cbar = 0.0;
        std::vector<ReportRow> level_rows;
        for (int j = 1; j <= cfg.pair_count; ++j) {
            const ProbMeasure nu = pair_target(cfg, lvl, j);
            std::vector<int> ycols = mu.support;
            for (int i : nu.support)
                if (std::find(ycols.begin(), ycols.end(), i) == ycols.end()) ycols.push_back(i);
            const CostMatrix cost = make_cost(sp, all_indices(sp.n), ycols, CostKind::half_squared);
            const PotentialPair pm = solve_kantorovich(rho, mu, cost);
            const PotentialPair pn = solve_kantorovich(rho, nu, cost);
            ReportRow row;
            row.kind = "map";
            row.size = size;
            row.eps = std::pow(2.0, -j);
            row.w1 = wasserstein1(mu, nu, sp);
            double l2 = 0.0;
            Eigen::VectorXd fm(sp.n), fn(sp.n), rdense = rho.dense(sp.n);
            for (int a = 0; a < sp.n; ++a) {
                fm[a] = pm.phi[a];
                fn[a] = pn.phi[a];
                const double d = fm[a] - fn[a];
                l2 += rdense[a] * d * d;
            }
            row.l2_gap = std::sqrt(l2);
            const GradDiscrepancy gd = grad_potential_discrepancy(
                k, lvl.h, fm, fn, rdense, std::vector<char>(sp.n, 1));
            row.grad_gap = gd.lhs;
            try {
                const TransportMap tm = extract_map(pm, 0.01, true);
                const TransportMap tn = extract_map(pn, 0.01, true);
                row.map_gap = map_discrepancy(tm, tn, rho, sp);
                row.ratio = (row.w1 > 0.0) ? row.map_gap / std::pow(row.w1, 1.0 / 6.0) : 0.0;
                chat_map = std::max(chat_map, row.ratio);
            } catch (const std::runtime_error& err) {
                row.note = std::string("skipped: ") + err.what();
            }
            if (gd.rhs_base > 0.0) cbar = std::max(cbar, gd.lhs / gd.rhs_base);
            level_rows.push_back(row);
        }
        rep.constants["Chat_map_" + std::to_string(size)] = chat_map;
        rep.constants["Cbar_" + std::to_string(size)] = cbar;
        if (size == cfg.sizes.back())
            for (const auto& r : level_rows)
                if (r.note.empty() && r.w1 > 0.0 && r.map_gap > 0.0)
                    finest_map_xy.push_back({r.w1, r.map_gap});
        rep.rows.insert(rep.rows.end(), level_rows.begin(), level_rows.end());
    }
    if (finest_map_xy.size() >= 3) rep.fits["map_vs_w1"] = fit_exponent(finest_map_xy);
    return rep;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& xy) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& [x, y] : xy)
        if (x > 0.0 && y > 0.0) usable.push_back({std::log(x), std::log(y)});
    if (usable.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 rows with positive x and y");
    const double n = static_cast<double>(usable.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : usable) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    FitResult fr;
    const double vxx = sxx - sx * sx / n;
    const double vxy = sxy - sx * sy / n;
    const double vyy = syy - sy * sy / n;
    fr.slope = vxy / vxx;
    fr.intercept = (sy - fr.slope * sx) / n;
    fr.r2 = (vyy > 0.0) ? (vxy * vxy) / (vxx * vyy) : 1.0;
    return fr;
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "kind,size,eps,t,w1,l1_gap,l2_gap,grad_gap,map_gap,ratio,note\n";
    for (const ReportRow& r : report.rows) {
        os << r.kind << "," << r.size << "," << format_double(r.eps) << "," << format_double(r.t)
           << "," << format_double(r.w1) << "," << format_double(r.l1_gap) << ","
           << format_double(r.l2_gap) << "," << format_double(r.grad_gap) << ","
           << format_double(r.map_gap) << "," << format_double(r.ratio) << "," << r.note << "\n";
    }
    for (const auto& [name, value] : report.constants)
        os << "const," << name << "," << format_double(value) << ",,,,,,,,\n";
    for (const auto& [name, fit] : report.fits)
        os << "fit," << name << "," << format_double(fit.slope) << ","
           << format_double(fit.intercept) << "," << format_double(fit.r2) << ",,,,,,\n";
    return os.str();
}

namespace {

std::string report_svg(const ExperimentReport& report) {
    // log-log scatter of (w1, l1_gap or map_gap) with the paper's reference
    // slopes 1/2 and 1/6 drawn through the data midpoint
    std::vector<std::pair<double, double>> pts;
    for (const ReportRow& r : report.rows) {
        const double y = (r.kind == "map") ? r.map_gap : r.l1_gap;
        if (r.w1 > 0.0 && y > 0.0 && r.note.empty()) pts.push_back({std::log10(r.w1), std::log10(y)});
    }
    std::ostringstream os;
    const int W = 480, H = 360, Mg = 48;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    if (!pts.empty()) {
        double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
        for (auto& [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        if (x1 - x0 < 1e-9) x1 = x0 + 1;
        if (y1 - y0 < 1e-9) y1 = y0 + 1;
        auto px = [&](double x) { return Mg + (x - x0) / (x1 - x0) * (W - 2 * Mg); };
        auto py = [&](double y) { return H - Mg - (y - y0) / (y1 - y0) * (H - 2 * Mg); };
        const double cx = 0.5 * (x0 + x1);
        const double cy = 0.5 * (y0 + y1);
        for (double slope : {0.5, 1.0 / 6.0}) {
            os << "<line x1='" << px(x0) << "' y1='" << py(cy + slope * (x0 - cx)) << "' x2='"
               << px(x1) << "' y2='" << py(cy + slope * (x1 - cx))
               << "' stroke='#999' stroke-dasharray='4 3'/>\n";
        }
        for (auto& [x, y] : pts)
            os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='3' fill='#1f77b4'/>\n";
        os << "<text x='" << Mg << "' y='" << H - 12
           << "' font-size='11'>log10 W1 (dashed: slopes 1/2, 1/6)</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace

void write_report(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/report.csv", report_csv(report));
    write_text_file(out_dir + "/report.svg", report_svg(report));
    write_text_file(out_dir + "/env.txt", report.env);
}

}  // namespace otlab
