#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "otlab/fixtures.hpp"
#include "otlab/geolines.hpp"
#include "otlab/harness.hpp"
#include "otlab/heat.hpp"
#include "otlab/io.hpp"
#include "otlab/poincare.hpp"
#include "otlab/regularize.hpp"
#include "otlab/transport.hpp"

namespace {

using namespace otlab;

std::vector<int> parse_csv_ints(const std::string& s) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

TRule rule_by_name(const std::string& name) {
    if (name == "h") return t_equals_h();
    if (name == "2h") return t_equals_c_h(2.0);
    if (name == "4h") return t_equals_c_h(4.0);
    if (name == "sqrt_h") return t_equals_sqrt_h();
    throw CLI::ValidationError("t-rule", "unknown rule " + name);
}

FlatDomain parse_domain(const std::string& world_name, const std::string& shape_spec) {
    const FlatWorld world = (world_name == "square") ? FlatWorld::square : FlatWorld::torus;
    if (shape_spec.rfind("disk:", 0) == 0) {
        std::istringstream is(shape_spec.substr(5));
        Circle c;
        char comma;
        is >> c.center[0] >> comma >> c.center[1] >> comma >> c.radius;
        return make_flat_domain(world, c);
    }
    // polygon file: "x y" vertex lines, counterclockwise
    Polygon poly;
    std::istringstream is(read_text_file(shape_spec));
    double x, y;
    while (is >> x >> y) poly.vertices.push_back({x, y});
    return make_flat_domain(world, poly);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"otlab: heat-kernel-regularized c-transform lab on finite metric measure spaces"};
    app.require_subcommand(1);

    // --- space ---
    auto* space_cmd = app.add_subcommand("space", "build and cache spaces");
    auto* space_build = space_cmd->add_subcommand("build", "build a space cache from a spec file");
    std::string spec_path, out_path;
    space_build->add_option("--spec", spec_path, "space spec file")->required();
    space_build->add_option("--out", out_path, "output cache path")->required();
    space_build->callback([&] {
        const Space sp = parse_space_spec(read_text_file(spec_path));
        write_space_cache(sp, out_path);
        std::cout << "space: n=" << sp.n << " edges=" << sp.edges.size() << " -> " << out_path
                  << "\n";
    });

    // --- heat ---
    auto* heat_cmd = app.add_subcommand("heat", "heat kernels and diagnostics");
    auto* heat_kernel_cmd = heat_cmd->add_subcommand("kernel", "compute p_t and write x,y,p rows");
    std::string cache_path, rule_name = "invlen2", out_csv;
    double t_value = 0.1;
    heat_kernel_cmd->add_option("--space", cache_path)->required();
    heat_kernel_cmd->add_option("--t", t_value)->required();
    heat_kernel_cmd->add_option("--rule", rule_name, "unit|invlen2");
    heat_kernel_cmd->add_option("--out", out_csv)->required();
    heat_kernel_cmd->callback([&] {
        const Space sp = read_space_cache(cache_path);
        const auto rule = (rule_name == "unit") ? ConductanceRule::unit
                                                : ConductanceRule::inv_length_squared;
        const Generator gen = build_generator(sp, rule);
        const HeatKernel k = heat_kernel(gen, t_value);
        k.validate(sp.m);
        std::ostringstream os;
        os << "x,y,p\n";
        for (int i = 0; i < sp.n; ++i)
            for (int j = 0; j < sp.n; ++j) os << i << "," << j << "," << format_double(k.p(i, j)) << "\n";
        write_text_file(out_csv, os.str());
        std::cout << "kernel t=" << t_value << " mass_residual=" << k.mass_residual(sp.m) << "\n";
    });

    auto* heat_var = heat_cmd->add_subcommand("varadhan", "refinement table for -t log p_{t/2}");
    std::string cells_list = "32,64,128,256", t_rule_name = "h";
    double vx = 0.25, vy = 0.75;
    heat_var->add_option("--cells", cells_list, "comma-separated interval cell counts");
    heat_var->add_option("--x", vx);
    heat_var->add_option("--y", vy);
    heat_var->add_option("--t-rule", t_rule_name, "h|2h|4h|sqrt_h");
    heat_var->add_option("--out", out_csv)->required();
    heat_var->callback([&] {
        const auto family = interval_family(parse_csv_ints(cells_list));
        const auto rows = varadhan_gap(family, rule_by_name(t_rule_name), vx, vy);
        std::ostringstream os;
        os << "h,t,x,y,gap\n";
        for (const auto& r : rows)
            os << format_double(r.h) << "," << format_double(r.t) << "," << format_double(r.x)
               << "," << format_double(r.y) << "," << format_double(r.gap) << "\n";
        write_text_file(out_csv, os.str());
    });

    // --- ot ---
    auto* ot_cmd = app.add_subcommand("ot", "exact optimal transport");
    auto* ot_solve = ot_cmd->add_subcommand("solve", "Kantorovich solve, potentials to CSV");
    std::string rho_path, mu_path, cost_name = "halfsq";
    ot_solve->add_option("--space", cache_path)->required();
    ot_solve->add_option("--rho", rho_path, "source measure CSV (index,weight)")->required();
    ot_solve->add_option("--mu", mu_path, "target measure CSV")->required();
    ot_solve->add_option("--cost", cost_name, "halfsq|dist");
    ot_solve->add_option("--out", out_csv, "potential CSV (index,phi)")->required();
    ot_solve->callback([&] {
        const Space sp = read_space_cache(cache_path);
        const ProbMeasure rho = read_measure_csv(rho_path);
        const ProbMeasure mu = read_measure_csv(mu_path);
        rho.validate(sp);
        mu.validate(sp);
        const CostMatrix cost = make_cost(
            sp, rho.support, mu.support,
            cost_name == "dist" ? CostKind::distance : CostKind::half_squared);
        const PotentialPair pair = solve_kantorovich(rho, mu, cost);
        write_potential_csv(pair.rows, pair.phi, out_csv);
        std::cout << "value " << format_double(pair.value) << "\n";
    });

    // --- reg ---
    auto* reg_cmd = app.add_subcommand("reg", "heat-kernel regularized c-transform");
    auto* reg_phit = reg_cmd->add_subcommand("phi-t", "Phi_t of a potential given on all points");
    std::string psi_path;
    reg_phit->add_option("--space", cache_path)->required();
    reg_phit->add_option("--psi", psi_path, "potential CSV on all points (index,phi)")->required();
    reg_phit->add_option("--t", t_value)->required();
    reg_phit->add_option("--out", out_csv)->required();
    reg_phit->callback([&] {
        const Space sp = read_space_cache(cache_path);
        const ProbMeasure raw = read_measure_csv(psi_path);  // same two-column layout
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(sp.n);
        for (std::size_t k = 0; k < raw.support.size(); ++k) phi[raw.support[k]] = raw.weights[k];
        const Generator gen = build_generator(sp, ConductanceRule::inv_length_squared);
        const HeatKernel kern = heat_kernel(gen, t_value / 2.0);
        const Eigen::VectorXd vals = phi_t_all(phi, t_value, kern, sp.m);
        std::vector<int> idx(sp.n);
        std::vector<double> v(sp.n);
        for (int i = 0; i < sp.n; ++i) {
            idx[i] = i;
            v[i] = vals[i];
        }
        write_potential_csv(idx, v, out_csv);
    });

    auto* reg_limits = reg_cmd->add_subcommand("limits", "refinement tables for the t->0 limits");
    std::string limit_kind = "ctransform";
    reg_limits->add_option("--kind", limit_kind, "ctransform|marginal");
    reg_limits->add_option("--cells", cells_list);
    reg_limits->add_option("--t-rule", t_rule_name);
    reg_limits->add_option("--out", out_csv)->required();
    reg_limits->callback([&] {
        const auto family = interval_family(parse_csv_ints(cells_list));
        std::vector<LimitRow> rows;
        if (limit_kind == "ctransform") {
            rows = ctransform_limit(family, rule_by_name(t_rule_name), 0.0, 0.3, 0.35, 0.8,
                                    [](double y) { return -(y - 0.6) * (y - 0.6); });
        } else {
            rows = marginal_limit(family, rule_by_name(t_rule_name), 0.0, 0.4,
                                  {{0.625, 0.5}, {1.0, 0.5}}, [](double y) { return y; });
        }
        std::ostringstream os;
        os << "h,t,sup_gap\n";
        for (const auto& r : rows)
            os << format_double(r.h) << "," << format_double(r.t) << ","
               << format_double(r.sup_gap) << "\n";
        write_text_file(out_csv, os.str());
    });

    // --- poincare ---
    auto* poin_cmd = app.add_subcommand("poincare", "local constants, covers, gluing");
    auto* poin_cover = poin_cmd->add_subcommand("cover", "Boman cover of S");
    std::string s_csv;
    int center = 0;
    poin_cover->add_option("--space", cache_path)->required();
    poin_cover->add_option("--S", s_csv, "S as measure CSV (weights give rho)")->required();
    poin_cover->add_option("--center", center, "John center index")->required();
    poin_cover->add_option("--out", out_csv)->required();
    poin_cover->callback([&] {
        const Space sp = read_space_cache(cache_path);
        const ProbMeasure rho = read_measure_csv(s_csv);
        const BomanCover cover = boman_cover(sp, rho.support, rho, center, 0.0);
        std::ostringstream os;
        for (std::size_t i = 0; i < cover.balls.size(); ++i) {
            os << cover.balls[i].center << " " << format_double(cover.balls[i].radius) << " chain:";
            for (int c : cover.chains[i]) os << " " << c;
            os << "\n";
        }
        os << "constants " << format_double(cover.E) << " " << format_double(cover.F) << " "
           << format_double(cover.G) << " " << format_double(cover.beta) << "\n";
        write_text_file(out_csv, os.str());
    });

    // --- lines ---
    auto* lines_cmd = app.add_subcommand("lines", "flat-domain geodesic sampling");
    auto* lines_cross = lines_cmd->add_subcommand("cross", "crossing-count Monte Carlo");
    std::string world_name = "torus", shape_spec = "disk:0.5,0.5,0.25";
    long samples = 100000;
    std::uint64_t seed = 0;
    lines_cross->add_option("--domain", world_name, "torus|square");
    lines_cross->add_option("--S", shape_spec, "polygon file or disk:cx,cy,r");
    lines_cross->add_option("--samples", samples);
    lines_cross->add_option("--seed", seed);
    lines_cross->add_option("--out", out_csv)->required();
    lines_cross->callback([&] {
        const FlatDomain dom = parse_domain(world_name, shape_spec);
        const CrossingAverage ca = crossing_average(dom, samples, seed);
        std::ostringstream os;
        os << "mean_scaled,se_scaled,bound,pass,samples\n";
        os << format_double(ca.mean_scaled) << "," << format_double(ca.se_scaled) << ","
           << format_double(ca.bound) << "," << (ca.pass ? 1 : 0) << "," << ca.samples << "\n";
        write_text_file(out_csv, os.str());
    });

    auto* lines_sample = lines_cmd->add_subcommand("sample", "Liouville samples to CSV");
    lines_sample->add_option("--domain", world_name);
    lines_sample->add_option("--S", shape_spec);
    lines_sample->add_option("--samples", samples);
    lines_sample->add_option("--seed", seed);
    lines_sample->add_option("--out", out_csv)->required();
    lines_sample->callback([&] {
        const FlatDomain dom = parse_domain(world_name, shape_spec);
        const auto pts = sample_liouville(dom, samples, seed);
        std::ostringstream os;
        os << "x,y,vx,vy\n";
        for (const auto& pd : pts)
            os << format_double(pd.x[0]) << "," << format_double(pd.x[1]) << ","
               << format_double(pd.v[0]) << "," << format_double(pd.v[1]) << "\n";
        write_text_file(out_csv, os.str());
    });

    // --- run ---
    auto* run_cmd = app.add_subcommand("run", "experiment driver");
    std::string config_path, out_dir;
    std::string experiment = "potential";
    run_cmd->add_option("--config", config_path, "key=value config with [section] headers")
        ->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
    run_cmd->add_option("--experiment", experiment, "potential|functional|map");
    run_cmd->callback([&] {
        ExperimentConfig cfg = config_from_map(read_config_file(config_path));
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        ExperimentReport rep;
        if (experiment == "potential")
            rep = run_potential_stability(cfg);
        else if (experiment == "functional")
            rep = run_functional_stability(cfg);
        else if (experiment == "map")
            rep = run_map_stability(cfg);
        else
            throw CLI::ValidationError("experiment", "unknown experiment " + experiment);
        write_report(rep, cfg.out_dir);
        std::cout << "wrote " << cfg.out_dir << "/report.csv (" << rep.rows.size() << " rows)\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
