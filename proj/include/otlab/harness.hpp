#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "otlab/io.hpp"

namespace otlab {

inline constexpr const char* kOtlabVersion = "0.1.0";

struct ExperimentConfig {
    std::string fixture = "grid2d";    // interval | grid2d | torus-disk | cusp
    std::vector<int> sizes;            // strictly increasing cell counts
    std::string t_rule = "h";          // h | 2h | 4h | sqrt_h
    std::string pair_kind = "slide";   // slide | split | random
    int pair_count = 6;                // eps_j = 2^{-j}, j = 1..pair_count
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::map<std::string, double> tolerances;
};

ExperimentConfig config_from_map(const ConfigMap& map);

struct ReportRow {
    std::string kind;
    int size = 0;
    double eps = 0.0;
    double t = 0.0;
    double w1 = 0.0;
    double l1_gap = 0.0;
    double l2_gap = 0.0;
    double grad_gap = 0.0;
    double map_gap = 0.0;
    double ratio = 0.0;
    std::string note;  // nonempty when the row was skipped
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::map<std::string, double> constants;
    std::map<std::string, FitResult> fits;
    std::string env;
};

// Theorem on L1 potential stability: rows (w1, l1_gap) per slide pair,
// Chat_<size> = max l1/sqrt(w1) per level, slope fitted on the finest level.
ExperimentReport run_potential_stability(const ExperimentConfig& cfg);

// Kantorovich-functional stability: rows (t, lhs, rhs_base, ratio) on the
// interval fixture; boundedness reported, not failed.
ExperimentReport run_functional_stability(const ExperimentConfig& cfg);

// map stability (squared-displacement vs W1^{1/6}) and the planar gradient
// bound; strict-map failures skip the row with a reason.
ExperimentReport run_map_stability(const ExperimentConfig& cfg);

// least squares on (log x, log y); throws with fewer than 3 positive rows
FitResult fit_exponent(const std::vector<std::pair<double, double>>& xy);

// report.csv + report.svg + env.txt under out_dir; byte-deterministic
void write_report(const ExperimentReport& report, const std::string& out_dir);

std::string report_csv(const ExperimentReport& report);

}  // namespace otlab
