#pragma once

#include <map>
#include <string>
#include <vector>

#include "otlab/space.hpp"

namespace otlab {

// Line-oriented space specification:
//   n <count>
//   edge <i> <j> <length>
//   mass <i> <value>
//   meta <K> <N>
Space parse_space_spec(const std::string& text);
std::string format_space_spec(const Space& space);

// versioned binary cache, re-derivable from the spec
void write_space_cache(const Space& space, const std::string& path);
Space read_space_cache(const std::string& path);

// measure CSV: header "index,weight"
ProbMeasure read_measure_csv(const std::string& path);
void write_measure_csv(const ProbMeasure& m, const std::string& path);

// potential CSV: header "index,phi"
void write_potential_csv(const std::vector<int>& idx, const std::vector<double>& phi,
                         const std::string& path);

// key=value with [section] headers
using ConfigMap = std::map<std::string, std::string>;  // keys "section.key"
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::string& path);

std::string format_double(double v);  // fixed %.12g formatting for deterministic CSV

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace otlab
