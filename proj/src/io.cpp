#include "otlab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otlab {

namespace {

constexpr std::uint32_t kCacheMagic = 0x4f54'5350;  // "OTSP"
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("space cache: truncated file");
    return v;
}

}  // namespace

Space parse_space_spec(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int n = -1;
    std::vector<Edge> edges;
    std::vector<double> mass;
    CurvatureMeta meta;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "n") {
            ls >> n;
            mass.assign(n, 1.0);
        } else if (tok == "edge") {
            Edge e;
            ls >> e.u >> e.v >> e.length;
            edges.push_back(e);
        } else if (tok == "mass") {
            int i;
            double v;
            ls >> i >> v;
            if (n < 0 || i < 0 || i >= n) throw std::invalid_argument("space spec: mass before n or out of range");
            mass[i] = v;
        } else if (tok == "meta") {
            ls >> meta.K >> meta.N;
        } else {
            throw std::invalid_argument("space spec: unknown directive '" + tok + "'");
        }
    }
    if (n <= 0) throw std::invalid_argument("space spec: missing point count");
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) m[i] = mass[i];
    return build_space(edges, m, meta);
}

std::string format_space_spec(const Space& space) {
    // %.17g so the spec text reproduces the space bit-exactly
    auto exact = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "n " << space.n << "\n";
    for (const Edge& e : space.edges)
        os << "edge " << e.u << " " << e.v << " " << exact(e.length) << "\n";
    for (int i = 0; i < space.n; ++i) os << "mass " << i << " " << exact(space.m[i]) << "\n";
    os << "meta " << exact(space.curvature.K) << " " << exact(space.curvature.N) << "\n";
    return os.str();
}

void write_space_cache(const Space& space, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open cache for writing: " + path);
    put(os, kCacheMagic);
    put(os, kCacheVersion);
    put(os, static_cast<std::uint32_t>(space.n));
    for (int i = 0; i < space.n; ++i) put(os, space.m[i]);
    put(os, static_cast<std::uint32_t>(space.edges.size()));
    for (const Edge& e : space.edges) {
        put(os, static_cast<std::uint32_t>(e.u));
        put(os, static_cast<std::uint32_t>(e.v));
        put(os, e.length);
    }
    put(os, space.curvature.K);
    put(os, space.curvature.N);
}

Space read_space_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open cache: " + path);
    if (get<std::uint32_t>(is) != kCacheMagic) throw std::runtime_error("space cache: bad magic");
    if (get<std::uint32_t>(is) != kCacheVersion)
        throw std::runtime_error("space cache: unsupported version");
    const auto n = get<std::uint32_t>(is);
    Eigen::VectorXd m(n);
    for (std::uint32_t i = 0; i < n; ++i) m[i] = get<double>(is);
    const auto ec = get<std::uint32_t>(is);
    std::vector<Edge> edges(ec);
    for (auto& e : edges) {
        e.u = static_cast<int>(get<std::uint32_t>(is));
        e.v = static_cast<int>(get<std::uint32_t>(is));
        e.length = get<double>(is);
    }
    CurvatureMeta meta;
    meta.K = get<double>(is);
    meta.N = get<double>(is);
    return build_space(edges, m, meta);
}

ProbMeasure read_measure_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open measure csv: " + path);
    std::string line;
    std::getline(is, line);  // header
    ProbMeasure pm;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("measure csv: bad row '" + line + "'");
        pm.support.push_back(std::stoi(line.substr(0, comma)));
        pm.weights.push_back(std::stod(line.substr(comma + 1)));
    }
    return pm;
}

void write_measure_csv(const ProbMeasure& m, const std::string& path) {
    std::ostringstream os;
    os << "index,weight\n";
    for (std::size_t k = 0; k < m.support.size(); ++k)
        os << m.support[k] << "," << format_double(m.weights[k]) << "\n";
    write_text_file(path, os.str());
}

void write_potential_csv(const std::vector<int>& idx, const std::vector<double>& phi,
                         const std::string& path) {
    std::ostringstream os;
    os << "index,phi\n";
    for (std::size_t k = 0; k < idx.size(); ++k)
        os << idx[k] << "," << format_double(phi[k]) << "\n";
    write_text_file(path, os.str());
}

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap cfg;
    std::istringstream is(text);
    std::string line, section;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        cfg[(section.empty() ? key : section + "." + key)] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ConfigMap read_config_file(const std::string& path) { return parse_config_text(read_text_file(path)); }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace otlab
