#include "cvembem/harness/harness.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace cvembem::harness {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream in(value);
    T out{};
    in >> out;
    if (!in || !(in >> std::ws).eof()) throw Error("config: bad value '" + value + "' for " + key);
    return out;
}

// "0-3", "0,1,2" or "" (empty list)
std::vector<int> parse_int_list(const std::string& key, const std::string& value)
{
    std::vector<int> out;
    const auto dash = value.find('-');
    if (dash != std::string::npos && dash > 0) {
        const int a = parse_number<int>(key, trim(value.substr(0, dash)));
        const int b = parse_number<int>(key, trim(value.substr(dash + 1)));
        for (int i = a; i <= b; ++i) out.push_back(i);
        return out;
    }
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number<int>(key, item));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw Error("config: bad boolean '" + value + "' for " + key);
}

} // namespace

void RunConfig::validate() const
{
    if (problem != "example1" && problem != "example2") throw Error("config: unknown problem '" + problem + "'");
    if (k_d != 2 && k_d != 3) throw Error("config: k_d must be 2 or 3");
    for (int k : k_o)
        if (k < 1 || k > cvem::max_order) throw Error("config: k_o values must be in [1, 5]");
    for (int l : levels)
        if (l < 0) throw Error("config: levels must be >= 0");
    if (n_r < 1 || n_theta < 3) throw Error("config: need n_r >= 1 and n_theta >= 3");
    if (!(radial_grading > 0.0)) throw Error("config: radial_grading must be positive");
    if (!(inner_radius > 0.0)) throw Error("config: inner_radius must be positive");
    if (problem == "example1" && !(outer_radius > inner_radius)) throw Error("config: outer_radius must exceed inner_radius");
    if (problem == "example2" && !(std::min(ellipse_a, ellipse_b) > inner_radius))
        throw Error("config: the ellipse must enclose the inner circle");
    if (error_quadrature < 1 || profile_points < 2) throw Error("config: bad quadrature or profile size");
    if (series_terms < 1 || series_terms % 2 == 0) throw Error("config: series_terms must be odd");
}

RunConfig parse_config(std::istream& in)
{
    RunConfig c;
    const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
        {"problem", [&](auto&, auto& v) { c.problem = v; }},
        {"inner_radius", [&](auto& k, auto& v) { c.inner_radius = parse_number<double>(k, v); }},
        {"outer_radius", [&](auto& k, auto& v) { c.outer_radius = parse_number<double>(k, v); }},
        {"ellipse_a", [&](auto& k, auto& v) { c.ellipse_a = parse_number<double>(k, v); }},
        {"ellipse_b", [&](auto& k, auto& v) { c.ellipse_b = parse_number<double>(k, v); }},
        {"n_r", [&](auto& k, auto& v) { c.n_r = parse_number<int>(k, v); }},
        {"n_theta", [&](auto& k, auto& v) { c.n_theta = parse_number<int>(k, v); }},
        {"radial_grading", [&](auto& k, auto& v) { c.radial_grading = parse_number<double>(k, v); }},
        {"levels", [&](auto& k, auto& v) { c.levels = parse_int_list(k, v); }},
        {"k_o", [&](auto& k, auto& v) { c.k_o = parse_int_list(k, v); }},
        {"k_d", [&](auto& k, auto& v) { c.k_d = parse_number<int>(k, v); }},
        {"error_quadrature", [&](auto& k, auto& v) { c.error_quadrature = parse_number<int>(k, v); }},
        {"series_terms", [&](auto& k, auto& v) { c.series_terms = parse_number<int>(k, v); }},
        {"profile_points", [&](auto& k, auto& v) { c.profile_points = parse_number<int>(k, v); }},
        {"dump_matrices", [&](auto& k, auto& v) { c.dump_matrices = parse_bool(k, v); }},
        {"output", [&](auto&, auto& v) { c.output = v; }},
        {"q", [&](auto& k, auto& v) { c.singular.q = parse_number<int>(k, v); }},
        {"far_outer", [&](auto& k, auto& v) { c.singular.far_outer = parse_number<int>(k, v); }},
        {"far_inner", [&](auto& k, auto& v) { c.singular.far_inner = parse_number<int>(k, v); }},
        {"adjacent_radial", [&](auto& k, auto& v) { c.singular.adjacent_radial = parse_number<int>(k, v); }},
        {"adjacent_angular", [&](auto& k, auto& v) { c.singular.adjacent_angular = parse_number<int>(k, v); }},
        {"coincident_radial", [&](auto& k, auto& v) { c.singular.coincident_radial = parse_number<int>(k, v); }},
        {"coincident_tangential",
         [&](auto& k, auto& v) { c.singular.coincident_tangential = parse_number<int>(k, v); }},
        {"execution",
         [&](auto& k, auto& v) {
             if (v == "serial") c.exec = Execution::Serial;
             else if (v == "parallel") c.exec = Execution::Parallel;
             else throw Error("config: bad value '" + v + "' for " + k);
         }},
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(key, value);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    return parse_config(in);
}

ExactSolution exact_for(const RunConfig& config)
{
    return config.problem == "example1" ? exact_example1() : exact_example2(config.series_terms);
}

geometry::CurvedMesh build_mesh(const RunConfig& config, int level)
{
    const auto inner = geometry::make_circle(config.inner_radius);
    const auto outer = config.problem == "example1" ? geometry::make_circle(config.outer_radius)
                                                    : geometry::make_ellipse(config.ellipse_a, config.ellipse_b);
    return geometry::build_ring_mesh(inner, outer, config.n_r, config.n_theta, level, config.radial_grading);
}

} // namespace cvembem::harness
