#include "nlkg/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nlkg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string cell;
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

const std::vector<std::string>& all_experiments() {
    static const std::vector<std::string> names = {
        "spectrum",     "conservation", "mobile-metric",    "lipschitz",
        "graph",        "contraction",  "dichotomy",        "unstable-decay",
        "restriction",  "energy-expansion", "lorentz"};
    return names;
}

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    double grid_L = cfg.grid.L;
    int grid_N = cfg.grid.N;
    std::vector<double> powers{3.0}, lambdas{1.0};
    for (const auto& [key, value] : kv) {
        if (key == "grid.L") grid_L = to_double(key, value);
        else if (key == "grid.N") grid_N = static_cast<int>(to_double(key, value));
        else if (key == "nonlinearity.p") {
            powers.clear();
            for (const auto& c : split(value, ',')) powers.push_back(to_double(key, c));
        } else if (key == "nonlinearity.lambda") {
            lambdas.clear();
            for (const auto& c : split(value, ',')) lambdas.push_back(to_double(key, c));
        } else if (key == "flow.delta") cfg.flow.delta = to_double(key, value);
        else if (key == "flow.ell") cfg.flow.ell = to_double(key, value);
        else if (key == "flow.dt") cfg.flow.dt = to_double(key, value);
        else if (key == "flow.method") cfg.flow.method = static_cast<int>(to_double(key, value));
        else if (key == "flow.C0") cfg.flow.C0 = to_double(key, value);
        else if (key == "flow.C1") cfg.flow.C1 = to_double(key, value);
        else if (key == "flow.C2") cfg.flow.C2 = to_double(key, value);
        else if (key == "mobile.C2") cfg.mobile.C2 = to_double(key, value);
        else if (key == "mobile.scan_width") cfg.mobile.scan_width = to_double(key, value);
        else if (key == "mobile.scan_step") cfg.mobile.scan_step = to_double(key, value);
        else if (key == "mobile.refine_tol") cfg.mobile.refine_tol = to_double(key, value);
        else if (key == "frame.kappa_ratio") cfg.frame.kappa_ratio = to_double(key, value);
        else if (key == "experiments.seed") cfg.seed = static_cast<std::uint64_t>(to_double(key, value));
        else if (key == "experiments.run") {
            cfg.experiments.clear();
            for (const auto& name : split(value, ',')) {
                if (name.empty()) continue;
                if (std::find(all_experiments().begin(), all_experiments().end(), name) ==
                    all_experiments().end())
                    throw ConfigError("config: unknown experiment '" + name + "'");
                cfg.experiments.push_back(name);
            }
        } else if (key == "experiments.eta") {
            cfg.eta_ladder.clear();
            for (const auto& c : split(value, ',')) cfg.eta_ladder.push_back(to_double(key, c));
        } else if (key == "output.dir") cfg.out_dir = value;
        else throw ConfigError("config: unknown key '" + key + "'");
    }

    cfg.grid = Grid(grid_L, grid_N);
    if (powers.size() != lambdas.size())
        throw ConfigError("config: nonlinearity.p and nonlinearity.lambda length mismatch");
    cfg.nonlin = Nonlinearity{};
    for (std::size_t i = 0; i < powers.size(); ++i) cfg.nonlin.add_term(powers[i], lambdas[i]);
    cfg.mobile.delta = cfg.flow.delta;
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string Config::canonical() const {
    std::map<std::string, std::string> kv;
    kv["grid.L"] = fmt(grid.L);
    kv["grid.N"] = std::to_string(grid.N);
    std::string ps, ls;
    for (std::size_t i = 0; i < nonlin.terms.size(); ++i) {
        if (i) {
            ps += ",";
            ls += ",";
        }
        ps += fmt(nonlin.terms[i].p);
        ls += fmt(nonlin.terms[i].lambda);
    }
    kv["nonlinearity.p"] = ps;
    kv["nonlinearity.lambda"] = ls;
    kv["flow.delta"] = fmt(flow.delta);
    kv["flow.ell"] = fmt(flow.ell);
    kv["flow.dt"] = fmt(flow.dt);
    kv["flow.method"] = std::to_string(flow.method);
    kv["flow.C0"] = fmt(flow.C0);
    kv["flow.C1"] = fmt(flow.C1);
    kv["flow.C2"] = fmt(flow.C2);
    kv["mobile.C2"] = fmt(mobile.C2);
    kv["mobile.scan_width"] = fmt(mobile.scan_width);
    kv["mobile.scan_step"] = fmt(mobile.scan_step);
    kv["mobile.refine_tol"] = fmt(mobile.refine_tol);
    kv["frame.kappa_ratio"] = fmt(frame.kappa_ratio);
    kv["experiments.seed"] = std::to_string(seed);
    std::string names;
    for (std::size_t i = 0; i < experiments.size(); ++i) names += (i ? "," : "") + experiments[i];
    kv["experiments.run"] = names;
    std::string etas;
    for (std::size_t i = 0; i < eta_ladder.size(); ++i) etas += (i ? "," : "") + fmt(eta_ladder[i]);
    kv["experiments.eta"] = etas;
    kv["output.dir"] = out_dir;
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Config::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

}  // namespace nlkg
