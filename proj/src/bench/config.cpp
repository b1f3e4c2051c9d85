#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "podfem/bench.hpp"
#include "podfem/error.hpp"

namespace podfem::bench {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    return out;
}

}  // namespace

RunConfig default_config(Example ex) {
    RunConfig cfg;
    cfg.example = ex;
    if (ex == Example::two) cfg.L = 34;
    return cfg;
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError("config key '" + key + "' has no value");

        if (key == "alpha") cfg.alpha = to_real(key, value);
        else if (key == "beta") cfg.beta = to_real(key, value);
        else if (key == "T") cfg.T = to_real(key, value);
        else if (key == "n_cells_x") cfg.n_cells_x = to_count(key, value);
        else if (key == "n_cells_y") cfg.n_cells_y = to_count(key, value);
        else if (key == "n_steps") cfg.n_steps = to_count(key, value);
        else if (key == "L") cfg.L = to_count(key, value);
        else if (key == "d") cfg.d = value == "auto" ? std::nullopt : std::optional<std::size_t>(to_count(key, value));
        else if (key == "example") cfg.example = parse_example(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "seed") cfg.seed = to_count(key, value);
        else if (key == "refinement") cfg.refinement = to_count(key, value);
        else throw ConfigError("unknown config key '" + key + "' on line " + std::to_string(lineno));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, std::move(base));
}

void validate(const RunConfig& cfg) {
    if (!(cfg.alpha > 1.0 && cfg.alpha < 2.0)) throw ConfigError("alpha must lie in (1,2)");
    if (!(cfg.beta > 1.0 && cfg.beta < 2.0)) throw ConfigError("beta must lie in (1,2)");
    if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
    if (cfg.n_cells_x < 2 || cfg.n_cells_y < 2) throw ConfigError("need at least 2 cells per direction");
    if (cfg.n_steps < 1) throw ConfigError("n_steps must be at least 1");
    if (cfg.L < 1 || cfg.L > cfg.n_steps) throw ConfigError("L must lie in [1, n_steps]");
    if (cfg.d && *cfg.d < 1) throw ConfigError("d must be at least 1 (or auto)");
    if (cfg.refinement < kMinRefinement) throw ConfigError("refinement must be at least 8");
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "alpha = " << cfg.alpha << "\n"
        << "beta = " << cfg.beta << "\n"
        << "T = " << cfg.T << "\n"
        << "n_cells_x = " << cfg.n_cells_x << "\n"
        << "n_cells_y = " << cfg.n_cells_y << "\n"
        << "n_steps = " << cfg.n_steps << "\n"
        << "L = " << cfg.L << "\n"
        << "d = " << (cfg.d ? std::to_string(*cfg.d) : std::string("auto")) << "\n"
        << "example = " << (cfg.example == Example::zero ? std::string("custom") : std::to_string(static_cast<int>(cfg.example)))
        << "\n"
        << "output_dir = " << cfg.output_dir.string() << "\n"
        << "seed = " << cfg.seed << "\n"
        << "refinement = " << cfg.refinement << "\n";
    return out.str();
}

}  // namespace podfem::bench
