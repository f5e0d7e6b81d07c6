#include "fhn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace fhn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const std::string t = trim(v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("bad number for " + key + ": '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("expected integer for " + key + ": '" + v + "'");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("expected boolean for " + key + ": '" + v + "'");
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"a", [](RunConfig& c, auto& k, auto& v) { c.params.a = to_double(k, v); }},
        {"k", [](RunConfig& c, auto& k, auto& v) { c.params.k = to_double(k, v); }},
        {"gamma", [](RunConfig& c, auto& k, auto& v) { c.params.gamma = to_double(k, v); }},
        {"M", [](RunConfig& c, auto& k, auto& v) { c.params.M = to_double(k, v); }},
        {"c1", [](RunConfig& c, auto& k, auto& v) { c.params.c1 = to_double(k, v); }},
        {"eps", [](RunConfig& c, auto& k, auto& v) { c.params.eps = to_double(k, v); }},
        {"sweep", [](RunConfig& c, auto&, auto& v) { c.sweep = parse_list(v); }},
        {"output_dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = trim(v); }},
        {"jobs", [](RunConfig& c, auto& k, auto& v) { c.jobs = to_int(k, v); }},
        {"delta", [](RunConfig& c, auto& k, auto& v) { c.spectral.delta = to_double(k, v); }},
        {"M_tilde", [](RunConfig& c, auto& k, auto& v) { c.spectral.M_tilde = to_double(k, v); }},
        {"nu", [](RunConfig& c, auto& k, auto& v) { c.spectral.nu = to_double(k, v); }},
        {"xi_match", [](RunConfig& c, auto& k, auto& v) { c.spectral.xi_match = to_double(k, v); }},
        {"trace_normalize", [](RunConfig& c, auto& k, auto& v) { c.spectral.trace_normalize = to_bool(k, v); }},
        {"evans_rtol", [](RunConfig& c, auto& k, auto& v) { c.spectral.rtol = to_double(k, v); }},
        {"evans_atol", [](RunConfig& c, auto& k, auto& v) { c.spectral.atol = to_double(k, v); }},
        {"contour_points", [](RunConfig& c, auto& k, auto& v) { c.spectral.contour_points = to_int(k, v); }},
        {"shoot_tol", [](RunConfig& c, auto& k, auto& v) { c.shoot.tol = to_double(k, v); }},
        {"shoot_rtol", [](RunConfig& c, auto& k, auto& v) { c.shoot.rtol = to_double(k, v); }},
        {"shoot_atol", [](RunConfig& c, auto& k, auto& v) { c.shoot.atol = to_double(k, v); }},
        {"segment", [](RunConfig& c, auto& k, auto& v) { c.shoot.segment = to_double(k, v); }},
        {"max_iter", [](RunConfig& c, auto& k, auto& v) { c.shoot.max_iter = to_int(k, v); }},
        {"left_length", [](RunConfig& c, auto& k, auto& v) { c.shoot.left_length = to_double(k, v); }},
        {"right_length", [](RunConfig& c, auto& k, auto& v) { c.shoot.right_length = to_double(k, v); }},
        {"tau", [](RunConfig& c, auto& k, auto& v) { c.shoot.tau = to_double(k, v); }},
        {"direction",
         [](RunConfig& c, auto& k, auto& v) {
             const std::string t = trim(v);
             if (t == "forward") c.shoot.direction = ShootDirection::forward;
             else if (t == "backward") c.shoot.direction = ShootDirection::backward;
             else throw ConfigError("direction must be forward or backward, got '" + t + "' for " + k);
         }},
        {"pde_n", [](RunConfig& c, auto& k, auto& v) { c.pde.n = to_int(k, v); }},
        {"pde_t_end", [](RunConfig& c, auto& k, auto& v) { c.pde.t_end = to_double(k, v); }},
        {"pde_dt", [](RunConfig& c, auto& k, auto& v) { c.pde.dt = to_double(k, v); }},
        {"pde_scheme",
         [](RunConfig& c, auto& k, auto& v) {
             const std::string t = trim(v);
             if (t == "rk4") c.pde.scheme = TimeScheme::rk4;
             else if (t == "imex") c.pde.scheme = TimeScheme::imex;
             else throw ConfigError("pde_scheme must be rk4 or imex, got '" + t + "' for " + k);
         }},
        {"record_every", [](RunConfig& c, auto& k, auto& v) { c.pde.record_every = to_double(k, v); }},
        {"snapshot_every", [](RunConfig& c, auto& k, auto& v) { c.pde.snapshot_every = to_int(k, v); }},
        {"bump_amplitude", [](RunConfig& c, auto& k, auto& v) { c.bump_amplitude = to_double(k, v); }},
        {"bump_width", [](RunConfig& c, auto& k, auto& v) { c.bump_width = to_double(k, v); }},
    };
    return table;
}

}  // namespace

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double("list", item));
    }
    return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, key, value);
    cfg.raw[key] = trim(value);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg, bool need_pulse) {
    try {
        validate(cfg.params, need_pulse);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
    for (double e : cfg.sweep) {
        if (!(e > 0.0) || !(e < 1.0)) throw ConfigError("sweep values must lie in (0, 1)");
    }
    if (cfg.spectral.delta && !(*cfg.spectral.delta > 0.0)) throw ConfigError("delta must be positive");
    if (cfg.spectral.M_tilde && !(*cfg.spectral.M_tilde > 0.0)) throw ConfigError("M_tilde must be positive");
    if (cfg.spectral.contour_points < 8) throw ConfigError("contour_points must be >= 8");
    if (cfg.pde.n < 16) throw ConfigError("pde_n must be >= 16");
    if (!(cfg.pde.t_end > 0.0) || !(cfg.pde.record_every > 0.0)) throw ConfigError("pde times must be positive");
    if (!(cfg.shoot.segment > 0.0)) throw ConfigError("segment must be positive");
}

SpectralConfig resolve_spectral(const RunConfig& cfg, double c) {
    SpectralConfig s = default_spectral_config(cfg.params, c);
    const SpectralOverrides& o = cfg.spectral;
    if (o.delta) s.delta = *o.delta;
    if (o.M_tilde) s.M_tilde = *o.M_tilde;
    if (o.nu) s.nu = *o.nu;
    if (o.xi_match) s.xi_match = *o.xi_match;
    if (o.trace_normalize) s.trace_normalize = *o.trace_normalize;
    s.rtol = o.rtol;
    s.atol = o.atol;
    s.jobs = cfg.jobs;
    return s;
}

std::map<std::string, std::string> config_entries(const RunConfig& cfg) {
    std::map<std::string, std::string> m;
    const ModelParams& p = cfg.params;
    m["a"] = fmt(p.a);
    m["k"] = fmt(p.k);
    m["gamma"] = fmt(p.gamma);
    m["M"] = fmt(p.M);
    m["c1"] = fmt(p.c1);
    m["eps"] = fmt(p.eps);
    std::string sw;
    for (double e : cfg.sweep) sw += (sw.empty() ? "" : ",") + fmt(e);
    m["sweep"] = sw;
    m["output_dir"] = cfg.output_dir;
    m["jobs"] = std::to_string(cfg.jobs);
    if (cfg.spectral.delta) m["delta"] = fmt(*cfg.spectral.delta);
    if (cfg.spectral.M_tilde) m["M_tilde"] = fmt(*cfg.spectral.M_tilde);
    if (cfg.spectral.nu) m["nu"] = fmt(*cfg.spectral.nu);
    if (cfg.spectral.xi_match) m["xi_match"] = fmt(*cfg.spectral.xi_match);
    if (cfg.spectral.trace_normalize) m["trace_normalize"] = *cfg.spectral.trace_normalize ? "true" : "false";
    m["evans_rtol"] = fmt(cfg.spectral.rtol);
    m["evans_atol"] = fmt(cfg.spectral.atol);
    m["contour_points"] = std::to_string(cfg.spectral.contour_points);
    m["shoot_tol"] = fmt(cfg.shoot.tol);
    m["shoot_rtol"] = fmt(cfg.shoot.rtol);
    m["shoot_atol"] = fmt(cfg.shoot.atol);
    m["segment"] = fmt(cfg.shoot.segment);
    m["max_iter"] = std::to_string(cfg.shoot.max_iter);
    m["left_length"] = fmt(cfg.shoot.left_length);
    m["right_length"] = fmt(cfg.shoot.right_length);
    m["tau"] = fmt(cfg.shoot.tau);
    m["direction"] = cfg.shoot.direction == ShootDirection::forward ? "forward" : "backward";
    m["pde_n"] = std::to_string(cfg.pde.n);
    m["pde_t_end"] = fmt(cfg.pde.t_end);
    m["pde_dt"] = fmt(cfg.pde.dt);
    m["pde_scheme"] = cfg.pde.scheme == TimeScheme::rk4 ? "rk4" : "imex";
    m["record_every"] = fmt(cfg.pde.record_every);
    m["snapshot_every"] = std::to_string(cfg.pde.snapshot_every);
    m["bump_amplitude"] = fmt(cfg.bump_amplitude);
    m["bump_width"] = fmt(cfg.bump_width);
    return m;
}

}  // namespace fhn
