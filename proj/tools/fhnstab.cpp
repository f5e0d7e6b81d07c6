// Batch front end: pulse, spectrum, melnikov, simulate, sweep.

#include "fhn/config.hpp"
#include "fhn/essential.hpp"
#include "fhn/evans.hpp"
#include "fhn/melnikov.hpp"
#include "fhn/pdesim.hpp"
#include "fhn/sweep.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fhn;

namespace {

constexpr const char* kVersion = "0.3.1";

enum Exit { ok = 0, numerical = 2, rejected = 3 };

struct Context {
    RunConfig cfg;
    fs::path out;
    std::vector<std::string> artifacts;
    json extra = json::object();

    std::string file(const std::string& name) {
        artifacts.push_back(name);
        return (out / name).string();
    }
};

class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, json diag) : std::runtime_error(what), diagnostics(std::move(diag)) {}
    json diagnostics;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

void write_text(Context& ctx, const std::string& name, const std::string& body) {
    std::ofstream f(ctx.file(name));
    f << body;
}

PulseSolution build_pulse(Context& ctx) {
    const ModelParams& p = ctx.cfg.params;
    try {
        return shoot_pulse(p, wave_speed_c0(p), ctx.cfg.shoot);
    } catch (const std::exception& e) {
        throw NumericalFailure(std::string("shooting failed: ") + e.what(),
                               {{"stage", "pulse"}, {"c_guess", wave_speed_c0(p)}, {"message", e.what()}});
    }
}

void cmd_pulse(Context& ctx) {
    const PulseSolution s = build_pulse(ctx);
    write_pulse_csv(s, ctx.file("pulse.csv"));
    write_pulse_json(s, ctx.file("pulse.json"));
    write_text(ctx, "pulse.plt",
               "set datafile separator ','\n"
               "set key autotitle columnhead\n"
               "set xlabel 'xi'\n"
               "plot 'pulse.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
    ctx.extra = {{"speed", s.speed}, {"z_ae", s.z_ae}, {"iterations", s.iterations},
                 {"final_residual", s.final_residual}};
    std::cout << std::setprecision(10) << "c = " << s.speed << "  z_ae = " << s.z_ae << "  Newton iterations "
              << s.iterations << '\n';
}

ContourReport counted(const PulseSolution& s, const SpectralConfig& sc, const Contour& c, int n,
                      const std::string& region, bool refine) {
    try {
        return count_zeros(s, sc, c, n, region, refine);
    } catch (const ContourError& e) {
        throw NumericalFailure(e.what(), {{"stage", "contour"},
                                          {"region", region},
                                          {"delta", sc.delta},
                                          {"suggested_delta", {0.8 * sc.delta, 1.25 * sc.delta}},
                                          {"message", e.what()}});
    }
}

void cmd_spectrum(Context& ctx) {
    const ModelParams& p = ctx.cfg.params;
    const PulseSolution s = build_pulse(ctx);
    const SpectralConfig sc = resolve_spectral(ctx.cfg, s.speed);
    std::vector<double> ls;
    for (int i = -400; i <= 400; ++i) ls.push_back(10.0 * i / 400.0);
    write_essential_csv(essential_curves(p, s.speed, ls), ctx.file("essential.csv"));

    const int n = ctx.cfg.spectral.contour_points;
    std::vector<ContourReport> reps;
    reps.push_back(counted(s, sc, region_R1(sc), n, "R1", true));
    reps.push_back(counted(s, sc, region_R2(sc), n, "R2", false));
    reps.push_back(counted(s, sc, region_R3(p, s.speed, sc), n, "R3", false));
    if (p.a == 0.0) reps.push_back(counted(s, sc, region_omega_plus(p, s.speed, sc), 2 * n, "Omega+", false));
    write_contour_json(reps, ctx.file("contours.json"));
    for (const auto& r : reps) write_scan_csv(r, ctx.file("scan_" + r.region + ".csv"));
    write_text(ctx, "spectrum.plt",
               "set datafile separator ','\n"
               "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n"
               "plot 'essential.csv' using 2:3 with points pt 7 ps 0.3 title 'essential', "
               "'scan_R1.csv' using 1:2 with lines title 'R1', "
               "'scan_R2.csv' using 1:2 with lines title 'R2', "
               "'scan_R3.csv' using 1:2 with lines title 'R3'\n");
    json w = json::object();
    for (const auto& r : reps) {
        w[r.region] = r.winding;
        std::cout << r.region << ": winding " << r.winding << '\n';
        for (const auto& z : r.zeros)
            std::cout << std::setprecision(12) << "   zero " << z.lambda.real() << " " << std::showpos
                      << z.lambda.imag() << "i" << std::noshowpos << "  order " << z.order << '\n';
    }
    ctx.extra = {{"speed", s.speed}, {"windings", w}, {"delta", sc.delta}, {"M_tilde", sc.M_tilde}};
}

void cmd_melnikov(Context& ctx) {
    const ModelParams& p = ctx.cfg.params;
    const PulseSolution s = build_pulse(ctx);
    const SpectralConfig sc = resolve_spectral(ctx.cfg, s.speed);
    MelnikovReport r;
    try {
        r = melnikov_report(p, &s, &sc);
    } catch (const ValidityError& e) {
        throw NumericalFailure(e.what(), {{"stage", "melnikov"}, {"message", e.what()}});
    }
    write_melnikov_json(r, p, ctx.file("melnikov.json"));
    // Integrands along the layers.
    const auto orbits = front_back_profiles(p);
    const double c0 = wave_speed_c0(p);
    std::ofstream f(ctx.file("integrands.csv"));
    f << std::setprecision(17) << "z,front,back\n";
    for (int i = -400; i <= 400; ++i) {
        const double z = 20.0 * i / 400.0;
        const double df = orbits.first.du(z), db = orbits.second.du(z);
        const double Ff = orbits.first.F, Fb = orbits.second.F;
        f << z << ',' << Ff * std::exp(-c0 * Ff * Ff * z) * df * df << ','
          << Fb * std::exp(-c0 * Fb * Fb * z) * db * db << '\n';
    }
    write_text(ctx, "melnikov.plt",
               "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'z'\n"
               "plot 'integrands.csv' using 1:2 with lines, '' using 1:3 with lines\n");
    ctx.extra = {{"lambda1_pred", r.lambda1_pred}, {"m_b1", r.m_b1}, {"m_b2_full", r.m_b2_full}};
    std::cout << std::setprecision(12) << "M_f = " << r.m_f << "\nM_b1 = " << r.m_b1 << "\nM_b2 = " << r.m_b2_full
              << " (leading " << r.m_b2_leading << ")\nlambda1 ~ " << r.lambda1_pred << '\n';
}

void cmd_simulate(Context& ctx) {
    const ModelParams& p = ctx.cfg.params;
    const PulseSolution s = build_pulse(ctx);
    const PulseProfile prof(s);
    double off = 0.0;
    PdeState st = pulse_initial_state(prof, ctx.cfg.pde, &off);
    if (ctx.cfg.bump_amplitude != 0.0) add_bump(st, 0.5 * s.z_ae - off, ctx.cfg.bump_amplitude, ctx.cfg.bump_width);
    PdeRun run;
    try {
        run = evolve(p, st, prof, off, ctx.cfg.pde);
    } catch (const std::exception& e) {
        throw NumericalFailure(e.what(), {{"stage", "simulate"}, {"message", e.what()}});
    }
    write_distance_csv(run, ctx.file("distance.csv"));
    if (!run.snapshots.empty()) write_snapshots_csv(run.snapshots, ctx.file("snapshots.csv"));
    write_text(ctx, "simulate.plt",
               "set datafile separator ','\nset logscale y\nset xlabel 't'\nset ylabel 'orbital distance'\n"
               "plot 'distance.csv' using 1:2 with lines notitle\n");
    const double d0 = run.distances.front(), d1 = run.distances.back();
    ctx.extra = {{"d0", d0}, {"d_end", d1}, {"dt", run.dt}, {"steps", run.steps},
                 {"measured_speed", run.measured_speed()}, {"pulse_speed", s.speed}};
    std::cout << std::setprecision(6) << "orbital distance " << d0 << " -> " << d1 << " (factor " << d0 / d1
              << ")\nspeed " << run.measured_speed() << " vs " << s.speed << '\n';
}

void cmd_sweep(Context& ctx) {
    const std::vector<double>& eps = ctx.cfg.sweep;
    if (eps.size() < 3) throw ConfigError("sweep needs at least 3 eps values");
    const auto rows = run_sweep(ctx.cfg, eps, ctx.cfg.jobs);
    write_sweep_csv(rows, ctx.file("sweep.csv"));
    write_text(ctx, "sweep.plt",
               "set datafile separator ','\nset key autotitle columnhead\nset logscale x\nset xlabel 'eps'\n"
               "plot 'sweep.csv' using 1:17 with linespoints, '' using 1:18 with linespoints\n");
    int failed = 0;
    json st = json::array();
    for (const auto& r : rows) {
        std::cout << std::setprecision(6) << "eps " << r.eps << ": " << r.status;
        if (r.ok()) std::cout << "  lambda1 " << r.lambda1_evans << "  pred " << r.lambda1_pred;
        std::cout << '\n';
        st.push_back(r.status);
        failed += !r.ok();
    }
    ctx.extra = {{"row_status", st}};
    if (failed) throw NumericalFailure(std::to_string(failed) + " sweep rows failed", {{"row_status", st}});
}

json manifest(const Context& ctx, const std::string& cmd, double wall, int code) {
    json cfg = json::object();
    for (const auto& [k, v] : config_entries(ctx.cfg)) cfg[k] = v;
    return {{"command", cmd},
            {"exit_code", code},
            {"config", cfg},
            {"versions",
             {{"fhnstab", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", BOOST_LIB_VERSION}}},
            {"wall_time_s", wall},
            {"artifacts", ctx.artifacts},
            {"summary", ctx.extra}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evans-function and simulation toolkit for deformed FitzHugh-Nagumo pulses"};
    app.require_subcommand(1);
    std::string config_path, out_dir, eps_list;
    int jobs = 0;
    double a_val = std::nan("");
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads");
    app.add_option("--eps", eps_list, "eps value, or comma-separated list for sweep");
    app.add_option("--a", a_val, "threshold parameter a");
    struct Cmd {
        const char* name;
        const char* help;
        void (*run)(Context&);
    };
    const Cmd cmds[] = {{"pulse", "compute the travelling pulse", cmd_pulse},
                        {"spectrum", "essential spectrum and Evans contour counts", cmd_spectrum},
                        {"melnikov", "Melnikov integrals and lambda1 prediction", cmd_melnikov},
                        {"simulate", "PDE run from a perturbed pulse", cmd_simulate},
                        {"sweep", "eps sweep of the full pipeline", cmd_sweep}};
    for (const auto& c : cmds) app.add_subcommand(c.name, c.help)->fallthrough();
    CLI11_PARSE(app, argc, argv);
    const Cmd* chosen = nullptr;
    for (const auto& c : cmds)
        if (app.got_subcommand(c.name)) chosen = &c;

    Context ctx;
    const auto t0 = std::chrono::steady_clock::now();
    int code = Exit::ok;
    json err;
    try {
        ctx.cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!eps_list.empty()) {
            const auto v = parse_list(eps_list);
            if (v.empty()) throw ConfigError("empty --eps list");
            ctx.cfg.params.eps = v.front();
            ctx.cfg.raw["eps"] = eps_list;
            if (v.size() > 1 || std::string(chosen->name) == "sweep") ctx.cfg.sweep = v;
        }
        if (!std::isnan(a_val)) ctx.cfg.params.a = a_val;
        if (jobs > 0) ctx.cfg.jobs = jobs;
        if (!out_dir.empty()) ctx.cfg.output_dir = out_dir;
        validate_config(ctx.cfg, true);
    } catch (const ConfigError& e) {
        code = Exit::rejected;
        err = {{"error", "config rejected"}, {"message", e.what()}};
    }
    ctx.out = ctx.cfg.output_dir;
    fs::create_directories(ctx.out);
    if (code == Exit::ok) {
        try {
            chosen->run(ctx);
        } catch (const ConfigError& e) {
            code = Exit::rejected;
            err = {{"error", "config rejected"}, {"message", e.what()}};
        } catch (const NumericalFailure& e) {
            code = Exit::numerical;
            err = e.diagnostics;
            err["error"] = "numerical failure";
            err["message"] = e.what();
        } catch (const std::exception& e) {
            code = Exit::numerical;
            err = {{"error", "numerical failure"}, {"message", e.what()}};
        }
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (code != Exit::ok) {
        write_json(ctx.out / (code == Exit::rejected ? "error.json" : "diagnostics.json"), err);
        std::cerr << err["error"].get<std::string>() << ": " << err["message"].get<std::string>() << '\n';
    }
    write_json(ctx.out / "manifest.json", manifest(ctx, chosen->name, wall, code));
    return code;
}
