#include "fhn/sweep.hpp"

#include "fhn/parallel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace fhn {

SweepRow sweep_row(const RunConfig& cfg, double eps, int jobs) {
    SweepRow r;
    r.eps = eps;
    try {
        ModelParams p = cfg.params;
        p.eps = eps;
        const PulseSolution pulse = shoot_pulse(p, wave_speed_c0(p), cfg.shoot);
        RunConfig local = cfg;
        local.params = p;
        local.jobs = jobs;
        const SpectralConfig sc = resolve_spectral(local, pulse.speed);
        const ContourReport rep = count_zeros(pulse, sc, region_R1(sc), cfg.spectral.contour_points, "R1");
        r.c = pulse.speed;
        r.z_ae = pulse.z_ae;
        r.r1_winding = rep.winding;
        if (rep.zeros.size() >= 2) {
            r.lambda0 = rep.zeros[0].lambda.real();
            r.lambda1_evans = rep.zeros[1].lambda.real();
        } else {
            r.status = "R1 count " + std::to_string(rep.winding) + ", expected 2";
        }
        const MelnikovReport m = melnikov_report(p, &pulse, &sc);
        r.m_f = m.m_f;
        r.m_b1 = m.m_b1;
        r.m_b2_full = m.m_b2_full;
        r.m_b2_leading = m.m_b2_leading;
        r.lambda1_pred = m.lambda1_pred;
        r.front_dev = front_deviation(pulse);
        const double L = std::abs(std::log(eps));
        r.speed_ratio = (r.c - wave_speed_c0(p)) / eps;
        r.front_ratio = r.front_dev / (eps * L);
        r.eps_z = eps * r.z_ae;
        r.lambda1_over_eps = r.lambda1_evans / eps;
        r.pred_ratio = std::abs(r.lambda1_evans - r.lambda1_pred) / std::pow(eps * L, 2);
        r.m_b2_ratio = std::abs(r.m_b2_full - r.m_b2_leading) / (eps * eps * L);
    } catch (const std::exception& e) {
        r.status = e.what();
    }
    return r;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::vector<double>& eps, int jobs) {
    std::vector<SweepRow> rows(eps.size());
    // Rows in parallel, each row serial.
    parallel_for(jobs, eps.size(), [&](std::size_t i) { rows[i] = sweep_row(cfg, eps[i], 1); });
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    f << "eps,status,c,z_ae,r1_winding,lambda0,lambda1_evans,lambda1_pred,m_f,m_b1,m_b2_full,m_b2_leading,"
         "front_dev,speed_ratio,front_ratio,eps_z,lambda1_over_eps,pred_ratio,m_b2_ratio\n";
    for (const auto& r : rows) {
        std::string st = r.status;
        for (char& ch : st)
            if (ch == ',' || ch == '\n') ch = ';';
        f << r.eps << ',' << st << ',' << r.c << ',' << r.z_ae << ',' << r.r1_winding << ',' << r.lambda0 << ','
          << r.lambda1_evans << ',' << r.lambda1_pred << ',' << r.m_f << ',' << r.m_b1 << ',' << r.m_b2_full << ','
          << r.m_b2_leading << ',' << r.front_dev << ',' << r.speed_ratio << ',' << r.front_ratio << ','
          << r.eps_z << ',' << r.lambda1_over_eps << ',' << r.pred_ratio << ',' << r.m_b2_ratio << '\n';
    }
}

double variation_factor(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    const bool pos = xs.front() > 0;
    for (double x : xs) {
        if (x == 0.0 || !std::isfinite(x) || (x > 0) != pos) return std::numeric_limits<double>::infinity();
        lo = std::min(lo, std::abs(x));
        hi = std::max(hi, std::abs(x));
    }
    return hi / lo;
}

}  // namespace fhn
