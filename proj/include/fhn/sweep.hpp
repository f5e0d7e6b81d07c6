#pragma once

#include "fhn/config.hpp"
#include "fhn/melnikov.hpp"

#include <string>
#include <vector>

namespace fhn {

struct SweepRow {
    double eps = 0.0;
    std::string status = "ok";  // or the failure message
    double c = 0.0;
    double z_ae = 0.0;
    int r1_winding = 0;
    double lambda0 = 0.0;
    double lambda1_evans = 0.0;
    double lambda1_pred = 0.0;
    double m_f = 0.0, m_b1 = 0.0, m_b2_full = 0.0, m_b2_leading = 0.0;
    double front_dev = 0.0;
    // Scaling ratios.
    double speed_ratio = 0.0;     // (c - c0)/eps
    double front_ratio = 0.0;     // front_dev/(eps |log eps|)
    double eps_z = 0.0;           // eps z_ae
    double lambda1_over_eps = 0.0;
    double pred_ratio = 0.0;      // |l1_evans - l1_pred|/(eps |log eps|)^2
    double m_b2_ratio = 0.0;      // |full - leading|/(eps^2 |log eps|)
    bool ok() const { return status == "ok"; }
};

/// Full pipeline at one eps: pulse, R1 count, Melnikov report.
SweepRow sweep_row(const RunConfig& cfg, double eps, int jobs);
/// Rows in input order; individual failures are recorded, not thrown.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::vector<double>& eps, int jobs);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// max/min of |x| over the entries; infinity when a sign changes or one is zero.
double variation_factor(const std::vector<double>& xs);

}  // namespace fhn
