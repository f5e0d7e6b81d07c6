#pragma once

#include "fhn/evans.hpp"
#include "fhn/pulse.hpp"

#include <functional>
#include <string>

namespace fhn {

/// Result of an integral over the real line with exponential tails.
struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;        // Gauss-Kronrod estimate on the finite window
    double tail_bound = 0.0;   // analytic bound on both discarded tails
    double xi_T = 0.0;         // window half-length
    double doubled = 0.0;      // same integral with the higher-order rule
    int panels = 0;
};

/// Integrates g over R. The integrand must satisfy |g(x)| <= A e^{-right x} for
/// x > 0 and |g(x)| <= A e^{left x} for x < 0, with left, right > 0.
QuadratureResult integrate_line(const std::function<double(double)>& g, double A, double left,
                                double right, double rel_tol = 1e-12);

struct MelnikovReport {
    double m_f = 0.0;
    double m_b1 = 0.0;
    double m_b2_full = 0.0;
    double m_b2_leading = 0.0;
    double lambda1_pred = 0.0;
    double b0_estimate = 0.0;
    double u_b1 = 0.0;
    double wb = 0.0;
    // Diagnostics.
    QuadratureResult q_f, q_b1, q_b2a, q_b2b, q_psi3;
    double L_eps = 0.0;
    double L_eps_requested = 0.0;
    bool L_eps_clipped = false;
    Vec3 psi{0, 0, 0};
    Vec3 dphi{0, 0, 0};
    bool has_full = false;
};

double integral_Mf(const ModelParams& p, QuadratureResult* diag = nullptr);
double integral_Mb1(const ModelParams& p, QuadratureResult* diag = nullptr);
double integral_Mb2_leading(const ModelParams& p, QuadratureResult* d1 = nullptr,
                            QuadratureResult* d2 = nullptr);
/// Pairing of Psi_* with the pulse derivative at z_ae - L_eps. Fills the L_eps
/// diagnostics of `rep` when given.
double integral_Mb2_full(const PulseSolution& pulse, const SpectralConfig& cfg,
                         MelnikovReport* rep = nullptr);

MelnikovReport melnikov_report(const ModelParams& p, const PulseSolution* pulse = nullptr,
                               const SpectralConfig* cfg = nullptr);
/// -m_b2/m_b1, using the full value when available.
double lambda1_prediction(const MelnikovReport& r);

void write_melnikov_json(const MelnikovReport& r, const ModelParams& p, const std::string& path);

}  // namespace fhn
