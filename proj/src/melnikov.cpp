#include "fhn/melnikov.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace fhn {

namespace {

using boost::math::quadrature::gauss_kronrod;

void guard(double left, double right, const char* what) {
    if (!(left > 0.0) || !(right > 0.0)) {
        std::ostringstream msg;
        msg << "integrability violated for " << what << ": tail exponents " << left << ", " << right;
        throw ValidityError(msg.str());
    }
}

}  // namespace

QuadratureResult integrate_line(const std::function<double(double)>& g, double A, double left,
                                double right, double rel_tol) {
    QuadratureResult q;
    // Rough magnitude from a generous window, then size the window so the
    // analytic tail bound is below 1e-12 of the integral.
    double err = 0.0, l1 = 0.0;
    const double T0 = 40.0 / std::min(left, right);
    const double rough =
        gauss_kronrod<double, 31>::integrate(g, -T0, T0, 15, 1e-10, &err, &l1);
    const double target = 1e-12 * std::max(std::abs(rough), 1e-300);
    auto tail = [&](double T) { return A * (std::exp(-left * T) / left + std::exp(-right * T) / right); };
    double T = 1.0;
    while (tail(T) > target && T < 1e4) T *= 1.1;
    q.xi_T = T;
    q.tail_bound = tail(T);
    // Fixed panels of unit-ish width, adaptive within each.
    const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * T)));
    q.panels = panels;
    double v15 = 0.0, v31 = 0.0, e15 = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = -T + 2.0 * T * i / panels;
        const double b = -T + 2.0 * T * (i + 1) / panels;
        double e = 0.0;
        v15 += gauss_kronrod<double, 15>::integrate(g, a, b, 15, rel_tol, &e);
        e15 += e;
        v31 += gauss_kronrod<double, 31>::integrate(g, a, b, 15, rel_tol);
    }
    q.value = v15;
    q.doubled = v31;
    q.error = e15;
    return q;
}

double integral_Mf(const ModelParams& p, QuadratureResult* diag) {
    const LayerOrbit f = front_back_profiles(p).first;
    const double c0 = wave_speed_c0(p);
    const double f0 = F0(p);
    const double s = c0 * f0 * f0;
    const double kap = f.rate;
    // (u_f')^2 <= kap^2 e^{-2kap|x|}.
    guard(2 * kap - s, 2 * kap + s, "M_f");
    auto g = [&](double x) {
        const double d = f.du(x);
        return f0 * std::exp(-s * x) * d * d;
    };
    const QuadratureResult q = integrate_line(g, f0 * kap * kap, 2 * kap - s, 2 * kap + s);
    if (diag) *diag = q;
    return q.value;
}

double integral_Mb1(const ModelParams& p, QuadratureResult* diag) {
    const LayerOrbit b = front_back_profiles(p).second;
    const double c0 = wave_speed_c0(p);
    const double s = c0 * b.F * b.F;
    const double kap = b.rate;
    guard(2 * kap - s, 2 * kap + s, "M_b1");
    auto g = [&](double x) {
        const double d = b.du(x);
        return b.F * d * d * std::exp(-s * x);
    };
    const double A = b.F * kap * kap * b.amplitude * b.amplitude;
    const QuadratureResult q = integrate_line(g, A, 2 * kap - s, 2 * kap + s);
    if (diag) *diag = q;
    return q.value;
}

double integral_Mb2_leading(const ModelParams& p, QuadratureResult* d1, QuadratureResult* d2) {
    validate(p, true);
    const LayerOrbit b = front_back_profiles(p).second;
    const double c0 = wave_speed_c0(p);
    const double s = c0 * b.F * b.F;
    const double kap = b.rate;
    const double U2 = b.amplitude;
    const double Fw = deformation(p, b.w_level).Fw;
    // u_b' e^{-sz} u_b: left tail ~ e^{(kap - s)z}, right ~ e^{-(kap + s)z}.
    guard(kap - s, kap + s, "M_b2 (first term)");
    guard(2 * kap - s, 2 * kap + s, "M_b2 (second term)");
    auto g1 = [&](double z) { return b.du(z) * std::exp(-s * z) * b.F * b.u(z); };
    auto g2 = [&](double z) {
        const double d = b.du(z);
        return d * d * std::exp(-s * z);
    };
    const QuadratureResult q1 = integrate_line(g1, b.F * kap * U2 * U2, kap - s, 2 * kap + s);
    const QuadratureResult q2 = integrate_line(g2, kap * kap * U2 * U2, 2 * kap - s, 2 * kap + s);
    if (d1) *d1 = q1;
    if (d2) *d2 = q2;
    return -(p.eps / c0) * (U2 - p.gamma * b.w_level) * (q1.value + c0 * Fw * q2.value);
}

double integral_Mb2_full(const PulseSolution& pulse, const SpectralConfig& cfg, MelnikovReport* rep) {
    const ModelParams& p = pulse.params;
    const LayerOrbit b = front_back_profiles(p).second;
    const double c0 = wave_speed_c0(p);
    const double s = c0 * b.F * b.F;
    const double kap = b.rate;
    const Deformation d = deformation(p, b.w_level);
    const double Z = pulse.z_ae;
    const double requested = -cfg.nu * std::log(p.eps);
    // Keep the pairing point on the right slow arc: at desk-scale eps the
    // requested length can reach past the front.
    const double L = std::min(requested, 0.5 * Z);
    const double xi = Z - L;
    if (xi < pulse.grid.front() || xi > pulse.grid.back()) {
        std::ostringstream msg;
        msg << "pairing point z_ae - L_eps = " << xi << " outside pulse grid";
        throw DomainError(msg.str());
    }
    auto Delta_b = [&](double z) { return d.F * b.u(z) + 2.0 * d.Fw * b.ddu(z) / (d.F * d.F); };
    auto g = [&](double z) { return b.du(z) * std::exp(-s * z) * Delta_b(z); };
    // Integral over [-L, inf) by shifting to [0, inf).
    namespace bq = boost::math::quadrature;
    double err = 0.0;
    const double upper = 60.0 / (kap + s);
    double J = 0.0;
    const int panels = static_cast<int>(std::ceil((upper + L) / 1.0));
    for (int i = 0; i < panels; ++i) {
        const double a = -L + (upper + L) * i / panels;
        const double bb = -L + (upper + L) * (i + 1) / panels;
        double e = 0.0;
        J += bq::gauss_kronrod<double, 15>::integrate(g, a, bb, 15, 1e-13, &e);
        err += e;
    }
    Vec3 psi;
    psi[0] = std::exp(s * L) * b.ddu(-L) / b.F;  // v_b' = u_b''/F(w_b)
    psi[1] = -std::exp(s * L) * b.du(-L);
    psi[2] = -J;  // integral from +inf down to -L
    const Vec3 dphi = pulse.deriv_at(xi);
    if (rep) {
        rep->L_eps = L;
        rep->L_eps_requested = requested;
        rep->L_eps_clipped = L < requested;
        rep->psi = psi;
        rep->dphi = dphi;
        rep->q_psi3.value = J;
        rep->q_psi3.error = err;
        rep->q_psi3.xi_T = upper;
        rep->q_psi3.panels = panels;
    }
    return psi.dot(dphi);
}

MelnikovReport melnikov_report(const ModelParams& p, const PulseSolution* pulse, const SpectralConfig* cfg) {
    MelnikovReport r;
    r.wb = solve_wb(p).wb;
    r.u_b1 = critical_branches(p, r.wb).U2;
    r.m_f = integral_Mf(p, &r.q_f);
    r.m_b1 = integral_Mb1(p, &r.q_b1);
    r.m_b2_leading = integral_Mb2_leading(p, &r.q_b2a, &r.q_b2b);
    if (pulse) {
        const SpectralConfig c = cfg ? *cfg : default_spectral_config(p, pulse->speed);
        r.m_b2_full = integral_Mb2_full(*pulse, c, &r);
        r.has_full = true;
    }
    r.lambda1_pred = lambda1_prediction(r);
    r.b0_estimate = -r.lambda1_pred / p.eps;
    return r;
}

double lambda1_prediction(const MelnikovReport& r) {
    return -(r.has_full ? r.m_b2_full : r.m_b2_leading) / r.m_b1;
}

void write_melnikov_json(const MelnikovReport& r, const ModelParams& p, const std::string& path) {
    auto qd = [](const QuadratureResult& q) {
        return nlohmann::json{{"value", q.value}, {"error_estimate", q.error}, {"tail_bound", q.tail_bound},
                              {"xi_T", q.xi_T}, {"panels", q.panels}, {"higher_order_value", q.doubled}};
    };
    nlohmann::json j = {
        {"params", {{"a", p.a}, {"k", p.k}, {"gamma", p.gamma}, {"M", p.M}, {"c1", p.c1}, {"eps", p.eps}}},
        {"m_f", r.m_f},
        {"m_b1", r.m_b1},
        {"m_b2_leading", r.m_b2_leading},
        {"lambda1_pred", r.lambda1_pred},
        {"lambda1_pred_leading", -r.m_b2_leading / r.m_b1},
        {"b0_estimate", r.b0_estimate},
        {"u_b1", r.u_b1},
        {"w_b", r.wb},
        {"diagnostics", {{"m_f", qd(r.q_f)}, {"m_b1", qd(r.q_b1)}, {"m_b2_first", qd(r.q_b2a)},
                         {"m_b2_second", qd(r.q_b2b)}}}};
    if (r.has_full) {
        j["m_b2_full"] = r.m_b2_full;
        j["diagnostics"]["L_eps"] = r.L_eps;
        j["diagnostics"]["L_eps_requested"] = r.L_eps_requested;
        j["diagnostics"]["L_eps_clipped"] = r.L_eps_clipped;
        j["diagnostics"]["psi"] = {r.psi[0], r.psi[1], r.psi[2]};
        j["diagnostics"]["dphi"] = {r.dphi[0], r.dphi[1], r.dphi[2]};
        j["diagnostics"]["psi3_quadrature_error"] = r.q_psi3.error;
    } else {
        j["m_b2_full"] = nullptr;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

}  // namespace fhn
