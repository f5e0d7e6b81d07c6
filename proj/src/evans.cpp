#include "fhn/evans.hpp"

#include "fhn/parallel.hpp"

#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace fhn {

namespace {

constexpr double pi = std::numbers::pi;

using CVec7 = Eigen::Matrix<cplx, 7, 1>;
using CVec6 = Eigen::Matrix<cplx, 6, 1>;

}  // namespace

SpectralConfig default_spectral_config(const ModelParams& p, double c) {
    SpectralConfig cfg;
    cfg.k1 = 0.5 - p.a;
    cfg.eta = std::sqrt(2.0 * p.k) * Fm(p) * cfg.k1 / 4.0;
    const double ka = p.k * p.a;
    cfg.delta = ka >= 0.5 ? 0.2 : std::max(0.4 * ka, 0.05);
    cfg.M_tilde = 10.0 * (1.0 + p.k);
    const double sk = std::sqrt(2.0 / p.k);
    cfg.nu = sk * 2.0 / F0(p);
    try {
        const double wb = solve_wb(p).wb;
        const double U2 = critical_branches(p, wb).U2;
        cfg.nu = std::max(cfg.nu, sk * 2.0 / (deformation(p, wb).F * U2));
    } catch (const ValidityError&) {
    }
    // Spectral gap of the shifted asymptotic matrix over samples of R1 and R2.
    double gap = 1e300;
    auto probe = [&](cplx lam) {
        const SpatialEigenvalues s = spatial_eigenvalues(p, c, lam);
        for (cplx m : {s.mu1, s.mu_plus, s.mu_minus}) gap = std::min(gap, std::abs((m - cfg.eta).real()));
    };
    for (int i = 0; i < 64; ++i) probe(std::polar(cfg.delta, 2.0 * pi * i / 64));
    for (int i = 0; i <= 32; ++i) {
        const double x = cfg.delta + (cfg.M_tilde / std::sqrt(2.0) - cfg.delta) * i / 32;
        for (int j = -16; j <= 16; ++j) probe(cplx(x, cfg.M_tilde / std::sqrt(2.0) * j / 16));
    }
    cfg.mu_gap = gap;
    cfg.nu_required = std::max(cfg.nu, gap > 0 ? 2.0 / gap : 1e300);
    return cfg;
}

CMat3 linearization_at(const ModelParams& p, double c, const Vec3& X, cplx lambda) {
    const double u = X[0], v = X[1], w = X[2];
    const Deformation d = deformation(p, w);
    const Reaction r = reaction(p, u, w);
    const double F = d.F, Fw = d.Fw, Fww = d.Fww;
    const double du = F * v;
    const double dw = (p.eps / c) * (u - p.gamma * w);
    const double dv = c * F * F * v + F * r.f;
    const double ddu = Fw * dw * v + F * dv;
    const cplx sl = (lambda + p.eps * p.gamma) / c;
    const cplx Delta = F * r.fw + (2.0 * Fw * ddu - 3.0 * Fw * Fw * du * dw / F + Fww * du * dw -
                                   sl * Fw * du) /
                                      (F * F);
    CMat3 A;
    A << 0.0, F, 0.0,
        F * (r.fu + lambda) + p.eps * Fw * du / (c * F * F), c * F * F, Delta,
        p.eps / c, 0.0, -sl;
    return A;
}

CMat3 linearization_matrix(const PulseSolution& pulse, double xi, cplx lambda) {
    return linearization_at(pulse.params, pulse.speed, pulse.state_at(xi), lambda);
}

CMat3 shifted_matrix(const PulseSolution& pulse, const SpectralConfig& cfg, double xi, cplx lambda) {
    return linearization_matrix(pulse, xi, lambda) - cfg.eta * CMat3::Identity();
}

CMat3 second_compound(const CMat3& A) {
    CMat3 B;
    B << A(0, 0) + A(1, 1), A(1, 2), -A(0, 2),
        A(2, 1), A(0, 0) + A(2, 2), A(0, 1),
        -A(2, 0), A(1, 0), A(1, 1) + A(2, 2);
    return B;
}

bool evans_admissible(const ModelParams& p, double c, cplx lambda, double margin) {
    const SpatialEigenvalues s = spatial_eigenvalues(p, c, lambda);
    const double top = s.mu_plus.real();
    return top - std::max(s.mu1.real(), s.mu_minus.real()) > margin;
}

EvansValue evans_function(const PulseSolution& pulse, const SpectralConfig& cfg, cplx lambda) {
    const ModelParams& p = pulse.params;
    const double c = pulse.speed;
    if (!evans_admissible(p, c, lambda)) {
        std::ostringstream msg;
        msg << "A_inf not hyperbolic with a dominant unstable direction at lambda = " << lambda;
        throw DomainError(msg.str());
    }
    const SpatialEigenvalues s = spatial_eigenvalues(p, c, lambda);
    const double f0 = F0(p);
    const double shift = cfg.shifted ? cfg.eta : 0.0;
    const cplx mu_u = s.mu_plus - shift;
    const cplx trinf = c * f0 * f0 - (p.eps * p.gamma + lambda) / c - 3.0 * shift;
    const cplx ny = cfg.trace_normalize ? mu_u : cplx(0.0);
    const cplx nz = cfg.trace_normalize ? trinf - mu_u : cplx(0.0);

    const int im = pulse.node_index(cfg.xi_match);
    const int iR = cfg.right_cut > 0 ? pulse.node_index(cfg.right_cut)
                                     : static_cast<int>(pulse.nodes.size()) - 1;
    OdeOptions o;
    o.rtol = cfg.rtol;
    o.atol = cfg.atol;
    o.hmax = 0.25;

    auto rhs_y = [&](double, const CVec7& z) {
        const Vec3 X = z.head<3>().real();
        CMat3 A = linearization_at(p, c, X, lambda);
        A.diagonal().array() -= shift;
        CVec7 d;
        d.head<3>() = vector_field(p, c, X).cast<cplx>();
        d.segment<3>(3) = A * z.segment<3>(3) - ny * z.segment<3>(3);
        const double F = deformation(p, X[2]).F;
        d[6] = c * (F * F - f0 * f0);
        return d;
    };
    auto rhs_z = [&](double, const CVec6& z) {
        const Vec3 X = z.head<3>().real();
        CMat3 A = linearization_at(p, c, X, lambda);
        A.diagonal().array() -= shift;
        CVec6 d;
        d.head<3>() = vector_field(p, c, X).cast<cplx>();
        d.tail<3>() = second_compound(A) * z.tail<3>() - nz * z.tail<3>();
        return d;
    };

    CVec3 y(1.0, s.mu_plus / f0, p.eps / (c * s.mu_plus + p.eps * p.gamma + lambda));
    cplx acc = 0.0;
    for (int i = 0; i < im; ++i) {
        CVec7 st;
        st.head<3>() = pulse.node_states[i].cast<cplx>();
        st.segment<3>(3) = y;
        st[6] = acc;
        st = integrate(rhs_y, pulse.nodes[i], pulse.nodes[i + 1], st, o);
        y = st.segment<3>(3);
        acc = st[6];
    }
    CVec3 Z(0.0, 1.0, s.mu_minus / f0);
    for (int i = iR; i > im; --i) {
        CVec6 st;
        st.head<3>() = pulse.node_states[i].cast<cplx>();
        st.tail<3>() = Z;
        st = integrate(rhs_z, pulse.nodes[i], pulse.nodes[i - 1], st, o);
        Z = st.tail<3>();
    }
    EvansValue ev;
    ev.lambda = lambda;
    // The pairing grows like exp(int c (F^2 - F0^2)) in the matching point; divide it out.
    ev.log_scale = acc.real();
    ev.value = (y[0] * Z[2] - y[1] * Z[1] + y[2] * Z[0]) * std::exp(-ev.log_scale);
    ev.conditioning = std::abs(ev.value) * std::exp(ev.log_scale) / (y.norm() * Z.norm());
    ev.ill_conditioned = ev.conditioning < 1e-13;
    if (!std::isfinite(std::abs(ev.value))) throw IntegrationError("Evans value not finite");
    return ev;
}

std::vector<EvansValue> evans_batch(const PulseSolution& pulse, const SpectralConfig& cfg,
                                    const std::vector<cplx>& lambdas) {
    std::vector<EvansValue> out(lambdas.size());
    parallel_for(cfg.jobs, lambdas.size(),
                 [&](std::size_t i) { out[i] = evans_function(pulse, cfg, lambdas[i]); });
    return out;
}

// ---------------------------------------------------------------- contours

double Contour::Piece::length() const {
    return arc ? r * std::abs(t1 - t0) : std::abs(b - a);
}

cplx Contour::Piece::at(double s) const {
    if (arc) return center + std::polar(r, t0 + s * (t1 - t0));
    return a + s * (b - a);
}

Contour Contour::circle(cplx center, double r) {
    Contour c;
    c.arc(center, r, 0.0, 2.0 * pi);
    return c;
}

Contour Contour::rectangle(double x0, double x1, double y0, double y1) {
    Contour c;
    c.cursor_ = cplx(x0, y0);
    c.line_to(cplx(x1, y0));
    c.line_to(cplx(x1, y1));
    c.line_to(cplx(x0, y1));
    c.line_to(cplx(x0, y0));
    return c;
}

void Contour::move_to(cplx b) { cursor_ = b; }

void Contour::line_to(cplx b) {
    pieces_.push_back({false, cursor_, b, 0.0, 0.0, 0.0, 0.0});
    cursor_ = b;
}

void Contour::arc(cplx center, double r, double t0, double t1) {
    pieces_.push_back({true, 0.0, 0.0, center, r, t0, t1});
    cursor_ = center + std::polar(r, t1);
}

cplx Contour::point(double t) const {
    double total = 0.0;
    for (const auto& p : pieces_) total += p.length();
    double target = (t - std::floor(t)) * total;
    for (const auto& p : pieces_) {
        const double L = p.length();
        if (target <= L || &p == &pieces_.back()) return p.at(std::clamp(target / L, 0.0, 1.0));
        target -= L;
    }
    return pieces_.front().at(0.0);
}

bool Contour::inside(cplx z) const {
    const int n = 4096;
    double turn = 0.0;
    cplx prev = point(0.0) - z;
    for (int i = 1; i <= n; ++i) {
        const cplx cur = point(static_cast<double>(i) / n) - z;
        turn += std::arg(cur / prev);
        prev = cur;
    }
    return std::abs(turn) > pi;
}

double Contour::scale() const {
    double total = 0.0;
    for (const auto& p : pieces_) total += p.length();
    return total / (2.0 * pi);
}

// ---------------------------------------------------------------- counting

cplx refine_zero(const ScalarEvans& E, cplx z0, double scale) {
    cplx zp = z0 + 1e-4 * scale;
    cplx Ep = E(zp);
    cplx z = z0;
    for (int it = 0; it < 60; ++it) {
        const cplx Ez = E(z);
        if (Ez == cplx(0.0)) return z;
        const cplx den = Ez - Ep;
        if (den == cplx(0.0)) break;
        const cplx dz = -Ez * (z - zp) / den;
        zp = z;
        Ep = Ez;
        z += dz;
        if (std::abs(dz) < 1e-14 * scale) break;
    }
    return z;
}

namespace {

std::vector<cplx> poly_roots_from_power_sums(const std::vector<cplx>& s, int n) {
    // Newton identities: e_k from power sums s_1..s_n.
    std::vector<cplx> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        cplx acc = 0.0;
        for (int i = 1; i <= k; ++i) acc += (i % 2 == 1 ? 1.0 : -1.0) * e[k - i] * s[i];
        e[k] = acc / static_cast<double>(k);
    }
    if (n == 1) return {e[1]};
    // z^n - e1 z^{n-1} + e2 z^{n-2} - ... ; companion matrix.
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int k = 1; k <= n; ++k) C(n - k, n - 1) = (k % 2 == 1 ? 1.0 : -1.0) * e[k];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
    std::vector<cplx> r;
    for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()[i]);
    return r;
}

}  // namespace

ContourReport count_zeros_fn(const ScalarEvans& E, int jobs, const Contour& contour, int n_points,
                             const std::string& region, bool refine) {
    std::vector<double> ts;
    for (int i = 0; i < n_points; ++i) ts.push_back(static_cast<double>(i) / n_points);
    std::vector<cplx> vals(ts.size());
    auto eval_range = [&](const std::vector<double>& tt, std::vector<cplx>& vv) {
        vv.resize(tt.size());
        parallel_for(jobs, tt.size(), [&](std::size_t i) { vv[i] = E(contour.point(tt[i])); });
    };
    eval_range(ts, vals);
    int evaluations = static_cast<int>(ts.size());

    const int max_level = 14;
    for (int level = 0;; ++level) {
        std::vector<double> add;
        const std::size_t m = ts.size();
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t k = (j + 1) % m;
            if (vals[j] == cplx(0.0) || vals[k] == cplx(0.0)) {
                throw ContourError("contour passes through a zero of the Evans function");
            }
            const cplx ratio = vals[k] / vals[j];
            const double tnext = k == 0 ? 1.0 : ts[k];
            if (std::abs(std::arg(ratio)) >= pi / 2 || std::abs(std::log(std::abs(ratio))) > 3.0) {
                add.push_back(0.5 * (ts[j] + tnext));
            }
        }
        if (add.empty()) break;
        if (level == max_level) {
            throw ContourError("phase increments stay above pi/2 after maximal refinement in region " +
                               region + "; contour too close to a zero or to the essential spectrum");
        }
        std::vector<cplx> addv;
        eval_range(add, addv);
        evaluations += static_cast<int>(add.size());
        std::vector<std::pair<double, cplx>> merged;
        for (std::size_t i = 0; i < ts.size(); ++i) merged.emplace_back(ts[i], vals[i]);
        for (std::size_t i = 0; i < add.size(); ++i) merged.emplace_back(add[i], addv[i]);
        std::sort(merged.begin(), merged.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        ts.clear();
        vals.clear();
        for (auto& [t, v] : merged) {
            ts.push_back(t);
            vals.push_back(v);
        }
    }

    ContourReport rep;
    rep.region = region;
    rep.evaluations = evaluations;
    const std::size_t m = ts.size();
    double total = 0.0;
    std::vector<cplx> logs(m + 1);
    logs[0] = std::log(vals[0]);
    for (std::size_t j = 0; j < m; ++j) {
        const cplx step = std::log(vals[(j + 1) % m] / vals[j]);
        total += step.imag();
        logs[j + 1] = logs[j] + step;
    }
    rep.winding = static_cast<int>(std::lround(total / (2.0 * pi)));
    rep.max_abs = 0.0;
    rep.min_abs = 1e300;
    for (std::size_t j = 0; j < m; ++j) {
        rep.contour.push_back(contour.point(ts[j]));
        rep.values.push_back(vals[j]);
        rep.max_abs = std::max(rep.max_abs, std::abs(vals[j]));
        rep.min_abs = std::min(rep.min_abs, std::abs(vals[j]));
    }

    if (refine && rep.winding > 0 && rep.winding <= 8) {
        const int n = rep.winding;
        // Center for conditioning.
        cplx center = 0.0;
        for (const cplx& z : rep.contour) center += z;
        center /= static_cast<double>(m);
        std::vector<cplx> pts = rep.contour;
        pts.push_back(rep.contour.front());
        std::vector<cplx> s(n + 1, 0.0);
        const cplx two_pi_i(0.0, 2.0 * pi);
        for (int pw = 1; pw <= n; ++pw) {
            cplx I = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const cplx a = pts[j] - center, b = pts[j + 1] - center;
                I += 0.5 * (std::pow(a, pw - 1) * logs[j] + std::pow(b, pw - 1) * logs[j + 1]) * (b - a);
            }
            s[pw] = static_cast<double>(n) * std::pow(pts[0] - center, pw) -
                    static_cast<double>(pw) * I / two_pi_i;
        }
        const double sc = contour.scale();
        std::vector<cplx> roots = poly_roots_from_power_sums(s, n);
        std::vector<cplx> polished;
        for (cplx r : roots) {
            const cplx z0 = r + center;
            const cplx z = refine_zero(E, z0, sc);
            polished.push_back(std::abs(z - z0) < 0.5 * sc ? z : z0);
        }
        std::vector<bool> used(polished.size(), false);
        for (std::size_t i = 0; i < polished.size(); ++i) {
            if (used[i]) continue;
            ZeroInfo zi{polished[i], 1};
            for (std::size_t j = i + 1; j < polished.size(); ++j) {
                if (!used[j] && std::abs(polished[j] - polished[i]) < 1e-6 * sc) {
                    used[j] = true;
                    ++zi.order;
                }
            }
            rep.zeros.push_back(zi);
        }
        std::sort(rep.zeros.begin(), rep.zeros.end(),
                  [](const ZeroInfo& a, const ZeroInfo& b) { return a.lambda.real() > b.lambda.real(); });
    }
    return rep;
}

ContourReport count_zeros(const PulseSolution& pulse, const SpectralConfig& cfg, const Contour& contour,
                          int n_points, const std::string& region, bool refine) {
    ScalarEvans E = [&](cplx z) { return evans_function(pulse, cfg, z).value; };
    ContourReport rep = count_zeros_fn(E, cfg.jobs, contour, n_points, region, refine);
    SpectralConfig serial = cfg;
    serial.jobs = 1;
    // log_scale is lambda-independent; record it once per sample for the scan export.
    const double ls = evans_function(pulse, serial, rep.contour.front()).log_scale;
    rep.log_scale.assign(rep.contour.size(), ls);
    return rep;
}

int local_order(const PulseSolution& pulse, const SpectralConfig& cfg, cplx z, double r) {
    return count_zeros(pulse, cfg, Contour::circle(z, r), 32, "local", false).winding;
}

Contour region_R1(const SpectralConfig& cfg) { return Contour::circle(0.0, cfg.delta); }

Contour region_R2(const SpectralConfig& cfg) {
    const double X = cfg.M_tilde / std::sqrt(2.0);
    const double d = cfg.delta;
    const double s = d * std::sqrt(3.0) / 2.0;
    // Around the box counterclockwise from the notch at (-d/2, -s), then back
    // clockwise along the delta-circle through the right half-plane.
    Contour b;
    b.move_to(cplx(-d / 2, -s));
    b.line_to(cplx(-d / 2, -X));
    b.line_to(cplx(X, -X));
    b.line_to(cplx(X, X));
    b.line_to(cplx(-d / 2, X));
    b.line_to(cplx(-d / 2, s));
    b.arc(0.0, d, 2.0 * pi / 3.0, -2.0 * pi / 3.0);
    return b;
}

double r3_angle(const ModelParams& p, double c, const SpectralConfig& cfg) {
    auto ok = [&](double th) {
        for (int i = 0; i <= 20; ++i) {
            const double r = cfg.M_tilde * (1.0 + i / 20.0);
            if (!evans_admissible(p, c, std::polar(r, th), 0.5)) return false;
        }
        return true;
    };
    double lo = pi / 2, hi = 2.0 * pi / 3.0;
    if (ok(hi)) return hi;
    if (!ok(lo)) return 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

Contour region_R3(const ModelParams& p, double c, const SpectralConfig& cfg) {
    const double th = r3_angle(p, c, cfg);
    const double R = cfg.M_tilde;
    Contour b;
    b.move_to(std::polar(2 * R, -th));
    b.arc(0.0, 2 * R, -th, th);
    b.line_to(std::polar(R, th));
    b.arc(0.0, R, th, -th);
    b.line_to(std::polar(2 * R, -th));
    return b;
}

Contour region_omega_plus(const ModelParams& p, double c, const SpectralConfig& cfg) {
    const double f0 = F0(p);
    const double R = cfg.M_tilde;
    const double off = cfg.delta / 2.0 - p.k * p.a;
    auto curve = [&](double l) { return cplx(off - l * l / (f0 * f0), -c * l); };
    double lo = 0.0, hi = 1e3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(curve(mid)) < R ? lo : hi) = mid;
    }
    const double ls = lo;
    Contour b;
    b.move_to(curve(-ls));
    const int n = 64;
    for (int i = 1; i <= n; ++i) b.line_to(curve(-ls + 2.0 * ls * i / n));
    // Arc through the positive real axis, lower end back to the upper end.
    b.arc(0.0, R, std::arg(curve(ls)), std::arg(curve(-ls)));
    return b;
}

// ---------------------------------------------------------------- R3 check

R3Report r3_exclusion_check(const PulseSolution& pulse, const SpectralConfig& cfg,
                            const std::vector<cplx>& samples) {
    const ModelParams& p = pulse.params;
    const double c = pulse.speed;
    double Fmin = 1e300;
    for (const Vec3& s : pulse.states) Fmin = std::min(Fmin, deformation(p, s[2]).F);
    const double bound = 0.25 + p.M / (8.0 * p.c1);
    R3Report rep;
    for (cplx lam : samples) {
        const double r = std::abs(lam);
        const cplx q = std::sqrt(lam / r);
        ++rep.samples;
        if (!(q.real() > 0.5)) rep.sqrt_half_plane = false;
        if (!(Fmin * q.real() > bound)) rep.mu23_bound = false;
        const double mu1 = std::abs(lam.real()) / (c * std::sqrt(r));
        if (8.0 * std::abs(lam.real()) > c * std::sqrt(r)) {
            ++rep.case1;
        } else {
            ++rep.case2;
            if (!(mu1 <= 0.125 && Fmin * q.real() > bound)) rep.case2_separation = false;
        }
    }
    rep.theta_admissible = r3_angle(p, c, cfg);
    std::vector<cplx> arc;
    const int n = 48;
    for (int i = 0; i <= n; ++i) {
        arc.push_back(std::polar(2.0 * cfg.M_tilde, -rep.theta_admissible + 2.0 * rep.theta_admissible * i / n));
    }
    const auto vals = evans_batch(pulse, cfg, arc);
    rep.arc_min_abs = 1e300;
    rep.arc_max_abs = 0.0;
    for (const auto& v : vals) {
        rep.arc_min_abs = std::min(rep.arc_min_abs, std::abs(v.value));
        rep.arc_max_abs = std::max(rep.arc_max_abs, std::abs(v.value));
    }
    return rep;
}

// ---------------------------------------------------------------- reduced problems

cplx reduced_evans(const ModelParams& p, LayerKind kind, cplx lambda, double* sign_changes) {
    const auto orbits = front_back_profiles(p);
    const LayerOrbit& o = kind == LayerKind::front ? orbits.first : orbits.second;
    const double F = o.F;
    const double c0 = o.speed;
    const double w = o.w_level;
    const double u_minus = o.endpoints.first[0];
    const double u_plus = o.endpoints.second[0];
    auto mu = [&](double u, double sgn) {
        const double fu = reaction(p, u, w).fu;
        const double b = c0 * F * F;
        return 0.5 * (b + sgn * std::sqrt(cplx(b * b) + 4.0 * F * F * (fu + lambda)));
    };
    const cplx mup = mu(u_minus, 1.0);
    const cplx mum = mu(u_plus, -1.0);
    const double L = 40.0 / o.rate;
    using CV2 = Eigen::Matrix<cplx, 2, 1>;
    auto C = [&](double xi) {
        Eigen::Matrix2cd m;
        m << 0.0, F, F * (reaction(p, o.u(xi), w).fu + lambda), c0 * F * F;
        return m;
    };
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-13;
    opt.hmax = 0.1;
    int flips = 0;
    double last = 0.0;
    auto track = [&](double, const CV2& y) {
        const double s = y[0].real();
        if (last != 0.0 && s != 0.0 && (s > 0) != (last > 0)) ++flips;
        if (s != 0.0) last = s;
    };
    CV2 y(1.0, mup / F);
    last = 1.0;
    y = integrate([&](double xi, const CV2& z) { return CV2((C(xi) - mup * Eigen::Matrix2cd::Identity()) * z); },
                  -L, 0.0, y, opt, track);
    CV2 z(1.0, mum / F);
    last = 1.0;
    z = integrate([&](double xi, const CV2& q) { return CV2((C(xi) - mum * Eigen::Matrix2cd::Identity()) * q); },
                  L, 0.0, z, opt, track);
    if (sign_changes) *sign_changes = flips;
    return y[0] * z[1] - y[1] * z[0];
}

ReducedReport reduced_front_back_spectrum(const ModelParams& p, const SpectralConfig& cfg, LayerKind kind) {
    ReducedReport rep;
    rep.kind = kind;
    const auto orbits = front_back_profiles(p);
    const LayerOrbit& o = kind == LayerKind::front ? orbits.first : orbits.second;
    const double fu_m = reaction(p, o.endpoints.first[0], o.w_level).fu;
    const double fu_p = reaction(p, o.endpoints.second[0], o.w_level).fu;
    rep.essential_edge = -std::min(fu_m, fu_p);

    auto D = [&](double lam) { return reduced_evans(p, kind, lam).real(); };
    std::vector<double> grid;
    const double start = 0.9 * rep.essential_edge + 1.234567e-4;
    for (double x = start; x < 1.0; x += 2.5e-3) grid.push_back(x);
    for (double x = 1.0; x <= cfg.M_tilde; x += 0.25) grid.push_back(x);
    std::vector<double> vals(grid.size());
    parallel_for(cfg.jobs, grid.size(), [&](std::size_t i) { vals[i] = D(grid[i]); });
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if ((vals[i] > 0) != (vals[i + 1] > 0)) {
            boost::uintmax_t it = 200;
            const auto br = boost::math::tools::toms748_solve(
                D, grid[i], grid[i + 1], vals[i], vals[i + 1],
                boost::math::tools::eps_tolerance<double>(48), it);
            rep.real_zeros.push_back(0.5 * (br.first + br.second));
        }
    }
    rep.real_zeros_in_scan = static_cast<int>(rep.real_zeros.size());
    rep.lambda_top = rep.real_zeros.empty() ? std::nan("") : rep.real_zeros.back();
    if (!rep.real_zeros.empty()) {
        double flips = 0;
        reduced_evans(p, kind, rep.lambda_top, &flips);
        rep.sign_changes = static_cast<int>(flips);
    }
    ScalarEvans E = [&](cplx z) { return reduced_evans(p, kind, z); };
    rep.r2_winding = count_zeros_fn(E, cfg.jobs, region_R2(cfg), 96, "R2-reduced", false).winding;
    return rep;
}

// ---------------------------------------------------------------- output

void write_contour_json(const std::vector<ContourReport>& reports, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json z = nlohmann::json::array();
        for (const auto& q : r.zeros) {
            z.push_back({{"re", q.lambda.real()}, {"im", q.lambda.imag()}, {"order", q.order}});
        }
        arr.push_back({{"region", r.region}, {"winding", r.winding}, {"zeros", z},
                       {"samples", static_cast<int>(r.contour.size())}});
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << arr.dump(2) << '\n';
}

void write_scan_csv(const ContourReport& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17) << "re_lambda,im_lambda,re_E,im_E,log_scale\n";
    for (std::size_t i = 0; i < r.contour.size(); ++i) {
        f << r.contour[i].real() << ',' << r.contour[i].imag() << ',' << r.values[i].real() << ','
          << r.values[i].imag() << ',' << (i < r.log_scale.size() ? r.log_scale[i] : 0.0) << '\n';
    }
}

}  // namespace fhn
