#include "fhn/pulse.hpp"

#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fhn {

namespace {

using Vec15 = Eigen::Matrix<double, 15, 1>;

struct Propagated {
    Vec3 P;
    Eigen::Matrix3d Ps;
    Vec3 Pc;
};

Propagated propagate_var(const ModelParams& p, double c, const Vec3& s, double t0, double t1,
                         const OdeOptions& o) {
    Vec15 y = Vec15::Zero();
    y.head<3>() = s;
    for (int i = 0; i < 3; ++i) y[3 + 4 * i] = 1.0;  // identity, column-major 3x3
    auto rhs = [&](double, const Vec15& z) {
        Vec15 d;
        const Vec3 x = z.head<3>();
        const Eigen::Matrix3d J = field_jacobian(p, c, x);
        d.head<3>() = vector_field(p, c, x);
        Eigen::Map<const Eigen::Matrix3d> Phi(z.data() + 3);
        Eigen::Map<Eigen::Matrix3d> dPhi(d.data() + 3);
        dPhi = J * Phi;
        d.tail<3>() = J * z.tail<3>() + field_dc(p, c, x);
        return d;
    };
    const Vec15 out = integrate(rhs, t0, t1, y, o);
    Propagated r;
    r.P = out.head<3>();
    r.Ps = Eigen::Map<const Eigen::Matrix3d>(out.data() + 3);
    r.Pc = out.tail<3>();
    return r;
}

Vec3 propagate(const ModelParams& p, double c, const Vec3& s, double t0, double t1,
               const OdeOptions& o) {
    auto rhs = [&](double, const Vec3& x) { return Vec3(vector_field(p, c, x)); };
    return integrate(rhs, t0, t1, s, o);
}

double fast_stable_rate(const ModelParams& p, double c, double w) {
    const double F = deformation(p, w).F;
    const double fu = reaction(p, 0.0, w).fu;
    const double b = c * F * F;
    return 0.5 * (b - std::sqrt(b * b + 4.0 * F * F * fu));
}

double slow_arc_time(const ModelParams& p, double c, double wb) {
    // xi-time along the right slow arc from w = 0 to w_b.
    const int n = 2000;
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = wb * (i + 0.5) / n;
        t += (wb / n) * c / (p.eps * (critical_branches(p, w).U2 - p.gamma * w));
    }
    return t;
}

std::vector<Vec3> skeleton_guess(const ModelParams& p, double c, const std::vector<double>& xs,
                                 double z) {
    const auto [front, back] = front_back_profiles(p);
    const double wb = back.w_level;
    const double fine = 0.005;
    std::vector<double> fx, fu, fw;
    double w = 0.0, amp = 1.0;
    const double lo = xs.front(), hi = xs.back();
    for (double x = lo; x <= hi + fine; x += fine) {
        if (x <= z) amp = critical_branches(p, std::min(w, wb)).U2;
        const double u = x < 0.5 * z ? front.u(x) * amp
                                     : amp / (1.0 + std::exp(std::min(back.rate * (x - z), 700.0)));
        fx.push_back(x);
        fu.push_back(u);
        fw.push_back(w);
        w += fine * (p.eps / c) * (u - p.gamma * w);
        w = std::clamp(w, 0.0, 0.999 * fold_level(p));
    }
    std::vector<Vec3> out;
    for (double x : xs) {
        const std::size_t i = std::min<std::size_t>(
            fx.size() - 2, static_cast<std::size_t>(std::max(0.0, (x - lo) / fine)));
        const double du = (fu[i + 1] - fu[i]) / fine;
        const double ww = fw[i];
        out.emplace_back(fu[i], du / deformation(p, ww).F, ww);
    }
    return out;
}

struct Layout {
    std::vector<double> nodes;
    int zero_node;
};

Layout make_layout(double left, double right, double seg) {
    Layout l;
    const int nl = static_cast<int>(std::ceil(left / seg - 1e-9));
    const int nr = static_cast<int>(std::ceil(right / seg - 1e-9));
    for (int i = -nl; i <= nr; ++i) l.nodes.push_back(i * seg);
    l.zero_node = nl;
    return l;
}

PulseSolution solve_multiple_shooting(const ModelParams& p, double c, const Layout& lay,
                                      std::vector<Vec3> node_guess, const ShootOptions& opt) {
    const int N = static_cast<int>(lay.nodes.size()) - 1;  // segments
    const bool fwd = opt.direction == ShootDirection::forward;
    const int n = 3 * N + 1;
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.hmax = 0.25;

    Eigen::VectorXd x(n);
    for (int i = 0; i < N; ++i) x.segment<3>(3 * i) = node_guess[fwd ? i : i + 1];
    x[3 * N] = c;

    // Residual and optional Jacobian.
    auto evaluate = [&](const Eigen::VectorXd& xv, Eigen::MatrixXd* Jac) {
        const double cc = xv[3 * N];
        std::vector<Propagated> seg(N);
        for (int i = 0; i < N; ++i) {
            const double a = fwd ? lay.nodes[i] : lay.nodes[i + 1];
            const double b = fwd ? lay.nodes[i + 1] : lay.nodes[i];
            const Vec3 s = xv.segment<3>(3 * i);
            if (Jac) {
                seg[i] = propagate_var(p, cc, s, a, b, o);
            } else {
                seg[i].P = propagate(p, cc, s, a, b, o);
            }
        }
        Eigen::VectorXd r(n);
        if (Jac) Jac->setZero(n, n);
        int row = 0;
        const OriginSpectrum os = origin_spectrum(p, cc);
        const double hc = 1e-7 * std::max(1.0, std::abs(cc));
        const OriginSpectrum osp = origin_spectrum(p, cc + hc);
        const OriginSpectrum osm = origin_spectrum(p, cc - hc);

        // Left end lies in the unstable subspace of the origin.
        const Vec3 XL = fwd ? Vec3(xv.segment<3>(0)) : seg[0].P;
        for (int q = 0; q < 2; ++q) {
            const Vec3 l = q == 0 ? os.left_s : os.left_1;
            const Vec3 dl = q == 0 ? Vec3((osp.left_s - osm.left_s) / (2 * hc))
                                   : Vec3((osp.left_1 - osm.left_1) / (2 * hc));
            r[row] = l.dot(XL);
            if (Jac) {
                if (fwd) {
                    Jac->block<1, 3>(row, 0) = l.transpose();
                    (*Jac)(row, 3 * N) = dl.dot(XL);
                } else {
                    Jac->block<1, 3>(row, 0) = l.transpose() * seg[0].Ps;
                    (*Jac)(row, 3 * N) = dl.dot(XL) + l.dot(seg[0].Pc);
                }
            }
            ++row;
        }
        // Continuity at interior nodes.
        for (int m = 1; m < N; ++m) {
            const int ip = fwd ? m - 1 : m;   // segment providing the propagated value
            const int iu = fwd ? m : m - 1;   // unknown block at node m
            r.segment<3>(row) = seg[ip].P - xv.segment<3>(3 * iu);
            if (Jac) {
                Jac->block<3, 3>(row, 3 * ip) += seg[ip].Ps;
                Jac->block<3, 3>(row, 3 * iu) -= Eigen::Matrix3d::Identity();
                Jac->block<3, 1>(row, 3 * N) = seg[ip].Pc;
            }
            row += 3;
        }
        // Right end lies in the stable subspace.
        const Vec3 XR = fwd ? seg[N - 1].P : Vec3(xv.segment<3>(3 * (N - 1)));
        {
            const Vec3 dl = (osp.left_u - osm.left_u) / (2 * hc);
            r[row] = os.left_u.dot(XR);
            if (Jac) {
                if (fwd) {
                    Jac->block<1, 3>(row, 3 * (N - 1)) = os.left_u.transpose() * seg[N - 1].Ps;
                    (*Jac)(row, 3 * N) = dl.dot(XR) + os.left_u.dot(seg[N - 1].Pc);
                } else {
                    Jac->block<1, 3>(row, 3 * (N - 1)) = os.left_u.transpose();
                    (*Jac)(row, 3 * N) = dl.dot(XR);
                }
            }
            ++row;
        }
        // Phase: u(0) = 1/2.
        {
            const int iu = fwd ? lay.zero_node : lay.zero_node - 1;
            r[row] = xv[3 * iu] - 0.5;
            if (Jac) (*Jac)(row, 3 * iu) = 1.0;
            ++row;
        }
        return r;
    };

    PulseSolution sol;
    sol.params = p;
    Eigen::MatrixXd Jac;
    Eigen::VectorXd r = evaluate(x, &Jac);
    double rn = r.lpNorm<Eigen::Infinity>();
    sol.residual_history.push_back(rn);
    int it = 0;
    while (rn > opt.tol) {
        if (++it > opt.max_iter) {
            std::ostringstream msg;
            msg << "pulse shooting did not converge after " << opt.max_iter
                << " iterations (residual " << rn << ")";
            throw ValidityError(msg.str());
        }
        const Eigen::VectorXd dx = Jac.partialPivLu().solve(-r);
        double alpha = 1.0;
        bool accepted = false;
        Eigen::VectorXd xn;
        Eigen::VectorXd rnew;
        for (int ls = 0; ls < 30; ++ls) {
            xn = x + alpha * dx;
            try {
                rnew = evaluate(xn, nullptr);
                if (rnew.allFinite() && rnew.lpNorm<Eigen::Infinity>() < rn) {
                    accepted = true;
                    break;
                }
            } catch (const std::exception&) {
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "pulse shooting stalled at residual " << rn;
            throw ValidityError(msg.str());
        }
        x = xn;
        r = evaluate(x, &Jac);
        rn = r.lpNorm<Eigen::Infinity>();
        sol.residual_history.push_back(rn);
    }
    sol.iterations = it;
    sol.final_residual = rn;
    sol.speed = x[3 * N];

    // Node states and dense samples (forward integration on every segment).
    sol.nodes = lay.nodes;
    sol.node_states.resize(N + 1);
    for (int m = 0; m <= N; ++m) {
        if (fwd) {
            sol.node_states[m] = m < N ? Vec3(x.segment<3>(3 * m))
                                       : propagate(p, sol.speed, x.segment<3>(3 * (N - 1)),
                                                   lay.nodes[N - 1], lay.nodes[N], o);
        } else {
            sol.node_states[m] = m > 0 ? Vec3(x.segment<3>(3 * (m - 1)))
                                       : propagate(p, sol.speed, x.segment<3>(0), lay.nodes[1],
                                                   lay.nodes[0], o);
        }
    }
    for (int i = 0; i < N; ++i) {
        sol.grid.push_back(lay.nodes[i]);
        sol.states.push_back(sol.node_states[i]);
        const double end = lay.nodes[i + 1];
        auto rhs = [&](double, const Vec3& s) { return Vec3(vector_field(p, sol.speed, s)); };
        integrate(rhs, lay.nodes[i], end, sol.node_states[i], o, [&](double t, const Vec3& s) {
            if (t < end) {
                sol.grid.push_back(t);
                sol.states.push_back(s);
            }
        });
    }
    sol.grid.push_back(lay.nodes[N]);
    sol.states.push_back(sol.node_states[N]);
    for (const Vec3& s : sol.states) {
        const Vec3 g = vector_field(p, sol.speed, s);
        sol.derivs.push_back(g);
        sol.second.push_back(field_jacobian(p, sol.speed, s) * g);
    }
    sol.xi_left = -lay.nodes.front();
    sol.xi_cut = lay.nodes.back();
    return sol;
}

double find_z_ae(const PulseSolution& s) {
    const double wb = solve_wb(s.params).wb;
    const double half = 0.5 * critical_branches(s.params, wb).U2;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < s.states.size(); ++i) {
        if (s.states[i][0] > s.states[imax][0]) imax = i;
    }
    for (std::size_t i = imax; i + 1 < s.states.size(); ++i) {
        if (s.states[i][0] >= half && s.states[i + 1][0] < half) {
            boost::uintmax_t iters = 100;
            auto g = [&](double xi) { return s.state_at(xi)[0] - half; };
            const auto br = boost::math::tools::toms748_solve(
                g, s.grid[i], s.grid[i + 1], boost::math::tools::eps_tolerance<double>(50), iters);
            return 0.5 * (br.first + br.second);
        }
    }
    throw ValidityError("pulse has no back: u never returns below U2(w_b)/2");
}

void finalize(PulseSolution& sol, const ShootOptions& opt) {
    sol.z_ae = find_z_ae(sol);
    sol.tau = opt.tau > 0 ? opt.tau : default_tau(sol.params);
    sol.markers = segment_markers(sol, sol.tau, opt.sigma0);
}

double auto_right(const ModelParams& p, double c, double z) {
    const double wb = solve_wb(p).wb;
    const double Xi = -default_tau(p) * std::log(p.eps);
    const double tail = 25.0 / std::abs(fast_stable_rate(p, c, wb));
    return std::max(1.2 * (z + Xi), z + Xi + tail);
}

}  // namespace

SingularSkeleton singular_skeleton(const ModelParams& p, int samples) {
    SingularSkeleton s;
    s.wb = solve_wb(p).wb;
    s.c0 = wave_speed_c0(p);
    const double U2 = critical_branches(p, s.wb).U2;
    s.front_start = {0, 0, 0};
    s.front_end = {1, 0, 0};
    s.back_start = {U2, 0, s.wb};
    s.back_end = {0, 0, s.wb};
    for (int i = 0; i < samples; ++i) {
        const double w = s.wb * i / (samples - 1);
        s.right_arc.emplace_back(critical_branches(p, w).U2, 0.0, w);
        s.left_arc.emplace_back(0.0, 0.0, s.wb - w);
    }
    return s;
}

OriginSpectrum origin_spectrum(const ModelParams& p, double c) {
    const double f0 = F0(p);
    const double ka = p.k * p.a;
    const double b = c * f0 * f0;
    const double disc = std::sqrt(b * b + 4.0 * f0 * f0 * ka);
    OriginSpectrum o;
    o.mu_u = 0.5 * (b + disc);
    o.mu_s = 0.5 * (b - disc);
    o.mu_1 = -p.eps * p.gamma / c;
    if (!(o.mu_s < 0.0) || !(o.mu_1 < 0.0) || std::abs(o.mu_s - o.mu_1) < 1e-12) {
        throw ValidityError("origin is not hyperbolic with one unstable and two stable directions");
    }
    o.left_u = Vec3(f0 * ka, o.mu_u, 0.0).normalized();
    o.left_s = Vec3(f0 * ka, o.mu_s, 0.0).normalized();
    const double m = o.mu_1;
    const double l2 = (p.eps / c) * f0 / (m * m - b * m - f0 * f0 * ka);
    const double l1 = l2 * (m - b) / f0;
    o.left_1 = Vec3(l1, l2, 1.0).normalized();
    o.right_u = Vec3(1.0, o.mu_u / f0, p.eps / (c * o.mu_u + p.eps * p.gamma));
    return o;
}

double default_tau(const ModelParams& p) {
    const double U2 = critical_branches(p, solve_wb(p).wb).U2;
    return 2.0 / (std::sqrt(p.k / 2.0) * F0(p) * std::min(1.0, U2));
}

PulseSolution shoot_pulse(const ModelParams& p, double c_guess, const ShootOptions& opt) {
    validate(p, true);
    const double wb = solve_wb(p).wb;
    const OriginSpectrum os = origin_spectrum(p, c_guess);
    const double z = slow_arc_time(p, c_guess, wb);
    const double left = opt.left_length > 0 ? opt.left_length : std::max(6.0, 23.0 / os.mu_u);
    const double right = opt.right_length > 0 ? opt.right_length : auto_right(p, c_guess, 1.3 * z);
    const Layout lay = make_layout(left, right, opt.segment);
    const auto guess = skeleton_guess(p, c_guess, lay.nodes, z);
    PulseSolution sol = solve_multiple_shooting(p, c_guess, lay, guess, opt);
    finalize(sol, opt);
    if (opt.right_length <= 0) {
        const double need = auto_right(p, sol.speed, sol.z_ae);
        if (need > sol.xi_cut + 1e-9) {
            ShootOptions o2 = opt;
            o2.right_length = need;
            o2.left_length = sol.xi_left;
            return shoot_pulse_from(p, sol, o2);
        }
    }
    return sol;
}

PulseSolution shoot_pulse_from(const ModelParams& p, const PulseSolution& g, const ShootOptions& opt) {
    validate(p, true);
    const OriginSpectrum os = origin_spectrum(p, g.speed);
    const double left = opt.left_length > 0 ? opt.left_length : g.xi_left;
    const double right = opt.right_length > 0 ? opt.right_length : g.xi_cut;
    const Layout lay = make_layout(left, right, opt.segment);
    std::vector<Vec3> guess;
    for (double xi : lay.nodes) {
        if (xi < -g.xi_left) {
            guess.push_back(g.state_at(-g.xi_left) * std::exp(os.mu_u * (xi + g.xi_left)));
        } else if (xi > g.xi_cut) {
            const Vec3 e = g.state_at(g.xi_cut);
            guess.emplace_back(0.0, 0.0, e[2] * std::exp(os.mu_1 * (xi - g.xi_cut)));
        } else {
            guess.push_back(g.state_at(xi));
        }
    }
    PulseSolution sol = solve_multiple_shooting(p, g.speed, lay, guess, opt);
    finalize(sol, opt);
    return sol;
}

Vec3 PulseSolution::state_at(double xi) const {
    if (xi < grid.front() - 1e-12 || xi > grid.back() + 1e-12) {
        std::ostringstream msg;
        msg << "xi = " << xi << " outside pulse grid [" << grid.front() << ", " << grid.back() << "]";
        throw DomainError(msg.str());
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), xi);
    std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
    if (i + 1 >= grid.size()) i = grid.size() - 2;
    return hermite5(grid[i], grid[i + 1], states[i], derivs[i], second[i], states[i + 1],
                    derivs[i + 1], second[i + 1], xi);
}

Vec3 PulseSolution::deriv_at(double xi) const {
    return vector_field(params, speed, state_at(xi));
}

int PulseSolution::node_index(double xi) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (std::abs(nodes[i] - xi) < 1e-12) return static_cast<int>(i);
    }
    std::ostringstream msg;
    msg << "xi = " << xi << " is not a shooting node";
    throw DomainError(msg.str());
}

SegmentMarkers segment_markers(const PulseSolution& pulse, double tau, double sigma0) {
    const ModelParams& p = pulse.params;
    SegmentMarkers m{};
    m.Xi = -tau * std::log(p.eps);
    if (m.Xi > pulse.xi_cut) {
        std::ostringstream msg;
        msg << "Xi_tau = " << m.Xi << " exceeds truncation " << pulse.xi_cut;
        throw DomainError(msg.str());
    }
    const double U2 = critical_branches(p, solve_wb(p).wb).U2;
    m.xi0 = std::log(1.0 / sigma0) / (std::sqrt(p.k / 2.0) * F0(p) * std::min(1.0, U2));
    const double Z = pulse.z_ae;
    auto range = [&](double lo, double hi, int& first, int& last) {
        first = 0;
        last = -1;
        const int n = static_cast<int>(pulse.grid.size());
        int i = 0;
        while (i < n && pulse.grid[i] < lo) ++i;
        first = i;
        while (i < n && pulse.grid[i] <= hi) ++i;
        last = i - 1;
    };
    const double big = 1e300;
    range(-big, m.Xi, m.f_first, m.f_last);
    range(m.xi0, Z - m.xi0, m.r_first, m.r_last);
    range(Z - m.Xi, Z + m.Xi, m.b_first, m.b_last);
    range(Z + m.xi0, big, m.l_first, m.l_last);
    m.clipped = Z + m.Xi > pulse.xi_cut;
    return m;
}

std::vector<DerivativeSample> derivative_profile(const PulseSolution& pulse) {
    std::vector<DerivativeSample> out;
    out.reserve(pulse.grid.size());
    for (std::size_t i = 0; i < pulse.grid.size(); ++i) {
        out.push_back({pulse.grid[i], vector_field(pulse.params, pulse.speed, pulse.states[i])});
    }
    return out;
}

double front_deviation(const PulseSolution& pulse) {
    const LayerOrbit front = front_back_profiles(pulse.params).first;
    double worst = 0.0;
    const SegmentMarkers& m = pulse.markers;
    for (int i = m.f_first; i <= m.f_last; ++i) {
        const Vec3& s = pulse.states[i];
        worst = std::max({worst, std::abs(s[0] - front.u(pulse.grid[i])), std::abs(s[2])});
    }
    return worst;
}

double slow_deviation(const PulseSolution& pulse) {
    double worst = 0.0;
    const SegmentMarkers& m = pulse.markers;
    const double fold = fold_level(pulse.params);
    for (int i = m.r_first; i <= m.r_last; ++i) {
        const Vec3& s = pulse.states[i];
        const double U2 = critical_branches(pulse.params, std::min(s[2], fold)).U2;
        worst = std::max({worst, std::abs(s[0] - U2), std::abs(s[1])});
    }
    return worst;
}

void write_pulse_csv(const PulseSolution& pulse, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17);
    f << "xi,u,v,w,du,dv,dw\n";
    for (std::size_t i = 0; i < pulse.grid.size(); ++i) {
        const Vec3& s = pulse.states[i];
        const Vec3& d = pulse.derivs[i];
        f << pulse.grid[i] << ',' << s[0] << ',' << s[1] << ',' << s[2] << ',' << d[0] << ','
          << d[1] << ',' << d[2] << '\n';
    }
}

void write_pulse_json(const PulseSolution& pulse, const std::string& path) {
    const ModelParams& p = pulse.params;
    nlohmann::json j = {{"a", p.a},   {"k", p.k},   {"gamma", p.gamma},       {"M", p.M},
                        {"c1", p.c1}, {"eps", p.eps}, {"c", pulse.speed}, {"z_ae", pulse.z_ae}};
    j["xi_left"] = pulse.xi_left;
    j["xi_cut"] = pulse.xi_cut;
    j["iterations"] = pulse.iterations;
    j["final_residual"] = pulse.final_residual;
    j["residual_history"] = pulse.residual_history;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17) << j.dump(2) << '\n';
}

}  // namespace fhn
