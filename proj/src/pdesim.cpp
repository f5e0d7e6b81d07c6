#include "fhn/pdesim.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fhn {

PulseProfile::PulseProfile(const PulseSolution& pulse) : pulse_(&pulse) {
    const OriginSpectrum os = origin_spectrum(pulse.params, pulse.speed);
    mu_u_ = os.mu_u;
    slow_rate_ = pulse.params.eps * pulse.params.gamma / pulse.speed;
    left_ = pulse.states.front();
    right_ = pulse.states.back();
}

Vec3 PulseProfile::operator()(double xi) const {
    const auto& g = pulse_->grid;
    if (xi < g.front()) return left_ * std::exp(mu_u_ * (xi - g.front()));
    if (xi > g.back()) return Vec3(0.0, 0.0, right_[2] * std::exp(-slow_rate_ * (xi - g.back())));
    return pulse_->state_at(xi);
}

double PulseProfile::tail_end(double tol) const {
    const double wc = std::abs(right_[2]);
    if (wc <= tol) return pulse_->grid.back();
    return pulse_->grid.back() + std::log(wc / tol) / slow_rate_;
}

PdeState rest_state(double x0, double h, int n) {
    PdeState s;
    s.x0 = x0;
    s.h = h;
    s.U.assign(static_cast<std::size_t>(n), 0.0);
    s.W.assign(static_cast<std::size_t>(n), 0.0);
    return s;
}

PdeState pulse_initial_state(const PulseProfile& prof, const PdeOptions& opt, double* offset) {
    const PulseSolution& pulse = prof.pulse();
    const double lo = -(opt.left_margin + 1.1 * pulse.speed * opt.t_end);
    const double hi = std::max(prof.tail_end(opt.tail_tol), pulse.z_ae + 20.0);
    const double mid = 0.5 * (lo + hi);
    const double h = (hi - lo) / (opt.n - 1);
    PdeState s = rest_state(lo - mid, h, opt.n);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3 v = prof(s.x(i) + mid);
        s.U[i] = v[0];
        s.W[i] = v[2];
    }
    if (offset) *offset = mid;
    return s;
}

void add_bump(PdeState& s, double center, double amplitude, double width) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = (s.x(i) - center) / width;
        s.U[i] += amplitude * std::exp(-r * r);
    }
}

namespace {

void check_fields(const ModelParams& p, const std::vector<double>& U, const std::vector<double>& W,
                  double blowup, double t) {
    const double wl = w_limit(p);
    for (std::size_t i = 0; i < U.size(); ++i) {
        if (!std::isfinite(U[i]) || !std::isfinite(W[i]) || std::abs(U[i]) > blowup) {
            std::ostringstream msg;
            msg << "blow-up at t = " << t << ", node " << i << ": U = " << U[i];
            throw BlowUpError(msg.str());
        }
        if (W[i] >= wl) {
            std::ostringstream msg;
            msg << "W = " << W[i] << " leaves the deformation domain (limit " << wl << ") at t = " << t;
            throw DomainError(msg.str());
        }
    }
}

// F at nodes and at the n-1 interior faces.
void face_values(const ModelParams& p, const std::vector<double>& W, std::vector<double>& Fn,
                 std::vector<double>& Ff) {
    const std::size_t n = W.size();
    Fn.resize(n);
    Ff.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) Fn[i] = deformation_F(p, W[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) Ff[i] = deformation_F(p, 0.5 * (W[i] + W[i + 1]));
}

void operator_impl(const ModelParams& p, double h, const std::vector<double>& U,
                   const std::vector<double>& W, std::vector<double>& dU, std::vector<double>& dW,
                   std::vector<double>& Fn, std::vector<double>& Ff, bool with_diffusion) {
    const std::size_t n = U.size();
    dU.resize(n);
    dW.resize(n);
    if (with_diffusion) face_values(p, W, Fn, Ff);
    const double ih2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = U[i];
        double d = 0.0;
        if (with_diffusion) {
            const double right = i + 1 < n ? (U[i + 1] - u) / Ff[i] : 0.0;
            const double left = i > 0 ? (u - U[i - 1]) / Ff[i - 1] : 0.0;
            d = (right - left) * ih2 / Fn[i];
        }
        dU[i] = d + p.k * u * (u - p.a) * (1.0 - u) - u * W[i];
        dW[i] = p.eps * (u - p.gamma * W[i]);
    }
}

// Implicit Euler for U_t = D(W) U with W frozen; Thomas algorithm.
void implicit_diffusion(const ModelParams& p, double dt, PdeState& s, std::vector<double>& Fn,
                        std::vector<double>& Ff) {
    const std::size_t n = s.size();
    face_values(p, s.W, Fn, Ff);
    const double r = dt / (s.h * s.h);
    std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs = s.U;
    for (std::size_t i = 0; i < n; ++i) {
        const double gl = i > 0 ? r / (Fn[i] * Ff[i - 1]) : 0.0;
        const double gr = i + 1 < n ? r / (Fn[i] * Ff[i]) : 0.0;
        lo[i] = -gl;
        up[i] = -gr;
        di[i] = 1.0 + gl + gr;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lo[i] / di[i - 1];
        di[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    s.U[n - 1] = rhs[n - 1] / di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) s.U[i] = (rhs[i] - up[i] * s.U[i + 1]) / di[i];
}

struct Stepper {
    const ModelParams& p;
    bool diffusion;
    std::vector<double> k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w, tu, tw, Fn, Ff;

    void rk4(PdeState& s, double dt) {
        const std::size_t n = s.size();
        tu.resize(n);
        tw.resize(n);
        operator_impl(p, s.h, s.U, s.W, k1u, k1w, Fn, Ff, diffusion);
        for (std::size_t i = 0; i < n; ++i) {
            tu[i] = s.U[i] + 0.5 * dt * k1u[i];
            tw[i] = s.W[i] + 0.5 * dt * k1w[i];
        }
        operator_impl(p, s.h, tu, tw, k2u, k2w, Fn, Ff, diffusion);
        for (std::size_t i = 0; i < n; ++i) {
            tu[i] = s.U[i] + 0.5 * dt * k2u[i];
            tw[i] = s.W[i] + 0.5 * dt * k2w[i];
        }
        operator_impl(p, s.h, tu, tw, k3u, k3w, Fn, Ff, diffusion);
        for (std::size_t i = 0; i < n; ++i) {
            tu[i] = s.U[i] + dt * k3u[i];
            tw[i] = s.W[i] + dt * k3w[i];
        }
        operator_impl(p, s.h, tu, tw, k4u, k4w, Fn, Ff, diffusion);
        for (std::size_t i = 0; i < n; ++i) {
            s.U[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            s.W[i] += dt / 6.0 * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]);
        }
    }
};

}  // namespace

void spatial_operator(const ModelParams& p, const PdeState& s, std::vector<double>& dU,
                      std::vector<double>& dW) {
    check_fields(p, s.U, s.W, std::numeric_limits<double>::infinity(), s.t);
    std::vector<double> Fn, Ff;
    operator_impl(p, s.h, s.U, s.W, dU, dW, Fn, Ff, true);
}

double stable_dt(const ModelParams& p, const PdeState& s) {
    const double wmax = *std::max_element(s.W.begin(), s.W.end());
    // F decreases in w, so the smallest F sits at the largest W.
    const double fmin = deformation_F(p, std::max(wmax, 0.0));
    return 0.4 * s.h * s.h * fmin * fmin;
}

DistanceResult orbital_distance(const PdeState& s, const PulseProfile& prof, double s_ref, int span) {
    auto dist = [&](double shift) {
        double m = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Vec3 v = prof(s.x(i) + shift);
            m = std::max({m, std::abs(s.U[i] - v[0]), std::abs(s.W[i] - v[2])});
        }
        return m;
    };
    DistanceResult best{dist(s_ref), s_ref};
    for (int j = -span; j <= span; ++j) {
        if (j == 0) continue;
        const double sh = s_ref + j * s.h;
        const double d = dist(sh);
        if (d < best.distance) best = {d, sh};
    }
    if (best.distance == 0.0) return best;
    std::uintmax_t iters = 60;
    const auto r = boost::math::tools::brent_find_minima(dist, best.shift - s.h, best.shift + s.h, 40, iters);
    if (r.second < best.distance) best = {r.second, r.first};
    return best;
}

double PdeRun::measured_speed() const {
    const std::size_t n = times.size();
    if (n < 4) return 0.0;
    double st = 0, ss = 0, stt = 0, sts = 0;
    std::size_t m = 0;
    for (std::size_t i = n / 2; i < n; ++i, ++m) {
        st += times[i];
        ss += shifts[i];
        stt += times[i] * times[i];
        sts += times[i] * shifts[i];
    }
    const double dm = static_cast<double>(m);
    return (dm * sts - st * ss) / (dm * stt - st * st);
}

PdeRun evolve(const ModelParams& p, PdeState s, const PulseProfile& prof, double shift0,
              const PdeOptions& opt) {
    validate(p, true);
    check_fields(p, s.U, s.W, opt.blowup, s.t);
    PdeRun run;
    const double c = prof.pulse().speed;
    double dt = opt.dt > 0.0 ? opt.dt : 0.9 * stable_dt(p, s);
    if (opt.scheme == TimeScheme::rk4 && dt > stable_dt(p, s)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " exceeds the explicit bound " << stable_dt(p, s);
        throw ValidityError(msg.str());
    }
    const int per_record = std::max(1, static_cast<int>(std::ceil(opt.record_every / dt)));
    dt = opt.record_every / per_record;
    run.dt = dt;
    Stepper st{p, opt.scheme == TimeScheme::rk4, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};

    double shift = shift0;
    auto record = [&]() {
        const DistanceResult d = orbital_distance(s, prof, shift);
        shift = d.shift;
        run.times.push_back(s.t);
        run.distances.push_back(d.distance);
        run.shifts.push_back(d.shift);
        if (opt.snapshot_every > 0 && (run.times.size() - 1) % static_cast<std::size_t>(opt.snapshot_every) == 0)
            run.snapshots.push_back(s);
    };
    record();
    const long records = static_cast<long>(std::llround(opt.t_end / opt.record_every));
    const double t0 = s.t;
    for (long r = 1; r <= records; ++r) {
        for (int j = 0; j < per_record; ++j) {
            st.rk4(s, dt);
            if (opt.scheme == TimeScheme::imex) implicit_diffusion(p, dt, s, st.Fn, st.Ff);
            ++run.steps;
        }
        s.t = t0 + r * opt.record_every;
        check_fields(p, s.U, s.W, opt.blowup, s.t);
        if (opt.scheme == TimeScheme::rk4 && dt > stable_dt(p, s)) {
            // W grew past the level used for dt; refuse rather than go unstable.
            std::ostringstream msg;
            msg << "explicit step bound violated at t = " << s.t;
            throw ValidityError(msg.str());
        }
        // The pulse moves left at speed c: state(x) ~ profile(x + c t).
        shift += c * opt.record_every;
        record();
    }
    run.final_state = std::move(s);
    return run;
}

void write_snapshots_csv(const std::vector<PdeState>& snaps, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17) << "t,x,U,W\n";
    for (const auto& s : snaps)
        for (std::size_t i = 0; i < s.size(); ++i) f << s.t << ',' << s.x(i) << ',' << s.U[i] << ',' << s.W[i] << '\n';
}

void write_distance_csv(const PdeRun& run, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17) << "t,d_orbital,shift\n";
    for (std::size_t i = 0; i < run.times.size(); ++i)
        f << run.times[i] << ',' << run.distances[i] << ',' << run.shifts[i] << '\n';
}

}  // namespace fhn
