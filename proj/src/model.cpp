#include "fhn/model.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace fhn {

namespace {

// 1/(1+e^x) without overflow.
double logistic_down(double x) {
    if (x > 0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

void validate(const ModelParams& p, bool require_eps) {
    std::ostringstream msg;
    if (!(p.a >= 0.0 && p.a < 0.5)) msg << "a must lie in [0, 1/2); ";
    if (!(p.k > 0.0)) msg << "k must be positive; ";
    if (!(p.gamma > 0.0)) msg << "gamma must be positive; ";
    if (!(p.M > 0.0)) msg << "M must be positive; ";
    if (!(p.c1 > 0.0)) msg << "c1 must be positive; ";
    if (require_eps ? !(p.eps > 0.0) : !(p.eps >= 0.0)) {
        msg << (require_eps ? "eps must be positive; " : "eps must be nonnegative; ");
    }
    if (msg.str().empty() && !trivial_rest_state_only(p)) {
        msg << "u = gamma*w meets the critical set away from the origin; ";
    }
    const std::string s = msg.str();
    if (!s.empty()) throw ValidityError(s.substr(0, s.size() - 2));
}

bool trivial_rest_state_only(const ModelParams& p) {
    // Sufficient test first: gamma*fold < min U2 on [0, w_b].
    const double fold = fold_level(p);
    double wtop = fold;
    try {
        wtop = solve_wb(p).wb;
    } catch (const ValidityError&) {
    }
    if (p.gamma * fold < critical_branches(p, wtop).U2) return true;
    // Exact test: k u^2 - (k(1+a) - 1/gamma) u + k a = 0 has no positive root
    // with w = u/gamma below the F-domain limit.
    const double b = p.k * (1.0 + p.a) - 1.0 / p.gamma;
    const double disc = b * b - 4.0 * p.k * p.k * p.a;
    if (disc < 0.0) return true;
    const double s = std::sqrt(disc);
    for (double u : {(b - s) / (2.0 * p.k), (b + s) / (2.0 * p.k)}) {
        if (u > 1e-14 && u / p.gamma < w_limit(p)) return false;
    }
    return true;
}

double sqrt_argument(const ModelParams& p, double w) {
    const double q = 1.0 + p.M / (2.0 * p.c1);
    return q * q - 2.0 * w / p.c1;
}

double w_limit(const ModelParams& p) {
    const double q = 1.0 + p.M / (2.0 * p.c1);
    return 0.5 * p.c1 * q * q;
}

Deformation deformation(const ModelParams& p, double w) {
    const double s = sqrt_argument(p, w);
    if (!(s > 0.0)) {
        std::ostringstream msg;
        msg << "F undefined at w = " << w << " (sqrt argument " << s << ")";
        throw DomainError(msg.str());
    }
    const double r = std::sqrt(s);
    Deformation d;
    d.F = 0.5 + p.M / (4.0 * p.c1) + 0.5 * r;
    d.Fw = -0.5 / (p.c1 * r);
    d.Fww = -0.5 / (p.c1 * p.c1 * s * r);
    return d;
}

double F0(const ModelParams& p) { return 1.0 + p.M / (2.0 * p.c1); }
double Fm(const ModelParams& p) { return 0.5 + p.M / (4.0 * p.c1); }

Reaction reaction(const ModelParams& p, double u, double w) {
    Reaction r;
    r.f = p.k * u * (u - p.a) * (u - 1.0) + u * w;
    r.fu = p.k * (3.0 * u * u - 2.0 * (p.a + 1.0) * u + p.a) + w;
    r.fw = u;
    return r;
}

Vec3 vector_field(const ModelParams& p, double c, const Vec3& s, FieldMode mode) {
    const double u = s[0], v = s[1], w = s[2];
    if (mode == FieldMode::reduced) {
        if (std::abs(v) > 1e-10 || std::abs(reaction(p, u, w).f) > 1e-10) {
            throw DomainError("reduced flow requested off the critical set");
        }
        return {0.0, 0.0, (u - p.gamma * w) / c};
    }
    const double F = deformation(p, w).F;
    const double f = reaction(p, u, w).f;
    Vec3 out;
    out[0] = F * v;
    out[1] = c * F * F * v + F * f;
    out[2] = mode == FieldMode::layer ? 0.0 : (p.eps / c) * (u - p.gamma * w);
    return out;
}

Eigen::Matrix3d field_jacobian(const ModelParams& p, double c, const Vec3& s) {
    const double u = s[0], v = s[1], w = s[2];
    const Deformation d = deformation(p, w);
    const Reaction r = reaction(p, u, w);
    Eigen::Matrix3d J;
    J << 0.0, d.F, d.Fw * v,
        d.F * r.fu, c * d.F * d.F, 2.0 * c * d.F * d.Fw * v + d.Fw * r.f + d.F * r.fw,
        p.eps / c, 0.0, -p.eps * p.gamma / c;
    return J;
}

Vec3 field_dc(const ModelParams& p, double c, const Vec3& s) {
    const double F = deformation(p, s[2]).F;
    return {0.0, F * F * s[1], -(p.eps / (c * c)) * (s[0] - p.gamma * s[2])};
}

double fold_level(const ModelParams& p) { return p.k * (1.0 - p.a) * (1.0 - p.a) / 4.0; }

Branches critical_branches(const ModelParams& p, double w0) {
    const double fold = fold_level(p);
    if (w0 < 0.0 || w0 > fold) {
        std::ostringstream msg;
        msg << "w0 = " << w0 << " outside [0, fold = " << fold << "]";
        throw DomainError(msg.str());
    }
    const double half = (1.0 - p.a) * (1.0 - p.a) / 4.0 - w0 / p.k;
    const double r = std::sqrt(std::max(half, 0.0));
    Branches b;
    b.U1 = 0.5 * (1.0 + p.a) - r;
    b.U2 = 0.5 * (1.0 + p.a) + r;
    return b;
}

double wave_speed_c0(const ModelParams& p) {
    return std::sqrt(2.0 * p.k) * (0.5 - p.a) / F0(p);
}

double wb_residual(const ModelParams& p, double w) {
    const Branches b = critical_branches(p, w);
    return (1.0 - 2.0 * p.a) * deformation(p, w).F - (2.0 * b.U1 - b.U2) * F0(p);
}

WbResult solve_wb(const ModelParams& p) {
    const double lo0 = 1e-12;
    const double hi0 = fold_level(p) - 1e-12;
    const int n = 1000;
    int changes = 0;
    double lo = 0.0, hi = 0.0;
    double prev = wb_residual(p, lo0);
    double wprev = lo0;
    for (int i = 1; i <= n; ++i) {
        const double w = lo0 + (hi0 - lo0) * i / n;
        const double cur = wb_residual(p, w);
        if ((prev < 0.0) != (cur < 0.0)) {
            if (changes == 0) {
                lo = wprev;
                hi = w;
            }
            ++changes;
        }
        prev = cur;
        wprev = w;
    }
    if (changes == 0) {
        std::ostringstream msg;
        msg << "no back-layer level: (1-2a)F(w) - (2U1 - U2)F(0) has no sign change on (0, "
            << hi0 << "] for a = " << p.a << ", k = " << p.k << ", M = " << p.M
            << ", c1 = " << p.c1;
        throw ValidityError(msg.str());
    }
    double flo = wb_residual(p, lo);
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = wb_residual(p, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    WbResult r;
    r.wb = 0.5 * (lo + hi);
    r.residual = wb_residual(p, r.wb);
    r.sign_changes = changes;
    r.bracket_hi = hi0;
    return r;
}

double LayerOrbit::u(double xi) const {
    const double x = rate * xi + std::log(C);
    return kind == LayerKind::front ? amplitude * logistic_down(-x) : amplitude * logistic_down(x);
}

double LayerOrbit::du(double xi) const {
    // u (A - u) / A from both logistic halves; subtracting A - u loses the tail.
    const double x = rate * xi + std::log(C);
    const double s = kind == LayerKind::front ? 1.0 : -1.0;
    return s * rate * amplitude * logistic_down(x) * logistic_down(-x);
}

double LayerOrbit::ddu(double xi) const {
    const double x = rate * xi + std::log(C);
    // A - 2u is -A (sigma(-x) - sigma(x)) for the front and A (...) for the back;
    // with the sign of du both give the same expression.
    return -rate * (logistic_down(-x) - logistic_down(x)) * du(xi);
}

std::pair<LayerOrbit, LayerOrbit> front_back_profiles(const ModelParams& p) {
    const double c0 = wave_speed_c0(p);
    const double sk = std::sqrt(p.k / 2.0);

    LayerOrbit front;
    front.kind = LayerKind::front;
    front.w_level = 0.0;
    front.speed = c0;
    front.C = 1.0;
    front.amplitude = 1.0;
    front.F = F0(p);
    front.rate = front.F * sk;
    front.endpoints = {Vec3(0, 0, 0), Vec3(1, 0, 0)};

    const double wb = solve_wb(p).wb;
    const double U2 = critical_branches(p, wb).U2;
    LayerOrbit back;
    back.kind = LayerKind::back;
    back.w_level = wb;
    back.speed = c0;
    back.C = 1.0;
    back.amplitude = U2;
    back.F = deformation(p, wb).F;
    back.rate = back.F * sk * U2;
    back.endpoints = {Vec3(U2, 0, wb), Vec3(0, 0, wb)};
    return {front, back};
}

double layer_residual(const ModelParams& p, const LayerOrbit& o, double lo, double hi, int n) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = lo + (hi - lo) * i / (n - 1);
        const Vec3 s = o.state(xi);
        const Vec3 g = vector_field(p, o.speed, s, FieldMode::layer);
        worst = std::max(worst, std::abs(o.du(xi) - g[0]));
        worst = std::max(worst, std::abs(o.ddu(xi) / o.F - g[1]));
    }
    return worst;
}

}  // namespace fhn
